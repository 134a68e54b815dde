//! Deterministic CSV and JSON emitters for score reports, statistics
//! tables and grid results. Scores print on the 0..100 scale with one
//! decimal, matching the published tables.

use serde::Serialize;

use crate::scoring::{MatchReport, PathwayStats, ScoreGrid, ScoreReport};

fn quote(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

const SCORE_HEADER: &str = "species_p,species_r,species_f,reactions_p,reactions_r,reactions_f,edges_p,edges_r,edges_f,macro_f";

fn score_fields(s: &ScoreReport) -> String {
    format!(
        "{:.1},{:.1},{:.1},{:.1},{:.1},{:.1},{:.1},{:.1},{:.1},{:.1}",
        s.species.precision,
        s.species.recall,
        s.species.f,
        s.reactions.precision,
        s.reactions.recall,
        s.reactions.f,
        s.edges.precision,
        s.edges.recall,
        s.edges.f,
        s.macro_f
    )
}

/// One row per strategy: label, per-class P/R/F, macro F.
pub fn compare_csv(rows: &[(MatchReport, ScoreReport)]) -> String {
    let mut out = format!("strategy,{SCORE_HEADER}\n");
    for (report, score) in rows {
        out.push_str(&format!(
            "{},{}\n",
            quote(&report.strategy),
            score_fields(score)
        ));
    }
    out
}

#[derive(Serialize)]
struct CompareRow<'a> {
    strategy: &'a str,
    score: &'a ScoreReport,
    counts: &'a MatchReport,
}

#[derive(Serialize)]
struct CompareDocument<'a> {
    extracted: &'a str,
    target: &'a str,
    rows: Vec<CompareRow<'a>>,
}

/// Full JSON report including the raw match counts.
pub fn compare_json(rows: &[(MatchReport, ScoreReport)]) -> String {
    let (extracted, target) = rows
        .first()
        .map(|(r, _)| (r.extracted.as_str(), r.target.as_str()))
        .unwrap_or(("", ""));
    let doc = CompareDocument {
        extracted,
        target,
        rows: rows
            .iter()
            .map(|(report, score)| CompareRow {
                strategy: &report.strategy,
                score,
                counts: report,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("report structs serialize")
}

pub fn stats_csv(name: &str, stats: &PathwayStats) -> String {
    let mut out = String::from(
        "name,species,reactions,compartments,edges,reactant_edges,product_edges,modifier_edges,isolated_species,components,nonsingleton_components\n",
    );
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{},{}\n",
        quote(name),
        stats.species,
        stats.reactions,
        stats.compartments,
        stats.edges,
        stats.reactant_edges,
        stats.product_edges,
        stats.modifier_edges,
        stats.isolated_species,
        stats.components,
        stats.nonsingleton_components
    ));
    out
}

#[derive(Serialize)]
struct StatsDocument<'a> {
    name: &'a str,
    #[serde(flatten)]
    stats: &'a PathwayStats,
}

pub fn stats_json(name: &str, stats: &PathwayStats) -> String {
    serde_json::to_string_pretty(&StatsDocument { name, stats }).expect("stats serialize")
}

/// Matrix rows followed by commented best-per-strategy and histogram
/// sections.
pub fn grid_csv(grid: &ScoreGrid) -> String {
    let mut out = format!("pathway,strategy,{SCORE_HEADER}\n");
    for cell in &grid.cells {
        out.push_str(&format!(
            "{},{},{}\n",
            quote(&cell.pathway),
            quote(&cell.strategy),
            score_fields(&cell.score)
        ));
    }
    out.push_str("# best_per_strategy\n");
    for best in &grid.best_per_strategy {
        out.push_str(&format!(
            "{},{:.1},{}\n",
            quote(&best.strategy),
            best.macro_f,
            quote(&best.best.join("; "))
        ));
    }
    out.push_str("# histogram\n");
    for (pathway, count) in &grid.histogram {
        out.push_str(&format!("{},{}\n", quote(pathway), count));
    }
    out
}

pub fn grid_json(grid: &ScoreGrid) -> String {
    serde_json::to_string_pretty(grid).expect("grid serializes")
}
