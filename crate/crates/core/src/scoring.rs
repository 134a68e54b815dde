//! Subgraph overlap between an extracted pathway and a reference,
//! micro-averaged precision/recall/F per element class, the
//! macro-averaged total F-score, pathway statistics and the
//! pathway-by-strategy score grid.
//!
//! Matching is existential (any counterpart counts), never an injective
//! assignment. An extracted reaction subgraph matches a target reaction
//! when the reaction types match and every incident edge of the
//! extracted reaction is covered by a target edge with the same role
//! and a matching species endpoint; the target side mirrors the search.
//!
//! Species, reactions and edges are deduplicated by match-relevant
//! profile and pairwise verdicts are memoized, so corpus-scale inputs
//! (10^5 mentions with heavy repetition) stay tractable.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matching::{levenshtein_similarity, MatchStrategy, ReactionMatcher, SpeciesKind};
use crate::model::{Pathway, Role};
use crate::ontology::OntologyGraph;

/// Matched/total counts for one element class, both directions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub matched_extracted: usize,
    pub total_extracted: usize,
    pub matched_target: usize,
    pub total_target: usize,
}

/// Raw overlap counts for one pathway pair under one strategy.
#[derive(Clone, Debug, Serialize)]
pub struct MatchReport {
    pub strategy: String,
    pub extracted: String,
    pub target: String,
    pub species: ClassCounts,
    pub reactions: ClassCounts,
    pub edges: ClassCounts,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClassScore {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

/// Scores on the 0..100 scale, rounded to one decimal.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScoreReport {
    pub species: ClassScore,
    pub reactions: ClassScore,
    pub edges: ClassScore,
    pub macro_f: f64,
}

pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn class_score(c: &ClassCounts) -> (ClassScore, f64) {
    let ratio = |matched: usize, total: usize, other_total: usize| -> f64 {
        if total == 0 {
            if other_total == 0 {
                100.0
            } else {
                0.0
            }
        } else {
            matched as f64 / total as f64 * 100.0
        }
    };
    let p = ratio(c.matched_extracted, c.total_extracted, c.total_target);
    let r = ratio(c.matched_target, c.total_target, c.total_extracted);
    let f = if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    };
    (
        ClassScore {
            precision: round1(p),
            recall: round1(r),
            f: round1(f),
        },
        f,
    )
}

/// Micro P/R/F per class plus the macro total F (unweighted mean of the
/// three class F values).
pub fn score(report: &MatchReport) -> ScoreReport {
    let (species, f_s) = class_score(&report.species);
    let (reactions, f_r) = class_score(&report.reactions);
    let (edges, f_e) = class_score(&report.edges);
    ScoreReport {
        species,
        reactions,
        edges,
        macro_f: round1((f_s + f_r + f_e) / 3.0),
    }
}

// ---------------------------------------------------------------------------
// overlap

type Unit<'a> = (u32, &'a BTreeSet<u64>);
type SpeciesProfileKey<'a> = (Unit<'a>, Vec<Unit<'a>>);
type ReactionProfileKey = (u32, Vec<(Role, u32)>);

struct SideData<'a> {
    pathway: &'a Pathway,
    /// per species: (name id, signature) of the species itself followed
    /// by its constituents (one level)
    units: Vec<Vec<Unit<'a>>>,
    sp_profile: Vec<u32>,
    sp_profile_rep: Vec<usize>,
    sp_profile_members: Vec<usize>,
    sp_profile_keys: Vec<SpeciesProfileKey<'a>>,
    sp_key_index: HashMap<SpeciesProfileKey<'a>, u32>,
    /// per reaction: interned signature id
    rsig: Vec<u32>,
    rsig_sets: Vec<&'a BTreeSet<String>>,
    rsig_index: HashMap<&'a BTreeSet<String>, u32>,
    rsig_reactions: Vec<Vec<usize>>,
    rx_profile_rep: Vec<usize>,
    rx_profile_members: Vec<usize>,
    /// unique (role, species profile, reaction signature) edge profiles
    edge_profiles: Vec<(Role, u32, u32)>,
    edge_profile_members: Vec<usize>,
}

fn build_side<'a>(
    pathway: &'a Pathway,
    intern: &mut HashMap<&'a str, u32>,
    names: &mut Vec<&'a str>,
) -> SideData<'a> {
    let mut name_id = |s: &'a str| -> u32 {
        if let Some(&id) = intern.get(s) {
            return id;
        }
        let id = names.len() as u32;
        intern.insert(s, id);
        names.push(s);
        id
    };

    let species = pathway.species();
    let mut units: Vec<Vec<Unit<'a>>> = Vec::with_capacity(species.len());
    for sp in species {
        let mut u = vec![(name_id(&sp.normalized_name), &sp.entrez_signature)];
        for c in pathway.constituents_of(sp) {
            u.push((name_id(&c.normalized_name), &c.entrez_signature));
        }
        units.push(u);
    }

    let mut sp_profile = Vec::with_capacity(species.len());
    let mut sp_profile_rep = Vec::new();
    let mut sp_profile_members: Vec<usize> = Vec::new();
    let mut sp_profile_keys = Vec::new();
    let mut sp_key_index: HashMap<SpeciesProfileKey<'a>, u32> = HashMap::new();
    for (i, u) in units.iter().enumerate() {
        let mut constituents = u[1..].to_vec();
        constituents.sort();
        let key: SpeciesProfileKey<'a> = (u[0], constituents);
        let id = *sp_key_index.entry(key.clone()).or_insert_with(|| {
            sp_profile_rep.push(i);
            sp_profile_members.push(0);
            sp_profile_keys.push(key);
            (sp_profile_rep.len() - 1) as u32
        });
        sp_profile_members[id as usize] += 1;
        sp_profile.push(id);
    }

    let reactions = pathway.reactions();
    let mut rsig = Vec::with_capacity(reactions.len());
    let mut rsig_sets: Vec<&'a BTreeSet<String>> = Vec::new();
    let mut rsig_index: HashMap<&'a BTreeSet<String>, u32> = HashMap::new();
    let mut rsig_reactions: Vec<Vec<usize>> = Vec::new();
    for (i, r) in reactions.iter().enumerate() {
        let id = *rsig_index.entry(&r.sbo_signature).or_insert_with(|| {
            rsig_sets.push(&r.sbo_signature);
            rsig_reactions.push(Vec::new());
            (rsig_sets.len() - 1) as u32
        });
        rsig.push(id);
        rsig_reactions[id as usize].push(i);
    }

    let mut rx_profile_rep = Vec::new();
    let mut rx_profile_members: Vec<usize> = Vec::new();
    let mut rx_key_index: HashMap<ReactionProfileKey, u32> = HashMap::new();
    for (i, _) in reactions.iter().enumerate() {
        let mut incident: Vec<(Role, u32)> = pathway
            .reaction_edges(i)
            .iter()
            .map(|&e| {
                let edge = pathway.edge_at(e);
                let s = pathway
                    .species_pos(&edge.species_id)
                    .expect("edge integrity");
                (edge.role, sp_profile[s])
            })
            .collect();
        incident.sort();
        let key: ReactionProfileKey = (rsig[i], incident);
        let id = *rx_key_index.entry(key).or_insert_with(|| {
            rx_profile_rep.push(i);
            rx_profile_members.push(0);
            (rx_profile_rep.len() - 1) as u32
        });
        rx_profile_members[id as usize] += 1;
    }

    let mut edge_profiles: Vec<(Role, u32, u32)> = Vec::new();
    let mut edge_profile_members: Vec<usize> = Vec::new();
    let mut edge_key_index: HashMap<(Role, u32, u32), u32> = HashMap::new();
    for e in pathway.edges() {
        let s = pathway.species_pos(&e.species_id).expect("edge integrity");
        let r = pathway
            .reaction_pos(&e.reaction_id)
            .expect("edge integrity");
        let key = (e.role, sp_profile[s], rsig[r]);
        let id = *edge_key_index.entry(key).or_insert_with(|| {
            edge_profiles.push(key);
            edge_profile_members.push(0);
            (edge_profiles.len() - 1) as u32
        });
        edge_profile_members[id as usize] += 1;
    }

    SideData {
        pathway,
        units,
        sp_profile,
        sp_profile_rep,
        sp_profile_members,
        sp_profile_keys,
        sp_key_index,
        rsig,
        rsig_sets,
        rsig_index,
        rsig_reactions,
        rx_profile_rep,
        rx_profile_members,
        edge_profiles,
        edge_profile_members,
    }
}

struct OverlapEngine<'a> {
    ext: SideData<'a>,
    tgt: SideData<'a>,
    strategy: &'a MatchStrategy,
    ontology: &'a OntologyGraph,
    names: Vec<&'a str>,
    sims: HashMap<(u32, u32), u32>,
    sp_memo: HashMap<(u32, u32), bool>,
    rx_memo: HashMap<(u32, u32), bool>,
}

impl<'a> OverlapEngine<'a> {
    fn similarity(&mut self, a: u32, b: u32) -> u32 {
        if a == b {
            return 100;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&s) = self.sims.get(&key) {
            return s;
        }
        let s = levenshtein_similarity(self.names[a as usize], self.names[b as usize]);
        self.sims.insert(key, s);
        s
    }

    fn unit_match(&mut self, a: Unit<'a>, b: Unit<'a>) -> bool {
        let threshold = self.strategy.species.threshold;
        self.strategy.species.kinds.iter().any(|k| match k {
            SpeciesKind::Nmeq => a.0 == b.0,
            SpeciesKind::Appeq => self.similarity(a.0, b.0) >= threshold,
            SpeciesKind::Enteq => !a.1.is_empty() && a.1 == b.1,
            SpeciesKind::Entov => a.1.intersection(b.1).next().is_some(),
        })
    }

    /// Species match by profile id, memoized. Mirrors
    /// `matching::species_match` exactly (the acceptance suite checks
    /// the two against each other through the brute-force oracle).
    fn species_profiles_match(&mut self, pe: u32, pt: u32) -> bool {
        if let Some(&hit) = self.sp_memo.get(&(pe, pt)) {
            return hit;
        }
        let ext_units = &self.ext.units[self.ext.sp_profile_rep[pe as usize]];
        let tgt_units = &self.tgt.units[self.tgt.sp_profile_rep[pt as usize]];
        let result = if self.strategy.species.with_constituents {
            let pairs: Vec<(Unit<'a>, Unit<'a>)> = ext_units
                .iter()
                .flat_map(|&a| tgt_units.iter().map(move |&b| (a, b)))
                .collect();
            pairs.into_iter().any(|(a, b)| self.unit_match(a, b))
        } else {
            let (a, b) = (ext_units[0], tgt_units[0]);
            self.unit_match(a, b)
        };
        self.sp_memo.insert((pe, pt), result);
        result
    }

    fn species_match_by_pos(&mut self, ext_pos: usize, tgt_pos: usize) -> bool {
        let pe = self.ext.sp_profile[ext_pos];
        let pt = self.tgt.sp_profile[tgt_pos];
        self.species_profiles_match(pe, pt)
    }

    /// Reaction type match by interned signature pair, memoized.
    fn rsig_match(&mut self, re: u32, rt: u32) -> bool {
        if let Some(&hit) = self.rx_memo.get(&(re, rt)) {
            return hit;
        }
        let a = self.ext.rsig_sets[re as usize];
        let b = self.tgt.rsig_sets[rt as usize];
        let result = match self.strategy.reaction {
            ReactionMatcher::Sboeq => !a.is_empty() && a == b,
            ReactionMatcher::Sboov => a.intersection(b).next().is_some(),
            ReactionMatcher::Sboisa => a
                .iter()
                .any(|ta| b.iter().any(|tb| self.ontology.related_is_a(ta, tb))),
        };
        self.rx_memo.insert((re, rt), result);
        result
    }

    fn species_counts(&mut self) -> ClassCounts {
        let ext_profiles = self.ext.sp_profile_rep.len();
        let tgt_profiles = self.tgt.sp_profile_rep.len();

        let mut matched_extracted = 0;
        for pe in 0..ext_profiles as u32 {
            // identical profile first: the cheapest likely hit
            let twin = self
                .tgt
                .sp_key_index
                .get(&self.ext.sp_profile_keys[pe as usize])
                .copied();
            let hit = twin
                .map(|pt| self.species_profiles_match(pe, pt))
                .unwrap_or(false)
                || (0..tgt_profiles as u32).any(|pt| self.species_profiles_match(pe, pt));
            if hit {
                matched_extracted += self.ext.sp_profile_members[pe as usize];
            }
        }
        let mut matched_target = 0;
        for pt in 0..tgt_profiles as u32 {
            let twin = self
                .ext
                .sp_key_index
                .get(&self.tgt.sp_profile_keys[pt as usize])
                .copied();
            let hit = twin
                .map(|pe| self.species_profiles_match(pe, pt))
                .unwrap_or(false)
                || (0..ext_profiles as u32).any(|pe| self.species_profiles_match(pe, pt));
            if hit {
                matched_target += self.tgt.sp_profile_members[pt as usize];
            }
        }
        ClassCounts {
            matched_extracted,
            total_extracted: self.ext.pathway.species().len(),
            matched_target,
            total_target: self.tgt.pathway.species().len(),
        }
    }

    /// Every incident edge of the reaction at `from_pos` (on side
    /// `ext_side`) must be covered by an edge of the candidate reaction
    /// with the same role and a matching species endpoint.
    fn edges_covered(&mut self, ext_side: bool, from_pos: usize, cand_pos: usize) -> bool {
        let (from, cand) = if ext_side {
            (&self.ext, &self.tgt)
        } else {
            (&self.tgt, &self.ext)
        };
        let from_edges: Vec<(Role, usize)> = from
            .pathway
            .reaction_edges(from_pos)
            .iter()
            .map(|&e| {
                let edge = from.pathway.edge_at(e);
                let s = from
                    .pathway
                    .species_pos(&edge.species_id)
                    .expect("integrity");
                (edge.role, s)
            })
            .collect();
        let cand_edges: Vec<(Role, usize)> = cand
            .pathway
            .reaction_edges(cand_pos)
            .iter()
            .map(|&e| {
                let edge = cand.pathway.edge_at(e);
                let s = cand
                    .pathway
                    .species_pos(&edge.species_id)
                    .expect("integrity");
                (edge.role, s)
            })
            .collect();
        from_edges.into_iter().all(|(role, s_from)| {
            cand_edges.iter().any(|&(cand_role, s_cand)| {
                if role != cand_role {
                    return false;
                }
                if ext_side {
                    self.species_match_by_pos(s_from, s_cand)
                } else {
                    self.species_match_by_pos(s_cand, s_from)
                }
            })
        })
    }

    fn reaction_subgraph_matched(&mut self, ext_side: bool, from_pos: usize) -> bool {
        let (from, cand) = if ext_side {
            (&self.ext, &self.tgt)
        } else {
            (&self.tgt, &self.ext)
        };
        let from_sig = from.rsig[from_pos];
        // identical-signature candidates first
        let twin_list: Vec<usize> = cand
            .rsig_index
            .get(from.rsig_sets[from_sig as usize])
            .map(|&id| cand.rsig_reactions[id as usize].clone())
            .unwrap_or_default();
        let total = cand.pathway.reactions().len();
        let candidates = twin_list.into_iter().chain(0..total);
        for cand_pos in candidates {
            let matched = {
                let cand_sig = if ext_side {
                    self.tgt.rsig[cand_pos]
                } else {
                    self.ext.rsig[cand_pos]
                };
                let (re, rt) = if ext_side {
                    (from_sig, cand_sig)
                } else {
                    (cand_sig, from_sig)
                };
                self.rsig_match(re, rt)
            };
            if matched && self.edges_covered(ext_side, from_pos, cand_pos) {
                return true;
            }
        }
        false
    }

    fn reaction_counts(&mut self) -> ClassCounts {
        let mut matched_extracted = 0;
        for p in 0..self.ext.rx_profile_rep.len() {
            let rep = self.ext.rx_profile_rep[p];
            if self.reaction_subgraph_matched(true, rep) {
                matched_extracted += self.ext.rx_profile_members[p];
            }
        }
        let mut matched_target = 0;
        for p in 0..self.tgt.rx_profile_rep.len() {
            let rep = self.tgt.rx_profile_rep[p];
            if self.reaction_subgraph_matched(false, rep) {
                matched_target += self.tgt.rx_profile_members[p];
            }
        }
        ClassCounts {
            matched_extracted,
            total_extracted: self.ext.pathway.reactions().len(),
            matched_target,
            total_target: self.tgt.pathway.reactions().len(),
        }
    }

    fn edge_counts(&mut self) -> ClassCounts {
        let ext_profiles = self.ext.edge_profiles.clone();
        let tgt_profiles = self.tgt.edge_profiles.clone();

        let mut matched_extracted = 0;
        for (i, &(role, spe, rse)) in ext_profiles.iter().enumerate() {
            let hit = tgt_profiles.iter().any(|&(t_role, spt, rst)| {
                t_role == role && self.rsig_match(rse, rst) && self.species_profiles_match(spe, spt)
            });
            if hit {
                matched_extracted += self.ext.edge_profile_members[i];
            }
        }
        let mut matched_target = 0;
        for (i, &(role, spt, rst)) in tgt_profiles.iter().enumerate() {
            let hit = ext_profiles.iter().any(|&(e_role, spe, rse)| {
                e_role == role && self.rsig_match(rse, rst) && self.species_profiles_match(spe, spt)
            });
            if hit {
                matched_target += self.tgt.edge_profile_members[i];
            }
        }
        ClassCounts {
            matched_extracted,
            total_extracted: self.ext.pathway.edges().len(),
            matched_target,
            total_target: self.tgt.pathway.edges().len(),
        }
    }
}

fn ensure_annotated(pathway: &Pathway) -> Result<()> {
    for r in pathway.reactions() {
        if r.sbo_signature.is_empty() {
            return Err(Error::UnannotatedReaction {
                pathway: pathway.name.clone(),
                reaction: r.id.clone(),
            });
        }
    }
    Ok(())
}

/// Count matched elements per class for one pathway pair under one
/// strategy.
pub fn overlap(
    extracted: &Pathway,
    target: &Pathway,
    strategy: &MatchStrategy,
    ontology: &OntologyGraph,
) -> Result<MatchReport> {
    ensure_annotated(extracted)?;
    ensure_annotated(target)?;

    let mut intern = HashMap::new();
    let mut names = Vec::new();
    let ext = build_side(extracted, &mut intern, &mut names);
    let tgt = build_side(target, &mut intern, &mut names);
    let mut engine = OverlapEngine {
        ext,
        tgt,
        strategy,
        ontology,
        names,
        sims: HashMap::new(),
        sp_memo: HashMap::new(),
        rx_memo: HashMap::new(),
    };

    Ok(MatchReport {
        strategy: strategy.label(),
        extracted: extracted.name.clone(),
        target: target.name.clone(),
        species: engine.species_counts(),
        reactions: engine.reaction_counts(),
        edges: engine.edge_counts(),
    })
}

// ---------------------------------------------------------------------------
// statistics

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PathwayStats {
    pub species: usize,
    pub reactions: usize,
    pub compartments: usize,
    pub edges: usize,
    pub reactant_edges: usize,
    pub product_edges: usize,
    pub modifier_edges: usize,
    /// species with no incident edge
    pub isolated_species: usize,
    /// connected components of the species-reaction incidence graph,
    /// singletons included
    pub components: usize,
    /// components with at least two nodes
    pub nonsingleton_components: usize,
}

/// Count elements, per-role edges, isolated species and connected
/// components (iterative DFS; the test suite cross-checks against a
/// union-find oracle).
pub fn stats(pathway: &Pathway) -> PathwayStats {
    let ns = pathway.species().len();
    let nr = pathway.reactions().len();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); ns + nr];
    let mut per_role = [0usize; 3];
    for e in pathway.edges() {
        let s = pathway.species_pos(&e.species_id).expect("edge integrity");
        let r = pathway
            .reaction_pos(&e.reaction_id)
            .expect("edge integrity");
        adjacency[s].push(ns + r);
        adjacency[ns + r].push(s);
        per_role[e.role as usize] += 1;
    }

    let isolated_species = (0..ns).filter(|&s| adjacency[s].is_empty()).count();

    let mut seen = vec![false; ns + nr];
    let mut components = 0;
    let mut nonsingleton_components = 0;
    let mut stack = Vec::new();
    for start in 0..ns + nr {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut size = 0;
        stack.push(start);
        seen[start] = true;
        while let Some(node) = stack.pop() {
            size += 1;
            for &next in &adjacency[node] {
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        if size >= 2 {
            nonsingleton_components += 1;
        }
    }

    PathwayStats {
        species: ns,
        reactions: nr,
        compartments: pathway.compartments().len(),
        edges: pathway.edges().len(),
        reactant_edges: per_role[Role::Reactant as usize],
        product_edges: per_role[Role::Product as usize],
        modifier_edges: per_role[Role::Modifier as usize],
        isolated_species,
        components,
        nonsingleton_components,
    }
}

// ---------------------------------------------------------------------------
// grid

#[derive(Clone, Debug, Serialize)]
pub struct GridCell {
    pub pathway: String,
    pub strategy: String,
    pub report: MatchReport,
    pub score: ScoreReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrategyBest {
    pub strategy: String,
    pub macro_f: f64,
    /// all argmax pathways; more than one on ties
    pub best: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScoreGrid {
    pub target: String,
    pub cells: Vec<GridCell>,
    pub best_per_strategy: Vec<StrategyBest>,
    /// how often each pathway is (co-)best across strategies
    pub histogram: BTreeMap<String, usize>,
}

/// Evaluate one grid cell.
pub fn grid_cell(
    extracted: &Pathway,
    target: &Pathway,
    strategy: &MatchStrategy,
    ontology: &OntologyGraph,
) -> Result<GridCell> {
    let report = overlap(extracted, target, strategy, ontology)?;
    let score = score(&report);
    Ok(GridCell {
        pathway: extracted.name.clone(),
        strategy: strategy.label(),
        report,
        score,
    })
}

/// Assemble per-strategy winners and the best-pathway histogram from
/// precomputed cells (cells may arrive in any order; output order
/// follows `strategies`).
pub fn assemble_grid(
    target_name: &str,
    strategies: &[MatchStrategy],
    cells: Vec<GridCell>,
) -> ScoreGrid {
    let mut best_per_strategy = Vec::with_capacity(strategies.len());
    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
    for s in strategies {
        let label = s.label();
        let of_strategy: Vec<&GridCell> = cells.iter().filter(|c| c.strategy == label).collect();
        let best_f = of_strategy
            .iter()
            .map(|c| c.score.macro_f)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut best: Vec<String> = of_strategy
            .iter()
            .filter(|c| c.score.macro_f == best_f)
            .map(|c| c.pathway.clone())
            .collect();
        best.sort();
        best.dedup();
        if best.len() > 1 {
            log::info!(
                "strategy `{label}`: {} pathways tied at {best_f}",
                best.len()
            );
        }
        for p in &best {
            *histogram.entry(p.clone()).or_insert(0) += 1;
        }
        best_per_strategy.push(StrategyBest {
            strategy: label,
            macro_f: best_f,
            best,
        });
    }
    ScoreGrid {
        target: target_name.to_string(),
        cells,
        best_per_strategy,
        histogram,
    }
}

/// Score every extracted pathway against the target under every
/// strategy (sequential; callers may parallelize over `grid_cell` and
/// use `assemble_grid` directly).
pub fn grid(
    extracted: &[&Pathway],
    target: &Pathway,
    strategies: &[MatchStrategy],
    ontology: &OntologyGraph,
) -> Result<ScoreGrid> {
    let mut cells = Vec::with_capacity(extracted.len() * strategies.len());
    for p in extracted {
        for s in strategies {
            cells.push(grid_cell(p, target, s, ontology)?);
        }
    }
    Ok(assemble_grid(&target.name, strategies, cells))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::enumerate_strategies;
    use crate::model::{Reaction, Species};

    fn annotated(name: &str, entries: &[(&str, &str, &[u64])]) -> Pathway {
        // entries: (species id, species name, signature)
        let mut p = Pathway::new(name);
        for (id, sp_name, sig) in entries {
            p.add_species(Species::new(*id, *sp_name).with_entrez(sig.iter().copied()))
                .unwrap();
        }
        p
    }

    fn strategy(label: &str) -> MatchStrategy {
        MatchStrategy::parse(label).unwrap()
    }

    #[test]
    fn self_overlap_is_perfect() {
        let mut p = annotated("p", &[("s1", "AKT", &[207]), ("s2", "mTOR", &[2475])]);
        p.add_reaction(Reaction::new("r1").with_terms(["SBO:0000216"]))
            .unwrap();
        p.add_edge("s1", "r1", Role::Reactant).unwrap();
        p.add_edge("s2", "r1", Role::Modifier).unwrap();
        let onto = OntologyGraph::default();
        for s in enumerate_strategies() {
            let report = overlap(&p, &p, &s, &onto).unwrap();
            let sc = score(&report);
            assert_eq!(sc.macro_f, 100.0, "strategy {}", s.label());
            assert_eq!(sc.species.precision, 100.0);
            assert_eq!(sc.edges.recall, 100.0);
        }
    }

    #[test]
    fn species_similarity_below_threshold_unmatched() {
        let a = annotated("a", &[("x", "akt", &[])]);
        let b = annotated("b", &[("y", "akt1", &[])]);
        let onto = OntologyGraph::default();
        for label in ["nmeq, sboeq", "appeq, sboeq"] {
            let report = overlap(&a, &b, &strategy(label), &onto).unwrap();
            assert_eq!(report.species.matched_extracted, 0, "{label}");
            assert_eq!(report.species.matched_target, 0, "{label}");
            assert_eq!(report.species.total_extracted, 1);
        }
    }

    #[test]
    fn role_swapped_edge_blocks_reaction_match() {
        let build = |role: Role| {
            let mut p = annotated("p", &[("s1", "A", &[]), ("s2", "B", &[])]);
            p.add_reaction(Reaction::new("r1").with_terms(["SBO:0000216"]))
                .unwrap();
            p.add_reaction(Reaction::new("r2").with_terms(["SBO:0000177"]))
                .unwrap();
            p.add_edge("s1", "r1", Role::Reactant).unwrap();
            p.add_edge("s2", "r2", role).unwrap();
            p
        };
        let extracted = build(Role::Reactant);
        let target = build(Role::Product);
        let onto = OntologyGraph::default();
        let report = overlap(&extracted, &target, &strategy("nmeq, sboeq"), &onto).unwrap();
        // r1 matches (same edge set), r2 does not (role swapped)
        assert_eq!(report.reactions.matched_extracted, 1);
        assert_eq!(report.reactions.matched_target, 1);
        assert_eq!(report.edges.matched_extracted, 1);
    }

    #[test]
    fn unannotated_reaction_is_an_error() {
        let mut p = annotated("p", &[("s1", "A", &[])]);
        p.add_reaction(Reaction::new("r1")).unwrap();
        let onto = OntologyGraph::default();
        assert!(matches!(
            overlap(&p, &p, &strategy("nmeq, sboeq"), &onto),
            Err(Error::UnannotatedReaction { .. })
        ));
    }

    #[test]
    fn score_half_matched() {
        let counts = ClassCounts {
            matched_extracted: 1,
            total_extracted: 2,
            matched_target: 1,
            total_target: 2,
        };
        let report = MatchReport {
            strategy: "nmeq, sboeq".to_string(),
            extracted: "a".to_string(),
            target: "b".to_string(),
            species: counts,
            reactions: ClassCounts::default(),
            edges: ClassCounts::default(),
        };
        let sc = score(&report);
        assert_eq!(sc.species.precision, 50.0);
        assert_eq!(sc.species.recall, 50.0);
        assert_eq!(sc.species.f, 50.0);
        // empty classes on both sides score 100
        assert_eq!(sc.reactions.f, 100.0);
    }

    #[test]
    fn macro_is_mean_of_class_f() {
        // class F values 30, 60, 90 -> macro 60.0
        let c = |matched: usize, total: usize| ClassCounts {
            matched_extracted: matched,
            total_extracted: total,
            matched_target: matched,
            total_target: total,
        };
        let report = MatchReport {
            strategy: String::new(),
            extracted: String::new(),
            target: String::new(),
            species: c(3, 10),
            reactions: c(6, 10),
            edges: c(9, 10),
        };
        let sc = score(&report);
        assert_eq!(sc.species.f, 30.0);
        assert_eq!(sc.reactions.f, 60.0);
        assert_eq!(sc.edges.f, 90.0);
        assert_eq!(sc.macro_f, 60.0);
    }

    #[test]
    fn swap_exchanges_precision_and_recall() {
        let a = annotated("a", &[("x", "AKT", &[]), ("y", "mTOR", &[])]);
        let b = annotated("b", &[("z", "AKT", &[])]);
        let onto = OntologyGraph::default();
        let s = strategy("nmeq, sboeq");
        let ab = score(&overlap(&a, &b, &s, &onto).unwrap());
        let ba = score(&overlap(&b, &a, &s, &onto).unwrap());
        assert_eq!(ab.species.precision, ba.species.recall);
        assert_eq!(ab.species.recall, ba.species.precision);
        assert_eq!(ab.species.f, ba.species.f);
    }

    #[test]
    fn stats_single_reaction_chain() {
        let mut p = annotated("p", &[("s1", "A", &[]), ("s2", "B", &[])]);
        p.add_reaction(Reaction::new("r1").with_terms(["SBO:0000182"]))
            .unwrap();
        p.add_edge("s1", "r1", Role::Reactant).unwrap();
        p.add_edge("s2", "r1", Role::Product).unwrap();
        let st = stats(&p);
        assert_eq!(st.components, 1);
        assert_eq!(st.nonsingleton_components, 1);
        assert_eq!(st.isolated_species, 0);
        assert_eq!(st.reactant_edges, 1);
        assert_eq!(st.product_edges, 1);
        assert_eq!(st.modifier_edges, 0);
    }

    #[test]
    fn stats_isolated_species_are_components() {
        let p = annotated("p", &[("a", "A", &[]), ("b", "B", &[]), ("c", "C", &[])]);
        let st = stats(&p);
        assert_eq!(st.isolated_species, 3);
        assert_eq!(st.components, 3);
        assert_eq!(st.nonsingleton_components, 0);
    }

    #[test]
    fn grid_single_pathway_wins_everywhere() {
        let mut p = annotated("only", &[("s1", "AKT", &[])]);
        p.add_reaction(Reaction::new("r1").with_terms(["SBO:0000216"]))
            .unwrap();
        p.add_edge("s1", "r1", Role::Reactant).unwrap();
        let onto = OntologyGraph::default();
        let strategies = enumerate_strategies();
        let g = grid(&[&p], &p, &strategies, &onto).unwrap();
        assert_eq!(g.cells.len(), 24);
        assert_eq!(g.histogram.get("only"), Some(&24));
        assert!(g.best_per_strategy.iter().all(|b| b.best == vec!["only"]));
    }

    #[test]
    fn grid_dominant_pathway_wins_everywhere() {
        // `good` reproduces the target exactly; `bad` shares nothing
        let mut target = annotated("target", &[("s1", "AKT", &[207])]);
        target
            .add_reaction(Reaction::new("r1").with_terms(["SBO:0000216"]))
            .unwrap();
        target.add_edge("s1", "r1", Role::Reactant).unwrap();
        let mut good = annotated("good", &[("g1", "AKT", &[207])]);
        good.add_reaction(Reaction::new("gr1").with_terms(["SBO:0000216"]))
            .unwrap();
        good.add_edge("g1", "gr1", Role::Reactant).unwrap();
        let mut bad = annotated("bad", &[("b1", "ZZZ9", &[999])]);
        bad.add_reaction(Reaction::new("br1").with_terms(["GO:0000001"]))
            .unwrap();
        bad.add_edge("b1", "br1", Role::Modifier).unwrap();

        let onto = OntologyGraph::default();
        let strategies = enumerate_strategies();
        let g = grid(&[&good, &bad], &target, &strategies, &onto).unwrap();
        assert_eq!(g.cells.len(), 48);
        assert_eq!(g.histogram.get("good"), Some(&24));
        assert_eq!(g.histogram.get("bad"), None);
        let total: usize = g.histogram.values().sum();
        assert_eq!(total, 24);
    }
}
