//! Element-level matchers: five species matchers, three reaction
//! matchers, the strict edge matcher, and the 24 subgraph matching
//! strategies they compose into.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Pathway, Reaction, Role, Species};
use crate::ontology::OntologyGraph;

/// Default similarity cut-off for `appeq` on the 0..100 scale.
pub const DEFAULT_SIMILARITY_THRESHOLD: u32 = 90;

/// Built-in state prefix vocabulary used for name normalization when no
/// custom table is loaded. Must stay in sync with the shipped
/// `state-prefixes.map` data file.
pub const DEFAULT_STATE_PREFIXES: &[&str] = &[
    "phosphorylated",
    "dephosphorylated",
    "ubiquitinated",
    "acetylated",
    "methylated",
    "activated",
    "inactivated",
];

/// Lowercase a name, collapse whitespace and strip state prefixes from
/// the front until none applies.
pub fn normalize_name(name: &str, prefixes: &[&str]) -> String {
    let mut s = name
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ");
    'strip: loop {
        for p in prefixes {
            let p = p.to_lowercase();
            if s.len() > p.len() + 1 && s.starts_with(&p) && s.as_bytes()[p.len()] == b' ' {
                s = s[p.len() + 1..].to_string();
                continue 'strip;
            }
        }
        break;
    }
    s
}

/// Levenshtein-based similarity on the 0..100 scale:
/// `round(100 * (1 - dist / max_len))`, with two empty strings defined
/// as 100. Distances are computed over Unicode code points.
pub fn levenshtein_similarity(a: &str, b: &str) -> u32 {
    if a == b {
        return 100;
    }
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let max_len = a.len().max(b.len());
    if max_len == 0 {
        return 100;
    }
    let dist = levenshtein_distance(&a, &b);
    (100.0 * (1.0 - dist as f64 / max_len as f64)).round() as u32
}

// Two-row dynamic program.
fn levenshtein_distance(a: &[char], b: &[char]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// One of the four base species matchers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpeciesKind {
    /// Normalized names exactly equal.
    Nmeq,
    /// Normalized names approximately equal (similarity >= threshold).
    Appeq,
    /// Entrez signatures non-empty and exactly equal.
    Enteq,
    /// Entrez signatures overlap.
    Entov,
}

impl SpeciesKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpeciesKind::Nmeq => "nmeq",
            SpeciesKind::Appeq => "appeq",
            SpeciesKind::Enteq => "enteq",
            SpeciesKind::Entov => "entov",
        }
    }
}

/// A species matcher: a disjunction of base kinds, optionally loosened
/// to complex constituents (`wc`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesMatcher {
    pub kinds: Vec<SpeciesKind>,
    pub with_constituents: bool,
    pub threshold: u32,
}

impl SpeciesMatcher {
    pub fn new(kinds: Vec<SpeciesKind>, with_constituents: bool) -> Self {
        SpeciesMatcher {
            kinds,
            with_constituents,
            threshold: DEFAULT_SIMILARITY_THRESHOLD,
        }
    }

    pub fn label(&self) -> String {
        let mut parts: Vec<&str> = self.kinds.iter().map(SpeciesKind::as_str).collect();
        if self.with_constituents {
            parts.push("wc");
        }
        parts.join("/")
    }

    fn base_match(&self, a: &Species, b: &Species) -> bool {
        self.kinds.iter().any(|k| match k {
            SpeciesKind::Nmeq => a.normalized_name == b.normalized_name,
            SpeciesKind::Appeq => {
                levenshtein_similarity(&a.normalized_name, &b.normalized_name) >= self.threshold
            }
            SpeciesKind::Enteq => {
                !a.entrez_signature.is_empty() && a.entrez_signature == b.entrez_signature
            }
            SpeciesKind::Entov => a
                .entrez_signature
                .intersection(&b.entrez_signature)
                .next()
                .is_some(),
        })
    }
}

/// Reaction matcher over SBO/GO signatures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReactionMatcher {
    /// Signatures exactly equal.
    Sboeq,
    /// Signatures overlap.
    Sboov,
    /// Some term of each signature relates via is_a.
    Sboisa,
}

impl ReactionMatcher {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReactionMatcher::Sboeq => "sboeq",
            ReactionMatcher::Sboov => "sboov",
            ReactionMatcher::Sboisa => "sboisa",
        }
    }
}

/// Decide whether two species count as equal under `matcher`. With
/// `wc`, each species is expanded to itself plus its constituents (one
/// level) and any cross pairing may satisfy the base matcher.
pub fn species_match(
    pathway_a: &Pathway,
    a: &Species,
    pathway_b: &Pathway,
    b: &Species,
    matcher: &SpeciesMatcher,
) -> bool {
    if matcher.base_match(a, b) {
        return true;
    }
    if !matcher.with_constituents {
        return false;
    }
    let ca = pathway_a.constituents_of(a);
    let cb = pathway_b.constituents_of(b);
    if ca.is_empty() && cb.is_empty() {
        return false;
    }
    for xa in std::iter::once(&a).chain(ca.iter()) {
        for xb in std::iter::once(&b).chain(cb.iter()) {
            if std::ptr::eq(*xa, a) && std::ptr::eq(*xb, b) {
                continue; // already tried
            }
            if matcher.base_match(xa, xb) {
                return true;
            }
        }
    }
    false
}

/// Decide whether two reactions count as equal under `matcher`.
pub fn reaction_match(
    a: &Reaction,
    b: &Reaction,
    matcher: ReactionMatcher,
    ontology: &OntologyGraph,
) -> bool {
    match matcher {
        ReactionMatcher::Sboeq => !a.sbo_signature.is_empty() && a.sbo_signature == b.sbo_signature,
        ReactionMatcher::Sboov => a
            .sbo_signature
            .intersection(&b.sbo_signature)
            .next()
            .is_some(),
        ReactionMatcher::Sboisa => a.sbo_signature.iter().any(|ta| {
            b.sbo_signature
                .iter()
                .any(|tb| ontology.related_is_a(ta, tb))
        }),
    }
}

/// Edge labels must be strictly equal, given that both endpoints
/// already matched.
pub fn edge_match(a: Role, b: Role) -> bool {
    a == b
}

/// A full subgraph matching strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchStrategy {
    pub species: SpeciesMatcher,
    pub reaction: ReactionMatcher,
}

impl MatchStrategy {
    /// Canonical label, e.g. `appeq/entov/wc, sboisa`.
    pub fn label(&self) -> String {
        format!("{}, {}", self.species.label(), self.reaction.as_str())
    }

    /// Parse a label back into a strategy. Accepts the `sobisa`
    /// spelling as an alias for `sboisa`.
    pub fn parse(label: &str) -> Result<MatchStrategy> {
        let err = |message: &str| Error::InvalidStrategyLabel {
            label: label.to_string(),
            message: message.to_string(),
        };
        let (species_part, reaction_part) = label
            .split_once(',')
            .ok_or_else(|| err("expected `<species>, <reaction>`"))?;
        let reaction = match reaction_part.trim() {
            "sboeq" => ReactionMatcher::Sboeq,
            "sboov" => ReactionMatcher::Sboov,
            "sboisa" | "sobisa" => ReactionMatcher::Sboisa,
            other => return Err(err(&format!("unknown reaction matcher `{other}`"))),
        };
        let mut kinds = Vec::new();
        let mut with_constituents = false;
        for token in species_part.trim().split('/') {
            match token.trim() {
                "nmeq" => kinds.push(SpeciesKind::Nmeq),
                "appeq" => kinds.push(SpeciesKind::Appeq),
                "enteq" => kinds.push(SpeciesKind::Enteq),
                "entov" => kinds.push(SpeciesKind::Entov),
                "wc" => with_constituents = true,
                other => return Err(err(&format!("unknown species matcher `{other}`"))),
            }
        }
        if kinds.is_empty() {
            return Err(err("species matcher list is empty"));
        }
        let mut seen = kinds.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != kinds.len() {
            return Err(err("duplicate species matcher kind"));
        }
        Ok(MatchStrategy {
            species: SpeciesMatcher::new(kinds, with_constituents),
            reaction,
        })
    }

    pub fn with_threshold(mut self, threshold: u32) -> Self {
        self.species.threshold = threshold;
        self
    }
}

impl fmt::Display for MatchStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// The 24 strategies in results-table order: eight species matchers
/// (nmeq, appeq, appeq/enteq, appeq/entov, then their wc variants)
/// crossed with sboeq, sboov, sboisa.
pub fn enumerate_strategies() -> Vec<MatchStrategy> {
    let species_rows: [(Vec<SpeciesKind>, bool); 8] = [
        (vec![SpeciesKind::Nmeq], false),
        (vec![SpeciesKind::Appeq], false),
        (vec![SpeciesKind::Appeq, SpeciesKind::Enteq], false),
        (vec![SpeciesKind::Appeq, SpeciesKind::Entov], false),
        (vec![SpeciesKind::Nmeq], true),
        (vec![SpeciesKind::Appeq], true),
        (vec![SpeciesKind::Appeq, SpeciesKind::Enteq], true),
        (vec![SpeciesKind::Appeq, SpeciesKind::Entov], true),
    ];
    let reactions = [
        ReactionMatcher::Sboeq,
        ReactionMatcher::Sboov,
        ReactionMatcher::Sboisa,
    ];
    let mut out = Vec::with_capacity(24);
    for (kinds, wc) in &species_rows {
        for r in reactions {
            out.push(MatchStrategy {
                species: SpeciesMatcher::new(kinds.clone(), *wc),
                reaction: r,
            });
        }
    }
    out
}
