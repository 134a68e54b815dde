//! Shared test helpers: a seeded random pathway generator and the
//! independent oracles (exhaustive matcher, union-find components,
//! quadratic edit distance) the implementation is checked against.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pathcmp::matching::{species_match, MatchStrategy, ReactionMatcher};
use pathcmp::model::{Compartment, Pathway, Reaction, Role, Species};
use pathcmp::ontology::OntologyGraph;
use pathcmp::scoring::ClassCounts;

pub const NAME_POOL: &[&str] = &[
    "akt", "mtor", "raptor", "rictor", "pi3k", "pten", "tsc1", "tsc2", "rheb", "s6k", "eif4e",
    "ampk", "pdk1", "foxo", "gsk3", "erk", "mek", "ras", "raf", "p53", "irs1", "igf", "insr",
    "deptor",
];

pub const PREFIX_POOL: &[&str] = &["", "phosphorylated ", "activated ", "ubiquitinated "];

/// Terms drawn from the shipped ontology so sboisa has hierarchy to
/// walk.
pub const TERM_POOL: &[&str] = &[
    "SBO:0000216",
    "SBO:0000330",
    "SBO:0000177",
    "SBO:0000170",
    "SBO:0000169",
    "SBO:0000182",
    "SBO:0000168",
    "SBO:0000185",
    "SBO:0000179",
    "GO:0010467",
];

pub struct GenOptions {
    pub min_species: usize,
    pub max_species: usize,
    /// reactions per species, roughly
    pub reaction_ratio: f64,
    /// force Entrez signatures to at most one id
    pub singleton_signatures: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            min_species: 5,
            max_species: 60,
            reaction_ratio: 0.4,
            singleton_signatures: false,
        }
    }
}

pub fn random_name(rng: &mut StdRng) -> String {
    let base = NAME_POOL[rng.random_range(0..NAME_POOL.len())];
    let prefix = PREFIX_POOL[rng.random_range(0..PREFIX_POOL.len())];
    let suffix = if rng.random_bool(0.3) {
        format!("{}", rng.random_range(1..4))
    } else {
        String::new()
    };
    let name = format!("{prefix}{base}{suffix}");
    if rng.random_bool(0.3) {
        name.to_uppercase()
    } else {
        name
    }
}

fn random_signature(rng: &mut StdRng, singleton: bool) -> BTreeSet<u64> {
    if rng.random_bool(0.45) {
        return BTreeSet::new();
    }
    let max = if singleton { 1 } else { 3 };
    let n = rng.random_range(1..=max);
    (0..n).map(|_| rng.random_range(100..130)).collect()
}

/// Build a random annotated pathway that satisfies every model
/// invariant: constituents reference earlier species, every reaction
/// carries a non-empty signature, edges are unique triples.
pub fn random_pathway(rng: &mut StdRng, name: &str, opts: &GenOptions) -> Pathway {
    let mut p = Pathway::new(name);
    let n_species = rng.random_range(opts.min_species..=opts.max_species);

    let n_compartments = rng.random_range(0..3usize);
    for c in 0..n_compartments {
        p.add_compartment(Compartment {
            id: format!("{name}_c{c}"),
            name: format!("compartment {c}"),
        })
        .unwrap();
    }

    for i in 0..n_species {
        let mut sp = Species::new(format!("{name}_s{i}"), random_name(rng))
            .with_entrez(random_signature(rng, opts.singleton_signatures));
        if i >= 2 && rng.random_bool(0.15) {
            let mut members = BTreeSet::new();
            for _ in 0..rng.random_range(2..=3usize.min(i)) {
                members.insert(format!("{name}_s{}", rng.random_range(0..i)));
            }
            sp.constituents = members.into_iter().collect();
        }
        if n_compartments > 0 && rng.random_bool(0.3) {
            sp.compartment = Some(format!("{name}_c{}", rng.random_range(0..n_compartments)));
        }
        p.add_species(sp).unwrap();
    }

    let n_reactions = ((n_species as f64 * opts.reaction_ratio) as usize).max(1);
    let n_reactions = rng.random_range(0..=n_reactions);
    for i in 0..n_reactions {
        let n_terms = rng.random_range(1..=2usize);
        let terms: BTreeSet<String> = (0..n_terms)
            .map(|_| TERM_POOL[rng.random_range(0..TERM_POOL.len())].to_string())
            .collect();
        let mut r = Reaction::new(format!("{name}_r{i}"));
        r.sbo_signature = terms;
        p.add_reaction(r).unwrap();

        for _ in 0..rng.random_range(0..=4usize) {
            let s = rng.random_range(0..n_species);
            let role = match rng.random_range(0..3u8) {
                0 => Role::Reactant,
                1 => Role::Product,
                _ => Role::Modifier,
            };
            // duplicate triples are rejected by the model; skip them
            let _ = p.add_edge(&format!("{name}_s{s}"), &format!("{name}_r{i}"), role);
        }
    }

    p.check_invariants().unwrap();
    p
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// oracle: exhaustive overlap enumerator
//
// Plain nested loops over the public matcher API, no indexes, no
// deduplication, no memoization. The production path in
// `pathcmp::scoring` must agree with this exactly.

pub struct OracleReport {
    pub species: ClassCounts,
    pub reactions: ClassCounts,
    pub edges: ClassCounts,
}

pub fn oracle_overlap(
    extracted: &Pathway,
    target: &Pathway,
    strategy: &MatchStrategy,
    ontology: &OntologyGraph,
) -> OracleReport {
    let sp_match = |a_path: &Pathway, a: &Species, b_path: &Pathway, b: &Species| {
        species_match(a_path, a, b_path, b, &strategy.species)
    };
    let rx_match = |a: &Reaction, b: &Reaction| {
        pathcmp::matching::reaction_match(a, b, strategy.reaction, ontology)
    };

    let species = ClassCounts {
        matched_extracted: extracted
            .species()
            .iter()
            .filter(|a| {
                target
                    .species()
                    .iter()
                    .any(|b| sp_match(extracted, a, target, b))
            })
            .count(),
        total_extracted: extracted.species().len(),
        matched_target: target
            .species()
            .iter()
            .filter(|b| {
                extracted
                    .species()
                    .iter()
                    .any(|a| sp_match(extracted, a, target, b))
            })
            .count(),
        total_target: target.species().len(),
    };

    let subgraph_matched =
        |from_path: &Pathway, from: &Reaction, cand_path: &Pathway, flipped: bool| {
            cand_path.reactions().iter().any(|cand| {
                let types_ok = if flipped {
                    rx_match(cand, from)
                } else {
                    rx_match(from, cand)
                };
                if !types_ok {
                    return false;
                }
                let from_edges = from_path.neighbors(&from.id).unwrap();
                let cand_edges = cand_path.neighbors(&cand.id).unwrap();
                from_edges.iter().all(|(fs, frole)| {
                    cand_edges.iter().any(|(cs, crole)| {
                        if frole != crole {
                            return false;
                        }
                        let f_sp = from_path.species_by_id(fs).unwrap();
                        let c_sp = cand_path.species_by_id(cs).unwrap();
                        if flipped {
                            sp_match(cand_path, c_sp, from_path, f_sp)
                        } else {
                            sp_match(from_path, f_sp, cand_path, c_sp)
                        }
                    })
                })
            })
        };

    let reactions = ClassCounts {
        matched_extracted: extracted
            .reactions()
            .iter()
            .filter(|r| subgraph_matched(extracted, r, target, false))
            .count(),
        total_extracted: extracted.reactions().len(),
        matched_target: target
            .reactions()
            .iter()
            .filter(|r| subgraph_matched(target, r, extracted, true))
            .count(),
        total_target: target.reactions().len(),
    };

    let edge_matched =
        |from_path: &Pathway, edge: &pathcmp::RoleEdge, cand_path: &Pathway, flipped: bool| {
            cand_path.edges().iter().any(|cand| {
                if cand.role != edge.role {
                    return false;
                }
                let f_sp = from_path.species_by_id(&edge.species_id).unwrap();
                let c_sp = cand_path.species_by_id(&cand.species_id).unwrap();
                let f_rx = from_path.reaction_by_id(&edge.reaction_id).unwrap();
                let c_rx = cand_path.reaction_by_id(&cand.reaction_id).unwrap();
                if flipped {
                    sp_match(cand_path, c_sp, from_path, f_sp) && rx_match(c_rx, f_rx)
                } else {
                    sp_match(from_path, f_sp, cand_path, c_sp) && rx_match(f_rx, c_rx)
                }
            })
        };

    let edges = ClassCounts {
        matched_extracted: extracted
            .edges()
            .iter()
            .filter(|e| edge_matched(extracted, e, target, false))
            .count(),
        total_extracted: extracted.edges().len(),
        matched_target: target
            .edges()
            .iter()
            .filter(|e| edge_matched(target, e, extracted, true))
            .count(),
        total_target: target.edges().len(),
    };

    OracleReport {
        species,
        reactions,
        edges,
    }
}

// ---------------------------------------------------------------------------
// oracle: union-find connected components

pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            self.parent[x] = self.find(self.parent[x]);
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
    }
}

pub struct OracleStats {
    pub isolated_species: usize,
    pub components: usize,
    pub nonsingleton_components: usize,
}

pub fn oracle_components(pathway: &Pathway) -> OracleStats {
    let ns = pathway.species().len();
    let nr = pathway.reactions().len();
    let mut uf = UnionFind::new(ns + nr);
    let mut degree = vec![0usize; ns];
    let spos = |id: &str| {
        pathway
            .species()
            .iter()
            .position(|s| s.id == id)
            .expect("species exists")
    };
    let rpos = |id: &str| {
        pathway
            .reactions()
            .iter()
            .position(|r| r.id == id)
            .expect("reaction exists")
    };
    for e in pathway.edges() {
        let s = spos(&e.species_id);
        degree[s] += 1;
        uf.union(s, ns + rpos(&e.reaction_id));
    }
    let isolated_species = degree.iter().filter(|&&d| d == 0).count();
    let mut roots: Vec<usize> = (0..ns + nr).map(|i| uf.find(i)).collect();
    let mut sizes = vec![0usize; ns + nr];
    for &r in &roots {
        sizes[r] += 1;
    }
    roots.sort_unstable();
    roots.dedup();
    OracleStats {
        isolated_species,
        components: roots.len(),
        nonsingleton_components: roots.iter().filter(|&&r| sizes[r] >= 2).count(),
    }
}

// ---------------------------------------------------------------------------
// oracle: quadratic full-matrix edit distance

pub fn oracle_levenshtein_similarity(a: &str, b: &str) -> u32 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 100;
    }
    let mut m = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in m.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in m[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            m[i][j] = (m[i - 1][j] + 1)
                .min(m[i][j - 1] + 1)
                .min(m[i - 1][j - 1] + cost);
        }
    }
    let dist = m[a.len()][b.len()] as f64;
    let max_len = a.len().max(b.len()) as f64;
    (100.0 * (1.0 - dist / max_len)).round() as u32
}

// ---------------------------------------------------------------------------
// random standoff documents (valid by construction)

pub fn random_standoff(rng: &mut StdRng, id: &str) -> pathcmp::standoff::StandoffDocument {
    use pathcmp::standoff::REACTION_TYPES;

    let n_words = rng.random_range(6..14usize);
    let words: Vec<String> = (0..n_words)
        .map(|_| random_name(rng).replace(' ', "_"))
        .collect();
    let text = words.join(" ");
    let mut offsets = Vec::new();
    let mut pos = 0usize;
    for w in &words {
        let len = w.chars().count();
        offsets.push((pos, pos + len));
        pos += len + 1;
    }

    // first words become plain entities, a few later ones triggers
    let n_entities = rng.random_range(1..=n_words / 2);
    let n_triggers = rng.random_range(0..=(n_words - n_entities).min(3));
    let mut a1 = String::new();
    for i in 0..n_entities {
        let (s, e) = offsets[i];
        a1.push_str(&format!("T{}\tProtein {s} {e}\t{}\n", i + 1, words[i]));
    }
    let mut a2 = String::new();
    let mut event_types = Vec::new();
    for t in 0..n_triggers {
        let w = n_entities + t;
        let (s, e) = offsets[w];
        let event_type = REACTION_TYPES[rng.random_range(0..REACTION_TYPES.len())];
        event_types.push(event_type);
        a2.push_str(&format!(
            "T{}\t{event_type} {s} {e}\t{}\n",
            n_entities + t + 1,
            words[w]
        ));
    }
    let regulationish = ["Regulation", "Positive_regulation", "Negative_regulation"];
    for (idx, event_type) in event_types.iter().enumerate() {
        let mut line = format!("E{}\t{}:T{}", idx + 1, event_type, n_entities + idx + 1);
        for (role, p) in [
            ("Theme", 0.8),
            ("Cause", 0.4),
            ("Product", 0.2),
            ("Site", 0.15),
        ] {
            if !rng.random_bool(p) {
                continue;
            }
            // regulation events may point their Theme at an earlier event
            if role == "Theme"
                && idx > 0
                && regulationish.contains(event_type)
                && rng.random_bool(0.5)
            {
                line.push_str(&format!(" Theme:E{}", rng.random_range(1..=idx)));
            } else {
                line.push_str(&format!(" {role}:T{}", rng.random_range(1..=n_entities)));
            }
        }
        line.push('\n');
        a2.push_str(&line);
    }
    if n_entities >= 2 && rng.random_bool(0.3) {
        a2.push_str("*\tEquiv T1 T2\n");
    }

    pathcmp::standoff::parse_standoff(id, &text, &a1, &a2).expect("generated document is valid")
}

/// The species-matcher half of the strategy lattice: `(stricter,
/// looser)` label pairs.
pub const SPECIES_LATTICE_EDGES: &[(&str, &str)] = &[
    ("nmeq", "appeq"),
    ("appeq", "appeq/enteq"),
    ("appeq", "appeq/entov"),
    ("appeq/enteq", "appeq/entov"),
    ("nmeq", "nmeq/wc"),
    ("appeq", "appeq/wc"),
    ("appeq/enteq", "appeq/enteq/wc"),
    ("appeq/entov", "appeq/entov/wc"),
    ("nmeq/wc", "appeq/wc"),
    ("appeq/wc", "appeq/enteq/wc"),
    ("appeq/wc", "appeq/entov/wc"),
    ("appeq/enteq/wc", "appeq/entov/wc"),
];

pub const REACTION_LATTICE_EDGES: &[(&str, &str)] = &[("sboeq", "sboov"), ("sboov", "sboisa")];

pub const SPECIES_LABELS: &[&str] = &[
    "nmeq",
    "appeq",
    "appeq/enteq",
    "appeq/entov",
    "nmeq/wc",
    "appeq/wc",
    "appeq/enteq/wc",
    "appeq/entov/wc",
];

pub const REACTION_LABELS: &[&str] = &["sboeq", "sboov", "sboisa"];

pub fn all_reaction_matchers() -> [ReactionMatcher; 3] {
    [
        ReactionMatcher::Sboeq,
        ReactionMatcher::Sboov,
        ReactionMatcher::Sboisa,
    ]
}
