//! Convert biomedical event-extraction output (BioNLP standoff) into
//! annotated SBML pathway graphs and quantify how well an extracted
//! pathway overlaps a human-curated reference under 24 compositional
//! subgraph matching strategies.
//!
//! The pipeline, end to end:
//!
//! 1. [`standoff`] parses `.txt`/`.a1`/`.a2` triples into cross-linked
//!    documents.
//! 2. [`convert`] maps entities to species and events to reactions with
//!    reactant/product/modifier edges, rule-table driven.
//! 3. [`annotate`] attaches SBO/GO terms to reactions and Entrez gene
//!    signatures to species.
//! 4. [`sbml`] reads and writes the SBML subset that carries all of the
//!    above.
//! 5. [`matching`] and [`scoring`] compare two pathways: five species
//!    matchers, three reaction matchers over the [`ontology`] is_a
//!    hierarchy, strict edge labels, micro P/R/F per element class and
//!    the macro total F.
//!
//! ```
//! use pathcmp::{convert, defaults, annotate, scoring, standoff};
//!
//! let doc = standoff::parse_standoff(
//!     "doc1",
//!     "mTOR phosphorylates AKT.",
//!     "T1\tProtein 0 4\tmTOR\nT2\tProtein 20 23\tAKT\n",
//!     "T3\tPhosphorylation 5 19\tphosphorylates\nE1\tPhosphorylation:T3 Theme:T2 Cause:T1\n",
//! ).unwrap();
//! let mut pathway = convert::convert(&doc, &defaults::conversion_rules()).unwrap().pathway;
//! annotate::annotate_reactions(&mut pathway, &defaults::mapping_table()).unwrap();
//!
//! let strategy = pathcmp::matching::MatchStrategy::parse("nmeq, sboeq").unwrap();
//! let report = scoring::overlap(&pathway, &pathway, &strategy, &defaults::ontology()).unwrap();
//! assert_eq!(scoring::score(&report).macro_f, 100.0);
//! ```

pub mod annotate;
pub mod convert;
pub mod defaults;
pub mod error;
pub mod matching;
pub mod model;
pub mod ontology;
pub mod report;
pub mod sbml;
pub mod scoring;
pub mod standoff;

pub use error::{Error, Result};
pub use model::{Compartment, Pathway, Reaction, Role, RoleEdge, Species};
