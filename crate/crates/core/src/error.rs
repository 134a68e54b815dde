//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building, parsing, annotating or
/// scoring pathways.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("unknown reaction `{0}`")]
    UnknownReaction(String),

    #[error("unknown species `{0}`")]
    UnknownSpecies(String),

    #[error("unknown compartment `{0}`")]
    UnknownCompartment(String),

    #[error("duplicate edge ({species}, {reaction}, {role})")]
    DuplicateEdge {
        species: String,
        reaction: String,
        role: String,
    },

    #[error("species `{species}` lists itself as a constituent")]
    SelfConstituent { species: String },

    #[error("unresolved constituent `{constituent}` of species `{species}`")]
    UnresolvedConstituent {
        species: String,
        constituent: String,
    },

    #[error("malformed XML at byte {position}: {message}")]
    MalformedXml { position: u64, message: String },

    #[error(
        "species reference `{species}` in reaction `{reaction}` (byte {position}) does not resolve"
    )]
    DanglingSpeciesReference {
        species: String,
        reaction: String,
        position: u64,
    },

    #[error("{file} line {line}: malformed standoff line: {message}")]
    MalformedLine {
        file: String,
        line: usize,
        message: String,
    },

    #[error("{file} line {line}: surface `{surface}` does not match text slice `{slice}` at {start}..{end}")]
    OffsetMismatch {
        file: String,
        line: usize,
        surface: String,
        slice: String,
        start: usize,
        end: usize,
    },

    #[error("dangling reference `{target}` from `{origin}`")]
    DanglingReference { origin: String, target: String },

    #[error("event argument cycle through `{0}`")]
    EventCycle(String),

    #[error("no conversion rule for argument role `{0}`")]
    UnmappedRole(String),

    #[error("unresolved argument `{target}` of event `{event}`")]
    UnresolvedArgument { event: String, target: String },

    #[error("ontology line {line}: malformed stanza: {message}")]
    MalformedStanza { line: usize, message: String },

    #[error("is_a cycle detected through term `{0}`")]
    OntologyCycle(String),

    #[error("no SBO/GO mapping for event types: {0}")]
    MissingMapping(String),

    #[error("mapping table entry `{event_type}` names unknown term `{term}`")]
    UnknownMappingTerm { event_type: String, term: String },

    #[error("reaction `{reaction}` in pathway `{pathway}` has an empty SBO/GO signature")]
    UnannotatedReaction { pathway: String, reaction: String },

    #[error("invalid matching strategy label `{label}`: {message}")]
    InvalidStrategyLabel { label: String, message: String },

    #[error("invalid rules file line {line}: {message}")]
    InvalidRules { line: usize, message: String },

    #[error("invalid lexicon line {line}: {message}")]
    InvalidLexicon { line: usize, message: String },

    #[error("remote resolver is not available: {0}")]
    ResolverUnavailable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
