//! Data tables shipped with the crate: the SBO reaction-type subset,
//! the event-to-term mapping, the state-prefix vocabulary and the
//! conversion rules. All of them can be overridden with files of the
//! same format at runtime.

use crate::annotate::{SboMappingTable, StatePrefixTable};
use crate::convert::ConversionRules;
use crate::ontology::{load_obo, OntologyGraph};

pub const SBO_SLIM_OBO: &str = include_str!("../data/sbo-slim.obo");
pub const EVENT_SBO_MAP: &str = include_str!("../data/event-sbo.map");
pub const STATE_PREFIXES_MAP: &str = include_str!("../data/state-prefixes.map");
pub const CONVERSION_RULES: &str = include_str!("../data/rules.conf");

pub fn ontology() -> OntologyGraph {
    load_obo(SBO_SLIM_OBO).expect("shipped ontology parses")
}

pub fn mapping_table() -> SboMappingTable {
    SboMappingTable::parse(EVENT_SBO_MAP).expect("shipped mapping parses")
}

pub fn state_prefixes() -> StatePrefixTable {
    StatePrefixTable::parse(STATE_PREFIXES_MAP).expect("shipped prefixes parse")
}

pub fn conversion_rules() -> ConversionRules {
    ConversionRules::parse(CONVERSION_RULES).expect("shipped rules parse")
}
