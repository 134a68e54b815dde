//! Map standoff documents to pathway graphs: entities become species,
//! events become reactions, event arguments become role-labeled edges.
//!
//! The mapping is driven by an explicit rule table (shipped as a data
//! file, overridable from the CLI): argument roles map to edge roles,
//! compartments, or are dropped; regulation-family events whose Theme
//! is another event attach their Cause as a modifier on the innermost
//! regulated reaction; Binding events with a Product build a complex
//! species from their Themes; localization events assign compartments.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use log::warn;

use crate::error::{Error, Result};
use crate::model::{Compartment, Pathway, Reaction, Role, Species};
use crate::standoff::StandoffDocument;

/// What to do with one argument role.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoleAction {
    Edge(Role),
    Compartment,
    Drop,
}

/// The BioNLP argument-role vocabulary every rule table must cover.
pub const ROLE_VOCABULARY: &[&str] = &[
    "Theme",
    "Cause",
    "Product",
    "Site",
    "ToLoc",
    "FromLoc",
    "AtLoc",
    "Participant",
];

#[derive(Clone, Debug)]
pub struct ConversionRules {
    pub roles: BTreeMap<String, RoleAction>,
    pub regulation_types: BTreeSet<String>,
    pub binding_types: BTreeSet<String>,
    pub localization_types: BTreeSet<String>,
    /// Event types converted to nothing at all.
    pub drop_events: BTreeSet<String>,
    /// Merge entities related by Equiv lines into one species.
    pub merge_equiv: bool,
    /// Maximum regulation-chain depth before giving up with a warning.
    pub regulation_depth: u32,
}

impl Default for ConversionRules {
    fn default() -> Self {
        let mut roles = BTreeMap::new();
        roles.insert("Theme".to_string(), RoleAction::Edge(Role::Reactant));
        roles.insert("Cause".to_string(), RoleAction::Edge(Role::Modifier));
        roles.insert("Product".to_string(), RoleAction::Edge(Role::Product));
        roles.insert("Participant".to_string(), RoleAction::Edge(Role::Reactant));
        roles.insert("Site".to_string(), RoleAction::Drop);
        roles.insert("ToLoc".to_string(), RoleAction::Compartment);
        roles.insert("FromLoc".to_string(), RoleAction::Compartment);
        roles.insert("AtLoc".to_string(), RoleAction::Compartment);
        let set = |items: &[&str]| items.iter().map(|s| s.to_string()).collect();
        ConversionRules {
            roles,
            regulation_types: set(&[
                "Regulation",
                "Positive_regulation",
                "Negative_regulation",
                "Catalysis",
                "Activation",
                "Inactivation",
                "Pathway",
            ]),
            binding_types: set(&["Binding"]),
            localization_types: set(&["Localization", "Transport"]),
            drop_events: BTreeSet::new(),
            merge_equiv: false,
            regulation_depth: 10,
        }
    }
}

impl ConversionRules {
    /// Parse the line-oriented `key = value` rules format. Unknown keys
    /// are errors; omitted keys keep their defaults.
    pub fn parse(input: &str) -> Result<ConversionRules> {
        let mut rules = ConversionRules::default();
        for (lineno, raw) in input.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::InvalidRules {
                line: lineno,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let list = |v: &str| -> BTreeSet<String> {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect()
            };
            if let Some(role) = key.strip_prefix("role.") {
                let action = match value {
                    "reactant" => RoleAction::Edge(Role::Reactant),
                    "product" => RoleAction::Edge(Role::Product),
                    "modifier" => RoleAction::Edge(Role::Modifier),
                    "compartment" => RoleAction::Compartment,
                    "drop" => RoleAction::Drop,
                    other => {
                        return Err(Error::InvalidRules {
                            line: lineno,
                            message: format!("unknown role action `{other}`"),
                        })
                    }
                };
                rules.roles.insert(role.to_string(), action);
            } else {
                match key {
                    "class.regulation" => rules.regulation_types = list(value),
                    "class.binding" => rules.binding_types = list(value),
                    "class.localization" => rules.localization_types = list(value),
                    "drop_events" => rules.drop_events = list(value),
                    "option.merge_equiv" => {
                        rules.merge_equiv = value.parse().map_err(|_| Error::InvalidRules {
                            line: lineno,
                            message: format!("expected true/false, got `{value}`"),
                        })?
                    }
                    "option.regulation_depth" => {
                        rules.regulation_depth = value.parse().map_err(|_| Error::InvalidRules {
                            line: lineno,
                            message: format!("expected an integer, got `{value}`"),
                        })?
                    }
                    other => {
                        return Err(Error::InvalidRules {
                            line: lineno,
                            message: format!("unknown key `{other}`"),
                        })
                    }
                }
            }
        }
        rules.validate()?;
        Ok(rules)
    }

    /// Every role in the vocabulary must have an entry.
    pub fn validate(&self) -> Result<()> {
        for role in ROLE_VOCABULARY {
            if !self.roles.contains_key(*role) {
                return Err(Error::UnmappedRole(role.to_string()));
            }
        }
        Ok(())
    }
}

/// Audit trail of one conversion.
#[derive(Clone, Debug, Default)]
pub struct ConversionLog {
    pub events_total: usize,
    pub events_converted: usize,
    pub events_dropped: usize,
    pub args_dropped: usize,
    pub warnings: Vec<String>,
}

impl ConversionLog {
    fn merge(&mut self, other: ConversionLog) {
        self.events_total += other.events_total;
        self.events_converted += other.events_converted;
        self.events_dropped += other.events_dropped;
        self.args_dropped += other.args_dropped;
        self.warnings.extend(other.warnings);
    }

    fn warn(&mut self, message: String) {
        warn!("{message}");
        self.warnings.push(message);
    }
}

pub struct Conversion {
    pub pathway: Pathway,
    pub log: ConversionLog,
}

/// Corpus-level union conversion; per-document errors are collected,
/// never fatal.
pub struct CorpusConversion {
    pub pathway: Pathway,
    pub log: ConversionLog,
    pub errors: Vec<(String, Error)>,
}

/// Replace characters that are not valid in an SBML SId.
pub(crate) fn xml_id(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 1);
    for c in s.chars() {
        if c.is_ascii_alphanumeric() || c == '_' {
            out.push(c);
        } else {
            out.push('_');
        }
    }
    if out.is_empty() || out.as_bytes()[0].is_ascii_digit() {
        out.insert(0, '_');
    }
    out
}

/// Numeric-aware minimum for ids like `T12`, used to pick the
/// representative of an Equiv class.
fn id_sort_key(id: &str) -> (String, u64) {
    let split = id.find(|c: char| c.is_ascii_digit()).unwrap_or(id.len());
    let (prefix, digits) = id.split_at(split);
    (prefix.to_string(), digits.parse().unwrap_or(u64::MAX))
}

struct DocConverter<'a> {
    doc: &'a StandoffDocument,
    rules: &'a ConversionRules,
    pathway: Pathway,
    log: ConversionLog,
    prefix: String,
    /// entity id -> representative entity id (Equiv merging)
    rep: HashMap<&'a str, &'a str>,
    /// representative entity id -> species id
    species_of: HashMap<&'a str, String>,
    /// event id -> reaction id
    reaction_of: HashMap<&'a str, String>,
    /// compartment name -> compartment id
    compartment_of: BTreeMap<String, String>,
}

impl<'a> DocConverter<'a> {
    fn new(doc: &'a StandoffDocument, rules: &'a ConversionRules) -> Self {
        DocConverter {
            doc,
            rules,
            pathway: Pathway::new(doc.id.clone()),
            log: ConversionLog::default(),
            prefix: xml_id(&doc.id),
            rep: HashMap::new(),
            species_of: HashMap::new(),
            reaction_of: HashMap::new(),
            compartment_of: BTreeMap::new(),
        }
    }

    fn build_equiv_reps(&mut self) {
        if !self.rules.merge_equiv {
            return;
        }
        // Equiv is transitive: union overlapping sets first.
        let mut groups: Vec<BTreeSet<&str>> = Vec::new();
        for eq in &self.doc.equivs {
            let members: BTreeSet<&str> = eq.iter().map(String::as_str).collect();
            let (mut merged, rest): (Vec<_>, Vec<_>) =
                groups.drain(..).partition(|g| !g.is_disjoint(&members));
            let mut unified = members;
            for g in merged.drain(..) {
                unified.extend(g);
            }
            groups = rest;
            groups.push(unified);
        }
        for group in groups {
            let rep = group
                .iter()
                .min_by_key(|id| id_sort_key(id))
                .copied()
                .expect("equiv groups are non-empty");
            for member in group {
                self.rep.insert(member, rep);
            }
        }
    }

    fn rep_of(&self, entity_id: &'a str) -> &'a str {
        self.rep.get(entity_id).copied().unwrap_or(entity_id)
    }

    fn run(mut self) -> Result<Conversion> {
        self.build_equiv_reps();

        let triggers: HashSet<&str> = self.doc.events.iter().map(|e| e.trigger.as_str()).collect();

        // every non-trigger mention becomes a species; no cross-mention
        // merging beyond Equiv classes
        for entity in &self.doc.entities {
            if triggers.contains(entity.id.as_str()) {
                continue;
            }
            let rep = self.rep_of(&entity.id);
            if rep != entity.id {
                continue; // merged into its representative
            }
            let sid = format!("{}_{}", self.prefix, xml_id(&entity.id));
            self.pathway
                .add_species(Species::new(sid.clone(), entity.surface.clone()))?;
            self.species_of.insert(&entity.id, sid);
        }

        self.log.events_total = self.doc.events.len();
        for event in &self.doc.events {
            if self.rules.drop_events.contains(&event.event_type) {
                self.log.events_dropped += 1;
                continue;
            }
            let rid = format!("{}_{}", self.prefix, xml_id(&event.id));
            self.pathway.add_reaction(
                Reaction::new(rid.clone()).with_event_type(event.event_type.clone()),
            )?;
            self.reaction_of.insert(&event.id, rid);
            self.log.events_converted += 1;
        }

        for event in &self.doc.events {
            if self.rules.drop_events.contains(&event.event_type) {
                continue;
            }
            self.convert_event(event)?;
        }

        self.pathway.check_invariants()?;
        Ok(Conversion {
            pathway: self.pathway,
            log: self.log,
        })
    }

    fn species_for(&self, entity_id: &'a str) -> Option<&str> {
        self.species_of
            .get(self.rep_of(entity_id))
            .map(String::as_str)
    }

    fn convert_event(&mut self, event: &'a crate::standoff::Event) -> Result<()> {
        let rid = self.reaction_of[event.id.as_str()].clone();
        let is_regulation = self.rules.regulation_types.contains(&event.event_type);
        let regulated_events: Vec<&str> = if is_regulation {
            event
                .args
                .iter()
                .filter(|a| a.role == "Theme" && self.doc.event(&a.target).is_some())
                .map(|a| a.target.as_str())
                .collect()
        } else {
            Vec::new()
        };

        // regulation of another event: Cause entities modify the
        // innermost regulated reaction instead of this one
        let mut redirect_targets: Vec<String> = Vec::new();
        for theme_event in &regulated_events {
            if let Some(target) = self.resolve_regulation_target(theme_event) {
                redirect_targets.push(target);
            }
        }

        let mut compartment_assignment: Option<(u8, String)> = None;
        let mut theme_species: Vec<String> = Vec::new();
        let mut product_species: Vec<String> = Vec::new();

        for arg in &event.args {
            let target = arg.target.as_str();
            if self.doc.event(target).is_some() {
                if is_regulation && arg.role == "Theme" {
                    continue; // consumed by the redirection above
                }
                self.log.args_dropped += 1;
                self.log.warn(format!(
                    "{}: dropping {} argument `{}` of event {}: reactions cannot reference reactions",
                    self.doc.id, arg.role, target, event.id
                ));
                continue;
            }
            let Some(sid) = self.species_for(target).map(str::to_string) else {
                if self.doc.entity(target).is_some() {
                    // argument points at an event trigger mention
                    self.log.args_dropped += 1;
                    self.log.warn(format!(
                        "{}: dropping {} argument `{}` of event {}: target is a trigger",
                        self.doc.id, arg.role, target, event.id
                    ));
                    continue;
                }
                return Err(Error::UnresolvedArgument {
                    event: event.id.clone(),
                    target: target.to_string(),
                });
            };
            let action = self
                .rules
                .roles
                .get(&arg.role)
                .copied()
                .ok_or_else(|| Error::UnmappedRole(arg.role.clone()))?;
            match action {
                RoleAction::Edge(role) => {
                    if is_regulation && arg.role == "Cause" && !redirect_targets.is_empty() {
                        for target_rid in &redirect_targets {
                            self.add_edge_dedup(&sid, target_rid, Role::Modifier);
                        }
                        continue;
                    }
                    self.add_edge_dedup(&sid, &rid, role);
                    if arg.role == "Theme" {
                        theme_species.push(sid.clone());
                    }
                    if arg.role == "Product" {
                        product_species.push(sid.clone());
                    }
                }
                RoleAction::Compartment => {
                    let cid = self.compartment_for(target)?;
                    let rank = match arg.role.as_str() {
                        "ToLoc" => 0,
                        "AtLoc" => 1,
                        _ => 2,
                    };
                    match &compartment_assignment {
                        Some((r, _)) if *r <= rank => {}
                        _ => compartment_assignment = Some((rank, cid)),
                    }
                }
                RoleAction::Drop => {
                    self.log.args_dropped += 1;
                    self.log.warn(format!(
                        "{}: dropping {} argument of event {} by rule",
                        self.doc.id, arg.role, event.id
                    ));
                }
            }
        }

        // Binding with a Product: the product is a complex made of the Themes.
        if self.rules.binding_types.contains(&event.event_type) && !product_species.is_empty() {
            for pid in &product_species {
                let members: Vec<String> = theme_species
                    .iter()
                    .filter(|t| *t != pid)
                    .cloned()
                    .collect();
                if members.is_empty() {
                    continue;
                }
                let species = self
                    .pathway
                    .species_mut_by_id(pid)
                    .expect("product species was just created");
                for m in members {
                    if !species.constituents.contains(&m) {
                        species.constituents.push(m);
                    }
                }
            }
        }

        // Localization family: the Theme species moves to the named compartment.
        if self.rules.localization_types.contains(&event.event_type) {
            if let Some((_, cid)) = compartment_assignment {
                for sid in &theme_species {
                    self.pathway.set_species_compartment(sid, &cid)?;
                }
            }
        }

        Ok(())
    }

    fn add_edge_dedup(&mut self, species_id: &str, reaction_id: &str, role: Role) {
        if self.pathway.has_edge(species_id, reaction_id, role) {
            self.log.warn(format!(
                "{}: duplicate {role} edge ({species_id}, {reaction_id}) collapsed",
                self.doc.id
            ));
            return;
        }
        self.pathway
            .add_edge(species_id, reaction_id, role)
            .expect("endpoints exist by construction");
    }

    fn compartment_for(&mut self, entity_id: &'a str) -> Result<String> {
        let entity = self
            .doc
            .entity(self.rep_of(entity_id))
            .expect("compartment arg was validated as an entity");
        let name = entity.surface.trim().to_lowercase();
        if let Some(cid) = self.compartment_of.get(&name) {
            return Ok(cid.clone());
        }
        let cid = format!("{}_c{}", self.prefix, self.compartment_of.len() + 1);
        self.pathway.add_compartment(Compartment {
            id: cid.clone(),
            name: entity.surface.trim().to_string(),
        })?;
        self.compartment_of.insert(name, cid.clone());
        Ok(cid)
    }

    /// Follow Theme chains through regulation events to the innermost
    /// regulated reaction, bounded by the configured depth.
    fn resolve_regulation_target(&mut self, event_id: &str) -> Option<String> {
        let mut current = self.doc.event(event_id)?;
        let mut depth = 0;
        loop {
            if depth >= self.rules.regulation_depth {
                self.log.warn(format!(
                    "{}: regulation chain through {} deeper than {}; stopping",
                    self.doc.id, event_id, self.rules.regulation_depth
                ));
                break;
            }
            if !self.rules.regulation_types.contains(&current.event_type) {
                break;
            }
            let next = current
                .args
                .iter()
                .find(|a| a.role == "Theme" && self.doc.event(&a.target).is_some());
            match next {
                Some(arg) => {
                    current = self.doc.event(&arg.target).expect("checked above");
                    depth += 1;
                }
                None => break,
            }
        }
        match self.reaction_of.get(current.id.as_str()) {
            Some(rid) => Some(rid.clone()),
            None => {
                self.log.warn(format!(
                    "{}: regulation target {} was dropped by rules",
                    self.doc.id, current.id
                ));
                None
            }
        }
    }
}

/// Convert one document.
pub fn convert(doc: &StandoffDocument, rules: &ConversionRules) -> Result<Conversion> {
    rules.validate()?;
    DocConverter::new(doc, rules).run()
}

/// Convert a corpus into one union pathway. Species from different
/// documents are never merged; mentions stay distinct.
pub fn convert_corpus(docs: &[StandoffDocument], rules: &ConversionRules) -> CorpusConversion {
    let mut pathway = Pathway::new("corpus");
    let mut log = ConversionLog::default();
    let mut errors = Vec::new();
    let mut seen_prefixes: HashMap<String, usize> = HashMap::new();
    for doc in docs {
        match convert(doc, rules) {
            Ok(conv) => {
                // repeated document ids stay distinct: suffix
                // the second and later occurrences
                let n = seen_prefixes.entry(doc.id.clone()).or_insert(0);
                *n += 1;
                let result = if *n > 1 {
                    let mut renamed = Pathway::new(doc.id.clone());
                    let suffix = format!("_dup{}", *n - 1);
                    remap_ids(&conv.pathway, &suffix, &mut renamed);
                    pathway.absorb(renamed)
                } else {
                    pathway.absorb(conv.pathway)
                };
                match result {
                    Ok(()) => log.merge(conv.log),
                    Err(e) => errors.push((doc.id.clone(), e)),
                }
            }
            Err(e) => errors.push((doc.id.clone(), e)),
        }
    }
    CorpusConversion {
        pathway,
        log,
        errors,
    }
}

fn remap_ids(src: &Pathway, suffix: &str, dst: &mut Pathway) {
    let re = |id: &str| format!("{id}{suffix}");
    for c in src.compartments() {
        dst.add_compartment(Compartment {
            id: re(&c.id),
            name: c.name.clone(),
        })
        .expect("suffixed ids cannot collide within one source pathway");
    }
    for s in src.species() {
        let mut renamed = s.clone();
        renamed.id = re(&s.id);
        renamed.constituents = s.constituents.iter().map(|c| re(c)).collect();
        renamed.compartment = s.compartment.as_ref().map(|c| re(c));
        dst.add_species(renamed).expect("unique by construction");
    }
    for r in src.reactions() {
        let mut renamed = r.clone();
        renamed.id = re(&r.id);
        dst.add_reaction(renamed).expect("unique by construction");
    }
    for e in src.edges() {
        dst.add_edge(&re(&e.species_id), &re(&e.reaction_id), e.role)
            .expect("endpoints renamed consistently");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standoff::parse_standoff;

    const TEXT: &str = "mTOR phosphorylates AKT via RAPTOR binding in nucleus today";

    fn doc(a1: &str, a2: &str) -> StandoffDocument {
        parse_standoff("doc1", TEXT, a1, a2).unwrap()
    }

    #[test]
    fn smallest_event_one_reactant() {
        let d = doc(
            "T1\tProtein 20 23\tAKT\n",
            "T2\tPhosphorylation 5 19\tphosphorylates\nE1\tPhosphorylation:T2 Theme:T1\n",
        );
        let conv = convert(&d, &ConversionRules::default()).unwrap();
        let p = &conv.pathway;
        assert_eq!(p.species().len(), 1);
        assert_eq!(p.reactions().len(), 1);
        assert_eq!(p.edges().len(), 1);
        assert_eq!(p.edges()[0].role, Role::Reactant);
        assert_eq!(
            p.reactions()[0].source_event_type.as_deref(),
            Some("Phosphorylation")
        );
    }

    #[test]
    fn regulation_attaches_cause_to_inner_reaction() {
        let d = doc(
            "T1\tProtein 20 23\tAKT\nT4\tProtein 0 4\tmTOR\n",
            "T2\tPhosphorylation 5 19\tphosphorylates\n\
             T3\tPositive_regulation 28 34\tRAPTOR\n\
             E1\tPhosphorylation:T2 Theme:T1\n\
             E2\tPositive_regulation:T3 Theme:E1 Cause:T4\n",
        );
        let conv = convert(&d, &ConversionRules::default()).unwrap();
        let p = &conv.pathway;
        assert_eq!(p.reactions().len(), 2);
        // modifier edge from mTOR onto the phosphorylation reaction
        assert!(p.has_edge("doc1_T4", "doc1_E1", Role::Modifier));
        // the regulation reaction itself carries no edges
        assert!(p.neighbors("doc1_E2").unwrap().is_empty());
    }

    #[test]
    fn nested_regulation_resolves_to_innermost() {
        let d = doc(
            "T1\tProtein 20 23\tAKT\nT4\tProtein 0 4\tmTOR\n",
            "T2\tPhosphorylation 5 19\tphosphorylates\n\
             T3\tPositive_regulation 28 34\tRAPTOR\n\
             T5\tNegative_regulation 35 42\tbinding\n\
             E1\tPhosphorylation:T2 Theme:T1\n\
             E2\tPositive_regulation:T3 Theme:E1\n\
             E3\tNegative_regulation:T5 Theme:E2 Cause:T4\n",
        );
        let conv = convert(&d, &ConversionRules::default()).unwrap();
        assert!(conv.pathway.has_edge("doc1_T4", "doc1_E1", Role::Modifier));
    }

    #[test]
    fn binding_builds_complex_from_themes() {
        let d = doc(
            "T1\tProtein 20 23\tAKT\nT2\tProtein 0 4\tmTOR\nT5\tComplex 28 34\tRAPTOR\n",
            "T3\tBinding 35 42\tbinding\nE1\tBinding:T3 Theme:T1 Theme2:T2 Product:T5\n",
        );
        let conv = convert(&d, &ConversionRules::default()).unwrap();
        let p = &conv.pathway;
        assert!(p.has_edge("doc1_T1", "doc1_E1", Role::Reactant));
        assert!(p.has_edge("doc1_T2", "doc1_E1", Role::Reactant));
        assert!(p.has_edge("doc1_T5", "doc1_E1", Role::Product));
        let complex = p.species_by_id("doc1_T5").unwrap();
        assert_eq!(
            complex.constituents,
            vec!["doc1_T1".to_string(), "doc1_T2".to_string()]
        );
    }

    #[test]
    fn localization_assigns_compartment() {
        let d = doc(
            "T1\tProtein 20 23\tAKT\nT6\tEntity 46 53\tnucleus\n",
            "T7\tLocalization 24 27\tvia\nE1\tLocalization:T7 Theme:T1 ToLoc:T6\n",
        );
        let conv = convert(&d, &ConversionRules::default()).unwrap();
        let p = &conv.pathway;
        assert_eq!(p.compartments().len(), 1);
        assert_eq!(p.compartments()[0].name, "nucleus");
        let akt = p.species_by_id("doc1_T1").unwrap();
        assert_eq!(akt.compartment.as_deref(), Some("doc1_c1"));
    }

    #[test]
    fn site_args_dropped_and_logged() {
        let d = doc(
            "T1\tProtein 20 23\tAKT\nT6\tEntity 46 53\tnucleus\n",
            "T2\tPhosphorylation 5 19\tphosphorylates\nE1\tPhosphorylation:T2 Theme:T1 Site:T6\n",
        );
        let conv = convert(&d, &ConversionRules::default()).unwrap();
        assert_eq!(conv.log.args_dropped, 1);
        assert_eq!(conv.pathway.edges().len(), 1);
    }

    #[test]
    fn event_without_args_stays_isolated() {
        let d = doc(
            "",
            "T2\tPhosphorylation 5 19\tphosphorylates\nE1\tPhosphorylation:T2\n",
        );
        let conv = convert(&d, &ConversionRules::default()).unwrap();
        assert_eq!(conv.pathway.reactions().len(), 1);
        assert!(conv.pathway.edges().is_empty());
    }

    #[test]
    fn reaction_count_audited_by_log() {
        let mut rules = ConversionRules::default();
        rules.drop_events.insert("Binding".to_string());
        let d = doc(
            "T1\tProtein 20 23\tAKT\n",
            "T2\tPhosphorylation 5 19\tphosphorylates\nT3\tBinding 35 42\tbinding\n\
             E1\tPhosphorylation:T2 Theme:T1\nE2\tBinding:T3 Theme:T1\n",
        );
        let conv = convert(&d, &rules).unwrap();
        assert_eq!(conv.log.events_total, 2);
        assert_eq!(conv.log.events_dropped, 1);
        assert_eq!(
            conv.pathway.reactions().len(),
            conv.log.events_total - conv.log.events_dropped
        );
    }

    #[test]
    fn regulation_chain_respects_depth_limit() {
        // E4 regulates E3 regulates E2 regulates E1 (entity theme);
        // the walk starts at E4's theme, so depth 1 stops at E2
        let a2 = "T2\tRegulation 5 19\tphosphorylates\n\
                  E1\tRegulation:T2 Theme:T1\n\
                  E2\tRegulation:T2 Theme:E1\n\
                  E3\tRegulation:T2 Theme:E2\n\
                  E4\tRegulation:T2 Theme:E3 Cause:T4\n";
        let d = doc("T1\tProtein 20 23\tAKT\nT4\tProtein 0 4\tmTOR\n", a2);
        let deep = convert(&d, &ConversionRules::default()).unwrap();
        assert!(deep.pathway.has_edge("doc1_T4", "doc1_E1", Role::Modifier));
        let shallow_rules = ConversionRules {
            regulation_depth: 1,
            ..ConversionRules::default()
        };
        let shallow = convert(&d, &shallow_rules).unwrap();
        assert!(shallow
            .pathway
            .has_edge("doc1_T4", "doc1_E2", Role::Modifier));
        assert!(shallow.log.warnings.iter().any(|w| w.contains("deeper")));
    }

    #[test]
    fn equiv_merging_is_opt_in() {
        let a1 = "T1\tProtein 20 23\tAKT\nT4\tProtein 0 4\tmTOR\n";
        let a2 = "*\tEquiv T1 T4\n";
        let d = doc(a1, a2);
        let plain = convert(&d, &ConversionRules::default()).unwrap();
        assert_eq!(plain.pathway.species().len(), 2);
        let rules = ConversionRules {
            merge_equiv: true,
            ..ConversionRules::default()
        };
        let merged = convert(&d, &rules).unwrap();
        assert_eq!(merged.pathway.species().len(), 1);
        assert_eq!(merged.pathway.species()[0].id, "doc1_T1");
    }

    #[test]
    fn corpus_union_is_disjoint() {
        let d1 = parse_standoff("a", "AKT x", "T1\tProtein 0 3\tAKT\n", "").unwrap();
        let d2 = parse_standoff("b", "mTOR y", "T1\tProtein 0 4\tmTOR\n", "").unwrap();
        let out = convert_corpus(&[d1, d2], &ConversionRules::default());
        assert!(out.errors.is_empty());
        assert_eq!(out.pathway.species().len(), 2);
    }

    #[test]
    fn repeated_document_doubles_counts() {
        let d = parse_standoff(
            "a",
            "AKT binds",
            "T1\tProtein 0 3\tAKT\n",
            "T2\tBinding 4 9\tbinds\nE1\tBinding:T2 Theme:T1\n",
        )
        .unwrap();
        let out = convert_corpus(&[d.clone(), d], &ConversionRules::default());
        assert!(out.errors.is_empty());
        assert_eq!(out.pathway.species().len(), 2);
        assert_eq!(out.pathway.reactions().len(), 2);
        assert_eq!(out.pathway.edges().len(), 2);
    }

    #[test]
    fn unmapped_role_is_an_error() {
        let mut rules = ConversionRules::default();
        rules.roles.remove("Theme");
        assert!(matches!(
            rules.validate(),
            Err(Error::UnmappedRole(r)) if r == "Theme"
        ));
    }

    #[test]
    fn rules_file_round_trip() {
        let text = "\
# comment
role.Theme = reactant
role.Site = drop
class.binding = Binding
option.merge_equiv = true
option.regulation_depth = 5
drop_events = Translation
";
        let rules = ConversionRules::parse(text).unwrap();
        assert!(rules.merge_equiv);
        assert_eq!(rules.regulation_depth, 5);
        assert!(rules.drop_events.contains("Translation"));
        assert!(ConversionRules::parse("bogus line").is_err());
        assert!(ConversionRules::parse("role.Theme = sideways").is_err());
    }
}
