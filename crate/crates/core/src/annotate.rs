//! Attach SBO/GO signatures to reactions and Entrez gene signatures to
//! species.
//!
//! Reaction annotation is table-driven from the event type recorded by
//! the converter. Species annotation goes through a pluggable gene
//! resolver: a remote normalization service, a local lexicon file, or
//! the null resolver. Curated maps get an extra deduction pass that
//! reads state prefixes off species names ("AKT" -> "phosphorylated
//! AKT" implies the phosphorylation term).

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use log::{info, warn};

use crate::error::{Error, Result};
use crate::model::{Pathway, Role};
use crate::ontology::OntologyGraph;

/// Event type -> SBO/GO terms.
#[derive(Clone, Debug, Default)]
pub struct SboMappingTable {
    map: BTreeMap<String, BTreeSet<String>>,
}

impl SboMappingTable {
    /// Parse the tab-separated `type\tterm,term` format.
    pub fn parse(input: &str) -> Result<SboMappingTable> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (event_type, terms) = line.split_once('\t').ok_or(Error::InvalidLexicon {
                line: lineno + 1,
                message: format!("expected `type<TAB>terms`, got `{line}`"),
            })?;
            let set: BTreeSet<String> = terms
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(str::to_string)
                .collect();
            if set.is_empty() {
                return Err(Error::InvalidLexicon {
                    line: lineno + 1,
                    message: format!("no terms for event type `{event_type}`"),
                });
            }
            map.insert(event_type.trim().to_string(), set);
        }
        Ok(SboMappingTable { map })
    }

    pub fn get(&self, event_type: &str) -> Option<&BTreeSet<String>> {
        self.map.get(event_type)
    }

    pub fn event_types(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }

    /// Every mapped term must exist in the loaded ontology.
    pub fn validate_against(&self, ontology: &OntologyGraph) -> Result<()> {
        for (event_type, terms) in &self.map {
            for term in terms {
                if !ontology.contains(term) {
                    return Err(Error::UnknownMappingTerm {
                        event_type: event_type.clone(),
                        term: term.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// State prefix -> deduced SBO/GO term, in file order.
#[derive(Clone, Debug, Default)]
pub struct StatePrefixTable {
    entries: Vec<(String, String)>,
}

impl StatePrefixTable {
    pub fn parse(input: &str) -> Result<StatePrefixTable> {
        let mut entries = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (prefix, term) = line.split_once('\t').ok_or(Error::InvalidLexicon {
                line: lineno + 1,
                message: format!("expected `prefix<TAB>term`, got `{line}`"),
            })?;
            entries.push((prefix.trim().to_lowercase(), term.trim().to_string()));
        }
        Ok(StatePrefixTable { entries })
    }

    pub fn prefixes(&self) -> Vec<&str> {
        self.entries.iter().map(|(p, _)| p.as_str()).collect()
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

fn casefold(name: &str) -> String {
    name.to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Union the mapped terms of each reaction's source event type into its
/// signature. Fails fast when any reaction would stay uncovered, so the
/// full-coverage contract holds afterwards.
pub fn annotate_reactions(pathway: &mut Pathway, table: &SboMappingTable) -> Result<()> {
    let mut uncovered: BTreeSet<String> = BTreeSet::new();
    for r in pathway.reactions() {
        let mapped = r
            .source_event_type
            .as_deref()
            .and_then(|t| table.get(t))
            .is_some();
        if !mapped && r.sbo_signature.is_empty() {
            uncovered.insert(
                r.source_event_type
                    .clone()
                    .unwrap_or_else(|| "<missing event type>".to_string()),
            );
        }
    }
    if !uncovered.is_empty() {
        return Err(Error::MissingMapping(
            uncovered.into_iter().collect::<Vec<_>>().join(", "),
        ));
    }
    for r in pathway.reactions_mut() {
        if let Some(terms) = r.source_event_type.as_deref().and_then(|t| table.get(t)) {
            r.sbo_signature.extend(terms.iter().cloned());
        }
    }
    Ok(())
}

/// Resolve every species name to its Entrez signature and union it in.
pub fn annotate_species(pathway: &mut Pathway, resolver: &mut GeneResolver) {
    let names: Vec<(usize, String)> = pathway
        .species()
        .iter()
        .enumerate()
        .map(|(i, s)| (i, s.normalized_name.clone()))
        .collect();
    for (i, name) in names {
        let signature = resolver.resolve(&name);
        pathway.species_mut()[i].entrez_signature.extend(signature);
    }
}

/// Curated-map deduction: when a product name equals a reactant name
/// plus a recognized state prefix, the corresponding term is added to
/// the reaction signature. Returns the number of deduced terms.
pub fn annotate_target_reactions(pathway: &mut Pathway, prefixes: &StatePrefixTable) -> usize {
    let mut additions: Vec<(String, String)> = Vec::new();
    for reaction in pathway.reactions() {
        let neighbors = pathway
            .neighbors(&reaction.id)
            .expect("iterating existing reactions");
        let named = |role: Role| -> Vec<String> {
            neighbors
                .iter()
                .filter(|(_, r)| *r == role)
                .filter_map(|(sid, _)| pathway.species_by_id(sid))
                .map(|s| casefold(&s.name))
                .collect()
        };
        let reactants = named(Role::Reactant);
        let products = named(Role::Product);
        for reactant in &reactants {
            for product in &products {
                for (prefix, term) in prefixes.entries() {
                    if *product == format!("{prefix} {reactant}") {
                        additions.push((reaction.id.clone(), term.clone()));
                    }
                }
            }
        }
    }
    let mut added = 0;
    for (rid, term) in additions {
        let r = pathway
            .reaction_mut_by_id(&rid)
            .expect("reaction ids are stable");
        if r.sbo_signature.insert(term.clone()) {
            info!("deduced {term} for reaction {rid}");
            added += 1;
        }
    }
    added
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolverMode {
    Null,
    Lexicon,
    Remote,
}

/// Gene-normalization resolver with a persistent name cache.
///
/// Resolution is deterministic given the cache state; remote failures
/// degrade to an empty signature with a logged warning.
pub struct GeneResolver {
    mode: ResolverMode,
    lexicon: BTreeMap<String, BTreeSet<u64>>,
    cache: BTreeMap<String, BTreeSet<u64>>,
    endpoint: Option<String>,
    cache_path: Option<PathBuf>,
}

impl GeneResolver {
    /// Resolver that maps every name to the empty signature.
    pub fn null() -> GeneResolver {
        GeneResolver {
            mode: ResolverMode::Null,
            lexicon: BTreeMap::new(),
            cache: BTreeMap::new(),
            endpoint: None,
            cache_path: None,
        }
    }

    /// Resolver backed by a tab-separated `name\tid,id` lexicon.
    pub fn from_lexicon_str(input: &str) -> Result<GeneResolver> {
        let mut resolver = GeneResolver::null();
        resolver.mode = ResolverMode::Lexicon;
        resolver.lexicon = parse_id_table(input)?;
        Ok(resolver)
    }

    pub fn from_lexicon_file(path: &Path) -> Result<GeneResolver> {
        let body = std::fs::read_to_string(path)?;
        Self::from_lexicon_str(&body)
    }

    /// Resolver backed by a remote normalization service. The endpoint
    /// is queried as `GET {endpoint}?name={name}` and must answer with
    /// a plain-text list of Entrez ids (comma or whitespace separated).
    pub fn remote(endpoint: impl Into<String>) -> Result<GeneResolver> {
        #[cfg(not(feature = "remote-resolver"))]
        {
            let _ = endpoint.into();
            return Err(Error::ResolverUnavailable(
                "built without the remote-resolver feature".to_string(),
            ));
        }
        #[cfg(feature = "remote-resolver")]
        {
            let mut resolver = GeneResolver::null();
            resolver.mode = ResolverMode::Remote;
            resolver.endpoint = Some(endpoint.into());
            Ok(resolver)
        }
    }

    /// Attach (and pre-load) a persistent cache file.
    pub fn with_cache_file(mut self, path: impl Into<PathBuf>) -> Result<GeneResolver> {
        let path = path.into();
        if path.exists() {
            let body = std::fs::read_to_string(&path)?;
            self.cache = parse_id_table(&body)?;
        }
        self.cache_path = Some(path);
        Ok(self)
    }

    pub fn cached_names(&self) -> usize {
        self.cache.len()
    }

    pub fn resolve(&mut self, name: &str) -> BTreeSet<u64> {
        let key = casefold(name);
        match self.mode {
            ResolverMode::Null => BTreeSet::new(),
            ResolverMode::Lexicon => self.lexicon.get(&key).cloned().unwrap_or_default(),
            ResolverMode::Remote => {
                if let Some(hit) = self.cache.get(&key) {
                    return hit.clone();
                }
                match self.fetch_remote(&key) {
                    Ok(ids) => {
                        self.cache.insert(key, ids.clone());
                        ids
                    }
                    Err(message) => {
                        warn!("gene resolution for `{key}` failed: {message}");
                        BTreeSet::new()
                    }
                }
            }
        }
    }

    /// Persist the cache atomically (write then rename).
    pub fn save_cache(&self) -> Result<()> {
        let Some(path) = &self.cache_path else {
            return Ok(());
        };
        let mut body = String::new();
        for (name, ids) in &self.cache {
            let ids: Vec<String> = ids.iter().map(u64::to_string).collect();
            body.push_str(&format!("{name}\t{}\n", ids.join(",")));
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, body)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    #[cfg(feature = "remote-resolver")]
    fn fetch_remote(&self, name: &str) -> std::result::Result<BTreeSet<u64>, String> {
        let endpoint = self.endpoint.as_deref().ok_or("no endpoint configured")?;
        let url = format!("{endpoint}?name={}", percent_encode(name));
        let mut response = ureq::get(&url).call().map_err(|e| e.to_string())?;
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| e.to_string())?;
        Ok(body
            .split([',', ' ', '\n', '\t'])
            .filter_map(|t| t.trim().parse().ok())
            .collect())
    }

    #[cfg(not(feature = "remote-resolver"))]
    fn fetch_remote(&self, _name: &str) -> std::result::Result<BTreeSet<u64>, String> {
        Err("built without the remote-resolver feature".to_string())
    }
}

fn parse_id_table(input: &str) -> Result<BTreeMap<String, BTreeSet<u64>>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, ids) = line.split_once('\t').ok_or(Error::InvalidLexicon {
            line: lineno + 1,
            message: format!("expected `name<TAB>ids`, got `{line}`"),
        })?;
        let mut set = BTreeSet::new();
        for id in ids.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let parsed = id.parse().map_err(|_| Error::InvalidLexicon {
                line: lineno + 1,
                message: format!("`{id}` is not an Entrez id"),
            })?;
            set.insert(parsed);
        }
        map.insert(casefold(name), set);
    }
    Ok(map)
}

#[cfg(feature = "remote-resolver")]
fn percent_encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        match b {
            b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' => {
                out.push(b as char)
            }
            other => out.push_str(&format!("%{other:02X}")),
        }
    }
    out
}
