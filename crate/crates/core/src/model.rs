//! In-memory pathway graph: species and reactions connected by
//! role-labeled edges, plus compartments.
//!
//! The graph is stored as an edge list with two adjacency indexes (by
//! species and by reaction) because matching needs to walk both
//! directions. Pathways are immutable once built; construction happens
//! through the `add_*` methods which enforce referential integrity.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::normalize_name;

pub type SpeciesId = String;
pub type ReactionId = String;
pub type CompartmentId = String;

/// Role a species plays in a reaction. Ordering (reactant < product <
/// modifier) fixes the report and neighbor ordering everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Reactant,
    Product,
    Modifier,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Reactant => "reactant",
            Role::Product => "product",
            Role::Modifier => "modifier",
        }
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "reactant" => Ok(Role::Reactant),
            "product" => Ok(Role::Product),
            "modifier" => Ok(Role::Modifier),
            other => Err(format!("unknown edge role `{other}`")),
        }
    }
}

/// A biological entity: protein, gene, complex, ...
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Species {
    pub id: SpeciesId,
    pub name: String,
    /// Lowercased, whitespace-collapsed name with state prefixes
    /// stripped. Derived from `name`; kept on the struct because
    /// matching consults it millions of times.
    pub normalized_name: String,
    /// Entrez gene identifiers assigned by a resolver; empty when the
    /// name could not be normalized to any gene.
    pub entrez_signature: BTreeSet<u64>,
    /// Species ids of the members of a complex; empty otherwise.
    pub constituents: Vec<SpeciesId>,
    pub compartment: Option<CompartmentId>,
}

impl Species {
    pub fn new(id: impl Into<SpeciesId>, name: impl Into<String>) -> Self {
        let name = name.into();
        let normalized_name = normalize_name(&name, crate::matching::DEFAULT_STATE_PREFIXES);
        Species {
            id: id.into(),
            name,
            normalized_name,
            entrez_signature: BTreeSet::new(),
            constituents: Vec::new(),
            compartment: None,
        }
    }

    pub fn with_entrez<I: IntoIterator<Item = u64>>(mut self, ids: I) -> Self {
        self.entrez_signature.extend(ids);
        self
    }

    pub fn with_constituents<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<SpeciesId>,
    {
        self.constituents = ids.into_iter().map(Into::into).collect();
        self
    }

    pub fn is_complex(&self) -> bool {
        !self.constituents.is_empty()
    }
}

/// A biological event node. The SBO/GO signature is a set of ontology
/// term ids; it is filled by the annotate pass and must be non-empty
/// before scoring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reaction {
    pub id: ReactionId,
    pub sbo_signature: BTreeSet<String>,
    pub source_event_type: Option<String>,
}

impl Reaction {
    pub fn new(id: impl Into<ReactionId>) -> Self {
        Reaction {
            id: id.into(),
            sbo_signature: BTreeSet::new(),
            source_event_type: None,
        }
    }

    pub fn with_event_type(mut self, event_type: impl Into<String>) -> Self {
        self.source_event_type = Some(event_type.into());
        self
    }

    pub fn with_terms<I, S>(mut self, terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.sbo_signature.extend(terms.into_iter().map(Into::into));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Compartment {
    pub id: CompartmentId,
    pub name: String,
}

/// One incidence between a species and a reaction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RoleEdge {
    pub species_id: SpeciesId,
    pub reaction_id: ReactionId,
    pub role: Role,
}

/// A typed pathway graph.
#[derive(Clone, Debug, Default)]
pub struct Pathway {
    /// Source name, e.g. the file or corpus the pathway came from.
    pub name: String,
    species: Vec<Species>,
    reactions: Vec<Reaction>,
    compartments: Vec<Compartment>,
    edges: Vec<RoleEdge>,
    species_index: HashMap<SpeciesId, usize>,
    reaction_index: HashMap<ReactionId, usize>,
    compartment_index: HashMap<CompartmentId, usize>,
    edges_by_species: HashMap<usize, Vec<usize>>,
    edges_by_reaction: HashMap<usize, Vec<usize>>,
    edge_set: HashSet<(usize, usize, Role)>,
}

impl Pathway {
    pub fn new(name: impl Into<String>) -> Self {
        Pathway {
            name: name.into(),
            ..Pathway::default()
        }
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn compartments(&self) -> &[Compartment] {
        &self.compartments
    }

    pub fn edges(&self) -> &[RoleEdge] {
        &self.edges
    }

    pub fn species_by_id(&self, id: &str) -> Option<&Species> {
        self.species_index.get(id).map(|&i| &self.species[i])
    }

    pub fn reaction_by_id(&self, id: &str) -> Option<&Reaction> {
        self.reaction_index.get(id).map(|&i| &self.reactions[i])
    }

    pub fn compartment_by_id(&self, id: &str) -> Option<&Compartment> {
        self.compartment_index
            .get(id)
            .map(|&i| &self.compartments[i])
    }

    pub(crate) fn species_pos(&self, id: &str) -> Option<usize> {
        self.species_index.get(id).copied()
    }

    pub(crate) fn reaction_pos(&self, id: &str) -> Option<usize> {
        self.reaction_index.get(id).copied()
    }

    pub fn add_species(&mut self, species: Species) -> Result<SpeciesId> {
        if self.species_index.contains_key(&species.id) {
            return Err(Error::DuplicateId {
                kind: "species",
                id: species.id.clone(),
            });
        }
        if species.constituents.contains(&species.id) {
            return Err(Error::SelfConstituent {
                species: species.id.clone(),
            });
        }
        let id = species.id.clone();
        self.species_index.insert(id.clone(), self.species.len());
        self.species.push(species);
        Ok(id)
    }

    pub fn add_reaction(&mut self, reaction: Reaction) -> Result<ReactionId> {
        if self.reaction_index.contains_key(&reaction.id) {
            return Err(Error::DuplicateId {
                kind: "reaction",
                id: reaction.id.clone(),
            });
        }
        let id = reaction.id.clone();
        self.reaction_index.insert(id.clone(), self.reactions.len());
        self.reactions.push(reaction);
        Ok(id)
    }

    pub fn add_compartment(&mut self, compartment: Compartment) -> Result<CompartmentId> {
        if self.compartment_index.contains_key(&compartment.id) {
            return Err(Error::DuplicateId {
                kind: "compartment",
                id: compartment.id.clone(),
            });
        }
        let id = compartment.id.clone();
        self.compartment_index
            .insert(id.clone(), self.compartments.len());
        self.compartments.push(compartment);
        Ok(id)
    }

    pub fn add_edge(&mut self, species_id: &str, reaction_id: &str, role: Role) -> Result<()> {
        let s = self
            .species_pos(species_id)
            .ok_or_else(|| Error::UnknownSpecies(species_id.to_string()))?;
        let r = self
            .reaction_pos(reaction_id)
            .ok_or_else(|| Error::UnknownReaction(reaction_id.to_string()))?;
        if !self.edge_set.insert((s, r, role)) {
            return Err(Error::DuplicateEdge {
                species: species_id.to_string(),
                reaction: reaction_id.to_string(),
                role: role.to_string(),
            });
        }
        let idx = self.edges.len();
        self.edges.push(RoleEdge {
            species_id: species_id.to_string(),
            reaction_id: reaction_id.to_string(),
            role,
        });
        self.edges_by_species.entry(s).or_default().push(idx);
        self.edges_by_reaction.entry(r).or_default().push(idx);
        Ok(())
    }

    pub fn has_edge(&self, species_id: &str, reaction_id: &str, role: Role) -> bool {
        match (self.species_pos(species_id), self.reaction_pos(reaction_id)) {
            (Some(s), Some(r)) => self.edge_set.contains(&(s, r, role)),
            _ => false,
        }
    }

    pub fn set_species_compartment(
        &mut self,
        species_id: &str,
        compartment_id: &str,
    ) -> Result<()> {
        if !self.compartment_index.contains_key(compartment_id) {
            return Err(Error::UnknownCompartment(compartment_id.to_string()));
        }
        let s = self
            .species_pos(species_id)
            .ok_or_else(|| Error::UnknownSpecies(species_id.to_string()))?;
        self.species[s].compartment = Some(compartment_id.to_string());
        Ok(())
    }

    pub(crate) fn species_mut(&mut self) -> &mut [Species] {
        &mut self.species
    }

    pub(crate) fn reactions_mut(&mut self) -> &mut [Reaction] {
        &mut self.reactions
    }

    pub(crate) fn species_mut_by_id(&mut self, id: &str) -> Option<&mut Species> {
        let i = self.species_index.get(id).copied()?;
        Some(&mut self.species[i])
    }

    pub(crate) fn reaction_mut_by_id(&mut self, id: &str) -> Option<&mut Reaction> {
        let i = self.reaction_index.get(id).copied()?;
        Some(&mut self.reactions[i])
    }

    /// Incident edges of a reaction as `(species_id, role)` pairs in
    /// stable `(role, species_id)` order.
    pub fn neighbors(&self, reaction_id: &str) -> Result<Vec<(SpeciesId, Role)>> {
        let r = self
            .reaction_pos(reaction_id)
            .ok_or_else(|| Error::UnknownReaction(reaction_id.to_string()))?;
        let mut out: Vec<(SpeciesId, Role)> = self
            .edges_by_reaction
            .get(&r)
            .map(|idxs| {
                idxs.iter()
                    .map(|&i| (self.edges[i].species_id.clone(), self.edges[i].role))
                    .collect()
            })
            .unwrap_or_default();
        out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        Ok(out)
    }

    /// Edge indexes incident to the reaction at internal position `r`.
    pub(crate) fn reaction_edges(&self, r: usize) -> &[usize] {
        self.edges_by_reaction
            .get(&r)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn edge_at(&self, idx: usize) -> &RoleEdge {
        &self.edges[idx]
    }

    /// Resolve a species' constituents one level, skipping unresolved
    /// ids and guarding against self references.
    pub fn constituents_of<'a>(&'a self, species: &'a Species) -> Vec<&'a Species> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for cid in &species.constituents {
            if *cid == species.id || !seen.insert(cid.as_str()) {
                continue;
            }
            if let Some(c) = self.species_by_id(cid) {
                out.push(c);
            }
        }
        out
    }

    /// Recompute every species' normalized name with a custom state
    /// prefix vocabulary.
    pub fn renormalize_names(&mut self, prefixes: &[String]) {
        let refs: Vec<&str> = prefixes.iter().map(String::as_str).collect();
        for sp in &mut self.species {
            sp.normalized_name = normalize_name(&sp.name, &refs);
        }
    }

    /// Check the structural invariants: unique ids (guaranteed by
    /// construction), edge endpoints resolve, no duplicate edges,
    /// constituents resolve and never self-reference.
    pub fn check_invariants(&self) -> Result<()> {
        for e in &self.edges {
            if self.species_pos(&e.species_id).is_none() {
                return Err(Error::UnknownSpecies(e.species_id.clone()));
            }
            if self.reaction_pos(&e.reaction_id).is_none() {
                return Err(Error::UnknownReaction(e.reaction_id.clone()));
            }
        }
        for sp in &self.species {
            for c in &sp.constituents {
                if *c == sp.id {
                    return Err(Error::SelfConstituent {
                        species: sp.id.clone(),
                    });
                }
                if self.species_pos(c).is_none() {
                    return Err(Error::UnresolvedConstituent {
                        species: sp.id.clone(),
                        constituent: c.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Merge another pathway into this one. Ids must not collide; the
    /// converter namespaces ids by document so this holds for corpus
    /// unions.
    pub fn absorb(&mut self, other: Pathway) -> Result<()> {
        for c in other.compartments {
            self.add_compartment(c)?;
        }
        for s in other.species {
            self.add_species(s)?;
        }
        for r in other.reactions {
            self.add_reaction(r)?;
        }
        for e in other.edges {
            self.add_edge(&e.species_id, &e.reaction_id, e.role)?;
        }
        Ok(())
    }
}
