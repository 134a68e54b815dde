//! Read and write the SBML subset the pipeline needs: compartments,
//! species, reactions with reactant/product/modifier lists, Entrez
//! annotations (`bqbiol:is` resource URIs), SBO/GO signatures (the
//! `sboTerm` attribute plus annotation URIs), complex constituents and
//! the originating event type (both in a small custom namespace).
//!
//! Parsing is best-effort by element name rather than schema-driven so
//! that CellDesigner-flavoured files load too; unknown elements are
//! skipped with a warning, never fatally.

use std::collections::HashSet;

use log::warn;
use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, Event};
use quick_xml::{Reader, Writer};

use crate::error::{Error, Result};
use crate::model::{Compartment, Pathway, Reaction, Role, Species};

/// Namespace for the annotations this tool writes itself
/// (complex constituents, source event types).
pub const EXTENSION_NS: &str = "urn:pathcmp:annotations";

/// Pull the Entrez gene id out of an annotation URI. Both
/// identifiers.org and urn:miriam shapes are accepted; the trailing
/// integer is the id.
pub fn extract_entrez_id(uri: &str) -> Option<u64> {
    let lowered = uri.to_lowercase();
    let known = [
        "ncbigene",
        "entrezgene",
        "entrez.gene",
        "ncbi.nlm.nih.gov/gene",
    ];
    if !known.iter().any(|k| lowered.contains(k)) {
        return None;
    }
    let tail = uri.rsplit(['/', ':', '=']).next()?;
    tail.trim().parse().ok()
}

/// Pull all SBO/GO term ids (`PREFIX:NNNNNNN`) out of an annotation URI.
pub fn extract_ontology_terms(uri: &str) -> Vec<String> {
    let decoded = uri.replace("%3A", ":").replace("%3a", ":");
    let mut terms = Vec::new();
    for prefix in ["SBO:", "GO:"] {
        let mut rest = decoded.as_str();
        while let Some(pos) = rest.find(prefix) {
            let after = &rest[pos + prefix.len()..];
            let digits: String = after.chars().take_while(|c| c.is_ascii_digit()).collect();
            if digits.len() == 7 {
                terms.push(format!("{prefix}{digits}"));
            }
            rest = &rest[pos + prefix.len()..];
        }
    }
    terms
}

fn is_sbo_term(term: &str) -> bool {
    term.strip_prefix("SBO:")
        .map(|d| d.len() == 7 && d.chars().all(|c| c.is_ascii_digit()))
        .unwrap_or(false)
}

struct PendingReference {
    species: String,
    reaction: String,
    role: Role,
    position: u64,
}

/// Parse an SBML document into a pathway.
pub fn parse_sbml(input: &[u8]) -> Result<Pathway> {
    let mut reader = Reader::from_reader(input);
    let mut buf = Vec::new();

    let mut pathway = Pathway::new("");
    let mut warned: HashSet<String> = HashSet::new();

    // element context
    let mut saw_document_root = false;
    let mut in_model = false;
    let mut current_species: Option<Species> = None;
    let mut current_reaction: Option<Reaction> = None;
    let mut current_list: Option<Role> = None;
    let mut references: Vec<PendingReference> = Vec::new();
    let mut species_order: Vec<String> = Vec::new();
    let mut compartments_declared: HashSet<String> = HashSet::new();
    let mut compartments_used: Vec<String> = Vec::new();

    let attr_value = |e: &BytesStart, wanted: &str| -> Result<Option<String>> {
        for attr in e.attributes() {
            let attr = attr.map_err(|err| Error::MalformedXml {
                position: 0,
                message: err.to_string(),
            })?;
            let key = attr.key.local_name();
            if key.as_ref() == wanted.as_bytes() {
                let v = attr
                    .normalized_value(quick_xml::XmlVersion::default())
                    .map_err(|err| Error::MalformedXml {
                        position: 0,
                        message: err.to_string(),
                    })?;
                return Ok(Some(v.into_owned()));
            }
        }
        Ok(None)
    };

    loop {
        let position = reader.buffer_position();
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|err| Error::MalformedXml {
                position,
                message: err.to_string(),
            })?;
        match &event {
            Event::Start(e) | Event::Empty(e) => {
                let empty = matches!(event, Event::Empty(_));
                let name = e.name();
                let local = name.local_name();
                match local.as_ref() {
                    b"sbml" => saw_document_root = true,
                    b"model" => {
                        saw_document_root = true;
                        in_model = true;
                        let model_name = attr_value(e, "name")?
                            .or(attr_value(e, "id")?)
                            .unwrap_or_default();
                        pathway.name = model_name;
                    }
                    b"listOfCompartments"
                    | b"listOfSpecies"
                    | b"listOfReactions"
                    | b"annotation"
                    | b"RDF"
                    | b"Description"
                    | b"is"
                    | b"Bag" => {}
                    b"compartment" if in_model => {
                        let id = attr_value(e, "id")?.ok_or(Error::MalformedXml {
                            position,
                            message: "compartment without an id".to_string(),
                        })?;
                        let compartment_name = attr_value(e, "name")?.unwrap_or_else(|| id.clone());
                        compartments_declared.insert(id.clone());
                        pathway.add_compartment(Compartment {
                            id,
                            name: compartment_name,
                        })?;
                    }
                    b"species" if current_species.is_none() && in_model => {
                        let id = attr_value(e, "id")?.ok_or(Error::MalformedXml {
                            position,
                            message: "species without an id".to_string(),
                        })?;
                        let species_name = attr_value(e, "name")?.unwrap_or_else(|| id.clone());
                        let mut sp = Species::new(id, species_name);
                        if let Some(c) = attr_value(e, "compartment")? {
                            compartments_used.push(c.clone());
                            sp.compartment = Some(c);
                        }
                        if empty {
                            species_order.push(sp.id.clone());
                            pathway.add_species(sp)?;
                        } else {
                            current_species = Some(sp);
                        }
                    }
                    b"reaction" => {
                        let id = attr_value(e, "id")?.ok_or(Error::MalformedXml {
                            position,
                            message: "reaction without an id".to_string(),
                        })?;
                        let mut reaction = Reaction::new(id);
                        if let Some(term) = attr_value(e, "sboTerm")? {
                            if is_sbo_term(&term) {
                                reaction.sbo_signature.insert(term);
                            } else {
                                warn!("ignoring malformed sboTerm `{term}`");
                            }
                        }
                        if empty {
                            pathway.add_reaction(reaction)?;
                        } else {
                            current_reaction = Some(reaction);
                        }
                    }
                    b"listOfReactants" => current_list = Some(Role::Reactant),
                    b"listOfProducts" => current_list = Some(Role::Product),
                    b"listOfModifiers" => current_list = Some(Role::Modifier),
                    b"speciesReference" | b"modifierSpeciesReference" => {
                        let Some(reaction) = current_reaction.as_ref() else {
                            warn!("species reference outside a reaction; skipping");
                            continue;
                        };
                        let Some(role) = current_list else {
                            warn!("species reference outside a reference list; skipping");
                            continue;
                        };
                        let species = attr_value(e, "species")?.ok_or(Error::MalformedXml {
                            position,
                            message: "speciesReference without a species attribute".to_string(),
                        })?;
                        references.push(PendingReference {
                            species,
                            reaction: reaction.id.clone(),
                            role,
                            position,
                        });
                    }
                    b"li" => {
                        let Some(resource) = attr_value(e, "resource")? else {
                            continue;
                        };
                        if let Some(sp) = current_species.as_mut() {
                            if let Some(id) = extract_entrez_id(&resource) {
                                sp.entrez_signature.insert(id);
                            }
                        } else if let Some(r) = current_reaction.as_mut() {
                            for term in extract_ontology_terms(&resource) {
                                r.sbo_signature.insert(term);
                            }
                        }
                    }
                    b"constituents" => {}
                    b"constituent" => {
                        if let Some(sp) = current_species.as_mut() {
                            if let Some(member) = attr_value(e, "species")? {
                                sp.constituents.push(member);
                            }
                        }
                    }
                    b"sourceEvent" => {
                        if let Some(r) = current_reaction.as_mut() {
                            r.source_event_type = attr_value(e, "type")?;
                        }
                    }
                    other => {
                        let other = String::from_utf8_lossy(other).into_owned();
                        if warned.insert(other.clone()) {
                            warn!("skipping unknown SBML element `{other}`");
                        }
                    }
                }
            }
            Event::End(e) => match e.name().local_name().as_ref() {
                b"species" => {
                    if let Some(sp) = current_species.take() {
                        species_order.push(sp.id.clone());
                        pathway.add_species(sp)?;
                    }
                }
                b"reaction" => {
                    if let Some(r) = current_reaction.take() {
                        pathway.add_reaction(r)?;
                    }
                }
                b"listOfReactants" | b"listOfProducts" | b"listOfModifiers" => {
                    current_list = None;
                }
                b"model" => in_model = false,
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if !saw_document_root {
        return Err(Error::MalformedXml {
            position: 0,
            message: "no sbml or model element found".to_string(),
        });
    }

    // compartments referenced but never declared: declare them so the
    // pathway stays internally consistent (CellDesigner tolerance)
    for c in compartments_used {
        if !compartments_declared.contains(&c) && pathway.compartment_by_id(&c).is_none() {
            warn!("species references undeclared compartment `{c}`; declaring it");
            pathway.add_compartment(Compartment {
                id: c.clone(),
                name: c,
            })?;
        }
    }

    // resolve reference lists into edges
    for r in references {
        if pathway.species_by_id(&r.species).is_none() {
            return Err(Error::DanglingSpeciesReference {
                species: r.species,
                reaction: r.reaction,
                position: r.position,
            });
        }
        if pathway.has_edge(&r.species, &r.reaction, r.role) {
            warn!(
                "duplicate {} reference ({}, {}) collapsed",
                r.role, r.species, r.reaction
            );
            continue;
        }
        pathway.add_edge(&r.species, &r.reaction, r.role)?;
    }

    // constituent references must resolve; drop the ones that do not
    let resolved: HashSet<String> = species_order.iter().cloned().collect();
    for sid in &species_order {
        let sp = pathway.species_mut_by_id(sid).expect("just inserted");
        let before = sp.constituents.len();
        let own_id = sp.id.clone();
        sp.constituents
            .retain(|c| resolved.contains(c) && *c != own_id);
        if sp.constituents.len() != before {
            warn!("dropped unresolved constituents of species `{sid}`");
        }
    }

    pathway.check_invariants()?;
    Ok(pathway)
}

/// Serialize a pathway deterministically: elements ordered by id,
/// signatures sorted, references sorted by species id within each role
/// list.
pub fn write_sbml(pathway: &Pathway) -> String {
    let mut writer = Writer::new_with_indent(Vec::new(), b' ', 2);
    writer
        .write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .expect("writing to memory cannot fail");

    let mut w = |event: Event| {
        writer
            .write_event(event)
            .expect("writing to memory cannot fail");
    };

    let mut sbml = BytesStart::new("sbml");
    sbml.push_attribute(("xmlns", "http://www.sbml.org/sbml/level2/version4"));
    sbml.push_attribute(("level", "2"));
    sbml.push_attribute(("version", "4"));
    w(Event::Start(sbml));

    let mut model = BytesStart::new("model");
    let model_id = crate::convert::xml_id(&pathway.name);
    model.push_attribute(("id", model_id.as_str()));
    model.push_attribute(("name", pathway.name.as_str()));
    w(Event::Start(model));

    // compartments
    w(Event::Start(BytesStart::new("listOfCompartments")));
    let mut compartments: Vec<&Compartment> = pathway.compartments().iter().collect();
    compartments.sort_by(|a, b| a.id.cmp(&b.id));
    for c in compartments {
        let mut e = BytesStart::new("compartment");
        e.push_attribute(("id", c.id.as_str()));
        e.push_attribute(("name", c.name.as_str()));
        w(Event::Empty(e));
    }
    w(Event::End(BytesEnd::new("listOfCompartments")));

    // species
    w(Event::Start(BytesStart::new("listOfSpecies")));
    let mut species: Vec<&Species> = pathway.species().iter().collect();
    species.sort_by(|a, b| a.id.cmp(&b.id));
    for sp in species {
        let mut e = BytesStart::new("species");
        e.push_attribute(("id", sp.id.as_str()));
        e.push_attribute(("name", sp.name.as_str()));
        if let Some(c) = &sp.compartment {
            e.push_attribute(("compartment", c.as_str()));
        }
        let needs_annotation = !sp.entrez_signature.is_empty() || !sp.constituents.is_empty();
        if !needs_annotation {
            w(Event::Empty(e));
            continue;
        }
        w(Event::Start(e));
        w(Event::Start(BytesStart::new("annotation")));
        if !sp.constituents.is_empty() {
            let mut wrap = BytesStart::new("pc:constituents");
            wrap.push_attribute(("xmlns:pc", EXTENSION_NS));
            w(Event::Start(wrap));
            for member in &sp.constituents {
                let mut c = BytesStart::new("pc:constituent");
                c.push_attribute(("species", member.as_str()));
                w(Event::Empty(c));
            }
            w(Event::End(BytesEnd::new("pc:constituents")));
        }
        if !sp.entrez_signature.is_empty() {
            let uris: Vec<String> = sp
                .entrez_signature
                .iter()
                .map(|id| format!("http://identifiers.org/ncbigene/{id}"))
                .collect();
            write_rdf_block(&mut w, &sp.id, &uris);
        }
        w(Event::End(BytesEnd::new("annotation")));
        w(Event::End(BytesEnd::new("species")));
    }
    w(Event::End(BytesEnd::new("listOfSpecies")));

    // reactions with their reference lists
    w(Event::Start(BytesStart::new("listOfReactions")));
    let mut reactions: Vec<&Reaction> = pathway.reactions().iter().collect();
    reactions.sort_by(|a, b| a.id.cmp(&b.id));

    for r in reactions {
        let mut e = BytesStart::new("reaction");
        e.push_attribute(("id", r.id.as_str()));
        if let Some(term) = r.sbo_signature.iter().find(|t| is_sbo_term(t)) {
            e.push_attribute(("sboTerm", term.as_str()));
        }

        let mut neighbors = pathway.neighbors(&r.id).expect("reaction exists");
        neighbors.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        let needs_annotation = !r.sbo_signature.is_empty() || r.source_event_type.is_some();
        if neighbors.is_empty() && !needs_annotation {
            w(Event::Empty(e));
            continue;
        }
        w(Event::Start(e));

        if needs_annotation {
            w(Event::Start(BytesStart::new("annotation")));
            if let Some(event_type) = &r.source_event_type {
                let mut s = BytesStart::new("pc:sourceEvent");
                s.push_attribute(("xmlns:pc", EXTENSION_NS));
                s.push_attribute(("type", event_type.as_str()));
                w(Event::Empty(s));
            }
            if !r.sbo_signature.is_empty() {
                let uris: Vec<String> = r
                    .sbo_signature
                    .iter()
                    .map(|t| {
                        if is_sbo_term(t) {
                            format!("http://identifiers.org/sbo/{t}")
                        } else {
                            format!("http://identifiers.org/go/{t}")
                        }
                    })
                    .collect();
                write_rdf_block(&mut w, &r.id, &uris);
            }
            w(Event::End(BytesEnd::new("annotation")));
        }

        for (list, role) in [
            ("listOfReactants", Role::Reactant),
            ("listOfProducts", Role::Product),
            ("listOfModifiers", Role::Modifier),
        ] {
            let members: Vec<&str> = neighbors
                .iter()
                .filter(|(_, r)| *r == role)
                .map(|(s, _)| s.as_str())
                .collect();
            if members.is_empty() {
                continue;
            }
            w(Event::Start(BytesStart::new(list)));
            let element = if role == Role::Modifier {
                "modifierSpeciesReference"
            } else {
                "speciesReference"
            };
            for m in members {
                let mut sr = BytesStart::new(element);
                sr.push_attribute(("species", m));
                w(Event::Empty(sr));
            }
            w(Event::End(BytesEnd::new(list)));
        }
        w(Event::End(BytesEnd::new("reaction")));
    }
    w(Event::End(BytesEnd::new("listOfReactions")));

    w(Event::End(BytesEnd::new("model")));
    w(Event::End(BytesEnd::new("sbml")));

    let mut bytes = writer.into_inner();
    bytes.push(b'\n');
    String::from_utf8(bytes).expect("writer emits UTF-8")
}

fn write_rdf_block(w: &mut impl FnMut(Event), about: &str, resources: &[String]) {
    let mut rdf = BytesStart::new("rdf:RDF");
    rdf.push_attribute(("xmlns:rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"));
    rdf.push_attribute(("xmlns:bqbiol", "http://biomodels.net/biology-qualifiers/"));
    w(Event::Start(rdf));
    let mut desc = BytesStart::new("rdf:Description");
    let about = format!("#{about}");
    desc.push_attribute(("rdf:about", about.as_str()));
    w(Event::Start(desc));
    w(Event::Start(BytesStart::new("bqbiol:is")));
    w(Event::Start(BytesStart::new("rdf:Bag")));
    for uri in resources {
        let mut li = BytesStart::new("rdf:li");
        li.push_attribute(("rdf:resource", uri.as_str()));
        w(Event::Empty(li));
    }
    w(Event::End(BytesEnd::new("rdf:Bag")));
    w(Event::End(BytesEnd::new("bqbiol:is")));
    w(Event::End(BytesEnd::new("rdf:Description")));
    w(Event::End(BytesEnd::new("rdf:RDF")));
}
