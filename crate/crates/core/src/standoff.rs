//! BioNLP shared-task standoff parsing: text-bound entities (`T`
//! lines), events with typed arguments (`E` lines), speculation and
//! negation modifiers (`M` lines) and `Equiv` identity lines, read from
//! aligned `.txt`/`.a1`/`.a2` file bodies.

use std::collections::{BTreeMap, HashMap, HashSet};

use log::warn;

use crate::error::{Error, Result};

/// Event types annotated in the BioNLP training corpora. Types outside
/// this vocabulary are preserved verbatim with a warning.
pub const REACTION_TYPES: &[&str] = &[
    "Acetylation",
    "Activation",
    "Binding",
    "Catalysis",
    "Conversion",
    "Deacetylation",
    "Degradation",
    "Demethylation",
    "Dephosphorylation",
    "Deubiquitination",
    "Dissociation",
    "Gene_expression",
    "Hydroxylation",
    "Inactivation",
    "Localization",
    "Methylation",
    "Negative_regulation",
    "Pathway",
    "Phosphorylation",
    "Positive_regulation",
    "Protein_catabolism",
    "Regulation",
    "Transcription",
    "Translation",
    "Transport",
    "Ubiquitination",
];

/// A text-bound annotation (entity mention or event trigger).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entity {
    pub id: String,
    pub entity_type: String,
    /// Code-point spans; more than one for discontinuous mentions.
    pub spans: Vec<(usize, usize)>,
    pub surface: String,
    /// True when the entity came from the `.a1` file (given entities).
    pub given: bool,
}

impl Entity {
    pub fn start(&self) -> usize {
        self.spans.first().map(|s| s.0).unwrap_or(0)
    }

    pub fn end(&self) -> usize {
        self.spans.last().map(|s| s.1).unwrap_or(0)
    }
}

/// One event argument. `Theme2`-style numbered roles are normalized to
/// the base role with the number kept for reserialization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventArg {
    pub role: String,
    pub number: Option<u32>,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub id: String,
    pub event_type: String,
    pub trigger: String,
    pub args: Vec<EventArg>,
}

impl Event {
    /// Targets of all arguments carrying `role` (after numbered-role
    /// normalization), in line order.
    pub fn args_with_role<'a>(&'a self, role: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.args
            .iter()
            .filter(move |a| a.role == role)
            .map(|a| a.target.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModifierKind {
    Speculation,
    Negation,
}

impl ModifierKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModifierKind::Speculation => "Speculation",
            ModifierKind::Negation => "Negation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modifier {
    pub id: String,
    pub kind: ModifierKind,
    pub event: String,
}

/// A fully cross-linked standoff document.
#[derive(Clone, Debug, Default)]
pub struct StandoffDocument {
    pub id: String,
    pub text: String,
    pub entities: Vec<Entity>,
    pub events: Vec<Event>,
    pub modifiers: Vec<Modifier>,
    pub equivs: Vec<Vec<String>>,
}

impl StandoffDocument {
    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entities.iter().find(|e| e.id == id)
    }

    pub fn event(&self, id: &str) -> Option<&Event> {
        self.events.iter().find(|e| e.id == id)
    }

    /// Reserialize the given entities (`.a1` content).
    pub fn write_a1(&self) -> String {
        let mut out = String::new();
        for e in self.entities.iter().filter(|e| e.given) {
            out.push_str(&entity_line(e));
        }
        out
    }

    /// Reserialize triggers, events, modifiers and equivs (`.a2`
    /// content). Line kinds are grouped: entities, events, modifiers,
    /// equivs; within each group the input order is kept.
    pub fn write_a2(&self) -> String {
        let mut out = String::new();
        for e in self.entities.iter().filter(|e| !e.given) {
            out.push_str(&entity_line(e));
        }
        for ev in &self.events {
            out.push_str(&format!("{}\t{}:{}", ev.id, ev.event_type, ev.trigger));
            for a in &ev.args {
                match a.number {
                    Some(n) => out.push_str(&format!(" {}{}:{}", a.role, n, a.target)),
                    None => out.push_str(&format!(" {}:{}", a.role, a.target)),
                }
            }
            out.push('\n');
        }
        for m in &self.modifiers {
            out.push_str(&format!("{}\t{} {}\n", m.id, m.kind.as_str(), m.event));
        }
        for eq in &self.equivs {
            out.push_str(&format!("*\tEquiv {}\n", eq.join(" ")));
        }
        out
    }
}

fn entity_line(e: &Entity) -> String {
    let spans = e
        .spans
        .iter()
        .map(|(s, t)| format!("{s} {t}"))
        .collect::<Vec<_>>()
        .join(";");
    format!("{}\t{} {}\t{}\n", e.id, e.entity_type, spans, e.surface)
}

/// Parse one document from its three aligned file bodies.
pub fn parse_standoff(doc_id: &str, text: &str, a1: &str, a2: &str) -> Result<StandoffDocument> {
    let chars: Vec<char> = text.chars().collect();
    let mut doc = StandoffDocument {
        id: doc_id.to_string(),
        text: text.to_string(),
        ..StandoffDocument::default()
    };
    parse_annotation_file(&mut doc, &chars, a1, "a1", true)?;
    parse_annotation_file(&mut doc, &chars, a2, "a2", false)?;
    cross_link(&doc)?;
    Ok(doc)
}

fn parse_annotation_file(
    doc: &mut StandoffDocument,
    chars: &[char],
    body: &str,
    file: &str,
    given: bool,
) -> Result<()> {
    for (lineno, raw) in body.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let malformed = |message: String| Error::MalformedLine {
            file: file.to_string(),
            line: lineno,
            message,
        };
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or("");
        let body_field = fields
            .next()
            .ok_or_else(|| malformed("missing tab-separated body".to_string()))?;
        let tail = fields.next();

        match id.chars().next() {
            Some('T') => {
                let surface = tail.unwrap_or("");
                let entity = parse_entity(id, body_field, surface, chars, file, lineno, given)?;
                doc.entities.push(entity);
            }
            Some('E') => {
                doc.events.push(parse_event(id, body_field, &malformed)?);
            }
            Some('M') | Some('A') => {
                let mut parts = body_field.split_whitespace();
                let kind = parts.next().unwrap_or("");
                let target = parts
                    .next()
                    .ok_or_else(|| malformed("modifier without an event target".to_string()))?;
                let kind = match kind {
                    "Speculation" => ModifierKind::Speculation,
                    "Negation" => ModifierKind::Negation,
                    other => {
                        warn!("{file}:{lineno}: skipping modifier of unknown kind `{other}`");
                        continue;
                    }
                };
                doc.modifiers.push(Modifier {
                    id: id.to_string(),
                    kind,
                    event: target.to_string(),
                });
            }
            Some('*') => {
                let mut parts = body_field.split_whitespace();
                match parts.next() {
                    Some("Equiv") => {
                        let members: Vec<String> = parts.map(str::to_string).collect();
                        if members.len() < 2 {
                            return Err(malformed("Equiv with fewer than two members".to_string()));
                        }
                        doc.equivs.push(members);
                    }
                    other => {
                        warn!("{file}:{lineno}: skipping `*` line of kind {other:?}");
                    }
                }
            }
            Some('R') | Some('N') | Some('#') => {
                warn!("{file}:{lineno}: skipping unsupported annotation `{id}`");
            }
            _ => return Err(malformed(format!("unrecognized annotation id `{id}`"))),
        }
    }
    Ok(())
}

fn parse_entity(
    id: &str,
    body: &str,
    surface: &str,
    chars: &[char],
    file: &str,
    lineno: usize,
    given: bool,
) -> Result<Entity> {
    let malformed = |message: String| Error::MalformedLine {
        file: file.to_string(),
        line: lineno,
        message,
    };
    let (entity_type, offsets) = body
        .split_once(' ')
        .ok_or_else(|| malformed(format!("expected `TYPE START END`, got `{body}`")))?;
    let mut spans = Vec::new();
    for frag in offsets.split(';') {
        let mut nums = frag.split_whitespace();
        let start: usize = nums
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed(format!("bad start offset in `{frag}`")))?;
        let end: usize = nums
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed(format!("bad end offset in `{frag}`")))?;
        if start >= end || end > chars.len() {
            return Err(malformed(format!(
                "offsets {start}..{end} out of range for text of length {}",
                chars.len()
            )));
        }
        spans.push((start, end));
    }
    // fragments of a discontinuous mention are joined by one space
    let slice = spans
        .iter()
        .map(|&(s, e)| chars[s..e].iter().collect::<String>())
        .collect::<Vec<_>>()
        .join(" ");
    if slice != surface {
        return Err(Error::OffsetMismatch {
            file: file.to_string(),
            line: lineno,
            surface: surface.to_string(),
            slice,
            start: spans.first().map(|s| s.0).unwrap_or(0),
            end: spans.last().map(|s| s.1).unwrap_or(0),
        });
    }
    Ok(Entity {
        id: id.to_string(),
        entity_type: entity_type.to_string(),
        spans,
        surface: surface.to_string(),
        given,
    })
}

fn parse_event(id: &str, body: &str, malformed: &dyn Fn(String) -> Error) -> Result<Event> {
    let mut tokens = body.split_whitespace();
    let head = tokens
        .next()
        .ok_or_else(|| malformed("empty event definition".to_string()))?;
    let (event_type, trigger) = head
        .split_once(':')
        .ok_or_else(|| malformed(format!("expected `TYPE:TRIGGER`, got `{head}`")))?;
    if !REACTION_TYPES.contains(&event_type) {
        warn!("event {id} has type `{event_type}` outside the known reaction-type vocabulary");
    }
    let mut args = Vec::new();
    for token in tokens {
        let (role, target) = token
            .split_once(':')
            .ok_or_else(|| malformed(format!("expected `Role:Target`, got `{token}`")))?;
        let (base, number) = split_role_number(role);
        if base.is_empty() {
            return Err(malformed(format!("empty role in `{token}`")));
        }
        args.push(EventArg {
            role: base.to_string(),
            number,
            target: target.to_string(),
        });
    }
    Ok(Event {
        id: id.to_string(),
        event_type: event_type.to_string(),
        trigger: trigger.to_string(),
        args,
    })
}

fn split_role_number(role: &str) -> (&str, Option<u32>) {
    let base = role.trim_end_matches(|c: char| c.is_ascii_digit());
    if base.len() == role.len() {
        (role, None)
    } else {
        (base, role[base.len()..].parse().ok())
    }
}

/// Validate references and the acyclicity of event argument chains.
fn cross_link(doc: &StandoffDocument) -> Result<()> {
    let entity_ids: HashSet<&str> = doc.entities.iter().map(|e| e.id.as_str()).collect();
    let event_ids: HashSet<&str> = doc.events.iter().map(|e| e.id.as_str()).collect();

    for ev in &doc.events {
        if !entity_ids.contains(ev.trigger.as_str()) {
            return Err(Error::DanglingReference {
                origin: ev.id.clone(),
                target: ev.trigger.clone(),
            });
        }
        for arg in &ev.args {
            let t = arg.target.as_str();
            if !entity_ids.contains(t) && !event_ids.contains(t) {
                return Err(Error::DanglingReference {
                    origin: ev.id.clone(),
                    target: arg.target.clone(),
                });
            }
        }
    }
    for m in &doc.modifiers {
        if !event_ids.contains(m.event.as_str()) {
            return Err(Error::DanglingReference {
                origin: m.id.clone(),
                target: m.event.clone(),
            });
        }
    }
    for eq in &doc.equivs {
        for member in eq {
            if !entity_ids.contains(member.as_str()) {
                return Err(Error::DanglingReference {
                    origin: "Equiv".to_string(),
                    target: member.clone(),
                });
            }
        }
    }

    // DFS three-coloring over event -> event argument references
    let index: HashMap<&str, usize> = doc
        .events
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.as_str(), i))
        .collect();
    let mut state = vec![0u8; doc.events.len()]; // 0 new, 1 open, 2 done
    fn visit(
        i: usize,
        doc: &StandoffDocument,
        index: &HashMap<&str, usize>,
        state: &mut [u8],
    ) -> Result<()> {
        if state[i] == 1 {
            return Err(Error::EventCycle(doc.events[i].id.clone()));
        }
        if state[i] == 2 {
            return Ok(());
        }
        state[i] = 1;
        for arg in &doc.events[i].args {
            if let Some(&j) = index.get(arg.target.as_str()) {
                visit(j, doc, index, state)?;
            }
        }
        state[i] = 2;
        Ok(())
    }
    for i in 0..doc.events.len() {
        visit(i, doc, &index, &mut state)?;
    }
    Ok(())
}

/// Exact per-type event counts over a corpus.
pub fn event_type_census(docs: &[StandoffDocument]) -> BTreeMap<String, usize> {
    let mut census = BTreeMap::new();
    for doc in docs {
        for ev in &doc.events {
            *census.entry(ev.event_type.clone()).or_insert(0) += 1;
        }
    }
    census
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "mTOR phosphorylates AKT via RAPTOR binding.";

    #[test]
    fn single_entity_line() {
        let doc = parse_standoff("d1", TEXT, "T1\tProtein 0 4\tmTOR\n", "").unwrap();
        assert_eq!(doc.entities.len(), 1);
        let e = &doc.entities[0];
        assert_eq!(e.entity_type, "Protein");
        assert_eq!((e.start(), e.end()), (0, 4));
        assert_eq!(e.surface, "mTOR");
        assert!(e.given);
    }

    #[test]
    fn event_with_trigger_and_theme() {
        let a1 = "T1\tProtein 20 23\tAKT\n";
        let a2 = "T2\tPhosphorylation 5 19\tphosphorylates\nE1\tPhosphorylation:T2 Theme:T1\n";
        let doc = parse_standoff("d1", TEXT, a1, a2).unwrap();
        let ev = doc.event("E1").unwrap();
        assert_eq!(ev.event_type, "Phosphorylation");
        assert_eq!(ev.trigger, "T2");
        assert_eq!(ev.args.len(), 1);
        assert_eq!(ev.args[0].role, "Theme");
        assert_eq!(ev.args[0].target, "T1");
    }

    #[test]
    fn nested_event_resolves() {
        let a1 = "T1\tProtein 20 23\tAKT\nT4\tProtein 0 4\tmTOR\n";
        let a2 = "T2\tPhosphorylation 5 19\tphosphorylates\n\
                  T3\tPositive_regulation 28 34\tRAPTOR\n\
                  E1\tPhosphorylation:T2 Theme:T1\n\
                  E2\tPositive_regulation:T3 Theme:E1 Cause:T4\n";
        let doc = parse_standoff("d1", TEXT, a1, a2).unwrap();
        let e2 = doc.event("E2").unwrap();
        let theme = e2.args_with_role("Theme").next().unwrap();
        assert_eq!(theme, "E1");
        assert!(doc.event(theme).is_some());
    }

    #[test]
    fn numbered_roles_normalized() {
        let a1 = "T1\tProtein 20 23\tAKT\nT2\tProtein 0 4\tmTOR\n";
        let a2 = "T3\tBinding 35 42\tbinding\nE1\tBinding:T3 Theme:T1 Theme2:T2\n";
        let doc = parse_standoff("d1", TEXT, a1, a2).unwrap();
        let ev = doc.event("E1").unwrap();
        let themes: Vec<&str> = ev.args_with_role("Theme").collect();
        assert_eq!(themes, vec!["T1", "T2"]);
        assert_eq!(ev.args[1].number, Some(2));
    }

    #[test]
    fn offset_mismatch_is_an_error() {
        let err = parse_standoff("d1", TEXT, "T1\tProtein 0 4\tAKT\n", "").unwrap_err();
        assert!(matches!(err, Error::OffsetMismatch { .. }));
    }

    #[test]
    fn offsets_are_code_points() {
        let text = "αβ mTOR";
        let doc = parse_standoff("d1", text, "T1\tProtein 3 7\tmTOR\n", "").unwrap();
        assert_eq!(doc.entities[0].surface, "mTOR");
    }

    #[test]
    fn discontinuous_span_joined_by_space() {
        let text = "mTOR complex one binds";
        let doc = parse_standoff("d1", text, "T1\tComplex 0 4;13 16\tmTOR one\n", "").unwrap();
        assert_eq!(doc.entities[0].spans.len(), 2);
    }

    #[test]
    fn dangling_argument_is_an_error() {
        let a2 = "T2\tPhosphorylation 5 19\tphosphorylates\nE1\tPhosphorylation:T2 Theme:T9\n";
        let err = parse_standoff("d1", TEXT, "", a2).unwrap_err();
        assert!(matches!(err, Error::DanglingReference { .. }));
    }

    #[test]
    fn argument_cycle_is_an_error() {
        let a2 = "T2\tRegulation 5 19\tphosphorylates\n\
                  T3\tRegulation 28 34\tRAPTOR\n\
                  E1\tRegulation:T2 Theme:E2\n\
                  E2\tRegulation:T3 Theme:E1\n";
        let err = parse_standoff("d1", TEXT, "", a2).unwrap_err();
        assert!(matches!(err, Error::EventCycle(_)));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_standoff("d1", TEXT, "T1\tProtein zero 4\tmTOR\n", "").unwrap_err();
        match err {
            Error::MalformedLine { file, line, .. } => {
                assert_eq!(file, "a1");
                assert_eq!(line, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn equiv_members_recorded() {
        let a1 = "T1\tProtein 0 4\tmTOR\nT2\tProtein 20 23\tAKT\n";
        let a2 = "*\tEquiv T1 T2\n";
        let doc = parse_standoff("d1", TEXT, a1, a2).unwrap();
        assert_eq!(doc.equivs, vec![vec!["T1".to_string(), "T2".to_string()]]);
    }

    #[test]
    fn census_counts_types() {
        let a2 = "T2\tPhosphorylation 5 19\tphosphorylates\n\
                  T3\tBinding 35 42\tbinding\n\
                  E1\tPhosphorylation:T2\nE2\tPhosphorylation:T2\nE3\tPhosphorylation:T2\n\
                  E4\tBinding:T3\n";
        let doc = parse_standoff("d1", TEXT, "", a2).unwrap();
        let census = event_type_census(std::slice::from_ref(&doc));
        assert_eq!(census.get("Phosphorylation"), Some(&3));
        assert_eq!(census.get("Binding"), Some(&1));
        assert!(event_type_census(&[]).is_empty());
    }

    #[test]
    fn reserialization_round_trips() {
        let a1 = "T1\tProtein 0 4\tmTOR\nT4\tProtein 20 23\tAKT\n";
        let a2 = "T2\tPhosphorylation 5 19\tphosphorylates\n\
                  E1\tPhosphorylation:T2 Theme:T4 Cause:T1\n\
                  M1\tNegation E1\n\
                  *\tEquiv T1 T4\n";
        let doc = parse_standoff("d1", TEXT, a1, a2).unwrap();
        assert_eq!(doc.write_a1(), a1);
        let expected: String = a2
            .lines()
            .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n");
        let written: String = doc
            .write_a2()
            .lines()
            .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n");
        assert_eq!(written, expected);
    }
}
