//! OBO 1.2 flat-file loading and is_a reachability over the SBO
//! reaction-type hierarchy.
//!
//! Only `[Term]` stanzas with `id`, `name` and `is_a` tags are read;
//! obsolete terms are excluded. The ancestor closure of every term is
//! precomputed as a bitset at load time because matching runs millions
//! of signature comparisons.

use std::collections::HashMap;

use log::{debug, warn};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct OntologyGraph {
    ids: Vec<String>,
    names: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    /// `ancestors[i]` holds the reflexive transitive is_a closure of
    /// term `i`, packed 64 terms per word.
    ancestors: Vec<Vec<u64>>,
    words: usize,
}

impl OntologyGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.index.contains_key(term)
    }

    pub fn term_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn name_of(&self, term: &str) -> Option<&str> {
        self.index.get(term).map(|&i| self.names[i].as_str())
    }

    /// First term whose name equals `name` exactly (case-insensitive).
    pub fn term_by_name(&self, name: &str) -> Option<&str> {
        let wanted = name.to_lowercase();
        self.ids
            .iter()
            .zip(&self.names)
            .find(|(_, n)| n.to_lowercase() == wanted)
            .map(|(id, _)| id.as_str())
    }

    /// Direct is_a parents of a term.
    pub fn parents_of(&self, term: &str) -> Vec<&str> {
        match self.index.get(term) {
            Some(&i) => self.parents[i]
                .iter()
                .map(|&p| self.ids[p].as_str())
                .collect(),
            None => Vec::new(),
        }
    }

    fn bit(&self, row: usize, col: usize) -> bool {
        self.ancestors[row][col / 64] & (1u64 << (col % 64)) != 0
    }

    /// Reflexive-symmetric closure of ancestry: true iff the terms are
    /// identical, or one is an is_a ancestor of the other. Unknown,
    /// non-identical terms never relate.
    pub fn related_is_a(&self, term_x: &str, term_y: &str) -> bool {
        if term_x == term_y {
            return true;
        }
        let (x, y) = match (self.index.get(term_x), self.index.get(term_y)) {
            (Some(&x), Some(&y)) => (x, y),
            _ => {
                debug!("is_a query on unknown term pair ({term_x}, {term_y})");
                return false;
            }
        };
        self.bit(x, y) || self.bit(y, x)
    }
}

/// Parse an OBO 1.2 flat file into an ontology graph.
pub fn load_obo(input: &str) -> Result<OntologyGraph> {
    struct Stanza {
        id: Option<String>,
        name: Option<String>,
        is_a: Vec<String>,
        obsolete: bool,
        line: usize,
        is_term: bool,
    }

    let mut stanzas: Vec<Stanza> = Vec::new();
    let mut current: Option<Stanza> = None;

    for (lineno, raw) in input.lines().enumerate() {
        let lineno = lineno + 1;
        // strip trailing comments ("! ...") outside of quoted defs
        let line = raw.trim();
        if line.is_empty() || line.starts_with('!') {
            continue;
        }
        if line.starts_with('[') {
            if let Some(s) = current.take() {
                stanzas.push(s);
            }
            current = Some(Stanza {
                id: None,
                name: None,
                is_a: Vec::new(),
                obsolete: false,
                line: lineno,
                is_term: line == "[Term]",
            });
            continue;
        }
        let Some(stanza) = current.as_mut() else {
            continue; // header block
        };
        if !stanza.is_term {
            continue;
        }
        let Some((tag, value)) = line.split_once(':') else {
            return Err(Error::MalformedStanza {
                line: lineno,
                message: format!("expected `tag: value`, got `{line}`"),
            });
        };
        let value = value.trim();
        match tag.trim() {
            "id" => stanza.id = Some(value.to_string()),
            "name" => stanza.name = Some(value.to_string()),
            "is_a" => {
                // "SBO:0000182 ! conversion"
                let target = value.split_whitespace().next().unwrap_or("");
                if target.is_empty() {
                    return Err(Error::MalformedStanza {
                        line: lineno,
                        message: "is_a without a target".to_string(),
                    });
                }
                stanza.is_a.push(target.to_string());
            }
            "is_obsolete" => {
                stanza.obsolete = value.split_whitespace().next() == Some("true");
            }
            _ => {}
        }
    }
    if let Some(s) = current.take() {
        stanzas.push(s);
    }

    let mut graph = OntologyGraph::default();
    let mut edges: Vec<(String, String)> = Vec::new();
    for s in stanzas.into_iter().filter(|s| s.is_term && !s.obsolete) {
        let id = s.id.ok_or(Error::MalformedStanza {
            line: s.line,
            message: "[Term] stanza without an id".to_string(),
        })?;
        if graph.index.contains_key(&id) {
            return Err(Error::MalformedStanza {
                line: s.line,
                message: format!("duplicate term id `{id}`"),
            });
        }
        graph.index.insert(id.clone(), graph.ids.len());
        graph.ids.push(id.clone());
        graph.names.push(s.name.unwrap_or_default());
        graph.parents.push(Vec::new());
        for parent in s.is_a {
            edges.push((id.clone(), parent));
        }
    }

    for (child, parent) in edges {
        let c = graph.index[&child];
        match graph.index.get(&parent) {
            Some(&p) => graph.parents[c].push(p),
            // parent may be obsolete or outside the shipped subset
            None => warn!("dropping is_a edge {child} -> {parent}: target not loaded"),
        }
    }

    build_closure(&mut graph)?;
    Ok(graph)
}

/// Topological-order DP over the parent DAG; detects cycles.
fn build_closure(graph: &mut OntologyGraph) -> Result<()> {
    let n = graph.ids.len();
    let words = n.div_ceil(64).max(1);
    graph.words = words;
    graph.ancestors = vec![vec![0u64; words]; n];

    // children adjacency + in-degrees over the child->parent edges,
    // processed parents-first
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pending: Vec<usize> = vec![0; n];
    for (c, ps) in graph.parents.iter().enumerate() {
        pending[c] = ps.len();
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
    let mut done = 0;
    while let Some(t) = queue.pop() {
        done += 1;
        graph.ancestors[t][t / 64] |= 1u64 << (t % 64);
        let parent_rows: Vec<Vec<u64>> = graph.parents[t]
            .iter()
            .map(|&p| graph.ancestors[p].clone())
            .collect();
        for row in parent_rows {
            for (w, bits) in row.into_iter().enumerate() {
                graph.ancestors[t][w] |= bits;
            }
        }
        for &c in &children[t] {
            pending[c] -= 1;
            if pending[c] == 0 {
                queue.push(c);
            }
        }
    }
    if done != n {
        let culprit = (0..n)
            .find(|&i| pending[i] > 0)
            .map(|i| graph.ids[i].clone())
            .unwrap_or_default();
        return Err(Error::OntologyCycle(culprit));
    }
    Ok(())
}
