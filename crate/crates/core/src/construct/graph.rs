//! Simple graphs and the two-column independent-set gadget.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::model::{FreshNames, PreferenceMatrix};

/// Undirected graph without loops or parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &edges {
            let bad = |msg: String| Error::Parse { line: 0, message: msg };
            if u >= vertices.len() || v >= vertices.len() {
                return Err(bad(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(bad(format!("self-loop at {}", vertices[u])));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(bad(format!("parallel edge {} {}", vertices[u], vertices[v])));
            }
        }
        Ok(SimpleGraph { vertices, edges })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !std::mem::replace(&mut seen[v], true) {
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Edge list: one `u v` pair per line, `#` comments allowed. Vertices are
/// the tokens that appear.
pub fn parse_edge_list(text: &str) -> Result<SimpleGraph> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_ascii_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected two vertices, got {line:?}"),
            });
        }
        let mut id = |name: &str| {
            *index.entry(name.to_string()).or_insert_with(|| {
                vertices.push(name.to_string());
                vertices.len() - 1
            })
        };
        let (u, v) = (id(parts[0]), id(parts[1]));
        edges.push((u, v));
    }
    SimpleGraph::new(vertices, edges)
}

/// Two rows `(e, u)` and `(e, v)` for every edge `e = uv`.
pub fn reduce_independent_set(graph: &SimpleGraph) -> Result<PreferenceMatrix> {
    if !graph.is_connected() {
        return Err(Error::GraphNotConnected);
    }
    if graph.edges().is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let mut fresh = FreshNames::new(std::iter::empty());
    for v in graph.vertices() {
        fresh.reserve(v);
    }
    let mut rows = Vec::new();
    for &(u, v) in graph.edges() {
        let (a, b) = (&graph.vertices()[u], &graph.vertices()[v]);
        let e = fresh.reserve(&format!("{a}-{b}"));
        rows.push(vec![e.as_str().to_string(), a.clone()]);
        rows.push(vec![e.as_str().to_string(), b.clone()]);
    }
    PreferenceMatrix::from_rows(rows)
}

/// Number of independent sets, the empty set included.
pub fn count_independent_sets(graph: &SimpleGraph) -> u64 {
    let n = graph.vertices().len();
    assert!(n < 64, "exhaustive enumeration limited to 63 vertices");
    let masks: Vec<u64> = graph
        .edges()
        .iter()
        .map(|&(u, v)| (1u64 << u) | (1u64 << v))
        .collect();
    (0u64..1 << n)
        .filter(|s| masks.iter().all(|&e| s & e != e))
        .count() as u64
}
