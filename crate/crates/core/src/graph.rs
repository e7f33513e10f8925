//! Simple undirected graphs with integer vertex labels.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Vertex label. Generated graphs use dense labels `0..n`, parsed graphs keep
/// whatever labels the input declared.
pub type Vertex = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("vertex {0} is not in the graph")]
    MissingVertex(Vertex),
    #[error("vertex {0} already exists")]
    DuplicateVertex(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed token `{token}`")]
    Malformed { line: usize, token: String },
    #[error("line {line}: negative label `{token}`")]
    NegativeLabel { line: usize, token: String },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: Vertex },
    #[error("line {line}: expected `u v` or a lone `u`")]
    Arity { line: usize },
    #[error("input declares no vertices")]
    Empty,
}

/// A simple undirected graph. Equality compares vertex sets and adjacency,
/// respecting labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph on the given vertices with no edges.
    pub fn with_vertices(vertices: impl IntoIterator<Item = Vertex>) -> Self {
        Self {
            adj: vertices.into_iter().map(|v| (v, BTreeSet::new())).collect(),
        }
    }

    /// Builds a graph from an edge list, adding endpoints as needed.
    pub fn from_edges(
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::new();
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: u32) -> Self {
        let mut g = Self::with_vertices(0..n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert_edge_unchecked(u, v);
            }
        }
        g
    }

    pub fn path(n: u32) -> Self {
        let mut g = Self::with_vertices(0..n);
        for u in 1..n {
            g.insert_edge_unchecked(u - 1, u);
        }
        g
    }

    pub fn cycle(n: u32) -> Self {
        let mut g = Self::path(n);
        if n > 2 {
            g.insert_edge_unchecked(0, n - 1);
        }
        g
    }

    /// `K_{a,b}` with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: u32, b: u32) -> Self {
        let mut g = Self::with_vertices(0..a + b);
        for u in 0..a {
            for v in a..a + b {
                g.insert_edge_unchecked(u, v);
            }
        }
        g
    }

    /// Returns `true` if the vertex was new.
    pub fn add_vertex(&mut self, v: Vertex) -> bool {
        if self.adj.contains_key(&v) {
            return false;
        }
        self.adj.insert(v, BTreeSet::new());
        true
    }

    /// Adds `u-v`, creating endpoints. Returns `true` if the edge was new.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<bool, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(self.insert_edge_unchecked(u, v))
    }

    fn insert_edge_unchecked(&mut self, u: Vertex, v: Vertex) -> bool {
        let fresh = self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
        fresh
    }

    pub fn remove_vertex(&mut self, v: Vertex) -> Result<(), GraphError> {
        let nbrs = self.adj.remove(&v).ok_or(GraphError::MissingVertex(v))?;
        for w in nbrs {
            if let Some(set) = self.adj.get_mut(&w) {
                set.remove(&v);
            }
        }
        Ok(())
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(&u).is_some_and(|s| s.contains(&v))
    }

    /// Neighbors of `v`; empty if `v` is absent.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.get(&v).into_iter().flatten().copied()
    }

    pub fn neighbor_set(&self, v: Vertex) -> Option<&BTreeSet<Vertex>> {
        self.adj.get(&v)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    /// Vertices in ascending order.
    pub fn vertices(&self) -> impl ExactSizeIterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, set)| set.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn induced_subgraph(&self, keep: &BTreeSet<Vertex>) -> Graph {
        let adj = self
            .adj
            .iter()
            .filter(|(v, _)| keep.contains(v))
            .map(|(&v, set)| (v, set.intersection(keep).copied().collect()))
            .collect();
        Graph { adj }
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.adj.keys().next().copied() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.adj.len()
    }

    /// Adds `new` as a one-vertex extension of `anchor`.
    pub fn extend(
        &mut self,
        kind: ExtensionKind,
        new: Vertex,
        anchor: Vertex,
    ) -> Result<(), GraphError> {
        if !self.contains(anchor) {
            return Err(GraphError::MissingVertex(anchor));
        }
        if self.contains(new) {
            return Err(GraphError::DuplicateVertex(new));
        }
        let nbrs: Vec<Vertex> = match kind {
            ExtensionKind::Pendant => vec![anchor],
            ExtensionKind::TrueTwin => self.neighbors(anchor).chain([anchor]).collect(),
            ExtensionKind::FalseTwin => self.neighbors(anchor).collect(),
        };
        self.add_vertex(new);
        for w in nbrs {
            self.insert_edge_unchecked(new, w);
        }
        Ok(())
    }

    /// All-pairs hop distances by breadth-first search.
    pub fn distances(&self) -> DistanceMatrix {
        let index: Vec<Vertex> = self.vertices().collect();
        let n = index.len();
        let pos: BTreeMap<Vertex, usize> = index.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let nbrs: Vec<Vec<usize>> = index
            .iter()
            .map(|&v| self.neighbors(v).map(|w| pos[&w]).collect())
            .collect();
        let mut dist = vec![DistanceMatrix::UNREACHABLE; n * n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            let row = &mut dist[s * n..(s + 1) * n];
            row[s] = 0;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &w in &nbrs[v] {
                    if row[w] == DistanceMatrix::UNREACHABLE {
                        row[w] = row[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        DistanceMatrix { index, dist }
    }

    /// Edge-list text: one `u v` line per edge, isolated vertices on their own line.
    pub fn to_edge_list(&self) -> String {
        self.to_string()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphExport::from(self))
            .expect("graph export is serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let export: GraphExport = serde_json::from_str(text)?;
        let mut g = Graph::with_vertices(export.vertices);
        for [u, v] in export.edges {
            g.add_edge(u, v).map_err(serde::de::Error::custom)?;
        }
        Ok(g)
    }
}

/// Label-respecting equality: same vertex set, same adjacency.
pub fn graph_equals(a: &Graph, b: &Graph) -> bool {
    a == b
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (&v, set) in &self.adj {
            if set.is_empty() {
                writeln!(f, "{v}")?;
            }
        }
        for (u, v) in self.edges() {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

impl FromStr for Graph {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_graph(text)
    }
}

/// Parses the edge-list format: `u v` per line, a lone `u` for an isolated
/// vertex, `#` comments and blank lines ignored. Duplicate edges collapse.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut g = Graph::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let labels = body
            .split_whitespace()
            .map(|tok| parse_label(tok, line))
            .collect::<Result<Vec<_>, _>>()?;
        match labels[..] {
            [u] => {
                g.add_vertex(u);
            }
            [u, v] if u == v => return Err(ParseError::SelfLoop { line, vertex: u }),
            [u, v] => {
                g.insert_edge_unchecked(u, v);
            }
            _ => return Err(ParseError::Arity { line }),
        }
    }
    if g.vertex_count() == 0 {
        return Err(ParseError::Empty);
    }
    Ok(g)
}

fn parse_label(tok: &str, line: usize) -> Result<Vertex, ParseError> {
    if tok.starts_with('-') && tok[1..].bytes().all(|b| b.is_ascii_digit()) && tok.len() > 1 {
        return Err(ParseError::NegativeLabel {
            line,
            token: tok.to_owned(),
        });
    }
    tok.parse().map_err(|_| ParseError::Malformed {
        line,
        token: tok.to_owned(),
    })
}

/// Structured export with `vertices` and `edges` arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphExport {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<[Vertex; 2]>,
}

impl From<&Graph> for GraphExport {
    fn from(g: &Graph) -> Self {
        Self {
            vertices: g.vertices().collect(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
        }
    }
}

/// Hop-count matrix indexed by vertex label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    index: Vec<Vertex>,
    dist: Vec<u32>,
}

impl DistanceMatrix {
    /// Marker stored for pairs in different components.
    pub const UNREACHABLE: u32 = u32::MAX;

    /// `None` when either vertex is absent or the pair is disconnected.
    pub fn get(&self, u: Vertex, v: Vertex) -> Option<u32> {
        let i = self.index.binary_search(&u).ok()?;
        let j = self.index.binary_search(&v).ok()?;
        let d = self.dist[i * self.index.len() + j];
        (d != Self::UNREACHABLE).then_some(d)
    }

    /// Raw entry, `UNREACHABLE` for disconnected pairs.
    pub fn raw(&self, u: Vertex, v: Vertex) -> u32 {
        self.get(u, v).unwrap_or(Self::UNREACHABLE)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.index
    }
}

/// One-vertex extension kinds that grow a distance-hereditary graph from `K2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtensionKind {
    Pendant,
    TrueTwin,
    FalseTwin,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_path_and_collapses_duplicates() {
        let p3 = parse_graph("0 1\n1 2").unwrap();
        assert_eq!(p3, Graph::path(3));
        let k2 = parse_graph("0 1\n0 1").unwrap();
        assert_eq!(k2.edge_count(), 1);
        assert_eq!(k2, Graph::complete(2));
    }

    #[test]
    fn parse_errors_name_the_line() {
        assert_eq!(
            parse_graph("0 0"),
            Err(ParseError::SelfLoop { line: 1, vertex: 0 })
        );
        assert!(matches!(
            parse_graph("0 1\n1 x"),
            Err(ParseError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("# c\n-3 1"),
            Err(ParseError::NegativeLabel { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("1 2 3"),
            Err(ParseError::Arity { line: 1 })
        ));
        assert_eq!(parse_graph("\n# nothing\n"), Err(ParseError::Empty));
        assert_eq!(
            parse_graph("0 0").unwrap_err().to_string(),
            "line 1: self-loop on vertex 0"
        );
    }

    #[test]
    fn isolated_vertices_and_comments() {
        let g = parse_graph("# header\n7\n3 5\n").unwrap();
        assert_eq!(g.vertices().collect::<Vec<_>>(), vec![3, 5, 7]);
        assert_eq!(g.degree(7), 0);
        assert_eq!(parse_graph(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn equality_respects_labels() {
        assert!(graph_equals(&Graph::complete(3), &Graph::complete(3)));
        let a = Graph::from_edges([(0, 1), (1, 2)]).unwrap();
        let b = Graph::from_edges([(1, 0), (0, 2)]).unwrap();
        assert!(!graph_equals(&a, &b));
        let c = Graph::from_edges([(0, 2)]).unwrap();
        assert!(!graph_equals(&Graph::complete(2), &c));
    }

    #[test]
    fn distances_on_small_graphs() {
        let d = Graph::path(3).distances();
        assert_eq!(d.get(0, 2), Some(2));
        let k3 = Graph::complete(3).distances();
        for u in 0..3 {
            for v in 0..3 {
                assert_eq!(k3.get(u, v), Some(u32::from(u != v)));
            }
        }
        let two = Graph::from_edges([(0, 1), (2, 3)]).unwrap().distances();
        assert_eq!(two.get(0, 3), None);
        assert_eq!(two.raw(1, 2), DistanceMatrix::UNREACHABLE);
    }

    #[test]
    fn json_export_uses_vertices_and_edges() {
        let g = Graph::path(3);
        let json = g.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["vertices"], serde_json::json!([0, 1, 2]));
        assert_eq!(value["edges"], serde_json::json!([[0, 1], [1, 2]]));
        assert_eq!(Graph::from_json(&json).unwrap(), g);
    }

    #[test]
    fn extensions_follow_their_definitions() {
        let mut g = Graph::path(3);
        g.extend(ExtensionKind::TrueTwin, 3, 1).unwrap();
        assert_eq!(g.neighbors(3).collect::<Vec<_>>(), vec![0, 1, 2]);
        g.extend(ExtensionKind::FalseTwin, 4, 0).unwrap();
        assert_eq!(g.neighbors(4).collect::<Vec<_>>(), vec![1, 3]);
        g.extend(ExtensionKind::Pendant, 5, 4).unwrap();
        assert_eq!(g.neighbors(5).collect::<Vec<_>>(), vec![4]);
        assert_eq!(
            g.extend(ExtensionKind::Pendant, 6, 9),
            Err(GraphError::MissingVertex(9))
        );
        assert_eq!(
            g.extend(ExtensionKind::Pendant, 5, 0),
            Err(GraphError::DuplicateVertex(5))
        );
    }
}
