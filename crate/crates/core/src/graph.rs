//! Labeled undirected simple graphs and their two-colored variant.
//!
//! Vertices are kept in insertion order; every deterministic tie-break in the
//! crate refers to this order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};

#[derive(Clone, Default)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph on `n` vertices labeled `"0"`, `"1"`, ... with no edges.
    pub fn with_numbered_vertices(n: usize) -> Self {
        let mut g = Self::new();
        for i in 0..n {
            g.add_vertex(i.to_string()).expect("numbered labels are unique");
        }
        g
    }

    pub fn from_edges<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(v.as_ref())?;
        }
        for (a, b) in edges {
            g.add_edge_by_label(a.as_ref(), b.as_ref())?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> Result<usize> {
        let label = label.into();
        if self.index.contains_key(&label) {
            return input(format!("duplicate vertex label {label:?}"));
        }
        let id = self.labels.len();
        self.index.insert(label.clone(), id);
        self.labels.push(label);
        self.adj.push(Vec::new());
        Ok(id)
    }

    /// Adds the edge `{u, v}`. Loops and duplicate edges are rejected.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n() || v >= self.n() {
            return input(format!("edge endpoint out of range ({u}, {v})"));
        }
        if u == v {
            return input(format!("self-loop on {:?}", self.labels[u]));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => input(format!(
                "duplicate edge {{{:?}, {:?}}}",
                self.labels[u], self.labels[v]
            )),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edge_count += 1;
                Ok(())
            }
        }
    }

    pub fn add_edge_by_label(&mut self, a: &str, b: &str) -> Result<()> {
        let u = self.require(a)?;
        let v = self.require(b)?;
        self.add_edge(u, v)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn m(&self) -> usize {
        self.edge_count
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::Input(format!("unknown vertex {label:?}")))
    }

    /// Sorted neighbor lists indexed by vertex.
    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn induced_subgraph<S: AsRef<str>>(&self, w: &[S]) -> Result<Graph> {
        let ids = w
            .iter()
            .map(|s| self.require(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.induced_by_indices(&ids)
    }

    pub fn induced_by_indices(&self, ids: &[usize]) -> Result<Graph> {
        let mut sub = Graph::new();
        for &v in ids {
            if v >= self.n() {
                return input(format!("vertex index {v} out of range"));
            }
            sub.add_vertex(self.labels[v].clone())?;
        }
        for (i, &u) in ids.iter().enumerate() {
            for (j, &v) in ids.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    sub.add_edge(i, j)?;
                }
            }
        }
        Ok(sub)
    }

    /// Connected components, each sorted, listed by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn to_json_value(&self) -> GraphJson {
        GraphJson {
            vertices: self.labels.clone(),
            edges: self
                .edges()
                .map(|(u, v)| [self.labels[u].clone(), self.labels[v].clone()])
                .collect(),
            colors: None,
        }
    }
}

impl PartialEq for Graph {
    /// Equal labels in equal order and equal edge sets.
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.adj == other.adj
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<_> = self
            .edges()
            .map(|(u, v)| format!("{}-{}", self.labels[u], self.labels[v]))
            .collect();
        f.debug_struct("Graph")
            .field("vertices", &self.labels)
            .field("edges", &edges)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    /// Represented by two intervals.
    White,
    /// Represented by a single interval.
    Black,
}

impl Color {
    pub fn interval_count(self) -> usize {
        match self {
            Color::White => 2,
            Color::Black => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    pub graph: Graph,
    colors: Vec<Color>,
}

impl ColoredGraph {
    pub fn new(graph: Graph, colors: Vec<Color>) -> Result<Self> {
        if colors.len() != graph.n() {
            return input(format!(
                "coloring covers {} of {} vertices",
                colors.len(),
                graph.n()
            ));
        }
        Ok(Self { graph, colors })
    }

    pub fn uniform(graph: Graph, color: Color) -> Self {
        let colors = vec![color; graph.n()];
        Self { graph, colors }
    }

    pub fn color(&self, v: usize) -> Color {
        self.colors[v]
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn set_color(&mut self, v: usize, c: Color) {
        self.colors[v] = c;
    }

    pub fn whites(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.graph.n()).filter(|&v| self.colors[v] == Color::White)
    }

    pub fn blacks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.graph.n()).filter(|&v| self.colors[v] == Color::Black)
    }

    /// Interval count per vertex label: two for white, one for black.
    pub fn profile(&self) -> BTreeMap<String, usize> {
        self.graph
            .labels()
            .iter()
            .zip(&self.colors)
            .map(|(l, c)| (l.clone(), c.interval_count()))
            .collect()
    }

    pub fn to_json_value(&self) -> GraphJson {
        let mut json = self.graph.to_json_value();
        json.colors = Some(
            self.graph
                .labels()
                .iter()
                .cloned()
                .zip(self.colors.iter().copied())
                .collect(),
        );
        json
    }
}

/// Wire form: `{"vertices": [...], "edges": [[a, b], ...], "colors": {...}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<BTreeMap<String, Color>>,
}

impl GraphJson {
    pub fn to_graph(&self) -> Result<Graph> {
        let mut g = Graph::new();
        for v in &self.vertices {
            g.add_vertex(v.clone())?;
        }
        for [a, b] in &self.edges {
            g.add_edge_by_label(a, b)?;
        }
        Ok(g)
    }

    /// Colored view; a missing `colors` key colors every vertex white.
    pub fn to_colored(&self) -> Result<ColoredGraph> {
        let g = self.to_graph()?;
        let Some(map) = &self.colors else {
            return Ok(ColoredGraph::uniform(g, Color::White));
        };
        if map.len() != g.n() {
            return input("colors must cover exactly the vertex set");
        }
        let colors = g
            .labels()
            .iter()
            .map(|l| {
                map.get(l)
                    .copied()
                    .ok_or_else(|| Error::Input(format!("no color for vertex {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ColoredGraph::new(g, colors)
    }
}

pub fn parse_graph_json(text: &str) -> Result<GraphJson> {
    Ok(serde_json::from_str(text)?)
}
