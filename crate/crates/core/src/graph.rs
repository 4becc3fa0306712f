//! Undirected simple graphs in compressed sparse row form.
//!
//! Every undirected edge `{u, v}` is stored twice in the adjacency arrays (once
//! per endpoint) and once as a canonical edge `(min, max)`. Each adjacency slot
//! records the index of its canonical edge so per-edge data can be looked up
//! while walking neighbor lists.

use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: expected 2 tokens, found {found}")]
    Parse { line: usize, found: usize },
    #[error("no edges")]
    NoEdges,
    #[error("node {node} out of range (node count {node_count})")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("({u}, {v}) is not an edge")]
    NotAnEdge { u: NodeId, v: NodeId },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalEdge {
    pub u: NodeId,
    pub v: NodeId,
}

impl CanonicalEdge {
    /// Orders the endpoints; `None` for a self-loop.
    pub fn new(a: NodeId, b: NodeId) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self { u: a, v: b }),
            std::cmp::Ordering::Greater => Some(Self { u: b, v: a }),
            std::cmp::Ordering::Equal => None,
        }
    }
}

/// Result of [`Graph::neighborhood`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighborhood {
    pub open: Vec<NodeId>,
    pub closed: Vec<NodeId>,
    pub degree: usize,
    pub closed_degree: usize,
}

/// Immutable undirected simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    slot_edge: Vec<usize>,
    edges: Vec<CanonicalEdge>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph over `node_count` nodes. Self-loops are dropped and
    /// duplicate or reversed pairs collapse to a single edge.
    pub fn from_edges<I>(node_count: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            for node in [a, b] {
                if node >= node_count {
                    return Err(GraphError::NodeOutOfRange { node, node_count });
                }
            }
            if let Some(e) = CanonicalEdge::new(a, b) {
                edges.push(e);
            }
        }
        edges.sort_unstable();
        edges.dedup();

        let mut degree = vec![0usize; node_count];
        for e in &edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let total = *offsets.last().unwrap();
        let mut targets = vec![0; total];
        let mut slot_edge = vec![0; total];
        let mut cursor = offsets[..node_count].to_vec();
        // Edges sorted by (u, v) fill each list with its smaller neighbors
        // (ascending) followed by its larger ones (ascending).
        for (idx, e) in edges.iter().enumerate() {
            targets[cursor[e.u]] = e.v;
            slot_edge[cursor[e.u]] = idx;
            cursor[e.u] += 1;
            targets[cursor[e.v]] = e.u;
            slot_edge[cursor[e.v]] = idx;
            cursor[e.v] += 1;
        }

        Ok(Self {
            offsets,
            targets,
            slot_edge,
            edges,
            labels: None,
        })
    }

    /// Reads a whitespace-separated edge list. Labels are remapped to dense ids
    /// in order of first appearance; lines starting with `#` or `%` are skipped.
    pub fn load_edge_list<R: BufRead>(source: R) -> Result<Self, GraphError> {
        let mut ids: HashMap<String, NodeId> = HashMap::new();
        let mut labels: Vec<String> = Vec::new();
        let mut pairs = Vec::new();
        for (lineno, line) in source.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(GraphError::Parse {
                    line: lineno + 1,
                    found: tokens.len(),
                });
            }
            let mut intern = |tok: &str| -> NodeId {
                if let Some(&id) = ids.get(tok) {
                    return id;
                }
                let id = labels.len();
                labels.push(tok.to_string());
                ids.insert(tok.to_string(), id);
                id
            };
            let a = intern(tokens[0]);
            let b = intern(tokens[1]);
            pairs.push((a, b));
        }
        if pairs.is_empty() {
            return Err(GraphError::NoEdges);
        }
        let mut graph = Self::from_edges(labels.len(), pairs)?;
        graph.labels = Some(labels);
        Ok(graph)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.node_count(), "one label per node");
        self.labels = Some(labels);
        self
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edges in ascending `(u, v)` order; the position of an edge in
    /// this slice is its edge index.
    pub fn edges(&self) -> &[CanonicalEdge] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Edge indices parallel to [`Graph::neighbors`].
    #[inline]
    pub fn neighbor_edges(&self, u: NodeId) -> &[usize] {
        &self.slot_edge[self.offsets[u]..self.offsets[u + 1]]
    }

    #[inline]
    pub fn degree(&self, u: NodeId) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// The label of `u`: the original token for loaded graphs, the decimal id
    /// otherwise.
    pub fn label(&self, u: NodeId) -> String {
        match &self.labels {
            Some(labels) => labels[u].clone(),
            None => u.to_string(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.node_count()).map(|u| self.label(u)).collect()
    }

    fn check_node(&self, u: NodeId) -> Result<(), GraphError> {
        if u >= self.node_count() {
            return Err(GraphError::NodeOutOfRange {
                node: u,
                node_count: self.node_count(),
            });
        }
        Ok(())
    }

    pub fn neighborhood(&self, u: NodeId) -> Result<Neighborhood, GraphError> {
        self.check_node(u)?;
        let open = self.neighbors(u).to_vec();
        let pos = open.partition_point(|&x| x < u);
        let mut closed = open.clone();
        closed.insert(pos, u);
        Ok(Neighborhood {
            degree: open.len(),
            closed_degree: open.len() + 1,
            open,
            closed,
        })
    }

    /// Index of edge `{u, v}`, if present.
    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        if u >= self.node_count() || v >= self.node_count() {
            return None;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a)
            .binary_search(&b)
            .ok()
            .map(|i| self.neighbor_edges(a)[i])
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// `N[u] ∩ N[v]` for an edge `{u, v}`, sorted ascending.
    pub fn common_closed_neighbors(&self, e: CanonicalEdge) -> Result<Vec<NodeId>, GraphError> {
        self.check_node(e.u)?;
        self.check_node(e.v)?;
        if !self.has_edge(e.u, e.v) {
            return Err(GraphError::NotAnEdge { u: e.u, v: e.v });
        }
        let mut out = Vec::new();
        let (a, b) = (self.neighbors(e.u), self.neighbors(e.v));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        // u ∈ N(v) and v ∈ N(u), so the closed intersection adds both endpoints.
        for x in [e.u, e.v] {
            let pos = out.partition_point(|&y| y < x);
            out.insert(pos, x);
        }
        Ok(out)
    }
}
