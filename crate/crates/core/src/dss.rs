//! Per-edge structural similarity: the local cosine baseline and the Dynamic
//! Structural Similarity (DSS) solved by synchronous fixed-point iteration.
//!
//! One DSS step maps the previous iterate `s` to
//!
//! ```text
//!            Σ_{x ∈ N[u] ∩ N[v]} s(u,x) + s(v,x)
//! s'(u,v) = -------------------------------------
//!           sqrt( Σ_{x ∈ N(u)} s(u,x) · Σ_{y ∈ N(v)} s(v,y) )
//! ```
//!
//! with `s(x,x) = 1` for every node and `s = 1` on every edge before the first
//! step. All edges advance together from the same previous iterate, so the
//! result does not depend on edge order or on the number of worker threads.
//!
//! Every floating-point sum is taken over its terms in ascending order. The
//! value computed for an edge therefore depends only on the multiset of its
//! terms, and graph automorphisms map similarities onto bit-identical values.
//! The hierarchical merge relies on this for exact tie detection.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::graph::{Graph, NodeId};

/// Number of fixed-point steps used when the caller does not choose one.
pub const DEFAULT_ITERATIONS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityKind {
    #[default]
    Dss,
    Cosine,
}

/// One non-negative value per canonical edge, indexed like [`Graph::edges`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMap {
    values: Vec<f64>,
    iterations: usize,
}

impl SimilarityMap {
    /// Wraps raw per-edge values. Panics on negative or non-finite entries.
    pub fn from_values(values: Vec<f64>, iterations: usize) -> Self {
        assert!(
            values.iter().all(|v| v.is_finite() && *v >= 0.0),
            "similarities must be finite and non-negative"
        );
        Self { values, iterations }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Fixed-point steps that produced this map (0 for the cosine baseline).
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn edge(&self, edge_index: usize) -> f64 {
        self.values[edge_index]
    }

    /// Similarity of `u` and `v`; zero when they are not adjacent.
    pub fn between(&self, g: &Graph, u: NodeId, v: NodeId) -> f64 {
        g.edge_index(u, v).map_or(0.0, |e| self.values[e])
    }

    /// Multiplies every value by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0 && factor.is_finite());
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            iterations: self.iterations,
        }
    }

    /// Writes `u v value` per edge using node labels and 9 significant digits.
    pub fn dump<W: Write>(&self, g: &Graph, mut out: W) -> io::Result<()> {
        for (e, value) in g.edges().iter().zip(&self.values) {
            writeln!(
                out,
                "{} {} {}",
                g.label(e.u),
                g.label(e.v),
                significant(*value, 9)
            )?;
        }
        Ok(())
    }
}

fn significant(value: f64, digits: usize) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let exponent = value.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    format!("{value:.decimals$}")
}

fn sorted_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

/// Cosine similarity over closed neighborhoods:
/// `|N[u] ∩ N[v]| / sqrt(d[u] · d[v])`, in `(0, 1]`.
pub fn local_cosine(g: &Graph) -> SimilarityMap {
    let values = g
        .edges()
        .par_iter()
        .map(|e| {
            let shared = count_common(g.neighbors(e.u), g.neighbors(e.v)) + 2;
            let du = (g.degree(e.u) + 1) as f64;
            let dv = (g.degree(e.v) + 1) as f64;
            shared as f64 / (du * dv).sqrt()
        })
        .collect();
    SimilarityMap {
        values,
        iterations: 0,
    }
}

fn count_common(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// The `iterations`-th DSS iterate. Runs on the current rayon pool; see
/// [`crate::with_threads`] to pin the worker count.
pub fn dss_fixed_point(g: &Graph, iterations: usize) -> SimilarityMap {
    let mut current = vec![1.0; g.edge_count()];
    for _ in 0..iterations {
        current = dss_step(g, &current);
    }
    SimilarityMap {
        values: current,
        iterations,
    }
}

fn dss_step(g: &Graph, prev: &[f64]) -> Vec<f64> {
    let node_sums: Vec<f64> = (0..g.node_count())
        .into_par_iter()
        .map_init(Vec::new, |buf, u| {
            buf.clear();
            buf.extend(g.neighbor_edges(u).iter().map(|&e| prev[e]));
            sorted_sum(buf)
        })
        .collect();

    g.edges()
        .par_iter()
        .enumerate()
        .map_init(Vec::new, |terms: &mut Vec<f64>, (idx, e)| {
            terms.clear();
            let own = prev[idx];
            // x = u contributes s(u,u) + s(v,u); x = v contributes s(u,v) + s(v,v).
            terms.push(1.0 + own);
            terms.push(own + 1.0);
            let (nu, eu) = (g.neighbors(e.u), g.neighbor_edges(e.u));
            let (nv, ev) = (g.neighbors(e.v), g.neighbor_edges(e.v));
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        terms.push(prev[eu[i]] + prev[ev[j]]);
                        i += 1;
                        j += 1;
                    }
                }
            }
            let numerator = sorted_sum(terms);
            let denominator = (node_sums[e.u] * node_sums[e.v]).sqrt();
            assert!(
                denominator > 0.0,
                "DSS invariant violated: zero neighbor mass on edge ({}, {})",
                e.u,
                e.v
            );
            numerator / denominator
        })
        .collect()
}

/// Computes the requested similarity.
pub fn compute(g: &Graph, kind: SimilarityKind, iterations: usize) -> SimilarityMap {
    match kind {
        SimilarityKind::Dss => dss_fixed_point(g, iterations),
        SimilarityKind::Cosine => local_cosine(g),
    }
}
