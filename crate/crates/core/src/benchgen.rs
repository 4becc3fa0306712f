//! Seeded synthetic graphs with planted communities.
//!
//! [`gen_planted_partition`] draws equal-sized blocks with independent
//! intra/inter edge probabilities. [`gen_lfr_like`] approximates the LFR
//! benchmark: power-law degrees and community sizes, a mixing parameter, and
//! overlapping nodes with a fixed number of memberships. It does not run the
//! LFR rewiring loop, so the realized mixing only approximates `mu` (typically
//! within ±0.05) and some stubs are discarded when they cannot be matched.
//!
//! Randomness comes from [`ChaCha8Rng`] seeded with `seed_from_u64`, which is
//! portable across platforms.

use std::collections::HashSet;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::metrics::{LabeledCover, LabeledPartition};

/// Identifier of the generator recorded in benchmark metadata.
pub const RNG_ALGORITHM: &str = "rand_chacha::ChaCha8Rng/seed_from_u64";

const MATCH_ROUNDS: usize = 50;
const ASSIGN_ATTEMPTS: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

fn invalid(msg: impl Into<String>) -> BenchError {
    BenchError::InvalidParams(msg.into())
}

/// LFR-style generator configuration. Exponents are given as negative numbers
/// (`P(k) ∝ k^tau1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfrParams {
    pub n: usize,
    pub avgk: f64,
    pub maxk: usize,
    pub tau1: f64,
    pub tau2: f64,
    pub minc: usize,
    pub maxc: usize,
    pub mu: f64,
    /// Number of overlapping nodes.
    pub on: usize,
    /// Memberships per overlapping node.
    pub om: usize,
    pub seed: u64,
}

impl Default for LfrParams {
    fn default() -> Self {
        Self {
            n: 1000,
            avgk: 10.0,
            maxk: 50,
            tau1: -2.0,
            tau2: -1.0,
            minc: 10,
            maxc: 50,
            mu: 0.1,
            on: 0,
            om: 1,
            seed: 1,
        }
    }
}

impl LfrParams {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n < 2 {
            return Err(invalid("n must be at least 2"));
        }
        if self.minc < 2 {
            return Err(invalid("minc must be at least 2"));
        }
        if self.minc > self.maxc || self.maxc > self.n {
            return Err(invalid("need minc <= maxc <= n"));
        }
        if self.on > self.n {
            return Err(invalid("on must not exceed n"));
        }
        if self.om < 1 {
            return Err(invalid("om must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(invalid("mu must lie in [0, 1]"));
        }
        if self.maxk == 0 || self.maxk >= self.n {
            return Err(invalid("need 0 < maxk < n"));
        }
        if !(self.avgk > 0.0 && self.avgk <= self.maxk as f64) {
            return Err(invalid("need 0 < avgk <= maxk"));
        }
        if !(self.tau1 <= 0.0 && self.tau2 <= 0.0)
            || !self.tau1.is_finite()
            || !self.tau2.is_finite()
        {
            return Err(invalid("tau1 and tau2 must be finite and non-positive"));
        }
        Ok(())
    }
}

/// Planted communities over internal node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    /// Each community sorted ascending.
    pub communities: Vec<Vec<NodeId>>,
}

impl GroundTruth {
    pub fn to_cover(&self, g: &Graph) -> LabeledCover {
        LabeledCover::new(
            self.communities
                .iter()
                .map(|c| c.iter().map(|&u| g.label(u)).collect::<Vec<_>>()),
        )
    }

    /// The disjoint view; `None` when some node has several memberships.
    pub fn to_partition(&self, g: &Graph) -> Option<LabeledPartition> {
        let mut owner = vec![None; g.node_count()];
        for (c, members) in self.communities.iter().enumerate() {
            for &u in members {
                if owner[u].replace(c).is_some() {
                    return None;
                }
            }
        }
        let pairs: Option<Vec<(String, usize)>> = owner
            .into_iter()
            .enumerate()
            .map(|(u, c)| c.map(|c| (g.label(u), c)))
            .collect();
        pairs.map(LabeledPartition::from_pairs)
    }

    /// Communities of every node.
    pub fn memberships(&self, node_count: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); node_count];
        for (c, members) in self.communities.iter().enumerate() {
            for &u in members {
                out[u].push(c);
            }
        }
        out
    }

    /// Fraction of edges whose endpoints share no community.
    pub fn mixing(&self, g: &Graph) -> f64 {
        if g.edge_count() == 0 {
            return 0.0;
        }
        let member = self.memberships(g.node_count());
        let inter = g
            .edges()
            .iter()
            .filter(|e| !shares_community(&member[e.u], &member[e.v]))
            .count();
        inter as f64 / g.edge_count() as f64
    }
}

fn shares_community(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|c| b.contains(c))
}

/// A generated graph with its planted structure.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub graph: Graph,
    pub truth: GroundTruth,
    pub empirical_mu: f64,
}

/// Calls `visit` with every index in `0..space` independently kept with
/// probability `p`, using geometric skips.
fn sample_indices(rng: &mut ChaCha8Rng, space: u64, p: f64, mut visit: impl FnMut(u64)) {
    if p <= 0.0 || space == 0 {
        return;
    }
    if p >= 1.0 {
        (0..space).for_each(visit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut idx: u64 = 0;
    loop {
        let r: f64 = rng.gen();
        let skip = ((1.0 - r).ln() / log_q).floor();
        if skip >= (space - idx) as f64 {
            return;
        }
        idx += skip as u64;
        visit(idx);
        idx += 1;
        if idx >= space {
            return;
        }
    }
}

/// Equal blocks of `n / k` nodes; intra-block pairs are linked with
/// probability `p_in`, inter-block pairs with `p_out`.
pub fn gen_planted_partition(
    n: usize,
    k: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<Benchmark, BenchError> {
    if k == 0 || n == 0 || !n.is_multiple_of(k) {
        return Err(invalid("k must divide n"));
    }
    if !(0.0 <= p_out && p_out < p_in && p_in <= 1.0) {
        return Err(invalid("need 0 <= p_out < p_in <= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = n / k;
    let mut pairs = Vec::new();
    for b in 0..k {
        let base = b * s;
        // Upper triangle of the s×s block, row-major, without the diagonal.
        let tri = (s * (s - 1) / 2) as u64;
        let mut row = 0usize;
        let mut row_start = 0u64;
        sample_indices(&mut rng, tri, p_in, |t| {
            while t >= row_start + (s - 1 - row) as u64 {
                row_start += (s - 1 - row) as u64;
                row += 1;
            }
            let col = row + 1 + (t - row_start) as usize;
            pairs.push((base + row, base + col));
        });
    }
    for a in 0..k {
        for b in a + 1..k {
            sample_indices(&mut rng, (s * s) as u64, p_out, |t| {
                let (i, j) = ((t / s as u64) as usize, (t % s as u64) as usize);
                pairs.push((a * s + i, b * s + j));
            });
        }
    }
    let graph = Graph::from_edges(n, pairs).expect("ids are in range");
    let truth = GroundTruth {
        communities: (0..k).map(|b| (b * s..(b + 1) * s).collect()).collect(),
    };
    let empirical_mu = truth.mixing(&graph);
    Ok(Benchmark {
        graph,
        truth,
        empirical_mu,
    })
}

/// `∫_a^b x^p dx`.
fn power_integral(p: f64, a: f64, b: f64) -> f64 {
    if (p + 1.0).abs() < 1e-12 {
        (b / a).ln()
    } else {
        (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0)
    }
}

/// Mean of the continuous power law `∝ x^tau` truncated to `[lo, hi]`.
fn power_law_mean(tau: f64, lo: f64, hi: f64) -> f64 {
    if hi - lo < 1e-12 {
        return lo;
    }
    power_integral(tau + 1.0, lo, hi) / power_integral(tau, lo, hi)
}

fn sample_power_law(rng: &mut ChaCha8Rng, tau: f64, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.gen();
    if (tau + 1.0).abs() < 1e-12 {
        lo * (hi / lo).powf(u)
    } else {
        let e = tau + 1.0;
        (lo.powf(e) + u * (hi.powf(e) - lo.powf(e))).powf(1.0 / e)
    }
}

/// Lower cutoff giving the requested mean degree, by bisection.
fn solve_min_degree(tau: f64, avgk: f64, maxk: f64) -> Result<f64, BenchError> {
    let (mut lo, mut hi) = (1.0, maxk);
    if power_law_mean(tau, lo, maxk) > avgk {
        return Err(BenchError::Infeasible(format!(
            "avgk {avgk} is below the smallest attainable mean degree {:.3}",
            power_law_mean(tau, lo, maxk)
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if power_law_mean(tau, mid, maxk) < avgk {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn community_sizes(params: &LfrParams, rng: &mut ChaCha8Rng) -> Result<Vec<usize>, BenchError> {
    let target = params.n + params.on * (params.om - 1);
    let choices: Vec<usize> = (params.minc..=params.maxc).collect();
    let weights: Vec<f64> = choices
        .iter()
        .map(|&s| (s as f64).powf(params.tau2))
        .collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| invalid(e.to_string()))?;
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < target {
        let s = choices[dist.sample(rng)];
        sizes.push(s);
        total += s;
    }
    let mut excess = total - target;
    shave(&mut sizes, &mut excess, |s| s > params.minc, |s| *s -= 1);
    if excess > 0 {
        // Every community is at minc: drop one and grow the rest instead.
        let dropped = sizes.pop().expect("at least one community");
        let mut deficit = dropped - excess;
        shave(&mut sizes, &mut deficit, |s| s < params.maxc, |s| *s += 1);
        if deficit > 0 {
            return Err(BenchError::Infeasible(format!(
                "community sizes in [{}, {}] cannot sum to {target}",
                params.minc, params.maxc
            )));
        }
    }
    if sizes.len() < params.om {
        return Err(BenchError::Infeasible(format!(
            "{} communities cannot give {} distinct memberships",
            sizes.len(),
            params.om
        )));
    }
    Ok(sizes)
}

/// Applies `step` round-robin from the last community backwards until
/// `remaining` hits zero or no community `can` move.
fn shave(
    sizes: &mut [usize],
    remaining: &mut usize,
    can: impl Fn(usize) -> bool,
    step: impl Fn(&mut usize),
) {
    while *remaining > 0 {
        let mut moved = false;
        for s in sizes.iter_mut().rev() {
            if *remaining == 0 {
                break;
            }
            if can(*s) {
                step(s);
                *remaining -= 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
}

/// Intra-community stubs of a node with degree `d`: the ceiling goes to the
/// community side.
fn intra_stubs(d: usize, mu: f64) -> usize {
    let exact = (1.0 - mu) * d as f64;
    let rounded = exact.round();
    if (exact - rounded).abs() < 1e-9 {
        rounded as usize
    } else {
        exact.ceil() as usize
    }
}

/// Splits `total` as evenly as possible over `parts`, larger shares first.
fn split_even(total: usize, parts: usize) -> Vec<usize> {
    (0..parts)
        .map(|i| total / parts + usize::from(i < total % parts))
        .collect()
}

fn assign_memberships(
    params: &LfrParams,
    sizes: &[usize],
    degrees: &[usize],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<usize>>> {
    let n = params.n;
    let count = |u: usize| if u < params.on { params.om } else { 1 };
    let need = |u: usize| {
        let intra = intra_stubs(degrees[u], params.mu);
        intra.div_ceil(count(u))
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| (std::cmp::Reverse(need(u)), u));

    let mut capacity = sizes.to_vec();
    let mut memberships = vec![Vec::new(); n];
    for &u in &order {
        for _ in 0..count(u) {
            let pick = |fits: &dyn Fn(usize) -> bool, rng: &mut ChaCha8Rng| -> Option<usize> {
                let eligible: Vec<usize> = (0..sizes.len())
                    .filter(|&c| capacity[c] > 0 && !memberships[u].contains(&c) && fits(c))
                    .collect();
                if eligible.is_empty() {
                    return None;
                }
                let weights: Vec<usize> = eligible.iter().map(|&c| capacity[c]).collect();
                let idx = WeightedIndex::new(&weights).ok()?.sample(rng);
                Some(eligible[idx])
            };
            let required = need(u);
            let c = pick(&|c| sizes[c] > required, rng).or_else(|| pick(&|_| true, rng))?;
            capacity[c] -= 1;
            memberships[u].push(c);
        }
    }
    Some(memberships)
}

/// Shuffles and pairs stubs, retrying rejected pairs for a bounded number of
/// rounds. Unmatched stubs are dropped.
fn match_stubs(
    mut stubs: Vec<NodeId>,
    rng: &mut ChaCha8Rng,
    edges: &mut HashSet<(NodeId, NodeId)>,
    accept: impl Fn(NodeId, NodeId) -> bool,
) {
    for _ in 0..MATCH_ROUNDS {
        if stubs.len() < 2 {
            return;
        }
        stubs.shuffle(rng);
        let mut leftover = Vec::new();
        for pair in stubs.chunks(2) {
            let [a, b] = pair else {
                leftover.extend_from_slice(pair);
                continue;
            };
            let key = ((*a).min(*b), (*a).max(*b));
            if a != b && !edges.contains(&key) && accept(*a, *b) {
                edges.insert(key);
            } else {
                leftover.extend_from_slice(pair);
            }
        }
        stubs = leftover;
    }
}

/// LFR-like benchmark graph.
///
/// Community sizes follow a discrete power law with exponent `tau2` on
/// `[minc, maxc]` and sum to `n + on·(om − 1)`. Nodes `0..on` belong to `om`
/// communities, the rest to one. Degrees follow a power law with exponent
/// `tau1` on `[kmin, maxk]`, `kmin` chosen so the mean is `avgk`. Each node
/// sends `⌈(1 − mu)·d⌉` stubs into its communities and the rest outside them.
pub fn gen_lfr_like(params: &LfrParams) -> Result<Benchmark, BenchError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n;

    let kmin = solve_min_degree(params.tau1, params.avgk, params.maxk as f64)?;
    let degrees: Vec<usize> = (0..n)
        .map(|_| {
            let x = sample_power_law(&mut rng, params.tau1, kmin, params.maxk as f64);
            (x.round() as usize).clamp(1, params.maxk)
        })
        .collect();

    let sizes = community_sizes(params, &mut rng)?;
    let memberships = (0..ASSIGN_ATTEMPTS)
        .find_map(|_| assign_memberships(params, &sizes, &degrees, &mut rng))
        .ok_or_else(|| {
            BenchError::Infeasible("could not give overlapping nodes distinct communities".into())
        })?;

    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); sizes.len()];
    for (u, ms) in memberships.iter().enumerate() {
        for &c in ms {
            members[c].push(u);
        }
    }

    let mut intra: Vec<Vec<NodeId>> = vec![Vec::new(); sizes.len()];
    let mut inter: Vec<NodeId> = Vec::new();
    for u in 0..n {
        let d = degrees[u];
        let inside = intra_stubs(d, params.mu);
        for (share, &c) in split_even(inside, memberships[u].len())
            .into_iter()
            .zip(&memberships[u])
        {
            let capped = share.min(members[c].len() - 1);
            intra[c].extend(std::iter::repeat_n(u, capped));
        }
        inter.extend(std::iter::repeat_n(u, d - inside));
    }

    let mut edges: HashSet<(NodeId, NodeId)> = HashSet::new();
    for stubs in intra {
        match_stubs(stubs, &mut rng, &mut edges, |_, _| true);
    }
    match_stubs(inter, &mut rng, &mut edges, |a, b| {
        !shares_community(&memberships[a], &memberships[b])
    });

    let mut pairs: Vec<(NodeId, NodeId)> = edges.into_iter().collect();
    pairs.sort_unstable();
    let graph = Graph::from_edges(n, pairs).expect("ids are in range");
    let truth = GroundTruth {
        communities: members,
    };
    let empirical_mu = truth.mixing(&graph);
    Ok(Benchmark {
        graph,
        truth,
        empirical_mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_extremes_give_disjoint_cliques() {
        let b = gen_planted_partition(20, 4, 1.0, 0.0, 7).unwrap();
        assert_eq!(b.graph.edge_count(), 4 * 10);
        for c in &b.truth.communities {
            for (i, &u) in c.iter().enumerate() {
                for &v in &c[i + 1..] {
                    assert!(b.graph.has_edge(u, v));
                }
            }
        }
        assert_eq!(b.empirical_mu, 0.0);
    }

    #[test]
    fn planted_is_deterministic() {
        let a = gen_planted_partition(60, 3, 0.3, 0.05, 11).unwrap();
        let b = gen_planted_partition(60, 3, 0.3, 0.05, 11).unwrap();
        let c = gen_planted_partition(60, 3, 0.3, 0.05, 12).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn planted_rejects_bad_parameters() {
        assert!(gen_planted_partition(10, 3, 0.5, 0.1, 1).is_err());
        assert!(gen_planted_partition(10, 2, 0.1, 0.5, 1).is_err());
        assert!(gen_planted_partition(10, 2, 1.5, 0.1, 1).is_err());
    }

    #[test]
    fn planted_intra_edge_count_is_binomial() {
        let b = gen_planted_partition(100, 5, 0.5, 0.01, 3).unwrap();
        let intra = b
            .graph
            .edges()
            .iter()
            .filter(|e| e.u / 20 == e.v / 20)
            .count() as f64;
        // 5·C(20,2) = 950 trials at p = 0.5.
        let (mean, sd) = (475.0, (950.0f64 * 0.25).sqrt());
        assert!((intra - mean).abs() <= 4.0 * sd, "intra = {intra}");
    }

    #[test]
    fn sample_indices_covers_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut seen = Vec::new();
        sample_indices(&mut rng, 5, 1.0, |i| seen.push(i));
        assert_eq!(seen, vec![0, 1, 2, 3, 4]);
        seen.clear();
        sample_indices(&mut rng, 5, 0.0, |i| seen.push(i));
        assert!(seen.is_empty());
    }

    #[test]
    fn min_degree_solver_hits_the_mean() {
        let kmin = solve_min_degree(-2.0, 10.0, 50.0).unwrap();
        assert!((power_law_mean(-2.0, kmin, 50.0) - 10.0).abs() < 1e-9);
        let kmin = solve_min_degree(-2.0, 20.0, 100.0).unwrap();
        assert!((power_law_mean(-2.0, kmin, 100.0) - 20.0).abs() < 1e-9);
        // 1/x on [1, 100] already has mean 99 / ln 100 ≈ 21.5.
        assert!(solve_min_degree(-1.0, 20.0, 100.0).is_err());
        assert!(matches!(
            solve_min_degree(-2.0, 1.0, 50.0),
            Err(BenchError::Infeasible(_))
        ));
    }

    #[test]
    fn stub_split_rounds_toward_community() {
        assert_eq!(intra_stubs(10, 0.1), 9);
        assert_eq!(intra_stubs(10, 0.3), 7);
        assert_eq!(intra_stubs(11, 0.3), 8);
        assert_eq!(intra_stubs(5, 0.0), 5);
        assert_eq!(split_even(7, 3), vec![3, 2, 2]);
    }

    #[test]
    fn lfr_rejects_invalid_parameters() {
        let bad = LfrParams {
            minc: 60,
            ..LfrParams::default()
        };
        assert!(matches!(
            gen_lfr_like(&bad),
            Err(BenchError::InvalidParams(_))
        ));
        let bad = LfrParams {
            mu: 1.5,
            ..LfrParams::default()
        };
        assert!(gen_lfr_like(&bad).is_err());
        let bad = LfrParams {
            maxk: 1000,
            ..LfrParams::default()
        };
        assert!(gen_lfr_like(&bad).is_err());
        let bad = LfrParams {
            on: 10,
            om: 30,
            n: 100,
            maxk: 20,
            minc: 20,
            maxc: 50,
            ..LfrParams::default()
        };
        assert!(matches!(gen_lfr_like(&bad), Err(BenchError::Infeasible(_))));
    }

    #[test]
    fn lfr_zero_mixing_keeps_edges_inside() {
        let params = LfrParams {
            mu: 0.0,
            seed: 5,
            ..LfrParams::default()
        };
        let b = gen_lfr_like(&params).unwrap();
        assert_eq!(b.empirical_mu, 0.0);
        assert!(b.graph.edge_count() > 0);
    }

    #[test]
    fn lfr_cover_respects_sizes_and_overlaps() {
        let params = LfrParams {
            on: 100,
            om: 2,
            seed: 9,
            ..LfrParams::default()
        };
        let b = gen_lfr_like(&params).unwrap();
        let total: usize = b.truth.communities.iter().map(Vec::len).sum();
        assert_eq!(total, 1000 + 100);
        for c in &b.truth.communities {
            assert!((10..=50).contains(&c.len()));
        }
        let memberships = b.truth.memberships(1000);
        assert_eq!(memberships.iter().filter(|m| m.len() == 2).count(), 100);
        assert!(memberships[..100].iter().all(|m| m.len() == 2));
        assert!(memberships[100..].iter().all(|m| m.len() == 1));
        assert!((0..1000).all(|u| b.graph.degree(u) <= 50));
    }
}
