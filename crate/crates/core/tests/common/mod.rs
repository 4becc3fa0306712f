//! Brute-force reference implementations shared by the integration tests.
//! Each one follows the textbook definition directly and makes no attempt at
//! speed.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use dsscomm::{CommunityDefinition, Graph, NodeId, SimilarityMap};

// ---------------------------------------------------------------- metrics

fn h(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.ln()
    }
}

fn entropy_of_counts<I: IntoIterator<Item = usize>>(counts: I, n: f64) -> f64 {
    counts.into_iter().map(|c| h(c as f64 / n)).sum()
}

/// `I(A;B) / sqrt(H(A) H(B))` via `I = H(A) + H(B) - H(A,B)`.
pub fn nmi(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let mut ca: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cb: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cab: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *ca.entry(x).or_default() += 1;
        *cb.entry(y).or_default() += 1;
        *cab.entry((x, y)).or_default() += 1;
    }
    let ha = entropy_of_counts(ca.values().copied(), n);
    let hb = entropy_of_counts(cb.values().copied(), n);
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    if ha == 0.0 || hb == 0.0 {
        return 0.0;
    }
    let hab = entropy_of_counts(cab.values().copied(), n);
    ((ha + hb - hab) / (ha * hb).sqrt()).clamp(0.0, 1.0)
}

/// Membership matrix: `cover[k][i]` is true when label `i` is in community `k`.
pub type Indicator = Vec<Vec<bool>>;

fn conditional(n: usize, x: &Indicator, y: &Indicator) -> f64 {
    let total = n as f64;
    let mut sum = 0.0;
    for xk in x {
        let size = xk.iter().filter(|&&m| m).count();
        let hx = h(size as f64 / total) + h((n - size) as f64 / total);
        if hx == 0.0 {
            continue;
        }
        let mut best = hx;
        for yl in y {
            let (mut a, mut b, mut c, mut d) = (0usize, 0usize, 0usize, 0usize);
            for i in 0..n {
                match (xk[i], yl[i]) {
                    (false, false) => a += 1,
                    (false, true) => b += 1,
                    (true, false) => c += 1,
                    (true, true) => d += 1,
                }
            }
            let p = |k: usize| h(k as f64 / total);
            if p(a) + p(d) < p(b) + p(c) {
                continue;
            }
            let joint = p(a) + p(b) + p(c) + p(d);
            let hy = p(b + d) + p(a + c);
            best = best.min(joint - hy);
        }
        sum += best / hx;
    }
    sum / x.len() as f64
}

pub fn onmi(n: usize, x: &Indicator, y: &Indicator) -> f64 {
    1.0 - 0.5 * (conditional(n, x, y) + conditional(n, y, x))
}

fn shared(cover: &Indicator, i: usize, j: usize) -> usize {
    cover.iter().filter(|c| c[i] && c[j]).count()
}

/// Adjusted Omega Index by explicit pair enumeration.
pub fn omega(n: usize, x: &Indicator, y: &Indicator) -> f64 {
    let mut agree = 0u64;
    let mut tx: BTreeMap<usize, u64> = BTreeMap::new();
    let mut ty: BTreeMap<usize, u64> = BTreeMap::new();
    let mut pairs = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            let (kx, ky) = (shared(x, i, j), shared(y, i, j));
            pairs += 1;
            if kx == ky {
                agree += 1;
            }
            *tx.entry(kx).or_default() += 1;
            *ty.entry(ky).or_default() += 1;
        }
    }
    let p = pairs as f64;
    let obs = agree as f64 / p;
    let exp: f64 = tx
        .iter()
        .map(|(k, &a)| a as f64 * ty.get(k).copied().unwrap_or(0) as f64)
        .sum::<f64>()
        / (p * p);
    if exp == 1.0 {
        return if agree == pairs { 1.0 } else { 0.0 };
    }
    (obs - exp) / (1.0 - exp)
}

fn choose2(k: usize) -> f64 {
    (k * k.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand Index from the contingency table.
pub fn ari(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let mut table: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut ra: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rb: BTreeMap<usize, usize> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *ra.entry(x).or_default() += 1;
        *rb.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&k| choose2(k)).sum();
    let sa: f64 = ra.values().map(|&k| choose2(k)).sum();
    let sb: f64 = rb.values().map(|&k| choose2(k)).sum();
    let expected = sa * sb / choose2(n);
    let max = 0.5 * (sa + sb);
    if max == expected {
        return if index == expected { 1.0 } else { 0.0 };
    }
    (index - expected) / (max - expected)
}

pub fn partition_indicator(assignment: &[usize]) -> Indicator {
    let ids: BTreeSet<usize> = assignment.iter().copied().collect();
    ids.into_iter()
        .map(|c| assignment.iter().map(|&x| x == c).collect())
        .collect()
}

/// All set partitions of `n` labels as restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for c in 0..=next {
            prefix.push(c);
            grow(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

// ---------------------------------------------------------------- merging

fn satisfies(internal: usize, cross: &[usize], cd: CommunityDefinition) -> bool {
    if cross.is_empty() {
        return true;
    }
    match cd {
        CommunityDefinition::Weak => 2 * internal > cross.iter().sum::<usize>(),
        CommunityDefinition::MostWeak => internal > *cross.iter().max().unwrap(),
    }
}

struct Summary {
    size: usize,
    internal: usize,
    /// neighbor label -> (edge count, max similarity)
    links: BTreeMap<usize, (usize, f64)>,
}

fn summarize(g: &Graph, sim: &SimilarityMap, label: &[usize], c: usize) -> Summary {
    let mut s = Summary {
        size: label.iter().filter(|&&l| l == c).count(),
        internal: 0,
        links: BTreeMap::new(),
    };
    for (idx, e) in g.edges().iter().enumerate() {
        let (a, b) = (label[e.u], label[e.v]);
        if a == c && b == c {
            s.internal += 1;
        } else if a == c || b == c {
            let other = if a == c { b } else { a };
            let entry = s.links.entry(other).or_insert((0, 0.0));
            entry.0 += 1;
            entry.1 = entry.1.max(sim.edge(idx));
        }
    }
    s
}

#[derive(Clone, Copy)]
pub enum Phase {
    Definition(CommunityDefinition),
    MinSize(usize),
}

fn fails(s: &Summary, phase: Phase) -> bool {
    match phase {
        Phase::Definition(cd) => {
            let cross: Vec<usize> = s.links.values().map(|l| l.0).collect();
            !satisfies(s.internal, &cross, cd)
        }
        Phase::MinSize(k) => s.size < k,
    }
}

/// Reference merge loop. Communities are named by their smallest member and
/// recomputed from scratch at every step. Returns the labels and the frozen
/// community names.
pub fn hamuhi(
    g: &Graph,
    sim: &SimilarityMap,
    cd: CommunityDefinition,
    k: usize,
    eps: Option<f64>,
) -> (Vec<usize>, BTreeSet<usize>) {
    let n = g.node_count();
    let mut label: Vec<usize> = (0..n).collect();
    let mut frozen: BTreeSet<usize> = BTreeSet::new();
    for phase in [Phase::Definition(cd), Phase::MinSize(k)] {
        loop {
            if let Some(eps) = eps {
                let names: BTreeSet<usize> = label.iter().copied().collect();
                for c in names {
                    if frozen.contains(&c) {
                        continue;
                    }
                    let s = summarize(g, sim, &label, c);
                    if s.size < 2 || s.links.len() < 2 || !fails(&s, phase) {
                        continue;
                    }
                    let max_s = s.links.values().map(|l| l.1).fold(f64::MIN, f64::max);
                    let threshold = (max_s - eps).max(0.0);
                    if s.links.values().all(|l| l.1 >= threshold) {
                        frozen.insert(c);
                    }
                }
            }
            let mut merged = false;
            for v in 0..n {
                let c = label[v];
                if c != v || frozen.contains(&c) {
                    continue;
                }
                let s = summarize(g, sim, &label, c);
                if !fails(&s, phase) {
                    continue;
                }
                let open: Vec<(usize, f64)> = s
                    .links
                    .iter()
                    .filter(|(o, _)| !frozen.contains(o))
                    .map(|(&o, l)| (o, l.1))
                    .collect();
                let Some(best) = open.iter().map(|x| x.1).reduce(f64::max) else {
                    continue;
                };
                let group: Vec<usize> = std::iter::once(c)
                    .chain(open.iter().filter(|x| x.1 == best).map(|x| x.0))
                    .collect();
                let name = *group.iter().min().unwrap();
                for l in label.iter_mut() {
                    if group.contains(l) {
                        *l = name;
                    }
                }
                merged = true;
            }
            if !merged {
                break;
            }
        }
    }
    (label, frozen)
}

/// Relabels communities densely in order of first appearance.
pub fn canonical(assignment: &[usize]) -> Vec<usize> {
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    assignment
        .iter()
        .map(|&c| {
            let next = seen.len();
            *seen.entry(c).or_insert(next)
        })
        .collect()
}

// ---------------------------------------------------------------- overlap

/// Membership probabilities of every node, `result[u]` holding
/// `(community, f)` for each community kept for `u`. `assignment` is dense;
/// `core` lists core community ids.
pub fn fuzzy_memberships(
    g: &Graph,
    sim: &SimilarityMap,
    assignment: &[usize],
    core: &BTreeSet<usize>,
) -> Vec<Vec<(usize, f64)>> {
    let k = assignment.iter().max().map_or(0, |m| m + 1);
    let mut out = Vec::new();
    for u in 0..g.node_count() {
        let home = assignment[u];
        let mut conn = vec![0.0; k];
        let mut adjacent = vec![0usize; k];
        for (idx, e) in g.edges().iter().enumerate() {
            let other = if e.u == u {
                e.v
            } else if e.v == u {
                e.u
            } else {
                continue;
            };
            conn[assignment[other]] += sim.edge(idx);
            adjacent[assignment[other]] += 1;
        }
        let mut cands: Vec<usize> = (0..k)
            .filter(|c| !core.contains(c) && (adjacent[*c] > 0 || *c == home))
            .collect();
        if cands.is_empty() {
            cands.push(home);
        }
        let best = cands.iter().map(|&c| conn[c]).fold(0.0, f64::max);
        let mut kept = Vec::new();
        for c in cands {
            let others = assignment
                .iter()
                .enumerate()
                .filter(|&(v, &x)| x == c && v != u)
                .count();
            let f = if best == 0.0 || others == 0 {
                0.0
            } else {
                conn[c] / best * adjacent[c] as f64 / others as f64
            };
            if f > 0.0 || c == home {
                kept.push((c, f));
            }
        }
        out.push(kept);
    }
    out
}

// ---------------------------------------------------------------- graphs

/// The graph on `n` nodes whose edges are the set bits of `mask` over the
/// pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> bit & 1 == 1 {
                pairs.push((i, j));
            }
            bit += 1;
        }
    }
    Graph::from_edges(n, pairs).unwrap()
}
