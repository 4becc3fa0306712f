//! Agreement measures between a detected structure and a reference one.
//!
//! All measures compare by node label, so a detector's output and a
//! ground-truth file line up even when internal ids differ. Logarithms are
//! natural throughout.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("label universes differ ({left} vs {right} labels, first difference '{example}')")]
    UniverseMismatch {
        left: usize,
        right: usize,
        example: String,
    },
    #[error("cover has no communities")]
    EmptyCover,
    #[error("need at least 2 labels, got {0}")]
    TooFewLabels(usize),
}

/// Disjoint assignment of labels to communities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledPartition {
    assignment: BTreeMap<String, usize>,
}

impl LabeledPartition {
    /// Builds from `(label, community key)` pairs; a repeated label keeps its
    /// last community.
    pub fn from_pairs<L, C, I>(pairs: I) -> Self
    where
        L: Into<String>,
        C: Hash + Eq,
        I: IntoIterator<Item = (L, C)>,
    {
        let mut ids: HashMap<C, usize> = HashMap::new();
        let mut assignment = BTreeMap::new();
        for (label, key) in pairs {
            let next = ids.len();
            let id = *ids.entry(key).or_insert(next);
            assignment.insert(label.into(), id);
        }
        Self { assignment }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<usize> {
        self.assignment.get(label).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.assignment.iter().map(|(l, &c)| (l.as_str(), c))
    }

    /// The same communities as a cover.
    pub fn to_cover(&self) -> LabeledCover {
        let mut groups: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
        for (label, &c) in &self.assignment {
            groups.entry(c).or_default().insert(label.clone());
        }
        LabeledCover::new(groups.into_values())
    }
}

/// Communities over labels; a label may appear in several.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledCover {
    communities: Vec<BTreeSet<String>>,
}

impl LabeledCover {
    /// Empty communities are dropped.
    pub fn new<I, C, L>(communities: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = L>,
        L: Into<String>,
    {
        let communities = communities
            .into_iter()
            .map(|c| c.into_iter().map(Into::into).collect::<BTreeSet<String>>())
            .filter(|c| !c.is_empty())
            .collect();
        Self { communities }
    }

    pub fn communities(&self) -> &[BTreeSet<String>] {
        &self.communities
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn universe(&self) -> BTreeSet<&str> {
        self.communities
            .iter()
            .flat_map(|c| c.iter().map(String::as_str))
            .collect()
    }

    /// Labels with more than one membership.
    pub fn overlapping_labels(&self) -> BTreeSet<&str> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &self.communities {
            for l in c {
                *counts.entry(l.as_str()).or_default() += 1;
            }
        }
        counts
            .into_iter()
            .filter(|&(_, k)| k > 1)
            .map(|(l, _)| l)
            .collect()
    }
}

fn check_universe<'a>(
    left: &BTreeSet<&'a str>,
    right: &BTreeSet<&'a str>,
) -> Result<(), MetricError> {
    if left == right {
        return Ok(());
    }
    let example = left
        .symmetric_difference(right)
        .next()
        .map(|s| s.to_string())
        .unwrap_or_default();
    Err(MetricError::UniverseMismatch {
        left: left.len(),
        right: right.len(),
        example,
    })
}

#[inline]
fn plogp(count: f64, total: f64) -> f64 {
    if count <= 0.0 {
        0.0
    } else {
        let p = count / total;
        -p * p.ln()
    }
}

/// Mutual information normalized by the geometric mean of the entropies.
///
/// Two single-community partitions score 1; when exactly one side has zero
/// entropy the score is 0. The result is clamped to `[0, 1]` against rounding.
pub fn nmi_sqrt(a: &LabeledPartition, b: &LabeledPartition) -> Result<f64, MetricError> {
    let ua: BTreeSet<&str> = a.assignment.keys().map(String::as_str).collect();
    let ub: BTreeSet<&str> = b.assignment.keys().map(String::as_str).collect();
    check_universe(&ua, &ub)?;
    let n = a.len() as f64;
    let mut count_a: HashMap<usize, usize> = HashMap::new();
    let mut count_b: HashMap<usize, usize> = HashMap::new();
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for (label, &ca) in &a.assignment {
        let cb = b.assignment[label];
        *count_a.entry(ca).or_default() += 1;
        *count_b.entry(cb).or_default() += 1;
        *joint.entry((ca, cb)).or_default() += 1;
    }
    let entropy = |counts: &HashMap<usize, usize>| -> f64 {
        let mut terms: Vec<usize> = counts.values().copied().collect();
        terms.sort_unstable();
        terms.into_iter().map(|c| plogp(c as f64, n)).sum()
    };
    let (ha, hb) = (entropy(&count_a), entropy(&count_b));
    if ha == 0.0 && hb == 0.0 {
        return Ok(1.0);
    }
    if ha == 0.0 || hb == 0.0 {
        return Ok(0.0);
    }
    let mut cells: Vec<((usize, usize), usize)> = joint.into_iter().collect();
    cells.sort_unstable();
    let mutual: f64 = cells
        .into_iter()
        .map(|((ca, cb), nab)| {
            let nab = nab as f64;
            let na = count_a[&ca] as f64;
            let nb = count_b[&cb] as f64;
            nab / n * (n * nab / (na * nb)).ln()
        })
        .sum();
    Ok((mutual / (ha * hb).sqrt()).clamp(0.0, 1.0))
}

/// Covers re-indexed over a shared sorted label universe.
struct IndexedCovers {
    n: usize,
    left: Vec<Vec<usize>>,
    right: Vec<Vec<usize>>,
}

fn index_covers(a: &LabeledCover, b: &LabeledCover) -> Result<IndexedCovers, MetricError> {
    let (ua, ub) = (a.universe(), b.universe());
    check_universe(&ua, &ub)?;
    let index: HashMap<&str, usize> = ua.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let convert = |cover: &LabeledCover| -> Vec<Vec<usize>> {
        cover
            .communities
            .iter()
            .map(|c| {
                let mut v: Vec<usize> = c.iter().map(|l| index[l.as_str()]).collect();
                v.sort_unstable();
                v
            })
            .collect()
    };
    Ok(IndexedCovers {
        n: ua.len(),
        left: convert(a),
        right: convert(b),
    })
}

/// Normalized conditional entropy `H(X|Y)_norm`: for each community of `x`,
/// the best admissible conditional entropy against a community of `y`,
/// divided by its own entropy, averaged over `x`.
fn normalized_conditional_entropy(n: usize, x: &[Vec<usize>], y: &[Vec<usize>]) -> f64 {
    let total = n as f64;
    // |X_k ∩ Y_l| for every pair sharing at least one label.
    let mut memberships_y: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (l, c) in y.iter().enumerate() {
        for &u in c {
            memberships_y[u].push(l);
        }
    }
    let mut sum = 0.0;
    for xk in x {
        let mut overlap = vec![0usize; y.len()];
        for &u in xk {
            for &l in &memberships_y[u] {
                overlap[l] += 1;
            }
        }
        let size_x = xk.len();
        let h_x = plogp(size_x as f64, total) + plogp((n - size_x) as f64, total);
        if h_x == 0.0 {
            continue;
        }
        let mut best = h_x;
        for (l, yl) in y.iter().enumerate() {
            let d = overlap[l];
            let c = size_x - d;
            let b = yl.len() - d;
            let a = n - size_x - b;
            let (ha, hb, hc, hd) = (
                plogp(a as f64, total),
                plogp(b as f64, total),
                plogp(c as f64, total),
                plogp(d as f64, total),
            );
            if ha + hd < hb + hc {
                continue;
            }
            let h_y = plogp((b + d) as f64, total) + plogp((a + c) as f64, total);
            let conditional = ha + hb + hc + hd - h_y;
            if conditional < best {
                best = conditional;
            }
        }
        sum += best / h_x;
    }
    sum / x.len() as f64
}

/// Overlapping NMI: each community is a binary membership variable, each one
/// is matched to its most informative counterpart in the other cover (pairs
/// carrying less information than independence are not admitted), and the
/// score is `1 - (H(X|Y)_norm + H(Y|X)_norm) / 2`.
pub fn onmi(a: &LabeledCover, b: &LabeledCover) -> Result<f64, MetricError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptyCover);
    }
    let ix = index_covers(a, b)?;
    let hxy = normalized_conditional_entropy(ix.n, &ix.left, &ix.right);
    let hyx = normalized_conditional_entropy(ix.n, &ix.right, &ix.left);
    Ok(1.0 - 0.5 * (hxy + hyx))
}

/// For every unordered pair `(i, j)` with `i < j` sharing a community, the
/// number of shared communities. Returned per `i` as `(j, k)` lists.
fn shared_counts(n: usize, cover: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    let mut memberships: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, members) in cover.iter().enumerate() {
        for &u in members {
            memberships[u].push(c);
        }
    }
    let mut scratch = vec![0usize; n];
    let mut touched = Vec::new();
    let mut out = Vec::with_capacity(n);
    for (i, communities) in memberships.iter().enumerate() {
        for &c in communities {
            let members = &cover[c];
            let start = members.partition_point(|&v| v <= i);
            for &j in &members[start..] {
                if scratch[j] == 0 {
                    touched.push(j);
                }
                scratch[j] += 1;
            }
        }
        touched.sort_unstable();
        out.push(touched.iter().map(|&j| (j, scratch[j])).collect());
        for &j in &touched {
            scratch[j] = 0;
        }
        touched.clear();
    }
    out
}

/// Adjusted Omega Index: agreement on how many communities each label pair
/// shares, corrected for chance. Not clamped; anti-correlated covers score
/// below zero.
pub fn omega_adjusted(a: &LabeledCover, b: &LabeledCover) -> Result<f64, MetricError> {
    let ix = index_covers(a, b)?;
    let n = ix.n;
    if n < 2 {
        return Err(MetricError::TooFewLabels(n));
    }
    let pairs = (n as u128) * (n as u128 - 1) / 2;
    let left = shared_counts(n, &ix.left);
    let right = shared_counts(n, &ix.right);

    let mut t_left: BTreeMap<usize, u128> = BTreeMap::new();
    let mut t_right: BTreeMap<usize, u128> = BTreeMap::new();
    let mut agree_nonzero: u128 = 0;
    let mut nonzero_left: u128 = 0;
    let mut nonzero_right: u128 = 0;
    let mut nonzero_both: u128 = 0;
    for (li, ri) in left.iter().zip(&right) {
        for &(_, k) in li {
            *t_left.entry(k).or_default() += 1;
        }
        for &(_, k) in ri {
            *t_right.entry(k).or_default() += 1;
        }
        nonzero_left += li.len() as u128;
        nonzero_right += ri.len() as u128;
        let (mut x, mut y) = (0, 0);
        while x < li.len() && y < ri.len() {
            match li[x].0.cmp(&ri[y].0) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    nonzero_both += 1;
                    if li[x].1 == ri[y].1 {
                        agree_nonzero += 1;
                    }
                    x += 1;
                    y += 1;
                }
            }
        }
    }
    // Pairs sharing nothing on either side.
    let zero_both = pairs + nonzero_both - nonzero_left - nonzero_right;
    t_left.insert(0, pairs - nonzero_left);
    t_right.insert(0, pairs - nonzero_right);
    let agree = agree_nonzero + zero_both;
    let expected: u128 = t_left
        .iter()
        .map(|(k, &tl)| tl * t_right.get(k).copied().unwrap_or(0))
        .sum();
    let p2 = pairs * pairs;
    if expected == p2 {
        return Ok(if agree == pairs { 1.0 } else { 0.0 });
    }
    // (obs - exp) / (1 - exp) with both scaled by P².
    let numerator = (agree * pairs) as f64 - expected as f64;
    let denominator = p2 as f64 - expected as f64;
    Ok(numerator / denominator)
}
