//! Overlapping covers derived from a disjoint partition.
//!
//! Each node gets a membership probability in every candidate community: the
//! communities holding at least one of its neighbors plus its home community.
//! The probability is the node's connectivity toward the community (the summed
//! similarity of its edges into it) normalized by its best connectivity, times
//! the fraction of the community's other members it is adjacent to.
//!
//! Communities flagged as ε-cores are dissolved: their members become
//! candidates of the adjacent non-core communities instead. A core member with
//! no such neighbor keeps the core as its home so the cover still spans every
//! node.

use rayon::prelude::*;
use thiserror::Error;

use crate::dss::SimilarityMap;
use crate::graph::{Graph, NodeId};
use crate::hamuhi::Partition;

/// Crisp thresholds swept when scoring covers against a ground truth.
pub const ALPHA_SWEEP: [f64; 6] = [0.005, 0.01, 0.02, 0.03, 0.04, 0.05];

#[derive(Debug, Error, PartialEq)]
pub enum OverlapError {
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("community {community} is not a candidate for node {node}")]
    NotCandidate { node: NodeId, community: usize },
    #[error("alpha must lie in [0, 1], got {0}")]
    BadAlpha(f64),
}

/// A fuzzy community: members with their membership probability.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyCommunity {
    /// Id of the originating community in the partition.
    pub id: usize,
    /// Sorted by node.
    pub members: Vec<(NodeId, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyCover {
    pub node_count: usize,
    pub communities: Vec<FuzzyCommunity>,
}

impl FuzzyCover {
    pub fn membership(&self, community: usize, u: NodeId) -> Option<f64> {
        let c = self.communities.iter().find(|c| c.id == community)?;
        c.members
            .binary_search_by_key(&u, |&(v, _)| v)
            .ok()
            .map(|i| c.members[i].1)
    }

    /// `(community id, probability)` for every community holding `u`.
    pub fn memberships_of(&self, u: NodeId) -> Vec<(usize, f64)> {
        self.communities
            .iter()
            .filter_map(|c| {
                c.members
                    .binary_search_by_key(&u, |&(v, _)| v)
                    .ok()
                    .map(|i| (c.id, c.members[i].1))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrispCommunity {
    pub id: usize,
    /// Sorted ascending.
    pub members: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrispCover {
    pub alpha: f64,
    pub communities: Vec<CrispCommunity>,
}

impl CrispCover {
    pub fn member_sets(&self) -> Vec<Vec<NodeId>> {
        self.communities.iter().map(|c| c.members.clone()).collect()
    }
}

/// Summed similarity of the edges from `u` into `members` (sorted ascending).
pub fn connectivity(g: &Graph, sim: &SimilarityMap, u: NodeId, members: &[NodeId]) -> f64 {
    g.neighbors(u)
        .iter()
        .zip(g.neighbor_edges(u))
        .filter(|(v, _)| members.binary_search(v).is_ok())
        .map(|(_, &e)| sim.edge(e))
        .sum()
}

/// Per-candidate accumulator for one node.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    community: usize,
    connectivity: f64,
    adjacent: usize,
}

fn candidates(g: &Graph, sim: &SimilarityMap, partition: &Partition, u: NodeId) -> Vec<Candidate> {
    let home = partition.community_of(u);
    let mut out: Vec<Candidate> = Vec::new();
    for (&v, &e) in g.neighbors(u).iter().zip(g.neighbor_edges(u)) {
        let c = partition.community_of(v);
        if partition.is_core(c) && c != home {
            continue;
        }
        match out.iter_mut().find(|cand| cand.community == c) {
            Some(cand) => {
                cand.connectivity += sim.edge(e);
                cand.adjacent += 1;
            }
            None => out.push(Candidate {
                community: c,
                connectivity: sim.edge(e),
                adjacent: 1,
            }),
        }
    }
    if !out.iter().any(|c| c.community == home) {
        out.push(Candidate {
            community: home,
            connectivity: 0.0,
            adjacent: 0,
        });
    }
    // A core home only stays when nothing else is reachable.
    if partition.is_core(home) && out.len() > 1 {
        out.retain(|c| c.community != home);
    }
    out.sort_by_key(|c| c.community);
    out
}

fn probabilities(partition: &Partition, u: NodeId, cands: &[Candidate]) -> Vec<(usize, f64)> {
    let best = cands.iter().map(|c| c.connectivity).fold(0.0, f64::max);
    cands
        .iter()
        .map(|c| {
            let size = partition.members(c.community).len();
            let others = if partition.community_of(u) == c.community {
                size - 1
            } else {
                size
            };
            let f = if best == 0.0 || others == 0 {
                0.0
            } else {
                (c.connectivity / best) * (c.adjacent as f64 / others as f64)
            };
            (c.community, f)
        })
        .collect()
}

/// Membership probability of `u` in `community`.
pub fn membership_probability(
    g: &Graph,
    sim: &SimilarityMap,
    partition: &Partition,
    u: NodeId,
    community: usize,
) -> Result<f64, OverlapError> {
    if u >= g.node_count() {
        return Err(OverlapError::NodeOutOfRange(u));
    }
    let cands = candidates(g, sim, partition, u);
    probabilities(partition, u, &cands)
        .into_iter()
        .find(|&(c, _)| c == community)
        .map(|(_, f)| f)
        .ok_or(OverlapError::NotCandidate { node: u, community })
}

/// Builds the fuzzy cover for `partition`.
pub fn build_fuzzy_cover(g: &Graph, sim: &SimilarityMap, partition: &Partition) -> FuzzyCover {
    let per_node: Vec<Vec<(usize, f64)>> = (0..g.node_count())
        .into_par_iter()
        .map(|u| {
            let home = partition.community_of(u);
            let cands = candidates(g, sim, partition, u);
            let mut kept: Vec<(usize, f64)> = probabilities(partition, u, &cands)
                .into_iter()
                .filter(|&(c, f)| f > 0.0 || c == home)
                .collect();
            // Only reachable with zero similarities on every candidate edge.
            if kept.is_empty() {
                kept.push((home, 0.0));
            }
            kept
        })
        .collect();

    let mut members: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); partition.community_count()];
    for (u, entries) in per_node.into_iter().enumerate() {
        for (c, f) in entries {
            members[c].push((u, f));
        }
    }
    let communities = members
        .into_iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(id, members)| FuzzyCommunity { id, members })
        .collect();
    FuzzyCover {
        node_count: g.node_count(),
        communities,
    }
}

/// Keeps members with probability `>= alpha`. A node dropped everywhere is
/// put back into its highest-probability community (lowest id on ties);
/// communities left empty are removed.
pub fn alpha_cut(cover: &FuzzyCover, alpha: f64) -> Result<CrispCover, OverlapError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(OverlapError::BadAlpha(alpha));
    }
    let n = cover.node_count;
    let mut kept = vec![false; n];
    let mut seen = vec![false; n];
    let mut best: Vec<Option<(usize, f64)>> = vec![None; n];
    let mut sets: Vec<Vec<NodeId>> = Vec::with_capacity(cover.communities.len());
    for (idx, c) in cover.communities.iter().enumerate() {
        let mut set = Vec::new();
        for &(u, f) in &c.members {
            seen[u] = true;
            if f >= alpha {
                set.push(u);
                kept[u] = true;
            }
            if best[u].is_none_or(|(_, bf)| f > bf) {
                best[u] = Some((idx, f));
            }
        }
        sets.push(set);
    }
    for u in 0..n {
        if seen[u] && !kept[u] {
            let (idx, _) = best[u].expect("seen nodes have a best community");
            let set = &mut sets[idx];
            let pos = set.partition_point(|&v| v < u);
            set.insert(pos, u);
        }
    }
    let communities = cover
        .communities
        .iter()
        .zip(sets)
        .filter(|(_, set)| !set.is_empty())
        .map(|(c, members)| CrispCommunity { id: c.id, members })
        .collect();
    Ok(CrispCover { alpha, communities })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dss::dss_fixed_point;
    use crate::hamuhi::{detect_disjoint, DetectParams};

    fn sim_from(g: &Graph, f: impl Fn(NodeId, NodeId) -> f64) -> SimilarityMap {
        SimilarityMap::from_values(g.edges().iter().map(|e| f(e.u, e.v)).collect(), 0)
    }

    #[test]
    fn connectivity_sums_edges_into_community() {
        // 0 adjacent to 1 and 2; 3 is a non-adjacent member.
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 3)]).unwrap();
        let sim = sim_from(&g, |u, v| match (u, v) {
            (0, 1) => 0.5,
            (0, 2) => 0.7,
            _ => 9.0,
        });
        assert!((connectivity(&g, &sim, 0, &[1, 2, 3]) - 1.2).abs() < 1e-15);
        assert_eq!(connectivity(&g, &sim, 0, &[3]), 0.0);
        assert_eq!(connectivity(&g, &sim, 0, &[0]), 0.0);
    }

    #[test]
    fn fully_adjacent_single_candidate_has_probability_one() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap();
        let sim = dss_fixed_point(&g, 5);
        let p = Partition::from_assignment(&g, &sim, &[0, 0, 0, 0]);
        assert_eq!(membership_probability(&g, &sim, &p, 0, 0).unwrap(), 1.0);
        let f3 = membership_probability(&g, &sim, &p, 3, 0).unwrap();
        assert!((f3 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            membership_probability(&g, &sim, &p, 0, 5),
            Err(OverlapError::NotCandidate {
                node: 0,
                community: 5
            })
        );
    }

    #[test]
    fn zero_neighbors_gives_zero() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let sim = dss_fixed_point(&g, 2);
        let p = Partition::from_assignment(&g, &sim, &[0, 1, 1, 1]);
        // Node 0 is alone in its home community.
        assert_eq!(membership_probability(&g, &sim, &p, 0, 0).unwrap(), 0.0);
        assert_eq!(
            membership_probability(&g, &sim, &p, 0, 1).unwrap(),
            1.0 / 3.0
        );
    }

    #[test]
    fn interior_node_only_in_home() {
        let mut pairs = Vec::new();
        for block in [[0, 1, 2, 3], [4, 5, 6, 7]] {
            for i in 0..4 {
                for j in i + 1..4 {
                    pairs.push((block[i], block[j]));
                }
            }
        }
        pairs.push((3, 4));
        let g = Graph::from_edges(8, pairs).unwrap();
        let sim = dss_fixed_point(&g, 5);
        let p = detect_disjoint(&g, &sim, &DetectParams::default());
        let cover = build_fuzzy_cover(&g, &sim, &p);
        assert_eq!(cover.memberships_of(0), vec![(0, 1.0)]);
        assert_eq!(cover.memberships_of(3).len(), 2);
    }

    #[test]
    fn alpha_cut_rules() {
        let cover = FuzzyCover {
            node_count: 3,
            communities: vec![
                FuzzyCommunity {
                    id: 0,
                    members: vec![(0, 0.5), (1, 0.04), (2, 1.0)],
                },
                FuzzyCommunity {
                    id: 1,
                    members: vec![(1, 0.02)],
                },
            ],
        };
        let crisp = alpha_cut(&cover, 0.5).unwrap();
        assert_eq!(crisp.member_sets(), vec![vec![0, 1, 2]]);
        let crisp = alpha_cut(&cover, 0.05).unwrap();
        assert_eq!(crisp.communities[0].members, vec![0, 1, 2]);
        assert_eq!(crisp.communities.len(), 1);
        let crisp = alpha_cut(&cover, 0.0).unwrap();
        assert_eq!(crisp.member_sets(), vec![vec![0, 1, 2], vec![1]]);
        assert_eq!(alpha_cut(&cover, 1.5), Err(OverlapError::BadAlpha(1.5)));
    }

    #[test]
    fn bridge_pair_is_shared_by_both_cliques() {
        use crate::fixtures::{bridged_cliques, BRIDGE_NODES};
        let g = bridged_cliques();
        let sim = dss_fixed_point(&g, 5);
        let params = DetectParams {
            eps: Some(0.0),
            ..DetectParams::default()
        };
        let p = detect_disjoint(&g, &sim, &params);
        assert_eq!(p.community_count(), 3);
        assert_eq!(p.members(1), &BRIDGE_NODES);
        assert_eq!(p.core_flags().iter().copied().collect::<Vec<_>>(), vec![1]);

        let cover = build_fuzzy_cover(&g, &sim, &p);
        assert_eq!(cover.communities.len(), 2);
        for b in BRIDGE_NODES {
            let m = cover.memberships_of(b);
            assert_eq!(m.len(), 2);
            assert_eq!(m[0].1, m[1].1);
            assert!(m[0].1 > 0.0);
        }
        for u in 0..g.node_count() {
            assert!(!cover.memberships_of(u).is_empty());
        }
    }
}
