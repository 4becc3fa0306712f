//! Agglomerative disjoint community detection driven by edge similarity.
//!
//! Detection runs in three phases over a [`MergeState`]:
//!
//! 1. every node starts as its own community;
//! 2. sweeps in ascending community id merge each community that fails the
//!    requested [`CommunityDefinition`] with all of its most similar adjacent
//!    communities, until a sweep performs no merge;
//! 3. the same sweeps merge every community smaller than the minimum size.
//!
//! The similarity between two communities is the maximum similarity over the
//! edges joining them. When an `eps` is supplied, communities that would be
//! merged but sit at (nearly) equal similarity from all of their neighbors are
//! flagged as ε-cores at the start of every sweep. Cores are frozen: they are
//! never merged and never absorb anything, and the overlap stage later
//! dissolves them into their neighbors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::dss::SimilarityMap;
use crate::graph::{Graph, NodeId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HamuhiError {
    #[error("community {0} is not live")]
    DeadCommunity(usize),
}

/// Predicate a community must satisfy to stop merging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum CommunityDefinition {
    /// Total internal degree exceeds total external degree.
    Weak,
    /// Internal edges exceed the edges toward any single adjacent community.
    #[default]
    MostWeak,
}

impl fmt::Display for CommunityDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommunityDefinition::Weak => "weak",
            CommunityDefinition::MostWeak => "most-weak",
        })
    }
}

impl FromStr for CommunityDefinition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "weak" => Ok(CommunityDefinition::Weak),
            "most-weak" | "mostweak" => Ok(CommunityDefinition::MostWeak),
            other => Err(format!(
                "unknown community definition '{other}' (expected weak or most-weak)"
            )),
        }
    }
}

/// Edges between two communities and the largest similarity among them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub edges: usize,
    pub max_similarity: f64,
}

impl Link {
    fn absorb(&mut self, other: Link) {
        self.edges += other.edges;
        if other.max_similarity > self.max_similarity {
            self.max_similarity = other.max_similarity;
        }
    }
}

/// Evaluates `cd` from a community's internal edge count and its links.
pub fn satisfies_definition<'a, I>(internal_edges: usize, links: I, cd: CommunityDefinition) -> bool
where
    I: IntoIterator<Item = &'a Link>,
{
    let mut total = 0;
    let mut largest = 0;
    let mut any = false;
    for link in links {
        any = true;
        total += link.edges;
        largest = largest.max(link.edges);
    }
    if !any {
        return true;
    }
    match cd {
        CommunityDefinition::Weak => 2 * internal_edges > total,
        CommunityDefinition::MostWeak => internal_edges > largest,
    }
}

/// Bookkeeping for one community of a [`Partition`].
#[derive(Debug, Clone, PartialEq)]
pub struct CommunitySummary {
    /// Sorted ascending.
    pub members: Vec<NodeId>,
    pub internal_edges: usize,
    /// Keyed by adjacent community id.
    pub links: BTreeMap<usize, Link>,
}

impl CommunitySummary {
    pub fn max_similarity(&self) -> Option<f64> {
        self.links
            .values()
            .map(|l| l.max_similarity)
            .reduce(f64::max)
    }
}

/// A disjoint community assignment. Community ids run `0..k` in order of each
/// community's smallest member.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    assignment: Vec<usize>,
    communities: Vec<CommunitySummary>,
    core_flags: BTreeSet<usize>,
}

impl Partition {
    /// Recomputes all bookkeeping for an arbitrary assignment from scratch.
    /// Community ids are renumbered by smallest member.
    pub fn from_assignment(g: &Graph, sim: &SimilarityMap, assignment: &[usize]) -> Self {
        assert_eq!(assignment.len(), g.node_count());
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let mut dense = Vec::with_capacity(assignment.len());
        for &c in assignment {
            let next = renumber.len();
            dense.push(*renumber.entry(c).or_insert(next));
        }
        let mut communities: Vec<CommunitySummary> = (0..renumber.len())
            .map(|_| CommunitySummary {
                members: Vec::new(),
                internal_edges: 0,
                links: BTreeMap::new(),
            })
            .collect();
        for (u, &c) in dense.iter().enumerate() {
            communities[c].members.push(u);
        }
        for (idx, e) in g.edges().iter().enumerate() {
            let (a, b) = (dense[e.u], dense[e.v]);
            if a == b {
                communities[a].internal_edges += 1;
                continue;
            }
            let link = Link {
                edges: 1,
                max_similarity: sim.edge(idx),
            };
            for (x, y) in [(a, b), (b, a)] {
                communities[x]
                    .links
                    .entry(y)
                    .and_modify(|l| l.absorb(link))
                    .or_insert(link);
            }
        }
        Self {
            assignment: dense,
            communities,
            core_flags: BTreeSet::new(),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn community_of(&self, u: NodeId) -> usize {
        self.assignment[u]
    }

    pub fn communities(&self) -> &[CommunitySummary] {
        &self.communities
    }

    pub fn community_count(&self) -> usize {
        self.communities.len()
    }

    pub fn members(&self, c: usize) -> &[NodeId] {
        &self.communities[c].members
    }

    /// Communities flagged as ε-cores during detection.
    pub fn core_flags(&self) -> &BTreeSet<usize> {
        &self.core_flags
    }

    pub fn is_core(&self, c: usize) -> bool {
        self.core_flags.contains(&c)
    }

    /// Checks `cd` for community `c`.
    pub fn check_community_definition(
        &self,
        c: usize,
        cd: CommunityDefinition,
    ) -> Result<bool, HamuhiError> {
        let summary = self
            .communities
            .get(c)
            .ok_or(HamuhiError::DeadCommunity(c))?;
        Ok(satisfies_definition(
            summary.internal_edges,
            summary.links.values(),
            cd,
        ))
    }
}

/// Which test a community must pass in the current phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Definition(CommunityDefinition),
    MinSize(usize),
}

#[derive(Debug, Clone)]
struct Community {
    live: bool,
    frozen: bool,
    min_member: NodeId,
    internal_edges: usize,
    links: FxHashMap<usize, Link>,
    members: Vec<NodeId>,
}

/// Incremental merge state: union-find over nodes plus per-community internal
/// edge counts and links to adjacent communities. A community is addressed by
/// the slot of its union-find root.
#[derive(Debug, Clone)]
pub struct MergeState {
    parent: Vec<usize>,
    slots: Vec<Community>,
}

impl MergeState {
    /// Every node in its own community.
    pub fn singletons(g: &Graph, sim: &SimilarityMap) -> Self {
        Self::from_assignment(g, sim, &(0..g.node_count()).collect::<Vec<_>>())
    }

    /// State for an arbitrary starting assignment.
    pub fn from_assignment(g: &Graph, sim: &SimilarityMap, assignment: &[usize]) -> Self {
        assert_eq!(
            sim.len(),
            g.edge_count(),
            "similarity must cover every edge"
        );
        let n = g.node_count();
        let mut root_of: FxHashMap<usize, NodeId> = FxHashMap::default();
        let mut parent = vec![0; n];
        let mut reach = vec![0; n];
        for (u, &c) in assignment.iter().enumerate() {
            parent[u] = *root_of.entry(c).or_insert(u);
            reach[parent[u]] += g.degree(u);
        }
        let mut slots: Vec<Community> = (0..n)
            .map(|u| Community {
                live: parent[u] == u,
                frozen: false,
                min_member: u,
                internal_edges: 0,
                links: FxHashMap::with_capacity_and_hasher(reach[u], Default::default()),
                members: Vec::new(),
            })
            .collect();
        for u in 0..n {
            slots[parent[u]].members.push(u);
        }
        for (idx, e) in g.edges().iter().enumerate() {
            let (a, b) = (parent[e.u], parent[e.v]);
            if a == b {
                slots[a].internal_edges += 1;
                continue;
            }
            let link = Link {
                edges: 1,
                max_similarity: sim.edge(idx),
            };
            for (x, y) in [(a, b), (b, a)] {
                slots[x]
                    .links
                    .entry(y)
                    .and_modify(|l| l.absorb(link))
                    .or_insert(link);
            }
        }
        Self { parent, slots }
    }

    fn find(&mut self, mut u: usize) -> usize {
        let mut root = u;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[u] != root {
            let next = self.parent[u];
            self.parent[u] = root;
            u = next;
        }
        root
    }

    /// Community currently containing `u`.
    pub fn community_of(&mut self, u: NodeId) -> usize {
        self.find(u)
    }

    /// Live communities in ascending order of smallest member.
    pub fn live_communities(&self) -> Vec<usize> {
        let mut live: Vec<usize> = (0..self.slots.len())
            .filter(|&c| self.slots[c].live)
            .collect();
        live.sort_by_key(|&c| self.slots[c].min_member);
        live
    }

    fn live(&self, c: usize) -> Result<&Community, HamuhiError> {
        self.slots
            .get(c)
            .filter(|s| s.live)
            .ok_or(HamuhiError::DeadCommunity(c))
    }

    pub fn size(&self, c: usize) -> Result<usize, HamuhiError> {
        Ok(self.live(c)?.members.len())
    }

    pub fn is_frozen(&self, c: usize) -> bool {
        self.slots.get(c).is_some_and(|s| s.live && s.frozen)
    }

    /// Adjacent communities of `c` with their links, sorted by neighbor id.
    pub fn links(&self, c: usize) -> Result<Vec<(usize, Link)>, HamuhiError> {
        let mut out: Vec<(usize, Link)> =
            self.live(c)?.links.iter().map(|(&k, &l)| (k, l)).collect();
        out.sort_by_key(|&(k, _)| k);
        Ok(out)
    }

    /// Largest similarity connecting `c` to any adjacent community (maxS).
    pub fn max_similarity(&self, c: usize) -> Result<Option<f64>, HamuhiError> {
        Ok(self
            .live(c)?
            .links
            .values()
            .map(|l| l.max_similarity)
            .reduce(f64::max))
    }

    pub fn check_community_definition(
        &self,
        c: usize,
        cd: CommunityDefinition,
    ) -> Result<bool, HamuhiError> {
        let comm = self.live(c)?;
        Ok(satisfies_definition(
            comm.internal_edges,
            comm.links.values(),
            cd,
        ))
    }

    fn fails(&self, c: usize, criterion: Criterion) -> bool {
        let comm = &self.slots[c];
        match criterion {
            Criterion::Definition(cd) => {
                !satisfies_definition(comm.internal_edges, comm.links.values(), cd)
            }
            Criterion::MinSize(k) => comm.members.len() < k,
        }
    }

    /// Flags and freezes ε-cores among the communities that currently fail
    /// `criterion`, and returns every frozen community.
    ///
    /// A candidate needs at least two members and at least two adjacent
    /// communities, and is flagged when every adjacent community is connected
    /// with similarity at least `max(maxS - eps, 0)`.
    pub fn flag_epsilon_cores(&mut self, eps: f64, criterion: Criterion) -> BTreeSet<usize> {
        assert!(eps >= 0.0, "eps must be non-negative");
        for c in 0..self.slots.len() {
            let comm = &self.slots[c];
            if !comm.live || comm.frozen || comm.members.len() < 2 || comm.links.len() < 2 {
                continue;
            }
            if !self.fails(c, criterion) {
                continue;
            }
            let max_s = comm
                .links
                .values()
                .map(|l| l.max_similarity)
                .fold(f64::NEG_INFINITY, f64::max);
            let threshold = (max_s - eps).max(0.0);
            if comm.links.values().all(|l| l.max_similarity >= threshold) {
                self.slots[c].frozen = true;
            }
        }
        self.frozen()
    }

    pub fn frozen(&self) -> BTreeSet<usize> {
        (0..self.slots.len())
            .filter(|&c| self.slots[c].live && self.slots[c].frozen)
            .collect()
    }

    /// Unfrozen neighbors of `c` tied at the largest link similarity.
    fn merge_targets(&self, c: usize) -> Vec<usize> {
        let links = &self.slots[c].links;
        let best = links
            .iter()
            .filter(|(k, _)| !self.slots[**k].frozen)
            .map(|(_, l)| l.max_similarity)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut targets: Vec<usize> = links
            .iter()
            .filter(|(k, l)| !self.slots[**k].frozen && l.max_similarity == best)
            .map(|(&k, _)| k)
            .collect();
        targets.sort_unstable();
        targets
    }

    /// Merges two live, distinct communities and returns the surviving slot.
    pub fn merge(&mut self, a: usize, b: usize) -> Result<usize, HamuhiError> {
        self.live(a)?;
        self.live(b)?;
        assert_ne!(a, b, "cannot merge a community with itself");
        let (keep, gone) = if self.slots[a].links.len() >= self.slots[b].links.len() {
            (a, b)
        } else {
            (b, a)
        };
        let between = self.slots[keep].links.remove(&gone);
        self.slots[gone].links.remove(&keep);
        let gone_links = std::mem::take(&mut self.slots[gone].links);
        for (other, link) in gone_links {
            let back = self.slots[other]
                .links
                .remove(&gone)
                .expect("link index is symmetric");
            self.slots[other]
                .links
                .entry(keep)
                .and_modify(|l| l.absorb(back))
                .or_insert(back);
            self.slots[keep]
                .links
                .entry(other)
                .and_modify(|l| l.absorb(link))
                .or_insert(link);
        }
        let mut members = std::mem::take(&mut self.slots[gone].members);
        if members.len() > self.slots[keep].members.len() {
            std::mem::swap(&mut members, &mut self.slots[keep].members);
        }
        self.slots[keep].members.extend(members);
        self.slots[keep].internal_edges +=
            self.slots[gone].internal_edges + between.map_or(0, |l| l.edges);
        self.slots[keep].min_member = self.slots[keep].min_member.min(self.slots[gone].min_member);
        self.slots[gone].live = false;
        self.slots[gone].internal_edges = 0;
        self.parent[gone] = keep;
        Ok(keep)
    }

    /// Runs merge sweeps for one phase until a sweep changes nothing.
    pub fn run_phase(&mut self, criterion: Criterion, eps: Option<f64>) {
        let n = self.parent.len();
        loop {
            if let Some(eps) = eps {
                self.flag_epsilon_cores(eps, criterion);
            }
            let mut merged = false;
            for v in 0..n {
                let c = self.find(v);
                let comm = &self.slots[c];
                if comm.min_member != v || comm.frozen || !self.fails(c, criterion) {
                    continue;
                }
                let targets = self.merge_targets(c);
                if targets.is_empty() {
                    continue;
                }
                let mut current = c;
                for t in targets {
                    current = self.merge(current, t).expect("targets are live");
                }
                merged = true;
            }
            if !merged {
                break;
            }
        }
    }

    /// Freezes the state into a renumbered [`Partition`].
    pub fn into_partition(mut self) -> Partition {
        let live = self.live_communities();
        let mut dense = vec![usize::MAX; self.slots.len()];
        for (i, &c) in live.iter().enumerate() {
            dense[c] = i;
        }
        let assignment: Vec<usize> = (0..self.parent.len())
            .map(|u| dense[self.find(u)])
            .collect();
        let mut core_flags = BTreeSet::new();
        let communities = live
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let comm = &mut self.slots[c];
                if comm.frozen {
                    core_flags.insert(i);
                }
                let mut members = std::mem::take(&mut comm.members);
                members.sort_unstable();
                CommunitySummary {
                    members,
                    internal_edges: comm.internal_edges,
                    links: comm.links.iter().map(|(&k, &l)| (dense[k], l)).collect(),
                }
            })
            .collect();
        Partition {
            assignment,
            communities,
            core_flags,
        }
    }
}

/// Parameters of [`detect_disjoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectParams {
    pub definition: CommunityDefinition,
    /// Minimum community size `K` (≥ 1).
    pub min_size: usize,
    /// Enables ε-core flagging.
    pub eps: Option<f64>,
}

impl Default for DetectParams {
    fn default() -> Self {
        Self {
            definition: CommunityDefinition::MostWeak,
            min_size: 2,
            eps: None,
        }
    }
}

/// Detects a disjoint community structure.
pub fn detect_disjoint(g: &Graph, sim: &SimilarityMap, params: &DetectParams) -> Partition {
    assert!(
        params.min_size >= 1,
        "minimum community size must be at least 1"
    );
    let mut state = MergeState::singletons(g, sim);
    state.run_phase(Criterion::Definition(params.definition), params.eps);
    state.run_phase(Criterion::MinSize(params.min_size), params.eps);
    state.into_partition()
}
