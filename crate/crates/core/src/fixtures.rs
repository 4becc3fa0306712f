//! Small hand-built graphs with known community structure.

use crate::graph::{Graph, NodeId};

fn clique(nodes: &[NodeId], out: &mut Vec<(NodeId, NodeId)>) {
    for (i, &a) in nodes.iter().enumerate() {
        for &b in &nodes[i + 1..] {
            out.push((a, b));
        }
    }
}

/// Two 5-cliques `{0..4}` and `{5..9}` joined by the edge `(4, 5)`.
pub fn two_five_cliques() -> Graph {
    let mut pairs = Vec::new();
    clique(&[0, 1, 2, 3, 4], &mut pairs);
    clique(&[5, 6, 7, 8, 9], &mut pairs);
    pairs.push((4, 5));
    Graph::from_edges(10, pairs).expect("valid fixture")
}

/// Nodes of the bridge pair in [`bridged_cliques`].
pub const BRIDGE_NODES: [NodeId; 2] = [4, 5];

/// Two 4-cliques `{0,1,2,3}` and `{6,7,8,9}` plus the adjacent bridge nodes
/// 4 and 5, each linked to `{1,2,3}` and to `{6,7,8}`. Mapping
/// `0↔9, 1↔6, 2↔7, 3↔8` with 4 and 5 fixed is an automorphism that swaps the
/// cliques.
pub fn bridged_cliques() -> Graph {
    let mut pairs = Vec::new();
    clique(&[0, 1, 2, 3], &mut pairs);
    clique(&[6, 7, 8, 9], &mut pairs);
    pairs.push((4, 5));
    for b in BRIDGE_NODES {
        for x in [1, 2, 3, 6, 7, 8] {
            pairs.push((b, x));
        }
    }
    Graph::from_edges(10, pairs).expect("valid fixture")
}
