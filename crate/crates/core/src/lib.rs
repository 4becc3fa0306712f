//! Community detection for undirected graphs driven by the Dynamic Structural
//! Similarity: disjoint partitions by agglomerative merging, fuzzy and crisp
//! overlapping covers derived from them, evaluation metrics, and seeded
//! synthetic benchmarks with planted communities.

pub mod benchgen;
pub mod dss;
pub mod fixtures;
pub mod graph;
pub mod hamuhi;
pub mod io;
pub mod metrics;
pub mod overlap;

pub use dss::{dss_fixed_point, local_cosine, SimilarityKind, SimilarityMap};
pub use graph::{CanonicalEdge, Graph, GraphError, NodeId};
pub use hamuhi::{detect_disjoint, CommunityDefinition, DetectParams, Partition};
pub use overlap::{alpha_cut, build_fuzzy_cover, CrispCover, FuzzyCover};

/// Runs `f` on a dedicated rayon pool with `threads` workers (0 = rayon's
/// default).
pub fn with_threads<R, F>(threads: usize, f: F) -> Result<R, rayon::ThreadPoolBuildError>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    Ok(pool.install(f))
}
