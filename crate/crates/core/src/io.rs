//! Text formats for partitions, covers, and generated graphs.
//!
//! * partition: `label community` per line, sorted by label;
//! * fuzzy cover: one community per line, `label:probability` entries;
//! * crisp cover: one community per line, space-separated labels;
//! * node-wise cover: `label c1 c2 ...` per line (the LFR convention).
//!
//! Labels sort numerically when every label is an integer, lexically
//! otherwise. Lines starting with `#` or `%` are comments.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::benchgen::GroundTruth;
use crate::graph::{Graph, NodeId};
use crate::hamuhi::Partition;
use crate::metrics::{LabeledCover, LabeledPartition};
use crate::overlap::{CrispCover, FuzzyCover};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("file holds no entries")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Layout of a ground-truth or detected cover file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverFormat {
    /// One community per line.
    #[default]
    Cover,
    /// `label membership...` per line.
    Nodewise,
}

impl FromStr for CoverFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cover" => Ok(CoverFormat::Cover),
            "nodewise" => Ok(CoverFormat::Nodewise),
            other => Err(format!(
                "unknown cover format '{other}' (expected cover or nodewise)"
            )),
        }
    }
}

/// Orders node ids by their labels.
pub fn label_order(g: &Graph, nodes: &[NodeId]) -> Vec<NodeId> {
    let labels: Vec<String> = nodes.iter().map(|&u| g.label(u)).collect();
    let numeric: Option<Vec<i64>> = labels.iter().map(|l| l.parse().ok()).collect();
    let mut idx: Vec<usize> = (0..nodes.len()).collect();
    match numeric {
        Some(keys) => idx.sort_by_key(|&i| (keys[i], nodes[i])),
        None => idx.sort_by(|&a, &b| labels[a].cmp(&labels[b]).then(nodes[a].cmp(&nodes[b]))),
    }
    idx.into_iter().map(|i| nodes[i]).collect()
}

fn all_nodes(g: &Graph) -> Vec<NodeId> {
    (0..g.node_count()).collect()
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    writeln!(out, "# nodes {} edges {}", g.node_count(), g.edge_count())?;
    for e in g.edges() {
        writeln!(out, "{} {}", g.label(e.u), g.label(e.v))?;
    }
    Ok(())
}

pub fn write_partition<W: Write>(g: &Graph, p: &Partition, mut out: W) -> io::Result<()> {
    for u in label_order(g, &all_nodes(g)) {
        writeln!(out, "{} {}", g.label(u), p.community_of(u))?;
    }
    Ok(())
}

pub fn write_fuzzy_cover<W: Write>(g: &Graph, cover: &FuzzyCover, mut out: W) -> io::Result<()> {
    for c in &cover.communities {
        let prob: BTreeMap<NodeId, f64> = c.members.iter().copied().collect();
        let nodes: Vec<NodeId> = prob.keys().copied().collect();
        let line: Vec<String> = label_order(g, &nodes)
            .into_iter()
            .map(|u| format!("{}:{:.6}", g.label(u), prob[&u]))
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

fn write_sets<W: Write>(g: &Graph, sets: &[Vec<NodeId>], mut out: W) -> io::Result<()> {
    for set in sets {
        let line: Vec<String> = label_order(g, set)
            .into_iter()
            .map(|u| g.label(u))
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn write_crisp_cover<W: Write>(g: &Graph, cover: &CrispCover, out: W) -> io::Result<()> {
    write_sets(g, &cover.member_sets(), out)
}

pub fn write_truth_cover<W: Write>(g: &Graph, truth: &GroundTruth, out: W) -> io::Result<()> {
    write_sets(g, &truth.communities, out)
}

/// `label c1 c2 ...` per node, communities numbered from 1.
pub fn write_truth_nodewise<W: Write>(
    g: &Graph,
    truth: &GroundTruth,
    mut out: W,
) -> io::Result<()> {
    let memberships = truth.memberships(g.node_count());
    for u in label_order(g, &all_nodes(g)) {
        let ids: Vec<String> = memberships[u].iter().map(|c| (c + 1).to_string()).collect();
        writeln!(out, "{} {}", g.label(u), ids.join(" "))?;
    }
    Ok(())
}

fn content_lines<R: BufRead>(source: R) -> impl Iterator<Item = io::Result<(usize, String)>> {
    source
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Err(e) => Some(Err(e)),
            Ok(line) => {
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
                    None
                } else {
                    Some(Ok((i + 1, t.to_string())))
                }
            }
        })
}

pub fn read_partition<R: BufRead>(source: R) -> Result<LabeledPartition, IoError> {
    let mut pairs = Vec::new();
    for entry in content_lines(source) {
        let (line, text) = entry?;
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(IoError::Parse {
                line,
                message: format!("expected 'label community', found {} tokens", tokens.len()),
            });
        }
        pairs.push((tokens[0].to_string(), tokens[1].to_string()));
    }
    if pairs.is_empty() {
        return Err(IoError::Empty);
    }
    Ok(LabeledPartition::from_pairs(pairs))
}

/// Reads a crisp or fuzzy cover file; `label:probability` entries keep only the
/// label.
pub fn read_cover<R: BufRead>(source: R, format: CoverFormat) -> Result<LabeledCover, IoError> {
    let mut communities: Vec<Vec<String>> = Vec::new();
    let mut by_key: BTreeMap<String, usize> = BTreeMap::new();
    for entry in content_lines(source) {
        let (line, text) = entry?;
        let mut tokens = text.split_whitespace();
        match format {
            CoverFormat::Cover => communities.push(
                tokens
                    .map(|t| t.split_once(':').map_or(t, |(l, _)| l).to_string())
                    .collect(),
            ),
            CoverFormat::Nodewise => {
                let label = tokens.next().expect("line is non-empty");
                let keys: Vec<&str> = tokens.collect();
                if keys.is_empty() {
                    return Err(IoError::Parse {
                        line,
                        message: format!("label '{label}' has no membership"),
                    });
                }
                for key in keys {
                    let next = communities.len();
                    let idx = *by_key.entry(key.to_string()).or_insert(next);
                    if idx == next {
                        communities.push(Vec::new());
                    }
                    communities[idx].push(label.to_string());
                }
            }
        }
    }
    let cover = LabeledCover::new(communities);
    if cover.is_empty() {
        return Err(IoError::Empty);
    }
    Ok(cover)
}
