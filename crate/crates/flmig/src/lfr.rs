//! Loader for benchmark instances in the layout emitted by the standard LFR
//! generator: a `network.dat` of 1-based node pairs (each edge listed in
//! both directions) and a `community.dat` of node/community assignments.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeLabelMap};
use crate::quality::LabeledPartition;

/// Parses an LFR network/community file pair. The community file defines the
/// node set (ids assigned in file order); every network endpoint must appear
/// there. Edges are deduplicated to weight 1 regardless of how many times or
/// in which orientation they are listed.
pub fn load_lfr<N: BufRead, C: BufRead>(
    network: N,
    community: C,
) -> Result<(Graph, NodeLabelMap, LabeledPartition)> {
    let mut labels = NodeLabelMap::new();
    let mut truth_raw: Vec<u32> = Vec::new();
    let mut community_ids: std::collections::HashMap<String, u32> = std::collections::HashMap::new();

    for (idx, line) in community.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("community file: expected 2 tokens, found {}", tokens.len()),
            });
        }
        let node = labels.insert_or_get(tokens[0]);
        if (node as usize) < truth_raw.len() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("community file: node '{}' listed twice", tokens[0]),
            });
        }
        let next = community_ids.len() as u32;
        let c = *community_ids.entry(tokens[1].to_string()).or_insert(next);
        truth_raw.push(c);
    }
    if truth_raw.is_empty() {
        return Err(Error::Data("community file defines no nodes".into()));
    }

    let mut edges: std::collections::BTreeSet<(u32, u32)> = std::collections::BTreeSet::new();
    for (idx, line) in network.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("network file: expected 2 tokens, found {}", tokens.len()),
            });
        }
        let u = labels.id(tokens[0]).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("network file: node '{}' missing from community file", tokens[0]),
        })?;
        let v = labels.id(tokens[1]).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("network file: node '{}' missing from community file", tokens[1]),
        })?;
        if u == v {
            return Err(Error::Parse {
                line: line_no,
                message: format!("network file: self-loop on '{}'", tokens[0]),
            });
        }
        edges.insert(if u <= v { (u, v) } else { (v, u) });
    }

    let graph = Graph::from_weighted_edges(labels.len(), edges.into_iter().map(|(u, v)| (u, v, 1.0)))?;
    let truth = LabeledPartition::new(truth_raw)?;
    Ok((graph, labels, truth))
}
