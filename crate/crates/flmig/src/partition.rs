//! Mutable community assignments with incremental per-community aggregates.
//!
//! The aggregates (total member degree and internal edge weight per
//! community) are exactly what the constant-time modularity-gain formula
//! needs. For unweighted inputs — and every condensation level derived from
//! them — all bookkeeping values are integers represented exactly in f64, so
//! audits and move reversal are bit-exact.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph, NodeId, NodeLabelMap};

pub type CommunityId = u32;

const NO_ENTRY: u32 = u32::MAX;

/// Edge weight from one node into each adjacent community.
///
/// The scanned node's own contribution is excluded: self-loops never appear,
/// and the entry for the node's current community counts only edges to
/// *other* members. Entries preserve first-touch order, which follows the
/// (sorted) adjacency list and is therefore deterministic.
#[derive(Debug, Default)]
pub struct NeighborCommunityScan {
    entries: Vec<(CommunityId, f64)>,
    slot: Vec<u32>,
}

impl NeighborCommunityScan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(CommunityId, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Weight from the scanned node into community `c` (0 if not adjacent).
    pub fn weight_to(&self, c: CommunityId) -> f64 {
        match self.slot.get(c as usize) {
            Some(&i) if i != NO_ENTRY => self.entries[i as usize].1,
            _ => 0.0,
        }
    }

    fn reset(&mut self, capacity: usize) {
        for &(c, _) in &self.entries {
            self.slot[c as usize] = NO_ENTRY;
        }
        self.entries.clear();
        if self.slot.len() < capacity {
            self.slot.resize(capacity, NO_ENTRY);
        }
    }

    fn add(&mut self, c: CommunityId, w: f64) {
        let i = self.slot[c as usize];
        if i == NO_ENTRY {
            self.slot[c as usize] = self.entries.len() as u32;
            self.entries.push((c, w));
        } else {
            self.entries[i as usize].1 += w;
        }
    }
}

/// Node-to-community assignment plus per-community aggregates.
///
/// Community ids of emptied communities are recycled through a free list, so
/// ids are stable but not dense; writers renumber densely by first
/// occurrence before anything leaves the process.
#[derive(Debug, Clone)]
pub struct Partition {
    community_of: Vec<CommunityId>,
    total_degree: Vec<f64>,
    internal_weight: Vec<f64>,
    size: Vec<u32>,
    free: Vec<CommunityId>,
    nonempty: usize,
}

impl Partition {
    /// Every node in its own community, ids equal to node ids.
    pub fn singletons(g: &Graph) -> Partition {
        let n = g.node_count();
        let mut total_degree = vec![0.0; n];
        let mut internal_weight = vec![0.0; n];
        for v in 0..n {
            total_degree[v] = g.degree(v as NodeId);
            internal_weight[v] = g.self_loop_weight(v as NodeId);
        }
        Partition {
            community_of: (0..n as CommunityId).collect(),
            total_degree,
            internal_weight,
            size: vec![1; n],
            free: Vec::new(),
            nonempty: n,
        }
    }

    /// Builds a partition from an arbitrary per-node assignment, renumbering
    /// community labels densely by first occurrence and recounting all
    /// aggregates from the adjacency.
    pub fn from_membership(g: &Graph, membership: &[CommunityId]) -> Result<Partition> {
        let n = g.node_count();
        if membership.len() != n {
            return Err(Error::Data(format!(
                "membership covers {} nodes, graph has {n}",
                membership.len()
            )));
        }
        let mut dense: std::collections::HashMap<CommunityId, CommunityId> =
            std::collections::HashMap::new();
        let mut community_of = vec![0 as CommunityId; n];
        let mut next = 0 as CommunityId;
        for v in 0..n {
            let c = *dense.entry(membership[v]).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            community_of[v] = c;
        }
        let k = next as usize;
        let mut total_degree = vec![0.0; k];
        let mut internal_weight = vec![0.0; k];
        let mut size = vec![0u32; k];
        for v in 0..n {
            let c = community_of[v] as usize;
            total_degree[c] += g.degree(v as NodeId);
            internal_weight[c] += g.self_loop_weight(v as NodeId);
            size[c] += 1;
        }
        for u in 0..n as NodeId {
            for (v, w) in g.neighbors(u) {
                if v > u && community_of[u as usize] == community_of[v as usize] {
                    internal_weight[community_of[u as usize] as usize] += w;
                }
            }
        }
        Ok(Partition {
            community_of,
            total_degree,
            internal_weight,
            size,
            free: Vec::new(),
            nonempty: k,
        })
    }

    pub fn node_count(&self) -> usize {
        self.community_of.len()
    }

    pub fn community_of(&self, v: NodeId) -> CommunityId {
        self.community_of[v as usize]
    }

    /// Number of non-empty communities.
    pub fn community_count(&self) -> usize {
        self.nonempty
    }

    /// Upper bound (exclusive) on community ids currently allocated.
    pub fn community_capacity(&self) -> usize {
        self.total_degree.len()
    }

    pub fn community_total_degree(&self, c: CommunityId) -> f64 {
        self.total_degree[c as usize]
    }

    pub fn community_internal_weight(&self, c: CommunityId) -> f64 {
        self.internal_weight[c as usize]
    }

    pub fn community_size(&self, c: CommunityId) -> u32 {
        self.size[c as usize]
    }

    /// Non-empty community ids, ascending.
    pub fn communities(&self) -> impl Iterator<Item = CommunityId> + '_ {
        self.size
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0)
            .map(|(c, _)| c as CommunityId)
    }

    /// Members of community `c`, ascending by node id.
    pub fn members_of(&self, c: CommunityId) -> Vec<NodeId> {
        self.community_of
            .iter()
            .enumerate()
            .filter(|(_, &cc)| cc == c)
            .map(|(v, _)| v as NodeId)
            .collect()
    }

    /// Allocates a fresh empty community id, recycling a freed id if any.
    pub fn fresh_community(&mut self) -> CommunityId {
        if let Some(c) = self.free.pop() {
            return c;
        }
        let c = self.total_degree.len() as CommunityId;
        self.total_degree.push(0.0);
        self.internal_weight.push(0.0);
        self.size.push(0);
        c
    }

    /// Accumulates `e_{v,C}` for every community adjacent to `v` into a
    /// reusable scan buffer.
    pub fn scan_neighbor_communities_into(
        &self,
        g: &Graph,
        v: NodeId,
        scan: &mut NeighborCommunityScan,
    ) {
        scan.reset(self.community_capacity());
        for (u, w) in g.neighbors(v) {
            scan.add(self.community_of[u as usize], w);
        }
    }

    /// Allocating convenience wrapper around
    /// [`Partition::scan_neighbor_communities_into`].
    pub fn scan_neighbor_communities(&self, g: &Graph, v: NodeId) -> NeighborCommunityScan {
        let mut scan = NeighborCommunityScan::new();
        self.scan_neighbor_communities_into(g, v, &mut scan);
        scan
    }

    /// Moves `v` into `target`, updating aggregates incrementally. `scan`
    /// must be a fresh scan for `v`, and `target` must be either non-empty
    /// or freshly allocated via [`Partition::fresh_community`]. Returns
    /// false (and changes nothing) when `target` is already `v`'s community.
    pub fn move_node(&mut self, g: &Graph, v: NodeId, target: CommunityId, scan: &NeighborCommunityScan) -> bool {
        let current = self.community_of[v as usize];
        if current == target {
            return false;
        }
        let d_v = g.degree(v);
        let loop_v = g.self_loop_weight(v);

        let cur = current as usize;
        self.total_degree[cur] -= d_v;
        self.internal_weight[cur] -= scan.weight_to(current) + loop_v;
        self.size[cur] -= 1;
        if self.size[cur] == 0 {
            // exact zero regardless of float history
            self.total_degree[cur] = 0.0;
            self.internal_weight[cur] = 0.0;
            self.free.push(current);
            self.nonempty -= 1;
        }

        let tgt = target as usize;
        if self.size[tgt] == 0 {
            self.nonempty += 1;
        }
        self.total_degree[tgt] += d_v;
        self.internal_weight[tgt] += scan.weight_to(target) + loop_v;
        self.size[tgt] += 1;
        self.community_of[v as usize] = target;
        true
    }

    /// True iff the subgraph induced by community `c` is connected.
    pub fn is_community_connected(&self, g: &Graph, c: CommunityId) -> bool {
        let members = self.members_of(c);
        if members.len() <= 1 {
            return true;
        }
        connected_components(g, &members).len() == 1
    }

    /// Dense community labels by first occurrence over node order; the form
    /// used by writers and ground-truth comparisons.
    pub fn dense_membership(&self) -> Vec<CommunityId> {
        let mut dense = vec![NO_ENTRY; self.community_capacity()];
        let mut out = Vec::with_capacity(self.node_count());
        let mut next = 0 as CommunityId;
        for &c in &self.community_of {
            if dense[c as usize] == NO_ENTRY {
                dense[c as usize] = next;
                next += 1;
            }
            out.push(dense[c as usize]);
        }
        out
    }

    /// Recounts every aggregate from the adjacency and compares exactly.
    pub fn audit(&self, g: &Graph) -> std::result::Result<(), String> {
        let n = g.node_count();
        if self.community_of.len() != n {
            return Err("node count mismatch".into());
        }
        let cap = self.community_capacity();
        let mut total_degree = vec![0.0; cap];
        let mut internal = vec![0.0; cap];
        let mut size = vec![0u32; cap];
        for v in 0..n {
            let c = self.community_of[v] as usize;
            total_degree[c] += g.degree(v as NodeId);
            internal[c] += g.self_loop_weight(v as NodeId);
            size[c] += 1;
        }
        for u in 0..n as NodeId {
            for (v, w) in g.neighbors(u) {
                if v > u && self.community_of[u as usize] == self.community_of[v as usize] {
                    internal[self.community_of[u as usize] as usize] += w;
                }
            }
        }
        for c in 0..cap {
            if size[c] != self.size[c] {
                return Err(format!("community {c}: size {} != {}", self.size[c], size[c]));
            }
            if size[c] == 0 {
                continue;
            }
            if total_degree[c] != self.total_degree[c] {
                return Err(format!(
                    "community {c}: total degree {} != {}",
                    self.total_degree[c], total_degree[c]
                ));
            }
            if internal[c] != self.internal_weight[c] {
                return Err(format!(
                    "community {c}: internal weight {} != {}",
                    self.internal_weight[c], internal[c]
                ));
            }
        }
        let nonempty = size.iter().filter(|&&s| s > 0).count();
        if nonempty != self.nonempty {
            return Err(format!("community count {} != {nonempty}", self.nonempty));
        }
        Ok(())
    }
}

/// Writes `node_label community_id` lines, one per node in internal id
/// order, with communities densely renumbered by first occurrence.
pub fn write_membership<W: Write>(
    p: &Partition,
    labels: &NodeLabelMap,
    mut out: W,
) -> std::io::Result<()> {
    let dense = p.dense_membership();
    for v in 0..p.node_count() {
        writeln!(out, "{} {}", labels.label(v as NodeId), dense[v])?;
    }
    Ok(())
}

/// Reads a membership file (`node_label community_id` per line; the LFR
/// `community.dat` layout parses identically). Every graph node must be
/// assigned exactly once.
pub fn read_membership<R: BufRead>(reader: R, labels: &NodeLabelMap) -> Result<Vec<CommunityId>> {
    let mut assigned: Vec<Option<CommunityId>> = vec![None; labels.len()];
    for (idx, line) in reader.lines().enumerate() {
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
                message: format!("expected 2 tokens, found {}", tokens.len()),
            });
        }
        let node = labels.id(tokens[0]).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("unknown node label '{}'", tokens[0]),
        })?;
        let community: CommunityId = tokens[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("non-integer community id '{}'", tokens[1]),
        })?;
        if assigned[node as usize].is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("node '{}' assigned more than once", tokens[0]),
            });
        }
        assigned[node as usize] = Some(community);
    }
    assigned
        .into_iter()
        .enumerate()
        .map(|(v, c)| {
            c.ok_or_else(|| Error::Data(format!("node '{}' missing from membership", labels.label(v as NodeId))))
        })
        .collect()
}
