//! Partition quality: modularity, the exact incremental modularity gain for
//! single-node moves, and normalized mutual information against ground
//! truth. A literal quadratic reference implementation of modularity is kept
//! alongside as the test oracle for the aggregate-based fast path.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::partition::{CommunityId, NeighborCommunityScan, Partition};

/// Resolution parameter: 1 is classic modularity, larger values favor more,
/// smaller communities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution(f64);

impl Resolution {
    pub fn new(rho: f64) -> Result<Resolution> {
        if rho.is_finite() && rho > 0.0 {
            Ok(Resolution(rho))
        } else {
            Err(Error::InvalidConfig(format!("resolution must be > 0, got {rho}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution(1.0)
    }
}

/// Modularity from per-community aggregates:
/// `Q = sum_C [ w_C / m  -  rho * (d_C / 2m)^2 ]`.
pub fn modularity(g: &Graph, p: &Partition, rho: Resolution) -> Result<f64> {
    if !g.has_edges() {
        return Err(Error::EdgelessGraph);
    }
    let two_m = g.total_weight_2m();
    let m = two_m / 2.0;
    let mut q = 0.0;
    for c in p.communities() {
        let w_c = p.community_internal_weight(c);
        let d_c = p.community_total_degree(c);
        q += w_c / m - rho.get() * (d_c / two_m) * (d_c / two_m);
    }
    Ok(q)
}

/// Single-move gain, factored so hot loops can feed aggregate values
/// directly. `e_new`/`e_old` are the mover's edge weights into the target
/// and into the rest of its current community; `dtot_old_without_v` already
/// excludes the mover's degree.
#[inline]
pub(crate) fn move_gain(
    m: f64,
    rho: f64,
    d_v: f64,
    e_new: f64,
    e_old: f64,
    dtot_new: f64,
    dtot_old_without_v: f64,
) -> f64 {
    (e_new - e_old) / m - rho * d_v * (dtot_new - dtot_old_without_v) / (2.0 * m * m)
}

/// Exact modularity change for moving `v` into `target`:
/// `modularity(after) - modularity(before)`. `scan` must be fresh for `v`
/// and `target` must differ from `v`'s current community.
pub fn modularity_gain(
    g: &Graph,
    p: &Partition,
    v: NodeId,
    target: CommunityId,
    scan: &NeighborCommunityScan,
    rho: Resolution,
) -> f64 {
    let current = p.community_of(v);
    debug_assert_ne!(current, target);
    let m = g.total_weight_2m() / 2.0;
    let d_v = g.degree(v);
    move_gain(
        m,
        rho.get(),
        d_v,
        scan.weight_to(target),
        scan.weight_to(current),
        p.community_total_degree(target),
        p.community_total_degree(current) - d_v,
    )
}

/// Literal O(n^2) evaluation of the Kronecker-delta double sum. Test oracle
/// for [`modularity`]; self-loops enter the adjacency diagonal with weight
/// doubled so row sums reproduce the degrees.
pub fn modularity_reference(g: &Graph, p: &Partition, rho: Resolution) -> Result<f64> {
    if !g.has_edges() {
        return Err(Error::EdgelessGraph);
    }
    let n = g.node_count();
    let two_m = g.total_weight_2m();
    let mut adj = vec![vec![0.0; n]; n];
    for u in 0..n as NodeId {
        adj[u as usize][u as usize] += 2.0 * g.self_loop_weight(u);
        for (v, w) in g.neighbors(u) {
            adj[u as usize][v as usize] += w;
        }
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if p.community_of(i as NodeId) != p.community_of(j as NodeId) {
                continue;
            }
            let expected = rho.get() * g.degree(i as NodeId) * g.degree(j as NodeId) / two_m;
            q += adj[i][j] - expected;
        }
    }
    Ok(q / two_m)
}

/// Ground-truth style community labels, one per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPartition {
    labels: Vec<CommunityId>,
}

impl LabeledPartition {
    pub fn new(labels: Vec<CommunityId>) -> Result<LabeledPartition> {
        if labels.is_empty() {
            return Err(Error::Data("labeled partition must cover at least one node".into()));
        }
        Ok(LabeledPartition { labels })
    }

    pub fn from_partition(p: &Partition) -> LabeledPartition {
        LabeledPartition {
            labels: p.dense_membership(),
        }
    }

    pub fn labels(&self) -> &[CommunityId] {
        &self.labels
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn community_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        self.labels.iter().for_each(|&c| {
            seen.insert(c);
        });
        seen.len()
    }
}

/// Joint community membership counts between two labelings of one node set.
#[derive(Debug)]
pub struct ContingencyTable {
    cells: BTreeMap<(CommunityId, CommunityId), u64>,
    row_sums: BTreeMap<CommunityId, u64>,
    col_sums: BTreeMap<CommunityId, u64>,
    n: u64,
}

impl ContingencyTable {
    pub fn build(a: &LabeledPartition, b: &LabeledPartition) -> Result<ContingencyTable> {
        if a.node_count() != b.node_count() {
            return Err(Error::Data(format!(
                "partitions cover different node sets ({} vs {})",
                a.node_count(),
                b.node_count()
            )));
        }
        let mut cells: BTreeMap<(CommunityId, CommunityId), u64> = BTreeMap::new();
        let mut row_sums: BTreeMap<CommunityId, u64> = BTreeMap::new();
        let mut col_sums: BTreeMap<CommunityId, u64> = BTreeMap::new();
        for (&ca, &cb) in a.labels().iter().zip(b.labels()) {
            *cells.entry((ca, cb)).or_insert(0) += 1;
            *row_sums.entry(ca).or_insert(0) += 1;
            *col_sums.entry(cb).or_insert(0) += 1;
        }
        Ok(ContingencyTable {
            cells,
            row_sums,
            col_sums,
            n: a.node_count() as u64,
        })
    }

    fn is_permutation(&self) -> bool {
        self.cells.len() == self.row_sums.len() && self.cells.len() == self.col_sums.len()
    }
}

/// Normalized mutual information between two labelings, in `[0, 1]`.
///
/// Identical partitions (up to relabeling) score exactly 1, including the
/// degenerate case where both sides put everything in one community; if only
/// one side is all-in-one the mutual information vanishes and the score is 0.
pub fn nmi(a: &LabeledPartition, b: &LabeledPartition) -> Result<f64> {
    let table = ContingencyTable::build(a, b)?;
    if table.is_permutation() {
        return Ok(1.0);
    }
    let n = table.n as f64;
    let mut mutual = 0.0;
    for (&(ca, cb), &count) in &table.cells {
        let m_ij = count as f64;
        let m_i = table.row_sums[&ca] as f64;
        let m_j = table.col_sums[&cb] as f64;
        mutual += m_ij * (n * m_ij / (m_i * m_j)).ln();
    }
    let mut entropy = 0.0;
    for &m_i in table.row_sums.values() {
        let m_i = m_i as f64;
        entropy -= m_i * (m_i / n).ln();
    }
    for &m_j in table.col_sums.values() {
        let m_j = m_j as f64;
        entropy -= m_j * (m_j / n).ln();
    }
    if entropy == 0.0 {
        // both sides all-in-one and not caught as a permutation table
        return Ok(1.0);
    }
    Ok((2.0 * mutual / entropy).clamp(0.0, 1.0))
}
