//! Synthetic benchmark graphs with planted community structure.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::quality::LabeledPartition;

/// Girvan-Newman planted-partition benchmark: equal-size communities, a
/// target expected degree, and a mixing fraction `u` of inter-community
/// connectivity.
#[derive(Debug, Clone, Copy)]
pub struct GnSpec {
    pub node_count: usize,
    pub communities: usize,
    pub community_size: usize,
    pub expected_degree: f64,
    /// Fraction of a node's connections that leave its community.
    pub mixing: f64,
}

impl GnSpec {
    /// The classic configuration: 128 nodes in four communities of 32 with
    /// expected degree 16.
    pub fn classic(mixing: f64) -> GnSpec {
        GnSpec {
            node_count: 128,
            communities: 4,
            community_size: 32,
            expected_degree: 16.0,
            mixing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count != self.communities * self.community_size {
            return Err(Error::InvalidConfig(format!(
                "node count {} != {} communities x {} nodes",
                self.node_count, self.communities, self.community_size
            )));
        }
        if self.community_size < 2 || self.communities < 2 {
            return Err(Error::InvalidConfig("need at least 2 communities of at least 2 nodes".into()));
        }
        if !(0.0..=1.0).contains(&self.mixing) {
            return Err(Error::InvalidConfig(format!("mixing must be in [0, 1], got {}", self.mixing)));
        }
        let (p_in, p_out) = self.edge_probabilities();
        if p_in > 1.0 || p_out > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "edge probabilities out of range (p_in = {p_in:.3}, p_out = {p_out:.3})"
            )));
        }
        Ok(())
    }

    /// Per-pair probabilities chosen so the expected degree splits as
    /// `(1-u)k` inside and `u k` outside the community.
    pub fn edge_probabilities(&self) -> (f64, f64) {
        let p_in = (1.0 - self.mixing) * self.expected_degree / (self.community_size as f64 - 1.0);
        let p_out =
            self.mixing * self.expected_degree / (self.node_count - self.community_size) as f64;
        (p_in, p_out)
    }
}

/// [`generate_gn`] with a fresh seeded stream; the instance is a pure
/// function of `(spec, seed)`.
pub fn generate_gn_seeded(spec: &GnSpec, seed: u64) -> Result<(Graph, LabeledPartition)> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    generate_gn(spec, &mut rng)
}

/// Samples a GN benchmark instance: independent Bernoulli edges at the
/// spec's `p_in`/`p_out`, plus the planted ground-truth labeling.
pub fn generate_gn<R: Rng>(spec: &GnSpec, rng: &mut R) -> Result<(Graph, LabeledPartition)> {
    spec.validate()?;
    let n = spec.node_count;
    let (p_in, p_out) = spec.edge_probabilities();
    let community = |v: usize| (v / spec.community_size) as u32;

    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if community(u) == community(v) { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u as NodeId, v as NodeId, 1.0));
            }
        }
    }
    let graph = Graph::from_weighted_edges(n, edges)?;
    let truth = LabeledPartition::new((0..n).map(community).collect())?;
    Ok((graph, truth))
}

/// Erdos-Renyi G(n, p) with unit weights; handy for randomized property
/// tests and the benchmark harness.
pub fn gnp<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((u as NodeId, v as NodeId, 1.0));
            }
        }
    }
    Graph::from_weighted_edges(n, edges).expect("generated edges are in range")
}
