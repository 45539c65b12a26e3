//! The fast-local-move iterated greedy engine.
//!
//! A run builds an initial solution with a queue-driven local move over a
//! random node order, then iterates destruction (eject a fraction of nodes
//! to singletons) and reconstruction (stochastic greedy reinsertion followed
//! by refine/condense/local-move cycles), accepting candidates under a
//! simulated-annealing criterion with geometric cooling.
//!
//! Runs are deterministic per seed. All randomness flows through a single
//! ChaCha8 stream in a fixed order: initial candidate-list shuffle, then per
//! outer iteration the destruction sample, reinsertion draw order and
//! community sampling, one queue shuffle per condensation level, and the
//! acceptance draw (consumed only when the candidate does not improve).

use std::collections::VecDeque;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{condense, connected_components, Graph, NodeId};
use crate::partition::{CommunityId, NeighborCommunityScan, Partition};
use crate::quality::{modularity, move_gain, Resolution};

/// Deterministic proxy clock: one modularity-gain evaluation is booked as
/// 10ns. Trace files use it by default so identical runs are byte-identical;
/// see `TimingMode` in the harness.
pub const VIRTUAL_SECONDS_PER_GAIN_EVALUATION: f64 = 1e-8;

/// Tunables for one run.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    /// Destruction fraction: round(beta * n) nodes are ejected per iteration.
    pub beta: f64,
    /// Softmax temperature of reinsertion community sampling.
    pub epsilon: f64,
    pub rho: Resolution,
    /// Stop after this many consecutive iterations without best-Q improvement.
    pub stall_limit: u32,
    /// Optional hard cap on outer iterations.
    pub max_iterations: Option<u64>,
    pub seed: u64,
    /// Initial acceptance temperature as a fraction of the initial solution's
    /// modularity.
    pub t0_factor: f64,
    /// Geometric cooling multiplier applied once per outer iteration.
    pub cooling: f64,
    pub min_temperature: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            beta: 0.5,
            epsilon: 0.01,
            rho: Resolution::default(),
            stall_limit: 100,
            max_iterations: None,
            seed: 0,
            t0_factor: 0.025,
            cooling: 0.9,
            min_temperature: 1e-9,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidConfig(format!("beta must be in (0, 1), got {}", self.beta)));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidConfig(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if self.stall_limit == 0 {
            return Err(Error::InvalidConfig("stall limit must be positive".into()));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidConfig("iteration cap must be positive".into()));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::InvalidConfig(format!("cooling must be in (0, 1), got {}", self.cooling)));
        }
        if !(self.min_temperature > 0.0) {
            return Err(Error::InvalidConfig("minimum temperature must be positive".into()));
        }
        if !self.t0_factor.is_finite() {
            return Err(Error::InvalidConfig("t0 factor must be finite".into()));
        }
        Ok(())
    }
}

/// One line of the convergence trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceRecord {
    pub iteration: u64,
    /// Wall-clock seconds since the run started.
    pub elapsed_seconds: f64,
    /// Deterministic proxy elapsed time (gain evaluations x 10ns).
    pub virtual_seconds: f64,
    pub q_current: f64,
    pub q_best: f64,
    pub temperature: f64,
}

/// Cumulative wall-clock time spent in each phase of a run.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseTimings {
    pub initial_seconds: f64,
    pub destruction_seconds: f64,
    pub reconstruction_seconds: f64,
    pub evaluation_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug)]
pub struct RunResult {
    pub best_partition: Partition,
    pub best_q: f64,
    pub iterations: u64,
    pub gain_evaluations: u64,
    pub timings: PhaseTimings,
    pub trace: Vec<TraceRecord>,
}

/// Singleton partition over a random candidate order, improved by
/// [`fast_local_move`].
pub fn generate_initial_solution<R: Rng>(
    g: &Graph,
    cfg: &RunConfig,
    rng: &mut R,
    gain_evaluations: &mut u64,
) -> Result<Partition> {
    if !g.has_edges() {
        return Err(Error::EdgelessGraph);
    }
    let mut p = Partition::singletons(g);
    let mut order: Vec<NodeId> = (0..g.node_count() as NodeId).collect();
    order.shuffle(rng);
    fast_local_move(g, &mut p, cfg.rho, &order, gain_evaluations);
    Ok(p)
}

/// Queue-driven local move. Dequeues a node, moves it to the adjacent
/// community with the largest positive modularity gain (ties to the smallest
/// community id), and re-enqueues its neighbors outside the chosen
/// community. Draining the queue leaves a small set of nodes whose gains
/// were raised indirectly (degree totals shifting under them), so full
/// certification sweeps run until one finds nothing; on return no move of a
/// single node to a neighboring community has positive gain.
///
/// Returns the number of moves performed. Isolated nodes are never enqueued
/// and never move.
pub fn fast_local_move(
    g: &Graph,
    p: &mut Partition,
    rho: Resolution,
    initial_queue: &[NodeId],
    gain_evaluations: &mut u64,
) -> u64 {
    let n = g.node_count();
    if n == 0 || !g.has_edges() {
        return 0;
    }
    let m = g.total_weight_2m() / 2.0;
    let mut in_queue = vec![false; n];
    let mut queue: VecDeque<NodeId> = VecDeque::with_capacity(n);
    for &v in initial_queue {
        if !in_queue[v as usize] && g.neighbor_count(v) > 0 {
            in_queue[v as usize] = true;
            queue.push_back(v);
        }
    }
    let mut scan = NeighborCommunityScan::new();
    let mut moves = 0u64;

    loop {
        while let Some(v) = queue.pop_front() {
            in_queue[v as usize] = false;
            if let Some(target) = best_move(g, p, rho, m, v, &mut scan, gain_evaluations) {
                p.move_node(g, v, target, &scan);
                moves += 1;
                for (u, _) in g.neighbors(v) {
                    if p.community_of(u) != target && !in_queue[u as usize] && g.neighbor_count(u) > 0 {
                        in_queue[u as usize] = true;
                        queue.push_back(u);
                    }
                }
            }
        }

        // certification sweep
        let mut fixups = 0u64;
        for v in 0..n as NodeId {
            if g.neighbor_count(v) == 0 {
                continue;
            }
            if let Some(target) = best_move(g, p, rho, m, v, &mut scan, gain_evaluations) {
                p.move_node(g, v, target, &scan);
                moves += 1;
                fixups += 1;
                for (u, _) in g.neighbors(v) {
                    if p.community_of(u) != target && !in_queue[u as usize] && g.neighbor_count(u) > 0 {
                        in_queue[u as usize] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        if fixups == 0 {
            break;
        }
    }
    moves
}

/// Best positive-gain neighbor community for `v`, if any. Leaves `scan`
/// holding a fresh scan of `v`.
pub(crate) fn best_move(
    g: &Graph,
    p: &Partition,
    rho: Resolution,
    m: f64,
    v: NodeId,
    scan: &mut NeighborCommunityScan,
    gain_evaluations: &mut u64,
) -> Option<CommunityId> {
    p.scan_neighbor_communities_into(g, v, scan);
    let current = p.community_of(v);
    let e_current = scan.weight_to(current);
    let d_v = g.degree(v);
    let dtot_current_without_v = p.community_total_degree(current) - d_v;
    let mut best: Option<(CommunityId, f64)> = None;
    for &(c, e_c) in scan.entries() {
        if c == current {
            continue;
        }
        *gain_evaluations += 1;
        let gain = move_gain(
            m,
            rho.get(),
            d_v,
            e_c,
            e_current,
            p.community_total_degree(c),
            dtot_current_without_v,
        );
        let better = match best {
            None => gain > 0.0,
            Some((bc, bg)) => gain > bg || (gain == bg && c < bc),
        };
        if better {
            best = Some((c, gain));
        }
    }
    best.map(|(c, _)| c)
}

/// Ejects `round(beta * n)` distinct nodes (at least one while `beta > 0`),
/// sampled uniformly without replacement, each into a fresh singleton
/// community. Returns the ejected nodes in removal order; empty when the
/// count comes out zero, in which case the partition is untouched.
pub fn destruct<R: Rng>(g: &Graph, p: &mut Partition, cfg: &RunConfig, rng: &mut R) -> Vec<NodeId> {
    let n = g.node_count();
    let count = if cfg.beta > 0.0 {
        (((cfg.beta * n as f64).round() as usize).max(1)).min(n)
    } else {
        0
    };
    if count == 0 {
        return Vec::new();
    }

    // partial Fisher-Yates: the first `count` slots are a uniform sample
    let mut nodes: Vec<NodeId> = (0..n as NodeId).collect();
    for i in 0..count {
        let j = rng.gen_range(i..n);
        nodes.swap(i, j);
    }
    nodes.truncate(count);

    let mut scan = NeighborCommunityScan::new();
    for &v in &nodes {
        if p.community_size(p.community_of(v)) > 1 {
            let fresh = p.fresh_community();
            p.scan_neighbor_communities_into(g, v, &mut scan);
            p.move_node(g, v, fresh, &scan);
        }
    }
    nodes
}

/// A candidate community for reinsertion together with its move gain.
#[derive(Debug, Clone, Copy)]
pub struct GainCandidate {
    pub community: CommunityId,
    pub gain: f64,
}

/// Samples a community with probability proportional to `exp(gain / epsilon)`
/// over candidates with nonnegative gain; negative-gain candidates are
/// excluded entirely. Returns `None` when no candidate is admissible (the
/// caller leaves the node in its singleton).
pub fn select_random_community<R: Rng>(
    candidates: &[GainCandidate],
    epsilon: f64,
    rng: &mut R,
) -> Option<CommunityId> {
    let max_gain = candidates
        .iter()
        .filter(|c| c.gain >= 0.0)
        .map(|c| c.gain)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_gain == f64::NEG_INFINITY {
        return None;
    }
    // shift by the max before exponentiating so weights stay in (0, 1]
    let mut total = 0.0;
    for c in candidates {
        if c.gain >= 0.0 {
            total += ((c.gain - max_gain) / epsilon).exp();
        }
    }
    let mut draw = rng.gen::<f64>() * total;
    let mut chosen = None;
    for c in candidates {
        if c.gain < 0.0 {
            continue;
        }
        chosen = Some(c.community);
        draw -= ((c.gain - max_gain) / epsilon).exp();
        if draw <= 0.0 {
            break;
        }
    }
    chosen
}

/// Rebuilds a solution after destruction. Phase one draws ejected nodes in
/// random order and, whenever some adjacent community has positive gain,
/// reinserts stochastically via [`select_random_community`]. Phase two
/// alternates refinement, condensation, and a condensed-level local move,
/// projecting back down, until modularity stops improving.
pub fn reconstruct<R: Rng>(
    g: &Graph,
    p: &mut Partition,
    ejected: Vec<NodeId>,
    cfg: &RunConfig,
    rng: &mut R,
    gain_evaluations: &mut u64,
) {
    debug_assert!(g.has_edges());
    let m = g.total_weight_2m() / 2.0;
    let mut scan = NeighborCommunityScan::new();
    let mut candidates: Vec<GainCandidate> = Vec::new();

    let mut pending = ejected;
    while !pending.is_empty() {
        let idx = rng.gen_range(0..pending.len());
        let v = pending.swap_remove(idx);
        if g.neighbor_count(v) == 0 {
            continue;
        }
        p.scan_neighbor_communities_into(g, v, &mut scan);
        let current = p.community_of(v);
        let e_current = scan.weight_to(current);
        let d_v = g.degree(v);
        let dtot_current_without_v = p.community_total_degree(current) - d_v;
        candidates.clear();
        let mut max_gain = f64::NEG_INFINITY;
        for &(c, e_c) in scan.entries() {
            if c == current {
                continue;
            }
            *gain_evaluations += 1;
            let gain = move_gain(
                m,
                cfg.rho.get(),
                d_v,
                e_c,
                e_current,
                p.community_total_degree(c),
                dtot_current_without_v,
            );
            max_gain = max_gain.max(gain);
            candidates.push(GainCandidate { community: c, gain });
        }
        if max_gain > 0.0 {
            let target = select_random_community(&candidates, cfg.epsilon, rng)
                .expect("a positive-gain candidate is admissible");
            p.move_node(g, v, target, &scan);
        }
    }

    let mut q = modularity(g, p, cfg.rho).expect("graph has edges");
    loop {
        refine_communities(g, p, cfg.rho, gain_evaluations);

        let condensed = condense(g, p);
        let mut level = Partition::singletons(&condensed.graph);
        let mut order: Vec<NodeId> = (0..condensed.graph.node_count() as NodeId).collect();
        order.shuffle(rng);
        fast_local_move(&condensed.graph, &mut level, cfg.rho, &order, gain_evaluations);

        let membership: Vec<CommunityId> = (0..g.node_count())
            .map(|v| {
                let super_node = condensed.node_of_community[p.community_of(v as NodeId) as usize];
                level.community_of(super_node)
            })
            .collect();
        *p = Partition::from_membership(g, &membership).expect("projection covers every node");

        let q_new = modularity(g, p, cfg.rho).expect("graph has edges");
        if q_new > q {
            q = q_new;
        } else {
            break;
        }
    }
}

/// Splits every internally disconnected community into its connected
/// components, then runs a local-move pass over the affected nodes; repeats
/// until every community induces a connected subgraph.
pub fn refine_communities(
    g: &Graph,
    p: &mut Partition,
    rho: Resolution,
    gain_evaluations: &mut u64,
) {
    let mut scan = NeighborCommunityScan::new();
    loop {
        let mut affected: Vec<NodeId> = Vec::new();
        for c in p.communities().collect::<Vec<_>>() {
            let members = p.members_of(c);
            if members.len() <= 1 {
                continue;
            }
            let components = connected_components(g, &members);
            if components.len() == 1 {
                continue;
            }
            affected.extend_from_slice(&members);
            // the first component keeps the community id
            for component in &components[1..] {
                let fresh = p.fresh_community();
                for &v in component {
                    p.scan_neighbor_communities_into(g, v, &mut scan);
                    p.move_node(g, v, fresh, &scan);
                }
            }
        }
        if affected.is_empty() {
            return;
        }
        affected.sort_unstable();
        fast_local_move(g, p, rho, &affected, gain_evaluations);
    }
}

/// Simulated-annealing acceptance: improvements always pass, otherwise pass
/// with probability `exp((candidate - incumbent) / temperature)`.
pub fn accept<R: Rng>(candidate_q: f64, incumbent_q: f64, temperature: f64, rng: &mut R) -> bool {
    debug_assert!(temperature > 0.0);
    if candidate_q > incumbent_q {
        return true;
    }
    rng.gen::<f64>() < ((candidate_q - incumbent_q) / temperature).exp()
}

/// Full FLMIG run: initial solution, then destruct/reconstruct iterations
/// under simulated-annealing acceptance until `stall_limit` consecutive
/// iterations bring no improvement of the best modularity (or the optional
/// iteration cap is hit). Identical seed and input give identical output.
pub fn run_flmig(g: &Graph, cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    if !g.has_edges() {
        return Err(Error::EdgelessGraph);
    }
    let started = Instant::now();
    let mut timings = PhaseTimings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut evals = 0u64;

    let phase = Instant::now();
    let mut current = generate_initial_solution(g, cfg, &mut rng, &mut evals)?;
    timings.initial_seconds = phase.elapsed().as_secs_f64();

    let mut q_current = modularity(g, &current, cfg.rho)?;
    let mut best = current.clone();
    let mut q_best = q_current;
    let mut temperature = (cfg.t0_factor * q_current).max(cfg.min_temperature);

    let mut trace = vec![TraceRecord {
        iteration: 0,
        elapsed_seconds: started.elapsed().as_secs_f64(),
        virtual_seconds: evals as f64 * VIRTUAL_SECONDS_PER_GAIN_EVALUATION,
        q_current,
        q_best,
        temperature,
    }];

    let cap = cfg.max_iterations.unwrap_or(u64::MAX);
    let mut iteration = 0u64;
    let mut stall = 0u32;
    while stall < cfg.stall_limit && iteration < cap {
        iteration += 1;

        let phase = Instant::now();
        let mut candidate = current.clone();
        let ejected = destruct(g, &mut candidate, cfg, &mut rng);
        timings.destruction_seconds += phase.elapsed().as_secs_f64();

        let phase = Instant::now();
        reconstruct(g, &mut candidate, ejected, cfg, &mut rng, &mut evals);
        timings.reconstruction_seconds += phase.elapsed().as_secs_f64();

        let phase = Instant::now();
        let q_candidate = modularity(g, &candidate, cfg.rho)?;
        if accept(q_candidate, q_current, temperature, &mut rng) {
            current = candidate;
            q_current = q_candidate;
        }
        if q_current > q_best {
            q_best = q_current;
            best = current.clone();
            stall = 0;
        } else {
            stall += 1;
        }
        timings.evaluation_seconds += phase.elapsed().as_secs_f64();

        trace.push(TraceRecord {
            iteration,
            elapsed_seconds: started.elapsed().as_secs_f64(),
            virtual_seconds: evals as f64 * VIRTUAL_SECONDS_PER_GAIN_EVALUATION,
            q_current,
            q_best,
            temperature,
        });
        temperature = (temperature * cfg.cooling).max(cfg.min_temperature);
    }
    timings.total_seconds = started.elapsed().as_secs_f64();

    Ok(RunResult {
        best_partition: best,
        best_q: q_best,
        iterations: iteration,
        gain_evaluations: evals,
        timings,
        trace,
    })
}
