//! Reference algorithms for head-to-head evaluation: classic sweep-based
//! Louvain, Louvain with the queue-driven local move at every level, and
//! asynchronous label propagation.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{best_move, fast_local_move, PhaseTimings, RunConfig, RunResult, TraceRecord, VIRTUAL_SECONDS_PER_GAIN_EVALUATION};
use crate::error::{Error, Result};
use crate::graph::{condense, Graph, NodeId};
use crate::partition::Partition;
use crate::quality::{modularity, Resolution};

/// Baseline algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineChoice {
    Louvain,
    LouvainPrune,
    Lpa,
}

pub fn run_baseline(choice: BaselineChoice, g: &Graph, cfg: &RunConfig) -> Result<RunResult> {
    match choice {
        BaselineChoice::Louvain => run_louvain(g, cfg),
        BaselineChoice::LouvainPrune => run_louvain_prune(g, cfg),
        BaselineChoice::Lpa => run_lpa(g, cfg),
    }
}

/// Classic two-phase Louvain: full sweeps over a shuffled node order until a
/// pass makes no move, then condense and repeat while modularity grows.
pub fn run_louvain(g: &Graph, cfg: &RunConfig) -> Result<RunResult> {
    multilevel(g, cfg, LocalPhase::Sweep)
}

/// Louvain with the sweep replaced by the fast-local-move queue discipline
/// at every level. Faster in gain evaluations; communities may come out
/// internally disconnected, which FLMIG's refinement exists to repair.
pub fn run_louvain_prune(g: &Graph, cfg: &RunConfig) -> Result<RunResult> {
    multilevel(g, cfg, LocalPhase::Queue)
}

enum LocalPhase {
    Sweep,
    Queue,
}

fn multilevel(g: &Graph, cfg: &RunConfig, phase: LocalPhase) -> Result<RunResult> {
    if !g.has_edges() {
        return Err(Error::EdgelessGraph);
    }
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut evals = 0u64;
    let n = g.node_count();

    // original node -> node id in the current (condensed) level
    let mut mapping: Vec<NodeId> = (0..n as NodeId).collect();
    let mut owned: Option<Graph> = None;
    let mut trace: Vec<TraceRecord> = Vec::new();
    let mut level = 0u64;

    loop {
        let gl: &Graph = owned.as_ref().unwrap_or(g);
        let mut p = Partition::singletons(gl);
        let mut order: Vec<NodeId> = (0..gl.node_count() as NodeId).collect();
        order.shuffle(&mut rng);
        let moves = match phase {
            LocalPhase::Sweep => sweep_local_move(gl, &mut p, cfg.rho, &order, &mut evals),
            LocalPhase::Queue => fast_local_move(gl, &mut p, cfg.rho, &order, &mut evals),
        };
        level += 1;
        let q = modularity(gl, &p, cfg.rho)?;
        trace.push(TraceRecord {
            iteration: level,
            elapsed_seconds: started.elapsed().as_secs_f64(),
            virtual_seconds: evals as f64 * VIRTUAL_SECONDS_PER_GAIN_EVALUATION,
            q_current: q,
            q_best: q,
            temperature: 0.0,
        });
        if moves == 0 {
            break;
        }
        let condensed = condense(gl, &p);
        for v in 0..n {
            mapping[v] = condensed.node_of_community[p.community_of(mapping[v]) as usize];
        }
        if condensed.graph.node_count() == gl.node_count() {
            break;
        }
        owned = Some(condensed.graph);
    }

    let best_partition = Partition::from_membership(g, &mapping)?;
    let best_q = modularity(g, &best_partition, cfg.rho)?;
    let timings = PhaseTimings {
        total_seconds: started.elapsed().as_secs_f64(),
        ..PhaseTimings::default()
    };
    Ok(RunResult {
        best_partition,
        best_q,
        iterations: level,
        gain_evaluations: evals,
        timings,
        trace,
    })
}

fn sweep_local_move(
    g: &Graph,
    p: &mut Partition,
    rho: Resolution,
    order: &[NodeId],
    evals: &mut u64,
) -> u64 {
    let m = g.total_weight_2m() / 2.0;
    let mut scan = crate::partition::NeighborCommunityScan::new();
    let mut total = 0u64;
    loop {
        let mut moved = 0u64;
        for &v in order {
            if g.neighbor_count(v) == 0 {
                continue;
            }
            if let Some(target) = best_move(g, p, rho, m, v, &mut scan, evals) {
                p.move_node(g, v, target, &scan);
                moved += 1;
            }
        }
        total += moved;
        if moved == 0 {
            return total;
        }
    }
}

/// Asynchronous label propagation: random node order per round, each node
/// adopts a maximal-weight neighbor label with ties broken uniformly at
/// random, keeping its label whenever that label is already maximal. Stops
/// on a stable round, capped at 100 rounds.
pub fn run_lpa(g: &Graph, cfg: &RunConfig) -> Result<RunResult> {
    const ROUND_CAP: u64 = 100;
    if !g.has_edges() {
        return Err(Error::EdgelessGraph);
    }
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = g.node_count();
    let mut labels: Vec<u32> = (0..n as u32).collect();

    // sparse accumulator over labels, reset between nodes
    let mut weight_of = vec![0.0f64; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut maximal: Vec<u32> = Vec::new();

    let mut trace: Vec<TraceRecord> = Vec::new();
    let mut rounds = 0u64;
    let mut q_best = f64::NEG_INFINITY;
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();

    while rounds < ROUND_CAP {
        rounds += 1;
        order.shuffle(&mut rng);
        let mut changed = false;
        for &v in &order {
            if g.neighbor_count(v) == 0 {
                continue;
            }
            touched.clear();
            for (u, w) in g.neighbors(v) {
                let label = labels[u as usize];
                if !seen[label as usize] {
                    seen[label as usize] = true;
                    touched.push(label);
                }
                weight_of[label as usize] += w;
            }
            let max_weight = touched
                .iter()
                .map(|&l| weight_of[l as usize])
                .fold(0.0f64, f64::max);
            maximal.clear();
            maximal.extend(touched.iter().copied().filter(|&l| weight_of[l as usize] == max_weight));
            let current = labels[v as usize];
            if !maximal.contains(&current) {
                labels[v as usize] = maximal[rng.gen_range(0..maximal.len())];
                changed = true;
            }
            for &l in &touched {
                weight_of[l as usize] = 0.0;
                seen[l as usize] = false;
            }
        }

        let p = Partition::from_membership(g, &labels)?;
        let q = modularity(g, &p, cfg.rho)?;
        q_best = q_best.max(q);
        trace.push(TraceRecord {
            iteration: rounds,
            elapsed_seconds: started.elapsed().as_secs_f64(),
            virtual_seconds: 0.0,
            q_current: q,
            q_best,
            temperature: 0.0,
        });
        if !changed {
            break;
        }
    }

    let best_partition = Partition::from_membership(g, &labels)?;
    let best_q = modularity(g, &best_partition, cfg.rho)?;
    let timings = PhaseTimings {
        total_seconds: started.elapsed().as_secs_f64(),
        ..PhaseTimings::default()
    };
    Ok(RunResult {
        best_partition,
        best_q,
        iterations: rounds,
        gain_evaluations: 0,
        timings,
        trace,
    })
}
