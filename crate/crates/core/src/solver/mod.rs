//! Recursive MaxCut solvers built on the threshold search and the local
//! partitioner, plus their guaranteed-quality calculations.

use std::time::Duration;

use rand::{Rng, RngCore};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::bench::brute_force_extend;
use crate::error::{Error, Result};
use crate::graph::{Partition, Side, Tripartition, WeightedGraph};
use crate::threshold::{find_threshold, AlgoParams, FindResult};
use crate::walk::walk_rng;

pub mod balance;
pub mod quality;
pub mod simple;

pub use balance::balance_solve;
pub use simple::simple_solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// A threshold search succeeded and its tripartition was placed.
    Tripartition,
    /// A low-conductance block was cut out and solved on its own.
    LowConductance,
    /// The remainder was handed to the greedy completion.
    Fallback,
    /// The remainder was small enough to solve exactly.
    BruteForce,
}

/// One recursion level. Volumes are measured in the subgraph of that level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelLog {
    pub depth: usize,
    pub vertices: usize,
    pub eps: f64,
    pub branch: Branch,
    pub threshold: Option<f64>,
    pub classified_volume: f64,
    /// `1 − inc(Even, Odd) / w(E)` of the level's subgraph.
    pub xi: Option<f64>,
    pub conductance: Option<f64>,
    pub note: Option<String>,
}

impl LevelLog {
    fn new(depth: usize, vertices: usize, eps: f64, branch: Branch) -> Self {
        LevelLog {
            depth,
            vertices,
            eps,
            branch,
            threshold: None,
            classified_volume: 0.0,
            xi: None,
            conductance: None,
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub eps: f64,
    pub cut_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub algorithm: String,
    pub cut_value: f64,
    /// Deficit of the winning sweep entry, for `simple`.
    pub eps: Option<f64>,
    pub candidates: Vec<Candidate>,
    pub levels: Vec<LevelLog>,
    pub walks: u64,
    pub steps: u64,
    pub greedy_value: f64,
    /// The greedy baseline beat the solver's own cut and was returned instead.
    pub used_greedy: bool,
    #[serde(skip)]
    pub partition: Partition,
    /// Kept out of the serialized form so reports stay reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// `eps` and `mu` are set per call; the rest are used as given.
    pub params: AlgoParams,
    /// Probes per level; `⌈ln n⌉` when unset.
    pub probes: Option<usize>,
    /// Total walk steps across the whole solve.
    pub step_budget: u64,
    /// Return the greedy cut when it is better.
    pub greedy_fallback: bool,
    /// Subgraphs with at most this many vertices are solved exactly.
    pub brute_force_vertices: usize,
    /// Subgraphs with at most this much edge weight are solved exactly.
    pub brute_force_weight: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            params: AlgoParams::default(),
            probes: None,
            step_budget: 200_000_000,
            greedy_fallback: true,
            brute_force_vertices: 8,
            brute_force_weight: 16.0,
        }
    }
}

impl SolverConfig {
    pub fn probes_for(&self, n: usize) -> usize {
        self.probes.unwrap_or_else(|| (n.max(2) as f64).ln().ceil() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.probes == Some(0) {
            return Err(Error::InvalidParams("probes must be at least 1".into()));
        }
        if !(self.brute_force_weight >= 0.0) {
            return Err(Error::InvalidParams("brute force weight must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Independent sub-seed `index` of `seed`.
pub(crate) fn child_seed(seed: u64, index: u64) -> u64 {
    walk_rng(seed ^ 0x5bd1_e995_9e37_79b9, index).next_u64()
}

/// Assignment being built up level by level, over original vertex ids.
pub(crate) struct Placement {
    pub assignment: Vec<Option<bool>>,
    pub remaining: Vec<usize>,
}

impl Placement {
    pub fn new(n: usize) -> Self {
        Placement { assignment: vec![None; n], remaining: (0..n).collect() }
    }

    pub fn place(&mut self, v: usize, left: bool) {
        debug_assert!(self.assignment[v].is_none());
        self.assignment[v] = Some(left);
    }

    pub fn prune(&mut self) {
        let assignment = &self.assignment;
        self.remaining.retain(|&v| assignment[v].is_none());
    }

    /// Weight cut against already-placed vertices by `members` as given and
    /// with every side flipped.
    pub fn orientation_gain(&self, g: &WeightedGraph, members: &[(usize, bool)]) -> (f64, f64) {
        let (mut keep, mut flip) = (0.0, 0.0);
        for &(v, left) in members {
            for (u, w) in g.neighbors(v) {
                if let Some(other) = self.assignment[u] {
                    if other != left {
                        keep += w;
                    } else {
                        flip += w;
                    }
                }
            }
        }
        (keep, flip)
    }

    /// Places a tripartition of the subgraph on `remaining`: Even goes left
    /// when `even_left`.
    pub fn place_tripartition(&mut self, part: &Tripartition, even_left: bool) {
        for local in 0..part.len() {
            let v = self.remaining[local];
            match part.side(local) {
                Side::Even => self.place(v, even_left),
                Side::Odd => self.place(v, !even_left),
                Side::Unclassified => {}
            }
        }
    }

    pub fn is_small(&self, sub: &WeightedGraph, cfg: &SolverConfig) -> bool {
        sub.vertex_count() <= cfg.brute_force_vertices || sub.edge_weight() <= cfg.brute_force_weight
    }

    /// Exact completion of the remaining vertices; `false` when too many.
    pub fn brute_force(&mut self, g: &WeightedGraph) -> bool {
        match brute_force_extend(g, &self.assignment) {
            Ok(sides) => {
                for &v in &self.remaining {
                    self.assignment[v] = Some(sides[v]);
                }
                self.remaining.clear();
                true
            }
            Err(_) => false,
        }
    }

    pub fn finish(mut self, g: &WeightedGraph) -> Partition {
        crate::bench::greedy_extend(g, &mut self.assignment);
        Partition::new(self.assignment.into_iter().map(|s| s.unwrap_or(true)).collect())
    }
}

/// Probe starts drawn by degree from `sub`.
pub(crate) fn sample_probes(sub: &WeightedGraph, count: usize, rng: &mut Xoshiro256PlusPlus) -> Result<Vec<usize>> {
    (0..count).map(|_| sub.sample_vertex_by_degree(rng)).collect()
}

pub(crate) struct RoundOutcome {
    pub success: Option<(Tripartition, f64)>,
    pub walks: u64,
    pub steps: u64,
}

/// Runs the threshold search from each probe in order, each capped at an
/// equal share of `budget`, and keeps the first success. Earlier probes win,
/// which makes the result independent of scheduling.
pub(crate) fn find_round(
    sub: &WeightedGraph,
    params: &AlgoParams,
    probes: &[usize],
    seed: u64,
    budget: u64,
) -> Result<RoundOutcome> {
    let share = budget / probes.len().max(1) as u64;
    let mut out = RoundOutcome { success: None, walks: 0, steps: 0 };
    for (k, &start) in probes.iter().enumerate() {
        let found = find_threshold(sub, start, params, child_seed(seed, k as u64), share)?;
        out.walks += found.walks;
        out.steps += found.steps;
        if let FindResult::Success { part, threshold, .. } = found.result {
            out.success = Some((part, threshold));
            break;
        }
    }
    Ok(out)
}

/// Builds the final report, substituting the greedy cut if it is better.
pub(crate) fn finalize(
    g: &WeightedGraph,
    algorithm: &str,
    partition: Partition,
    cfg: &SolverConfig,
    started: std::time::Instant,
) -> SolveReport {
    let greedy = crate::bench::greedy_cut(g);
    let greedy_value = greedy.value(g);
    let own = partition.value(g);
    let (partition, used_greedy) =
        if cfg.greedy_fallback && greedy_value > own { (greedy, true) } else { (partition, false) };
    SolveReport {
        algorithm: algorithm.to_string(),
        cut_value: partition.value(g),
        eps: None,
        candidates: Vec::new(),
        levels: Vec::new(),
        walks: 0,
        steps: 0,
        greedy_value,
        used_greedy,
        partition,
        wall_time: started.elapsed(),
    }
}

pub(crate) fn coin(rng: &mut Xoshiro256PlusPlus) -> bool {
    rng.gen::<bool>()
}
