//! The `simple` solver: repeated threshold searches, each placing a
//! tripartition and recursing on what is left unclassified, swept over a
//! geometric range of assumed MaxCut deficits.

use std::time::Instant;

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use super::{child_seed, coin, finalize, find_round, sample_probes, Branch, Candidate, LevelLog, Placement, SolveReport, SolverConfig};
use crate::error::Result;
use crate::graph::{Partition, WeightedGraph};
use crate::threshold::{sigma_fn, soto_fn, AlgoParams};

pub(crate) struct SimpleRun {
    pub partition: Partition,
    pub levels: Vec<LevelLog>,
    pub walks: u64,
    pub steps: u64,
}

/// Deficits `ε_r = 1 − (1−γ)^r` with `1 − ε_r ≥ 1/2` whose quality target
/// exceeds the trivial 1/2.
pub fn eps_sweep(mu: f64, gamma: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = 0;
    loop {
        let keep = (1.0 - gamma).powi(r);
        if keep < 0.5 {
            break;
        }
        let eps = 1.0 - keep;
        if soto_fn(sigma_fn(eps, mu)) > 0.5 {
            out.push(eps);
        }
        r += 1;
    }
    out
}

/// One recursive run at a fixed starting deficit.
pub(crate) fn run_simple(g: &WeightedGraph, eps: f64, mu: f64, cfg: &SolverConfig, seed: u64, budget: u64) -> Result<SimpleRun> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut place = Placement::new(g.vertex_count());
    let mut levels = Vec::new();
    let (mut walks, mut steps) = (0u64, 0u64);
    let mut eps_cur = eps;
    let mut depth = 0;
    while !place.remaining.is_empty() {
        let sub = g.induced_subgraph(&place.remaining);
        if sub.edge_count() == 0 {
            break;
        }
        let n_sub = sub.vertex_count();
        if place.is_small(&sub, cfg) && place.brute_force(g) {
            levels.push(LevelLog::new(depth, n_sub, eps_cur, Branch::BruteForce));
            break;
        }
        if eps_cur >= 0.5 || soto_fn(sigma_fn(eps_cur, mu)) <= 0.5 {
            levels.push(LevelLog::new(depth, n_sub, eps_cur, Branch::Fallback).with_note("quality target is 1/2"));
            break;
        }
        let left = budget.saturating_sub(steps);
        if left == 0 {
            levels.push(LevelLog::new(depth, n_sub, eps_cur, Branch::Fallback).with_note("step budget exhausted"));
            break;
        }
        let probes = sample_probes(&sub, cfg.probes_for(n_sub), &mut rng)?;
        let params = AlgoParams { eps: eps_cur, mu, alpha: 1.0, ..cfg.params };
        let round = find_round(&sub, &params, &probes, child_seed(seed, depth as u64), left)?;
        walks += round.walks;
        steps += round.steps;
        let Some((part, threshold)) = round.success else {
            levels.push(LevelLog::new(depth, n_sub, eps_cur, Branch::Fallback).with_note("no probe succeeded"));
            break;
        };
        let metrics = part.metrics(&sub);
        let xi = 1.0 - metrics.inc / sub.edge_weight();
        let mut log = LevelLog::new(depth, n_sub, eps_cur, Branch::Tripartition);
        log.threshold = Some(threshold);
        log.classified_volume = part.classified_volume(&sub);
        log.xi = Some(xi);
        levels.push(log);
        place.place_tripartition(&part, coin(&mut rng));
        place.prune();
        eps_cur = if xi > 0.0 { eps_cur / xi } else { 1.0 };
        depth += 1;
    }
    Ok(SimpleRun { partition: place.finish(g), levels, walks, steps })
}

/// Sweeps the deficit range, keeps the best cut found, and never returns
/// less than the greedy baseline when `cfg.greedy_fallback` is set. The step
/// budget is split evenly over the sweep.
pub fn simple_solve(g: &WeightedGraph, mu: f64, cfg: &SolverConfig, seed: u64) -> Result<SolveReport> {
    let started = Instant::now();
    AlgoParams { mu, ..cfg.params }.validate()?;
    cfg.validate()?;
    let sweep = eps_sweep(mu, cfg.params.gamma);
    let share = cfg.step_budget / sweep.len().max(1) as u64;
    let mut best: Option<(f64, SimpleRun)> = None;
    let mut candidates = Vec::with_capacity(sweep.len());
    let (mut walks, mut steps) = (0, 0);
    for (r, &eps) in sweep.iter().enumerate() {
        let run = run_simple(g, eps, mu, cfg, child_seed(seed, r as u64), share)?;
        walks += run.walks;
        steps += run.steps;
        let value = run.partition.value(g);
        candidates.push(Candidate { eps, cut_value: value });
        if best.as_ref().map_or(true, |(_, b)| value > b.partition.value(g)) {
            best = Some((eps, run));
        }
    }
    let (eps, run) = match best {
        Some((eps, run)) => (Some(eps), run),
        None => (None, SimpleRun { partition: Placement::new(g.vertex_count()).finish(g), levels: Vec::new(), walks: 0, steps: 0 }),
    };
    let mut report = finalize(g, "simple", run.partition, cfg, started);
    report.eps = eps;
    report.candidates = candidates;
    report.levels = run.levels;
    report.walks = walks;
    report.steps = steps;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{brute_force_maxcut, greedy_cut};
    use crate::graph::parse_edge_list;

    fn cycle(n: usize) -> WeightedGraph {
        WeightedGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    fn quick() -> SolverConfig {
        SolverConfig {
            params: AlgoParams { delta: 0.5, ..Default::default() },
            step_budget: 20_000_000,
            ..Default::default()
        }
    }

    #[test]
    fn sweep_stops_at_half() {
        let s = eps_sweep(1.0, 0.05);
        assert_eq!(s[0], 0.0);
        assert!(s.iter().all(|&e| soto_fn(sigma_fn(e, 1.0)) > 0.5 && e <= 0.5));
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn tiny_graph_goes_to_brute_force() {
        let g = parse_edge_list("0 1\n1 2\n2 0").unwrap();
        let r = simple_solve(&g, 1.0, &quick(), 1).unwrap();
        assert!((r.cut_value - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.levels[0].branch, Branch::BruteForce);
        assert_eq!(r.walks, 0);
    }

    #[test]
    fn even_cycle_is_cut_perfectly() {
        let g = cycle(24);
        let r = simple_solve(&g, 0.5, &quick(), 3).unwrap();
        assert_eq!(r.cut_value, 1.0);
        assert!(!r.used_greedy);
        assert!(r.cut_value >= greedy_cut(&g).value(&g));
        assert!((r.partition.value(&g) - r.cut_value).abs() < 1e-12);
        assert!(r.steps <= quick().step_budget);
        for level in r.levels.iter().filter(|l| l.branch == Branch::Tripartition) {
            let xi = level.xi.unwrap();
            assert!(xi > 0.0 && xi <= 1.0);
        }
    }

    #[test]
    fn positive_deficit_places_tripartitions() {
        let g = cycle(24);
        let run = run_simple(&g, 0.05, 0.5, &quick(), 3, 20_000_000).unwrap();
        assert!(run.levels.iter().any(|l| l.branch == Branch::Tripartition), "{:?}", run.levels);
        // Levels are oriented by coin, so edges between levels may be lost.
        assert!(run.partition.value(&g) > 0.75);
    }

    #[test]
    fn xi_updates_eps() {
        let g = cycle(40);
        let r = run_simple(&g, 0.02, 0.5, &quick(), 7, 20_000_000).unwrap();
        for pair in r.levels.windows(2) {
            if let (Some(xi), Branch::Tripartition) = (pair[0].xi, pair[0].branch) {
                assert!((pair[1].eps - pair[0].eps / xi).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn never_beats_optimum_and_never_below_greedy() {
        let g = parse_edge_list("0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n0 3 2\n1 4\n6 7\n7 8\n8 9\n9 6\n2 8").unwrap();
        let opt = brute_force_maxcut(&g).unwrap().0;
        for seed in 0..3 {
            let r = simple_solve(&g, 1.0, &quick(), seed).unwrap();
            assert!(r.cut_value <= opt + 1e-12);
            assert!(r.cut_value >= r.greedy_value);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let g = cycle(30);
        let a = simple_solve(&g, 1.0, &quick(), 42).unwrap();
        let b = simple_solve(&g, 1.0, &quick(), 42).unwrap();
        assert_eq!(a.partition, b.partition);
        assert_eq!(a.levels, b.levels);
        assert_eq!(a.steps, b.steps);
    }

    #[test]
    fn zero_budget_falls_back() {
        let g = cycle(30);
        let cfg = SolverConfig { step_budget: 0, ..quick() };
        let r = simple_solve(&g, 1.0, &cfg, 1).unwrap();
        assert_eq!(r.steps, 0);
        assert!(r.cut_value >= 0.5);
        assert_eq!(r.levels[0].branch, Branch::Fallback);
    }
}
