//! The `balance` solver: alternates between cutting out low-conductance
//! blocks found by local partitioning, which are solved separately with
//! `simple`, and threshold rounds run with a certified probability bound.

use std::time::Instant;

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use super::quality::{balance_params, epsilon_bar};
use super::simple::simple_solve;
use super::{child_seed, coin, finalize, find_round, sample_probes, Branch, LevelLog, Placement, SolveReport, SolverConfig};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::local::{run_cut_or_bound, CutOrBound, CutOrBoundPlan, MAX_PSI};
use crate::threshold::AlgoParams;

/// Local-partitioning rate `ζ = ln m / ℓ(ε₁, μ₁)`, lowered if needed so that
/// `ζτ` stays within the accepted range.
pub fn zeta_for(m: f64, eps1: f64, mu1: f64, tau: f64, base: &AlgoParams) -> f64 {
    let ell = AlgoParams { eps: eps1, mu: mu1, ..*base }.ideal_walk_length(m);
    let zeta = m.ln() / ell;
    if tau > 0.0 {
        zeta.min(MAX_PSI / tau)
    } else {
        zeta
    }
}

/// Runs `balance` at runtime exponent `b` with free parameter `μ₁`. `ε₁`
/// defaults to `ε̄(μ₁)`. The result is never below the greedy cut.
pub fn balance_solve(g: &WeightedGraph, b: f64, mu1: f64, eps1: Option<f64>, cfg: &SolverConfig, seed: u64) -> Result<SolveReport> {
    let started = Instant::now();
    cfg.validate()?;
    let (tau, mu2) = balance_params(b, mu1)?;
    let eps1 = eps1.unwrap_or_else(|| epsilon_bar(mu1));
    if !(eps1 > 0.0 && eps1 < 0.5) {
        return Err(Error::InvalidParams(format!("eps1 = {eps1} outside (0, 0.5)")));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut place = Placement::new(g.vertex_count());
    let mut levels = Vec::new();
    let (mut walks, mut steps) = (0u64, 0u64);
    let mut depth = 0usize;
    while !place.remaining.is_empty() {
        let sub = g.induced_subgraph(&place.remaining);
        if sub.edge_count() == 0 {
            break;
        }
        let n_sub = sub.vertex_count();
        if place.is_small(&sub, cfg) && place.brute_force(g) {
            levels.push(LevelLog::new(depth, n_sub, eps1, Branch::BruteForce));
            break;
        }
        let left = cfg.step_budget.saturating_sub(steps);
        if left == 0 {
            levels.push(LevelLog::new(depth, n_sub, eps1, Branch::Fallback).with_note("step budget exhausted"));
            break;
        }
        let level_seed = child_seed(seed, depth as u64);
        let m = sub.total_weight();
        let probes = sample_probes(&sub, cfg.probes_for(n_sub), &mut rng)?;

        let zeta = zeta_for(m, eps1, mu1, tau, &cfg.params);
        let plan = CutOrBoundPlan::new(&sub, tau, zeta)?;
        let mut block = None;
        let mut note = None;
        for (k, &start) in probes.iter().enumerate() {
            if plan.steps() > cfg.step_budget.saturating_sub(steps) {
                note = Some(format!("local partitioning needs {} steps, over budget", plan.steps()));
                break;
            }
            let report = run_cut_or_bound(&sub, start, &plan, child_seed(level_seed, 2 * k as u64))?;
            walks += plan.walks;
            steps += report.steps;
            if let CutOrBound::Cut { set, conductance, .. } = report.result {
                block = Some((set, conductance));
                break;
            }
        }

        if let Some((set, conductance)) = block {
            let members: Vec<usize> = set.iter().map(|local| place.remaining[local]).collect();
            let gs = g.induced_subgraph(&members);
            let inner_cfg = SolverConfig { step_budget: cfg.step_budget.saturating_sub(steps) / 2, ..*cfg };
            let inner = simple_solve(&gs, mu2, &inner_cfg, child_seed(level_seed, 1))?;
            walks += inner.walks;
            steps += inner.steps;
            let sides: Vec<(usize, bool)> =
                members.iter().enumerate().map(|(k, &v)| (v, inner.partition.is_left(k))).collect();
            let (keep, flip) = place.orientation_gain(g, &sides);
            for &(v, l) in &sides {
                place.place(v, if flip > keep { !l } else { l });
            }
            let mut log = LevelLog::new(depth, n_sub, eps1, Branch::LowConductance);
            log.conductance = Some(conductance);
            log.classified_volume = set.volume();
            levels.push(log.with_note(format!("block of {} vertices cut at {:.6}", members.len(), inner.cut_value)));
            place.prune();
            depth += 1;
            continue;
        }

        // No block: one threshold round with the certified bound on p_j / d_j.
        let alpha = (512.0 * m.powf(-tau)).min(1.0);
        let params = AlgoParams { eps: eps1, mu: mu1, alpha, ..cfg.params };
        let round = find_round(&sub, &params, &probes, child_seed(level_seed, 3), cfg.step_budget.saturating_sub(steps))?;
        walks += round.walks;
        steps += round.steps;
        match round.success {
            Some((part, threshold)) => {
                let metrics = part.metrics(&sub);
                let mut log = LevelLog::new(depth, n_sub, eps1, Branch::Tripartition);
                log.threshold = Some(threshold);
                log.classified_volume = part.classified_volume(&sub);
                log.xi = Some(1.0 - metrics.inc / sub.edge_weight());
                log.note = note;
                levels.push(log);
                place.place_tripartition(&part, coin(&mut rng));
                place.prune();
                depth += 1;
            }
            None => {
                let why = note.unwrap_or_else(|| "no block and no tripartition".into());
                levels.push(LevelLog::new(depth, n_sub, eps1, Branch::Fallback).with_note(why));
                break;
            }
        }
    }
    let partition = place.finish(g);
    // The trivial cut comparison is part of the algorithm, not optional.
    let cfg_final = SolverConfig { greedy_fallback: true, ..*cfg };
    let mut report = finalize(g, "balance", partition, &cfg_final, started);
    report.eps = Some(eps1);
    report.levels = levels;
    report.walks = walks;
    report.steps = steps;
    Ok(report)
}
