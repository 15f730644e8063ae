//! Threshold classification of walk estimates and the geometric threshold
//! search that looks for a good tripartition around one start vertex.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{CutMetrics, Side, Tripartition, WeightedGraph};
use crate::walk::{run_walk_range, signed_estimate, WalkTally};

/// Boundary between the two lower branches of [`soto_fn`].
pub const SIGMA_0: f64 = 0.22815;

/// Knobs shared by the threshold search and the solvers built on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgoParams {
    /// Assumed MaxCut deficit: the search targets graphs with maxcut ≥ 1 − eps.
    pub eps: f64,
    /// Running-time exponent knob.
    pub mu: f64,
    /// Spectral slack.
    pub delta: f64,
    /// Geometric step between successive thresholds.
    pub gamma: f64,
    /// Walk-count constant.
    pub kappa: f64,
    /// Upper bound on `max_j p_j / d_j`; 1 when nothing is certified.
    pub alpha: f64,
    /// Constant in the classified-volume success condition.
    pub c_vol: f64,
    /// Walks longer than this are truncated.
    pub max_walk_length: usize,
}

impl Default for AlgoParams {
    fn default() -> Self {
        AlgoParams {
            eps: 0.05,
            mu: 1.0,
            delta: 0.05,
            gamma: 0.05,
            kappa: 8.0,
            alpha: 1.0,
            c_vol: 1.0,
            max_walk_length: crate::walk::MAX_WALK_LENGTH,
        }
    }
}

impl AlgoParams {
    pub fn new(eps: f64, mu: f64) -> Self {
        AlgoParams { eps, mu, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParams(what.to_string()));
        if !(0.0..=0.5).contains(&self.eps) {
            return bad("eps must lie in [0, 0.5]");
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad("mu must be positive and finite");
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad("delta must be positive and finite");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad("kappa must be positive and finite");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("alpha must lie in (0, 1]");
        }
        if !(self.c_vol > 0.0 && self.c_vol.is_finite()) {
            return bad("c_vol must be positive and finite");
        }
        if self.max_walk_length == 0 || self.max_walk_length > crate::walk::MAX_WALK_LENGTH {
            return bad("max_walk_length out of range");
        }
        Ok(())
    }

    /// `−ln(1 − eps)`.
    pub fn eps_prime(&self) -> f64 {
        -(1.0 - self.eps).ln()
    }

    pub fn sigma(&self) -> f64 {
        sigma_fn(self.eps, self.mu)
    }

    /// Untruncated walk length `⌈μ ln(4m/δ²) / (2(δ + ε′))⌉` for total degree `m`.
    pub fn ideal_walk_length(&self, m: f64) -> f64 {
        let raw = self.mu * (4.0 * m / (self.delta * self.delta)).ln() / (2.0 * (self.delta + self.eps_prime()));
        raw.ceil().max(1.0)
    }

    /// Walk length actually used: the ideal one capped at `max_walk_length`.
    pub fn walk_length(&self, m: f64) -> usize {
        let ideal = self.ideal_walk_length(m);
        if ideal > self.max_walk_length as f64 {
            log::debug!("walk length {ideal} truncated to {}", self.max_walk_length);
            self.max_walk_length
        } else {
            ideal as usize
        }
    }
}

/// `1 − (1 − ε)^{1 + 1/μ}`.
pub fn sigma_fn(eps: f64, mu: f64) -> f64 {
    1.0 - (1.0 - eps).powf(1.0 + 1.0 / mu)
}

/// Guaranteed cut-to-incident ratio of a tripartition with parameter `σ`.
pub fn soto_fn(sigma: f64) -> f64 {
    if sigma > 1.0 / 3.0 {
        0.5
    } else if sigma > SIGMA_0 {
        (-1.0 + (4.0 * sigma * sigma - 8.0 * sigma + 5.0).sqrt()) / (2.0 * (1.0 - sigma))
    } else {
        1.0 / (1.0 + 2.0 * (sigma * (1.0 - sigma)).sqrt())
    }
}

/// `⌈κ ln(n) max(α, t) / t²⌉`, saturating at `u64::MAX`.
pub fn walk_count(t: f64, alpha: f64, n: usize, kappa: f64) -> Result<u64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("threshold must be positive, got {t}")));
    }
    let w = (kappa * (n as f64).ln() * alpha.max(t) / (t * t)).ceil();
    Ok(if w >= u64::MAX as f64 { u64::MAX } else { w.max(0.0) as u64 })
}

/// Moves every unclassified vertex whose estimate exceeds `t` in absolute
/// value to Even (positive) or Odd (negative). Returns how many moved.
pub fn threshold_classify(g: &WeightedGraph, tally: &WalkTally, t: f64, part: &mut Tripartition) -> usize {
    let mut moved = 0;
    for j in 0..g.vertex_count() {
        if part.side(j) != Side::Unclassified {
            continue;
        }
        let q = signed_estimate(tally, g, j);
        let side = if q > t {
            Side::Even
        } else if q < -t {
            Side::Odd
        } else {
            continue;
        };
        if part.classify(j, side) {
            moved += 1;
        }
    }
    moved
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FindFailure {
    /// Every threshold down to the floor was tried.
    ThresholdsExhausted,
    /// The next top-up would exceed the step budget.
    BudgetExhausted,
    /// The start vertex has no incident edge.
    IsolatedStart,
}

#[derive(Debug, Clone)]
pub enum FindResult {
    Success { part: Tripartition, threshold: f64, round: usize, metrics: CutMetrics },
    Fail(FindFailure),
}

#[derive(Debug, Clone)]
pub struct FindOutcome {
    pub result: FindResult,
    pub walk_length: usize,
    pub walks: u64,
    pub steps: u64,
}

impl FindOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self.result, FindResult::Success { .. })
    }
}

/// Success predicate of the threshold search, evaluated from scratch.
pub fn find_predicate(g: &WeightedGraph, part: &Tripartition, params: &AlgoParams, t: f64) -> bool {
    if part.classified_count() == 0 {
        return false;
    }
    let m = g.total_weight();
    let n = g.vertex_count() as f64;
    let metrics = part.metrics(g);
    let target = soto_fn(params.sigma());
    let floor = params.c_vol / (t * t * m.powf(1.0 + params.mu) * n.ln());
    metrics.cut >= target * metrics.inc && part.classified_volume(g) >= floor
}

/// Searches thresholds `t_r = (1 − γ)^r` down to `γ / m^{1 + μ/2}`, topping up
/// the walks from `start` to `walk_count(t_r)` at each round and classifying
/// with [`threshold_classify`]. Walk `k` always uses generator `(seed, k)`, so
/// the outcome depends only on the seed. Stops with a budget failure before
/// any top-up that would push the total step count past `step_limit`.
pub fn find_threshold(
    g: &WeightedGraph,
    start: usize,
    params: &AlgoParams,
    seed: u64,
    step_limit: u64,
) -> Result<FindOutcome> {
    params.validate()?;
    let n = g.vertex_count();
    if start >= n {
        return Err(Error::InvalidInput(format!("start vertex {start} out of range")));
    }
    if n < 2 {
        return Err(Error::InvalidInput("threshold search needs at least two vertices".into()));
    }
    let m = g.total_weight();
    let length = params.walk_length(m.max(1.0));
    let mut out = FindOutcome {
        result: FindResult::Fail(FindFailure::ThresholdsExhausted),
        walk_length: length,
        walks: 0,
        steps: 0,
    };
    if g.degree(start) == 0.0 {
        out.result = FindResult::Fail(FindFailure::IsolatedStart);
        return Ok(out);
    }
    let floor = params.gamma / m.powf(1.0 + params.mu / 2.0);
    let mut tally = WalkTally::empty(n, length, false);
    let mut part = Tripartition::new(n);
    let mut round = 0usize;
    loop {
        let t = (1.0 - params.gamma).powi(round as i32);
        if t < floor {
            break;
        }
        let want = walk_count(t, params.alpha, n, params.kappa)?;
        if want > tally.walks() {
            let extra = (want - tally.walks()).saturating_mul(length as u64);
            if out.steps.saturating_add(extra) > step_limit {
                out.result = FindResult::Fail(FindFailure::BudgetExhausted);
                break;
            }
            let more = run_walk_range(g, start, length, false, seed, tally.walks()..want);
            tally.merge(&more);
            out.steps += extra;
        }
        if threshold_classify(g, &tally, t, &mut part) > 0 && find_predicate(g, &part, params, t) {
            let metrics = part.metrics(g);
            out.result = FindResult::Success { part, threshold: t, round, metrics };
            break;
        }
        round += 1;
    }
    out.walks = tally.walks();
    Ok(out)
}
