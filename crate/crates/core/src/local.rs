//! Local partitioning from lazy walks: Lovász–Simonovits curves and the
//! cut-or-bound procedure, which either finds a set of low conductance near
//! the start vertex or certifies that the walk distribution is spread out.
//!
//! Volumes here are lazy volumes, `vol′(S) = 2 vol(S)`, accounting for the
//! half-weight self-loops of the lazy walk.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{conductance, VertexSet, WeightedGraph};
use crate::walk::{lazy_step, run_walks, WalkConfig, WalkTally};

/// Largest accepted `ψ = ζτ`.
pub const MAX_PSI: f64 = 0.125;

fn psi_of(phi: f64) -> f64 {
    -(0.5 * ((1.0 - 2.0 * phi).sqrt() + (1.0 + 2.0 * phi).sqrt())).ln()
}

/// Conductance target `φ ∈ [0, 1/2)` solving `−ln(½(√(1−2φ) + √(1+2φ))) = ψ`.
pub fn solve_phi(psi: f64) -> Result<f64> {
    if !(0.0..=MAX_PSI).contains(&psi) {
        return Err(Error::InvalidInput(format!("psi = {psi} outside [0, {MAX_PSI}]")));
    }
    if psi == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if psi_of(mid) < psi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Piecewise-linear concave curve from `(0, 0)` to `(2m, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LsCurve {
    points: Vec<(f64, f64)>,
}

impl LsCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Linear interpolation; arguments outside `[0, 2m]` are clamped.
    pub fn eval(&self, x: f64) -> f64 {
        let pts = &self.points;
        let last = pts[pts.len() - 1];
        if x >= last.0 {
            return last.1;
        }
        if x <= 0.0 {
            // A vertical jump at 0 only arises from mass on isolated vertices.
            return pts.iter().take_while(|p| p.0 <= 0.0).last().map_or(0.0, |p| p.1);
        }
        // First breakpoint strictly right of x.
        let k = pts.partition_point(|p| p.0 <= x);
        let (x0, y0) = pts[k - 1];
        let (x1, y1) = pts[k];
        y0 + (x - x0) * (y1 - y0) / (x1 - x0)
    }

    pub fn to_csv_rows(&self, length: usize, out: &mut String) {
        for (x, y) in &self.points {
            let _ = writeln!(out, "{length},{x},{y}");
        }
    }
}

/// Orders vertices by `p_j / (2 d_j)` descending (ties by id) and places a
/// breakpoint at the cumulative lazy volume of every prefix.
pub fn build_ls_curve(g: &WeightedGraph, p: &[f64]) -> Result<LsCurve> {
    let n = g.vertex_count();
    if p.len() != n {
        return Err(Error::InvalidInput("distribution length differs from vertex count".into()));
    }
    if p.iter().any(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidInput("distribution has a negative entry".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("distribution sums to {total}, not 1")));
    }
    let key = |j: usize| {
        let d = g.degree(j);
        if d > 0.0 {
            p[j] / (2.0 * d)
        } else if p[j] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
    let mut points = Vec::with_capacity(n + 1);
    points.push((0.0, 0.0));
    let (mut x, mut y) = (0.0, 0.0);
    for j in order {
        x += 2.0 * g.degree(j);
        y += p[j];
        points.push((x, y));
    }
    // Pin the endpoint against rounding drift.
    let end = points.len() - 1;
    points[end] = (2.0 * g.total_weight(), 1.0);
    Ok(LsCurve { points })
}

/// Checks `p^l(S) ≤ ½(I^{l−1}(x_S − 2φ_S x̂_S) + I^{l−1}(x_S + 2φ_S x̂_S))`,
/// where `p^l` is one exact lazy step from `p_prev` and `x_S = vol′(S)`.
pub fn ls_chord_check(g: &WeightedGraph, p_prev: &[f64], s: &VertexSet) -> Result<bool> {
    let curve = build_ls_curve(g, p_prev)?;
    let p = lazy_step(g, p_prev, false);
    let mass: f64 = s.iter().map(|j| p[j]).sum();
    let x = s.lazy_volume();
    let total = 2.0 * g.total_weight();
    let x_hat = x.min(total - x);
    let cross = crate::graph::boundary_weight(g, s);
    // 2 φ_S x̂_S collapses to twice the crossing weight when x̂_S > 0.
    let width = if x_hat > 0.0 { 2.0 * cross } else { 0.0 };
    let rhs = 0.5 * (curve.eval(x - width) + curve.eval(x + width));
    Ok(mass <= rhs + 1e-12)
}

/// Emits `length,x,y` rows for the empirical curve at every recorded length.
pub fn ls_curves_csv(g: &WeightedGraph, tally: &WalkTally) -> Result<String> {
    if !tally.records_per_length() {
        return Err(Error::InvalidInput("tally does not record every length".into()));
    }
    let mut out = String::from("length,x,y\n");
    for l in 0..=tally.length() {
        build_ls_curve(g, &tally.empirical_distribution(l))?.to_csv_rows(l, &mut out);
    }
    Ok(out)
}

/// Derived quantities of one cut-or-bound call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutOrBoundPlan {
    pub tau: f64,
    pub zeta: f64,
    /// Probability bound `m^{−τ}`.
    pub alpha: f64,
    /// Conductance target.
    pub phi: f64,
    pub walk_length: usize,
    pub walks: u64,
    /// Longest prefix examined.
    pub prefix_cap: usize,
}

impl CutOrBoundPlan {
    /// `α = m^{−τ}`, `ℓ = ⌈ln m / ζ⌉`, `w = ⌈30 ℓ² ln n / α⌉`, `b = ⌈ℓ / (2(1−2φ)α)⌉`.
    pub fn new(g: &WeightedGraph, tau: f64, zeta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&tau) {
            return Err(Error::InvalidParams(format!("tau = {tau} outside [0, 1)")));
        }
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::InvalidParams(format!("zeta = {zeta} must be positive")));
        }
        let phi = solve_phi(zeta * tau).map_err(|_| {
            Error::InvalidParams(format!("zeta * tau = {} exceeds {MAX_PSI}", zeta * tau))
        })?;
        let n = g.vertex_count();
        let m = g.total_weight();
        if n < 2 || m <= 1.0 {
            return Err(Error::InvalidInput("graph too small for local partitioning".into()));
        }
        let alpha = m.powf(-tau);
        let walk_length = (m.ln() / zeta).ceil().max(1.0) as usize;
        let l = walk_length as f64;
        let walks = (30.0 * l * l * (n as f64).ln() / alpha).ceil();
        let prefix = (l / (2.0 * (1.0 - 2.0 * phi) * alpha)).ceil();
        Ok(CutOrBoundPlan {
            tau,
            zeta,
            alpha,
            phi,
            walk_length,
            walks: if walks >= u64::MAX as f64 { u64::MAX } else { walks as u64 },
            prefix_cap: if prefix >= n as f64 { n } else { prefix as usize },
        })
    }

    pub fn steps(&self) -> u64 {
        self.walks.saturating_mul(self.walk_length as u64)
    }

    /// The certified bound on `max_j p^ℓ_j / (2 d_j)` when no cut is found.
    pub fn certified_bound(&self) -> f64 {
        256.0 * self.alpha
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CutOrBound {
    Cut {
        #[serde(serialize_with = "serialize_set")]
        set: VertexSet,
        conductance: f64,
        /// Walk length at which the prefix was found.
        length: usize,
        prefix: usize,
    },
    Bound { alpha: f64, bound: f64 },
}

fn serialize_set<S: serde::Serializer>(set: &VertexSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(set.iter())
}

#[derive(Debug, Clone, Serialize)]
pub struct CutOrBoundReport {
    pub result: CutOrBound,
    pub plan: CutOrBoundPlan,
    pub start: usize,
    pub steps: u64,
}

/// Sweeps prefixes of the empirical order at length `l`; returns the prefix
/// size and conductance of the best prefix below `phi`, if any.
fn sweep_length(g: &WeightedGraph, tally: &WalkTally, l: usize, cap: usize, phi: f64) -> Option<(usize, f64, Vec<usize>)> {
    let n = g.vertex_count();
    let m = g.total_weight();
    let mut visited: Vec<usize> = (0..n).filter(|&j| tally.count_at(l, j) > 0).collect();
    // Counts share the walk total as denominator, so compare count / d.
    visited.sort_by(|&a, &b| {
        let ka = tally.count_at(l, a) as f64 / g.degree(a);
        let kb = tally.count_at(l, b) as f64 / g.degree(b);
        kb.total_cmp(&ka).then(a.cmp(&b))
    });
    // Zero-count vertices pad the order up to the cap, lowest id first.
    let mut order = visited;
    if order.len() < cap {
        let mut seen = vec![false; n];
        order.iter().for_each(|&j| seen[j] = true);
        order.extend((0..n).filter(|&j| !seen[j]).take(cap - order.len()));
    }
    order.truncate(cap);

    let mut inside = vec![false; n];
    let (mut vol, mut boundary) = (0.0, 0.0);
    let mut best: Option<(usize, f64)> = None;
    for (k, &v) in order.iter().enumerate() {
        let to_inside: f64 = g.neighbors(v).filter(|&(u, _)| inside[u]).map(|(_, w)| w).sum();
        boundary += g.degree(v) - 2.0 * to_inside;
        vol += g.degree(v);
        inside[v] = true;
        // The volume left outside can be a rounding residue of zero.
        let small = (2.0 * vol).min(2.0 * (m - vol));
        if k + 1 == n || small <= 1e-12 * m {
            continue;
        }
        let phi_k = boundary.max(0.0) / small;
        if phi_k < phi && best.map_or(true, |(_, b)| phi_k < b) {
            best = Some((k + 1, phi_k));
        }
    }
    best.map(|(k, c)| (k, c, order[..k].to_vec()))
}

/// Runs the planned walks from `start` and sweeps every length in turn. At
/// the first length where some prefix has conductance below `φ`, returns the
/// prefix of least conductance; otherwise declares the bound `256α`.
pub fn run_cut_or_bound(g: &WeightedGraph, start: usize, plan: &CutOrBoundPlan, seed: u64) -> Result<CutOrBoundReport> {
    if start >= g.vertex_count() {
        return Err(Error::InvalidInput(format!("start vertex {start} out of range")));
    }
    if g.degree(start) == 0.0 {
        return Err(Error::InvalidInput("start vertex has zero degree".into()));
    }
    let cfg = WalkConfig::new(plan.walk_length, plan.walks, seed).per_length();
    let tally = run_walks(g, start, &cfg)?;
    let mut result = CutOrBound::Bound { alpha: plan.alpha, bound: plan.certified_bound() };
    for l in 0..=plan.walk_length {
        if let Some((k, phi_k, members)) = sweep_length(g, &tally, l, plan.prefix_cap, plan.phi) {
            let set = VertexSet::from_vertices(g, members);
            let exact = conductance(g, &set)?;
            debug_assert!((exact - phi_k).abs() <= 1e-9 * (1.0 + exact));
            if exact < plan.phi {
                result = CutOrBound::Cut { set, conductance: exact, length: l, prefix: k };
                break;
            }
        }
    }
    Ok(CutOrBoundReport { result, plan: *plan, start, steps: cfg.steps() })
}

/// Plans and runs a cut-or-bound call in one go.
pub fn cut_or_bound(g: &WeightedGraph, start: usize, tau: f64, zeta: f64, seed: u64) -> Result<CutOrBoundReport> {
    let plan = CutOrBoundPlan::new(g, tau, zeta)?;
    run_cut_or_bound(g, start, &plan, seed)
}
