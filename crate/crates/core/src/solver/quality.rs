//! Guaranteed cut quality: the function `H(ε, μ)`, the worst-case ratio of the
//! `simple` solver, and the running-time / ratio tradeoff of `balance`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::threshold::{sigma_fn, soto_fn};

/// `σ(x, μ)` extended by 1 past `x = 1`.
fn sigma_ext(x: f64, mu: f64) -> f64 {
    if x >= 1.0 {
        1.0
    } else {
        sigma_fn(x, mu)
    }
}

/// Deficit at which `σ(ε, μ)` reaches 1/3 and `soto` drops to 1/2.
pub fn critical_eps(mu: f64) -> f64 {
    1.0 - (2.0f64 / 3.0).powf(mu / (1.0 + mu))
}

/// `ε̄(μ) = 1 − (3/4)^{μ/(1+μ)}`, where `σ(ε̄, μ) = 1/4`.
pub fn epsilon_bar(mu: f64) -> f64 {
    1.0 - 0.75f64.powf(mu / (1.0 + mu))
}

/// Largest `z ∈ [0, 1]` with `soto(σ(ε/z, μ)) = 1/2`, by bisection.
pub fn z_star(eps: f64, mu: f64) -> f64 {
    if eps <= 0.0 {
        return 0.0;
    }
    let flat = |z: f64| sigma_ext(eps / z, mu) >= 1.0 / 3.0;
    if flat(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if flat(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `H(ε, μ) = z*/2 + ∫_{z*}^1 soto(σ(ε/z, μ)) dz`: the fraction of edges the
/// recursive solver is guaranteed to cut when maxcut ≥ 1 − ε.
pub fn h_fn(eps: f64, mu: f64) -> f64 {
    if eps <= 0.0 {
        return 1.0;
    }
    let z = z_star(eps, mu);
    z / 2.0 + integrate(|r| soto_fn(sigma_ext(eps / r, mu)), z, 1.0, 1e-10)
}

/// Maximizes (or minimizes) `f` on `[lo, hi]` by a uniform grid followed by
/// `passes` zoomed re-gridding rounds around the incumbent.
pub fn grid_refine(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize, passes: usize, maximize: bool) -> (f64, f64) {
    let points = points.max(3);
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let (mut lo, mut hi) = (lo, hi);
    let mut best = (lo, f(lo));
    for _ in 0..=passes {
        let step = (hi - lo) / (points - 1) as f64;
        let mut idx = 0;
        for k in 0..points {
            let x = lo + step * k as f64;
            let v = f(x);
            if better(v, best.1) {
                best = (x, v);
                idx = k;
            } else if x == best.0 {
                idx = k;
            }
        }
        let centre = lo + step * idx as f64;
        let (nlo, nhi) = ((centre - step).max(lo), (centre + step).min(hi));
        lo = nlo;
        hi = nhi;
    }
    best
}

/// Worst-case ratio `min_ε H(ε, μ)/(1 − ε)` of the `simple` solver, with the
/// minimizing deficit.
pub fn simple_ratio(mu: f64) -> (f64, f64) {
    grid_refine(|e| h_fn(e, mu) / (1.0 - e), 0.0, 0.5, 200, 2, false)
}

/// `(τ, μ₂)` balancing the two work-to-output terms at total exponent `b`.
pub fn balance_params(b: f64, mu1: f64) -> Result<(f64, f64)> {
    if !(b > 1.5 && b.is_finite()) {
        return Err(Error::InvalidParams(format!("runtime exponent b = {b} must exceed 1.5")));
    }
    if !(mu1 > 0.0 && mu1.is_finite()) {
        return Err(Error::InvalidParams(format!("mu1 = {mu1} must be positive")));
    }
    let tau = 2.0 + mu1 - b;
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::InvalidParams(format!(
            "tau = {tau} outside [0, 1) for b = {b}, mu1 = {mu1}; mu1 must lie in ({}, {})",
            (b - 2.0).max(0.0),
            b - 1.0
        )));
    }
    let mu2 = (2.0 * b - mu1 - 3.0) / tau;
    if !(mu2 > 0.0 && mu2.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "mu2 = {mu2} not positive for b = {b}, mu1 = {mu1}; mu1 must stay below {}",
            2.0 * b - 3.0
        )));
    }
    Ok((tau, mu2))
}

/// Open interval of `μ₁` for which [`balance_params`] succeeds.
pub fn mu1_range(b: f64) -> (f64, f64) {
    ((b - 2.0).max(0.0), (2.0 * b - 3.0).min(b - 1.0))
}

/// Cut-to-internal factor `χ = 4φ/(1−2φ)` with `φ = √(4 ε₁ τ / μ₁)`; `None`
/// once `φ ≥ 1/2`.
pub fn chi(eps1: f64, mu1: f64, tau: f64) -> Option<f64> {
    let phi = (4.0 * eps1 * tau / mu1).sqrt();
    (phi < 0.5).then(|| 4.0 * phi / (1.0 - 2.0 * phi))
}

/// `H(·, μ)` tabulated on `[0, 1/2]` against `u = √ε`, where it is close to
/// linear, with linear interpolation in `u`.
#[derive(Debug, Clone)]
pub struct HTable {
    du: f64,
    values: Vec<f64>,
}

impl HTable {
    pub fn new(mu: f64, points: usize) -> Self {
        let points = points.max(2);
        let du = 0.5f64.sqrt() / (points - 1) as f64;
        let values = (0..points).map(|k| h_fn((k as f64 * du).powi(2), mu)).collect();
        HTable { du, values }
    }

    /// `H(min(ε, 1/2), μ)`.
    pub fn eval(&self, eps: f64) -> f64 {
        let u = eps.clamp(0.0, 0.5).sqrt() / self.du;
        let k = (u as usize).min(self.values.len() - 2);
        let frac = u - k as f64;
        self.values[k] + frac * (self.values[k + 1] - self.values[k])
    }
}

fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> f64 {
    const R: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - R * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + R * (b - a);
            fd = f(d);
        }
    }
    f(lo).min(f(hi)).min(fc).min(fd)
}

/// Outer search resolution for the tradeoff computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TradeoffGrid {
    pub points: usize,
    pub passes: usize,
    /// Golden-section iterations per inner variable.
    pub inner_iters: usize,
    /// Table size for `H(·, μ₂)`.
    pub table_points: usize,
}

impl Default for TradeoffGrid {
    fn default() -> Self {
        TradeoffGrid { points: 16, passes: 3, inner_iters: 24, table_points: 257 }
    }
}

/// Ratio bound of `balance` for fixed `(μ₁, μ₂)`.
///
/// For fixed `ε, ε₁` the objective minimizes, over `ε′_S ∈ [0, 1/2]` and
/// `X, Z ≥ 0` with `(1+χ)X + Z ≤ 1` and `ε′_S X + ε₁ Z ≤ ε`,
/// `(1/(1−ε))[(H(ε′_S, μ₂) + χ/2)X + H(ε₁, μ₁)Y + Z/2]` with
/// `Y = 1 − (1+χ)X − Z`. Since `H` decreases in its first argument the best
/// `ε′_S` is `min(1/2, (ε − ε₁Z)/X)`, and `X·H(r/X)` is the perspective of a
/// convex function, so what remains is a convex problem in `(X, Z)` solved by
/// nested golden-section search.
pub struct BalanceObjective {
    pub mu1: f64,
    pub mu2: f64,
    pub tau: f64,
    grid: TradeoffGrid,
    h2: HTable,
}

impl BalanceObjective {
    pub fn new(mu1: f64, mu2: f64, grid: TradeoffGrid) -> Result<Self> {
        if !(mu1 > 0.0 && mu2 > 0.0 && mu1.is_finite() && mu2.is_finite()) {
            return Err(Error::InvalidParams("mu1 and mu2 must be positive".into()));
        }
        let tau = (1.0 + mu1) / (2.0 + mu2);
        Ok(BalanceObjective { mu1, mu2, tau, grid, h2: HTable::new(mu2, grid.table_points) })
    }

    /// The numerator `(1−ε)·OBJ(ε, ε₁)` given `χ` and `H₁ = H(ε₁, μ₁)`.
    pub fn scaled_objective(&self, eps: f64, eps1: f64, chi: f64, h1: f64) -> f64 {
        let cx = chi / 2.0 - h1 * (1.0 + chi);
        let cz = 0.5 - h1;
        let iters = self.grid.inner_iters;
        let z_max = if eps1 > 0.0 { (eps / eps1).min(1.0) } else { 1.0 };
        let over_x = |z: f64| {
            let r = (eps - eps1 * z).max(0.0);
            let x_max = (1.0 - z).max(0.0) / (1.0 + chi);
            let at = |x: f64| {
                let hs = if x > 0.0 { self.h2.eval(r / x) } else { 0.0 };
                x * (hs + cx)
            };
            golden_min(at, 0.0, x_max, iters) + cz * z
        };
        h1 + golden_min(over_x, 0.0, z_max, iters)
    }

    /// `min_{ε ∈ [0, 1/2]} max(1/(2(1−ε)), OBJ(ε, ε₁))`, or `None` when `ε₁`
    /// gives no valid `χ`.
    pub fn value_at(&self, eps1: f64) -> Option<f64> {
        let chi = chi(eps1, self.mu1, self.tau)?;
        let h1 = h_fn(eps1, self.mu1);
        let g = self.grid;
        let (_, v) = grid_refine(
            |eps| self.scaled_objective(eps, eps1, chi, h1).max(0.5) / (1.0 - eps),
            0.0,
            0.5,
            g.points,
            g.passes,
            false,
        );
        Some(v)
    }

    /// Largest `ε₁` with a valid `χ`, capped at 1/2.
    pub fn eps1_limit(&self) -> f64 {
        (self.mu1 / (16.0 * self.tau)).min(0.5) * (1.0 - 1e-9)
    }

    /// `max_{ε₁} value_at(ε₁)` with the maximizing `ε₁`.
    pub fn best(&self) -> (f64, f64) {
        let g = self.grid;
        grid_refine(|e1| self.value_at(e1).unwrap_or(0.5), 0.0, self.eps1_limit(), g.points, g.passes, true)
    }
}

/// `max_{ε₁}` of the `balance` ratio for `(μ₁, μ₂)`.
pub fn tradeoff_objective(mu1: f64, mu2: f64) -> Result<(f64, f64)> {
    Ok(BalanceObjective::new(mu1, mu2, TradeoffGrid::default())?.best())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TradeoffAlgorithm {
    Simple,
    Balance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffPoint {
    pub b: f64,
    pub mu1: f64,
    pub tau: f64,
    pub mu2: f64,
    pub eps1: f64,
    pub balance_ratio: f64,
    /// `h(b − 2)` of `simple` when `b > 2`.
    pub simple_ratio: Option<f64>,
    pub ratio: f64,
    pub algorithm: TradeoffAlgorithm,
}

/// Best guaranteed ratio in time `Õ(m^b)`: `balance` maximized over `μ₁`,
/// compared with `simple` at `μ = b − 2` when that is positive.
pub fn tradeoff_point(b: f64) -> Result<TradeoffPoint> {
    tradeoff_point_with(b, TradeoffGrid::default())
}

pub fn tradeoff_point_with(b: f64, grid: TradeoffGrid) -> Result<TradeoffPoint> {
    if !(b > 1.5 && b.is_finite()) {
        return Err(Error::InvalidParams(format!("runtime exponent b = {b} must exceed 1.5")));
    }
    let (lo, hi) = mu1_range(b);
    let width = hi - lo;
    let (lo, hi) = (lo + 1e-6 * width, hi - 1e-6 * width);
    let eval = |mu1: f64| -> f64 {
        match balance_params(b, mu1).and_then(|(_, mu2)| BalanceObjective::new(mu1, mu2, grid)) {
            Ok(obj) => obj.best().1,
            Err(_) => 0.5,
        }
    };
    let (mu1, balance_ratio) = grid_refine(eval, lo, hi, grid.points, grid.passes, true);
    let (tau, mu2) = balance_params(b, mu1)?;
    let eps1 = BalanceObjective::new(mu1, mu2, grid)?.best().0;
    let simple = (b > 2.0).then(|| simple_ratio(b - 2.0).1);
    let (ratio, algorithm) = match simple {
        Some(s) if s > balance_ratio => (s, TradeoffAlgorithm::Simple),
        _ => (balance_ratio, TradeoffAlgorithm::Balance),
    };
    Ok(TradeoffPoint { b, mu1, tau, mu2, eps1, balance_ratio, simple_ratio: simple, ratio, algorithm })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_at_zero_is_one() {
        assert_eq!(h_fn(0.0, 1.0), 1.0);
        assert_eq!(z_star(0.0, 1.0), 0.0);
    }

    #[test]
    fn z_star_matches_closed_form() {
        for &mu in &[0.3, 1.0, 4.0] {
            let ec = critical_eps(mu);
            for k in 1..=50 {
                let eps = 0.5 * k as f64 / 50.0;
                let want = (eps / ec).min(1.0);
                assert!((z_star(eps, mu) - want).abs() < 1e-12, "mu={mu} eps={eps}");
            }
        }
    }

    #[test]
    fn h_against_riemann_sum() {
        let (eps, mu) = (0.07, 1.3);
        let z = z_star(eps, mu);
        let n = 200_000;
        let dz = (1.0 - z) / n as f64;
        let riemann: f64 =
            (0..n).map(|k| soto_fn(sigma_fn(eps / (z + (k as f64 + 0.5) * dz), mu))).sum::<f64>() * dz;
        assert!((h_fn(eps, mu) - z / 2.0 - riemann).abs() < 1e-6);
    }

    #[test]
    fn h_is_half_when_fully_flat() {
        let mu = 1.0;
        assert_eq!(h_fn(critical_eps(mu) * 1.01, mu), 0.5);
    }

    #[test]
    fn epsilon_bar_hits_quarter() {
        for &mu in &[0.5, 1.0, 2.0] {
            assert!((sigma_fn(epsilon_bar(mu), mu) - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn balance_params_examples() {
        let (tau, mu2) = balance_params(2.0, 0.25).unwrap();
        assert!((tau - 0.25).abs() < 1e-15 && (mu2 - 3.0).abs() < 1e-12);
        assert!((tau + mu2 * tau - 1.0).abs() < 1e-12);
        let (tau, mu2) = balance_params(3.0, 1.2).unwrap();
        assert!((tau - 0.2).abs() < 1e-12 && (mu2 - 9.0).abs() < 1e-9);
        assert!(matches!(balance_params(3.0, 0.5), Err(Error::InvalidParams(_))));
        assert!(balance_params(1.5, 0.1).is_err());
        assert!(balance_params(2.0, 1.0).is_err());
    }

    #[test]
    fn chi_limits() {
        assert_eq!(chi(0.0, 1.0, 0.5), Some(0.0));
        assert!(chi(0.2, 0.1, 0.9).is_none());
        let phi = (4.0f64 * 0.01 * 0.25 / 0.5).sqrt();
        assert!((chi(0.01, 0.5, 0.25).unwrap() - 4.0 * phi / (1.0 - 2.0 * phi)).abs() < 1e-15);
    }

    #[test]
    fn table_tracks_h() {
        let t = HTable::new(2.0, 513);
        for k in 0..=100 {
            let e = 0.5 * k as f64 / 100.0;
            assert!((t.eval(e) - h_fn(e, 2.0)).abs() < 2e-5, "{e}");
        }
    }

    #[test]
    fn grid_refine_finds_extrema() {
        let (x, v) = grid_refine(|x| -(x - 0.3137f64).powi(2), 0.0, 1.0, 20, 4, true);
        assert!((x - 0.3137).abs() < 1e-4 && v <= 0.0);
        let (x, _) = grid_refine(|x| (x - 1.0).abs(), 0.0, 1.0, 7, 1, false);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn integrate_polynomial() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-12) - 9.0).abs() < 1e-10);
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-9), 0.0);
    }
}
