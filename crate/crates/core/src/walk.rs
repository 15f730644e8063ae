//! Lazy random walks with hop-parity tracking.
//!
//! A lazy walk stays put with probability 1/2 at every step and otherwise
//! moves along an edge chosen proportionally to its weight. The number of
//! real moves is the walk's *hop-length*; a walk is even or odd by its parity.
//!
//! Sampling is reproducible: walk `k` draws from its own generator keyed by
//! `(seed, k)`, so any sharding of the walk index range over threads yields
//! the same integer tallies. [`exact_walk_distribution`] is the exact
//! dynamic-programming counterpart used as an oracle.

use std::fmt::Write as _;
use std::ops::Range;

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub const MAX_WALK_LENGTH: usize = 200;
pub const MAX_AGGREGATE_STEPS: u64 = 1_000_000_000;
/// Upper bound on stored reals for the exact DP oracle.
pub const MAX_EXACT_ENTRIES: usize = 1 << 26;

const BLOCK: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    pub length: usize,
    pub walks: u64,
    /// Keep endpoint counts for every intermediate length `0..=length`.
    pub record_per_length: bool,
    pub seed: u64,
}

impl WalkConfig {
    pub fn new(length: usize, walks: u64, seed: u64) -> Self {
        WalkConfig { length, walks, record_per_length: false, seed }
    }

    pub fn per_length(mut self) -> Self {
        self.record_per_length = true;
        self
    }

    pub fn steps(&self) -> u64 {
        self.walks.saturating_mul(self.length as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.walks == 0 {
            return Err(Error::InvalidParams("walk count must be at least 1".into()));
        }
        if self.length > MAX_WALK_LENGTH {
            return Err(Error::Resource(format!(
                "walk length {} exceeds cap {MAX_WALK_LENGTH}",
                self.length
            )));
        }
        if self.steps() > MAX_AGGREGATE_STEPS {
            return Err(Error::Resource(format!(
                "{} aggregate walk steps exceed cap {MAX_AGGREGATE_STEPS}",
                self.steps()
            )));
        }
        Ok(())
    }
}

/// Endpoint counts split by hop parity.
///
/// Without per-length recording only the final length is kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkTally {
    n: usize,
    length: usize,
    per_length: bool,
    walks: u64,
    even: Vec<u64>,
    odd: Vec<u64>,
}

impl WalkTally {
    pub fn empty(n: usize, length: usize, per_length: bool) -> Self {
        let rows = if per_length { length + 1 } else { 1 };
        WalkTally { n, length, per_length, walks: 0, even: vec![0; rows * n], odd: vec![0; rows * n] }
    }

    pub fn walks(&self) -> u64 {
        self.walks
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn records_per_length(&self) -> bool {
        self.per_length
    }

    fn row(&self, l: usize) -> usize {
        if self.per_length {
            assert!(l <= self.length, "length {l} beyond walk length {}", self.length);
            l * self.n
        } else {
            assert_eq!(l, self.length, "tally only records the final length");
            0
        }
    }

    pub fn even_at(&self, l: usize, j: usize) -> u64 {
        self.even[self.row(l) + j]
    }

    pub fn odd_at(&self, l: usize, j: usize) -> u64 {
        self.odd[self.row(l) + j]
    }

    pub fn even(&self, j: usize) -> u64 {
        self.even_at(self.length, j)
    }

    pub fn odd(&self, j: usize) -> u64 {
        self.odd_at(self.length, j)
    }

    /// Walks (of either parity) ending at `j` after `l` steps.
    pub fn count_at(&self, l: usize, j: usize) -> u64 {
        let r = self.row(l) + j;
        self.even[r] + self.odd[r]
    }

    /// Empirical endpoint distribution after `l` steps.
    pub fn empirical_distribution(&self, l: usize) -> Vec<f64> {
        let w = self.walks.max(1) as f64;
        (0..self.n).map(|j| self.count_at(l, j) as f64 / w).collect()
    }

    /// Adds `other`'s counts; both must describe the same walk shape.
    pub fn merge(&mut self, other: &WalkTally) {
        assert_eq!((self.n, self.length, self.per_length), (other.n, other.length, other.per_length));
        self.walks += other.walks;
        for (a, b) in self.even.iter_mut().zip(&other.even) {
            *a += b;
        }
        for (a, b) in self.odd.iter_mut().zip(&other.odd) {
            *a += b;
        }
    }

    /// Diagnostic dump: `vertex length even odd` for every nonzero cell.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# vertex length even odd\n");
        let lengths: Vec<usize> = if self.per_length { (0..=self.length).collect() } else { vec![self.length] };
        for l in lengths {
            for j in 0..self.n {
                let (e, o) = (self.even_at(l, j), self.odd_at(l, j));
                if e + o > 0 {
                    let _ = writeln!(out, "{j} {l} {e} {o}");
                }
            }
        }
        out
    }

    fn record(&mut self, l: usize, j: usize, odd: bool) {
        let r = if self.per_length { l * self.n + j } else { j };
        if odd {
            self.odd[r] += 1;
        } else {
            self.even[r] += 1;
        }
    }
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for walk number `index` under root `seed`.
pub fn walk_rng(seed: u64, index: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(mix64(seed ^ mix64(index.wrapping_add(0x6a09_e667_f3bc_c909))))
}

fn walk_into(g: &WeightedGraph, start: usize, length: usize, rng: &mut Xoshiro256PlusPlus, tally: &mut WalkTally) {
    let per_length = tally.per_length;
    let mut at = start;
    let mut odd = false;
    if per_length {
        tally.record(0, at, false);
    }
    for l in 1..=length {
        let draw = rng.next_u64();
        if draw & 1 == 1 {
            let unit = (draw >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if let Some(next) = g.neighbor_by_unit(at, unit) {
                at = next;
                odd = !odd;
            }
        }
        if per_length {
            tally.record(l, at, odd);
        }
    }
    if !per_length {
        tally.record(length, at, odd);
    }
}

/// Runs the walks with indices in `indices` and returns their tally.
pub fn run_walk_range(
    g: &WeightedGraph,
    start: usize,
    length: usize,
    per_length: bool,
    seed: u64,
    indices: Range<u64>,
) -> WalkTally {
    let n = g.vertex_count();
    let run_span = |mut acc: WalkTally, span: Range<u64>| {
        acc.walks += span.end.saturating_sub(span.start);
        for k in span {
            let mut rng = walk_rng(seed, k);
            walk_into(g, start, length, &mut rng, &mut acc);
        }
        acc
    };
    if indices.end.saturating_sub(indices.start) <= BLOCK {
        return run_span(WalkTally::empty(n, length, per_length), indices);
    }
    let first_block = indices.start / BLOCK;
    let last_block = indices.end.div_ceil(BLOCK);
    (first_block..last_block)
        .into_par_iter()
        .fold(
            || WalkTally::empty(n, length, per_length),
            |acc, b| {
                let lo = (b * BLOCK).max(indices.start);
                let hi = ((b + 1) * BLOCK).min(indices.end);
                run_span(acc, lo..hi)
            },
        )
        .reduce(
            || WalkTally::empty(n, length, per_length),
            |mut a, b| {
                a.merge(&b);
                a
            },
        )
}

/// Runs `cfg.walks` lazy walks of length `cfg.length` from `start`.
pub fn run_walks(g: &WeightedGraph, start: usize, cfg: &WalkConfig) -> Result<WalkTally> {
    if start >= g.vertex_count() {
        return Err(Error::InvalidInput(format!("start vertex {start} out of range")));
    }
    cfg.validate()?;
    Ok(run_walk_range(g, start, cfg.length, cfg.record_per_length, cfg.seed, 0..cfg.walks))
}

/// `(even_j − odd_j) / (d_j · w)` at the tally's final length; 0 when `d_j = 0`.
pub fn signed_estimate(tally: &WalkTally, g: &WeightedGraph, j: usize) -> f64 {
    signed_estimate_at(tally, g, tally.length(), j)
}

pub fn signed_estimate_at(tally: &WalkTally, g: &WeightedGraph, l: usize, j: usize) -> f64 {
    let d = g.degree(j);
    if d == 0.0 || tally.walks() == 0 {
        return 0.0;
    }
    (tally.even_at(l, j) as f64 - tally.odd_at(l, j) as f64) / (d * tally.walks() as f64)
}

/// Exact endpoint distribution `p^l` and parity-signed distribution `s^l`.
#[derive(Debug, Clone)]
pub struct ExactWalkDist {
    length: usize,
    /// Either every length `0..=length` or just the final one.
    probs: Vec<Vec<f64>>,
    signed: Vec<Vec<f64>>,
}

impl ExactWalkDist {
    pub fn length(&self) -> usize {
        self.length
    }

    fn index(&self, l: usize) -> usize {
        if self.probs.len() == 1 {
            assert_eq!(l, self.length, "only the final length was kept");
            0
        } else {
            l
        }
    }

    pub fn prob(&self, l: usize) -> &[f64] {
        &self.probs[self.index(l)]
    }

    pub fn signed(&self, l: usize) -> &[f64] {
        &self.signed[self.index(l)]
    }

    pub fn final_prob(&self) -> &[f64] {
        self.probs.last().unwrap()
    }

    pub fn final_signed(&self) -> &[f64] {
        self.signed.last().unwrap()
    }

    /// `q(j) = s^ℓ(j) / √d_j` (0 where `d_j = 0`).
    pub fn signed_walk_vector(&self, g: &WeightedGraph) -> Vec<f64> {
        self.final_signed()
            .iter()
            .enumerate()
            .map(|(j, &s)| {
                let d = g.degree(j);
                if d > 0.0 {
                    s / d.sqrt()
                } else {
                    0.0
                }
            })
            .collect()
    }
}

/// One exact lazy step applied to a signed or unsigned vector. With
/// `flip = true` the moving half changes sign (hop parity).
pub fn lazy_step(g: &WeightedGraph, x: &[f64], flip: bool) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    let sign = if flip { -1.0 } else { 1.0 };
    for (k, &mass) in x.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let d = g.degree(k);
        if d == 0.0 {
            out[k] += mass;
            continue;
        }
        out[k] += 0.5 * mass;
        let share = sign * 0.5 * mass / d;
        for (j, w) in g.neighbors(k) {
            out[j] += share * w;
        }
    }
    out
}

/// Exact DP over lengths `0..=length` from `start`.
pub fn exact_walk_distribution(
    g: &WeightedGraph,
    start: usize,
    length: usize,
    record_per_length: bool,
) -> Result<ExactWalkDist> {
    let n = g.vertex_count();
    if start >= n {
        return Err(Error::InvalidInput(format!("start vertex {start} out of range")));
    }
    if length > MAX_WALK_LENGTH {
        return Err(Error::Resource(format!("walk length {length} exceeds cap {MAX_WALK_LENGTH}")));
    }
    let rows = if record_per_length { length + 1 } else { 2 };
    if rows.saturating_mul(n).saturating_mul(2) > MAX_EXACT_ENTRIES {
        return Err(Error::Resource(format!("exact distribution for n = {n}, length = {length} exceeds memory budget")));
    }
    let mut p = vec![0.0; n];
    p[start] = 1.0;
    let mut s = p.clone();
    let mut probs = Vec::new();
    let mut signed = Vec::new();
    if record_per_length {
        probs.push(p.clone());
        signed.push(s.clone());
    }
    for _ in 0..length {
        p = lazy_step(g, &p, false);
        s = lazy_step(g, &s, true);
        if record_per_length {
            probs.push(p.clone());
            signed.push(s.clone());
        }
    }
    if !record_per_length {
        probs.push(p);
        signed.push(s);
    }
    Ok(ExactWalkDist { length, probs, signed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    fn edge() -> WeightedGraph {
        parse_edge_list("0 1").unwrap()
    }

    #[test]
    fn zero_length_walks_stay_home() {
        let g = edge();
        let t = run_walks(&g, 0, &WalkConfig::new(0, 5, 1)).unwrap();
        assert_eq!((t.even(0), t.odd(0), t.even(1), t.odd(1)), (5, 0, 0, 0));
    }

    #[test]
    fn one_step_moves_half_the_time() {
        let g = edge();
        let t = run_walks(&g, 0, &WalkConfig::new(1, 100_000, 9)).unwrap();
        assert_eq!(t.even(1), 0);
        let frac = t.odd(1) as f64 / 1e5;
        assert!((frac - 0.5).abs() < 0.01, "{frac}");
        let est = signed_estimate(&t, &g, 1);
        assert!((est + 0.5).abs() < 0.01, "{est}");
    }

    #[test]
    fn counts_are_conserved_per_length() {
        let g = parse_edge_list("0 1\n1 2\n2 3\n3 0\n0 2 2.5").unwrap();
        let t = run_walks(&g, 2, &WalkConfig::new(7, 3000, 4).per_length()).unwrap();
        for l in 0..=7 {
            let total: u64 = (0..4).map(|j| t.count_at(l, j)).sum();
            assert_eq!(total, 3000);
        }
    }

    #[test]
    fn sharding_does_not_change_tallies() {
        let g = parse_edge_list("0 1\n1 2\n2 3\n3 4\n4 0\n1 3").unwrap();
        let whole = run_walk_range(&g, 0, 9, true, 77, 0..10_000);
        let mut split = run_walk_range(&g, 0, 9, true, 77, 0..3_333);
        split.merge(&run_walk_range(&g, 0, 9, true, 77, 3_333..10_000));
        assert_eq!(whole, split);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let threaded = pool.install(|| run_walk_range(&g, 0, 9, true, 77, 0..10_000));
        assert_eq!(whole, threaded);
    }

    #[test]
    fn isolated_start_walks_in_place() {
        let g = WeightedGraph::from_edges(3, [(1, 2, 1.0)]).unwrap();
        let t = run_walks(&g, 0, &WalkConfig::new(4, 10, 0)).unwrap();
        assert_eq!(t.even(0), 10);
        assert_eq!(signed_estimate(&t, &g, 0), 0.0);
        let exact = exact_walk_distribution(&g, 0, 4, false).unwrap();
        assert_eq!(exact.final_prob(), &[1.0, 0.0, 0.0]);
        assert_eq!(exact.final_signed(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn estimate_arithmetic() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let mut t = WalkTally::empty(3, 2, false);
        t.walks = 100;
        t.even[1] = 30;
        t.odd[1] = 10;
        assert!((signed_estimate(&t, &g, 1) - 0.1).abs() < 1e-15);
        assert_eq!(signed_estimate(&t, &g, 2), 0.0);
    }

    #[test]
    fn invalid_requests() {
        let g = edge();
        assert!(matches!(run_walks(&g, 5, &WalkConfig::new(1, 1, 0)), Err(Error::InvalidInput(_))));
        assert!(matches!(run_walks(&g, 0, &WalkConfig::new(1, 0, 0)), Err(Error::InvalidParams(_))));
        assert!(matches!(run_walks(&g, 0, &WalkConfig::new(201, 1, 0)), Err(Error::Resource(_))));
        assert!(matches!(exact_walk_distribution(&g, 0, 201, false), Err(Error::Resource(_))));
    }

    #[test]
    fn exact_one_step_by_hand() {
        let g = edge();
        let d = exact_walk_distribution(&g, 0, 1, true).unwrap();
        assert_eq!(d.prob(0), &[1.0, 0.0]);
        assert_eq!(d.signed(0), &[1.0, 0.0]);
        assert_eq!(d.prob(1), &[0.5, 0.5]);
        assert_eq!(d.signed(1), &[0.5, -0.5]);
    }

    #[test]
    fn exact_mass_is_conserved_and_dominates_signed() {
        let g = parse_edge_list("0 1 0.5\n1 2 2\n2 3\n3 0 1.5\n0 2 3\n4 2").unwrap();
        let d = exact_walk_distribution(&g, 3, 25, true).unwrap();
        for l in 0..=25 {
            let total: f64 = d.prob(l).iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            for (p, s) in d.prob(l).iter().zip(d.signed(l)) {
                assert!(*p + 1e-15 >= s.abs());
            }
        }
    }

    #[test]
    fn tally_text_lists_nonzero_cells() {
        let g = edge();
        let t = run_walks(&g, 0, &WalkConfig::new(0, 3, 0)).unwrap();
        assert_eq!(t.to_text(), "# vertex length even odd\n0 0 3 0\n");
    }
}
