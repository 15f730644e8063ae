//! Matrix-free normalized Laplacian `L = I − D^{-1/2} A D^{-1/2}`, sweep cuts
//! over tripartitions, and a recursive spectral MaxCut baseline.
//!
//! Everything here is an oracle: accuracy over speed.

use rand::Rng;

use crate::bench::greedy_extend;
use crate::error::{Error, Result};
use crate::graph::{metrics_by, CutMetrics, Partition, VertexSet, WeightedGraph};

/// Applies the normalized Laplacian without materializing it. Isolated
/// vertices have an all-zero adjacency row, so `L` acts as the identity there.
pub struct LaplacianOperator<'a> {
    graph: &'a WeightedGraph,
    inv_sqrt_degree: Vec<f64>,
}

impl<'a> LaplacianOperator<'a> {
    pub fn new(graph: &'a WeightedGraph) -> Self {
        let inv_sqrt_degree = graph
            .degrees()
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
            .collect();
        LaplacianOperator { graph, inv_sqrt_degree }
    }

    pub fn graph(&self) -> &WeightedGraph {
        self.graph
    }

    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let g = self.graph;
        for j in 0..g.vertex_count() {
            let mut acc = 0.0;
            for (k, w) in g.neighbors(j) {
                acc += w * self.inv_sqrt_degree[k] * x[k];
            }
            out[j] = x[j] - self.inv_sqrt_degree[j] * acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.apply_into(x, &mut out);
        out
    }

    /// `D^{1/2} 1`, the eigenvalue-0 direction.
    pub fn stationary_direction(&self) -> Vec<f64> {
        self.graph.degrees().iter().map(|d| d.sqrt()).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `2^{-ℓ} L^ℓ (e_start / √d_start)` by repeated application.
pub fn power_laplacian_vector(g: &WeightedGraph, start: usize, length: usize) -> Result<Vec<f64>> {
    if start >= g.vertex_count() {
        return Err(Error::InvalidInput(format!("start vertex {start} out of range")));
    }
    let d = g.degree(start);
    if !(d > 0.0) {
        return Err(Error::InvalidInput("start vertex has zero degree".into()));
    }
    let op = LaplacianOperator::new(g);
    let mut x = vec![0.0; g.vertex_count()];
    x[start] = 1.0 / d.sqrt();
    let mut next = vec![0.0; x.len()];
    for _ in 0..length {
        op.apply_into(&x, &mut next);
        for (a, b) in x.iter_mut().zip(&next) {
            *a = 0.5 * b;
        }
    }
    Ok(x)
}

/// `xᵀLx / xᵀx`.
pub fn rayleigh_quotient(op: &LaplacianOperator<'_>, x: &[f64]) -> Result<f64> {
    let nn = dot(x, x);
    if !(nn > 0.0) {
        return Err(Error::InvalidInput("Rayleigh quotient of the zero vector".into()));
    }
    Ok(dot(x, &op.apply(x)) / nn)
}

/// Best tripartition `P = {y ≥ t}`, `N = {y ≤ −t}` over candidate thresholds.
#[derive(Debug, Clone)]
pub struct SweepCut {
    pub positive: VertexSet,
    pub negative: VertexSet,
    pub threshold: f64,
    pub ratio: f64,
    pub metrics: CutMetrics,
}

/// Tries every distinct `t ∈ {|y(j)| > 0}` and keeps the tripartition with the
/// largest `cut / inc`; ties go to the larger classified volume, then the
/// smaller threshold.
pub fn sweep_cut_best(g: &WeightedGraph, y: &[f64]) -> Result<SweepCut> {
    let n = g.vertex_count();
    assert_eq!(y.len(), n);
    let mut order: Vec<usize> = (0..n).filter(|&j| y[j] != 0.0).collect();
    if order.is_empty() {
        return Err(Error::Degenerate("sweep over an all-zero vector".into()));
    }
    order.sort_by(|&a, &b| y[b].abs().total_cmp(&y[a].abs()).then(a.cmp(&b)));

    // side: None unclassified, Some(false) positive, Some(true) negative.
    let mut side: Vec<Option<bool>> = vec![None; n];
    let (mut good, mut cross, mut internal, mut volume) = (0.0, 0.0, 0.0, 0.0);
    let mut best: Option<(f64, f64, f64, usize)> = None; // ratio, volume, t, prefix
    let mut i = 0;
    while i < order.len() {
        let t = y[order[i]].abs();
        while i < order.len() && y[order[i]].abs() == t {
            let v = order[i];
            let sv = y[v] < 0.0;
            for (u, w) in g.neighbors(v) {
                match side[u] {
                    None => cross += w,
                    Some(su) => {
                        cross -= w;
                        if su != sv {
                            good += w;
                        } else {
                            internal += w;
                        }
                    }
                }
            }
            side[v] = Some(sv);
            volume += g.degree(v);
            i += 1;
        }
        let inc = good + cross + internal;
        let ratio = if inc > 0.0 { (good + cross / 2.0) / inc } else { 0.0 };
        let better = match best {
            None => true,
            Some((r, vol, bt, _)) => {
                ratio > r || (ratio == r && (volume > vol || (volume == vol && t < bt)))
            }
        };
        if better {
            best = Some((ratio, volume, t, i));
        }
    }
    let (_, _, threshold, prefix) = best.expect("at least one candidate threshold");
    let mut positive = VertexSet::empty(n);
    let mut negative = VertexSet::empty(n);
    for &v in &order[..prefix] {
        if y[v] > 0.0 {
            positive.insert(g, v);
        } else {
            negative.insert(g, v);
        }
    }
    let metrics = metrics_by(g, |v| {
        if positive.contains(v) {
            Some(false)
        } else if negative.contains(v) {
            Some(true)
        } else {
            None
        }
    });
    Ok(SweepCut { positive, negative, threshold, ratio: metrics.ratio(), metrics })
}

/// Power-method approximation of the top eigenvector of `L`, deflated
/// against `D^{1/2} 1` at every iteration.
pub fn top_eigenvector<R: Rng + ?Sized>(g: &WeightedGraph, iterations: usize, rng: &mut R) -> Vec<f64> {
    let op = LaplacianOperator::new(g);
    let n = g.vertex_count();
    let mut stationary = op.stationary_direction();
    let s_norm = norm(&stationary);
    if s_norm > 0.0 {
        stationary.iter_mut().for_each(|s| *s /= s_norm);
    }
    let active: Vec<bool> = g.degrees().iter().map(|&d| d > 0.0).collect();
    let mut x: Vec<f64> = (0..n)
        .map(|j| if active[j] { rng.gen::<f64>() * 2.0 - 1.0 } else { 0.0 })
        .collect();
    let mut next = vec![0.0; n];
    let project = |x: &mut [f64]| {
        let c = dot(x, &stationary);
        for (a, s) in x.iter_mut().zip(&stationary) {
            *a -= c * s;
        }
        let nx = norm(x);
        if nx > 0.0 {
            x.iter_mut().for_each(|a| *a /= nx);
        }
    };
    project(&mut x);
    for _ in 0..iterations {
        op.apply_into(&x, &mut next);
        for j in 0..n {
            x[j] = if active[j] { next[j] } else { 0.0 };
        }
        project(&mut x);
    }
    x
}

/// Default power-method iteration count, `8 ⌈log₂ n⌉`.
pub fn default_power_iterations(n: usize) -> usize {
    8 * (n.max(2) as f64).log2().ceil() as usize
}

/// Recursive spectral partition: approximate the top eigenvector on the
/// remaining graph, take the best sweep tripartition, orient it against the
/// vertices already placed, and recurse on the unclassified vertices. Stops
/// once the best sweep ratio is at most 1/2; the remainder is placed greedily.
pub fn trevisan_baseline<R: Rng + ?Sized>(
    g: &WeightedGraph,
    power_iterations: Option<usize>,
    rng: &mut R,
) -> Partition {
    let n = g.vertex_count();
    let mut assignment: Vec<Option<bool>> = vec![None; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    while !remaining.is_empty() {
        let sub = g.induced_subgraph(&remaining);
        if sub.edge_count() == 0 {
            break;
        }
        let iters = power_iterations.unwrap_or_else(|| default_power_iterations(sub.vertex_count()));
        let x = top_eigenvector(&sub, iters, rng);
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let d = sub.degree(j);
                if d > 0.0 {
                    v / d.sqrt()
                } else {
                    0.0
                }
            })
            .collect();
        let Ok(sweep) = sweep_cut_best(&sub, &y) else { break };
        if sweep.ratio <= 0.5 {
            break;
        }
        // Weight cut against already-placed vertices if P goes left.
        let (mut keep, mut flip) = (0.0, 0.0);
        for local in sweep.positive.iter().chain(sweep.negative.iter()) {
            let positive = sweep.positive.contains(local);
            for (u, w) in g.neighbors(remaining[local]) {
                if let Some(left) = assignment[u] {
                    if left != positive {
                        keep += w;
                    } else {
                        flip += w;
                    }
                }
            }
        }
        let positive_left = keep >= flip;
        for local in sweep.positive.iter() {
            assignment[remaining[local]] = Some(positive_left);
        }
        for local in sweep.negative.iter() {
            assignment[remaining[local]] = Some(!positive_left);
        }
        remaining.retain(|&v| assignment[v].is_none());
    }
    greedy_extend(g, &mut assignment);
    Partition::new(assignment.into_iter().map(|a| a.unwrap_or(true)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;
    use crate::walk::exact_walk_distribution;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn single_edge_power_vector() {
        let g = parse_edge_list("0 1").unwrap();
        assert_eq!(power_laplacian_vector(&g, 0, 1).unwrap(), vec![0.5, -0.5]);
        let q0 = power_laplacian_vector(&g, 0, 0).unwrap();
        assert_eq!(q0, vec![1.0, 0.0]);
    }

    #[test]
    fn zero_degree_start_rejected() {
        let g = WeightedGraph::from_edges(3, [(1, 2, 1.0)]).unwrap();
        assert!(power_laplacian_vector(&g, 0, 2).is_err());
    }

    #[test]
    fn stationary_direction_is_in_kernel() {
        let g = parse_edge_list("0 1 2\n1 2 0.5\n2 3\n3 0 4\n0 2").unwrap();
        let op = LaplacianOperator::new(&g);
        let s = op.stationary_direction();
        assert!(op.apply(&s).iter().all(|v| v.abs() < 1e-10));
        assert!(rayleigh_quotient(&op, &s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bipartite_rayleigh_is_two() {
        let g = parse_edge_list("0 3\n0 4\n1 4\n1 5\n2 5\n2 3 3").unwrap();
        let op = LaplacianOperator::new(&g);
        let x: Vec<f64> = (0..6)
            .map(|j| if j < 3 { g.degree(j).sqrt() } else { -g.degree(j).sqrt() })
            .collect();
        assert!((rayleigh_quotient(&op, &x).unwrap() - 2.0).abs() < 1e-12);
        assert!(rayleigh_quotient(&op, &[0.0; 6]).is_err());
    }

    #[test]
    fn power_vector_matches_exact_walks() {
        let g = parse_edge_list("0 1 1.5\n1 2\n2 3 0.25\n3 4\n4 0 2\n1 3").unwrap();
        for start in 0..5 {
            for l in 0..10 {
                let q = power_laplacian_vector(&g, start, l).unwrap();
                let exact = exact_walk_distribution(&g, start, l, false).unwrap();
                for (a, b) in q.iter().zip(exact.signed_walk_vector(&g)) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sweep_perfect_split() {
        let g = parse_edge_list("0 1").unwrap();
        let s = sweep_cut_best(&g, &[1.0, -1.0]).unwrap();
        assert_eq!(s.positive.iter().collect::<Vec<_>>(), vec![0]);
        assert_eq!(s.negative.iter().collect::<Vec<_>>(), vec![1]);
        assert_eq!(s.ratio, 1.0);
    }

    #[test]
    fn sweep_one_sided() {
        let g = parse_edge_list("0 1\n1 2\n0 2").unwrap();
        let s = sweep_cut_best(&g, &[0.3, 0.3, 0.3]).unwrap();
        assert!(s.negative.is_empty());
        assert_eq!(s.metrics.cross, 0.0);
        assert_eq!(s.ratio, 0.0);
        assert!(matches!(sweep_cut_best(&g, &[0.0; 3]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sweep_is_scale_and_sign_invariant() {
        let g = parse_edge_list("0 1\n1 2\n2 3\n3 0\n0 2\n3 4\n4 5").unwrap();
        let y = [0.9, -0.4, 0.35, -0.8, 0.1, -0.05];
        let a = sweep_cut_best(&g, &y).unwrap();
        let scaled: Vec<f64> = y.iter().map(|v| v * 3.5).collect();
        let b = sweep_cut_best(&g, &scaled).unwrap();
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let c = sweep_cut_best(&g, &neg).unwrap();
        assert_eq!(a.ratio, b.ratio);
        assert_eq!(a.ratio, c.ratio);
        assert_eq!(a.positive, c.negative);
    }

    #[test]
    fn baseline_on_even_cycle_is_perfect() {
        let edges: String = (0..12).map(|i| format!("{} {}\n", i, (i + 1) % 12)).collect();
        let g = parse_edge_list(&edges).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        let p = trevisan_baseline(&g, Some(400), &mut rng);
        assert_eq!(p.value(&g), 1.0);
    }

    #[test]
    fn baseline_on_triangle() {
        let g = parse_edge_list("0 1\n1 2\n0 2").unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let v = trevisan_baseline(&g, None, &mut rng).value(&g);
        assert!(v >= 1.0 / 3.0 && v <= 2.0 / 3.0 + 1e-12, "{v}");
    }
}
