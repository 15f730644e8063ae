//! Baselines and ground truth: exhaustive MaxCut, greedy and random cuts, and
//! planted-bipartition instance generation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Partition, VertexSet, WeightedGraph};

/// Largest vertex count accepted by the exhaustive search.
pub const MAX_BRUTE_FORCE: usize = 22;

/// Best completion of a partial assignment by Gray-code enumeration over the
/// unassigned vertices. When nothing is assigned yet, the first vertex is
/// pinned to the left to halve the search.
pub fn brute_force_extend(g: &WeightedGraph, fixed: &[Option<bool>]) -> Result<Vec<bool>> {
    let n = g.vertex_count();
    assert_eq!(fixed.len(), n);
    let mut free: Vec<usize> = (0..n).filter(|&v| fixed[v].is_none()).collect();
    let mut side: Vec<bool> = fixed.iter().map(|s| s.unwrap_or(true)).collect();
    if free.len() == n && n > 0 {
        free.remove(0);
    }
    if free.len() > MAX_BRUTE_FORCE {
        return Err(Error::Resource(format!(
            "exhaustive search over {} free vertices exceeds {MAX_BRUTE_FORCE}",
            free.len()
        )));
    }
    let mut cut: f64 = g.edges().filter(|&(u, v, _)| side[u] != side[v]).map(|(_, _, w)| w).sum();
    let mut best = (cut, side.clone());
    for k in 1u64..(1u64 << free.len()) {
        let v = free[k.trailing_zeros() as usize];
        for (u, w) in g.neighbors(v) {
            if side[u] == side[v] {
                cut += w;
            } else {
                cut -= w;
            }
        }
        side[v] = !side[v];
        if cut > best.0 + 1e-12 {
            best = (cut, side.clone());
        }
    }
    Ok(best.1)
}

/// Exact MaxCut value and a witnessing left side, for `n ≤ 22`.
pub fn brute_force_maxcut(g: &WeightedGraph) -> Result<(f64, VertexSet)> {
    let n = g.vertex_count();
    if n > MAX_BRUTE_FORCE {
        return Err(Error::Resource(format!("brute force limited to {MAX_BRUTE_FORCE} vertices, got {n}")));
    }
    let left = brute_force_extend(g, &vec![None; n])?;
    let part = Partition::new(left);
    Ok((part.value(g), part.left_set(g)))
}

/// Places every unassigned vertex, in descending degree order (ties by id),
/// on the side cutting more weight to already-placed neighbours; ties go left.
pub fn greedy_extend(g: &WeightedGraph, assignment: &mut [Option<bool>]) {
    let mut order: Vec<usize> = (0..g.vertex_count()).filter(|&v| assignment[v].is_none()).collect();
    order.sort_by(|&a, &b| g.degree(b).total_cmp(&g.degree(a)).then(a.cmp(&b)));
    for v in order {
        let (mut to_left, mut to_right) = (0.0, 0.0);
        for (u, w) in g.neighbors(v) {
            match assignment[u] {
                Some(true) => to_left += w,
                Some(false) => to_right += w,
                None => {}
            }
        }
        // Going left cuts the edges to right-placed neighbours.
        assignment[v] = Some(to_right >= to_left);
    }
}

pub fn greedy_cut(g: &WeightedGraph) -> Partition {
    let mut assignment = vec![None; g.vertex_count()];
    greedy_extend(g, &mut assignment);
    Partition::new(assignment.into_iter().map(|s| s.unwrap_or(true)).collect())
}

/// Independent fair coin per vertex.
pub fn random_cut<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> Partition {
    Partition::new((0..g.vertex_count()).map(|_| rng.gen::<bool>()).collect())
}

/// A graph built around a known bipartition.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub graph: WeightedGraph,
    pub planted_left: VertexSet,
    pub planted_value: f64,
    pub target_eps: f64,
    pub avg_degree: f64,
    pub seed: u64,
}

/// Sidecar metadata written next to a generated instance.
#[derive(Debug, Clone, Serialize)]
pub struct PlantedMeta {
    pub n: usize,
    pub edges: usize,
    pub target_eps: f64,
    pub avg_degree: f64,
    pub seed: u64,
    pub planted_value: f64,
    pub planted_left: Vec<usize>,
}

impl PlantedInstance {
    pub fn meta(&self) -> PlantedMeta {
        PlantedMeta {
            n: self.graph.vertex_count(),
            edges: self.graph.edge_count(),
            target_eps: self.target_eps,
            avg_degree: self.avg_degree,
            seed: self.seed,
            planted_value: self.planted_value,
            planted_left: self.planted_left.iter().collect(),
        }
    }
}

/// Splits `n` vertices into random halves and samples `⌈n·avg_degree/2⌉`
/// distinct unit edges, each crossing with probability `1 − target_eps` and
/// inside a uniformly chosen half otherwise. Duplicates are redrawn.
pub fn gen_planted(n: usize, target_eps: f64, avg_degree: f64, seed: u64) -> Result<PlantedInstance> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParams(format!("n = {n} must be even and at least 2")));
    }
    if !(0.0..0.5).contains(&target_eps) {
        return Err(Error::InvalidParams(format!("target_eps = {target_eps} outside [0, 0.5)")));
    }
    if !(avg_degree >= 1.0 && avg_degree.is_finite()) {
        return Err(Error::InvalidParams(format!("avg_degree = {avg_degree} must be at least 1")));
    }
    let half = n / 2;
    if target_eps > 0.0 && half < 2 {
        return Err(Error::InvalidParams("within-side edges need at least two vertices per side".into()));
    }
    let wanted = (n as f64 * avg_degree / 2.0).ceil() as usize;
    let crossing_pairs = half * half;
    let within_pairs = half * (half - 1);
    let available = if target_eps > 0.0 { crossing_pairs + within_pairs } else { crossing_pairs };
    // Keep enough slack that resampling terminates quickly.
    if wanted * 2 > available {
        return Err(Error::InvalidParams(format!(
            "{wanted} edges requested but only {available} vertex pairs are admissible"
        )));
    }

    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let (left, right) = perm.split_at(half);

    let mut seen = std::collections::HashSet::with_capacity(wanted * 2);
    let mut edges = Vec::with_capacity(wanted);
    let cap = 100 * wanted + 1000;
    let mut attempts = 0;
    while edges.len() < wanted {
        attempts += 1;
        if attempts > cap {
            return Err(Error::InvalidParams("edge sampling did not converge".into()));
        }
        let (u, v) = if rng.gen::<f64>() >= target_eps {
            (left[rng.gen_range(0..half)], right[rng.gen_range(0..half)])
        } else {
            let side = if rng.gen::<bool>() { left } else { right };
            let a = rng.gen_range(0..half);
            let mut b = rng.gen_range(0..half - 1);
            if b >= a {
                b += 1;
            }
            (side[a], side[b])
        };
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push((key.0, key.1, 1.0));
        }
    }
    let graph = WeightedGraph::from_edges(n, edges)?;
    let planted_left = VertexSet::from_vertices(&graph, left.iter().copied());
    let planted_value = Partition::new(planted_left.mask().to_vec()).value(&graph);
    Ok(PlantedInstance { graph, planted_left, planted_value, target_eps, avg_degree, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cut_value, parse_edge_list};

    fn cycle(n: usize) -> WeightedGraph {
        WeightedGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let tri = parse_edge_list("0 1\n1 2\n2 0").unwrap();
        assert!((brute_force_maxcut(&tri).unwrap().0 - 2.0 / 3.0).abs() < 1e-12);
        assert!((brute_force_maxcut(&cycle(5)).unwrap().0 - 0.8).abs() < 1e-12);
        let (v, left) = brute_force_maxcut(&cycle(8)).unwrap();
        assert_eq!(v, 1.0);
        assert!(left.contains(0));
        assert_eq!(cut_value(&cycle(8), &left), 1.0);
        assert!(matches!(brute_force_maxcut(&cycle(23)), Err(Error::Resource(_))));
    }

    #[test]
    fn brute_force_naive_agreement() {
        let g = parse_edge_list("0 1 2\n1 2 0.5\n2 3\n3 0 3\n0 2\n3 4 1.5\n4 1").unwrap();
        let mut best: f64 = 0.0;
        for mask in 0u32..32 {
            let p = Partition::new((0..5).map(|v| mask >> v & 1 == 1).collect());
            best = best.max(p.value(&g));
        }
        assert!((brute_force_maxcut(&g).unwrap().0 - best).abs() < 1e-12);
    }

    #[test]
    fn extension_respects_fixed() {
        let g = cycle(6);
        let mut fixed = vec![None; 6];
        fixed[0] = Some(true);
        fixed[1] = Some(true);
        let side = brute_force_extend(&g, &fixed).unwrap();
        assert!(side[0] && side[1]);
        // A path of five edges between two same-side endpoints loses one edge.
        assert!((Partition::new(side).value(&g) - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_examples() {
        let edge = parse_edge_list("0 1").unwrap();
        assert_eq!(greedy_cut(&edge).value(&edge), 1.0);
        // Degrees tie, so the order is 0, 1, 2: 0 → L, 1 → R, 2 → L (tie).
        let tri = parse_edge_list("0 1\n1 2\n2 0").unwrap();
        let p = greedy_cut(&tri);
        assert_eq!(p.sides(), &[true, false, true]);
        assert!((p.value(&tri) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn greedy_at_least_half() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.gen_range(2..30);
            let edges: Vec<_> = (0..n * 3)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0.1..3.0)))
                .filter(|e| e.0 != e.1)
                .collect();
            let g = WeightedGraph::from_edges(n, edges).unwrap();
            if g.edge_count() > 0 {
                assert!(greedy_cut(&g).value(&g) >= 0.5);
            }
        }
    }

    #[test]
    fn random_cut_mean_and_determinism() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
        let edges: Vec<_> = (0..400).map(|_| (rng.gen_range(0..60), rng.gen_range(0..60), 1.0)).filter(|e| e.0 != e.1).collect();
        let g = WeightedGraph::from_edges(60, edges).unwrap();
        let trials = 10_000;
        let mean: f64 = (0..trials).map(|_| random_cut(&g, &mut rng).value(&g)).sum::<f64>() / trials as f64;
        assert!((mean - 0.5).abs() < 0.01);
        let a = random_cut(&g, &mut Xoshiro256PlusPlus::seed_from_u64(1));
        let b = random_cut(&g, &mut Xoshiro256PlusPlus::seed_from_u64(1));
        assert_eq!(a, b);
        let empty = WeightedGraph::from_edges(3, []).unwrap();
        assert_eq!(random_cut(&empty, &mut rng).value(&empty), 0.0);
    }

    #[test]
    fn planted_examples() {
        let inst = gen_planted(500, 0.0, 8.0, 1).unwrap();
        assert_eq!(inst.planted_value, 1.0);
        assert_eq!(inst.graph.edge_count(), 2000);
        let inst = gen_planted(500, 0.1, 8.0, 2).unwrap();
        assert!((0.88..=0.92).contains(&inst.planted_value), "{}", inst.planted_value);
        assert_eq!(inst.planted_value, cut_value(&inst.graph, &inst.planted_left));
        let again = gen_planted(500, 0.1, 8.0, 2).unwrap();
        assert_eq!(inst.graph.to_edge_list(), again.graph.to_edge_list());
        let small = gen_planted(4, 0.0, 1.0, 5).unwrap();
        assert_eq!(small.planted_value, 1.0);
        assert_eq!(small.graph.edge_count(), 2);
    }

    #[test]
    fn planted_rejects_bad_params() {
        assert!(gen_planted(5, 0.1, 4.0, 1).is_err());
        assert!(gen_planted(10, 0.5, 4.0, 1).is_err());
        assert!(gen_planted(10, 0.1, 0.5, 1).is_err());
        assert!(gen_planted(6, 0.0, 20.0, 1).is_err());
        assert!(gen_planted(2, 0.1, 1.0, 1).is_err());
    }
}
