#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rwcut::WeightedGraph;

/// Erdős–Rényi graph with a Hamiltonian path added so no vertex is isolated.
/// Weights are drawn from a mix of unit, half-integer and uniform values.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, weighted: bool) -> WeightedGraph {
    let mut edges = Vec::new();
    let weight = |rng: &mut R| {
        if !weighted {
            return 1.0;
        }
        match rng.gen_range(0..3) {
            0 => 1.0,
            1 => 0.5 * rng.gen_range(1..6) as f64,
            _ => rng.gen_range(0.1..3.0),
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for pair in order.windows(2) {
        let w = weight(rng);
        edges.push((pair[0], pair[1], w));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                let w = weight(rng);
                edges.push((a, b, w));
            }
        }
    }
    WeightedGraph::from_edges(n, edges).unwrap()
}

/// Two `K_k` joined by the edge `(0, k)`.
pub fn dumbbell(k: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for base in [0, k] {
        for a in 0..k {
            for b in a + 1..k {
                edges.push((base + a, base + b, 1.0));
            }
        }
    }
    edges.push((0, k, 1.0));
    WeightedGraph::from_edges(2 * k, edges).unwrap()
}

/// Union of `cycles` random Hamiltonian cycles; repeated edges add weight.
pub fn expander<R: Rng>(rng: &mut R, n: usize, cycles: usize) -> WeightedGraph {
    let mut edges = Vec::new();
    for _ in 0..cycles {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        for i in 0..n {
            edges.push((order[i], order[(i + 1) % n], 1.0));
        }
    }
    WeightedGraph::from_edges(n, edges).unwrap()
}

pub fn complete(n: usize) -> WeightedGraph {
    let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b, 1.0)));
    WeightedGraph::from_edges(n, edges).unwrap()
}
