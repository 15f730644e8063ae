mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use rwcut::spectral::power_laplacian_vector;
use rwcut::walk::{exact_walk_distribution, run_walks, signed_estimate, WalkConfig};
use rwcut::WeightedGraph;

/// Dense `I − D^{-1/2} A D^{-1/2}`.
fn dense_laplacian(g: &WeightedGraph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut l = vec![vec![0.0; n]; n];
    for (i, row) in l.iter_mut().enumerate() {
        if g.degree(i) > 0.0 {
            row[i] = 1.0;
        }
    }
    for (u, v, w) in g.edges() {
        let x = w / (g.degree(u) * g.degree(v)).sqrt();
        l[u][v] -= x;
        l[v][u] -= x;
    }
    l
}

fn dense_power_vector(g: &WeightedGraph, start: usize, length: usize) -> Vec<f64> {
    let l = dense_laplacian(g);
    let n = g.vertex_count();
    let mut x = vec![0.0; n];
    x[start] = 1.0 / g.degree(start).sqrt();
    for _ in 0..length {
        x = (0..n).map(|i| 0.5 * (0..n).map(|j| l[i][j] * x[j]).sum::<f64>()).collect();
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn signed_walk_vector_is_a_laplacian_power(seed in any::<u64>(), n in 2usize..14, p in 0.0f64..0.7, length in 0usize..=12) {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let g = common::random_graph(&mut rng, n, p, true);
        for start in 0..n {
            let exact = exact_walk_distribution(&g, start, length, false).unwrap().signed_walk_vector(&g);
            let power = power_laplacian_vector(&g, start, length).unwrap();
            let dense = dense_power_vector(&g, start, length);
            for j in 0..n {
                prop_assert!((exact[j] - power[j]).abs() <= 1e-9, "walk {} vs operator {}", exact[j], power[j]);
                prop_assert!((power[j] - dense[j]).abs() <= 1e-9, "operator {} vs dense {}", power[j], dense[j]);
            }
        }
    }

    #[test]
    fn exact_distributions_conserve_mass(seed in any::<u64>(), n in 2usize..20, length in 0usize..=15) {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let g = common::random_graph(&mut rng, n, 0.3, true);
        let dist = exact_walk_distribution(&g, 0, length, true).unwrap();
        for l in 0..=length {
            let total: f64 = dist.prob(l).iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for (s, p) in dist.signed(l).iter().zip(dist.prob(l)) {
                prop_assert!(s.abs() <= p + 1e-15);
            }
        }
    }
}

#[test]
fn sampled_estimates_approach_the_exact_signed_mass() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
    let g = common::random_graph(&mut rng, 12, 0.3, true);
    let length = 6;
    let walks = 400_000;
    let tally = run_walks(&g, 2, &WalkConfig::new(length, walks, 9)).unwrap();
    let exact = exact_walk_distribution(&g, 2, length, false).unwrap();
    for j in 0..g.vertex_count() {
        let want = exact.final_signed()[j] / g.degree(j);
        let got = signed_estimate(&tally, &g, j);
        // Each walk contributes ±1/d_j, so the standard error is below 1/(d_j √w).
        let tol = 5.0 / (g.degree(j) * (walks as f64).sqrt());
        assert!((got - want).abs() <= tol, "vertex {j}: {got} vs {want}");
    }
}
