mod common;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rwcut::bench::{brute_force_maxcut, gen_planted, greedy_cut, random_cut};
use rwcut::graph::cut_value;
use rwcut::solver::{balance_solve, simple_solve, SolverConfig};
use rwcut::spectral::trevisan_baseline;
use rwcut::threshold::AlgoParams;

fn small_budget() -> SolverConfig {
    SolverConfig {
        params: AlgoParams { delta: 0.5, ..Default::default() },
        step_budget: 400_000,
        ..Default::default()
    }
}

#[test]
fn no_algorithm_beats_brute_force() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2024);
    let cfg = small_budget();
    for case in 0..200u64 {
        let n = rng.gen_range(2..=18);
        let p = rng.gen_range(0.1..0.8);
        let g = common::random_graph(&mut rng, n, p, case % 2 == 0);
        let opt = brute_force_maxcut(&g).unwrap().0;
        let greedy = greedy_cut(&g).value(&g);
        let simple = simple_solve(&g, 1.0, &cfg, case).unwrap();
        let balance = balance_solve(&g, 2.0, 0.25, None, &cfg, case).unwrap();
        let spectral = trevisan_baseline(&g, None, &mut rng).value(&g);
        let random = random_cut(&g, &mut rng).value(&g);
        for (name, v) in [("greedy", greedy), ("simple", simple.cut_value), ("balance", balance.cut_value), ("trevisan", spectral), ("random", random)] {
            assert!(v <= opt + 1e-12, "case {case}: {name} {v} > optimum {opt}");
        }
        assert!(greedy >= 0.5 - 1e-12);
        assert!(simple.cut_value >= greedy - 1e-12 && balance.cut_value >= greedy - 1e-12);
        assert!((simple.partition.value(&g) - simple.cut_value).abs() < 1e-12);
        assert!((balance.partition.value(&g) - balance.cut_value).abs() < 1e-12);
    }
}

#[test]
fn reported_levels_are_consistent() {
    let inst = gen_planted(200, 0.05, 6.0, 3).unwrap();
    let cfg = SolverConfig { step_budget: 2_000_000, ..small_budget() };
    let r = simple_solve(&inst.graph, 1.0, &cfg, 9).unwrap();
    assert!(r.steps <= cfg.step_budget);
    assert!(r.cut_value >= r.greedy_value);
    for level in &r.levels {
        if let Some(xi) = level.xi {
            assert!(xi > 0.0 && xi <= 1.0);
        }
    }
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["cut_value"].as_f64().unwrap(), r.cut_value);
    assert!(json.get("wall_time").is_none());
}

#[test]
fn planted_instances_are_reproducible() {
    let a = gen_planted(300, 0.1, 8.0, 11).unwrap();
    let b = gen_planted(300, 0.1, 8.0, 11).unwrap();
    assert_eq!(a.graph.to_edge_list(), b.graph.to_edge_list());
    assert_eq!(a.planted_left, b.planted_left);
    assert_eq!(a.planted_value, cut_value(&a.graph, &a.planted_left));
    assert!(a.planted_value >= 1.0 - 0.1 - 0.05);
    let c = gen_planted(300, 0.1, 8.0, 12).unwrap();
    assert_ne!(a.graph.to_edge_list(), c.graph.to_edge_list());
}
