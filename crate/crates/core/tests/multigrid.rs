use std::cell::Cell;

use mgvqe::circuit::{efficient_su2, refine};
use mgvqe::problems::{
    dirichlet_hamiltonian, erdos_renyi, laplacian_hierarchy, subgraph_hierarchy,
};
use mgvqe::vqe::{
    cold_multigrid_baseline, minimize, multigrid_vqe, static_vqe_baseline, vqe, MultigridConfig,
    OptimizerConfig, Shots,
};
use mgvqe::{Hierarchy, ParamCircuit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn exact_values_respect_the_variational_bound() {
    let mut r = rng(1);
    for n in 2..=4 {
        let h = dirichlet_hamiltonian::<f64>(n).unwrap();
        let lambda0 = h.to_dense().unwrap().min_eigenvalue();
        let ansatz: ParamCircuit = efficient_su2(n, 3).unwrap();
        for cfg in [OptimizerConfig::nelder_mead(300), OptimizerConfig::bfgs(30)] {
            let theta0: Vec<f64> = (0..ansatz.num_params())
                .map(|_| r.gen_range(-1.0..1.0))
                .collect();
            let res = vqe(&h, &ansatz, &theta0, Shots::Exact, &cfg, &mut r).unwrap();
            assert!(
                res.value >= lambda0 - 1e-9,
                "n={n}: {} < {lambda0}",
                res.value
            );
        }
    }
}

#[test]
fn evaluation_count_matches_objective_invocations() {
    let calls = Cell::new(0usize);
    for cfg in [OptimizerConfig::nelder_mead(50), OptimizerConfig::bfgs(10)] {
        calls.set(0);
        let res = minimize(
            |x: &[f64]| {
                calls.set(calls.get() + 1);
                Ok(x.iter().map(|v| (v - 0.3).powi(2)).sum::<f64>())
            },
            &[1.0, -1.0, 2.0],
            &cfg,
        )
        .unwrap();
        assert_eq!(res.n_evaluations, calls.get());
        assert!(res.n_evaluations >= 1);
    }
}

#[test]
fn runs_are_deterministic_given_the_seed() {
    let hier: Hierarchy = laplacian_hierarchy(4).unwrap();
    let seed = efficient_su2(2, 3).unwrap();
    let cfg: MultigridConfig = OptimizerConfig::nelder_mead(60).into();
    for shots in [Shots::Exact, Shots::Count(500)] {
        let a = multigrid_vqe(&hier, &seed, shots, &cfg, &mut rng(9)).unwrap();
        let b = multigrid_vqe(&hier, &seed, shots, &cfg, &mut rng(9)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn finite_difference_gradient_is_second_order() {
    let h = dirichlet_hamiltonian::<f64>(3).unwrap();
    let ansatz: ParamCircuit = efficient_su2(3, 3).unwrap();
    let mut r = rng(2);
    let f = |t: &[f64]| h.expectation_exact(&ansatz.simulate(t).unwrap()).unwrap();
    let grad = |t: &[f64], step: f64| -> Vec<f64> {
        (0..t.len())
            .map(|i| {
                let mut p = t.to_vec();
                let mut m = t.to_vec();
                p[i] += step;
                m[i] -= step;
                (f(&p) - f(&m)) / (2.0 * step)
            })
            .collect()
    };
    for _ in 0..5 {
        let theta: Vec<f64> = (0..ansatz.num_params())
            .map(|_| r.gen_range(-3.0..3.0))
            .collect();
        let coarse = grad(&theta, 1e-3);
        let fine = grad(&theta, 1e-4);
        for (a, b) in coarse.iter().zip(&fine) {
            // Truncation error is O(step^2) with O(1) third derivatives.
            assert!((a - b).abs() <= 1e-5, "{a} vs {b}");
        }
    }
}

#[test]
fn warm_start_reproduces_the_previous_stage() {
    let hier: Hierarchy = laplacian_hierarchy(4).unwrap();
    let seed: ParamCircuit = efficient_su2(2, 3).unwrap();
    let cfg: MultigridConfig = OptimizerConfig::nelder_mead(100).into();
    let res = multigrid_vqe(&hier, &seed, Shots::Exact, &cfg, &mut rng(0)).unwrap();
    let mut circ = seed.clone();
    for (j, pair) in res.windows(2).enumerate() {
        let next = refine(&circ).unwrap();
        let mut theta0 = pair[0].opt.theta_star.clone();
        theta0.resize(next.num_params(), 0.0);
        let prev = circ.simulate(&pair[0].opt.theta_star).unwrap();
        let start = next.simulate(&theta0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (b, a) in start.amplitudes().iter().enumerate() {
            assert!((a - prev.amplitudes()[b >> 1] * h).norm() < 1e-12);
        }
        // The warm start never ends above its initial point.
        let e0 = hier.stages()[j + 1]
            .hamiltonian
            .expectation_exact(&start)
            .unwrap();
        assert!(pair[1].opt.value <= e0 + 1e-15);
        circ = next;
    }
}

#[test]
fn warm_start_continuity_for_combinatorial_stages() {
    let g = erdos_renyi(5, 0.7, &mut rng(4)).unwrap();
    let hier: Hierarchy = subgraph_hierarchy(&g, 2).unwrap();
    let seed: ParamCircuit = efficient_su2(2, 3).unwrap();
    let cfg: MultigridConfig = OptimizerConfig::nelder_mead(80).into();
    let res = multigrid_vqe(&hier, &seed, Shots::Exact, &cfg, &mut rng(0)).unwrap();
    let mut circ = seed;
    for (j, done) in res[..res.len() - 1].iter().enumerate() {
        let next = refine(&circ).unwrap();
        let prev = circ.simulate(&done.opt.theta_star).unwrap();
        let mut theta0 = done.opt.theta_star.clone();
        theta0.resize(next.num_params(), 0.0);
        let start = next.simulate(&theta0).unwrap();
        // Predicted from stage j's distribution: the new variable is a fair coin.
        let stage = &hier.stages()[j + 1];
        let predicted: f64 = prev
            .probabilities()
            .iter()
            .enumerate()
            .map(|(b, p)| {
                p * 0.5
                    * (stage.hamiltonian.diagonal_entry(b << 1).unwrap()
                        + stage.hamiltonian.diagonal_entry((b << 1) | 1).unwrap())
            })
            .sum();
        let got = stage.hamiltonian.expectation_exact(&start).unwrap();
        assert!((got - predicted).abs() < 1e-12);
        circ = next;
    }
}

#[test]
fn multigrid_beats_static_on_the_laplacian() {
    let hier: Hierarchy = laplacian_hierarchy(6).unwrap();
    let seed = efficient_su2(2, 3).unwrap();
    let cfg = OptimizerConfig::nelder_mead(400);
    let mut mg = 0.0;
    let mut st = 0.0;
    for s in 0..10 {
        mg += multigrid_vqe(&hier, &seed, Shots::Exact, &cfg.into(), &mut rng(s))
            .unwrap()
            .last()
            .unwrap()
            .estimate;
        st += static_vqe_baseline(&hier.last().hamiltonian, Shots::Exact, &cfg, &mut rng(s))
            .unwrap()
            .value;
    }
    assert!(mg < st, "{mg} vs {st}");
}

#[test]
fn warm_and_cold_share_circuits_and_first_stage() {
    let hier: Hierarchy = laplacian_hierarchy(5).unwrap();
    let seed = efficient_su2(2, 3).unwrap();
    let cfg = MultigridConfig {
        seed_stage: OptimizerConfig::nelder_mead(200),
        refined_stages: OptimizerConfig::bfgs(20),
    };
    let warm = multigrid_vqe(&hier, &seed, Shots::Exact, &cfg, &mut rng(0)).unwrap();
    let cold = cold_multigrid_baseline(&hier, &seed, Shots::Exact, &cfg, &mut rng(0)).unwrap();
    assert_eq!(warm[0], cold[0]);
    for (w, c) in warm.iter().zip(&cold) {
        assert_eq!(w.num_params, c.num_params);
    }
    assert!(warm.last().unwrap().estimate <= cold.last().unwrap().estimate);
}
