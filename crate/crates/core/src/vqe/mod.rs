//! The VQE loop and the multigrid driver.
//!
//! [`multigrid_vqe`] optimizes the seed ansatz on the first (smallest) stage,
//! then repeatedly refines the circuit by one qubit and warm-starts the next
//! stage from the previous optimum with the new angles at zero. At that point
//! the refined state is the previous state tensored with `|+>`, so each stage
//! starts from a constant interpolation of the last solution.

mod optimize;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

pub use optimize::{minimize, Method, OptResult, OptimizerConfig};

use crate::circuit::{efficient_su2, refine, ParamCircuit, SEED_REPS};
use crate::error::{invalid, Result};
use crate::hamiltonian::Hamiltonian;
use crate::problems::{Hierarchy, Stage};
use crate::scalar::Real;
use crate::simcore::StateVector;

/// Quasi-Newton steps are only trusted on sampled objectives at least this precise.
pub const MIN_SHOTS_FOR_GRADIENTS: usize = 1_000_000;

/// How the objective is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shots {
    /// Exact expectation value from the amplitudes.
    Exact,
    /// Total shot budget per evaluation.
    Count(usize),
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Exact => f.write_str("exact"),
            Shots::Count(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Shots {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("exact") {
            return Ok(Shots::Exact);
        }
        let n: usize = s
            .replace('_', "")
            .parse()
            .or_else(|_| s.parse::<f64>().map(|v| v as usize))
            .map_err(|_| invalid(format!("bad shot count `{s}`")))?;
        if n == 0 {
            return Err(invalid("shot count must be at least 1"));
        }
        Ok(Shots::Count(n))
    }
}

/// Estimates `<psi|h|psi>` under the given shot setting.
pub fn estimate<T: Real, R: Rng + ?Sized>(
    h: &Hamiltonian<T>,
    psi: &StateVector<T>,
    shots: Shots,
    rng: &mut R,
) -> Result<T> {
    match shots {
        Shots::Exact => h.expectation_exact(psi),
        Shots::Count(n) => h.expectation_sampled(psi, n, rng),
    }
}

fn check_method(cfg: &OptimizerConfig, shots: Shots) -> Result<()> {
    match (cfg.method, shots) {
        (Method::Bfgs, Shots::Count(n)) if n < MIN_SHOTS_FOR_GRADIENTS => Err(invalid(format!(
            "finite-difference gradients need exact objectives or >= {MIN_SHOTS_FOR_GRADIENTS} shots, got {n}"
        ))),
        _ => Ok(()),
    }
}

/// Minimizes `theta -> <U(theta)|h|U(theta)>`. Sampled objectives draw from `rng`,
/// which advances with every evaluation.
pub fn vqe<T: Real, R: Rng + ?Sized>(
    h: &Hamiltonian<T>,
    ansatz: &ParamCircuit<T>,
    theta0: &[T],
    shots: Shots,
    cfg: &OptimizerConfig,
    rng: &mut R,
) -> Result<OptResult<T>> {
    if ansatz.num_qubits() != h.num_qubits() {
        return Err(invalid(format!(
            "{}-qubit ansatz for a {}-qubit Hamiltonian",
            ansatz.num_qubits(),
            h.num_qubits()
        )));
    }
    if theta0.len() != ansatz.num_params() {
        return Err(invalid(format!(
            "ansatz has {} parameters, initial point has {}",
            ansatz.num_params(),
            theta0.len()
        )));
    }
    check_method(cfg, shots)?;
    minimize(
        |theta: &[T]| estimate(h, &ansatz.simulate(theta)?, shots, rng),
        theta0,
        cfg,
    )
}

/// Most likely read-out at the given angles: the modal outcome of `shots`
/// fresh samples, or the largest-probability basis state for exact runs.
/// Ties go to the smaller index.
pub fn modal_bitstring<T: Real, R: Rng + ?Sized>(
    psi: &StateVector<T>,
    shots: Shots,
    rng: &mut R,
) -> Result<usize> {
    let weights: Vec<f64> = match shots {
        Shots::Exact => psi
            .probabilities()
            .iter()
            .map(|p| p.to_f64_lossy())
            .collect(),
        Shots::Count(n) => {
            let mut counts = vec![0.0; psi.dim()];
            for b in psi.sample(n, rng)? {
                counts[b] += 1.0;
            }
            counts
        }
    };
    let mut best = 0;
    for (b, w) in weights.iter().enumerate() {
        if *w > weights[best] {
            best = b;
        }
    }
    Ok(best)
}

/// Result of optimizing one hierarchy stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageResult<T> {
    pub stage_size: usize,
    pub num_params: usize,
    pub opt: OptResult<T>,
    /// Fresh estimate of the objective at the optimum under the run's shot setting.
    pub estimate: T,
    /// Exact expectation at the optimum.
    pub exact_value: T,
    /// Optimizer calls summed over this and all earlier stages of the run.
    pub cumulative_evaluations: usize,
    /// Modal read-out at the optimum (combinatorial stages only).
    pub most_frequent_bitstring: Option<usize>,
}

fn finish_stage<T: Real, R: Rng + ?Sized>(
    stage: &Stage<T>,
    ansatz: &ParamCircuit<T>,
    opt: OptResult<T>,
    shots: Shots,
    cumulative_evaluations: usize,
    rng: &mut R,
) -> Result<StageResult<T>> {
    let psi = ansatz.simulate(&opt.theta_star)?;
    let estimate = match shots {
        Shots::Exact => opt.value,
        Shots::Count(_) => estimate(&stage.hamiltonian, &psi, shots, rng)?,
    };
    let exact_value = stage.hamiltonian.expectation_exact(&psi)?;
    let most_frequent_bitstring = if stage.is_combinatorial() {
        Some(modal_bitstring(&psi, shots, rng)?)
    } else {
        None
    };
    Ok(StageResult {
        stage_size: stage.size,
        num_params: ansatz.num_params(),
        opt,
        estimate,
        exact_value,
        cumulative_evaluations,
        most_frequent_bitstring,
    })
}

/// Optimizer settings for the seed stage and for every refined stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultigridConfig {
    pub seed_stage: OptimizerConfig,
    pub refined_stages: OptimizerConfig,
}

impl From<OptimizerConfig> for MultigridConfig {
    fn from(cfg: OptimizerConfig) -> Self {
        Self {
            seed_stage: cfg,
            refined_stages: cfg,
        }
    }
}

fn run_hierarchy<T: Real, R: Rng + ?Sized>(
    hier: &Hierarchy<T>,
    seed: &ParamCircuit<T>,
    shots: Shots,
    cfg: &MultigridConfig,
    warm: bool,
    rng: &mut R,
) -> Result<Vec<StageResult<T>>> {
    if seed.num_qubits() != hier.first_size() {
        return Err(invalid(format!(
            "seed ansatz has {} qubits, first stage has {}",
            seed.num_qubits(),
            hier.first_size()
        )));
    }
    let mut ansatz = seed.clone();
    let mut theta = vec![T::zero(); seed.num_params()];
    let mut total_evals = 0;
    let mut results = Vec::with_capacity(hier.len());
    for (i, stage) in hier.stages().iter().enumerate() {
        let opt_cfg = if i == 0 {
            &cfg.seed_stage
        } else {
            &cfg.refined_stages
        };
        if i > 0 {
            ansatz = refine(&ansatz)?;
            if warm {
                theta.resize(ansatz.num_params(), T::zero());
            } else {
                theta = vec![T::zero(); ansatz.num_params()];
            }
        }
        let opt = vqe(&stage.hamiltonian, &ansatz, &theta, shots, opt_cfg, rng)?;
        total_evals += opt.n_evaluations;
        theta.clone_from(&opt.theta_star);
        results.push(finish_stage(stage, &ansatz, opt, shots, total_evals, rng)?);
    }
    Ok(results)
}

/// Multigrid VQE over `hier`, seeded with `seed` on the first stage.
pub fn multigrid_vqe<T: Real, R: Rng + ?Sized>(
    hier: &Hierarchy<T>,
    seed: &ParamCircuit<T>,
    shots: Shots,
    cfg: &MultigridConfig,
    rng: &mut R,
) -> Result<Vec<StageResult<T>>> {
    run_hierarchy(hier, seed, shots, cfg, true, rng)
}

/// Same circuits as [`multigrid_vqe`] but every stage restarts from all-zero angles.
pub fn cold_multigrid_baseline<T: Real, R: Rng + ?Sized>(
    hier: &Hierarchy<T>,
    seed: &ParamCircuit<T>,
    shots: Shots,
    cfg: &MultigridConfig,
    rng: &mut R,
) -> Result<Vec<StageResult<T>>> {
    run_hierarchy(hier, seed, shots, cfg, false, rng)
}

/// Initial angles of the static baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StaticInit {
    #[default]
    Zeros,
    /// Uniform in `[-pi, pi)` drawn from the run's rng.
    Random,
}

fn static_theta0<T: Real, R: Rng + ?Sized>(
    n_params: usize,
    init: StaticInit,
    rng: &mut R,
) -> Vec<T> {
    match init {
        StaticInit::Zeros => vec![T::zero(); n_params],
        StaticInit::Random => (0..n_params)
            .map(|_| T::lit(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
            .collect(),
    }
}

/// VQE with the hardware-efficient ansatz on `h`'s register, zero-initialized.
pub fn static_vqe_baseline<T: Real, R: Rng + ?Sized>(
    h: &Hamiltonian<T>,
    shots: Shots,
    cfg: &OptimizerConfig,
    rng: &mut R,
) -> Result<OptResult<T>> {
    let ansatz = efficient_su2(h.num_qubits(), SEED_REPS)?;
    let theta0 = static_theta0(ansatz.num_params(), StaticInit::Zeros, rng);
    vqe(h, &ansatz, &theta0, shots, cfg, rng)
}

/// Static baseline on one hierarchy stage, reported like a multigrid stage.
pub fn static_stage<T: Real, R: Rng + ?Sized>(
    stage: &Stage<T>,
    shots: Shots,
    cfg: &OptimizerConfig,
    init: StaticInit,
    rng: &mut R,
) -> Result<StageResult<T>> {
    let ansatz = efficient_su2(stage.size, SEED_REPS)?;
    let theta0 = static_theta0(ansatz.num_params(), init, rng);
    let opt = vqe(&stage.hamiltonian, &ansatz, &theta0, shots, cfg, rng)?;
    let evals = opt.n_evaluations;
    finish_stage(stage, &ansatz, opt, shots, evals, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Pauli, PauliString};
    use crate::problems::{dirichlet_hamiltonian, laplacian_hierarchy, maxcut_hamiltonian, Graph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shots_parse_and_print() {
        assert_eq!("exact".parse::<Shots>().unwrap(), Shots::Exact);
        assert_eq!("1000".parse::<Shots>().unwrap(), Shots::Count(1000));
        assert_eq!("1e6".parse::<Shots>().unwrap(), Shots::Count(1_000_000));
        assert!("0".parse::<Shots>().is_err());
        assert_eq!(Shots::Count(1000).to_string(), "1000");
    }

    #[test]
    fn single_qubit_z() {
        let h =
            Hamiltonian::from_pauli_strings(1, &[PauliString::sparse(1, &[(0, Pauli::Z)], 1.0)])
                .unwrap();
        let ansatz = efficient_su2::<f64>(1, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = vqe(
            &h,
            &ansatz,
            &[0.0; 8],
            Shots::Exact,
            &OptimizerConfig::nelder_mead(2000),
            &mut rng,
        )
        .unwrap();
        assert!(r.value <= -1.0 + 1e-6, "{}", r.value);
    }

    #[test]
    fn dirichlet_two_qubits_with_restarts() {
        let h = dirichlet_hamiltonian::<f64>(2).unwrap();
        let ansatz = efficient_su2::<f64>(2, 3).unwrap();
        let lambda0 = h.to_dense().unwrap().min_eigenvalue();
        let mut cfg = OptimizerConfig::bfgs(500);
        cfg.function_tolerance = 1e-12;
        let mut best = f64::INFINITY;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let theta0: Vec<f64> = (0..16).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let r = vqe(&h, &ansatz, &theta0, Shots::Exact, &cfg, &mut rng).unwrap();
            assert!(r.value >= lambda0 - 1e-9);
            best = best.min(r.value);
        }
        assert!((best - lambda0).abs() < 1e-4, "{best}");
    }

    #[test]
    fn triangle_maxcut() {
        let h = maxcut_hamiltonian::<f64>(&Graph::complete(3)).unwrap();
        let ansatz = efficient_su2::<f64>(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let theta0: Vec<f64> = (0..24).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = vqe(
            &h,
            &ansatz,
            &theta0,
            Shots::Exact,
            &OptimizerConfig::nelder_mead(3000),
            &mut rng,
        )
        .unwrap();
        assert!(r.value < -1.9, "{}", r.value);
        assert!(r.value >= -2.0 - 1e-9);
    }

    #[test]
    fn degenerate_hierarchy_equals_plain_vqe() {
        let hier = laplacian_hierarchy::<f64>(2).unwrap();
        let seed = efficient_su2::<f64>(2, 3).unwrap();
        let cfg = OptimizerConfig::nelder_mead(300);
        let mg = multigrid_vqe(
            &hier,
            &seed,
            Shots::Exact,
            &cfg.into(),
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        let plain = vqe(
            &hier.stages()[0].hamiltonian,
            &seed,
            &[0.0; 16],
            Shots::Exact,
            &cfg,
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(mg.len(), 1);
        assert_eq!(mg[0].opt, plain);
    }

    #[test]
    fn gradients_rejected_on_low_shot_objectives() {
        let h = dirichlet_hamiltonian::<f64>(2).unwrap();
        let ansatz = efficient_su2::<f64>(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = vqe(
            &h,
            &ansatz,
            &[0.0; 16],
            Shots::Count(1000),
            &OptimizerConfig::bfgs(10),
            &mut rng,
        );
        assert!(err.is_err());
        assert!(vqe(
            &h,
            &ansatz,
            &[0.0; 15],
            Shots::Exact,
            &OptimizerConfig::bfgs(10),
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn seed_mismatch_is_rejected() {
        let hier = laplacian_hierarchy::<f64>(3).unwrap();
        let seed = efficient_su2::<f64>(3, 3).unwrap();
        let cfg: MultigridConfig = OptimizerConfig::nelder_mead(10).into();
        assert!(multigrid_vqe(
            &hier,
            &seed,
            Shots::Exact,
            &cfg,
            &mut ChaCha8Rng::seed_from_u64(0)
        )
        .is_err());
    }

    #[test]
    fn modal_bitstring_ties_go_low() {
        let psi = StateVector::<f64>::from_amplitudes(vec![
            num_complex::Complex::new(0.0, 0.0),
            num_complex::Complex::new(1.0, 0.0),
            num_complex::Complex::new(1.0, 0.0),
            num_complex::Complex::new(0.0, 0.0),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(modal_bitstring(&psi, Shots::Exact, &mut rng).unwrap(), 1);
    }
}
