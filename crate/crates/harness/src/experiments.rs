//! Trial drivers for each experiment and their aggregation into summary rows.
//!
//! Trial `t` draws everything from ChaCha8 generators seeded with
//! `base_seed + t`; separate streams of that seed feed instance generation,
//! each optimization arm and each static-baseline stage, so adding trials or
//! arms never perturbs existing rows.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use mgvqe::circuit::{efficient_su2, SEED_REPS};
use mgvqe::problems::{
    erdos_renyi, hard_instance_clauses, laplacian_hierarchy, random_eksat, sat_first_stage,
    subformula_hierarchy, subgraph_hierarchy,
};
use mgvqe::vqe::{
    cold_multigrid_baseline, multigrid_vqe, static_stage, MultigridConfig, OptimizerConfig, Shots,
    StageResult, StaticInit,
};
use mgvqe::Hierarchy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::stats::{ci95, mean};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arm {
    Multigrid,
    Static,
    Cold,
}

impl Arm {
    pub fn name(self) -> &'static str {
        match self {
            Arm::Multigrid => "multigrid",
            Arm::Static => "static",
            Arm::Cold => "cold",
        }
    }
}

const STREAM_INSTANCE: u64 = 0;
const STREAM_MULTIGRID: u64 = 1;
const STREAM_COLD: u64 = 2;
const STREAM_STATIC_BASE: u64 = 16;

/// Generator for one (trial, purpose) pair.
pub fn trial_rng(base_seed: u64, trial: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(trial as u64));
    rng.set_stream(stream);
    rng
}

/// One (trial, stage, arm) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub stage: usize,
    pub arm: Arm,
    pub shots: Shots,
    /// Estimated eigenvalue or approximation ratio; `None` when undefined.
    pub value: Option<f64>,
    pub calls: usize,
    /// Absolute deviation from the known optimum (Laplacian runs).
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub stage: usize,
    pub arm: Arm,
    pub shots: Shots,
    pub mean: f64,
    pub ci95: f64,
    pub calls_mean: f64,
    pub calls_ci95: f64,
    /// Trials with a defined value.
    pub n: usize,
    /// Trials whose stage had an undefined approximation ratio.
    pub n_discarded: usize,
    pub error_mean: Option<f64>,
    pub error_ci95: Option<f64>,
}

/// Summary rows of one output table, sorted by (stage, arm, shots).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub rows: Vec<SummaryRow>,
}

impl Table {
    pub fn find(&self, stage: usize, arm: Arm, shots: Shots) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.stage == stage && r.arm == arm && r.shots == shots)
    }

    pub fn aggregate(samples: &[Sample]) -> Self {
        let mut groups: BTreeMap<(usize, Arm, Shots), Vec<&Sample>> = BTreeMap::new();
        for s in samples {
            groups.entry((s.stage, s.arm, s.shots)).or_default().push(s);
        }
        let rows = groups
            .into_iter()
            .map(|((stage, arm, shots), group)| {
                let valid: Vec<&Sample> = group
                    .iter()
                    .copied()
                    .filter(|s| s.value.is_some())
                    .collect();
                let values: Vec<f64> = valid.iter().filter_map(|s| s.value).collect();
                let calls: Vec<f64> = valid.iter().map(|s| s.calls as f64).collect();
                let errors: Vec<f64> = valid.iter().filter_map(|s| s.error).collect();
                let has_errors = !errors.is_empty();
                SummaryRow {
                    stage,
                    arm,
                    shots,
                    mean: mean(&values),
                    ci95: ci95(&values),
                    calls_mean: mean(&calls),
                    calls_ci95: ci95(&calls),
                    n: values.len(),
                    n_discarded: group.len() - values.len(),
                    error_mean: has_errors.then(|| mean(&errors)),
                    error_ci95: has_errors.then(|| ci95(&errors)),
                }
            })
            .collect();
        Self { rows }
    }
}

/// What a run produced: one table, or one per edge probability for MaxCut.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Single(Table),
    PerP(Vec<(f64, Table)>),
    /// Ground vectors per register size.
    Eigvecs(Vec<(usize, Vec<f64>)>),
}

/// Runs `f` for every trial on a pool of `jobs` workers (0 = all cores).
/// Results come back in trial order regardless of scheduling.
fn par_trials<F>(trials: usize, jobs: usize, f: F) -> Result<Vec<Sample>>
where
    F: Fn(usize) -> Result<Vec<Sample>> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building the worker pool")?;
    let per_trial: Vec<Vec<Sample>> =
        pool.install(|| (0..trials).into_par_iter().map(&f).collect::<Result<_>>())?;
    Ok(per_trial.into_iter().flatten().collect())
}

fn nm(cfg: &ExperimentConfig) -> OptimizerConfig {
    let mut o = OptimizerConfig::nelder_mead(cfg.max_iterations);
    o.function_tolerance = cfg.function_tolerance;
    o
}

fn static_init(cfg: &ExperimentConfig) -> StaticInit {
    if cfg.static_random_init {
        StaticInit::Random
    } else {
        StaticInit::Zeros
    }
}

fn seed_ansatz(size: usize) -> Result<mgvqe::ParamCircuit> {
    Ok(efficient_su2(size, SEED_REPS)?)
}

/// Laplacian stages report the estimate and its error against the known
/// ground energy; combinatorial stages report the approximation ratio of the
/// modal read-out.
fn stage_samples(
    hier: &Hierarchy,
    results: &[StageResult<f64>],
    arm: Arm,
    shots: Shots,
    laplacian: bool,
) -> Vec<Sample> {
    hier.stages()
        .iter()
        .zip(results)
        .map(|(stage, r)| {
            if laplacian {
                Sample {
                    stage: stage.size,
                    arm,
                    shots,
                    value: Some(r.estimate),
                    calls: r.cumulative_evaluations,
                    error: stage.optimum.map(|o| (r.estimate - o).abs()),
                }
            } else {
                let ratio = r
                    .most_frequent_bitstring
                    .and_then(|b| stage.approximation_ratio(b));
                Sample {
                    stage: stage.size,
                    arm,
                    shots,
                    value: ratio,
                    calls: r.cumulative_evaluations,
                    error: None,
                }
            }
        })
        .collect()
}

/// Static baseline at every stage of `hier`.
fn static_samples(
    hier: &Hierarchy,
    cfg: &ExperimentConfig,
    shots: Shots,
    trial: usize,
    laplacian: bool,
) -> Result<Vec<Sample>> {
    let opt = nm(cfg);
    let results = hier
        .stages()
        .iter()
        .map(|stage| {
            let mut rng = trial_rng(cfg.base_seed, trial, STREAM_STATIC_BASE + stage.size as u64);
            static_stage(stage, shots, &opt, static_init(cfg), &mut rng)
        })
        .collect::<mgvqe::Result<Vec<_>>>()?;
    Ok(stage_samples(hier, &results, Arm::Static, shots, laplacian))
}

/// Multigrid and static arms on `hier` for one trial.
fn compare_arms(
    hier: &Hierarchy,
    cfg: &ExperimentConfig,
    shots: Shots,
    trial: usize,
    laplacian: bool,
) -> Result<Vec<Sample>> {
    let seed = seed_ansatz(hier.first_size())?;
    let mut rng = trial_rng(cfg.base_seed, trial, STREAM_MULTIGRID);
    let mg = multigrid_vqe(hier, &seed, shots, &nm(cfg).into(), &mut rng)?;
    let mut out = stage_samples(hier, &mg, Arm::Multigrid, shots, laplacian);
    out.extend(static_samples(hier, cfg, shots, trial, laplacian)?);
    Ok(out)
}

/// Multigrid versus static hardware-efficient VQE on the Dirichlet hierarchy.
pub fn run_laplacian(cfg: &ExperimentConfig, jobs: usize) -> Result<Table> {
    let hier: Hierarchy = laplacian_hierarchy(cfg.sizes.1)?;
    let mut samples = Vec::new();
    for &shots in &cfg.shots {
        samples.extend(par_trials(cfg.trials, jobs, |t| {
            compare_arms(&hier, cfg, shots, t, true)
        })?);
    }
    Ok(Table::aggregate(&samples))
}

/// Warm-started versus all-zero-restart quasi-Newton multigrid. Both arms run
/// the derivative-free optimizer on the seed stage.
pub fn run_warmcold(cfg: &ExperimentConfig, jobs: usize) -> Result<Table> {
    let hier: Hierarchy = laplacian_hierarchy(cfg.sizes.1)?;
    let seed = seed_ansatz(2)?;
    let mut bfgs = OptimizerConfig::bfgs(cfg.bfgs_iterations);
    bfgs.function_tolerance = cfg.function_tolerance.min(bfgs.function_tolerance);
    let mg_cfg = MultigridConfig {
        seed_stage: nm(cfg),
        refined_stages: bfgs,
    };
    let mut samples = Vec::new();
    for &shots in &cfg.shots {
        samples.extend(par_trials(cfg.trials, jobs, |t| {
            let warm = multigrid_vqe(
                &hier,
                &seed,
                shots,
                &mg_cfg,
                &mut trial_rng(cfg.base_seed, t, STREAM_MULTIGRID),
            )?;
            let cold = cold_multigrid_baseline(
                &hier,
                &seed,
                shots,
                &mg_cfg,
                &mut trial_rng(cfg.base_seed, t, STREAM_COLD),
            )?;
            let mut out = stage_samples(&hier, &warm, Arm::Multigrid, shots, true);
            out.extend(stage_samples(&hier, &cold, Arm::Cold, shots, true));
            Ok(out)
        })?);
    }
    Ok(Table::aggregate(&samples))
}

/// Approximation ratios on Erdos-Renyi graphs, one table per edge probability.
pub fn run_maxcut(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<(f64, Table)>> {
    let (first, n) = cfg.sizes;
    cfg.p
        .iter()
        .map(|&p| {
            let mut samples = Vec::new();
            for &shots in &cfg.shots {
                samples.extend(par_trials(cfg.trials, jobs, |t| {
                    let g = erdos_renyi(n, p, &mut trial_rng(cfg.base_seed, t, STREAM_INSTANCE))?;
                    let hier = subgraph_hierarchy(&g, first)?;
                    compare_arms(&hier, cfg, shots, t, false)
                })?);
            }
            Ok((p, Table::aggregate(&samples)))
        })
        .collect()
}

/// Clause count used for a k-SAT run.
pub fn ksat_clauses(cfg: &ExperimentConfig) -> Result<usize> {
    match cfg.clauses {
        Some(m) => Ok(m),
        None => hard_instance_clauses(cfg.sizes.1, cfg.k)
            .with_context(|| format!("no default clause density for k = {}", cfg.k)),
    }
}

/// Approximation ratios on random Max-E-k-SAT instances.
pub fn run_ksat(cfg: &ExperimentConfig, jobs: usize) -> Result<Table> {
    let (first, n) = cfg.sizes;
    if first < sat_first_stage(cfg.k) {
        bail!(
            "k = {} hierarchies start at {}",
            cfg.k,
            sat_first_stage(cfg.k)
        );
    }
    let m = ksat_clauses(cfg)?;
    let mut samples = Vec::new();
    for &shots in &cfg.shots {
        samples.extend(par_trials(cfg.trials, jobs, |t| {
            let f = random_eksat(
                n,
                cfg.k,
                m,
                &mut trial_rng(cfg.base_seed, t, STREAM_INSTANCE),
            )?;
            let hier = subformula_hierarchy(&f, first)?;
            compare_arms(&hier, cfg, shots, t, false)
        })?);
    }
    Ok(Table::aggregate(&samples))
}

/// Dense Dirichlet ground vectors, phase-fixed to be entrywise non-negative.
pub fn run_eigvec(cfg: &ExperimentConfig) -> Result<Vec<(usize, Vec<f64>)>> {
    (cfg.sizes.0..=cfg.sizes.1)
        .map(|n| Ok((n, mgvqe::problems::dirichlet_ground(n)?.1)))
        .collect()
}

/// Dispatches on `cfg.experiment` (everything except `verify`).
pub fn run(cfg: &ExperimentConfig, jobs: usize) -> Result<Output> {
    Ok(match cfg.experiment {
        Experiment::Laplacian => Output::Single(run_laplacian(cfg, jobs)?),
        Experiment::WarmCold => Output::Single(run_warmcold(cfg, jobs)?),
        Experiment::MaxCut => Output::PerP(run_maxcut(cfg, jobs)?),
        Experiment::Ksat => Output::Single(run_ksat(cfg, jobs)?),
        Experiment::Eigvec => Output::Eigvecs(run_eigvec(cfg)?),
        Experiment::Verify => bail!("verify is not a data experiment"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(experiment: Experiment) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(experiment);
        cfg.trials = 2;
        cfg.max_iterations = 30;
        cfg.bfgs_iterations = 5;
        cfg
    }

    #[test]
    fn trial_streams_are_independent_of_trial_count() {
        use rand::RngCore;
        let a = trial_rng(5, 3, 1).next_u64();
        let b = trial_rng(5, 3, 1).next_u64();
        assert_eq!(a, b);
        assert_ne!(trial_rng(5, 3, 1).next_u64(), trial_rng(5, 3, 2).next_u64());
        assert_ne!(trial_rng(5, 3, 1).next_u64(), trial_rng(5, 4, 1).next_u64());
    }

    #[test]
    fn aggregation_counts_discards() {
        let mk = |value, calls| Sample {
            stage: 3,
            arm: Arm::Static,
            shots: Shots::Count(10),
            value,
            calls,
            error: None,
        };
        let t = Table::aggregate(&[mk(Some(1.0), 10), mk(None, 99), mk(Some(0.5), 20)]);
        let r = &t.rows[0];
        assert_eq!((r.n, r.n_discarded), (2, 1));
        assert_eq!(r.mean, 0.75);
        assert_eq!(r.calls_mean, 15.0);
        assert_eq!(r.error_mean, None);
    }

    #[test]
    fn single_trial_has_zero_width() {
        let mut cfg = tiny(Experiment::Laplacian);
        cfg.trials = 1;
        cfg.sizes = (2, 3);
        cfg.shots = vec![Shots::Exact];
        let t = run_laplacian(&cfg, 1).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert!(t.rows.iter().all(|r| r.ci95 == 0.0 && r.n == 1));
        assert!(t.rows.iter().all(|r| r.error_mean.unwrap() >= -1e-12));
    }

    #[test]
    fn empty_graphs_are_discarded_everywhere() {
        let mut cfg = tiny(Experiment::MaxCut);
        cfg.sizes = (2, 5);
        cfg.p = vec![0.0];
        let out = run_maxcut(&cfg, 1).unwrap();
        let (_, t) = &out[0];
        assert!(t.rows.iter().all(|r| r.n == 0 && r.n_discarded == 2));
    }

    #[test]
    fn ksat_rows_start_at_clause_width() {
        let mut cfg = tiny(Experiment::Ksat);
        cfg.k = 3;
        cfg.sizes = (3, 5);
        cfg.clauses = Some(8);
        let t = run_ksat(&cfg, 1).unwrap();
        assert_eq!(t.rows.iter().map(|r| r.stage).min(), Some(3));
        assert!(t
            .rows
            .iter()
            .all(|r| r.n == 0 || (r.mean > 0.0 && r.mean <= 1.0)));
        cfg.sizes = (2, 5);
        assert!(run_ksat(&cfg, 1).is_err());
    }

    #[test]
    fn warmcold_first_stage_matches() {
        let mut cfg = tiny(Experiment::WarmCold);
        cfg.sizes = (2, 4);
        let t = run_warmcold(&cfg, 1).unwrap();
        let w = t.find(2, Arm::Multigrid, Shots::Exact).unwrap();
        let c = t.find(2, Arm::Cold, Shots::Exact).unwrap();
        assert_eq!(w.mean, c.mean);
        assert_eq!(w.calls_mean, c.calls_mean);
    }

    #[test]
    fn eigvec_is_nonnegative_and_symmetric() {
        let mut cfg = tiny(Experiment::Eigvec);
        cfg.sizes = (2, 4);
        for (n, v) in run_eigvec(&cfg).unwrap() {
            assert_eq!(v.len(), 1 << n);
            assert!(v.iter().all(|&x| x >= 0.0));
            for i in 0..v.len() {
                assert!((v[i] - v[v.len() - 1 - i]).abs() < 1e-10);
            }
        }
    }
}
