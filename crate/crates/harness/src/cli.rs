//! Command-line front end.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_shots, parse_sizes, ConfigError, Experiment, ExperimentConfig};
use crate::experiments;
use crate::output::write_output;
use crate::verify::run_verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "mgvqe",
    version,
    about = "Multigrid VQE experiments on a statevector simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Multigrid vs static ansatz on the Dirichlet Laplacian hierarchy.
    Laplacian(Common),
    /// Warm-started vs zero-restart quasi-Newton multigrid.
    Warmcold(Common),
    /// Approximation ratios on Erdos-Renyi MaxCut instances.
    Maxcut {
        #[command(flatten)]
        common: Common,
        /// Comma-separated edge probabilities.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
    },
    /// Approximation ratios on random Max-E-k-SAT instances.
    Ksat {
        #[command(flatten)]
        common: Common,
        /// Clause width.
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        k: Option<u8>,
    },
    /// Dense Dirichlet ground vectors.
    Eigvec(Common),
    /// Runs the invariant checks; exits 1 on any failure.
    Verify,
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// key = value settings applied before the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base seed; trial t uses base + t.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Comma-separated shot counts, or `exact`.
    #[arg(long)]
    pub shots: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Stage sizes as LO..HI.
    #[arg(long)]
    pub sizes: Option<String>,
}

fn resolve(experiment: Experiment, c: &Common) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::defaults(experiment);
    if experiment == Experiment::Ksat {
        cfg.sizes.0 = mgvqe::problems::sat_first_stage(cfg.k);
    }
    if let Some(path) = &c.config {
        cfg.apply_file(path)?;
    }
    let bad = |key: &str, msg: String| ConfigError::Value {
        key: key.into(),
        msg,
    };
    if let Some(out) = &c.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = c.seed {
        cfg.base_seed = seed;
    }
    if let Some(s) = &c.shots {
        cfg.shots = parse_shots(s).map_err(|m| bad("shots", m))?;
    }
    if let Some(t) = c.trials {
        cfg.trials = t;
    }
    if let Some(s) = &c.sizes {
        cfg.sizes = parse_sizes(s).map_err(|m| bad("sizes", m))?;
    }
    Ok(cfg)
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let (experiment, common, p, k) = match cli.command {
        Command::Verify => return verify(),
        Command::Laplacian(c) => (Experiment::Laplacian, c, None, None),
        Command::Warmcold(c) => (Experiment::WarmCold, c, None, None),
        Command::Eigvec(c) => (Experiment::Eigvec, c, None, None),
        Command::Maxcut { common, p } => (Experiment::MaxCut, common, p, None),
        Command::Ksat { common, k } => (Experiment::Ksat, common, None, k),
    };
    let cfg = resolve(experiment, &common).and_then(|mut cfg| {
        if let Some(p) = p {
            cfg.p = p;
        }
        if let Some(k) = k {
            cfg.k = k as usize;
            if common.sizes.is_none() && common.config.is_none() {
                cfg.sizes.0 = mgvqe::problems::sat_first_stage(cfg.k);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    });
    let cfg = match cfg {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let start = Instant::now();
    let result = experiments::run(&cfg, common.jobs).and_then(|out| write_output(&cfg, &out));
    match result {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            eprintln!("{} finished in {:.1?}", cfg.experiment, start.elapsed());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            // Library validation errors stem from settings; I/O errors do too.
            EXIT_CONFIG
        }
    }
}

fn verify() -> i32 {
    match run_verify() {
        Ok(report) => {
            print!("{}", report.render());
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_VERIFY_FAILED
        }
    }
}
