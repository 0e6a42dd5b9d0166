//! Experiment settings: defaults per experiment, a flat `key = value` file
//! format and the manifest echo of a resolved configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mgvqe::vqe::Shots;
use thiserror::Error;

/// Largest register the harness drives. Combinatorial brute force and the
/// dense Laplacian oracle are both comfortable up to here.
pub const MAX_SIZE: usize = 16;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: line {line}: {msg}")]
    Syntax {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {msg}")]
    Value { key: String, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Laplacian,
    WarmCold,
    MaxCut,
    Ksat,
    Eigvec,
    Verify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Laplacian => "laplacian",
            Experiment::WarmCold => "warmcold",
            Experiment::MaxCut => "maxcut",
            Experiment::Ksat => "ksat",
            Experiment::Eigvec => "eigvec",
            Experiment::Verify => "verify",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "laplacian" => Experiment::Laplacian,
            "warmcold" => Experiment::WarmCold,
            "maxcut" => Experiment::MaxCut,
            "ksat" => Experiment::Ksat,
            "eigvec" => Experiment::Eigvec,
            "verify" => Experiment::Verify,
            other => return Err(format!("unknown experiment `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Inclusive stage-size range. For combinatorial runs `hi` is the instance size.
    pub sizes: (usize, usize),
    pub shots: Vec<Shots>,
    pub trials: usize,
    pub base_seed: u64,
    /// Edge probabilities (maxcut).
    pub p: Vec<f64>,
    /// Clause width (ksat).
    pub k: usize,
    /// Clause count (ksat); the hard-instance density when unset.
    pub clauses: Option<usize>,
    /// Nelder-Mead iteration cap per stage.
    pub max_iterations: usize,
    /// BFGS iteration cap per refined stage (warmcold).
    pub bfgs_iterations: usize,
    pub function_tolerance: f64,
    /// Random initial angles for the static baseline instead of zeros.
    pub static_random_init: bool,
    pub out: PathBuf,
}

const KEYS: &[&str] = &[
    "experiment",
    "sizes",
    "shots",
    "trials",
    "seed",
    "p",
    "k",
    "clauses",
    "max_iterations",
    "bfgs_iterations",
    "function_tolerance",
    "static_random_init",
    "out",
];

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let mut cfg = Self {
            experiment,
            sizes: (2, 8),
            shots: vec![Shots::Exact],
            trials: 10,
            base_seed: 0,
            p: vec![0.3, 0.6, 0.9],
            k: 2,
            clauses: None,
            max_iterations: 400,
            bfgs_iterations: 20,
            function_tolerance: 1e-8,
            static_random_init: false,
            out: PathBuf::from("out").join(experiment.name()),
        };
        match experiment {
            Experiment::Laplacian => {
                cfg.shots = vec![Shots::Exact, Shots::Count(1_000), Shots::Count(1_000_000)];
            }
            Experiment::WarmCold => cfg.sizes = (2, 6),
            Experiment::MaxCut | Experiment::Ksat => {
                cfg.sizes = (2, 10);
                cfg.shots = vec![Shots::Count(1_000)];
                cfg.trials = 20;
            }
            Experiment::Eigvec => {
                cfg.sizes = (2, 6);
                cfg.trials = 1;
            }
            Experiment::Verify => cfg.trials = 1,
        }
        cfg
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |msg: String| ConfigError::Value {
            key: key.to_string(),
            msg,
        };
        let value = value.trim();
        match key {
            "experiment" => self.experiment = value.parse().map_err(bad)?,
            "sizes" => self.sizes = parse_sizes(value).map_err(bad)?,
            "shots" => self.shots = parse_shots(value).map_err(bad)?,
            "trials" => self.trials = parse_num(value).map_err(bad)?,
            "seed" => self.base_seed = parse_num(value).map_err(bad)?,
            "p" => self.p = parse_list(value).map_err(bad)?,
            "k" => self.k = parse_num(value).map_err(bad)?,
            "clauses" => {
                self.clauses = match value {
                    "" | "auto" => None,
                    v => Some(parse_num(v).map_err(bad)?),
                }
            }
            "max_iterations" => self.max_iterations = parse_num(value).map_err(bad)?,
            "bfgs_iterations" => self.bfgs_iterations = parse_num(value).map_err(bad)?,
            "function_tolerance" => self.function_tolerance = parse_num(value).map_err(bad)?,
            "static_random_init" => self.static_random_init = parse_num(value).map_err(bad)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies every setting of a config file body. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                path: origin.to_string(),
                line: i + 1,
                msg: "expected `key = value`".into(),
            })?;
            self.set(key.trim(), value)
                .map_err(|e| ConfigError::Syntax {
                    path: origin.to_string(),
                    line: i + 1,
                    msg: e.to_string(),
                })?;
        }
        Ok(())
    }

    /// Reads `path`. The experiment key, if present, must match `self.experiment`.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let expected = self.experiment;
        self.apply_text(&text, &path.display().to_string())?;
        if self.experiment != expected {
            return Err(ConfigError::Invalid(format!(
                "{} configures `{}`, not `{expected}`",
                path.display(),
                self.experiment
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError::Invalid(m));
        let (lo, hi) = self.sizes;
        if lo > hi {
            return err(format!("empty size range {lo}..{hi}"));
        }
        if hi > MAX_SIZE {
            return err(format!("size {hi} exceeds the harness limit {MAX_SIZE}"));
        }
        if self.trials == 0 {
            return err("trials must be at least 1".into());
        }
        if self.shots.is_empty() {
            return err("shots list is empty".into());
        }
        if self.max_iterations == 0 || self.bfgs_iterations == 0 {
            return err("iteration caps must be at least 1".into());
        }
        if self.function_tolerance.is_nan() || self.function_tolerance <= 0.0 {
            return err("function_tolerance must be positive".into());
        }
        match self.experiment {
            Experiment::Laplacian | Experiment::WarmCold if lo != 2 => {
                err(format!("the Laplacian hierarchy starts at 2, got {lo}"))
            }
            Experiment::Laplacian | Experiment::WarmCold | Experiment::Eigvec if hi > 12 => err(
                format!("Laplacian runs need the dense oracle, size {hi} > 12"),
            ),
            Experiment::Eigvec if lo < 2 => err("eigvec sizes start at 2".into()),
            Experiment::MaxCut if self.p.is_empty() => err("p list is empty".into()),
            Experiment::MaxCut if self.p.iter().any(|p| !(0.0..=1.0).contains(p)) => {
                err("edge probabilities must lie in [0, 1]".into())
            }
            Experiment::MaxCut if lo == 0 => err("stage sizes start at 1".into()),
            Experiment::Ksat if !(2..=3).contains(&self.k) => {
                err(format!("k must be 2 or 3, got {}", self.k))
            }
            Experiment::Ksat if lo < self.k => {
                err(format!("no stage can be smaller than a {}-clause", self.k))
            }
            _ => Ok(()),
        }
    }

    /// The resolved configuration in the file format; applying it to the
    /// defaults of the same experiment reproduces `self`.
    pub fn manifest(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut lines = Vec::with_capacity(KEYS.len());
        for key in KEYS {
            let value = match *key {
                "experiment" => self.experiment.to_string(),
                "sizes" => format!("{}..{}", self.sizes.0, self.sizes.1),
                "shots" => join(self.shots.iter().map(Shots::to_string).collect()),
                "trials" => self.trials.to_string(),
                "seed" => self.base_seed.to_string(),
                "p" => join(self.p.iter().map(f64::to_string).collect()),
                "k" => self.k.to_string(),
                "clauses" => self.clauses.map_or("auto".into(), |m| m.to_string()),
                "max_iterations" => self.max_iterations.to_string(),
                "bfgs_iterations" => self.bfgs_iterations.to_string(),
                "function_tolerance" => format!("{:e}", self.function_tolerance),
                "static_random_init" => self.static_random_init.to_string(),
                "out" => self.out.display().to_string(),
                _ => unreachable!(),
            };
            lines.push(format!("{key} = {value}\n"));
        }
        lines.concat()
    }
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.trim().parse().map_err(|e: T::Err| format!("`{s}`: {e}"))
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    s.split(',').map(parse_num).collect()
}

/// `LO..HI` (inclusive) or a single size.
pub fn parse_sizes(s: &str) -> Result<(usize, usize), String> {
    match s.split_once("..") {
        Some((lo, hi)) => Ok((parse_num(lo)?, parse_num(hi.trim_start_matches('='))?)),
        None => {
            let n = parse_num(s)?;
            Ok((n, n))
        }
    }
}

/// Comma-separated shot counts and/or `exact`.
pub fn parse_shots(s: &str) -> Result<Vec<Shots>, String> {
    s.split(',')
        .map(|w| w.parse::<Shots>().map_err(|e| e.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_format_round_trips_through_manifest() {
        let mut cfg = ExperimentConfig::defaults(Experiment::MaxCut);
        cfg.apply_text(
            "# desk run\nsizes = 2..9\nshots = 1000, exact\np = 0.25,0.5\nseed = 7 # trailing\nclauses = 12\n",
            "inline",
        )
        .unwrap();
        assert_eq!(cfg.sizes, (2, 9));
        assert_eq!(cfg.shots, vec![Shots::Count(1000), Shots::Exact]);
        assert_eq!(cfg.p, vec![0.25, 0.5]);
        assert_eq!(cfg.base_seed, 7);
        let mut again = ExperimentConfig::defaults(Experiment::MaxCut);
        again.apply_text(&cfg.manifest(), "manifest").unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn errors_carry_location() {
        let mut cfg = ExperimentConfig::defaults(Experiment::Laplacian);
        let e = cfg
            .apply_text("trials = 3\nbogus = 1\n", "a.cfg")
            .unwrap_err();
        assert!(e.to_string().starts_with("a.cfg: line 2"), "{e}");
        assert!(cfg.apply_text("trials 3\n", "a.cfg").is_err());
        assert!(cfg.apply_text("shots = 0\n", "a.cfg").is_err());
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::defaults(Experiment::Laplacian);
        ok.validate().unwrap();
        let mut c = ok.clone();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.sizes = (3, 6);
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::defaults(Experiment::Ksat);
        c.k = 3;
        assert!(c.validate().is_err());
        c.sizes = (3, 10);
        c.validate().unwrap();
        let mut c = ExperimentConfig::defaults(Experiment::MaxCut);
        c.p = vec![1.5];
        assert!(c.validate().is_err());
    }

    #[test]
    fn size_and_shot_syntax() {
        assert_eq!(parse_sizes("2..8").unwrap(), (2, 8));
        assert_eq!(parse_sizes("2..=8").unwrap(), (2, 8));
        assert_eq!(parse_sizes("5").unwrap(), (5, 5));
        assert!(parse_sizes("a..3").is_err());
        assert_eq!(parse_shots("exact").unwrap(), vec![Shots::Exact]);
        assert_eq!(
            parse_shots("1000,100000").unwrap(),
            vec![Shots::Count(1000), Shots::Count(100_000)]
        );
    }
}
