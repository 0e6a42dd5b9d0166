//! Coarse-to-fine problem sequences fed to the multigrid driver.
//!
//! Combinatorial stages grow one variable at a time. Because each refinement
//! inserts its new qubit at index 0 and shifts the others up, the variable
//! added at stage `j` lives on qubit 0 of stage `j` and moves up by one with
//! every later stage. Each stage carries the resulting variable-to-qubit map.

use crate::error::{invalid, Result};
use crate::hamiltonian::{Hamiltonian, MAX_DENSE_QUBITS};
use crate::problems::ksat::{sat_bruteforce, sat_hamiltonian_mapped, CnfFormula};
use crate::problems::laplacian::{dirichlet_ground, dirichlet_hamiltonian};
use crate::problems::maxcut::{maxcut_bruteforce, maxcut_hamiltonian_mapped, Graph};
use crate::scalar::Real;

/// What a stage's Hamiltonian encodes, in variable space.
#[derive(Debug, Clone, PartialEq)]
pub enum StageProblem {
    /// Ground state of the Dirichlet Laplacian; the optimum is its lowest eigenvalue.
    Laplacian,
    /// MaxCut; the objective Hamiltonian is `-cut` on the diagonal.
    MaxCut(Graph),
    /// Max-E-k-SAT; the objective Hamiltonian is `-(satisfied clauses)`.
    Sat(CnfFormula),
}

#[derive(Debug, Clone)]
pub struct Stage<T> {
    pub size: usize,
    /// Observable the optimizer minimizes.
    pub hamiltonian: Hamiltonian<T>,
    /// Ground energy (Laplacian) or best objective value (combinatorial), when known.
    pub optimum: Option<f64>,
    pub var_to_qubit: Vec<usize>,
    pub problem: StageProblem,
}

impl<T: Real> Stage<T> {
    pub fn is_combinatorial(&self) -> bool {
        !matches!(self.problem, StageProblem::Laplacian)
    }

    /// Approximation ratios need a strictly positive optimum.
    pub fn ratio_defined(&self) -> bool {
        !self.is_combinatorial() || self.optimum.is_some_and(|o| o > 0.0)
    }

    /// Maps a qubit read-out to a variable assignment (bit `v` = variable `v`).
    pub fn decode(&self, readout: usize) -> u64 {
        self.var_to_qubit
            .iter()
            .enumerate()
            .fold(0u64, |z, (v, &q)| z | (((readout >> q) & 1) as u64) << v)
    }

    /// Cut size or satisfied-clause count of a qubit read-out.
    pub fn objective_value(&self, readout: usize) -> Option<f64> {
        let z = self.decode(readout);
        match &self.problem {
            StageProblem::Laplacian => None,
            StageProblem::MaxCut(g) => Some(g.cut(z) as f64),
            StageProblem::Sat(f) => Some(f.satisfied_count(z) as f64),
        }
    }

    /// `objective(readout) / optimum`, if defined.
    pub fn approximation_ratio(&self, readout: usize) -> Option<f64> {
        if !self.ratio_defined() {
            return None;
        }
        Some(self.objective_value(readout)? / self.optimum?)
    }
}

/// Stages of strictly consecutive sizes ending at the target problem.
#[derive(Debug, Clone)]
pub struct Hierarchy<T> {
    stages: Vec<Stage<T>>,
}

impl<T: Real> Hierarchy<T> {
    pub fn new(stages: Vec<Stage<T>>) -> Result<Self> {
        if stages.is_empty() {
            return Err(invalid("a hierarchy needs at least one stage"));
        }
        for w in stages.windows(2) {
            if w[1].size != w[0].size + 1 {
                return Err(invalid(format!(
                    "stage sizes must grow by one, found {} then {}",
                    w[0].size, w[1].size
                )));
            }
        }
        if let Some(s) = stages.iter().find(|s| s.hamiltonian.num_qubits() != s.size) {
            return Err(invalid(format!(
                "stage of size {} holds a {}-qubit Hamiltonian",
                s.size,
                s.hamiltonian.num_qubits()
            )));
        }
        Ok(Self { stages })
    }

    pub fn stages(&self) -> &[Stage<T>] {
        &self.stages
    }

    pub fn first_size(&self) -> usize {
        self.stages[0].size
    }

    pub fn last(&self) -> &Stage<T> {
        self.stages.last().expect("nonempty")
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }
}

/// Qubit of each variable at stage `size` for a hierarchy seeded at `seed_size`.
pub fn multigrid_qubit_map(seed_size: usize, size: usize) -> Vec<usize> {
    (0..size)
        .map(|v| {
            if v < seed_size {
                v + size - seed_size
            } else {
                size - 1 - v
            }
        })
        .collect()
}

/// Dirichlet Laplacians on `2..=n_max` qubits with ground energies attached
/// up to the dense-materialization limit.
pub fn laplacian_hierarchy<T: Real>(n_max: usize) -> Result<Hierarchy<T>> {
    if n_max < 2 {
        return Err(invalid("the Laplacian hierarchy starts at two qubits"));
    }
    let stages = (2..=n_max)
        .map(|n| {
            let optimum = if n <= MAX_DENSE_QUBITS {
                Some(dirichlet_ground(n)?.0)
            } else {
                None
            };
            Ok(Stage {
                size: n,
                hamiltonian: dirichlet_hamiltonian(n)?,
                optimum,
                var_to_qubit: (0..n).collect(),
                problem: StageProblem::Laplacian,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Hierarchy::new(stages)
}

/// Induced subgraphs on nodes `0..j` for `j = first_size..=n`, with brute-force optima.
pub fn subgraph_hierarchy<T: Real>(g: &Graph, first_size: usize) -> Result<Hierarchy<T>> {
    let n = g.num_nodes();
    if first_size == 0 || first_size > n {
        return Err(invalid(format!(
            "first stage size {first_size} not in 1..={n}"
        )));
    }
    let stages = (first_size..=n)
        .map(|j| {
            let sub = g.prefix(j);
            let map = multigrid_qubit_map(first_size, j);
            Ok(Stage {
                size: j,
                hamiltonian: maxcut_hamiltonian_mapped(&sub, j, &map)?,
                optimum: Some(maxcut_bruteforce(&sub)?.0 as f64),
                var_to_qubit: map,
                problem: StageProblem::MaxCut(sub),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Hierarchy::new(stages)
}

/// Sub-formulas on variables `0..j` admitting only clauses fully inside them,
/// for `j = first_size..=n`. The objective is the negated clause count.
pub fn subformula_hierarchy<T: Real>(f: &CnfFormula, first_size: usize) -> Result<Hierarchy<T>> {
    let n = f.num_vars();
    if first_size == 0 || first_size > n {
        return Err(invalid(format!(
            "first stage size {first_size} not in 1..={n}"
        )));
    }
    let stages = (first_size..=n)
        .map(|j| {
            let sub = f.prefix(j);
            let map = multigrid_qubit_map(first_size, j);
            Ok(Stage {
                size: j,
                hamiltonian: sat_hamiltonian_mapped(&sub, j, &map)?.negated(),
                optimum: Some(sat_bruteforce(&sub)?.0 as f64),
                var_to_qubit: map,
                problem: StageProblem::Sat(sub),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Hierarchy::new(stages)
}

/// Default first stage for a k-SAT hierarchy: no stage smaller than a clause.
pub fn sat_first_stage(k: usize) -> usize {
    k.max(2)
}
