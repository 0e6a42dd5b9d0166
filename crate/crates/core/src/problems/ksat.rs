//! Max-E-k-SAT: CNF formulas, the clause-count Hamiltonian and its Pauli expansion.
//!
//! A variable is true when its bit reads 1. A clause contributes
//! `1 - Pi_violating`, where the projector selects the single assignment of
//! its variables that falsifies it: `|0><0|` on positive literals and `|1><1|`
//! on negated ones.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{Hamiltonian, MeasuredTerm, MeasurementFrame, Pauli, PauliString};
use crate::scalar::Real;

pub const MAX_BRUTE_FORCE_VARS: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        Self { var, positive }
    }

    fn satisfied(&self, z: u64) -> bool {
        ((z >> self.var) & 1 == 1) == self.positive
    }
}

/// CNF formula with exactly `k` literals on distinct variables per clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    k: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, k: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        for (i, clause) in clauses.iter().enumerate() {
            if clause.len() != k {
                return Err(invalid(format!(
                    "clause {i} has {} literals, expected exactly {k}",
                    clause.len()
                )));
            }
            for (j, lit) in clause.iter().enumerate() {
                if lit.var >= num_vars {
                    return Err(Error::Index {
                        what: "formula variables",
                        index: lit.var,
                        size: num_vars,
                    });
                }
                if clause[..j].iter().any(|l| l.var == lit.var) {
                    return Err(invalid(format!("clause {i} repeats variable {}", lit.var)));
                }
            }
        }
        Ok(Self {
            num_vars,
            k,
            clauses,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Clauses satisfied by the assignment (bit `v` of `z` is variable `v`).
    pub fn satisfied_count(&self, z: u64) -> usize {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|l| l.satisfied(z)))
            .count()
    }

    /// Sub-formula on variables `0..j` keeping only clauses fully inside it.
    pub fn prefix(&self, j: usize) -> Self {
        Self {
            num_vars: j,
            k: self.k,
            clauses: self
                .clauses
                .iter()
                .filter(|c| c.iter().all(|l| l.var < j))
                .cloned()
                .collect(),
        }
    }

    /// DIMACS CNF: `p cnf <vars> <clauses>` then one 0-terminated line per
    /// clause of signed 1-based literals.
    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let v = l.var as i64 + 1;
                let _ = write!(s, "{} ", if l.positive { v } else { -v });
            }
            s.push_str("0\n");
        }
        s
    }

    /// Parses DIMACS CNF (comment lines start with `c`; clauses may span lines).
    /// All clauses must have the same length.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let words: Vec<&str> = rest.split_whitespace().collect();
                match words.as_slice() {
                    ["cnf", n, m] => {
                        let n = n.parse().map_err(|e| invalid(format!("header: {e}")))?;
                        let m = m.parse().map_err(|e| invalid(format!("header: {e}")))?;
                        header = Some((n, m));
                    }
                    _ => return Err(invalid(format!("line {}: bad header", lineno + 1))),
                }
                continue;
            }
            let (n, _) = header.ok_or_else(|| invalid("clause before `p cnf` header"))?;
            for word in line.split_whitespace() {
                let lit: i64 = word
                    .parse()
                    .map_err(|e| invalid(format!("line {}: {e}", lineno + 1)))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                    continue;
                }
                let var = lit.unsigned_abs() as usize - 1;
                if var >= n {
                    return Err(Error::Index {
                        what: "formula variables",
                        index: var,
                        size: n,
                    });
                }
                current.push(Literal::new(var, lit > 0));
            }
        }
        if !current.is_empty() {
            return Err(invalid("last clause is not 0-terminated"));
        }
        let (n, m) = header.ok_or_else(|| invalid("missing `p cnf` header"))?;
        if m != clauses.len() {
            return Err(invalid(format!(
                "header declares {m} clauses, found {}",
                clauses.len()
            )));
        }
        let k = clauses.first().map_or(0, Vec::len);
        Self::new(n, k, clauses)
    }
}

/// Clause count of the hard random ensembles: `m = 3n` for k = 2, `m = 6n` for k = 3.
pub fn hard_instance_clauses(n_vars: usize, k: usize) -> Option<usize> {
    match k {
        2 => Some(3 * n_vars),
        3 => Some(6 * n_vars),
        _ => None,
    }
}

/// Random E-k-SAT: each clause draws `k` distinct variables uniformly and
/// independent fair polarities. Duplicate clauses are allowed.
pub fn random_eksat<R: Rng + ?Sized>(
    n_vars: usize,
    k: usize,
    m: usize,
    rng: &mut R,
) -> Result<CnfFormula> {
    if k == 0 || k > n_vars {
        return Err(invalid(format!(
            "cannot draw {k} distinct variables out of {n_vars}"
        )));
    }
    let clauses = (0..m)
        .map(|_| {
            sample(rng, n_vars, k)
                .into_iter()
                .map(|v| Literal::new(v, rng.gen_bool(0.5)))
                .collect()
        })
        .collect();
    CnfFormula::new(n_vars, k, clauses)
}

fn clause_masks(clause: &[Literal], var_to_qubit: &[usize]) -> (usize, usize) {
    clause.iter().fold((0, 0), |(zero, one), l| {
        let bit = 1usize << var_to_qubit[l.var];
        if l.positive {
            (zero | bit, one)
        } else {
            (zero, one | bit)
        }
    })
}

/// Diagonal observable whose entry at read-out `z` is the number of satisfied
/// clauses, one projector term per clause. Variable `v` sits on qubit `var_to_qubit[v]`.
pub fn sat_hamiltonian_mapped<T: Real>(
    f: &CnfFormula,
    num_qubits: usize,
    var_to_qubit: &[usize],
) -> Result<Hamiltonian<T>> {
    if var_to_qubit.len() < f.num_vars() {
        return Err(invalid("qubit map shorter than variable count"));
    }
    let terms = f
        .clauses()
        .iter()
        .map(|c| {
            let (zero, one) = clause_masks(c, var_to_qubit);
            MeasuredTerm::projector(-T::one(), zero, one)
        })
        .collect();
    let offset = T::from_usize(f.clauses().len()).expect("clause count fits");
    Hamiltonian::new(
        num_qubits,
        vec![MeasurementFrame::diagonal(num_qubits, terms)?],
        offset,
    )
}

/// [`sat_hamiltonian_mapped`] with variable `v` on qubit `v`.
pub fn sat_hamiltonian<T: Real>(f: &CnfFormula) -> Result<Hamiltonian<T>> {
    let id: Vec<usize> = (0..f.num_vars()).collect();
    sat_hamiltonian_mapped(f, f.num_vars().max(1), &id)
}

/// Pauli-Z expansion of [`sat_hamiltonian`] using `|0><0| = (I + Z)/2` and
/// `|1><1| = (I - Z)/2`. Like terms are merged and exact zeros dropped, so
/// there are at most `m (2^k - 1) + 1` strings.
pub fn sat_pauli_expansion<T: Real>(f: &CnfFormula) -> Vec<PauliString<T>> {
    let n = f.num_vars();
    let scale = T::one() / T::from_usize(1 << f.k()).expect("2^k fits");
    let mut acc: BTreeMap<usize, T> = BTreeMap::new();
    *acc.entry(0).or_insert(T::zero()) = T::from_usize(f.clauses().len()).expect("fits");
    for clause in f.clauses() {
        for subset in 0..1usize << clause.len() {
            let mut mask = 0;
            let mut w = -scale;
            for (i, lit) in clause.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    mask |= 1 << lit.var;
                    if !lit.positive {
                        w = -w;
                    }
                }
            }
            let e = acc.entry(mask).or_insert(T::zero());
            *e = *e + w;
        }
    }
    acc.into_iter()
        .filter(|(_, w)| *w != T::zero())
        .map(|(mask, w)| {
            let ops: Vec<(usize, Pauli)> = (0..n)
                .filter(|q| mask >> q & 1 == 1)
                .map(|q| (q, Pauli::Z))
                .collect();
            PauliString::sparse(n.max(1), &ops, w)
        })
        .collect()
}

/// Maximum number of simultaneously satisfiable clauses, with the smallest
/// optimal assignment.
pub fn sat_bruteforce(f: &CnfFormula) -> Result<(usize, u64)> {
    let n = f.num_vars();
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(Error::Capacity {
            what: "brute-force SAT variables",
            value: n,
            min: 0,
            max: MAX_BRUTE_FORCE_VARS,
        });
    }
    let mut best = (0usize, 0u64);
    for z in 0..1u64 << n {
        let s = f.satisfied_count(z);
        if s > best.0 {
            best = (s, z);
            if s == f.clauses().len() {
                break;
            }
        }
    }
    Ok(best)
}
