//! Desk-scale invariant checks across all library modules.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::Result;
use mgvqe::circuit::{efficient_su2, increment_circuit, multigrid_param_count, refine, GateKind};
use mgvqe::hamiltonian::pauli_sum_dense;
use mgvqe::problems::{
    dirichlet_boundary_hamiltonian, dirichlet_dense, dirichlet_hamiltonian, erdos_renyi,
    maxcut_hamiltonian, periodic_dense, periodic_hamiltonian, random_eksat, sat_hamiltonian,
    sat_pauli_expansion,
};
use mgvqe::simcore::increment_permutation;
use mgvqe::vqe::{vqe, OptimizerConfig, Shots};
use mgvqe::{Amp, Hamiltonian, ParamCircuit, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One invariant with its worst observed deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub module: &'static str,
    pub invariant: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// One line per check, then pass/total counts per module.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut per_module: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(
                s,
                "{status} {}: {} (max deviation {:.3e}, tolerance {:.1e})",
                c.module, c.invariant, c.max_deviation, c.tolerance
            );
            let e = per_module.entry(c.module).or_default();
            e.0 += usize::from(c.passed());
            e.1 += 1;
        }
        for (m, (ok, total)) in per_module {
            let _ = writeln!(s, "{m}: {ok}/{total} passed");
        }
        s
    }
}

/// Operator constructors under test; replaced by corrupted versions in fault-injection tests.
#[derive(Clone, Copy)]
pub struct Fixture {
    pub dirichlet: fn(usize) -> mgvqe::Result<Hamiltonian>,
}

impl Default for Fixture {
    fn default() -> Self {
        Self {
            dirichlet: dirichlet_hamiltonian,
        }
    }
}

pub fn run_verify() -> Result<Report> {
    run_verify_with(&Fixture::default())
}

pub fn run_verify_with(fx: &Fixture) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut checks = Vec::new();
    let mut push = |module, invariant, max_deviation, tolerance| {
        checks.push(Check {
            module,
            invariant,
            max_deviation,
            tolerance,
        })
    };

    let mut identity = 0.0f64;
    let mut dirichlet = 0.0f64;
    let mut periodic = 0.0f64;
    for n in 2..=6 {
        let d = (fx.dirichlet)(n)?.to_dense()?;
        let p = periodic_hamiltonian::<f64>(n)?.to_dense()?;
        let b = dirichlet_boundary_hamiltonian::<f64>(n)?.to_dense()?;
        identity = identity.max(d.max_abs_diff(&p.add(&b)));
        dirichlet = dirichlet.max(d.max_abs_diff(&dirichlet_dense(n)?));
        periodic = periodic.max(p.max_abs_diff(&periodic_dense(n)?));
    }
    push(
        "hamiltonian",
        "dirichlet = periodic + shifted boundary term, n = 2..6",
        identity,
        1e-12,
    );
    push(
        "hamiltonian",
        "dirichlet frames materialize tridiag(-1, 2, -1)",
        dirichlet,
        1e-12,
    );
    push(
        "hamiltonian",
        "periodic frames materialize the circulant",
        periodic,
        1e-12,
    );

    let mut families: Vec<Hamiltonian> = Vec::new();
    for n in [2, 4, 6] {
        families.push((fx.dirichlet)(n)?);
        families.push(periodic_hamiltonian(n)?);
    }
    families.push(maxcut_hamiltonian(&erdos_renyi(6, 0.5, &mut rng)?)?);
    families.push(sat_hamiltonian(&random_eksat(6, 3, 12, &mut rng)?)?);
    let mut rayleigh = 0.0f64;
    for h in &families {
        let dense = h.to_dense()?;
        for _ in 0..20 {
            let psi = random_state(h.num_qubits(), &mut rng)?;
            let want = dense.quadratic_form(psi.amplitudes());
            rayleigh = rayleigh.max((h.expectation_exact(&psi)? - want).abs());
        }
    }
    push(
        "hamiltonian",
        "exact expectation = dense Rayleigh quotient",
        rayleigh,
        1e-10,
    );

    let mut cut = 0.0f64;
    let mut sat = 0.0f64;
    let mut expansion = 0.0f64;
    for n in 2..=8 {
        let g = erdos_renyi(n, 0.5, &mut rng)?;
        let h = maxcut_hamiltonian::<f64>(&g)?;
        let f = random_eksat(n, 2.min(n), 3 * n, &mut rng)?;
        let hs = sat_hamiltonian::<f64>(&f)?;
        for z in 0..1usize << n {
            cut = cut.max((h.diagonal_entry(z).unwrap_or(f64::NAN) + g.cut(z as u64) as f64).abs());
            sat = sat.max(
                (hs.diagonal_entry(z).unwrap_or(f64::NAN) - f.satisfied_count(z as u64) as f64)
                    .abs(),
            );
        }
        expansion = expansion
            .max(pauli_sum_dense(&sat_pauli_expansion::<f64>(&f))?.max_abs_diff(&hs.to_dense()?));
    }
    push(
        "problems",
        "maxcut diagonal = -cut(z), n <= 8",
        nan_as_inf(cut),
        0.0,
    );
    push(
        "problems",
        "sat diagonal = satisfied clauses, n <= 8",
        nan_as_inf(sat),
        0.0,
    );
    push(
        "problems",
        "sat Pauli expansion = projector form",
        expansion,
        1e-12,
    );

    let mut interp = 0.0f64;
    for m in 2..=4 {
        let seed = efficient_su2::<f64>(m, 3)?;
        let fine = refine(&seed)?;
        for _ in 0..20 {
            let theta: Vec<f64> = (0..seed.num_params())
                .map(|_| rng.gen_range(-3.2..3.2))
                .collect();
            let coarse = seed.simulate(&theta)?;
            let mut padded = theta.clone();
            padded.resize(fine.num_params(), 0.0);
            let want = interpolate(&coarse)?;
            interp = interp.max(fine.simulate(&padded)?.distance(&want));
        }
    }
    push(
        "circuit",
        "zero-angle refinement = constant interpolation",
        interp,
        1e-12,
    );

    let mut inc = 0.0f64;
    for n in 1..=8 {
        let circ = increment_circuit::<f64>(n)?;
        let perm = increment_permutation(n);
        for (b, &next) in perm.iter().enumerate() {
            let mut s = StateVector::basis_state(n, b)?;
            circ.apply_to(&mut s, &[])?;
            inc = inc.max(s.distance(&StateVector::basis_state(n, next)?));
        }
    }
    push(
        "circuit",
        "increment circuit = cyclic shift, n <= 8",
        inc,
        1e-12,
    );

    let mut grown: ParamCircuit = efficient_su2(2, 3)?;
    for _ in 2..10 {
        grown = refine(&grown)?;
    }
    let count_dev = (grown.num_params() as f64 - 60.0)
        .abs()
        .max((multigrid_param_count(2, 16, 10)? as f64 - 60.0).abs());
    push(
        "circuit",
        "seed 2 -> 10 qubits uses 60 parameters",
        count_dev,
        0.0,
    );

    let mut norm = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(1..=8);
        let c = random_circuit(n, 200, &mut rng)?;
        let theta: Vec<f64> = (0..c.num_params())
            .map(|_| rng.gen_range(-3.2..3.2))
            .collect();
        norm = norm.max((c.simulate(&theta)?.norm() - 1.0).abs());
    }
    push("simcore", "random circuits preserve the norm", norm, 1e-12);

    let h = (fx.dirichlet)(2)?;
    let lambda0 = h.to_dense()?.min_eigenvalue();
    let r = vqe(
        &h,
        &efficient_su2(2, 3)?,
        &[0.0; 16],
        Shots::Exact,
        &OptimizerConfig::nelder_mead(200),
        &mut rng,
    )?;
    push(
        "vqe",
        "exact objective stays above the ground energy",
        (lambda0 - r.value).max(0.0),
        1e-9,
    );

    Ok(Report { checks })
}

fn nan_as_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Result<StateVector> {
    let amps = (0..1usize << n)
        .map(|_| Amp::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Ok(StateVector::from_amplitudes(amps)?)
}

/// `coarse (x) |+>` with the new qubit as the least significant bit.
fn interpolate(coarse: &StateVector) -> Result<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = (0..coarse.dim() * 2)
        .map(|b| coarse.amplitudes()[b >> 1] * h)
        .collect();
    Ok(StateVector::from_amplitudes(amps)?)
}

fn random_circuit(n: usize, gates: usize, rng: &mut ChaCha8Rng) -> Result<ParamCircuit> {
    let mut c = ParamCircuit::new(n);
    for _ in 0..gates {
        let q = rng.gen_range(0..n);
        match rng.gen_range(0..5) {
            0 => c.push(GateKind::H, &[q], None)?,
            1 => {
                c.push_param_rotation(GateKind::RY, q)?;
            }
            2 => {
                c.push_param_rotation(GateKind::RZ, q)?;
            }
            _ if n > 1 => {
                let t = (q + rng.gen_range(1..n)) % n;
                c.push(GateKind::CX, &[q, t], None)?;
            }
            _ => c.push(GateKind::X, &[q], None)?,
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mgvqe::hamiltonian::{MeasuredTerm, MeasurementFrame};

    #[test]
    fn clean_build_passes_with_module_counts() {
        let report = run_verify().unwrap();
        assert!(report.passed(), "{}", report.render());
        let text = report.render();
        for module in ["hamiltonian", "problems", "circuit", "simcore", "vqe"] {
            assert!(
                text.lines()
                    .any(|l| l.starts_with(&format!("{module}: ")) && l.ends_with("passed")),
                "{text}"
            );
        }
    }

    fn corrupted_dirichlet(n: usize) -> mgvqe::Result<Hamiltonian> {
        let h = dirichlet_hamiltonian::<f64>(n)?;
        let frames = h
            .frames()
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let terms = f
                    .terms()
                    .iter()
                    .map(|t| {
                        if i == 1 {
                            MeasuredTerm {
                                weight: t.weight * 1.25,
                                ..*t
                            }
                        } else {
                            *t
                        }
                    })
                    .collect();
                MeasurementFrame::new(n, f.conjugation().cloned(), f.basis().to_vec(), terms)
            })
            .collect::<mgvqe::Result<Vec<_>>>()?;
        Hamiltonian::new(n, frames, h.constant_offset())
    }

    #[test]
    fn corrupted_weight_fails_the_identity_check() {
        let report = run_verify_with(&Fixture {
            dirichlet: corrupted_dirichlet,
        })
        .unwrap();
        assert!(!report.passed());
        let failed: Vec<&str> = report.failures().map(|c| c.invariant).collect();
        assert!(
            failed.iter().any(|i| i.starts_with("dirichlet = periodic")),
            "{failed:?}"
        );
        let identity = report
            .failures()
            .find(|c| c.invariant.starts_with("dirichlet = periodic"))
            .unwrap();
        assert!(identity.max_deviation >= 0.25 - 1e-12);
        assert!(report.render().contains("FAIL hamiltonian"));
    }
}
