//! Discrete 1-D Laplacians on `2^n` grid points.
//!
//! The Dirichlet operator is assembled from the periodic one plus a boundary
//! correction:
//!
//! ```text
//! L_D = S + P^dagger S P + P^dagger (|0..0><0..0| (x) X) P,    S = I - X_0
//! ```
//!
//! where `P` is the increment permutation `|b> -> |b + 1 mod 2^n>` and the
//! projector acts on qubits `1..n`. With qubit 0 as the least-significant bit,
//! `S` couples the pairs `(2k, 2k+1)`, its shift by `P` couples `(2k-1, 2k)`
//! including the wrap-around pair, and the boundary term cancels the wrap.

use crate::circuit::increment_circuit;
use crate::error::{invalid, Result};
use crate::hamiltonian::{
    BasisChange, Hamiltonian, MeasuredTerm, MeasurementFrame, MAX_DENSE_QUBITS,
};
use crate::linalg::{tridiagonal_ground, DenseMatrix};
use crate::scalar::Real;

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!(
            "the discrete Laplacian needs at least two qubits, got {n}"
        )));
    }
    Ok(())
}

fn x_on_lsb(n: usize) -> Vec<BasisChange> {
    let mut basis = vec![BasisChange::Z; n];
    basis[0] = BasisChange::X;
    basis
}

fn upper_mask(n: usize) -> usize {
    ((1usize << n) - 1) & !1
}

/// Frame A: `S` without conjugation (the constant part lives in the offset).
fn unshifted_frame<T: Real>(n: usize) -> Result<MeasurementFrame<T>> {
    MeasurementFrame::new(n, None, x_on_lsb(n), vec![MeasuredTerm::sign(-T::one(), 1)])
}

/// Frame B: terms measured after the increment circuit.
fn shifted_frame<T: Real>(
    n: usize,
    with_s: bool,
    with_boundary: bool,
) -> Result<MeasurementFrame<T>> {
    let mut terms = Vec::new();
    if with_s {
        terms.push(MeasuredTerm::sign(-T::one(), 1));
    }
    if with_boundary {
        terms.push(MeasuredTerm::sign(T::one(), 1).with_zero_mask(upper_mask(n)));
    }
    MeasurementFrame::new(n, Some(increment_circuit(n)?), x_on_lsb(n), terms)
}

/// Dirichlet Laplacian: tridiagonal, 2 on the diagonal, -1 off it. Two frames.
pub fn dirichlet_hamiltonian<T: Real>(n: usize) -> Result<Hamiltonian<T>> {
    check_size(n)?;
    Hamiltonian::new(
        n,
        vec![unshifted_frame(n)?, shifted_frame(n, true, true)?],
        T::lit(2.0),
    )
}

/// Periodic Laplacian `S + P^dagger S P`: the Dirichlet matrix plus -1 corners.
pub fn periodic_hamiltonian<T: Real>(n: usize) -> Result<Hamiltonian<T>> {
    check_size(n)?;
    Hamiltonian::new(
        n,
        vec![unshifted_frame(n)?, shifted_frame(n, true, false)?],
        T::lit(2.0),
    )
}

/// The boundary correction `P^dagger (|0..0><0..0| (x) X) P` on its own.
pub fn dirichlet_boundary_hamiltonian<T: Real>(n: usize) -> Result<Hamiltonian<T>> {
    check_size(n)?;
    Hamiltonian::new(n, vec![shifted_frame(n, false, true)?], T::zero())
}

fn check_dense(n: usize) -> Result<usize> {
    check_size(n)?;
    if n > MAX_DENSE_QUBITS {
        return Err(crate::Error::Capacity {
            what: "dense Laplacian qubits",
            value: n,
            min: 2,
            max: MAX_DENSE_QUBITS,
        });
    }
    Ok(1 << n)
}

/// Explicit `tridiag(-1, 2, -1)` of size `2^n`.
pub fn dirichlet_dense<T: Real>(n: usize) -> Result<DenseMatrix<T>> {
    let dim = check_dense(n)?;
    Ok(DenseMatrix::from_real_fn(dim, |r, c| match r.abs_diff(c) {
        0 => T::lit(2.0),
        1 => -T::one(),
        _ => T::zero(),
    }))
}

/// Explicit circulant Laplacian: Dirichlet plus `-1` in the two corners.
pub fn periodic_dense<T: Real>(n: usize) -> Result<DenseMatrix<T>> {
    let dim = check_dense(n)?;
    Ok(DenseMatrix::from_real_fn(dim, |r, c| {
        if r == c {
            T::lit(2.0)
        } else if r.abs_diff(c) == 1 || r.abs_diff(c) == dim - 1 {
            -T::one()
        } else {
            T::zero()
        }
    }))
}

/// Explicit Neumann Laplacian: Dirichlet with the first and last diagonal entries set to 1.
pub fn neumann_dense<T: Real>(n: usize) -> Result<DenseMatrix<T>> {
    let dim = check_dense(n)?;
    Ok(DenseMatrix::from_real_fn(dim, |r, c| match r.abs_diff(c) {
        0 if r == 0 || r == dim - 1 => T::one(),
        0 => T::lit(2.0),
        1 => -T::one(),
        _ => T::zero(),
    }))
}

/// Reads the tridiagonal band of `h` column by column, without materializing
/// the whole matrix. Fails if any entry outside the band is nonzero.
pub fn operator_tridiagonal_band(h: &Hamiltonian<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let dim = 1usize << h.num_qubits();
    let mut diag = vec![0.0; dim];
    let mut off = vec![0.0; dim - 1];
    for c in 0..dim {
        for (r, v) in h.column(c)?.into_iter().enumerate() {
            let mag = v.norm();
            if mag < 1e-13 {
                continue;
            }
            if v.im.abs() > 1e-13 || r.abs_diff(c) > 1 {
                return Err(invalid(format!(
                    "operator is not real tridiagonal: entry ({r}, {c}) = {v}"
                )));
            }
            if r == c {
                diag[r] = v.re;
            } else if r + 1 == c {
                off[r] = v.re;
            }
        }
    }
    Ok((diag, off))
}

/// Ground energy and unit ground vector of the Dirichlet Laplacian on `n`
/// qubits, computed from the operator's band. The vector's global sign is
/// fixed so every entry is nonnegative.
pub fn dirichlet_ground(n: usize) -> Result<(f64, Vec<f64>)> {
    check_dense(n)?;
    let h = dirichlet_hamiltonian::<f64>(n)?;
    let (diag, off) = operator_tridiagonal_band(&h)?;
    let (lambda, mut v) = tridiagonal_ground(&diag, &off)?;
    let s: f64 = v.iter().sum();
    if s < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    for x in v.iter_mut() {
        if *x < 0.0 && *x > -1e-14 {
            *x = 0.0;
        }
    }
    Ok((lambda, v))
}

/// Closed form `2 - 2 cos(pi / (2^n + 1))` of the Dirichlet ground energy.
pub fn dirichlet_ground_energy_analytic(n: usize) -> f64 {
    2.0 - 2.0 * (std::f64::consts::PI / ((1u64 << n) as f64 + 1.0)).cos()
}
