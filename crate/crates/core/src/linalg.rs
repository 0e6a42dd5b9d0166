//! Dense matrices and eigensolvers used as oracles.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::{Complex, Complex64};
use num_traits::Zero;

use crate::error::{invalid, Result};
use crate::scalar::{Amp, Real};

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    dim: usize,
    data: Vec<Amp<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn from_real_fn(dim: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = Complex::new(f(r, c), T::zero());
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Amp<T> {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Amp<T>) {
        self.data[row * self.dim + col] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest `|M[r][c] - conj(M[c][r])|`.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn matvec(&self, v: &[Amp<T>]) -> Vec<Amp<T>> {
        self.data
            .chunks_exact(self.dim)
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    /// `v^dagger M v` (real part; the matrix is expected Hermitian).
    pub fn quadratic_form(&self, v: &[Amp<T>]) -> T {
        self.matvec(v)
            .iter()
            .zip(v)
            .fold(Complex::zero(), |acc: Amp<T>, (mv, x)| acc + x.conj() * mv)
            .re
    }

    /// Entries `(i, i)` and `(i, i+1)` if every other entry is zero, else `None`.
    pub fn real_tridiagonal_band(&self, tol: T) -> Option<(Vec<T>, Vec<T>)> {
        let n = self.dim;
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        for r in 0..n {
            for c in 0..n {
                let v = self.get(r, c);
                let in_band = r.abs_diff(c) <= 1;
                if v.im.abs() > tol || (!in_band && v.re.abs() > tol) {
                    return None;
                }
            }
            diag.push(self.get(r, r).re);
            if r + 1 < n {
                if (self.get(r, r + 1).re - self.get(r + 1, r).re).abs() > tol {
                    return None;
                }
                off.push(self.get(r, r + 1).re);
            }
        }
        Some((diag, off))
    }
}

impl DenseMatrix<f64> {
    /// All eigenvalues (ascending) and the eigenvector of the smallest one,
    /// via a Hermitian eigensolve. Intended for dimensions up to a few hundred.
    pub fn eigh_ground(&self) -> (Vec<f64>, Vec<Complex64>) {
        let m = DMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c));
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let ground = eig.eigenvectors.column(order[0]).iter().copied().collect();
        (values, ground)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigh_ground().0[0]
    }
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x` (Sturm count).
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of a symmetric tridiagonal matrix by bisection.
pub fn tridiagonal_min_eigenvalue(diag: &[f64], off: &[f64]) -> Result<f64> {
    if diag.is_empty() || off.len() + 1 != diag.len() {
        return Err(invalid("tridiagonal band has inconsistent lengths"));
    }
    let radius = |i: usize| {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i < off.len() { off[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..diag.len())
        .map(|i| diag[i] - radius(i))
        .fold(f64::INFINITY, f64::min);
    let mut hi = (0..diag.len())
        .map(|i| diag[i] + radius(i))
        .fold(f64::NEG_INFINITY, f64::max);
    lo -= 1e-12 * (1.0 + lo.abs());
    hi += 1e-12 * (1.0 + hi.abs());
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Ground eigenpair of a symmetric tridiagonal matrix: bisection for the value,
/// shifted inverse iteration (Thomas solves) for the unit vector.
pub fn tridiagonal_ground(diag: &[f64], off: &[f64]) -> Result<(f64, Vec<f64>)> {
    let lambda = tridiagonal_min_eigenvalue(diag, off)?;
    let n = diag.len();
    let shift = lambda - 1e-9 * (1.0 + lambda.abs());
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..50 {
        // T - shift is positive definite, so the forward sweep never pivots.
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut prev_c = 0.0;
        let mut prev_d = 0.0;
        for i in 0..n {
            let sub = if i > 0 { off[i - 1] } else { 0.0 };
            let denom = diag[i] - shift - sub * prev_c;
            c[i] = if i + 1 < n { off[i] / denom } else { 0.0 };
            d[i] = (v[i] - sub * prev_d) / denom;
            prev_c = c[i];
            prev_d = d[i];
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        let next: Vec<f64> = x.iter().map(|a| a / norm).collect();
        let change = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if change < 1e-15 {
            break;
        }
    }
    Ok((lambda, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toeplitz(n: usize) -> (Vec<f64>, Vec<f64>) {
        (vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn bisection_matches_analytic_toeplitz_spectrum() {
        for n in [1usize, 4, 16, 257] {
            let (d, o) = toeplitz(n);
            let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
            let got = tridiagonal_min_eigenvalue(&d, &o).unwrap();
            assert!((got - exact).abs() < 1e-14, "n={n}: {got} vs {exact}");
        }
    }

    #[test]
    fn inverse_iteration_recovers_sine_mode() {
        let n = 64;
        let (d, o) = toeplitz(n);
        let (_, v) = tridiagonal_ground(&d, &o).unwrap();
        let sign = v[0].signum();
        let norm: f64 = (1..=n)
            .map(|k| {
                (k as f64 * std::f64::consts::PI / (n as f64 + 1.0))
                    .sin()
                    .powi(2)
            })
            .sum::<f64>()
            .sqrt();
        for (k, vk) in v.iter().enumerate() {
            let s = ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).sin() / norm;
            assert!((sign * vk - s).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_eigensolve_agrees_with_bisection() {
        let n = 8;
        let m = DenseMatrix::from_real_fn(n, |r, c| match r.abs_diff(c) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let (d, o) = m.real_tridiagonal_band(0.0).unwrap();
        let lam = tridiagonal_min_eigenvalue(&d, &o).unwrap();
        assert!((m.min_eigenvalue() - lam).abs() < 1e-12);
        assert_eq!(m.hermitian_defect(), 0.0);
    }

    #[test]
    fn band_extraction_rejects_wide_matrices() {
        let m = DenseMatrix::from_real_fn(4, |r, c| if r.abs_diff(c) == 3 { -1.0 } else { 0.0 });
        assert!(m.real_tridiagonal_band(1e-12).is_none());
    }
}
