//! Dense statevector simulation.
//!
//! Amplitudes are stored in a flat vector indexed by the computational basis
//! state, with qubit 0 as the least-significant bit of the index:
//! `b = sum_j bit_j * 2^j`. All gate kernels update the vector in place by
//! walking amplitude pairs that differ only in the target bit.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::scalar::{Amp, Real};

/// Largest register the simulator will allocate (2^24 amplitudes).
pub const MAX_QUBITS: usize = 24;

/// A 2x2 complex matrix acting on one qubit, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2x2<T> {
    pub m: [[Amp<T>; 2]; 2],
}

impl<T: Real> Unitary2x2<T> {
    pub fn new(m: [[Amp<T>; 2]; 2]) -> Self {
        Self { m }
    }

    fn real(a: T, b: T, c: T, d: T) -> Self {
        let z = T::zero();
        Self::new([
            [Complex::new(a, z), Complex::new(b, z)],
            [Complex::new(c, z), Complex::new(d, z)],
        ])
    }

    pub fn identity() -> Self {
        Self::real(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn hadamard() -> Self {
        let r = T::FRAC_1_SQRT_2();
        Self::real(r, r, r, -r)
    }

    pub fn pauli_x() -> Self {
        Self::real(T::zero(), T::one(), T::one(), T::zero())
    }

    pub fn pauli_z() -> Self {
        Self::real(T::one(), T::zero(), T::zero(), -T::one())
    }

    /// `RY(theta) = exp(-i theta Y / 2)`.
    pub fn ry(theta: T) -> Self {
        let half = theta / T::lit(2.0);
        let (s, c) = half.sin_cos();
        Self::real(c, -s, s, c)
    }

    /// `RZ(theta) = exp(-i theta Z / 2)`.
    pub fn rz(theta: T) -> Self {
        let half = theta / T::lit(2.0);
        let z = Complex::zero();
        Self::new([
            [Complex::from_polar(T::one(), -half), z],
            [z, Complex::from_polar(T::one(), half)],
        ])
    }

    pub fn s_dagger() -> Self {
        let z = Complex::zero();
        Self::new([[Complex::one(), z], [z, Complex::new(T::zero(), -T::one())]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let mut out = [[Complex::zero(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::new(out)
    }

    /// Largest entrywise deviation of `U U^dagger` from the identity.
    pub fn unitarity_defect(&self) -> T {
        let p = self.mul(&self.adjoint());
        let id = Self::identity();
        let mut worst = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((p.m[i][j] - id.m[i][j]).norm());
            }
        }
        worst
    }

    fn check_unitary(&self) -> Result<()> {
        let defect = self.unitarity_defect();
        if defect <= unitary_tolerance::<T>() {
            Ok(())
        } else {
            Err(invalid(format!(
                "matrix is not unitary (max |UU^dagger - I| = {defect:e})"
            )))
        }
    }
}

/// 1e-12 at double precision, proportionally looser for `f32`.
fn unitary_tolerance<T: Real>() -> T {
    T::EPS * T::lit(4500.0)
}

/// A pure state of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    num_qubits: usize,
    amps: Vec<Amp<T>>,
}

fn check_qubit_count(n: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::Capacity {
            what: "qubit count",
            value: n,
            min: 1,
            max: MAX_QUBITS,
        })
    }
}

impl<T: Real> StateVector<T> {
    /// `|0...0>` on `n` qubits.
    pub fn zero_state(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let mut amps = vec![Complex::zero(); 1 << n];
        amps[0] = Complex::one();
        Ok(Self {
            num_qubits: n,
            amps,
        })
    }

    /// The computational basis state `|index>`.
    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero_state(n)?;
        if index >= s.amps.len() {
            return Err(Error::Index {
                what: "basis state",
                index,
                size: s.amps.len(),
            });
        }
        s.amps[0] = Complex::zero();
        s.amps[index] = Complex::one();
        Ok(s)
    }

    /// Wraps raw amplitudes. The length must be a power of two; the vector is
    /// rescaled to unit norm and rejected if it is zero or non-finite.
    pub fn from_amplitudes(mut amps: Vec<Amp<T>>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(invalid(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_qubit_count(n)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if !norm.is_finite() || norm <= T::zero() {
            return Err(invalid("amplitudes have zero or non-finite norm"));
        }
        for a in amps.iter_mut() {
            *a = *a / norm;
        }
        Ok(Self {
            num_qubits: n,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Amp<T>] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Amp<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Amp<T>> {
        self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Amp<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::zero(), |acc, x| acc + x)
    }

    /// Euclidean distance between amplitude vectors (no phase alignment).
    pub fn distance(&self, other: &Self) -> T {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.num_qubits {
            Ok(())
        } else {
            Err(Error::Index {
                what: "qubit register",
                index: q,
                size: self.num_qubits,
            })
        }
    }

    /// Applies a single-qubit unitary to `qubit`.
    pub fn apply_1q(&mut self, qubit: usize, u: &Unitary2x2<T>) -> Result<()> {
        self.check_qubit(qubit)?;
        u.check_unitary()?;
        self.apply_1q_unchecked(qubit, u);
        Ok(())
    }

    pub(crate) fn apply_1q_unchecked(&mut self, qubit: usize, u: &Unitary2x2<T>) {
        let [[u00, u01], [u10, u11]] = u.m;
        let stride = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = u00 * x + u01 * y;
                *b = u10 * x + u11 * y;
            }
        }
    }

    /// Real rotation `[[c, -s], [s, c]]`, the RY kernel without complex multiplies.
    pub(crate) fn apply_ry_unchecked(&mut self, qubit: usize, theta: T) {
        let (s, c) = (theta / T::lit(2.0)).sin_cos();
        let stride = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x * c - y * s;
                *b = x * s + y * c;
            }
        }
    }

    pub(crate) fn apply_rz_unchecked(&mut self, qubit: usize, theta: T) {
        let half = theta / T::lit(2.0);
        let p0 = Complex::from_polar(T::one(), -half);
        let p1 = Complex::from_polar(T::one(), half);
        let bit = 1usize << qubit;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a = *a * if i & bit == 0 { p0 } else { p1 };
        }
    }

    /// Applies `u` to `target` on the subspace where every control qubit is 1.
    pub fn apply_controlled(
        &mut self,
        controls: &[usize],
        target: usize,
        u: &Unitary2x2<T>,
    ) -> Result<()> {
        self.check_qubit(target)?;
        let mut mask = 0usize;
        for &c in controls {
            self.check_qubit(c)?;
            if c == target {
                return Err(invalid(format!("control qubit {c} is also the target")));
            }
            if mask & (1 << c) != 0 {
                return Err(invalid(format!("control qubit {c} listed twice")));
            }
            mask |= 1 << c;
        }
        u.check_unitary()?;
        self.apply_controlled_unchecked(mask, target, u);
        Ok(())
    }

    pub(crate) fn apply_controlled_unchecked(
        &mut self,
        control_mask: usize,
        target: usize,
        u: &Unitary2x2<T>,
    ) {
        let [[u00, u01], [u10, u11]] = u.m;
        let bit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & bit == 0 && i & control_mask == control_mask {
                let (x, y) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = u00 * x + u01 * y;
                self.amps[i | bit] = u10 * x + u11 * y;
            }
        }
    }

    /// Multi-controlled X: swaps the target pair wherever all controls are set.
    pub(crate) fn apply_mcx_unchecked(&mut self, control_mask: usize, target: usize) {
        let bit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & bit == 0 && i & control_mask == control_mask {
                self.amps.swap(i, i | bit);
            }
        }
    }

    /// Negates every amplitude whose index has all bits of `mask` set (CZ for two bits).
    pub(crate) fn apply_phase_flip_unchecked(&mut self, mask: usize) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a = -*a;
            }
        }
    }

    /// Relabels basis states: `amps'[perm[b]] = amps[b]`.
    pub fn apply_permutation(&mut self, perm: &[usize]) -> Result<()> {
        let dim = self.amps.len();
        if perm.len() != dim {
            return Err(invalid(format!(
                "permutation has {} entries, state has {dim}",
                perm.len()
            )));
        }
        let mut seen = vec![false; dim];
        for &p in perm {
            if p >= dim || std::mem::replace(&mut seen[p], true) {
                return Err(invalid("permutation is not a bijection on basis indices"));
            }
        }
        let mut out = vec![Complex::zero(); dim];
        for (b, &p) in perm.iter().enumerate() {
            out[p] = self.amps[b];
        }
        self.amps = out;
        Ok(())
    }

    /// Draws `shots` i.i.d. basis indices with probability `|amps[b]|^2`.
    pub fn sample<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Result<Vec<usize>> {
        if shots == 0 {
            return Err(invalid("shots must be at least 1"));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0f64;
        for a in &self.amps {
            acc += a.norm_sqr().to_f64_lossy();
            cdf.push(acc);
        }
        let last = cdf.len() - 1;
        Ok((0..shots)
            .map(|_| {
                let u = rng.gen::<f64>() * acc;
                cdf.partition_point(|&c| c <= u).min(last)
            })
            .collect())
    }
}

/// Basis-index bijection `b -> (b + 1) mod 2^n`.
pub fn increment_permutation(n: usize) -> Vec<usize> {
    let dim = 1usize << n;
    (0..dim).map(|b| (b + 1) % dim).collect()
}
