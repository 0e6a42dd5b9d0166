//! Observables as lists of measurement frames.
//!
//! A frame is one measurement setting: a parameter-free conjugation circuit `W`,
//! a per-qubit basis change (Z, X via `H`, Y via `S^dagger` then `H`) and a list
//! of terms that are all read off the same Z-basis samples. The observable is
//!
//! ```text
//! H = sum_frames W^dagger B^dagger D B W + offset * I
//! ```
//!
//! where `D` is the diagonal operator whose entry at bitstring `b` is the sum of
//! term values at `b`.

use std::sync::OnceLock;

use num_complex::Complex;
use rand::Rng;

use crate::circuit::ParamCircuit;
use crate::error::{invalid, Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::{Amp, Real};
use crate::simcore::{StateVector, Unitary2x2};

/// Largest register [`Hamiltonian::to_dense`] will materialize.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Frames cache their diagonal up to this size.
const DIAGONAL_CACHE_QUBITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Weighted tensor product of Pauli letters; `letters[q]` acts on qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString<T> {
    pub letters: Vec<Pauli>,
    pub weight: T,
}

impl<T: Real> PauliString<T> {
    pub fn new(letters: Vec<Pauli>, weight: T) -> Self {
        Self { letters, weight }
    }

    /// Identity everywhere except the listed `(qubit, letter)` pairs.
    pub fn sparse(n: usize, ops: &[(usize, Pauli)], weight: T) -> Self {
        let mut letters = vec![Pauli::I; n];
        for &(q, p) in ops {
            letters[q] = p;
        }
        Self { letters, weight }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Qubit-wise compatible: on every qubit the non-identity letters agree.
    pub fn qubitwise_compatible(&self, other: &Self) -> bool {
        self.letters
            .iter()
            .zip(&other.letters)
            .all(|(a, b)| *a == Pauli::I || *b == Pauli::I || a == b)
    }
}

/// Local measurement basis of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BasisChange {
    #[default]
    Z,
    /// Rotate with `H` before reading.
    X,
    /// Rotate with `S^dagger` then `H` before reading.
    Y,
}

impl BasisChange {
    fn unitary<T: Real>(self) -> Option<Unitary2x2<T>> {
        match self {
            BasisChange::Z => None,
            BasisChange::X => Some(Unitary2x2::hadamard()),
            BasisChange::Y => Some(Unitary2x2::hadamard().mul(&Unitary2x2::s_dagger())),
        }
    }

    fn for_letter(p: Pauli) -> Option<Self> {
        match p {
            Pauli::I => None,
            Pauli::X => Some(BasisChange::X),
            Pauli::Y => Some(BasisChange::Y),
            Pauli::Z => Some(BasisChange::Z),
        }
    }
}

/// One weighted product of Z signs and computational-basis projectors.
///
/// Its value on a read-out bitstring `b` is
/// `weight * (-1)^{popcount(b & sign_mask)} * [b & zero_mask == 0] * [b & one_mask == one_mask]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasuredTerm<T> {
    pub weight: T,
    pub sign_mask: usize,
    pub zero_mask: usize,
    pub one_mask: usize,
}

impl<T: Real> MeasuredTerm<T> {
    pub fn sign(weight: T, sign_mask: usize) -> Self {
        Self {
            weight,
            sign_mask,
            zero_mask: 0,
            one_mask: 0,
        }
    }

    /// Projector onto the bitstrings with `zero_mask` bits clear and `one_mask` bits set.
    pub fn projector(weight: T, zero_mask: usize, one_mask: usize) -> Self {
        Self {
            weight,
            sign_mask: 0,
            zero_mask,
            one_mask,
        }
    }

    pub fn with_zero_mask(mut self, zero_mask: usize) -> Self {
        self.zero_mask = zero_mask;
        self
    }

    fn masks_disjoint(&self) -> bool {
        self.sign_mask & self.zero_mask == 0
            && self.sign_mask & self.one_mask == 0
            && self.zero_mask & self.one_mask == 0
    }

    fn support(&self) -> usize {
        self.sign_mask | self.zero_mask | self.one_mask
    }

    #[inline]
    pub fn value(&self, b: usize) -> T {
        if b & self.zero_mask != 0 || b & self.one_mask != self.one_mask {
            return T::zero();
        }
        if (b & self.sign_mask).count_ones().is_multiple_of(2) {
            self.weight
        } else {
            -self.weight
        }
    }
}

/// A single measurement setting: conjugation circuit, basis changes, and the
/// terms estimated from the same samples.
#[derive(Debug, Clone)]
pub struct MeasurementFrame<T> {
    conjugation: Option<ParamCircuit<T>>,
    basis: Vec<BasisChange>,
    terms: Vec<MeasuredTerm<T>>,
    diagonal: OnceLock<Vec<T>>,
}

impl<T: Real> PartialEq for MeasurementFrame<T> {
    fn eq(&self, other: &Self) -> bool {
        self.conjugation == other.conjugation
            && self.basis == other.basis
            && self.terms == other.terms
    }
}

impl<T: Real> MeasurementFrame<T> {
    /// Builds a frame on `n` qubits. `conjugation` must be parameter-free.
    pub fn new(
        n: usize,
        conjugation: Option<ParamCircuit<T>>,
        basis: Vec<BasisChange>,
        terms: Vec<MeasuredTerm<T>>,
    ) -> Result<Self> {
        if basis.len() != n {
            return Err(invalid(format!(
                "basis assignment covers {} qubits, frame has {n}",
                basis.len()
            )));
        }
        if let Some(w) = &conjugation {
            if w.num_qubits() != n || w.num_params() != 0 {
                return Err(invalid(
                    "conjugation must be a parameter-free circuit on the frame's register",
                ));
            }
        }
        let reg = if n >= usize::BITS as usize {
            usize::MAX
        } else {
            (1usize << n) - 1
        };
        for t in &terms {
            if !t.masks_disjoint() {
                return Err(invalid("term masks overlap"));
            }
            if t.support() & !reg != 0 {
                return Err(invalid("term acts outside the register"));
            }
            if !t.weight.is_finite() {
                return Err(invalid("term weight is not finite"));
            }
        }
        Ok(Self {
            conjugation,
            basis,
            terms,
            diagonal: OnceLock::new(),
        })
    }

    /// Diagonal frame: identity conjugation, every qubit read in Z.
    pub fn diagonal(n: usize, terms: Vec<MeasuredTerm<T>>) -> Result<Self> {
        Self::new(n, None, vec![BasisChange::Z; n], terms)
    }

    pub fn num_qubits(&self) -> usize {
        self.basis.len()
    }

    pub fn conjugation(&self) -> Option<&ParamCircuit<T>> {
        self.conjugation.as_ref()
    }

    pub fn basis(&self) -> &[BasisChange] {
        &self.basis
    }

    pub fn terms(&self) -> &[MeasuredTerm<T>] {
        &self.terms
    }

    pub fn is_diagonal(&self) -> bool {
        self.conjugation.is_none() && self.basis.iter().all(|b| *b == BasisChange::Z)
    }

    /// Sum of term values on read-out `b`.
    #[inline]
    pub fn value(&self, b: usize) -> T {
        match self.diagonal.get() {
            Some(d) => d[b],
            None => self.terms.iter().map(|t| t.value(b)).sum(),
        }
    }

    fn cached_diagonal(&self) -> Option<&[T]> {
        let n = self.num_qubits();
        if n > DIAGONAL_CACHE_QUBITS {
            return None;
        }
        Some(self.diagonal.get_or_init(|| {
            (0..1usize << n)
                .map(|b| self.terms.iter().map(|t| t.value(b)).sum())
                .collect()
        }))
    }

    /// `B W |psi>`: the state whose Z-basis read-out this frame consumes.
    fn rotate(&self, psi: &StateVector<T>) -> StateVector<T> {
        let mut s = psi.clone();
        if let Some(w) = &self.conjugation {
            w.apply_to(&mut s, &[]).expect("frame circuit validated");
        }
        for (q, b) in self.basis.iter().enumerate() {
            if let Some(u) = b.unitary() {
                s.apply_1q_unchecked(q, &u);
            }
        }
        s
    }

    fn unrotate(&self, s: &mut StateVector<T>) {
        for (q, b) in self.basis.iter().enumerate() {
            if let Some(u) = b.unitary::<T>() {
                s.apply_1q_unchecked(q, &u.adjoint());
            }
        }
        if let Some(w) = &self.conjugation {
            w.apply_adjoint_to(s, &[]).expect("frame circuit validated");
        }
    }

    fn expectation(&self, psi: &StateVector<T>) -> T {
        let rotated = self.rotate(psi);
        let amps = rotated.amplitudes();
        match self.cached_diagonal() {
            Some(d) => amps.iter().zip(d).map(|(a, v)| a.norm_sqr() * *v).sum(),
            None => amps
                .iter()
                .enumerate()
                .map(|(b, a)| a.norm_sqr() * self.value(b))
                .sum(),
        }
    }

    fn sampled<R: Rng + ?Sized>(
        &self,
        psi: &StateVector<T>,
        shots: usize,
        rng: &mut R,
    ) -> Result<T> {
        let rotated = self.rotate(psi);
        let draws = rotated.sample(shots, rng)?;
        let diag = self.cached_diagonal();
        let total: T = draws
            .iter()
            .map(|&b| match diag {
                Some(d) => d[b],
                None => self.value(b),
            })
            .sum();
        Ok(total / T::from_usize(shots).expect("shot count fits"))
    }

    /// `W^dagger B^dagger D B W |psi>` (unnormalized).
    fn act(&self, psi: &StateVector<T>) -> Vec<Amp<T>> {
        let mut s = self.rotate(psi);
        for (b, a) in s.amplitudes_mut().iter_mut().enumerate() {
            *a = *a * self.value(b);
        }
        self.unrotate(&mut s);
        s.into_amplitudes()
    }
}

/// Observable on `num_qubits` qubits: frames plus a constant offset.
#[derive(Debug, Clone)]
pub struct Hamiltonian<T> {
    num_qubits: usize,
    frames: Vec<MeasurementFrame<T>>,
    constant_offset: T,
}

impl<T: Real> PartialEq for Hamiltonian<T> {
    fn eq(&self, other: &Self) -> bool {
        self.num_qubits == other.num_qubits
            && self.frames == other.frames
            && self.constant_offset == other.constant_offset
    }
}

impl<T: Real> Hamiltonian<T> {
    pub fn new(
        num_qubits: usize,
        frames: Vec<MeasurementFrame<T>>,
        constant_offset: T,
    ) -> Result<Self> {
        if num_qubits == 0 {
            return Err(invalid("a Hamiltonian needs at least one qubit"));
        }
        if let Some(f) = frames.iter().find(|f| f.num_qubits() != num_qubits) {
            return Err(invalid(format!(
                "frame on {} qubits in a {num_qubits}-qubit Hamiltonian",
                f.num_qubits()
            )));
        }
        if !constant_offset.is_finite() {
            return Err(invalid("offset is not finite"));
        }
        Ok(Self {
            num_qubits,
            frames,
            constant_offset,
        })
    }

    /// Groups the strings into qubit-wise commuting frames.
    pub fn from_pauli_strings(num_qubits: usize, strings: &[PauliString<T>]) -> Result<Self> {
        if let Some(s) = strings.iter().find(|s| s.len() != num_qubits) {
            return Err(invalid(format!(
                "Pauli string of length {} in a {num_qubits}-qubit Hamiltonian",
                s.len()
            )));
        }
        Self::new(num_qubits, group_commuting(strings)?, T::zero())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn frames(&self) -> &[MeasurementFrame<T>] {
        &self.frames
    }

    pub fn constant_offset(&self) -> T {
        self.constant_offset
    }

    /// `-H`.
    pub fn negated(&self) -> Self {
        self.scaled(-T::one())
    }

    pub fn scaled(&self, factor: T) -> Self {
        let frames = self
            .frames
            .iter()
            .map(|f| MeasurementFrame {
                conjugation: f.conjugation.clone(),
                basis: f.basis.clone(),
                terms: f
                    .terms
                    .iter()
                    .map(|t| MeasuredTerm {
                        weight: t.weight * factor,
                        ..*t
                    })
                    .collect(),
                diagonal: OnceLock::new(),
            })
            .collect();
        Self {
            num_qubits: self.num_qubits,
            frames,
            constant_offset: self.constant_offset * factor,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.frames.iter().all(MeasurementFrame::is_diagonal)
    }

    /// `<b|H|b>` for a diagonal Hamiltonian.
    pub fn diagonal_entry(&self, b: usize) -> Option<T> {
        if !self.is_diagonal() || b >> self.num_qubits != 0 {
            return None;
        }
        Some(self.frames.iter().map(|f| f.value(b)).sum::<T>() + self.constant_offset)
    }

    fn check_state(&self, psi: &StateVector<T>) -> Result<()> {
        if psi.num_qubits() == self.num_qubits {
            Ok(())
        } else {
            Err(invalid(format!(
                "{}-qubit state for a {}-qubit Hamiltonian",
                psi.num_qubits(),
                self.num_qubits
            )))
        }
    }

    /// `<psi|H|psi>` by operator action, no sampling.
    pub fn expectation_exact(&self, psi: &StateVector<T>) -> Result<T> {
        self.check_state(psi)?;
        Ok(self.frames.iter().map(|f| f.expectation(psi)).sum::<T>() + self.constant_offset)
    }

    /// Shot-based estimate: `shots` is the total budget, split evenly across
    /// frames with the remainder going to earlier frames.
    pub fn expectation_sampled<R: Rng + ?Sized>(
        &self,
        psi: &StateVector<T>,
        shots: usize,
        rng: &mut R,
    ) -> Result<T> {
        self.check_state(psi)?;
        let active: Vec<&MeasurementFrame<T>> =
            self.frames.iter().filter(|f| !f.terms.is_empty()).collect();
        if shots == 0 || shots < active.len() {
            return Err(invalid(format!(
                "{shots} shots cannot cover {} measurement frames",
                active.len()
            )));
        }
        let (base, extra) = (shots / active.len().max(1), shots % active.len().max(1));
        let mut total = self.constant_offset;
        for (i, f) in active.iter().enumerate() {
            total = total + f.sampled(psi, base + usize::from(i < extra), rng)?;
        }
        Ok(total)
    }

    /// `H |psi>` for an arbitrary (not necessarily normalized) state.
    pub fn apply(&self, psi: &StateVector<T>) -> Result<Vec<Amp<T>>> {
        self.check_state(psi)?;
        let mut out: Vec<Amp<T>> = psi
            .amplitudes()
            .iter()
            .map(|a| *a * self.constant_offset)
            .collect();
        for f in &self.frames {
            for (o, v) in out.iter_mut().zip(f.act(psi)) {
                *o = *o + v;
            }
        }
        Ok(out)
    }

    /// Column `b` of the matrix, i.e. `H |b>`.
    pub fn column(&self, b: usize) -> Result<Vec<Amp<T>>> {
        self.apply(&StateVector::basis_state(self.num_qubits, b)?)
    }

    /// Materializes the full `2^n x 2^n` matrix.
    pub fn to_dense(&self) -> Result<DenseMatrix<T>> {
        if self.num_qubits > MAX_DENSE_QUBITS {
            return Err(Error::Capacity {
                what: "dense materialization qubits",
                value: self.num_qubits,
                min: 1,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << self.num_qubits;
        let mut m = DenseMatrix::zeros(dim);
        for c in 0..dim {
            for (r, v) in self.column(c)?.into_iter().enumerate() {
                m.set(r, c, v);
            }
        }
        Ok(m)
    }
}

/// Greedy first-fit grouping into qubit-wise compatible frames. Each frame's
/// basis is the union of its strings' letters (Z where all are identity).
pub fn group_commuting<T: Real>(strings: &[PauliString<T>]) -> Result<Vec<MeasurementFrame<T>>> {
    let Some(n) = strings.first().map(PauliString::len) else {
        return Ok(Vec::new());
    };
    if strings.iter().any(|s| s.len() != n) {
        return Err(invalid("Pauli strings differ in length"));
    }
    let mut groups: Vec<(Vec<Pauli>, Vec<MeasuredTerm<T>>)> = Vec::new();
    for s in strings {
        let sign_mask = s
            .letters
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .fold(0usize, |m, (q, _)| m | (1 << q));
        let term = MeasuredTerm::sign(s.weight, sign_mask);
        let slot = groups.iter_mut().find(|(letters, _)| {
            letters
                .iter()
                .zip(&s.letters)
                .all(|(a, b)| *a == Pauli::I || *b == Pauli::I || a == b)
        });
        match slot {
            Some((letters, terms)) => {
                for (a, b) in letters.iter_mut().zip(&s.letters) {
                    if *a == Pauli::I {
                        *a = *b;
                    }
                }
                terms.push(term);
            }
            None => groups.push((s.letters.clone(), vec![term])),
        }
    }
    groups
        .into_iter()
        .map(|(letters, terms)| {
            let basis = letters
                .iter()
                .map(|p| BasisChange::for_letter(*p).unwrap_or_default())
                .collect();
            MeasurementFrame::new(n, None, basis, terms)
        })
        .collect()
}

/// Pauli expansion of the boundary observable: projectors `|0><0| = (I + Z)/2`
/// on qubits `1..n`, `X` on qubit 0. Returns the `2^(n-1)` strings
/// `2^-(n-1) Z_S X_0` over all subsets `S` of `{1, ..., n-1}`.
pub fn pauli_expand_projector_term<T: Real>(n: usize) -> Result<Vec<PauliString<T>>> {
    if n < 2 {
        return Err(invalid("projector expansion needs at least two qubits"));
    }
    let count = 1usize << (n - 1);
    let weight = T::one() / T::from_usize(count).expect("count fits");
    Ok((0..count)
        .map(|subset| {
            let mut ops = vec![(0, Pauli::X)];
            ops.extend(
                (1..n)
                    .filter(|q| subset >> (q - 1) & 1 == 1)
                    .map(|q| (q, Pauli::Z)),
            );
            PauliString::sparse(n, &ops, weight)
        })
        .collect())
}

/// Builds the matrix of a plain (unconjugated) Pauli sum straight from the
/// letter tensor products. Independent of the frame machinery; used as an oracle.
pub fn pauli_sum_dense<T: Real>(strings: &[PauliString<T>]) -> Result<DenseMatrix<T>> {
    let n = strings.first().map(PauliString::len).unwrap_or(1);
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity {
            what: "dense materialization qubits",
            value: n,
            min: 1,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut m = DenseMatrix::zeros(dim);
    let i = Complex::new(T::zero(), T::one());
    for s in strings {
        // P|c> = phase |c ^ flip>.
        for c in 0..dim {
            let mut phase = Complex::new(s.weight, T::zero());
            let mut r = c;
            for (q, p) in s.letters.iter().enumerate() {
                let bit = (c >> q) & 1;
                match p {
                    Pauli::I => {}
                    Pauli::X => r ^= 1 << q,
                    Pauli::Z => {
                        if bit == 1 {
                            phase = -phase;
                        }
                    }
                    Pauli::Y => {
                        r ^= 1 << q;
                        phase = phase * if bit == 0 { i } else { -i };
                    }
                }
            }
            m.set(r, c, m.get(r, c) + phase);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type H = Hamiltonian<f64>;

    fn z1() -> H {
        H::from_pauli_strings(1, &[PauliString::sparse(1, &[(0, Pauli::Z)], 1.0)]).unwrap()
    }

    #[test]
    fn z_examples() {
        let h = z1();
        let psi = StateVector::zero_state(1).unwrap();
        assert_eq!(h.expectation_exact(&psi).unwrap(), 1.0);
        let d = h.to_dense().unwrap();
        assert_eq!(d.get(0, 0).re, 1.0);
        assert_eq!(d.get(1, 1).re, -1.0);
        assert_eq!(d.get(0, 1).norm(), 0.0);
    }

    #[test]
    fn x_on_plus_is_exact_under_sampling() {
        let h = H::from_pauli_strings(1, &[PauliString::sparse(1, &[(0, Pauli::X)], 1.0)]).unwrap();
        let mut psi = StateVector::zero_state(1).unwrap();
        psi.apply_1q(0, &Unitary2x2::hadamard()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(h.expectation_sampled(&psi, 1000, &mut rng).unwrap(), 1.0);
    }

    #[test]
    fn diagonal_basis_state_is_zero_variance() {
        let strings = [
            PauliString::sparse(3, &[(0, Pauli::Z), (2, Pauli::Z)], 0.5),
            PauliString::sparse(3, &[(1, Pauli::Z)], -1.5),
        ];
        let h = H::from_pauli_strings(3, &strings).unwrap();
        let psi = StateVector::basis_state(3, 0b101).unwrap();
        let exact = h.expectation_exact(&psi).unwrap();
        assert_eq!(exact, 0.5 - 1.5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for shots in [1, 7, 100] {
            assert_eq!(h.expectation_sampled(&psi, shots, &mut rng).unwrap(), exact);
        }
    }

    #[test]
    fn grouping_examples() {
        let zz = PauliString::sparse(2, &[(0, Pauli::Z), (1, Pauli::Z)], 1.0);
        let z0 = PauliString::sparse(2, &[(0, Pauli::Z)], 1.0);
        let z1 = PauliString::sparse(2, &[(1, Pauli::Z)], 1.0);
        let frames = group_commuting(&[zz, z0, z1]).unwrap();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].terms().len(), 3);
        assert!(frames[0].is_diagonal());

        let x0 = PauliString::sparse(1, &[(0, Pauli::X)], 1.0);
        let z0 = PauliString::sparse(1, &[(0, Pauli::Z)], 1.0);
        assert_eq!(group_commuting(&[x0, z0]).unwrap().len(), 2);
    }

    #[test]
    fn grouped_frames_measure_every_member() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        let strings: Vec<PauliString<f64>> = (0..30)
            .map(|_| {
                PauliString::new(
                    (0..4).map(|_| letters[rng.gen_range(0..4)]).collect(),
                    rng.gen::<f64>() - 0.5,
                )
            })
            .collect();
        let frames = group_commuting(&strings).unwrap();
        let total: usize = frames.iter().map(|f| f.terms().len()).sum();
        assert_eq!(total, strings.len());
        let h = H::new(4, frames, 0.0).unwrap();
        let oracle = pauli_sum_dense(&strings).unwrap();
        assert!(h.to_dense().unwrap().max_abs_diff(&oracle) < 1e-12);
    }

    #[test]
    fn projector_expansion_matches_operator() {
        for n in 2..=5usize {
            let strings = pauli_expand_projector_term::<f64>(n).unwrap();
            assert_eq!(strings.len(), 1 << (n - 1));
            let wsum: f64 = strings.iter().map(|s| s.weight).sum();
            assert!((wsum - 1.0).abs() < 1e-15);
            let dense = pauli_sum_dense(&strings).unwrap();
            // |0...0><0...0| on qubits 1.. times X on qubit 0 couples |0> and |1>.
            let dim = 1 << n;
            let expected = DenseMatrix::from_real_fn(dim, |r, c| {
                if (r == 0 && c == 1) || (r == 1 && c == 0) {
                    1.0
                } else {
                    0.0
                }
            });
            assert!(dense.max_abs_diff(&expected) < 1e-12);
        }
        let s3 = pauli_expand_projector_term::<f64>(3).unwrap();
        assert!(s3.iter().all(|s| s.weight == 0.25));
        assert!(pauli_expand_projector_term::<f64>(1).is_err());
    }

    #[test]
    fn frame_validation() {
        assert!(
            MeasurementFrame::<f64>::diagonal(2, vec![MeasuredTerm::sign(1.0, 0b100)]).is_err()
        );
        let overlap = MeasuredTerm {
            weight: 1.0,
            sign_mask: 1,
            zero_mask: 1,
            one_mask: 0,
        };
        assert!(MeasurementFrame::<f64>::diagonal(2, vec![overlap]).is_err());
        let h = z1();
        let psi = StateVector::<f64>::zero_state(2).unwrap();
        assert!(h.expectation_exact(&psi).is_err());
    }

    #[test]
    fn sampled_requires_a_shot_per_frame() {
        let strings = [
            PauliString::sparse(1, &[(0, Pauli::X)], 1.0),
            PauliString::sparse(1, &[(0, Pauli::Z)], 1.0),
        ];
        let h = H::from_pauli_strings(1, &strings).unwrap();
        let psi = StateVector::zero_state(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(h.expectation_sampled(&psi, 1, &mut rng).is_err());
        assert!(h.expectation_sampled(&psi, 2, &mut rng).is_ok());
    }

    #[test]
    fn scaling_and_negation() {
        let h = z1().negated();
        let psi = StateVector::zero_state(1).unwrap();
        assert_eq!(h.expectation_exact(&psi).unwrap(), -1.0);
        assert_eq!(h.diagonal_entry(1), Some(1.0));
    }
}
