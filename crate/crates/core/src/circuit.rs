//! Parameterized circuits and the ansatz builders.
//!
//! A [`ParamCircuit`] is an ordered gate list whose rotation gates either carry
//! a fixed angle or point at a parameter slot. Binding a parameter vector and
//! running the list on `|0...0>` yields the trial state.
//!
//! Text dump format (one gate per line, see [`ParamCircuit`]'s `Display`):
//!
//! ```text
//! circuit qubits=2 params=1
//! h 0
//! ry 1 p0
//! rz 0 a0.5
//! cx 0 1
//! mcx 0 1 2
//! ```
//!
//! Rotations end with `pK` (parameter slot K) or `aX` (fixed angle X radians).
//! For `cx` and `mcx` the last qubit is the target.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use crate::simcore::{StateVector, Unitary2x2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    RY,
    RZ,
    CX,
    CZ,
    /// Multi-controlled X; the last qubit in the list is the target.
    MCX,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::RY | GateKind::RZ)
    }

    fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::RY => "ry",
            GateKind::RZ => "rz",
            GateKind::CX => "cx",
            GateKind::CZ => "cz",
            GateKind::MCX => "mcx",
        }
    }
}

/// Where a rotation gate takes its angle from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle<T> {
    Fixed(T),
    Slot(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp<T> {
    kind: GateKind,
    qubits: Vec<usize>,
    param: Option<Angle<T>>,
}

impl<T: Real> GateOp<T> {
    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn param(&self) -> Option<Angle<T>> {
        self.param
    }

    fn shifted(&self, by: usize) -> Self {
        Self {
            kind: self.kind,
            qubits: self.qubits.iter().map(|q| q + by).collect(),
            param: self.param,
        }
    }

    fn angle(&self, theta: &[T]) -> T {
        match self.param {
            Some(Angle::Fixed(a)) => a,
            Some(Angle::Slot(k)) => theta[k],
            None => unreachable!("rotation without angle"),
        }
    }

    fn mask(qubits: &[usize]) -> usize {
        qubits.iter().fold(0, |m, q| m | (1 << q))
    }

    /// Applies the gate (or its inverse) with slots bound to `theta`.
    fn apply(&self, state: &mut StateVector<T>, theta: &[T], adjoint: bool) {
        let q = &self.qubits;
        let sign = if adjoint { -T::one() } else { T::one() };
        match self.kind {
            GateKind::H => state.apply_1q_unchecked(q[0], &Unitary2x2::hadamard()),
            GateKind::X => state.apply_mcx_unchecked(0, q[0]),
            GateKind::RY => state.apply_ry_unchecked(q[0], sign * self.angle(theta)),
            GateKind::RZ => state.apply_rz_unchecked(q[0], sign * self.angle(theta)),
            GateKind::CX | GateKind::MCX => {
                let (target, controls) = q.split_last().expect("nonempty");
                state.apply_mcx_unchecked(Self::mask(controls), *target)
            }
            GateKind::CZ => state.apply_phase_flip_unchecked(Self::mask(q)),
        }
    }
}

/// Ordered gate list on `num_qubits` qubits with `num_params` parameter slots.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamCircuit<T> {
    num_qubits: usize,
    ops: Vec<GateOp<T>>,
    num_params: usize,
}

impl<T: Real> ParamCircuit<T> {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            ops: Vec::new(),
            num_params: 0,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn ops(&self) -> &[GateOp<T>] {
        &self.ops
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.ops.iter().filter(|op| op.kind == kind).count()
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::Index {
                    what: "circuit register",
                    index: q,
                    size: self.num_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(invalid(format!("qubit {q} repeated in one gate")));
            }
        }
        Ok(())
    }

    /// Appends a gate. Rotations must carry an angle and other kinds must not;
    /// a slot index at or beyond `num_params` grows the parameter count.
    pub fn push(
        &mut self,
        kind: GateKind,
        qubits: &[usize],
        param: Option<Angle<T>>,
    ) -> Result<()> {
        self.check_qubits(qubits)?;
        let arity_ok = match kind {
            GateKind::H | GateKind::X | GateKind::RY | GateKind::RZ => qubits.len() == 1,
            GateKind::CX | GateKind::CZ => qubits.len() == 2,
            GateKind::MCX => !qubits.is_empty(),
        };
        if !arity_ok {
            return Err(invalid(format!(
                "{} cannot act on {} qubits",
                kind.mnemonic(),
                qubits.len()
            )));
        }
        if kind.is_rotation() != param.is_some() {
            return Err(invalid(format!(
                "{} must {}carry an angle",
                kind.mnemonic(),
                if kind.is_rotation() { "" } else { "not " }
            )));
        }
        if let Some(Angle::Slot(k)) = param {
            self.num_params = self.num_params.max(k + 1);
        }
        self.ops.push(GateOp {
            kind,
            qubits: qubits.to_vec(),
            param,
        });
        Ok(())
    }

    /// Appends a rotation bound to a fresh parameter slot and returns the slot.
    pub fn push_param_rotation(&mut self, kind: GateKind, qubit: usize) -> Result<usize> {
        let slot = self.num_params;
        self.push(kind, &[qubit], Some(Angle::Slot(slot)))?;
        Ok(slot)
    }

    /// Checks that every parameter slot is referenced by at least one rotation.
    pub fn validate(&self) -> Result<()> {
        let mut used = vec![false; self.num_params];
        for op in &self.ops {
            if let Some(Angle::Slot(k)) = op.param {
                used[k] = true;
            }
        }
        match used.iter().position(|u| !u) {
            Some(k) => Err(invalid(format!("parameter slot {k} is never used"))),
            None => Ok(()),
        }
    }

    fn check_theta(&self, theta: &[T]) -> Result<()> {
        if theta.len() == self.num_params {
            Ok(())
        } else {
            Err(invalid(format!(
                "circuit has {} parameters, got {} angles",
                self.num_params,
                theta.len()
            )))
        }
    }

    fn check_state(&self, state: &StateVector<T>) -> Result<()> {
        if state.num_qubits() == self.num_qubits {
            Ok(())
        } else {
            Err(invalid(format!(
                "circuit on {} qubits applied to a {}-qubit state",
                self.num_qubits,
                state.num_qubits()
            )))
        }
    }

    /// Runs the gate list on `|0...0>` with slots bound to `theta`.
    pub fn simulate(&self, theta: &[T]) -> Result<StateVector<T>> {
        let mut state = StateVector::zero_state(self.num_qubits)?;
        self.apply_to(&mut state, theta)?;
        Ok(state)
    }

    pub fn apply_to(&self, state: &mut StateVector<T>, theta: &[T]) -> Result<()> {
        self.check_theta(theta)?;
        self.check_state(state)?;
        for op in &self.ops {
            op.apply(state, theta, false);
        }
        Ok(())
    }

    /// Applies the inverse circuit (gates reversed and adjointed).
    pub fn apply_adjoint_to(&self, state: &mut StateVector<T>, theta: &[T]) -> Result<()> {
        self.check_theta(theta)?;
        self.check_state(state)?;
        for op in self.ops.iter().rev() {
            op.apply(state, theta, true);
        }
        Ok(())
    }
}

impl<T: Real> fmt::Display for ParamCircuit<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "circuit qubits={} params={}",
            self.num_qubits, self.num_params
        )?;
        for op in &self.ops {
            write!(f, "{}", op.kind.mnemonic())?;
            for q in &op.qubits {
                write!(f, " {q}")?;
            }
            match op.param {
                Some(Angle::Slot(k)) => write!(f, " p{k}")?,
                Some(Angle::Fixed(a)) => write!(f, " a{a}")?,
                None => {}
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Hardware-efficient seed ansatz: `reps + 1` layers of RY then RZ on every
/// qubit, each rotation with its own slot, separated by reverse-linear CX
/// chains `CX(n-2, n-1), ..., CX(0, 1)`.
pub fn efficient_su2<T: Real>(n: usize, reps: usize) -> Result<ParamCircuit<T>> {
    if n == 0 {
        return Err(invalid("efficient_su2 needs at least one qubit"));
    }
    let mut c = ParamCircuit::new(n);
    for layer in 0..=reps {
        for q in 0..n {
            c.push_param_rotation(GateKind::RY, q)?;
        }
        for q in 0..n {
            c.push_param_rotation(GateKind::RZ, q)?;
        }
        if layer < reps {
            for i in (0..n.saturating_sub(1)).rev() {
                c.push(GateKind::CX, &[i, i + 1], None)?;
            }
        }
    }
    Ok(c)
}

/// Default repetition count of the seed ansatz.
pub const SEED_REPS: usize = 3;

/// Order in which a refinement layer entangles the existing qubits with the new one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineOrder {
    Ascending,
    Descending,
}

pub const DEFAULT_REFINE_ORDER: RefineOrder = RefineOrder::Ascending;

/// Adds one qubit to `circ`. See [`refine_with`].
pub fn refine<T: Real>(circ: &ParamCircuit<T>) -> Result<ParamCircuit<T>> {
    refine_with(circ, DEFAULT_REFINE_ORDER)
}

/// Grows an `n`-qubit circuit to `n + 1` qubits.
///
/// The new qubit becomes index 0 and the old qubits move up by one. After the
/// re-indexed copy of `circ` the layer applies `H` to the new qubit and, for
/// each old qubit `i`, the sandwich `CZ(i, new) RY(theta_i) CZ(i, new)`. With the
/// `n` new angles at zero every CZ pair cancels and the result is the old state
/// tensored with `|+>` on the least-significant qubit.
pub fn refine_with<T: Real>(circ: &ParamCircuit<T>, order: RefineOrder) -> Result<ParamCircuit<T>> {
    let n = circ.num_qubits;
    if n == 0 {
        return Err(invalid("cannot refine an empty register"));
    }
    let mut out = ParamCircuit {
        num_qubits: n + 1,
        ops: circ.ops.iter().map(|op| op.shifted(1)).collect(),
        num_params: circ.num_params,
    };
    out.push(GateKind::H, &[0], None)?;
    let old: Vec<usize> = match order {
        RefineOrder::Ascending => (1..=n).collect(),
        RefineOrder::Descending => (1..=n).rev().collect(),
    };
    for i in old {
        out.push(GateKind::CZ, &[i, 0], None)?;
        out.push_param_rotation(GateKind::RY, 0)?;
        out.push(GateKind::CZ, &[i, 0], None)?;
    }
    Ok(out)
}

/// Parameter-free circuit mapping `|b>` to `|(b + 1) mod 2^n>`: multi-controlled
/// X gates from the most significant bit down, ending with `X` on qubit 0.
pub fn increment_circuit<T: Real>(n: usize) -> Result<ParamCircuit<T>> {
    if n == 0 {
        return Err(invalid("increment circuit needs at least one qubit"));
    }
    let mut c = ParamCircuit::new(n);
    for target in (1..n).rev() {
        let qubits: Vec<usize> = (0..=target).collect();
        let kind = if target == 1 {
            GateKind::CX
        } else {
            GateKind::MCX
        };
        c.push(kind, &qubits, None)?;
    }
    c.push(GateKind::X, &[0], None)?;
    Ok(c)
}

/// Parameter count of a multigrid ansatz grown from an `m`-qubit seed with
/// `seed_params` parameters up to `n` qubits: `seed_params + sum_{i=m}^{n-1} i`.
pub fn multigrid_param_count(m: usize, seed_params: usize, n: usize) -> Result<usize> {
    if m == 0 || n < m {
        return Err(invalid(format!("need n >= m >= 1, got m = {m}, n = {n}")));
    }
    Ok(seed_params + (n * (n - 1) - m * (m - 1)) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    type C = ParamCircuit<f64>;

    #[test]
    fn simulate_small_circuits() {
        let c = C::new(2);
        let s = c.simulate(&[]).unwrap();
        assert_eq!(s.amplitudes()[0], Complex::new(1.0, 0.0));

        let mut c = C::new(1);
        c.push(GateKind::H, &[0], None).unwrap();
        let s = c.simulate(&[]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - r).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - r).abs() < 1e-15);

        assert!(c.simulate(&[0.1]).is_err());
    }

    #[test]
    fn efficient_su2_at_zero_angles_is_ground() {
        let c = efficient_su2::<f64>(2, 3).unwrap();
        let s = c.simulate(&[0.0; 16]).unwrap();
        // RY(0) = RZ(0) = I and CX|00> = |00>: amplitude 1 on index 0 up to phase.
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn efficient_su2_shape() {
        let c = efficient_su2::<f64>(2, 3).unwrap();
        assert_eq!(c.num_params(), 16);
        let c = efficient_su2::<f64>(1, 3).unwrap();
        assert_eq!((c.num_params(), c.count(GateKind::CX)), (8, 0));
        let c = efficient_su2::<f64>(4, 3).unwrap();
        assert_eq!((c.num_params(), c.count(GateKind::CX)), (32, 9));
        c.validate().unwrap();
        let cx: Vec<_> = c
            .ops()
            .iter()
            .filter(|op| op.kind() == GateKind::CX)
            .take(3)
            .map(|op| op.qubits().to_vec())
            .collect();
        assert_eq!(cx, vec![vec![2, 3], vec![1, 2], vec![0, 1]]);
    }

    #[test]
    fn refine_adds_params_and_layer() {
        let seed = efficient_su2::<f64>(2, 3).unwrap();
        let r1 = refine(&seed).unwrap();
        assert_eq!(r1.num_params(), 18);
        assert_eq!(r1.num_qubits(), 3);
        let r2 = refine(&r1).unwrap();
        assert_eq!(r2.num_params(), 21);
        let layer = &r2.ops()[r1.ops().len()..];
        let count = |k| layer.iter().filter(|op| op.kind() == k).count();
        assert_eq!(
            (count(GateKind::H), count(GateKind::RY), count(GateKind::CZ)),
            (1, 3, 6)
        );
        r2.validate().unwrap();

        let mut c = seed;
        for _ in 2..10 {
            c = refine(&c).unwrap();
        }
        assert_eq!(c.num_params(), 60);
    }

    #[test]
    fn refine_descending_reverses_partners() {
        let seed = efficient_su2::<f64>(2, 0).unwrap();
        let r = refine_with(&seed, RefineOrder::Descending).unwrap();
        let first_cz = r.ops().iter().find(|op| op.kind() == GateKind::CZ).unwrap();
        assert_eq!(first_cz.qubits(), &[2, 0]);
    }

    #[test]
    fn increment_examples() {
        let c = increment_circuit::<f64>(1).unwrap();
        assert_eq!(c.ops().len(), 1);
        let s = c.simulate(&[]).unwrap();
        assert_eq!(s.amplitudes()[1], Complex::new(1.0, 0.0));

        let c = increment_circuit::<f64>(3).unwrap();
        let mut s = StateVector::basis_state(3, 7).unwrap();
        c.apply_to(&mut s, &[]).unwrap();
        assert_eq!(s.amplitudes()[0], Complex::new(1.0, 0.0));
    }

    #[test]
    fn param_count_formula() {
        assert_eq!(multigrid_param_count(2, 16, 10).unwrap(), 60);
        assert_eq!(multigrid_param_count(2, 16, 2).unwrap(), 16);
        assert_eq!(multigrid_param_count(3, 24, 5).unwrap(), 24 + 3 + 4);
        assert!(multigrid_param_count(3, 24, 2).is_err());
    }

    #[test]
    fn push_enforces_angle_rules() {
        let mut c = C::new(2);
        assert!(c.push(GateKind::RY, &[0], None).is_err());
        assert!(c.push(GateKind::H, &[0], Some(Angle::Fixed(1.0))).is_err());
        assert!(c.push(GateKind::CX, &[0, 0], None).is_err());
        assert!(c.push(GateKind::CX, &[0, 2], None).is_err());
        c.push(GateKind::RY, &[0], Some(Angle::Slot(1))).unwrap();
        assert_eq!(c.num_params(), 2);
        assert!(c.validate().is_err());
    }

    #[test]
    fn dump_format() {
        let mut c = C::new(2);
        c.push(GateKind::H, &[0], None).unwrap();
        c.push_param_rotation(GateKind::RY, 1).unwrap();
        c.push(GateKind::RZ, &[0], Some(Angle::Fixed(0.5))).unwrap();
        c.push(GateKind::CX, &[0, 1], None).unwrap();
        assert_eq!(
            c.to_string(),
            "circuit qubits=2 params=1\nh 0\nry 1 p0\nrz 0 a0.5\ncx 0 1\n"
        );
    }
}
