//! Multigrid ansatz for the variational quantum eigensolver.
//!
//! The crate simulates parameterized circuits exactly on a dense statevector,
//! evaluates observables given as measurement frames, and drives a hierarchy
//! of problems from a small seed register up to the target size, reusing each
//! stage's optimized angles to start the next.
//!
//! All numerical types are generic over the [`Real`] scalar (`f32` or `f64`).
//! The aliases at the crate root pin the double-precision instantiation used
//! by the experiment harness.

pub mod circuit;
mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod problems;
pub mod scalar;
pub mod simcore;
pub mod vqe;

pub use error::{Error, Result};
pub use scalar::{Amp, Real};

pub type StateVector = simcore::StateVector<f64>;
pub type StateVector32 = simcore::StateVector<f32>;
pub type Unitary2x2 = simcore::Unitary2x2<f64>;
pub type ParamCircuit = circuit::ParamCircuit<f64>;
pub type ParamCircuit32 = circuit::ParamCircuit<f32>;
pub type Hamiltonian = hamiltonian::Hamiltonian<f64>;
pub type Hamiltonian32 = hamiltonian::Hamiltonian<f32>;
pub type PauliString = hamiltonian::PauliString<f64>;
pub type Hierarchy = problems::Hierarchy<f64>;
pub type Stage = problems::Stage<f64>;
pub type OptResult = vqe::OptResult<f64>;
pub type StageResult = vqe::StageResult<f64>;
pub type DenseMatrix = linalg::DenseMatrix<f64>;
