//! Problem constructors, hierarchies and brute-force oracles.

pub mod hierarchy;
pub mod ksat;
pub mod laplacian;
pub mod maxcut;

pub use hierarchy::{
    laplacian_hierarchy, multigrid_qubit_map, sat_first_stage, subformula_hierarchy,
    subgraph_hierarchy, Hierarchy, Stage, StageProblem,
};
pub use ksat::{
    hard_instance_clauses, random_eksat, sat_bruteforce, sat_hamiltonian, sat_pauli_expansion,
    CnfFormula, Literal,
};
pub use laplacian::{
    dirichlet_boundary_hamiltonian, dirichlet_dense, dirichlet_ground, dirichlet_hamiltonian,
    neumann_dense, periodic_dense, periodic_hamiltonian,
};
pub use maxcut::{erdos_renyi, maxcut_bruteforce, maxcut_hamiltonian, Graph};
