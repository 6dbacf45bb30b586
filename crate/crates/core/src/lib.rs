//! Stationary perturbation theory on truncated-basis model Hamiltonians.
//!
//! The crate provides Rayleigh-Schrodinger and Brillouin-Wigner energies
//! under Epstein-Nesbet or standard partitioning, an alternating
//! coefficient/energy iteration whose per-order cost is a single
//! matrix-vector product, and its quasi-degenerate extension built on
//! correct zeroth-order states of a small model space. Two model systems
//! (a perturbed harmonic oscillator and a particle in a box with a cosine
//! potential) come with exact references for validation.
//!
//! ```
//! use enpt_core::{build_harmonic_oscillator, iterative_variant, partition, Scheme};
//!
//! let sys = build_harmonic_oscillator(80, 1.0).unwrap();
//! let p = partition(&sys, Scheme::EpsteinNesbet);
//! let trace = iterative_variant(&p, 0, 200, 1e-12).unwrap();
//! assert!((trace.final_energy() - 0.5 * 2f64.sqrt()).abs() < 1e-8);
//! ```

pub mod error;
pub mod experiment;
pub mod linalg;
pub mod model;
pub mod nondegenerate;
pub mod partition;
pub mod quadrature;
pub mod quasidegenerate;
pub mod reference;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use model::{build_cosine_box, build_harmonic_oscillator, ModelSystem, SystemKind};
pub use nondegenerate::{
    bwpt, iterative_variant, residual, rspt, BwStrategy, EnergySeries, IterationTrace,
    IterativeSolver,
};
pub use partition::{partition, PartitionedSystem, Scheme};
pub use quadrature::quadrature_matrix_element;
pub use quasidegenerate::{
    build_model_space, qd_iterate, qd_second_order, select_model_space, QdIterationTrace, QdSetup,
};
pub use reference::{
    dense_eigensolve, exact_oscillator_energy, reference_energy, ReferenceSpectrum,
};
