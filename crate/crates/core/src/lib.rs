//! Minimum-Fisher-information strategies built from harmonic-oscillator
//! eigenstates.
//!
//! The crate evaluates the oscillator eigenbasis, computes Fisher information
//! both in closed form and by quadrature, studies two-state superpositions and
//! Gibbs-randomized ensembles, re-expresses all of them at a fixed risk, and
//! re-derives the eigenproblem by direct constrained minimization.

pub mod basis;
pub mod error;
pub mod exec;
pub mod fisher;
pub mod fourier;
pub mod gibbs;
pub mod grid;
pub mod superposition;
pub mod transactional;
pub mod variational;

pub use basis::{eigenstate_derivative, eigenstate_value, epsilon, hermite, OscillatorParams};
pub use error::{MfiError, Result};
pub use exec::Execution;
pub use fisher::{FisherImage, FisherReport};
pub use grid::{Grid, GridFunction};
pub use num_complex::Complex64;
