//! Sampling theory for bounded rank-one perturbations.
//!
//! Given a self-adjoint operator `A` with simple discrete spectrum and a
//! cyclic vector `μ`, the family `A_h = A + h⟨μ,·⟩μ` maps every vector `φ`
//! to a meromorphic function `f = Φ_μ φ`. Each such function is recovered
//! exactly from its values on the spectrum of any single `A_h` through a
//! Lagrange-type interpolation series. This crate realizes the construction
//! on finite spectral models.

// `!(x > 0.0)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dense;
pub mod error;
pub mod exec;
pub mod herglotz;
pub mod io;
pub mod jacobi;
pub mod model;
pub mod oscillator;
pub mod perturbation;
pub mod quadrature;
pub mod sampling;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
pub use herglotz::{weyl, weyl_h, xi, xi_norm_sq, PerturbedWeyl, Weyl, XiVector};
pub use model::{Coupling, MeromorphicRep, SampleSet, SpectralModel, StateVector};
pub use perturbation::{
    compression_spectrum, node_weights, perturbed_model, perturbed_spectrum, zeros_of_weyl,
};
