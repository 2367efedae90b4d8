//! Franck-Condon profiles of molecules under the linear coupling model.
//!
//! Two engines produce the same physical object, a vibronic stick spectrum:
//!
//! - [`sos`] enumerates every vibrational configuration up to a per-mode
//!   cutoff and evaluates its Franck-Condon factor exactly. Cost grows as
//!   `(1 + K)^N`.
//! - [`sampler`] draws per-mode Poisson photon counts (the statistics of an
//!   attenuated coherent source seen by a photon detector), turns each event
//!   into a transition energy and histograms the result. Cost grows as `P * N`.
//!
//! [`fidelity`], [`broaden`] and [`convergence`] compare and present the two.
//!
//! The crate is `no_std` (with `alloc`). The `parallel` feature pulls in `std`
//! and rayon for multi-threaded sampling; results do not depend on the
//! thread count.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod broaden;
pub mod convergence;
mod error;
pub mod fc;
pub mod fidelity;
pub mod model;
pub mod poisson;
pub mod sampler;
pub mod sos;
pub mod spectrum;
pub mod stream;

pub use error::{Error, Result};
pub use model::{
    hr_from_gradient, prune_modes, validate_molecule, GradientInput, Mode, Molecule, Transition,
    VibrationalConfiguration,
};
pub use spectrum::{LineSpectrum, Normalization, Provenance, SampledSpectrum, Stick};
