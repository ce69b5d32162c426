//! Spectral laboratory for cross-diffusion systems with dominant linear
//! diffusion on the periodic torus `T^n = R^n / Z^n` (`n` = 1 or 2).
//!
//! The crate is `no_std` and only needs `alloc`. It provides
//!
//! * [`fields`]: periodic grids, scalar/species fields, FFT-based
//!   differentiation, dealiasing and `L^p` norms;
//! * [`semigroup`]: the exact spectral heat semigroup, Duhamel integrals
//!   with divergence-form forcing, and heat-kernel gradient norms on `R^n`;
//! * [`model`]: reduction of raw cross-diffusion coefficients to the
//!   diffusion-dominant form, the (truncated) flux and a Lipschitz probe;
//! * [`solver`]: an integrating-factor IMEX reference stepper and the
//!   Picard iteration of the mild-solution map;
//! * [`carleson`]: `X^p`/`Y^p` norms over parabolic cylinders, the
//!   maximal-regularity ratio and derivative-decay probes.
//!
//! IO, configuration and the command line live in the `crossdiff-lab`
//! companion crate.
#![no_std]

extern crate alloc;

pub mod carleson;
mod error;
pub mod fields;
pub mod model;
pub mod semigroup;
pub mod solver;
pub mod trajectory;

pub use error::{Error, Result};
pub use fields::{make_grid, GridSpec, ScalarField, SpectralField, SpeciesVector, Torus};
pub use trajectory::{FluxSeries, Scheme, Trajectory};
