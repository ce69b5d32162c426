//! Configuration, initial data, file formats, verification checks and the
//! acceptance battery for the `crossdiff` laboratory. The numerics live in
//! `crossdiff-core`; this crate adds everything that touches the outside
//! world.

pub mod cli;
pub mod config;
pub mod criteria;
pub mod data;
pub mod io;
pub mod suite;
pub mod verify;

pub use config::{Experiment, ExperimentConfig};
pub use data::{generate_initial_data, InitialDataSpec};
pub use verify::{Check, Relation, VerificationReport};
