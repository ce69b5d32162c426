//! Solvers for `w_t - Laplacian w = div F(w, grad w)`: an integrating-factor
//! IMEX reference stepper and Picard iteration of the mild-solution map
//! `T[h, w]`, plus the data-to-solution stability experiment.

mod imex;
mod picard;

pub use crate::trajectory::{Scheme, Trajectory};
pub use imex::{imex_solve, ImexOptions};
pub use picard::{
    apply_t, apply_t_with, picard_solve, stability_experiment, ContractionReport, PicardMetric, PicardOptions,
    StabilityReport,
};
