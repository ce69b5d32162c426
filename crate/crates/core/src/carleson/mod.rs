//! Carleson-type norms over parabolic cylinders `Q_R(z) = [R^2/2, R^2] x B_R(z)`,
//! the maximal-regularity ratio, and derivative decay probes.
//!
//! `||w||_{X^p} = ||w||_inf + sup R (avg_{Q_R(z)} |grad w|^p)^{1/p}` and
//! `||F||_{Y^p} = sup R (avg_{Q_R(z)} |F|^p)^{1/p}`, both maximized over
//! species. The supremum runs over a finite ladder of cylinders, so every
//! reported value is a lower bound for the continuum quantity.

mod cylinders;
mod decay;
mod norms;

pub use cylinders::{cylinder_radii, enumerate_cylinders, CylinderLadder, CylinderSpec, MAX_RADIUS};
pub use decay::{decay_probe, DecayProbe, DecaySample};
pub use norms::{
    gradient_series, maximal_regularity_ratio, xp_distance, xp_norm, xp_seminorm, yp_norm,
    Attainment, MaximalRegularityReport, NormReport,
};

/// Default exponent `p = n + 3`.
pub fn default_exponent(dim: usize) -> f64 {
    dim as f64 + 3.0
}
