//! Exact heat semigroup on the torus, mild-solution (Duhamel) integrals with
//! divergence-form forcing, and gradient norms of the full-space heat kernel.

mod duhamel;
mod kernel;
mod timegrid;

pub use duhamel::{duhamel_solve, duhamel_solve_with, heat_flow, heat_propagate, DuhamelQuadrature};
pub(crate) use duhamel::duhamel_accumulate;
pub use kernel::{
    kernel_gradient_lp, kernel_gradient_max, kernel_scaling_exponent, kernel_scaling_report,
    KernelEstimateReport, KernelSample, KERNEL_SPREAD_LIMIT,
};
pub use timegrid::{DyadicRefinement, TimeGrid};
