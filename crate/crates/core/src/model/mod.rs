//! Cross-diffusion coefficients, their reduction to the diffusion-dominant
//! small-data form, and the resulting divergence-form flux
//! `F_i = sum_{j != i} alpha_ij (w_j grad w_i - w_i grad w_j)`.

mod coefficients;
mod flux;
mod lipschitz;

pub use coefficients::{
    reduce_coefficients, reduce_coefficients_with_threshold, InteractionMatrix, RawCoefficients,
    ReducedModel, DEFAULT_CLOSENESS_THRESHOLD,
};
pub use flux::{
    clamp_species, flux_divergence, flux_series, nonlinearity, rescale_state, unrescale_state,
    NonlinearitySpec,
};
pub(crate) use flux::flux_divergence_spectral;
pub use lipschitz::{lipschitz_probe, LipschitzReport};
