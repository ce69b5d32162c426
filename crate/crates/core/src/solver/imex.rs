use alloc::vec::Vec;

use crate::fields::{SpectralField, SpeciesVector, Torus};
use crate::model::{flux_divergence_spectral, ReducedModel};
use crate::semigroup::TimeGrid;
use crate::trajectory::{Scheme, Trajectory};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImexOptions {
    /// Largest substep; `None` means `0.25 * spacing^2`.
    pub dt_max: Option<f64>,
    /// Abort once the sup norm exceeds this multiple of the initial one.
    pub blowup_factor: f64,
}

impl Default for ImexOptions {
    fn default() -> Self {
        ImexOptions { dt_max: None, blowup_factor: 10.0 }
    }
}

/// First-order IMEX Euler with exact diffusion:
/// `w <- e^{dt Laplacian} (w + dt div F(w))`.
///
/// Every interval of `tg` is split into equal substeps no longer than
/// `dt_max`, so the stored states fall exactly on the grid times.
pub fn imex_solve(
    h: &SpeciesVector,
    model: &ReducedModel,
    tg: &TimeGrid,
    truncated: bool,
    options: &ImexOptions,
) -> Result<Trajectory> {
    let grid = h.grid();
    let torus = Torus::new(grid);
    let dt_max = options.dt_max.unwrap_or(0.25 * grid.spacing() * grid.spacing());
    if dt_max.is_nan() || dt_max <= 0.0 {
        return Err(Error::Argument("dt_max must be positive".into()));
    }
    let limit = options.blowup_factor * h.sup_norm();
    let times = tg.times();

    let mut state: Vec<SpectralField> = h.iter().map(|f| torus.forward(f)).collect();
    let mut states = Vec::with_capacity(times.len());
    states.push(h.clone());
    let mut cached: Option<(f64, Vec<f64>)> = None;

    for k in 1..times.len() {
        let span = times[k] - times[k - 1];
        let substeps = libm::ceil(span / dt_max * (1.0 - 1e-12)).max(1.0) as usize;
        let dt = span / substeps as f64;
        let factors = match &cached {
            Some((c, f)) if *c == dt => f.clone(),
            _ => {
                let f = torus.heat_factors(dt);
                cached = Some((dt, f.clone()));
                f
            }
        };
        for s in 0..substeps {
            let (w, divs) = flux_divergence_spectral(&torus, &state, model, truncated)?;
            check_growth(&w, limit, times[k - 1] + s as f64 * dt)?;
            for (acc, div) in state.iter_mut().zip(&divs) {
                acc.add_scaled(dt, div);
                crate::fields::torus_apply_factors(acc, &factors);
            }
        }
        let w = SpeciesVector::from_raw(state.iter().map(|s| torus.inverse(s)).collect());
        check_growth(&w, limit, times[k])?;
        states.push(w);
    }
    Ok(Trajectory::new(tg.clone(), states, Scheme::Imex)?.with_model(model.clone(), truncated))
}

fn check_growth(w: &SpeciesVector, limit: f64, time: f64) -> Result<()> {
    let sup = w
        .iter()
        .flat_map(|f| f.values())
        .fold(0.0_f64, |m, v| if v.is_finite() { m.max(v.abs()) } else { f64::INFINITY });
    if sup > limit {
        return Err(Error::Diverged { time, sup });
    }
    Ok(())
}
