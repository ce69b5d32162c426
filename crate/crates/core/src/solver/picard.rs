use alloc::vec::Vec;

use crate::carleson::{default_exponent, enumerate_cylinders, xp_distance, CylinderLadder, CylinderSpec};
use crate::fields::{SpeciesVector, Torus};
use crate::model::{flux_divergence, ReducedModel};
use crate::semigroup::{duhamel_accumulate, heat_flow, DuhamelQuadrature, TimeGrid};
use crate::trajectory::{Scheme, Trajectory};
use crate::Result;

/// Metric used to compare successive Picard iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PicardMetric {
    /// Sup norm plus Carleson seminorm.
    #[default]
    Full,
    SupOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub truncated: bool,
    pub metric: PicardMetric,
    /// Carleson exponent; `None` means `n + 3`.
    pub p: Option<f64>,
    pub ladder: CylinderLadder,
    pub quadrature: DuhamelQuadrature,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            tol: 1e-12,
            max_iter: 60,
            truncated: true,
            metric: PicardMetric::Full,
            p: None,
            ladder: CylinderLadder::default(),
            quadrature: DuhamelQuadrature::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub iterates: usize,
    /// Distance between iterate `m + 1` and iterate `m`.
    pub distances: Vec<f64>,
    /// Geometric mean of successive distance ratios (0 with fewer than two
    /// positive distances).
    pub theta_hat: f64,
    pub converged: bool,
    /// `||h||_inf > delta`: the smallness hypothesis fails.
    pub data_exceeds_delta: bool,
}

/// `T[h, w]`: the mild solution with datum `h` and forcing `div F(w)`,
/// sampled on the time grid of `w`.
pub fn apply_t(
    h: &SpeciesVector,
    w: &Trajectory,
    model: &ReducedModel,
    truncated: bool,
) -> Result<Trajectory> {
    apply_t_with(h, w, model, truncated, DuhamelQuadrature::default())
}

pub fn apply_t_with(
    h: &SpeciesVector,
    w: &Trajectory,
    model: &ReducedModel,
    truncated: bool,
    quadrature: DuhamelQuadrature,
) -> Result<Trajectory> {
    h.check_shape(w.initial())?;
    let torus = Torus::new(h.grid());
    let traj = duhamel_accumulate(&torus, h, w.time_grid(), Scheme::Picard, quadrature, |k| {
        flux_divergence(&torus, w.state(k), model, truncated).map(Some)
    })?;
    Ok(traj.with_model(model.clone(), truncated))
}

struct Metric {
    kind: PicardMetric,
    p: f64,
    cylinders: Vec<CylinderSpec>,
}

impl Metric {
    fn new(h: &SpeciesVector, tg: &TimeGrid, options: &PicardOptions) -> Result<Self> {
        let cylinders = match options.metric {
            PicardMetric::Full => enumerate_cylinders(h.grid(), tg, &options.ladder)?,
            PicardMetric::SupOnly => Vec::new(),
        };
        let p = options.p.unwrap_or_else(|| default_exponent(h.grid().dim()));
        Ok(Metric { kind: options.metric, p, cylinders })
    }

    fn distance(&self, a: &Trajectory, b: &Trajectory) -> Result<f64> {
        match self.kind {
            PicardMetric::Full => xp_distance(a, b, self.p, &self.cylinders),
            PicardMetric::SupOnly => a.sup_distance(b),
        }
    }
}

fn geometric_ratio(distances: &[f64]) -> f64 {
    let positive: Vec<f64> = distances.iter().copied().take_while(|&d| d > 0.0).collect();
    if positive.len() < 2 {
        return 0.0;
    }
    let first = positive[0];
    let last = positive[positive.len() - 1];
    libm::pow(last / first, 1.0 / (positive.len() - 1) as f64)
}

/// Iterates `w^{m+1} = T[h, w^m]` from the heat flow of `h` until the
/// distance between iterates drops below `tol`.
///
/// Non-convergence is not an error: the last iterate is returned with
/// `converged = false`.
pub fn picard_solve(
    h: &SpeciesVector,
    model: &ReducedModel,
    tg: &TimeGrid,
    options: &PicardOptions,
) -> Result<(Trajectory, ContractionReport)> {
    let torus = Torus::new(h.grid());
    let metric = Metric::new(h, tg, options)?;
    let mut current = heat_flow(&torus, h, tg)?;
    let mut distances = Vec::new();
    let mut converged = false;
    for _ in 0..options.max_iter {
        let next = apply_t_with(h, &current, model, options.truncated, options.quadrature)?;
        let distance = metric.distance(&next, &current)?;
        distances.push(distance);
        current = next;
        if !distance.is_finite() {
            break;
        }
        if distance < options.tol {
            converged = true;
            break;
        }
    }
    let report = ContractionReport {
        iterates: distances.len(),
        theta_hat: geometric_ratio(&distances),
        distances,
        converged,
        data_exceeds_delta: h.sup_norm() > model.delta,
    };
    Ok((current, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub solution_distance: f64,
    pub data_distance: f64,
    /// `||w - w~||_{X^p} / ||h - h~||_inf`, 0 for identical data.
    pub ratio: f64,
    pub converged: bool,
}

/// Solves from `h` and `h_tilde` by Picard iteration and compares.
pub fn stability_experiment(
    h: &SpeciesVector,
    h_tilde: &SpeciesVector,
    model: &ReducedModel,
    tg: &TimeGrid,
    options: &PicardOptions,
) -> Result<StabilityReport> {
    let data_distance = h.sub(h_tilde)?.sup_norm();
    let (w, a) = picard_solve(h, model, tg, options)?;
    let (w_tilde, b) = picard_solve(h_tilde, model, tg, options)?;
    let cylinders = enumerate_cylinders(h.grid(), tg, &options.ladder)?;
    let p = options.p.unwrap_or_else(|| default_exponent(h.grid().dim()));
    let solution_distance = xp_distance(&w, &w_tilde, p, &cylinders)?;
    let ratio = if data_distance > 0.0 { solution_distance / data_distance } else { 0.0 };
    Ok(StabilityReport {
        solution_distance,
        data_distance,
        ratio,
        converged: a.converged && b.converged,
    })
}
