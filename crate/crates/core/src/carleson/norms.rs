use alloc::format;
use alloc::vec::Vec;

use super::cylinders::{ball_offsets, CylinderSpec};
use crate::fields::{GridSpec, SpeciesVector, Torus};
use crate::semigroup::{duhamel_solve, TimeGrid};
use crate::trajectory::{FluxSeries, Trajectory};
use crate::{Error, Result};

/// Cylinder where the seminorm is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attainment {
    pub cylinder: CylinderSpec,
    pub species: usize,
}

/// Outcome of a Carleson scan. For `Y^p` reports `sup_norm` is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub p: f64,
    pub sup_norm: f64,
    pub seminorm: f64,
    pub attained: Option<Attainment>,
    pub scanned: usize,
    /// Cylinders whose time window held no stored time.
    pub skipped: usize,
}

impl NormReport {
    pub fn norm(&self) -> f64 {
        self.sup_norm + self.seminorm
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Argument(format!("Carleson exponent must lie in [1, inf), got {p}")));
    }
    Ok(())
}

/// `|v|^p` at every node for a vector field given by its components.
fn magnitude_power(components: &[crate::fields::ScalarField], p: f64) -> Vec<f64> {
    let len = components[0].values().len();
    (0..len)
        .map(|node| {
            let sq: f64 = components.iter().map(|c| c.values()[node] * c.values()[node]).sum();
            libm::pow(sq, 0.5 * p)
        })
        .collect()
}

/// Time average of `density[k][i]` over the stored times in `[lo, hi]`:
/// trapezoid over the covered span, or the single sample if only one.
fn window_average(
    tg: &TimeGrid,
    density: &[Vec<Vec<f64>>],
    species: usize,
    lo: f64,
    hi: f64,
) -> Option<Vec<f64>> {
    let range = tg.indices_within(lo, hi);
    let times = tg.times();
    match range.len() {
        0 => None,
        1 => Some(density[range.start][species].clone()),
        _ => {
            let len = density[range.start][species].len();
            let mut acc = alloc::vec![0.0; len];
            for k in range.start..range.end - 1 {
                let half = 0.5 * (times[k + 1] - times[k]);
                for ((a, x), y) in
                    acc.iter_mut().zip(&density[k][species]).zip(&density[k + 1][species])
                {
                    *a += half * (x + y);
                }
            }
            let span = times[range.end - 1] - times[range.start];
            acc.iter_mut().for_each(|a| *a /= span);
            Some(acc)
        }
    }
}

fn ball_average(grid: GridSpec, field: &[f64], center: usize, offsets: &[[usize; 2]]) -> f64 {
    let n = grid.points();
    let [c1, c2] = grid.multi_index(center);
    let sum: f64 = match grid.dim() {
        1 => offsets.iter().map(|o| field[(c1 + o[0]) % n]).sum(),
        _ => offsets.iter().map(|o| field[((c1 + o[0]) % n) * n + (c2 + o[1]) % n]).sum(),
    };
    sum / offsets.len() as f64
}

/// Shared scan: `density[k][i][node] = |v_i(t_k, x_node)|^p`.
fn scan(
    grid: GridSpec,
    tg: &TimeGrid,
    p: f64,
    cylinders: &[CylinderSpec],
    density: &[Vec<Vec<f64>>],
) -> Result<NormReport> {
    if cylinders.is_empty() {
        return Err(Error::Config("empty cylinder set".into()));
    }
    if let Some(c) = cylinders.iter().find(|c| c.center_node >= grid.len() || c.radius.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater)) {
        return Err(Error::Config(format!("cylinder {c:?} does not fit the grid")));
    }
    let species = density[0].len();
    let mut order: Vec<usize> = (0..cylinders.len()).collect();
    order.sort_by(|&a, &b| {
        let (ca, cb) = (&cylinders[a], &cylinders[b]);
        ca.radius.total_cmp(&cb.radius).then(ca.center_node.cmp(&cb.center_node))
    });

    let mut best: Option<(f64, Attainment)> = None;
    let mut skipped = 0;
    let mut start = 0;
    while start < order.len() {
        let radius = cylinders[order[start]].radius;
        let end = start + order[start..].iter().take_while(|&&c| cylinders[c].radius == radius).count();
        let (lo, hi) = cylinders[order[start]].window();
        let averages: Option<Vec<Vec<f64>>> =
            (0..species).map(|i| window_average(tg, density, i, lo, hi)).collect();
        match averages {
            None => skipped += end - start,
            Some(averages) => {
                let offsets = ball_offsets(grid, radius);
                for &c in &order[start..end] {
                    let cyl = cylinders[c];
                    for (i, avg) in averages.iter().enumerate() {
                        let mean = ball_average(grid, avg, cyl.center_node, &offsets);
                        let value = radius * libm::pow(mean, 1.0 / p);
                        if best.is_none_or(|(b, _)| value > b) {
                            best = Some((value, Attainment { cylinder: cyl, species: i }));
                        }
                    }
                }
            }
        }
        start = end;
    }
    let (seminorm, attained) = match best {
        Some((v, a)) => (v, Some(a)),
        None => return Err(Error::Config("no cylinder window contains a stored time".into())),
    };
    Ok(NormReport { p, sup_norm: 0.0, seminorm, attained, scanned: cylinders.len(), skipped })
}

/// Spatial gradients of every state, packaged as a flux series.
pub fn gradient_series(traj: &Trajectory) -> Result<FluxSeries> {
    let torus = Torus::new(traj.grid());
    let fluxes = traj
        .states()
        .iter()
        .map(|s| s.iter().map(|f| torus.gradient(f)).collect())
        .collect();
    FluxSeries::new(traj.time_grid().clone(), fluxes)
}

fn flux_density(flux: &FluxSeries, p: f64) -> Vec<Vec<Vec<f64>>> {
    flux.samples()
        .iter()
        .map(|sample| sample.iter().map(|v| magnitude_power(v, p)).collect())
        .collect()
}

/// `sup_{z,R} R (avg_{Q_R(z)} |F|^p)^{1/p}`, maximized over species.
pub fn yp_norm(flux: &FluxSeries, p: f64, cylinders: &[CylinderSpec]) -> Result<NormReport> {
    check_exponent(p)?;
    scan(flux.grid(), flux.time_grid(), p, cylinders, &flux_density(flux, p))
}

/// Carleson seminorm of the gradient; `sup_norm` is filled in as well.
pub fn xp_seminorm(traj: &Trajectory, p: f64, cylinders: &[CylinderSpec]) -> Result<NormReport> {
    check_exponent(p)?;
    let grads = gradient_series(traj)?;
    let mut report = scan(traj.grid(), traj.time_grid(), p, cylinders, &flux_density(&grads, p))?;
    report.sup_norm = traj.sup_norm();
    Ok(report)
}

/// `||w||_{X^p} = ||w||_inf + ||w||_{dot X^p}`.
pub fn xp_norm(traj: &Trajectory, p: f64, cylinders: &[CylinderSpec]) -> Result<f64> {
    Ok(xp_seminorm(traj, p, cylinders)?.norm())
}

/// `||a - b||_{X^p}` for aligned trajectories.
pub fn xp_distance(a: &Trajectory, b: &Trajectory, p: f64, cylinders: &[CylinderSpec]) -> Result<f64> {
    xp_norm(&a.difference(b)?, p, cylinders)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalRegularityReport {
    pub solution: NormReport,
    pub forcing: NormReport,
    pub data_sup: f64,
    pub ratio: f64,
}

/// Solves the linear problem with datum `h` and forcing `div F`, then
/// returns `||w||_{X^p} / (||F||_{Y^p} + ||h||_inf)`.
pub fn maximal_regularity_ratio(
    h: &SpeciesVector,
    forcing: &FluxSeries,
    p: f64,
    cylinders: &[CylinderSpec],
) -> Result<MaximalRegularityReport> {
    let torus = Torus::new(h.grid());
    let w = duhamel_solve(&torus, h, forcing, forcing.time_grid())?;
    let solution = xp_seminorm(&w, p, cylinders)?;
    let forcing_report = yp_norm(forcing, p, cylinders)?;
    let data_sup = h.sup_norm();
    let denominator = forcing_report.seminorm + data_sup;
    if denominator == 0.0 {
        return Err(Error::TrivialProblem);
    }
    Ok(MaximalRegularityReport {
        ratio: solution.norm() / denominator,
        solution,
        forcing: forcing_report,
        data_sup,
    })
}
