use super::{flux_series, ReducedModel};
use crate::carleson::{xp_norm, yp_norm, CylinderSpec};
use crate::fields::Torus;
use crate::trajectory::Trajectory;
use crate::Result;

/// Both sides of `||F(v) - F(w)||_{Y^p} <= C d max{|v|, |w|, |v|^2, |w|^2} ||v - w||_{X^p}`
/// (all norms `X^p`, exponents `mu = nu = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzReport {
    pub lhs: f64,
    pub v_norm: f64,
    pub w_norm: f64,
    pub difference_norm: f64,
    pub rhs: f64,
    /// `lhs / rhs`, or 0 when `rhs` vanishes.
    pub constant: f64,
}

pub fn lipschitz_probe(
    v: &Trajectory,
    w: &Trajectory,
    model: &ReducedModel,
    truncated: bool,
    p: f64,
    cylinders: &[CylinderSpec],
) -> Result<LipschitzReport> {
    let torus = Torus::new(v.grid());
    let fv = flux_series(&torus, v, model, truncated)?;
    let fw = flux_series(&torus, w, model, truncated)?;
    let lhs = yp_norm(&fv.difference(&fw)?, p, cylinders)?.seminorm;
    let v_norm = xp_norm(v, p, cylinders)?;
    let w_norm = xp_norm(w, p, cylinders)?;
    let difference_norm = xp_norm(&v.difference(w)?, p, cylinders)?;
    let growth = v_norm.max(w_norm).max(v_norm * v_norm).max(w_norm * w_norm);
    let rhs = model.species_count() as f64 * growth * difference_norm;
    let constant = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(LipschitzReport { lhs, v_norm, w_norm, difference_norm, rhs, constant })
}
