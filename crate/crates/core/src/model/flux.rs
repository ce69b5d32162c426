use alloc::format;
use alloc::vec::Vec;

use super::ReducedModel;
use crate::fields::{ScalarField, SpectralField, SpeciesVector, Torus};
use crate::trajectory::{FluxSeries, Trajectory};
use crate::{Error, Result};

/// Growth and difference exponents of the general nonlinearity together
/// with the truncation range `[0, truncation_level]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearitySpec {
    pub mu: f64,
    pub nu: f64,
    pub truncation_level: f64,
}

impl NonlinearitySpec {
    pub fn new(mu: f64, nu: f64, truncation_level: f64) -> Result<Self> {
        if !(mu > 0.0 && nu > 0.0) {
            return Err(Error::Argument(format!("exponents must be positive, got {mu}, {nu}")));
        }
        Ok(NonlinearitySpec { mu, nu, truncation_level })
    }

    /// The quadratic cross-diffusion flux: `mu = nu = 1`.
    pub fn cross_diffusion(delta: f64) -> Self {
        NonlinearitySpec { mu: 1.0, nu: 1.0, truncation_level: delta }
    }
}

/// `w_i = delta u_i`.
pub fn rescale_state(u: &SpeciesVector, delta: f64) -> Result<SpeciesVector> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Argument(format!("delta must be positive, got {delta}")));
    }
    Ok(u.map(|v| delta * v))
}

/// `u_i = w_i / delta`.
pub fn unrescale_state(w: &SpeciesVector, delta: f64) -> Result<SpeciesVector> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Argument(format!("delta must be positive, got {delta}")));
    }
    Ok(w.map(|v| v / delta))
}

/// Componentwise `max(0, min(delta, w_i))`.
pub fn clamp_species(w: &SpeciesVector, delta: f64) -> SpeciesVector {
    let top = delta.max(0.0);
    w.map(|v| v.clamp(0.0, top))
}

/// Nodal products `F_{i,m}` before dealiasing.
fn raw_fluxes(
    torus: &Torus,
    w: &SpeciesVector,
    model: &ReducedModel,
    truncated: bool,
) -> Result<Vec<Vec<ScalarField>>> {
    let gradients: Vec<Vec<ScalarField>> = w.iter().map(|f| torus.gradient(f)).collect();
    fluxes_from_gradients(w, &gradients, model, truncated)
}

fn fluxes_from_gradients(
    w: &SpeciesVector,
    gradients: &[Vec<ScalarField>],
    model: &ReducedModel,
    truncated: bool,
) -> Result<Vec<Vec<ScalarField>>> {
    let d = w.species_count();
    if model.species_count() != d {
        return Err(Error::Shape(format!(
            "model couples {} species, state has {d}",
            model.species_count()
        )));
    }
    let grid = w.grid();
    let dim = grid.dim();
    let coefficient = if truncated { clamp_species(w, model.delta) } else { w.clone() };
    let alpha = &model.alpha;

    let mut fluxes = Vec::with_capacity(d);
    for i in 0..d {
        // F_i = grad w_i * (sum_j a_ij c_j) - c_i * (sum_j a_ij grad w_j)
        let mut weight = alloc::vec![0.0; grid.len()];
        let mut mixed = alloc::vec![alloc::vec![0.0; grid.len()]; dim];
        for j in (0..d).filter(|&j| j != i) {
            let a = alpha.get(i, j);
            if a == 0.0 {
                continue;
            }
            for (acc, c) in weight.iter_mut().zip(coefficient.species(j).values()) {
                *acc += a * c;
            }
            for m in 0..dim {
                for (acc, g) in mixed[m].iter_mut().zip(gradients[j][m].values()) {
                    *acc += a * g;
                }
            }
        }
        let ci = coefficient.species(i).values();
        let flux = (0..dim)
            .map(|m| {
                let gi = gradients[i][m].values();
                let values = (0..grid.len())
                    .map(|node| gi[node] * weight[node] - ci[node] * mixed[m][node])
                    .collect();
                ScalarField::from_raw(grid, values)
            })
            .collect();
        fluxes.push(flux);
    }
    Ok(fluxes)
}

/// Dealiased fluxes `F_i` (one `n`-component vector field per species).
///
/// With `truncated`, the undifferentiated factors are clamped to
/// `[0, delta]` while the gradients stay untouched.
pub fn nonlinearity(
    torus: &Torus,
    w: &SpeciesVector,
    model: &ReducedModel,
    truncated: bool,
) -> Result<Vec<Vec<ScalarField>>> {
    Ok(raw_fluxes(torus, w, model, truncated)?
        .into_iter()
        .map(|flux| flux.iter().map(|c| torus.dealias(c)).collect())
        .collect())
}

/// Spectral coefficients of `div F_i`, dealiased.
pub fn flux_divergence(
    torus: &Torus,
    w: &SpeciesVector,
    model: &ReducedModel,
    truncated: bool,
) -> Result<Vec<SpectralField>> {
    raw_fluxes(torus, w, model, truncated)?
        .iter()
        .map(|flux| {
            let mut div = torus.divergence_spectral(flux)?;
            torus.dealias_spectral(&mut div);
            Ok(div)
        })
        .collect()
}

/// Same as [`flux_divergence`] for a state held in spectral form.
pub(crate) fn flux_divergence_spectral(
    torus: &Torus,
    state: &[SpectralField],
    model: &ReducedModel,
    truncated: bool,
) -> Result<(SpeciesVector, Vec<SpectralField>)> {
    let w = SpeciesVector::from_raw(state.iter().map(|s| torus.inverse(s)).collect());
    let gradients: Vec<Vec<ScalarField>> = state.iter().map(|s| torus.gradient_spectral(s)).collect();
    let divs = fluxes_from_gradients(&w, &gradients, model, truncated)?
        .iter()
        .map(|flux| {
            let mut div = torus.divergence_spectral(flux)?;
            torus.dealias_spectral(&mut div);
            Ok(div)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((w, divs))
}

/// `F(w(t))` at every stored time of a trajectory.
pub fn flux_series(
    torus: &Torus,
    traj: &Trajectory,
    model: &ReducedModel,
    truncated: bool,
) -> Result<FluxSeries> {
    let fluxes = traj
        .states()
        .iter()
        .map(|state| nonlinearity(torus, state, model, truncated))
        .collect::<Result<Vec<_>>>()?;
    FluxSeries::new(traj.time_grid().clone(), fluxes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_grid, GridSpec};
    use crate::model::{reduce_coefficients, InteractionMatrix, RawCoefficients};
    use core::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TAU: f64 = 2.0 * PI;

    fn smooth_random(grid: GridSpec, seed: u64, offset: f64, amp: f64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<(f64, f64, f64, f64)> = (0..6)
            .map(|_| {
                (
                    rng.gen_range(-3..=3) as f64,
                    rng.gen_range(-3..=3) as f64,
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..TAU),
                )
            })
            .collect();
        ScalarField::from_fn(grid, |x| {
            let y = x.get(1).copied().unwrap_or(0.0);
            offset
                + amp / 6.0
                    * modes
                        .iter()
                        .map(|&(k1, k2, a, ph)| a * libm::cos(TAU * (k1 * x[0] + k2 * y) + ph))
                        .sum::<f64>()
        })
    }

    fn three_species() -> ReducedModel {
        let raw = RawCoefficients::from_upper_triangular(3, &[0.9, 1.1, 1.0]).unwrap();
        reduce_coefficients(&raw).unwrap().with_delta(0.05).unwrap()
    }

    fn state(grid: GridSpec, seed: u64, scale: f64) -> SpeciesVector {
        SpeciesVector::new(
            (0..3).map(|i| smooth_random(grid, seed + i, scale / 3.0, scale / 10.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_and_equal_species_have_zero_flux() {
        let g = make_grid(1, 64).unwrap();
        let torus = Torus::new(g);
        let model = three_species();
        let flat = SpeciesVector::constant(g, 3, 0.01);
        for f in nonlinearity(&torus, &flat, &model, false).unwrap() {
            assert!(f[0].sup_norm() < 1e-15);
        }
        let v = smooth_random(g, 3, 0.01, 0.005);
        let equal = SpeciesVector::new(alloc::vec![v.clone(), v.clone(), v]).unwrap();
        for f in nonlinearity(&torus, &equal, &model, true).unwrap() {
            assert!(f[0].sup_norm() < 1e-15);
        }
    }

    #[test]
    fn two_species_flux_matches_finite_differences() {
        // w1 = a sin(2 pi x) + c, w2 = b cos(2 pi x) + c, alpha_12 = 1:
        // F_1 = w2 w1' - w1 w2', F_2 = -F_1.
        let (a, b, c) = (0.3, -0.2, 0.5);
        let g = make_grid(1, 64).unwrap();
        let torus = Torus::new(g);
        let w1 = |x: f64| a * libm::sin(TAU * x) + c;
        let w2 = |x: f64| b * libm::cos(TAU * x) + c;
        let state = SpeciesVector::new(alloc::vec![
            ScalarField::from_fn(g, |x| w1(x[0])),
            ScalarField::from_fn(g, |x| w2(x[0])),
        ])
        .unwrap();
        let alpha = InteractionMatrix::from_rows(2, alloc::vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let model = ReducedModel::from_alpha(alpha, 1.0).unwrap();
        let flux = nonlinearity(&torus, &state, &model, false).unwrap();
        let h = 1e-4;
        let fd = |f: &dyn Fn(f64) -> f64, x: f64| {
            (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
        };
        for node in 0..g.len() {
            let x = node as f64 * g.spacing();
            let oracle = w2(x) * fd(&w1, x) - w1(x) * fd(&w2, x);
            assert!((flux[0][0].values()[node] - oracle).abs() < 1e-8);
            assert!((flux[1][0].values()[node] + oracle).abs() < 1e-8);
        }
    }

    #[test]
    fn fluxes_cancel_for_symmetric_alpha() {
        for (dim, n) in [(1, 64), (2, 32)] {
            let g = make_grid(dim, n).unwrap();
            let torus = Torus::new(g);
            let model = three_species();
            let w = state(g, 40, 0.05);
            for truncated in [false, true] {
                let flux = nonlinearity(&torus, &w, &model, truncated).unwrap();
                let total = flux[1..].iter().fold(flux[0].clone(), |acc, f| {
                    acc.iter().zip(f).map(|(a, b)| a.add(b).unwrap()).collect()
                });
                for component in &total {
                    assert!(component.sup_norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn untruncated_flux_is_two_homogeneous() {
        let g = make_grid(1, 128).unwrap();
        let torus = Torus::new(g);
        let model = three_species();
        let w = state(g, 7, 0.05);
        let base = nonlinearity(&torus, &w, &model, false).unwrap();
        for lambda in [0.25, 0.5, 0.9] {
            let scaled = nonlinearity(&torus, &w.map(|v| lambda * v), &model, true).unwrap();
            for i in 0..3 {
                let diff = scaled[i][0].sub(&base[i][0].scale(lambda * lambda)).unwrap();
                assert!(diff.sup_norm() < 1e-15);
            }
        }
    }

    #[test]
    fn truncation_only_touches_coefficients() {
        let g = make_grid(1, 64).unwrap();
        let torus = Torus::new(g);
        let model = three_species();
        // Values far outside [0, delta] so the clamp is active.
        let w = state(g, 12, 1.0);
        let clamped = clamp_species(&w, model.delta);
        let truncated = nonlinearity(&torus, &w, &model, true).unwrap();
        let grads: Vec<Vec<ScalarField>> = w.iter().map(|f| torus.gradient(f)).collect();
        for i in 0..3 {
            let expected = (0..g.len())
                .map(|node| {
                    (0..3)
                        .filter(|&j| j != i)
                        .map(|j| {
                            model.alpha.get(i, j)
                                * (clamped.species(j).values()[node] * grads[i][0].values()[node]
                                    - clamped.species(i).values()[node] * grads[j][0].values()[node])
                        })
                        .sum::<f64>()
                })
                .collect();
            let expected = torus.dealias(&ScalarField::new(g, expected).unwrap());
            assert!(truncated[i][0].sub(&expected).unwrap().sup_norm() < 1e-12);
        }
    }

    #[test]
    fn clamp_and_rescale() {
        let g = make_grid(1, 8).unwrap();
        let w = SpeciesVector::new(alloc::vec![ScalarField::new(
            g,
            alloc::vec![-0.01, 0.0, 0.05, 0.1, 0.11, 0.02, 0.03, 0.2]
        )
        .unwrap()])
        .unwrap();
        let c = clamp_species(&w, 0.1);
        assert_eq!(c.species(0).values(), &[0.0, 0.0, 0.05, 0.1, 0.1, 0.02, 0.03, 0.1]);
        assert_eq!(clamp_species(&c, 0.1), c);

        let u = SpeciesVector::constant(g, 3, 1.0 / 3.0);
        let w = rescale_state(&u, 0.1).unwrap();
        assert!(w.total().values().iter().all(|v| (v - 0.1).abs() < 1e-15));
        let back = unrescale_state(&w, 0.1).unwrap();
        assert!(back.sub(&u).unwrap().sup_norm() < 1e-15);
        assert!(rescale_state(&u, 0.0).is_err());
        assert!(NonlinearitySpec::new(0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn divergence_matches_nodal_route() {
        let g = make_grid(2, 16).unwrap();
        let torus = Torus::new(g);
        let model = three_species();
        let w = state(g, 2, 0.05);
        let spectral = flux_divergence(&torus, &w, &model, false).unwrap();
        let nodal = nonlinearity(&torus, &w, &model, false).unwrap();
        for i in 0..3 {
            let direct = torus.divergence(&nodal[i]).unwrap();
            let via = torus.inverse(&spectral[i]);
            assert!(direct.sub(&via).unwrap().sup_norm() < 1e-13);
        }
    }
}
