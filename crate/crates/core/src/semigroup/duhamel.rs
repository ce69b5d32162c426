use alloc::format;
use alloc::vec::Vec;

use crate::fields::{ScalarField, SpectralField, SpeciesVector, Torus};
use crate::semigroup::TimeGrid;
use crate::trajectory::{FluxSeries, Scheme, Trajectory};
use crate::{Error, Result};

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Argument(format!("propagation time must be >= 0, got {t}")));
    }
    Ok(())
}

/// Solves `w_t = Laplacian w` for time `t` exactly on the band-limited
/// interpolant of `field`.
pub fn heat_propagate(torus: &Torus, field: &ScalarField, t: f64) -> Result<ScalarField> {
    check_time(t)?;
    let mut spectral = torus.forward(field);
    let factors = torus.heat_factors(t);
    crate::fields::torus_apply_factors(&mut spectral, &factors);
    Ok(torus.inverse(&spectral))
}

/// Homogeneous heat flow of every species sampled on `tg`.
pub fn heat_flow(torus: &Torus, h: &SpeciesVector, tg: &TimeGrid) -> Result<Trajectory> {
    let d = h.species_count();
    let traj = duhamel_accumulate(torus, h, tg, Scheme::HeatFlow, DuhamelQuadrature::default(), |_| {
        Ok(None)
    })?;
    debug_assert_eq!(traj.species_count(), d);
    Ok(traj)
}

/// Time quadrature of the Duhamel integral over one interval `[t_k, t_k + dt]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuhamelQuadrature {
    /// Plain trapezoid on the integrand `e^{(t-s) Laplacian} G(s)`:
    /// `I <- E(dt) (I + dt/2 G_k) + dt/2 G_{k+1}`. Not damped for stiff
    /// modes, so the Picard map built on it can expand high frequencies.
    Trapezoid,
    /// Product trapezoid: `G` interpolated linearly, the heat factor
    /// integrated exactly per mode. Reduces to the plain rule as
    /// `|k|^2 dt -> 0`.
    #[default]
    ExponentialTrapezoid,
}

/// Mild solution `w(t) = e^{t Laplacian} h + int_0^t e^{(t-s) Laplacian} div F(s) ds`
/// with the default quadrature.
pub fn duhamel_solve(
    torus: &Torus,
    h: &SpeciesVector,
    forcing: &FluxSeries,
    tg: &TimeGrid,
) -> Result<Trajectory> {
    duhamel_solve_with(torus, h, forcing, tg, DuhamelQuadrature::default())
}

/// The homogeneous part is exact at every node; the integral is
/// accumulated one interval at a time, so the cost is linear in the
/// number of steps.
pub fn duhamel_solve_with(
    torus: &Torus,
    h: &SpeciesVector,
    forcing: &FluxSeries,
    tg: &TimeGrid,
    quadrature: DuhamelQuadrature,
) -> Result<Trajectory> {
    if forcing.time_grid() != tg {
        return Err(Error::Shape("forcing is not sampled on the solve time grid".into()));
    }
    if forcing.species_count() != h.species_count() || forcing.grid() != h.grid() {
        return Err(Error::Shape(format!(
            "forcing has {} species on {:?}, datum has {} on {:?}",
            forcing.species_count(),
            forcing.grid(),
            h.species_count(),
            h.grid()
        )));
    }
    duhamel_accumulate(torus, h, tg, Scheme::Duhamel, quadrature, |k| {
        forcing
            .sample(k)
            .iter()
            .map(|flux| torus.divergence_spectral(flux))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    })
}

/// Per-mode weights `(E, a, b)` with `I <- E I + a G_k + b G_{k+1}`.
struct StepWeights {
    decay: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl StepWeights {
    fn new(torus: &Torus, dt: f64, quadrature: DuhamelQuadrature) -> Self {
        let len = torus.grid().len();
        let decay = torus.heat_factors(dt);
        let (left, right) = match quadrature {
            DuhamelQuadrature::Trapezoid => {
                ((0..len).map(|i| 0.5 * dt * decay[i]).collect(), alloc::vec![0.5 * dt; len])
            }
            DuhamelQuadrature::ExponentialTrapezoid => (0..len)
                .map(|i| product_weights(torus.laplacian_eigenvalue(i) * dt, dt))
                .unzip(),
        };
        StepWeights { decay, left, right }
    }
}

/// `int_0^dt e^{-lambda (dt - s)} (1 - s/dt) ds` and `... (s/dt) ds` for
/// `z = lambda dt`.
fn product_weights(z: f64, dt: f64) -> (f64, f64) {
    if z < 1.0 {
        // left = sum (-z)^k / (k! (k+2)), right = sum (-z)^k / (k! (k+1) (k+2)).
        let (mut left, mut right, mut term) = (0.0, 0.0, 1.0);
        for k in 0..18 {
            let kf = k as f64;
            left += term / (kf + 2.0);
            right += term / ((kf + 1.0) * (kf + 2.0));
            term *= -z / (kf + 1.0);
        }
        return (dt * left, dt * right);
    }
    let phi = -libm::expm1(-z) / z;
    (dt * (phi - libm::exp(-z)) / z, dt * (1.0 - phi) / z)
}

fn multiply_add(acc: &mut SpectralField, weights: &[f64], g: &SpectralField) {
    for ((a, w), x) in acc.coeffs_mut().iter_mut().zip(weights).zip(g.coeffs()) {
        *a += *w * *x;
    }
}

/// Shared accumulation loop. `divergence(k)` returns the spectral divergence
/// of every species' flux at `t_k`, or `None` for zero forcing.
pub(crate) fn duhamel_accumulate(
    torus: &Torus,
    h: &SpeciesVector,
    tg: &TimeGrid,
    scheme: Scheme,
    quadrature: DuhamelQuadrature,
    mut divergence: impl FnMut(usize) -> Result<Option<Vec<SpectralField>>>,
) -> Result<Trajectory> {
    let grid = h.grid();
    let d = h.species_count();
    let times = tg.times();
    let h_hat: Vec<SpectralField> = h.iter().map(|f| torus.forward(f)).collect();

    let mut integral: Vec<SpectralField> = alloc::vec![SpectralField::zeros(grid); d];
    let mut states = Vec::with_capacity(times.len());
    states.push(h.clone());

    let mut previous = divergence(0)?;
    check_species(&previous, d)?;
    let mut cached: Option<(f64, StepWeights)> = None;

    for k in 1..times.len() {
        let dt = times[k] - times[k - 1];
        if cached.as_ref().is_none_or(|(c, _)| *c != dt) {
            cached = Some((dt, StepWeights::new(torus, dt, quadrature)));
        }
        let weights = &cached.as_ref().unwrap().1;
        let current = divergence(k)?;
        check_species(&current, d)?;

        for (i, acc) in integral.iter_mut().enumerate() {
            crate::fields::torus_apply_factors(acc, &weights.decay);
            if let Some(prev) = &previous {
                multiply_add(acc, &weights.left, &prev[i]);
            }
            if let Some(cur) = &current {
                multiply_add(acc, &weights.right, &cur[i]);
            }
        }

        let homogeneous = torus.heat_factors(times[k]);
        let fields = (0..d)
            .map(|i| {
                let mut state = h_hat[i].clone();
                crate::fields::torus_apply_factors(&mut state, &homogeneous);
                state.add_scaled(1.0, &integral[i]);
                torus.inverse(&state)
            })
            .collect();
        states.push(SpeciesVector::from_raw(fields));
        previous = current;
    }
    Trajectory::new(tg.clone(), states, scheme)
}

fn check_species(div: &Option<Vec<SpectralField>>, d: usize) -> Result<()> {
    match div {
        Some(v) if v.len() != d => Err(Error::Shape(format!(
            "forcing has {} species, datum has {d}",
            v.len()
        ))),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_grid, GridSpec};
    use crate::semigroup::DyadicRefinement;
    use core::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TAU: f64 = 2.0 * PI;

    fn random_field(grid: GridSpec, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        ScalarField::new(grid, values).unwrap()
    }

    #[test]
    fn heat_of_constant_and_single_mode() {
        let g = make_grid(1, 64).unwrap();
        let torus = Torus::new(g);
        let c = heat_propagate(&torus, &ScalarField::constant(g, 0.7), 3.0).unwrap();
        assert!(c.values().iter().all(|v| (v - 0.7).abs() < 1e-15));

        let s = ScalarField::from_fn(g, |x| libm::sin(TAU * x[0]));
        for t in [0.0, 1e-3, 0.05, 0.3] {
            let out = heat_propagate(&torus, &s, t).unwrap();
            let exact = s.scale(libm::exp(-4.0 * PI * PI * t));
            assert!(out.sub(&exact).unwrap().sup_norm() < 1e-12);
        }
        assert!(matches!(heat_propagate(&torus, &s, -1.0), Err(Error::Argument(_))));
    }

    #[test]
    fn maximum_principle_on_random_data() {
        for (dim, n) in [(1, 128), (2, 32)] {
            let g = make_grid(dim, n).unwrap();
            let torus = Torus::new(g);
            let smooth = heat_propagate(&torus, &random_field(g, 4), 1e-3).unwrap();
            let mut last = smooth.sup_norm();
            for t in [0.01, 0.1, 1.0] {
                let sup = heat_propagate(&torus, &smooth, t).unwrap().sup_norm();
                assert!(sup <= last + 1e-15);
                last = sup;
            }
        }
    }

    #[test]
    fn semigroup_property() {
        let g = make_grid(2, 16).unwrap();
        let torus = Torus::new(g);
        let f = random_field(g, 8);
        let two_steps =
            heat_propagate(&torus, &heat_propagate(&torus, &f, 0.013).unwrap(), 0.029).unwrap();
        let one_step = heat_propagate(&torus, &f, 0.042).unwrap();
        assert!(two_steps.sub(&one_step).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn zero_and_constant_forcing_give_heat_flow() {
        let g = make_grid(1, 64).unwrap();
        let torus = Torus::new(g);
        let tg = TimeGrid::dyadic(0.5, DyadicRefinement { levels: 4, steps_per_level: 4 }).unwrap();
        let h = SpeciesVector::new(alloc::vec![random_field(g, 1), random_field(g, 2)]).unwrap();
        let flow = heat_flow(&torus, &h, &tg).unwrap();

        let zero = FluxSeries::zeros(tg.clone(), g, 2);
        let constant = FluxSeries::from_fn(tg.clone(), |t| {
            alloc::vec![alloc::vec![ScalarField::constant(g, 1.0 + t)]; 2]
        })
        .unwrap();
        for forcing in [zero, constant] {
            let w = duhamel_solve(&torus, &h, &forcing, &tg).unwrap();
            for (k, &t) in tg.times().iter().enumerate() {
                for i in 0..2 {
                    let direct = heat_propagate(&torus, h.species(i), t).unwrap();
                    assert!(w.state(k).species(i).sub(&direct).unwrap().sup_norm() < 1e-12);
                    assert!(flow.state(k).species(i).sub(&direct).unwrap().sup_norm() < 1e-12);
                }
            }
        }
    }

    fn manufactured_error(steps: usize, quadrature: DuhamelQuadrature) -> f64 {
        // h = 0 and div F = (4 pi^2 - 1) e^{-t} sin(2 pi x) give
        // w = (e^{-t} - e^{-4 pi^2 t}) sin(2 pi x).
        let g = make_grid(1, 32).unwrap();
        let torus = Torus::new(g);
        let tg = TimeGrid::uniform(1.0, steps).unwrap();
        let lam = 4.0 * PI * PI;
        let forcing = FluxSeries::from_fn(tg.clone(), |t| {
            let amp = -(lam - 1.0) / TAU * libm::exp(-t);
            alloc::vec![alloc::vec![ScalarField::from_fn(g, |x| amp * libm::cos(TAU * x[0]))]]
        })
        .unwrap();
        let h = SpeciesVector::new(alloc::vec![ScalarField::zeros(g)]).unwrap();
        let w = duhamel_solve_with(&torus, &h, &forcing, &tg, quadrature).unwrap();
        tg.times()
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let exact = ScalarField::from_fn(g, |x| {
                    (libm::exp(-t) - libm::exp(-lam * t)) * libm::sin(TAU * x[0])
                });
                w.state(k).species(0).sub(&exact).unwrap().sup_norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn manufactured_solution_is_second_order() {
        for (quadrature, bound) in
            [(DuhamelQuadrature::Trapezoid, 5e-3), (DuhamelQuadrature::ExponentialTrapezoid, 1e-5)]
        {
            let errors: Vec<f64> =
                [50, 100, 200].iter().map(|&s| manufactured_error(s, quadrature)).collect();
            assert!(errors[2] < bound, "{quadrature:?}: {errors:?}");
            for pair in errors.windows(2) {
                let ratio = pair[0] / pair[1];
                assert!((3.6..4.4).contains(&ratio), "{quadrature:?}: ratio {ratio}, {errors:?}");
            }
        }
    }

    #[test]
    fn product_weights_integrate_constants_exactly() {
        for z in [1e-8, 5e-4, 1.001e-3, 0.3, 0.999, 1.001, 4.0, 80.0] {
            let dt = 0.01;
            let (a, b) = product_weights(z, dt);
            let exact = -libm::expm1(-z) / z * dt;
            assert!(((a + b) - exact).abs() < 1e-14 * dt, "z = {z}");
            assert!(a > 0.0 && b > 0.0 && b >= a);
        }
        // Stiff limit: both weights are O(1/lambda), not O(dt).
        let (a, b) = product_weights(1e4, 1.0);
        assert!(a < 1.1e-8 && (b - 1e-4).abs() < 1e-7);
    }

    #[test]
    fn duhamel_conserves_mass() {
        let g = make_grid(2, 16).unwrap();
        let torus = Torus::new(g);
        let tg = TimeGrid::dyadic(0.2, DyadicRefinement { levels: 3, steps_per_level: 3 }).unwrap();
        let h = SpeciesVector::new(alloc::vec![random_field(g, 5)]).unwrap();
        let forcing = FluxSeries::from_fn(tg.clone(), |t| {
            alloc::vec![alloc::vec![
                random_field(g, (t * 1e6) as u64).scale(10.0),
                random_field(g, (t * 1e6) as u64 + 7),
            ]]
        })
        .unwrap();
        let w = duhamel_solve(&torus, &h, &forcing, &tg).unwrap();
        let m0 = h.species(0).mean();
        for state in w.states() {
            assert!((state.species(0).mean() - m0).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_forcing_is_rejected() {
        let g = make_grid(1, 16).unwrap();
        let torus = Torus::new(g);
        let tg = TimeGrid::uniform(1.0, 4).unwrap();
        let other = TimeGrid::uniform(1.0, 5).unwrap();
        let h = SpeciesVector::constant(g, 2, 0.1);
        let forcing = FluxSeries::zeros(other, g, 2);
        assert!(matches!(duhamel_solve(&torus, &h, &forcing, &tg), Err(Error::Shape(_))));
        let forcing = FluxSeries::zeros(tg.clone(), g, 3);
        assert!(matches!(duhamel_solve(&torus, &h, &forcing, &tg), Err(Error::Shape(_))));
    }
}
