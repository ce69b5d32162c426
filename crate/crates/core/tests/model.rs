mod common;

use common::BandLimited;
use crossdiff_core::carleson::{enumerate_cylinders, CylinderLadder};
use crossdiff_core::model::{
    lipschitz_probe, reduce_coefficients, rescale_state, RawCoefficients, ReducedModel,
};
use crossdiff_core::semigroup::{heat_flow, DyadicRefinement, TimeGrid};
use crossdiff_core::{make_grid, GridSpec, ScalarField, SpeciesVector, Torus, Trajectory};

fn model() -> ReducedModel {
    let raw = RawCoefficients::from_upper_triangular(3, &[0.9, 1.1, 1.0]).unwrap();
    reduce_coefficients(&raw).unwrap().with_delta(0.05).unwrap()
}

fn random_heat_flow(grid: GridSpec, tg: &TimeGrid, seed: u64, size: f64) -> Trajectory {
    let h = SpeciesVector::new(
        (0..3).map(|i| BandLimited::random(grid.dim(), 4, seed * 5 + i).sample(grid).scale(size)).collect(),
    )
    .unwrap();
    heat_flow(&Torus::new(grid), &h, tg).unwrap()
}

#[test]
fn lipschitz_probe_examples() {
    let g = make_grid(1, 64).unwrap();
    let tg = TimeGrid::dyadic(1.0, DyadicRefinement::default()).unwrap();
    let cyl = enumerate_cylinders(g, &tg, &CylinderLadder::default()).unwrap();
    let m = model();
    let v = random_heat_flow(g, &tg, 1, 0.02);

    let same = lipschitz_probe(&v, &v, &m, false, 4.0, &cyl).unwrap();
    assert_eq!(same.lhs, 0.0);
    assert_eq!(same.constant, 0.0);

    let zero = heat_flow(&Torus::new(g), &SpeciesVector::constant(g, 3, 0.0), &tg).unwrap();
    let against_zero = lipschitz_probe(&v, &zero, &m, false, 4.0, &cyl).unwrap();
    assert!(against_zero.constant.is_finite() && against_zero.constant > 0.0);
    assert_eq!(against_zero.w_norm, 0.0);
    let quadratic = against_zero.lhs / (3.0 * against_zero.v_norm.powi(2));
    assert!(quadratic.is_finite() && quadratic > 0.0);

    let constants: Vec<f64> = (0..6)
        .map(|s| {
            let a = random_heat_flow(g, &tg, 10 + s, 0.02);
            let b = random_heat_flow(g, &tg, 40 + s, 0.02);
            lipschitz_probe(&a, &b, &m, false, 4.0, &cyl).unwrap().constant
        })
        .collect();
    assert!(constants.iter().all(|c| c.is_finite() && *c > 0.0));
}

#[test]
fn partition_data_rescales() {
    let g = make_grid(1, 32).unwrap();
    let u = SpeciesVector::new(vec![
        ScalarField::from_fn(g, |x| 0.5 + 0.25 * (std::f64::consts::TAU * x[0]).sin()),
        ScalarField::from_fn(g, |x| 0.5 - 0.25 * (std::f64::consts::TAU * x[0]).sin()),
    ])
    .unwrap();
    let h = rescale_state(&u, 0.04).unwrap();
    assert!(h.total().values().iter().all(|v| (v - 0.04).abs() < 1e-15));
    assert!(h.min() >= 0.0);
}
