use crossdiff_core::model::{reduce_coefficients, InteractionMatrix, RawCoefficients, ReducedModel};
use crossdiff_core::semigroup::{heat_flow, DyadicRefinement, TimeGrid};
use crossdiff_core::solver::{imex_solve, picard_solve, ImexOptions, PicardOptions};
use crossdiff_core::{make_grid, Torus};
use crossdiff_lab::criteria::asymmetric_alpha;
use crossdiff_lab::data::{generate_initial_data, InitialDataSpec};
use crossdiff_lab::verify::{energy_identity_probe, verify_nonnegativity, verify_partition};

fn model(delta: f64) -> ReducedModel {
    let raw = RawCoefficients::from_upper_triangular(3, &[0.98, 1.02, 1.0]).unwrap();
    reduce_coefficients(&raw).unwrap().with_delta(delta).unwrap()
}

fn tg() -> TimeGrid {
    TimeGrid::dyadic(1.0, DyadicRefinement { levels: 6, steps_per_level: 8 }).unwrap()
}

fn simplex(points: usize, delta: f64) -> crossdiff_core::SpeciesVector {
    let g = make_grid(1, points).unwrap();
    generate_initial_data(&InitialDataSpec::RandomSimplex { seed: 5, band: 3 }, g, 3, delta).unwrap()
}

#[test]
fn decoupled_heat_flows_keep_the_partition() {
    let h = simplex(64, 0.1);
    let traj = heat_flow(&Torus::new(h.grid()), &h, &tg()).unwrap();
    assert!(verify_partition(&traj, 0.1, 1e-12).passed);
    let imex = imex_solve(&h, &ReducedModel::from_alpha(InteractionMatrix::zeros(3), 0.1).unwrap(), &tg(), false, &ImexOptions::default()).unwrap();
    assert!(verify_partition(&imex, 0.1, 1e-12).passed);
}

#[test]
fn nonlinear_runs_keep_partition_and_sign() {
    let h = simplex(64, 0.05);
    let m = model(0.05);
    let imex = imex_solve(&h, &m, &tg(), true, &ImexOptions::default()).unwrap();
    let (picard, report) = picard_solve(&h, &m, &tg(), &PicardOptions::default()).unwrap();
    assert!(report.converged);
    for traj in [&imex, &picard] {
        assert!(verify_partition(traj, 0.05, 1e-10).passed);
        assert!(verify_nonnegativity(traj, -1e-8).passed);
        let energy = energy_identity_probe(traj, &m).unwrap();
        assert!(energy.residual <= 1e-12);
        assert!(energy.coercivity_min >= 0.5);
    }
}

#[test]
fn asymmetric_coupling_breaks_the_partition() {
    let h = simplex(64, 0.05);
    let m = ReducedModel::from_alpha(asymmetric_alpha(3).unwrap(), 0.05).unwrap();
    let traj = imex_solve(&h, &m, &tg(), true, &ImexOptions::default()).unwrap();
    let check = verify_partition(&traj, 0.05, 1e-10);
    assert!(!check.passed);
    assert!(check.value > 1e-6, "{check}");
}

#[test]
fn coercivity_holds_whenever_delta_d_is_small() {
    for delta in [0.01, 0.02, 0.0333] {
        let h = simplex(32, delta);
        let traj = imex_solve(&h, &model(delta), &tg(), true, &ImexOptions::default()).unwrap();
        assert!(energy_identity_probe(&traj, &model(delta)).unwrap().coercivity_min >= 0.5);
    }
}
