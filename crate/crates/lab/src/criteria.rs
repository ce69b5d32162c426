//! Measurements behind the acceptance battery. Each function returns named
//! checks whose thresholds are the constants in [`limits`].

use std::f64::consts::{PI, TAU};

use anyhow::{ensure, Context, Result};
use crossdiff_core::carleson::{
    decay_probe, enumerate_cylinders, gradient_series, maximal_regularity_ratio, xp_distance,
    xp_norm, xp_seminorm, yp_norm, CylinderLadder, CylinderSpec,
};
use crossdiff_core::model::{flux_series, lipschitz_probe, InteractionMatrix, ReducedModel};
use crossdiff_core::semigroup::{
    heat_flow, heat_propagate, kernel_gradient_lp, kernel_scaling_report, TimeGrid,
};
use crossdiff_core::solver::{imex_solve, picard_solve, ImexOptions, PicardOptions};
use crossdiff_core::{
    make_grid, FluxSeries, GridSpec, ScalarField, Scheme, SpeciesVector, Torus, Trajectory,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Experiment;
use crate::data::{generate_initial_data, rebalanced_perturbation, BandLimited, InitialDataSpec};
use crate::verify::{
    energy_identity_probe, partition_defect, verify_nonnegativity, verify_partition, Check,
    Relation,
};

pub mod limits {
    pub const KERNEL_SPREAD: f64 = 1.02;
    pub const KERNEL_ORACLE_REL: f64 = 1e-3;
    pub const SPECTRAL_EXACTNESS: f64 = 1e-12;
    pub const PARTITION: f64 = 1e-10;
    pub const NEGATIVITY_FLOOR: f64 = -1e-8;
    pub const COERCIVITY: f64 = 0.5;
    pub const PICARD_VS_IMEX_REL: f64 = 1e-3;
    /// The refined IMEX oracle uses substeps this many times shorter.
    pub const IMEX_ORACLE_REFINEMENT: f64 = 4.0;
    pub const STABILITY_SPREAD: f64 = 10.0;
    pub const STABILITY_HALVING: f64 = 0.2;
    pub const DECAY_SLOPE: f64 = -0.5;
    pub const DECAY_SLOPE_TOL: f64 = 0.1;
    pub const DECAY_WINDOW: (f64, f64) = (1e-4, 1e-2);
    pub const REFINEMENT_CHANGE: f64 = 0.2;
    pub const IDENTITY_REL: f64 = 1e-12;
    pub const TRIANGLE_SLACK: f64 = 1e-10;
    pub const ASYMMETRIC_DEVIATION: f64 = 1e-4;
}

/// Sample sizes and magnitudes of the randomized criteria.
pub mod sizes {
    pub const CONTRACTION_DELTAS: [f64; 3] = [0.05, 0.02, 0.01];
    pub const PARTITION_DELTA: f64 = 0.05;
    pub const STABILITY_DELTA: f64 = 0.02;
    pub const STABILITY_PAIRS: usize = 10;
    pub const STABILITY_EPS: f64 = 1e-4;
    pub const LINEAR_PROBLEMS: usize = 20;
    pub const LIPSCHITZ_PAIRS: usize = 20;
    pub const LIPSCHITZ_AMPLITUDE: f64 = 0.02;
    pub const NEGATIVE_CONTROL_DELTA: f64 = 0.05;
}

/// Shared inputs for all criteria, taken from a validated experiment.
#[derive(Debug, Clone)]
pub struct Battery {
    pub grid: GridSpec,
    pub model: ReducedModel,
    pub time_grid: TimeGrid,
    pub p: f64,
    pub ladder: CylinderLadder,
    pub seed: u64,
    pub band: usize,
    pub step_width: f64,
}

impl Battery {
    pub fn new(exp: &Experiment, seed: u64, band: usize, step_width: f64) -> Self {
        Battery {
            grid: exp.grid,
            model: exp.model.clone(),
            time_grid: exp.time_grid.clone(),
            p: exp.p,
            ladder: exp.ladder,
            seed,
            band,
            step_width,
        }
    }

    fn species(&self) -> usize {
        self.model.species_count()
    }

    fn refined_grid(&self) -> Result<GridSpec> {
        Ok(make_grid(self.grid.dim(), 2 * self.grid.points())?)
    }

    fn cylinders(&self, grid: GridSpec) -> Result<Vec<CylinderSpec>> {
        Ok(enumerate_cylinders(grid, &self.time_grid, &self.ladder)?)
    }

    fn picard_options(&self) -> PicardOptions {
        PicardOptions { p: Some(self.p), ladder: self.ladder, ..Default::default() }
    }

    fn simplex(&self, grid: GridSpec, delta: f64, seed: u64) -> Result<SpeciesVector> {
        let spec = InitialDataSpec::RandomSimplex { seed, band: self.band };
        generate_initial_data(&spec, grid, self.species(), delta)
    }
}

fn relative_change(coarse: f64, fine: f64) -> f64 {
    (fine - coarse).abs() / coarse.abs()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

fn all_finite(values: &[f64]) -> bool {
    values.iter().all(|v| v.is_finite())
}

/// `||grad Phi(t)||_p / t^{exponent}` over log-spaced `t` in `[1e-3, 1]`.
pub fn kernel_scaling() -> Result<Vec<Check>> {
    let times: Vec<f64> = (0..=12).map(|k| 10f64.powf(-3.0 + 0.25 * k as f64)).collect();
    let mut checks = Vec::new();
    for dim in [1, 2] {
        for p in [1.0, 2.0, f64::INFINITY] {
            let report = kernel_scaling_report(dim, p, &times)?;
            checks.push(Check::new(
                format!("n={dim} p={p}: ratio max/min"),
                report.spread(),
                Relation::AtMost,
                limits::KERNEL_SPREAD,
            ));
        }
    }
    let value = kernel_gradient_lp(1.0, 1.0, 1)?;
    checks.push(Check::new(
        "n=1 p=1 t=1 relative error vs 1/sqrt(pi)",
        relative_change(1.0 / PI.sqrt(), value),
        Relation::AtMost,
        limits::KERNEL_ORACLE_REL,
    ));
    Ok(checks)
}

/// Single Fourier modes against `exp(-4 pi^2 |k|^2 t)`, and `S(t)S(s) = S(t+s)`.
pub fn spectral_exactness(battery: &Battery) -> Result<Vec<Check>> {
    let grid = battery.grid;
    let torus = Torus::new(grid);
    let half = grid.points() as i64 / 2;
    let mut wave_vectors: Vec<[i64; 2]> = vec![[0, 0], [1, 0], [3, 0], [half / 2, 0], [half - 1, 0]];
    if grid.dim() == 2 {
        wave_vectors.extend([[0, 1], [2, -3], [half - 1, half / 3]]);
    }
    let times = [1e-5, 1e-3, 0.1, 1.0];
    let mut mode_error: f64 = 0.0;
    for k in &wave_vectors {
        let phase = |x: &[f64]| TAU * (k[0] as f64 * x[0] + k[1] as f64 * x.get(1).copied().unwrap_or(0.0));
        let mode = ScalarField::from_fn(grid, |x| phase(x).cos() + 0.5 * phase(x).sin());
        let rate = 4.0 * PI * PI * ((k[0] * k[0] + k[1] * k[1]) as f64);
        for &t in &times {
            let evolved = heat_propagate(&torus, &mode, t)?;
            let exact = mode.scale((-rate * t).exp());
            mode_error = mode_error.max(evolved.sub(&exact)?.sup_norm());
        }
    }
    let field = BandLimited::random(grid.dim(), 8, battery.seed).sample(grid);
    let mut composition: f64 = 0.0;
    for (s, t) in [(1e-4, 3e-4), (0.01, 0.02), (0.25, 0.5)] {
        let twice = heat_propagate(&torus, &heat_propagate(&torus, &field, s)?, t)?;
        let once = heat_propagate(&torus, &field, s + t)?;
        composition = composition.max(twice.sub(&once)?.sup_norm());
    }
    Ok(vec![
        Check::new("single modes: max error", mode_error, Relation::AtMost, limits::SPECTRAL_EXACTNESS),
        Check::new("semigroup composition: max error", composition, Relation::AtMost, limits::SPECTRAL_EXACTNESS),
    ])
}

/// Partition, sign and coercivity along IMEX and Picard runs.
pub fn partition_of_unity(battery: &Battery) -> Result<Vec<Check>> {
    let delta = sizes::PARTITION_DELTA;
    let model = battery.model.with_delta(delta)?;
    let h = battery.simplex(battery.grid, delta, battery.seed)?;
    let imex = imex_solve(&h, &model, &battery.time_grid, true, &ImexOptions::default())?;
    let (picard, report) = picard_solve(&h, &model, &battery.time_grid, &battery.picard_options())?;
    let mut checks = Vec::new();
    for (name, traj) in [("imex", &imex), ("picard", &picard)] {
        let mut partition = verify_partition(traj, delta, limits::PARTITION);
        partition.name = format!("{name}: {}", partition.name);
        let mut sign = verify_nonnegativity(traj, limits::NEGATIVITY_FLOOR);
        sign.name = format!("{name}: {}", sign.name);
        let energy = energy_identity_probe(traj, &model)?;
        checks.push(partition);
        checks.push(sign);
        checks.push(Check::new(
            format!("{name}: min coercivity factor"),
            energy.coercivity_min,
            Relation::AtLeast,
            limits::COERCIVITY,
        ));
    }
    checks.push(Check::flag("picard converged", report.converged));
    Ok(checks)
}

/// Measured contraction data for one `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionSample {
    pub delta: f64,
    pub theta: f64,
    pub distances: Vec<f64>,
    pub converged: bool,
    /// Relative sup distance to the refined IMEX run.
    pub imex_rel: f64,
}

pub fn contraction_samples(battery: &Battery) -> Result<Vec<ContractionSample>> {
    let grid = battery.grid;
    let dt = 0.25 * grid.spacing() * grid.spacing() / limits::IMEX_ORACLE_REFINEMENT;
    sizes::CONTRACTION_DELTAS
        .iter()
        .map(|&delta| {
            let model = battery.model.with_delta(delta)?;
            let h = battery.simplex(grid, delta, battery.seed)?;
            let (w, report) = picard_solve(&h, &model, &battery.time_grid, &battery.picard_options())?;
            let options = ImexOptions { dt_max: Some(dt), ..Default::default() };
            let imex = imex_solve(&h, &model, &battery.time_grid, true, &options)?;
            Ok(ContractionSample {
                delta,
                theta: report.theta_hat,
                distances: report.distances,
                converged: report.converged,
                imex_rel: w.sup_distance(&imex)? / imex.sup_norm(),
            })
        })
        .collect()
}

pub fn contraction(battery: &Battery) -> Result<Vec<Check>> {
    let samples = contraction_samples(battery)?;
    let mut checks = Vec::new();
    for s in &samples {
        let worst_ratio = max_of(s.distances.windows(2).map(|w| w[1] / w[0]));
        checks.push(Check::flag(format!("delta={}: converged", s.delta), s.converged));
        checks.push(Check::new(format!("delta={}: theta", s.delta), s.theta, Relation::Below, 1.0));
        checks.push(Check::new(
            format!("delta={}: largest successive distance ratio", s.delta),
            worst_ratio,
            Relation::Below,
            1.0,
        ));
        checks.push(Check::new(
            format!("delta={}: relative distance to refined imex", s.delta),
            s.imex_rel,
            Relation::AtMost,
            limits::PICARD_VS_IMEX_REL,
        ));
    }
    // Deltas are listed in decreasing order.
    let monotone = samples.windows(2).all(|w| w[1].theta <= w[0].theta);
    checks.push(Check::flag("theta non-increasing as delta decreases", monotone));
    Ok(checks)
}

/// Stability ratios at full and halved perturbation size, one per pair.
pub fn stability_ratios(battery: &Battery) -> Result<(Vec<f64>, Vec<f64>)> {
    let delta = sizes::STABILITY_DELTA;
    let model = battery.model.with_delta(delta)?;
    let tg = &battery.time_grid;
    let options = battery.picard_options();
    let cylinders = battery.cylinders(battery.grid)?;
    let h = battery.simplex(battery.grid, delta, battery.seed)?;
    let (w, report) = picard_solve(&h, &model, tg, &options)?;
    ensure!(report.converged, "reference Picard run did not converge");
    let d = battery.species();
    let mut rng = ChaCha8Rng::seed_from_u64(battery.seed ^ 0x5eed);
    let mut full = Vec::new();
    let mut halved = Vec::new();
    for _ in 0..sizes::STABILITY_PAIRS {
        let k = rng.gen_range(1..=4);
        let phase = rng.gen_range(0.0..TAU);
        let a = rng.gen_range(0..d);
        let b = (a + rng.gen_range(1..d)) % d;
        for (eps, out) in [(sizes::STABILITY_EPS, &mut full), (sizes::STABILITY_EPS / 2.0, &mut halved)] {
            let h_tilde = rebalanced_perturbation(&h, eps, k, phase, a, b)?;
            let (w_tilde, r) = picard_solve(&h_tilde, &model, tg, &options)?;
            ensure!(r.converged, "perturbed Picard run did not converge");
            let data = h.sub(&h_tilde)?.sup_norm();
            out.push(xp_distance(&w, &w_tilde, battery.p, &cylinders)? / data);
        }
    }
    Ok((full, halved))
}

pub fn stability(battery: &Battery) -> Result<Vec<Check>> {
    let (full, halved) = stability_ratios(battery)?;
    let spread = max_of(full.iter().copied()) / min_of(full.iter().copied());
    let halving = max_of(full.iter().zip(&halved).map(|(a, b)| relative_change(*a, *b)));
    Ok(vec![
        Check::flag("all ratios finite and positive", all_finite(&full) && all_finite(&halved) && min_of(full.iter().copied()) > 0.0),
        Check::new("max/min ratio across pairs", spread, Relation::Below, limits::STABILITY_SPREAD),
        Check::new("largest relative change when eps is halved", halving, Relation::Below, limits::STABILITY_HALVING),
    ])
}

/// Fitted slope and `max_t sqrt(t) |grad w| / |h|` for step-like data on `grid`.
pub fn gradient_decay_at(battery: &Battery, grid: GridSpec) -> Result<(f64, f64)> {
    let spec = InitialDataSpec::StepLike { width: battery.step_width };
    let h = generate_initial_data(&spec, grid, battery.species(), battery.model.delta)?;
    let traj = imex_solve(&h, &battery.model, &battery.time_grid, true, &ImexOptions::default())?;
    let beta: Vec<usize> = (0..grid.dim()).map(|m| usize::from(m == 0)).collect();
    let probe = decay_probe(&traj, 0, &beta, Some(limits::DECAY_WINDOW))?;
    let slope = probe.slope.context("no samples in the decay fit window")?;
    Ok((slope, probe.max_scaled / h.sup_norm()))
}

pub fn gradient_decay(battery: &Battery) -> Result<Vec<Check>> {
    let (slope, coarse) = gradient_decay_at(battery, battery.grid)?;
    let (fine_slope, fine) = gradient_decay_at(battery, battery.refined_grid()?)?;
    let (lo, hi) = limits::DECAY_WINDOW;
    Ok(vec![
        Check::new(
            format!("|slope + 0.5| on [{lo:e}, {hi:e}] (slope {slope:.4}, refined {fine_slope:.4})"),
            (slope - limits::DECAY_SLOPE).abs(),
            Relation::AtMost,
            limits::DECAY_SLOPE_TOL,
        ),
        Check::new(
            format!("relative change of max sqrt(t)|grad w|/|h| under N->2N ({coarse:.4} -> {fine:.4})"),
            relative_change(coarse, fine),
            Relation::Below,
            limits::REFINEMENT_CHANGE,
        ),
    ])
}

/// Random linear problem `F = A(x) e^{-t} + B(x) t` with datum `h`; the same
/// continuous problem on every grid.
fn linear_problem(battery: &Battery, grid: GridSpec, seed: u64) -> (SpeciesVector, FluxSeries) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = battery.species();
    let n = grid.dim();
    let size_a = 10f64.powf(rng.gen_range(-2.0..0.0));
    let size_b = 10f64.powf(rng.gen_range(-2.0..0.0));
    let size_h = 10f64.powf(rng.gen_range(-2.0..0.0));
    let mut draw = |scale: f64| {
        let shape = BandLimited::random(n, battery.band, rng.gen());
        shape.sample(grid).scale(scale)
    };
    let a: Vec<Vec<ScalarField>> = (0..d).map(|_| (0..n).map(|_| draw(size_a)).collect()).collect();
    let b: Vec<Vec<ScalarField>> = (0..d).map(|_| (0..n).map(|_| draw(size_b)).collect()).collect();
    let h = SpeciesVector::new((0..d).map(|_| draw(size_h)).collect()).expect("same grid");
    let forcing = FluxSeries::from_fn(battery.time_grid.clone(), |t| {
        a.iter()
            .zip(&b)
            .map(|(fa, fb)| {
                fa.iter()
                    .zip(fb)
                    .map(|(ca, cb)| {
                        let mut c = ca.scale((-t).exp());
                        c.axpy(t, cb).expect("same grid");
                        c
                    })
                    .collect()
            })
            .collect()
    })
    .expect("aligned samples");
    (h, forcing)
}

/// Largest maximal-regularity ratio over the seeded problems on `grid`.
pub fn maximal_regularity_max(battery: &Battery, grid: GridSpec) -> Result<f64> {
    let cylinders = battery.cylinders(grid)?;
    let mut ratios = Vec::new();
    for j in 0..sizes::LINEAR_PROBLEMS {
        let (h, forcing) = linear_problem(battery, grid, battery.seed * 7919 + j as u64);
        ratios.push(maximal_regularity_ratio(&h, &forcing, battery.p, &cylinders)?.ratio);
    }
    ensure!(all_finite(&ratios), "non-finite maximal regularity ratio");
    Ok(max_of(ratios))
}

pub fn maximal_regularity(battery: &Battery) -> Result<Vec<Check>> {
    let coarse = maximal_regularity_max(battery, battery.grid)?;
    let fine = maximal_regularity_max(battery, battery.refined_grid()?)?;
    Ok(vec![
        Check::flag(format!("max ratio finite ({coarse:.4})"), coarse.is_finite() && coarse > 0.0),
        Check::new(
            format!("relative change of max ratio under N->2N ({coarse:.4} -> {fine:.4})"),
            relative_change(coarse, fine),
            Relation::Below,
            limits::REFINEMENT_CHANGE,
        ),
    ])
}

fn random_heat_flow(battery: &Battery, grid: GridSpec, seed: u64) -> Result<Trajectory> {
    let d = battery.species();
    let fields = (0..d)
        .map(|i| {
            let shape = BandLimited::random(grid.dim(), battery.band, seed * 31 + i as u64);
            shape.sample(grid).scale(sizes::LIPSCHITZ_AMPLITUDE)
        })
        .collect();
    let h = SpeciesVector::new(fields)?;
    Ok(heat_flow(&Torus::new(grid), &h, &battery.time_grid)?)
}

/// Largest empirical Lipschitz constant over the seeded pairs on `grid`,
/// and the smallest finite constant of the `w = 0` specialization.
pub fn lipschitz_constants(battery: &Battery, grid: GridSpec) -> Result<(f64, f64)> {
    let cylinders = battery.cylinders(grid)?;
    let zero_data = SpeciesVector::constant(grid, battery.species(), 0.0);
    let zero = heat_flow(&Torus::new(grid), &zero_data, &battery.time_grid)?;
    let mut constants = Vec::new();
    let mut zero_constants = Vec::new();
    for j in 0..sizes::LIPSCHITZ_PAIRS as u64 {
        let v = random_heat_flow(battery, grid, battery.seed * 104_729 + 2 * j)?;
        let w = random_heat_flow(battery, grid, battery.seed * 104_729 + 2 * j + 1)?;
        constants.push(lipschitz_probe(&v, &w, &battery.model, false, battery.p, &cylinders)?.constant);
        zero_constants.push(lipschitz_probe(&v, &zero, &battery.model, false, battery.p, &cylinders)?.constant);
    }
    ensure!(all_finite(&constants) && all_finite(&zero_constants), "non-finite Lipschitz constant");
    Ok((max_of(constants), max_of(zero_constants)))
}

pub fn lipschitz(battery: &Battery) -> Result<Vec<Check>> {
    let (coarse, zero) = lipschitz_constants(battery, battery.grid)?;
    let (fine, _) = lipschitz_constants(battery, battery.refined_grid()?)?;
    Ok(vec![
        Check::flag(format!("max constant finite ({coarse:.4})"), coarse.is_finite() && coarse > 0.0),
        Check::new(
            format!("relative change of max constant under N->2N ({coarse:.4} -> {fine:.4})"),
            relative_change(coarse, fine),
            Relation::Below,
            limits::REFINEMENT_CHANGE,
        ),
        Check::flag(format!("w=0 bound holds with finite constant ({zero:.4})"), zero.is_finite() && zero > 0.0),
    ])
}

fn negated(traj: &Trajectory) -> Result<Trajectory> {
    let states = traj.states().iter().map(|s| s.map(|v| -v)).collect();
    Ok(Trajectory::new(traj.time_grid().clone(), states, Scheme::Synthetic)?)
}

/// Gradient-as-flux identity, Jensen monotonicity and the triangle inequality.
pub fn norm_identities(battery: &Battery) -> Result<Vec<Check>> {
    let grid = battery.grid;
    let cylinders = battery.cylinders(grid)?;
    let torus = Torus::new(grid);
    let p = battery.p;
    let mut identity: f64 = 0.0;
    let mut jensen: f64 = f64::NEG_INFINITY;
    let mut triangle: f64 = f64::NEG_INFINITY;
    for j in 0..5u64 {
        let a = random_heat_flow(battery, grid, battery.seed * 3 + 1000 + 2 * j)?;
        let b = random_heat_flow(battery, grid, battery.seed * 3 + 1001 + 2 * j)?;

        let x = xp_seminorm(&a, p, &cylinders)?.seminorm;
        let y = yp_norm(&gradient_series(&a)?, p, &cylinders)?.seminorm;
        identity = identity.max(relative_change(x, y));

        let flux = flux_series(&torus, &a, &battery.model, false)?;
        for f in [&flux, &gradient_series(&b)?] {
            let y1 = yp_norm(f, 1.0, &cylinders)?.seminorm;
            let yp = yp_norm(f, p, &cylinders)?.seminorm;
            jensen = jensen.max(y1 - yp);
        }

        let sum = a.difference(&negated(&b)?)?;
        let lhs = xp_norm(&sum, p, &cylinders)?;
        let rhs = xp_norm(&a, p, &cylinders)? + xp_norm(&b, p, &cylinders)?;
        triangle = triangle.max(lhs - rhs);
    }
    Ok(vec![
        Check::new("max relative gap |grad w|_Y vs |w|_X", identity, Relation::AtMost, limits::IDENTITY_REL),
        Check::new("max of |F|_Y1 - |F|_Yp", jensen, Relation::AtMost, 0.0),
        Check::new("max of |a+b|_X - |a|_X - |b|_X", triangle, Relation::AtMost, limits::TRIANGLE_SLACK),
    ])
}

/// The antisymmetric coupling `alpha_ij = sign(j - i)`.
pub fn asymmetric_alpha(d: usize) -> Result<InteractionMatrix> {
    let entries = (0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            match i.cmp(&j) {
                std::cmp::Ordering::Less => 1.0,
                std::cmp::Ordering::Greater => -1.0,
                std::cmp::Ordering::Equal => 0.0,
            }
        })
        .collect();
    Ok(InteractionMatrix::from_rows(d, entries)?)
}

/// Partition deviation of an IMEX run with asymmetric couplings, and the
/// verdict of the partition check on it.
pub fn negative_controls(battery: &Battery) -> Result<Vec<Check>> {
    let delta = sizes::NEGATIVE_CONTROL_DELTA;
    let model = ReducedModel::from_alpha(asymmetric_alpha(battery.species())?, delta)?;
    let h = battery.simplex(battery.grid, delta, battery.seed)?;
    let traj = imex_solve(&h, &model, &battery.time_grid, true, &ImexOptions::default())?;
    // The defect is transient: diffusion flattens the sum again, so the
    // maximum over [0, T] is what the control measures.
    let deviation = partition_defect(&traj, delta);
    let inner = verify_partition(&traj, delta, limits::PARTITION);

    let oversized = battery.simplex(battery.grid, 4.0 * delta, battery.seed)?;
    let options = PicardOptions { max_iter: 3, ..battery.picard_options() };
    let (_, report) = picard_solve(&oversized, &battery.model.with_delta(delta)?, &battery.time_grid, &options)?;
    Ok(vec![
        Check::new(
            "asymmetric alpha: max partition deviation over [0, T]",
            deviation,
            Relation::Exceeds,
            limits::ASYMMETRIC_DEVIATION,
        ),
        Check::flag(format!("asymmetric alpha: partition check reports failure ({inner})"), !inner.passed),
        Check::flag("oversized data: smallness violation flagged", report.data_exceeds_delta),
    ])
}

pub const TITLES: [&str; 10] = [
    "kernel scaling",
    "spectral exactness",
    "partition of unity",
    "contraction",
    "stability",
    "gradient decay",
    "maximal regularity",
    "lipschitz bound",
    "norm identities",
    "negative controls",
];

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, battery: &Battery) -> Result<Vec<Check>> {
    match id {
        1 => kernel_scaling(),
        2 => spectral_exactness(battery),
        3 => partition_of_unity(battery),
        4 => contraction(battery),
        5 => stability(battery),
        6 => gradient_decay(battery),
        7 => maximal_regularity(battery),
        8 => lipschitz(battery),
        9 => norm_identities(battery),
        10 => negative_controls(battery),
        _ => anyhow::bail!("no criterion {id}"),
    }
    .with_context(|| format!("criterion {id}"))
}
