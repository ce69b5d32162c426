//! Running experiments and the full battery, with outputs on disk.

use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use crossdiff_core::carleson::{decay_probe, enumerate_cylinders, xp_seminorm, CylinderLadder, NormReport};
use crossdiff_core::solver::{imex_solve, picard_solve, ContractionReport};
use crossdiff_core::Trajectory;

use crate::config::{Experiment, ExperimentConfig, SolverChoice};
use crate::criteria::{run_criterion, Battery, TITLES};
use crate::data::generate_initial_data;
use crate::io;
use crate::verify::{
    energy_identity_probe, mass_drift, verify_nonnegativity, verify_partition, Check, Relation,
    VerificationReport,
};

/// Solves the configured experiment. The contraction report is present for
/// Picard runs.
pub fn solve(exp: &Experiment) -> Result<(Trajectory, Option<ContractionReport>)> {
    let h = generate_initial_data(&exp.data, exp.grid, exp.model.species_count(), exp.model.delta)?;
    match &exp.solver {
        SolverChoice::Picard(options) => {
            let (traj, report) = picard_solve(&h, &exp.model, &exp.time_grid, options)?;
            if report.data_exceeds_delta {
                log::warn!("initial data exceed delta = {}: smallness hypothesis fails", exp.model.delta);
            }
            if !report.converged {
                log::warn!("Picard iteration stopped after {} iterates without converging", report.iterates);
            }
            Ok((traj.with_model(exp.model.clone(), options.truncated), Some(report)))
        }
        SolverChoice::Imex { options, truncated } => {
            let traj = imex_solve(&h, &exp.model, &exp.time_grid, *truncated, options)?;
            Ok((traj, None))
        }
    }
}

/// Invariant checks on a stored trajectory with its model.
pub fn invariant_checks(traj: &Trajectory, tolerance: f64, floor: f64) -> Result<Vec<Check>> {
    let model = traj.model().context("trajectory carries no model")?;
    let energy = energy_identity_probe(traj, model)?;
    Ok(vec![
        verify_partition(traj, model.delta, tolerance),
        verify_nonnegativity(traj, floor),
        Check::new("species mass drift", mass_drift(traj), Relation::AtMost, tolerance),
        Check::new("coercivity factor min", energy.coercivity_min, Relation::AtLeast, 0.5),
        Check::new(
            format!("energy identity residual (rate scale {:.3e})", energy.max_rate.max(energy.max_dissipation)),
            energy.residual,
            Relation::AtMost,
            // Only meaningful as an identity when there is no negative part.
            if traj.min() >= 0.0 { 1e-12 } else { f64::INFINITY },
        ),
    ])
}

/// Solves, stores the trajectory and writes norm and decay reports.
pub fn solve_and_store(config: &ExperimentConfig, dir: &Path) -> Result<(Trajectory, io::Manifest)> {
    let exp = config.validate()?;
    let (traj, report) = solve(&exp)?;
    let hash = config.hash()?;
    let manifest = io::save_trajectory(dir, &traj, &[("config_hash", hash)])?;
    io::write_text(&dir.join("config.toml"), &config.to_toml_string()?)?;
    if let Some(report) = report {
        io::write_text(&dir.join("contraction.csv"), &io::contraction_csv(&report))?;
    }
    write_norm_reports(&traj, exp.p, &exp.ladder, dir, &manifest.hash())?;
    Ok((traj, manifest))
}

/// Writes `norms.csv` and `decay.csv` for a trajectory into `dir`.
pub fn write_norm_reports(
    traj: &Trajectory,
    p: f64,
    ladder: &CylinderLadder,
    dir: &Path,
    hash: &str,
) -> Result<NormReport> {
    let cylinders = enumerate_cylinders(traj.grid(), traj.time_grid(), ladder)?;
    let norms = xp_seminorm(traj, p, &cylinders)?;
    if norms.skipped > 0 {
        log::warn!("{} cylinders skipped for lack of resolved time nodes", norms.skipped);
    }
    io::write_text(&dir.join("norms.csv"), &io::norm_report_csv(&norms, traj.grid(), hash))?;
    let beta: Vec<usize> = (0..traj.grid().dim()).map(|m| usize::from(m == 0)).collect();
    let probe = decay_probe(traj, 0, &beta, None)?;
    io::write_text(&dir.join("decay.csv"), &io::decay_csv(&probe, traj.grid(), hash))?;
    Ok(norms)
}

/// Runs the selected acceptance criteria (all when `only` is empty) and
/// writes `summary.txt` and `report.csv` into `config.output`.
pub fn run_suite(config: &ExperimentConfig, only: &[usize]) -> Result<VerificationReport> {
    let exp = config.validate()?;
    let battery = Battery::new(&exp, config.initial.seed, config.initial.band, config.initial.width);
    let mut report = VerificationReport::new(config.hash()?);
    let ids: Vec<usize> = if only.is_empty() { (1..=TITLES.len()).collect() } else { only.to_vec() };
    for id in ids {
        let title = TITLES.get(id.wrapping_sub(1)).with_context(|| format!("no criterion {id}"))?;
        let start = Instant::now();
        let checks = run_criterion(id, &battery)?;
        log::info!("criterion {id} ({title}) took {:.1?}", start.elapsed());
        report.push(format!("{id}. {title}"), checks);
    }
    io::ensure_dir(&config.output)?;
    io::write_text(&config.output.join("summary.txt"), &report.summary())?;
    io::write_text(&config.output.join("report.csv"), &report.to_csv())?;
    io::write_text(&config.output.join("config.toml"), &config.to_toml_string()?)?;
    Ok(report)
}
