//! Command-line interface.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use crossdiff_core::carleson::CylinderLadder;

use crate::config::ExperimentConfig;
use crate::io;
use crate::suite::{invariant_checks, run_suite, solve_and_store, write_norm_reports};
use crate::verify::VerificationReport;

#[derive(Debug, Parser)]
#[command(name = "crossdiff", version, about = "Spectral solver and verification lab for cross-diffusion on the torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment and store the trajectory with its reports.
    Solve(ConfigArgs),
    /// Invariant checks on a stored trajectory.
    Verify {
        run: PathBuf,
        /// Allowed partition defect and mass drift.
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        /// Smallest admissible value of any species.
        #[arg(long, default_value_t = -1e-8, allow_hyphen_values = true)]
        floor: f64,
    },
    /// Carleson norms and gradient decay of a stored trajectory.
    Norms {
        run: PathBuf,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = CylinderLadder::default().radii_per_octave)]
        radii_per_octave: usize,
        #[arg(long)]
        centers_stride: Option<usize>,
        #[arg(long, default_value_t = CylinderLadder::default().min_window_nodes)]
        min_window_nodes: usize,
    },
    /// Kernel scaling, Lipschitz probe and maximal regularity sweep.
    LemmaChecks(ConfigArgs),
    /// The full acceptance battery.
    Suite {
        #[command(flatten)]
        config: ConfigArgs,
        /// Run only these criteria (1-10), comma separated.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

/// `--config <file>` plus one flag per configuration field; flags win.
#[derive(Debug, Default, Clone, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub species: Option<usize>,
    /// Upper-triangular K_ij, row by row, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub coefficients: Option<Vec<f64>>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub closeness_threshold: Option<f64>,
    /// uniform, random-simplex or step-like.
    #[arg(long)]
    pub generator: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub band: Option<usize>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub steps_per_level: Option<usize>,
    /// picard or imex.
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long)]
    pub truncated: Option<bool>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// full or sup.
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub dt_max: Option<f64>,
    #[arg(long)]
    pub blowup_factor: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub radii_per_octave: Option<usize>,
    #[arg(long)]
    pub centers_stride: Option<usize>,
    #[arg(long)]
    pub min_window_nodes: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

macro_rules! apply {
    ($src:expr, $dst:expr, $($field:ident => $($path:ident).+),* $(,)?) => {
        $(if let Some(v) = $src.$field.clone() { $dst.$($path).+ = v; })*
    };
}

impl ConfigArgs {
    /// Loads the base configuration (file or default), applies the flags and
    /// validates the result.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        apply!(self, config,
            dim => grid.dim,
            points => grid.points,
            species => model.species,
            coefficients => model.coefficients,
            closeness_threshold => model.closeness_threshold,
            generator => initial.generator,
            seed => initial.seed,
            band => initial.band,
            width => initial.width,
            horizon => time.horizon,
            levels => time.levels,
            steps_per_level => time.steps_per_level,
            scheme => solver.scheme,
            truncated => solver.truncated,
            tol => solver.tol,
            max_iter => solver.max_iter,
            metric => solver.metric,
            blowup_factor => solver.blowup_factor,
            radii_per_octave => norms.radii_per_octave,
            min_window_nodes => norms.min_window_nodes,
            output => output,
        );
        if self.delta.is_some() {
            config.model.delta = self.delta;
        }
        if self.dt_max.is_some() {
            config.solver.dt_max = self.dt_max;
        }
        if self.p.is_some() {
            config.norms.p = self.p;
        }
        if self.centers_stride.is_some() {
            config.norms.centers_stride = self.centers_stride;
        }
        config.validate().context("invalid configuration")?;
        Ok(config)
    }
}

/// Outcome of a command: text for stdout and whether every check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

fn verify_run(run: &Path, tolerance: f64, floor: f64) -> Result<Outcome> {
    let (traj, manifest) = io::load_trajectory(run)?;
    let hash = manifest.get("config_hash").map(str::to_string).unwrap_or_else(|_| manifest.hash());
    let mut report = VerificationReport::new(hash);
    report.push(format!("invariants of {}", run.display()), invariant_checks(&traj, tolerance, floor)?);
    io::write_text(&run.join("verify.csv"), &report.to_csv())?;
    Ok(Outcome { text: report.summary(), passed: report.passed() })
}

fn norms_run(run: &Path, p: Option<f64>, ladder: CylinderLadder) -> Result<Outcome> {
    let (traj, manifest) = io::load_trajectory(run)?;
    let p = p.unwrap_or_else(|| crossdiff_core::carleson::default_exponent(traj.grid().dim()));
    let report = write_norm_reports(&traj, p, &ladder, run, &manifest.hash())?;
    let text = format!(
        "p = {p}: sup = {:.6e}, seminorm = {:.6e}, norm = {:.6e} ({} cylinders, {} skipped)\n",
        report.sup_norm,
        report.seminorm,
        report.norm(),
        report.scanned,
        report.skipped
    );
    Ok(Outcome { text, passed: true })
}

fn suite_outcome(report: VerificationReport, output: &Path) -> Outcome {
    let mut text = report.summary();
    text.push_str(&format!("reports written to {}\n", output.display()));
    Outcome { passed: report.passed(), text }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Solve(args) => {
            let config = args.resolve()?;
            let (traj, manifest) = solve_and_store(&config, &config.output)?;
            let text = format!(
                "{} run: {} times, sup {:.6e}, min {:.6e}; stored in {} (manifest {})\n",
                traj.scheme().name(),
                traj.len(),
                traj.sup_norm(),
                traj.min(),
                config.output.display(),
                manifest.hash()
            );
            Ok(Outcome { text, passed: true })
        }
        Command::Verify { run, tolerance, floor } => verify_run(&run, tolerance, floor),
        Command::Norms { run, p, radii_per_octave, centers_stride, min_window_nodes } => {
            let ladder = CylinderLadder { radii_per_octave, centers_stride, min_window_nodes };
            norms_run(&run, p, ladder)
        }
        Command::LemmaChecks(args) => {
            let config = args.resolve()?;
            Ok(suite_outcome(run_suite(&config, &[1, 7, 8])?, &config.output))
        }
        Command::Suite { config, only } => {
            let config = config.resolve()?;
            Ok(suite_outcome(run_suite(&config, &only)?, &config.output))
        }
    }
}
