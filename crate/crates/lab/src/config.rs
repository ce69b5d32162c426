use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use crossdiff_core::carleson::{default_exponent, CylinderLadder};
use crossdiff_core::model::{reduce_coefficients_with_threshold, RawCoefficients, ReducedModel};
use crossdiff_core::semigroup::{DyadicRefinement, TimeGrid};
use crossdiff_core::solver::{ImexOptions, PicardMetric, PicardOptions};
use crossdiff_core::{make_grid, GridSpec, Scheme};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::InitialDataSpec;

/// Everything needed to reproduce one experiment. Serialized as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub model: ModelConfig,
    pub initial: InitialConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub norms: NormConfig,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub species: usize,
    /// Upper-triangular `K_ij`, row by row.
    pub coefficients: Vec<f64>,
    /// Overrides the `delta` derived from the coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default = "default_threshold")]
    pub closeness_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub generator: String,
    pub seed: u64,
    #[serde(default = "default_band")]
    pub band: usize,
    #[serde(default = "default_width")]
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub horizon: f64,
    pub levels: usize,
    pub steps_per_level: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        let r = DyadicRefinement::default();
        TimeConfig { horizon: 1.0, levels: r.levels, steps_per_level: r.steps_per_level }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// `picard` or `imex`.
    pub scheme: String,
    pub truncated: bool,
    pub tol: f64,
    pub max_iter: usize,
    /// `full` or `sup`.
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    pub blowup_factor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = PicardOptions::default();
        SolverConfig {
            scheme: "picard".into(),
            truncated: true,
            tol: p.tol,
            max_iter: p.max_iter,
            metric: "full".into(),
            dt_max: None,
            blowup_factor: ImexOptions::default().blowup_factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub radii_per_octave: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers_stride: Option<usize>,
    pub min_window_nodes: usize,
}

impl Default for NormConfig {
    fn default() -> Self {
        let l = CylinderLadder::default();
        NormConfig {
            p: None,
            radii_per_octave: l.radii_per_octave,
            centers_stride: l.centers_stride,
            min_window_nodes: l.min_window_nodes,
        }
    }
}

fn default_output() -> PathBuf {
    PathBuf::from("runs/default")
}

fn default_threshold() -> f64 {
    crossdiff_core::model::DEFAULT_CLOSENESS_THRESHOLD
}

fn default_band() -> usize {
    3
}

fn default_width() -> f64 {
    0.004
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: GridConfig { dim: 1, points: 128 },
            model: ModelConfig {
                species: 3,
                coefficients: vec![0.98, 1.02, 1.0],
                delta: None,
                closeness_threshold: default_threshold(),
            },
            initial: InitialConfig {
                generator: "random-simplex".into(),
                seed: 1,
                band: default_band(),
                width: default_width(),
            },
            time: TimeConfig::default(),
            solver: SolverConfig::default(),
            norms: NormConfig::default(),
            output: default_output(),
        }
    }
}

/// Solver selected by the configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverChoice {
    Picard(PicardOptions),
    Imex { options: ImexOptions, truncated: bool },
}

impl SolverChoice {
    pub fn scheme(&self) -> Scheme {
        match self {
            SolverChoice::Picard(_) => Scheme::Picard,
            SolverChoice::Imex { .. } => Scheme::Imex,
        }
    }
}

/// A validated configuration, resolved into core types.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub grid: GridSpec,
    pub model: ReducedModel,
    pub time_grid: TimeGrid,
    pub data: InitialDataSpec,
    pub solver: SolverChoice,
    pub p: f64,
    pub ladder: CylinderLadder,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).context("invalid config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml_str(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// SHA-256 of the canonical TOML rendering, output directory excluded.
    pub fn hash(&self) -> Result<String> {
        let canonical = ExperimentConfig { output: default_output(), ..self.clone() };
        Ok(hex::encode(Sha256::digest(canonical.to_toml_string()?.as_bytes())))
    }

    pub fn validate(&self) -> Result<Experiment> {
        let grid = make_grid(self.grid.dim, self.grid.points)?;
        let raw = RawCoefficients::from_upper_triangular(self.model.species, &self.model.coefficients)?;
        let mut model = reduce_coefficients_with_threshold(&raw, self.model.closeness_threshold)?;
        if let Some(delta) = self.model.delta {
            model = model.with_delta(delta)?;
        }
        let refinement = DyadicRefinement {
            levels: self.time.levels,
            steps_per_level: self.time.steps_per_level,
        };
        let time_grid = TimeGrid::dyadic(self.time.horizon, refinement)?;
        let data = InitialDataSpec::from_config(&self.initial)?;
        let ladder = CylinderLadder {
            radii_per_octave: self.norms.radii_per_octave,
            centers_stride: self.norms.centers_stride,
            min_window_nodes: self.norms.min_window_nodes,
        };
        let p = self.norms.p.unwrap_or_else(|| default_exponent(grid.dim()));
        if !(p >= 1.0 && p.is_finite()) {
            bail!("norm exponent must lie in [1, inf), got {p}");
        }
        let metric = match self.solver.metric.as_str() {
            "full" => PicardMetric::Full,
            "sup" => PicardMetric::SupOnly,
            other => bail!("unknown metric {other:?} (expected full or sup)"),
        };
        if self.solver.tol.is_nan() || self.solver.tol < 0.0 || self.solver.max_iter == 0 {
            bail!("solver needs tol >= 0 and max_iter >= 1");
        }
        let solver = match self.solver.scheme.as_str() {
            "picard" => SolverChoice::Picard(PicardOptions {
                tol: self.solver.tol,
                max_iter: self.solver.max_iter,
                truncated: self.solver.truncated,
                metric,
                p: Some(p),
                ladder,
                ..Default::default()
            }),
            "imex" => SolverChoice::Imex {
                options: ImexOptions {
                    dt_max: self.solver.dt_max,
                    blowup_factor: self.solver.blowup_factor,
                },
                truncated: self.solver.truncated,
            },
            other => bail!("unknown scheme {other:?} (expected picard or imex)"),
        };
        Ok(Experiment { grid, model, time_grid, data, solver, p, ladder })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let config = ExperimentConfig::default();
        let text = config.to_toml_string().unwrap();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, config);
        assert_eq!(back.hash().unwrap(), config.hash().unwrap());
        let exp = config.validate().unwrap();
        assert_eq!(exp.p, 4.0);
        assert_eq!(exp.time_grid.len(), 89);
        assert!((exp.model.delta - 0.02).abs() < 1e-12);
        assert!(exp.model.closeness_holds());
    }

    #[test]
    fn overrides_round_trip() {
        let mut config = ExperimentConfig::default();
        config.model.delta = Some(0.05);
        config.norms.p = Some(5.0);
        config.norms.centers_stride = Some(4);
        config.solver.dt_max = Some(1e-5);
        config.solver.scheme = "imex".into();
        let back = ExperimentConfig::from_toml_str(&config.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, config);
        assert_ne!(back.hash().unwrap(), ExperimentConfig::default().hash().unwrap());
    }

    #[test]
    fn rejects_empty_and_invalid() {
        assert!(ExperimentConfig::from_toml_str("").is_err());
        let mut config = ExperimentConfig::default();
        config.grid.dim = 3;
        let err = config.validate().unwrap_err();
        assert!(format!("{err}").contains("unsupported dimension"));
        let mut config = ExperimentConfig::default();
        config.initial.generator = "zebra".into();
        assert!(config.validate().is_err());
        let mut config = ExperimentConfig::default();
        config.solver.scheme = "rk4".into();
        assert!(config.validate().is_err());
        let text = ExperimentConfig::default().to_toml_string().unwrap() + "\nunknown = 1\n";
        assert!(ExperimentConfig::from_toml_str(&text).is_err());
    }
}
