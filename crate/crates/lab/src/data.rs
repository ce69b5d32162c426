use std::f64::consts::TAU;

use anyhow::{bail, ensure, Result};
use crossdiff_core::{GridSpec, ScalarField, SpeciesVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::InitialConfig;

/// Named generators of partition data `h_i >= 0`, `sum_i h_i = delta`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialDataSpec {
    /// `h_i = delta / d`.
    Uniform,
    /// Positive band-limited fields normalized pointwise.
    RandomSimplex { seed: u64, band: usize },
    /// Species `i` occupies the arc `[i/d, (i+1)/d)` in `x_1`, with logistic
    /// edges of the given width.
    StepLike { width: f64 },
}

impl InitialDataSpec {
    pub fn from_config(config: &InitialConfig) -> Result<Self> {
        Self::from_name(&config.generator, config.seed, config.band, config.width)
    }

    pub fn from_name(name: &str, seed: u64, band: usize, width: f64) -> Result<Self> {
        let spec = match name {
            "uniform" => InitialDataSpec::Uniform,
            "random-simplex" => InitialDataSpec::RandomSimplex { seed, band },
            "step-like" => InitialDataSpec::StepLike { width },
            other => bail!("unknown generator {other:?}"),
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitialDataSpec::Uniform => "uniform",
            InitialDataSpec::RandomSimplex { .. } => "random-simplex",
            InitialDataSpec::StepLike { .. } => "step-like",
        }
    }

    fn check(&self) -> Result<()> {
        match *self {
            InitialDataSpec::RandomSimplex { band, .. } => ensure!(band >= 1, "band must be >= 1"),
            InitialDataSpec::StepLike { width } => ensure!(
                width > 0.0 && width.is_finite(),
                "step-like data needs a positive smoothing width, got {width}"
            ),
            InitialDataSpec::Uniform => {}
        }
        Ok(())
    }
}

/// Random real trigonometric polynomial with frequencies `|k_m| <= band`.
///
/// Amplitudes are scaled so that their absolute values sum to 1, hence the
/// polynomial is bounded by 1. The same seed gives the same continuous
/// function on every grid.
#[derive(Debug, Clone)]
pub struct BandLimited {
    modes: Vec<([f64; 2], f64, f64)>,
}

impl BandLimited {
    pub fn random(dim: usize, band: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let band = band as i64;
        let mut modes = Vec::new();
        for k1 in 0..=band {
            let k2_range = if dim == 2 { -band..=band } else { 0..=0 };
            for k2 in k2_range {
                if k1 == 0 && k2 <= 0 {
                    continue;
                }
                let amp: f64 = rng.gen_range(-1.0..1.0);
                let phase: f64 = rng.gen_range(0.0..TAU);
                modes.push(([k1 as f64, k2 as f64], amp, phase));
            }
        }
        let total: f64 = modes.iter().map(|m| m.1.abs()).sum();
        for m in &mut modes {
            m.1 /= total;
        }
        BandLimited { modes }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let y = x.get(1).copied().unwrap_or(0.0);
        self.modes
            .iter()
            .map(|(k, a, ph)| a * (TAU * (k[0] * x[0] + k[1] * y) + ph).cos())
            .sum()
    }

    pub fn sample(&self, grid: GridSpec) -> ScalarField {
        ScalarField::from_fn(grid, |x| self.eval(x))
    }
}

fn normalize(grid: GridSpec, raw: Vec<ScalarField>, delta: f64) -> Result<SpeciesVector> {
    let fields = (0..raw.len())
        .map(|i| {
            let values = (0..grid.len())
                .map(|n| {
                    let total: f64 = raw.iter().map(|f| f.values()[n]).sum();
                    delta * raw[i].values()[n] / total
                })
                .collect();
            ScalarField::new(grid, values)
        })
        .collect::<crossdiff_core::Result<Vec<_>>>()?;
    Ok(SpeciesVector::new(fields)?)
}

pub fn generate_initial_data(
    spec: &InitialDataSpec,
    grid: GridSpec,
    d: usize,
    delta: f64,
) -> Result<SpeciesVector> {
    ensure!(d >= 2, "need at least two species, got {d}");
    ensure!(delta > 0.0 && delta.is_finite(), "delta must be positive, got {delta}");
    spec.check()?;
    match *spec {
        InitialDataSpec::Uniform => Ok(SpeciesVector::constant(grid, d, delta / d as f64)),
        InitialDataSpec::RandomSimplex { seed, band } => {
            let raw = (0..d)
                .map(|i| {
                    let shape = BandLimited::random(grid.dim(), band, seed.wrapping_mul(1009) + i as u64);
                    ScalarField::from_fn(grid, |x| 1.0 + 0.5 * shape.eval(x))
                })
                .collect();
            normalize(grid, raw, delta)
        }
        InitialDataSpec::StepLike { width } => {
            let half = 0.5 / d as f64;
            let raw = (0..d)
                .map(|i| {
                    let center = (i as f64 + 0.5) / d as f64;
                    ScalarField::from_fn(grid, |x| {
                        let offset = (x[0] - center).rem_euclid(1.0);
                        let dist = offset.min(1.0 - offset);
                        1.0 / (1.0 + ((dist - half) / width).exp())
                    })
                })
                .collect();
            normalize(grid, raw, delta)
        }
    }
}

/// Zero-mean perturbation `eps cos(2 pi k x_1 + phase)` added to species `a`
/// and subtracted from species `b`, so the sum is unchanged.
pub fn rebalanced_perturbation(
    h: &SpeciesVector,
    eps: f64,
    k: usize,
    phase: f64,
    a: usize,
    b: usize,
) -> Result<SpeciesVector> {
    ensure!(a != b && a < h.species_count() && b < h.species_count(), "bad species pair");
    let bump = ScalarField::from_fn(h.grid(), |x| eps * (TAU * k as f64 * x[0] + phase).cos());
    let mut fields = h.fields().to_vec();
    fields[a] = fields[a].add(&bump)?;
    fields[b] = fields[b].sub(&bump)?;
    Ok(SpeciesVector::new(fields)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crossdiff_core::make_grid;

    fn partition_defect(h: &SpeciesVector, delta: f64) -> f64 {
        h.total().values().iter().map(|v| (v - delta).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn uniform_example() {
        let g = make_grid(1, 16).unwrap();
        let h = generate_initial_data(&InitialDataSpec::Uniform, g, 3, 0.1).unwrap();
        for f in h.iter() {
            assert!(f.values().iter().all(|&v| v == 0.1 / 3.0));
        }
    }

    #[test]
    fn generators_produce_partitions() {
        for (dim, n) in [(1, 128), (2, 32)] {
            let g = make_grid(dim, n).unwrap();
            for spec in [
                InitialDataSpec::RandomSimplex { seed: 4, band: 3 },
                InitialDataSpec::StepLike { width: 0.01 },
            ] {
                let h = generate_initial_data(&spec, g, 3, 0.05).unwrap();
                assert!(partition_defect(&h, 0.05) < 1e-12, "{spec:?}");
                assert!(h.min() >= 0.0);
            }
        }
    }

    #[test]
    fn step_like_is_a_smoothed_partition() {
        let g = make_grid(1, 256).unwrap();
        let h = generate_initial_data(&InitialDataSpec::StepLike { width: 0.002 }, g, 2, 0.1).unwrap();
        // Deep inside its arc a species carries almost all of delta.
        assert!((h.species(0).values()[64] - 0.1).abs() < 1e-12);
        assert!(h.species(1).values()[64] < 1e-12);
        assert!((h.species(0).values()[128] - 0.05).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(InitialDataSpec::from_name("step-like", 0, 3, 0.0).is_err());
        assert!(InitialDataSpec::from_name("sawtooth", 0, 3, 0.1).is_err());
        let g = make_grid(1, 16).unwrap();
        assert!(generate_initial_data(&InitialDataSpec::Uniform, g, 1, 0.1).is_err());
    }

    #[test]
    fn seeds_reproduce_and_differ() {
        let g = make_grid(1, 32).unwrap();
        let a = generate_initial_data(&InitialDataSpec::RandomSimplex { seed: 1, band: 3 }, g, 3, 0.05).unwrap();
        let b = generate_initial_data(&InitialDataSpec::RandomSimplex { seed: 1, band: 3 }, g, 3, 0.05).unwrap();
        let c = generate_initial_data(&InitialDataSpec::RandomSimplex { seed: 2, band: 3 }, g, 3, 0.05).unwrap();
        assert_eq!(a, b);
        assert!(a.sub(&c).unwrap().sup_norm() > 1e-4);
    }

    #[test]
    fn perturbation_keeps_the_sum() {
        let g = make_grid(1, 32).unwrap();
        let h = generate_initial_data(&InitialDataSpec::Uniform, g, 3, 0.06).unwrap();
        let p = rebalanced_perturbation(&h, 1e-3, 2, 0.0, 0, 2).unwrap();
        assert!(partition_defect(&p, 0.06) < 1e-15);
        assert!((h.sub(&p).unwrap().sup_norm() - 1e-3).abs() < 1e-6);
    }
}
