#![allow(dead_code)]

use std::f64::consts::PI;

use crossdiff_core::{GridSpec, ScalarField, SpeciesVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TAU: f64 = 2.0 * PI;

/// Trigonometric polynomial with random coefficients on `|k_m| <= band`,
/// normalized to unit sup bound (sum of amplitudes).
pub struct BandLimited {
    modes: Vec<([f64; 2], f64, f64)>,
}

impl BandLimited {
    pub fn random(dim: usize, band: i64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes: Vec<([f64; 2], f64, f64)> = Vec::new();
        let second = if dim == 2 { -band..=band } else { 0..=0 };
        for k1 in 0..=band {
            for k2 in second.clone() {
                if k1 == 0 && k2 <= 0 {
                    continue;
                }
                modes.push(([k1 as f64, k2 as f64], rng.gen_range(-1.0..1.0), rng.gen_range(0.0..TAU)));
            }
        }
        let total: f64 = modes.iter().map(|m| m.1.abs()).sum();
        modes.iter_mut().for_each(|m| m.1 /= total);
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

/// Positive band-limited fields normalized pointwise so that the species
/// sum to `delta`.
pub fn random_simplex(grid: GridSpec, d: usize, delta: f64, seed: u64) -> SpeciesVector {
    let raw: Vec<ScalarField> = (0..d)
        .map(|i| {
            let f = BandLimited::random(grid.dim(), 3, seed * 31 + i as u64);
            ScalarField::from_fn(grid, |x| 1.0 + 0.5 * f.eval(x))
        })
        .collect();
    let total: Vec<f64> = (0..grid.len()).map(|n| raw.iter().map(|f| f.values()[n]).sum()).collect();
    SpeciesVector::new(
        raw.iter()
            .map(|f| {
                let v = f.values().iter().zip(&total).map(|(a, t)| delta * a / t).collect();
                ScalarField::new(grid, v).unwrap()
            })
            .collect(),
    )
    .unwrap()
}
