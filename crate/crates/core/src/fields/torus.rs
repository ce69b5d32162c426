use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::fft::Radix2;
use super::{GridSpec, ScalarField, SpectralField};
use crate::{Error, Result};

/// Integer frequency of one spectral index, per dimension.
pub type WaveVector = [i64; 2];

/// Spectral operator context for one grid: FFT plan plus frequency tables.
///
/// Building a `Torus` computes the twiddle factors once; every operator is a
/// pure function of its inputs.
#[derive(Debug, Clone)]
pub struct Torus {
    grid: GridSpec,
    plan: Radix2,
    /// Signed frequency of each 1-d index; the Nyquist index maps to `+N/2`.
    freqs: Vec<i64>,
}

impl Torus {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.points();
        let freqs = (0..n)
            .map(|j| if j <= n / 2 { j as i64 } else { j as i64 - n as i64 })
            .collect();
        Torus { grid, plan: Radix2::new(n), freqs }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn wave_vector(&self, idx: usize) -> WaveVector {
        let m = self.grid.multi_index(idx);
        match self.grid.dim() {
            1 => [self.freqs[m[0]], 0],
            _ => [self.freqs[m[0]], self.freqs[m[1]]],
        }
    }

    /// `|k|^2` for the spectral index `idx`.
    pub fn wave_number_sq(&self, idx: usize) -> f64 {
        let k = self.wave_vector(idx);
        (k[0] * k[0] + k[1] * k[1]) as f64
    }

    /// Eigenvalue of `-Laplacian` at `idx`, `(2 pi |k|)^2`.
    pub fn laplacian_eigenvalue(&self, idx: usize) -> f64 {
        4.0 * PI * PI * self.wave_number_sq(idx)
    }

    fn is_nyquist(&self, k: i64) -> bool {
        2 * k.unsigned_abs() as usize == self.grid.points()
    }

    /// Multiplier of the first derivative along `axis`; zero at the Nyquist
    /// frequency so real fields stay real.
    fn derivative_symbol(&self, idx: usize, axis: usize) -> Complex64 {
        let k = self.wave_vector(idx)[axis];
        if self.is_nyquist(k) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, 2.0 * PI * k as f64)
        }
    }

    fn transform_in_place(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.grid.points();
        for row in data.chunks_exact_mut(n) {
            self.plan.process(row, inverse);
        }
        if self.grid.dim() == 2 {
            let mut column = alloc::vec![Complex64::new(0.0, 0.0); n];
            for c in 0..n {
                for r in 0..n {
                    column[r] = data[r * n + c];
                }
                self.plan.process(&mut column, inverse);
                for r in 0..n {
                    data[r * n + c] = column[r];
                }
            }
        }
    }

    pub fn forward(&self, field: &ScalarField) -> SpectralField {
        debug_assert_eq!(field.grid(), self.grid);
        let mut data: Vec<Complex64> =
            field.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform_in_place(&mut data, false);
        let scale = 1.0 / self.grid.len() as f64;
        for c in &mut data {
            *c *= scale;
        }
        SpectralField::from_raw(self.grid, data)
    }

    /// Inverse transform; the imaginary round-off of the synthesis is
    /// discarded.
    pub fn inverse(&self, spectral: &SpectralField) -> ScalarField {
        debug_assert_eq!(spectral.grid(), self.grid);
        let mut data = spectral.coeffs().to_vec();
        self.transform_in_place(&mut data, true);
        ScalarField::from_raw(self.grid, data.into_iter().map(|c| c.re).collect())
    }

    /// Gradient from precomputed coefficients.
    pub fn gradient_spectral(&self, spectral: &SpectralField) -> Vec<ScalarField> {
        (0..self.grid.dim())
            .map(|axis| {
                let mut deriv = spectral.clone();
                for (idx, c) in deriv.coeffs_mut().iter_mut().enumerate() {
                    *c *= self.derivative_symbol(idx, axis);
                }
                self.inverse(&deriv)
            })
            .collect()
    }

    /// Exact derivative of the band-limited interpolant, one field per axis.
    pub fn gradient(&self, field: &ScalarField) -> Vec<ScalarField> {
        self.gradient_spectral(&self.forward(field))
    }

    /// Mixed spatial derivative `d^beta f` (`beta` has `n` entries).
    pub fn derivative(&self, field: &ScalarField, beta: &[usize]) -> ScalarField {
        let mut spectral = self.forward(field);
        for (idx, c) in spectral.coeffs_mut().iter_mut().enumerate() {
            let k = self.wave_vector(idx);
            for (axis, &order) in beta.iter().enumerate().take(self.grid.dim()) {
                if order == 0 {
                    continue;
                }
                if order % 2 == 1 && self.is_nyquist(k[axis]) {
                    *c = Complex64::new(0.0, 0.0);
                }
                let symbol = Complex64::new(0.0, 2.0 * PI * k[axis] as f64);
                *c *= symbol.powu(order as u32);
            }
        }
        self.inverse(&spectral)
    }

    /// Divergence in coefficient space, `sum_m i 2 pi k_m F_m^`.
    pub fn divergence_spectral(&self, components: &[ScalarField]) -> Result<SpectralField> {
        self.check_components(components)?;
        let mut acc = SpectralField::zeros(self.grid);
        for (axis, comp) in components.iter().enumerate() {
            let spectral = self.forward(comp);
            for (idx, (a, c)) in acc.coeffs_mut().iter_mut().zip(spectral.coeffs()).enumerate() {
                *a += *c * self.derivative_symbol(idx, axis);
            }
        }
        Ok(acc)
    }

    pub fn divergence(&self, components: &[ScalarField]) -> Result<ScalarField> {
        Ok(self.inverse(&self.divergence_spectral(components)?))
    }

    /// Spectral Laplacian, symbol `-(2 pi |k|)^2`.
    pub fn laplacian(&self, field: &ScalarField) -> ScalarField {
        let mut spectral = self.forward(field);
        for (idx, c) in spectral.coeffs_mut().iter_mut().enumerate() {
            *c *= -self.laplacian_eigenvalue(idx);
        }
        self.inverse(&spectral)
    }

    /// Whether the 2/3 rule keeps this index (`3 |k_m| <= N` in every axis).
    pub fn is_resolved(&self, idx: usize) -> bool {
        let k = self.wave_vector(idx);
        let n = self.grid.points() as u64;
        k.iter().take(self.grid.dim()).all(|km| 3 * km.unsigned_abs() <= n)
    }

    pub fn dealias_spectral(&self, spectral: &mut SpectralField) {
        for (idx, c) in spectral.coeffs_mut().iter_mut().enumerate() {
            if !self.is_resolved(idx) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// 2/3-rule truncation of a nodal field.
    pub fn dealias(&self, field: &ScalarField) -> ScalarField {
        let mut spectral = self.forward(field);
        self.dealias_spectral(&mut spectral);
        self.inverse(&spectral)
    }

    /// Per-index heat multipliers `exp(-(2 pi |k|)^2 t)`.
    pub fn heat_factors(&self, t: f64) -> Vec<f64> {
        (0..self.grid.len())
            .map(|idx| libm::exp(-self.laplacian_eigenvalue(idx) * t))
            .collect()
    }

    pub(crate) fn check_components(&self, components: &[ScalarField]) -> Result<()> {
        if components.len() != self.grid.dim() {
            return Err(Error::Shape(format!(
                "vector field has {} components on a {}-d grid",
                components.len(),
                self.grid.dim()
            )));
        }
        if let Some(c) = components.iter().find(|c| c.grid() != self.grid) {
            return Err(Error::Shape(format!(
                "component on {:?}, operator on {:?}",
                c.grid(),
                self.grid
            )));
        }
        Ok(())
    }
}

/// Multiplies every coefficient by the matching entry of `factors`.
pub(crate) fn apply_factors(spectral: &mut SpectralField, factors: &[f64]) {
    for (c, &f) in spectral.coeffs_mut().iter_mut().zip(factors) {
        *c *= f;
    }
}
