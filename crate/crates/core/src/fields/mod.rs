//! Periodic grids on the unit torus and the fields sampled on them.
//!
//! Nodes sit at `x_j = j / N` in every direction. Two-dimensional fields are
//! stored row-major: the flat index of node `(j1, j2)` is `j1 * N + j2`.

mod fft;
mod torus;

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

pub use torus::{Torus, WaveVector};
pub(crate) use torus::apply_factors as torus_apply_factors;

/// Nodal description of a periodic grid on `T^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    dim: usize,
    points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Config(format!("unsupported dimension {dim}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::Config(format!(
                "resolution must be a power of two >= 8, got {points}"
            )));
        }
        Ok(GridSpec { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per dimension.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.points as f64
    }

    /// Total number of nodes, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-index of a flat node index (unused trailing entries are 0).
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        match self.dim {
            1 => [idx, 0],
            _ => [idx / self.points, idx % self.points],
        }
    }

    pub fn flat_index(&self, multi: [usize; 2]) -> usize {
        match self.dim {
            1 => multi[0],
            _ => multi[0] * self.points + multi[1],
        }
    }

    /// Coordinates of a node; only the first `dim` entries are meaningful.
    pub fn node(&self, idx: usize) -> [f64; 2] {
        let m = self.multi_index(idx);
        let h = self.spacing();
        [m[0] as f64 * h, m[1] as f64 * h]
    }
}

/// Validates `n` and `N` and builds the grid descriptor.
pub fn make_grid(dim: usize, points: usize) -> Result<GridSpec> {
    GridSpec::new(dim, points)
}

/// One periodic scalar quantity sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "expected {} nodal values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("non-finite value at node {pos}")));
        }
        Ok(ScalarField { grid, values })
    }

    /// Skips the finiteness scan; used on outputs of spectral operators.
    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn constant(grid: GridSpec, value: f64) -> Self {
        ScalarField { grid, values: alloc::vec![value; grid.len()] }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `f` at every node. The closure receives the node coordinates
    /// (length `n`).
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let x = grid.node(idx);
                f(&x[..grid.dim()])
            })
            .collect();
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Spatial mean, i.e. the midpoint-rule integral over the unit torus.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Result<ScalarField> {
        self.check_grid(other)?;
        Ok(ScalarField::from_raw(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> ScalarField {
        self.map(|v| factor * v)
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &ScalarField) -> Result<()> {
        self.check_grid(other)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += factor * b;
        }
        Ok(())
    }

    pub(crate) fn check_grid(&self, other: &ScalarField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Shape(format!(
                "grid mismatch: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }
}

/// `L^p` norm over the unit torus with the uniform-node midpoint rule;
/// `p = f64::INFINITY` returns the nodal maximum of `|f|`.
pub fn lp_norm(field: &ScalarField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Argument(format!("L^p exponent must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(field.sup_norm());
    }
    let mean = field.values.iter().map(|v| libm::pow(v.abs(), p)).sum::<f64>()
        / field.values.len() as f64;
    Ok(libm::pow(mean, 1.0 / p))
}

/// The `d`-tuple of species fields at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesVector {
    fields: Vec<ScalarField>,
}

impl SpeciesVector {
    pub fn new(fields: Vec<ScalarField>) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::Shape("species vector needs at least one field".into()))?;
        let grid = first.grid();
        if fields.iter().any(|f| f.grid() != grid) {
            return Err(Error::Shape("species fields live on different grids".into()));
        }
        Ok(SpeciesVector { fields })
    }

    pub(crate) fn from_raw(fields: Vec<ScalarField>) -> Self {
        SpeciesVector { fields }
    }

    /// `d` copies of the constant `value`.
    pub fn constant(grid: GridSpec, d: usize, value: f64) -> Self {
        SpeciesVector { fields: alloc::vec![ScalarField::constant(grid, value); d] }
    }

    pub fn species_count(&self) -> usize {
        self.fields.len()
    }

    pub fn grid(&self) -> GridSpec {
        self.fields[0].grid()
    }

    pub fn species(&self, i: usize) -> &ScalarField {
        &self.fields[i]
    }

    pub fn species_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.fields[i]
    }

    pub fn iter(&self) -> core::slice::Iter<'_, ScalarField> {
        self.fields.iter()
    }

    pub fn fields(&self) -> &[ScalarField] {
        &self.fields
    }

    pub fn into_fields(self) -> Vec<ScalarField> {
        self.fields
    }

    /// Pointwise sum over species.
    pub fn total(&self) -> ScalarField {
        let mut acc = ScalarField::zeros(self.grid());
        for f in &self.fields {
            for (a, b) in acc.values.iter_mut().zip(&f.values) {
                *a += b;
            }
        }
        acc
    }

    /// `max_i sup_x |w_i|`.
    pub fn sup_norm(&self) -> f64 {
        self.fields.iter().map(ScalarField::sup_norm).fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.fields.iter().map(ScalarField::min).fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SpeciesVector {
        SpeciesVector { fields: self.fields.iter().map(|s| s.map(&f)).collect() }
    }

    pub fn sub(&self, other: &SpeciesVector) -> Result<SpeciesVector> {
        self.check_shape(other)?;
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpeciesVector { fields })
    }

    pub(crate) fn check_shape(&self, other: &SpeciesVector) -> Result<()> {
        if self.species_count() != other.species_count() || self.grid() != other.grid() {
            return Err(Error::Shape(format!(
                "species vectors differ: d = {} on {:?} vs d = {} on {:?}",
                self.species_count(),
                self.grid(),
                other.species_count(),
                other.grid()
            )));
        }
        Ok(())
    }
}

/// Complex Fourier coefficients of a real field, in FFT index order
/// (index `j` holds frequency `j` for `j < N/2` and `j - N` above).
///
/// Normalised so that `coeff(0)` is the spatial mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<num_complex::Complex64>,
}

impl SpectralField {
    pub(crate) fn from_raw(grid: GridSpec, coeffs: Vec<num_complex::Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralField { grid, coeffs }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField { grid, coeffs: alloc::vec![num_complex::Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeffs(&self) -> &[num_complex::Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [num_complex::Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of the integer frequency `k` (length `n`), with
    /// `|k_m| <= N/2`.
    pub fn coeff(&self, k: &[i64]) -> num_complex::Complex64 {
        let n = self.grid.points() as i64;
        let wrap = |km: i64| km.rem_euclid(n) as usize;
        let idx = match self.grid.dim() {
            1 => wrap(k[0]),
            _ => self.grid.flat_index([wrap(k[0]), wrap(k[1])]),
        };
        self.coeffs[idx]
    }

    /// Largest violation of `coeff(-k) = conj(coeff(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.points();
        let neg = |j: usize| (n - j) % n;
        (0..self.grid.len())
            .map(|idx| {
                let m = self.grid.multi_index(idx);
                let mirror = match self.grid.dim() {
                    1 => neg(m[0]),
                    _ => self.grid.flat_index([neg(m[0]), neg(m[1])]),
                };
                (self.coeffs[mirror] - self.coeffs[idx].conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `sum_k |coeff(k)|^2`, equal to the mean of `f^2` by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn add_scaled(&mut self, factor: f64, other: &SpectralField) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += *b * factor;
        }
    }
}

/// Forward transform on a throwaway [`Torus`]; prefer the `Torus` methods
/// in loops.
pub fn transform(field: &ScalarField) -> SpectralField {
    Torus::new(field.grid()).forward(field)
}

pub fn inverse_transform(spectral: &SpectralField) -> ScalarField {
    Torus::new(spectral.grid()).inverse(spectral)
}

/// Spectral gradient (`n` component fields).
pub fn gradient(field: &ScalarField) -> Vec<ScalarField> {
    Torus::new(field.grid()).gradient(field)
}

pub fn divergence(components: &[ScalarField]) -> Result<ScalarField> {
    let first = components
        .first()
        .ok_or_else(|| Error::Shape("empty vector field".into()))?;
    Torus::new(first.grid()).divergence(components)
}
