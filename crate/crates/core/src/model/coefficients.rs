use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Default bound on `delta * d` for the closeness condition
/// `max |K_ij - K| << K / d`.
pub const DEFAULT_CLOSENESS_THRESHOLD: f64 = 0.1;

/// Symmetric off-diagonal cross-diffusion coefficients `K_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawCoefficients {
    d: usize,
    /// Row-major `d x d`; the diagonal is ignored.
    k: Vec<f64>,
}

impl RawCoefficients {
    pub fn new(d: usize, matrix: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Validation(format!("need at least two species, got {d}")));
        }
        if matrix.len() != d * d {
            return Err(Error::Shape(format!("expected {} entries, got {}", d * d, matrix.len())));
        }
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                let (kij, kji) = (matrix[i * d + j], matrix[j * d + i]);
                if !(kij.is_finite() && kij > 0.0) {
                    return Err(Error::Validation(format!(
                        "K_{}{} = {kij} must be positive",
                        i + 1,
                        j + 1
                    )));
                }
                if (kij - kji).abs() > 1e-12 * kij.abs().max(kji.abs()) {
                    return Err(Error::Validation(format!(
                        "K is not symmetric: K_{}{} = {kij}, K_{}{} = {kji}",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(RawCoefficients { d, k: matrix })
    }

    /// Builds the matrix from `K_12, K_13, ..., K_1d, K_23, ...`.
    pub fn from_upper_triangular(d: usize, entries: &[f64]) -> Result<Self> {
        if d < 2 || entries.len() != d * (d - 1) / 2 {
            return Err(Error::Shape(format!(
                "{} upper-triangular entries do not describe {d} species",
                entries.len()
            )));
        }
        let mut matrix = alloc::vec![0.0; d * d];
        let mut it = entries.iter();
        for i in 0..d {
            for j in i + 1..d {
                let v = *it.next().unwrap();
                matrix[i * d + j] = v;
                matrix[j * d + i] = v;
            }
        }
        RawCoefficients::new(d, matrix)
    }

    pub fn upper_triangular(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.d * (self.d - 1) / 2);
        for i in 0..self.d {
            for j in i + 1..self.d {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn species_count(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.d + j]
    }

    fn off_diagonal(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let d = self.d;
        (0..d).flat_map(move |i| (0..d).filter(move |&j| j != i).map(move |j| (i, j, self.get(i, j))))
    }
}

/// Interaction matrix `alpha` with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    d: usize,
    entries: Vec<f64>,
}

impl InteractionMatrix {
    pub fn zeros(d: usize) -> Self {
        InteractionMatrix { d, entries: alloc::vec![0.0; d * d] }
    }

    /// Row-major entries; the diagonal is overwritten with 0. Symmetry is not
    /// enforced so that broken models can be injected on purpose.
    pub fn from_rows(d: usize, mut entries: Vec<f64>) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::Shape(format!("expected {} entries, got {}", d * d, entries.len())));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("interaction matrix has non-finite entries".into()));
        }
        for i in 0..d {
            entries[i * d + i] = 0.0;
        }
        Ok(InteractionMatrix { d, entries })
    }

    pub fn species_count(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.d + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.d).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Diffusion-dominant form of a cross-diffusion system: reference
/// diffusivity `K`, smallness `delta` and normalised couplings `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedModel {
    pub reference_diffusivity: f64,
    /// Coupling strength; also the partition level and truncation range
    /// `[0, delta]` for the rescaled species.
    pub delta: f64,
    pub alpha: InteractionMatrix,
    /// `delta * d`.
    pub closeness_margin: f64,
    pub closeness_threshold: f64,
}

impl ReducedModel {
    /// Model with a prescribed interaction matrix (`K = 1`). Used for the
    /// decoupled case `alpha = 0` and for negative controls.
    pub fn from_alpha(alpha: InteractionMatrix, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Argument(format!("delta must be positive, got {delta}")));
        }
        let d = alpha.species_count();
        Ok(ReducedModel {
            reference_diffusivity: 1.0,
            delta,
            alpha,
            closeness_margin: delta * d as f64,
            closeness_threshold: DEFAULT_CLOSENESS_THRESHOLD,
        })
    }

    /// Same couplings, different data size `delta`.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        let mut out = ReducedModel::from_alpha(self.alpha.clone(), delta)?;
        out.reference_diffusivity = self.reference_diffusivity;
        out.closeness_threshold = self.closeness_threshold;
        Ok(out)
    }

    pub fn species_count(&self) -> usize {
        self.alpha.species_count()
    }

    /// Whether `delta * d` is within the configured threshold.
    pub fn closeness_holds(&self) -> bool {
        self.closeness_margin <= self.closeness_threshold
    }
}

pub fn reduce_coefficients(raw: &RawCoefficients) -> Result<ReducedModel> {
    reduce_coefficients_with_threshold(raw, DEFAULT_CLOSENESS_THRESHOLD)
}

/// `K = (max K_ij + min K_ij) / 2`, `delta_ij = K_ij / K - 1`,
/// `delta = max |delta_ij|`, `alpha_ij = delta_ij / delta`.
pub fn reduce_coefficients_with_threshold(
    raw: &RawCoefficients,
    threshold: f64,
) -> Result<ReducedModel> {
    let (min, max) = raw
        .off_diagonal()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, _, v)| (lo.min(v), hi.max(v)));
    if min == max {
        return Err(Error::Degenerate);
    }
    let k = 0.5 * (max + min);
    let d = raw.species_count();
    let mut relative = alloc::vec![0.0; d * d];
    for (i, j, v) in raw.off_diagonal() {
        relative[i * d + j] = v / k - 1.0;
    }
    let delta = relative.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if delta == 0.0 {
        return Err(Error::Degenerate);
    }
    let alpha = InteractionMatrix::from_rows(d, relative.iter().map(|v| v / delta).collect())?;
    Ok(ReducedModel {
        reference_diffusivity: k,
        delta,
        alpha,
        closeness_margin: delta * d as f64,
        closeness_threshold: threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_species_example() {
        let raw = RawCoefficients::from_upper_triangular(3, &[0.9, 1.1, 1.0]).unwrap();
        let m = reduce_coefficients(&raw).unwrap();
        assert!((m.reference_diffusivity - 1.0).abs() < 1e-15);
        assert!((m.delta - 0.1).abs() < 1e-15);
        assert!((m.alpha.get(0, 1) + 1.0).abs() < 1e-14);
        assert!((m.alpha.get(0, 2) - 1.0).abs() < 1e-14);
        assert_eq!(m.alpha.max_abs(), 1.0);
        assert!(m.alpha.get(1, 2).abs() < 1e-14);
        assert!(m.alpha.is_symmetric());
        assert!((m.closeness_margin - 0.3).abs() < 1e-14);
        assert!(!m.closeness_holds());
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        let equal = RawCoefficients::from_upper_triangular(2, &[5.0]).unwrap();
        let err = reduce_coefficients(&equal).unwrap_err();
        assert_eq!(err, Error::Degenerate);
        assert!(alloc::format!("{err}").contains("degenerate"));

        let asym = RawCoefficients::new(2, alloc::vec![0.0, 1.0, 2.0, 0.0]);
        assert!(matches!(asym, Err(Error::Validation(_))));
        let negative = RawCoefficients::from_upper_triangular(3, &[1.0, -1.0, 1.0]);
        assert!(matches!(negative, Err(Error::Validation(_))));
        assert!(RawCoefficients::from_upper_triangular(3, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn upper_triangular_round_trip() {
        let entries = [1.0, 1.02, 0.97, 1.01, 0.99, 1.03];
        let raw = RawCoefficients::from_upper_triangular(4, &entries).unwrap();
        assert_eq!(raw.upper_triangular(), entries);
        assert_eq!(raw.get(3, 1), 0.99);
    }

    proptest! {
        #[test]
        fn reduced_alpha_is_normalised(
            d in 2usize..6,
            seed in proptest::collection::vec(0.5f64..2.0, 15),
        ) {
            let count = d * (d - 1) / 2;
            let entries = &seed[..count];
            prop_assume!(entries.iter().any(|&v| v != entries[0]));
            let raw = RawCoefficients::from_upper_triangular(d, entries).unwrap();
            let m = reduce_coefficients(&raw).unwrap();
            prop_assert!(m.reference_diffusivity > 0.0 && m.delta > 0.0);
            prop_assert!(m.alpha.is_symmetric());
            prop_assert!(m.alpha.max_abs() <= 1.0);
            prop_assert_eq!(m.alpha.max_abs(), 1.0);
            for i in 0..d {
                prop_assert_eq!(m.alpha.get(i, i), 0.0);
            }
            // K_ij = K (1 + delta alpha_ij)
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        let back = m.reference_diffusivity * (1.0 + m.delta * m.alpha.get(i, j));
                        prop_assert!((back - raw.get(i, j)).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
