//! Time-indexed species states and flux series.

use alloc::format;
use alloc::vec::Vec;

use crate::fields::{GridSpec, ScalarField, SpeciesVector};
use crate::model::ReducedModel;
use crate::semigroup::TimeGrid;
use crate::{Error, Result};

/// How a trajectory was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    HeatFlow,
    Duhamel,
    Imex,
    Picard,
    /// Built directly from samples (tests, differences of trajectories).
    Synthetic,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::HeatFlow => "heat",
            Scheme::Duhamel => "duhamel",
            Scheme::Imex => "imex",
            Scheme::Picard => "picard",
            Scheme::Synthetic => "synthetic",
        }
    }

    pub fn from_name(name: &str) -> Option<Scheme> {
        [Scheme::HeatFlow, Scheme::Duhamel, Scheme::Imex, Scheme::Picard, Scheme::Synthetic]
            .into_iter()
            .find(|s| s.name() == name)
    }
}

/// Species states aligned one-to-one with a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: TimeGrid,
    states: Vec<SpeciesVector>,
    scheme: Scheme,
    model: Option<ReducedModel>,
    truncated: bool,
}

impl Trajectory {
    pub fn new(times: TimeGrid, states: Vec<SpeciesVector>, scheme: Scheme) -> Result<Self> {
        if states.len() != times.len() {
            return Err(Error::Shape(format!(
                "{} states for {} time nodes",
                states.len(),
                times.len()
            )));
        }
        let first = &states[0];
        if let Some(k) = states.iter().position(|s| first.check_shape(s).is_err()) {
            return Err(Error::Shape(format!("state {k} does not match the initial state")));
        }
        Ok(Trajectory { times, states, scheme, model: None, truncated: false })
    }

    pub fn with_model(mut self, model: ReducedModel, truncated: bool) -> Self {
        self.model = Some(model);
        self.truncated = truncated;
        self
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.times
    }

    pub fn times(&self) -> &[f64] {
        self.times.times()
    }

    pub fn states(&self) -> &[SpeciesVector] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &SpeciesVector {
        &self.states[k]
    }

    pub fn initial(&self) -> &SpeciesVector {
        &self.states[0]
    }

    pub fn last(&self) -> &SpeciesVector {
        self.states.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn grid(&self) -> GridSpec {
        self.states[0].grid()
    }

    pub fn species_count(&self) -> usize {
        self.states[0].species_count()
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn model(&self) -> Option<&ReducedModel> {
        self.model.as_ref()
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Sup norm over all stored times, nodes and species.
    pub fn sup_norm(&self) -> f64 {
        self.states.iter().map(SpeciesVector::sup_norm).fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.states.iter().map(SpeciesVector::min).fold(f64::INFINITY, f64::min)
    }

    /// Pointwise difference `self - other` on a shared time grid.
    pub fn difference(&self, other: &Trajectory) -> Result<Trajectory> {
        self.check_aligned(other)?;
        let states = self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.times.clone(), states, Scheme::Synthetic)
    }

    /// Largest nodal distance between two aligned trajectories.
    pub fn sup_distance(&self, other: &Trajectory) -> Result<f64> {
        Ok(self.difference(other)?.sup_norm())
    }

    pub(crate) fn check_aligned(&self, other: &Trajectory) -> Result<()> {
        if self.times != other.times {
            return Err(Error::Shape("trajectories use different time grids".into()));
        }
        self.states[0].check_shape(&other.states[0])
    }
}

/// One vector field (`n` components) per species at every time node.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSeries {
    times: TimeGrid,
    /// `fluxes[k][i][m]`: component `m` of species `i` at time `t_k`.
    fluxes: Vec<Vec<Vec<ScalarField>>>,
}

impl FluxSeries {
    pub fn new(times: TimeGrid, fluxes: Vec<Vec<Vec<ScalarField>>>) -> Result<Self> {
        if fluxes.len() != times.len() {
            return Err(Error::Shape(format!(
                "{} flux samples for {} time nodes",
                fluxes.len(),
                times.len()
            )));
        }
        let d = fluxes[0].len();
        let grid = fluxes[0]
            .first()
            .and_then(|f| f.first())
            .map(ScalarField::grid)
            .ok_or_else(|| Error::Shape("empty flux sample".into()))?;
        for sample in &fluxes {
            if sample.len() != d {
                return Err(Error::Shape("species count varies along the flux series".into()));
            }
            for flux in sample {
                if flux.len() != grid.dim() || flux.iter().any(|c| c.grid() != grid) {
                    return Err(Error::Shape("flux component shape mismatch".into()));
                }
            }
        }
        Ok(FluxSeries { times, fluxes })
    }

    /// Samples `f(t)` at every node of `times`.
    pub fn from_fn(
        times: TimeGrid,
        mut f: impl FnMut(f64) -> Vec<Vec<ScalarField>>,
    ) -> Result<Self> {
        let fluxes = times.times().iter().map(|&t| f(t)).collect();
        FluxSeries::new(times, fluxes)
    }

    /// Zero flux for `d` species.
    pub fn zeros(times: TimeGrid, grid: GridSpec, d: usize) -> Self {
        let sample = alloc::vec![alloc::vec![ScalarField::zeros(grid); grid.dim()]; d];
        let fluxes = alloc::vec![sample; times.len()];
        FluxSeries { times, fluxes }
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.times
    }

    pub fn grid(&self) -> GridSpec {
        self.fluxes[0][0][0].grid()
    }

    pub fn species_count(&self) -> usize {
        self.fluxes[0].len()
    }

    pub fn sample(&self, k: usize) -> &[Vec<ScalarField>] {
        &self.fluxes[k]
    }

    pub fn samples(&self) -> &[Vec<Vec<ScalarField>>] {
        &self.fluxes
    }

    /// Largest pointwise Euclidean length `|F_i(t, x)|`.
    pub fn sup_norm(&self) -> f64 {
        let grid = self.grid();
        let mut sup: f64 = 0.0;
        for sample in &self.fluxes {
            for flux in sample {
                for node in 0..grid.len() {
                    let sq: f64 = flux.iter().map(|c| c.values()[node] * c.values()[node]).sum();
                    sup = sup.max(sq);
                }
            }
        }
        libm::sqrt(sup)
    }

    pub fn difference(&self, other: &FluxSeries) -> Result<FluxSeries> {
        if self.times != other.times || self.species_count() != other.species_count() {
            return Err(Error::Shape("flux series are not aligned".into()));
        }
        let fluxes = self
            .fluxes
            .iter()
            .zip(&other.fluxes)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(fa, fb)| fa.iter().zip(fb).map(|(ca, cb)| ca.sub(cb)).collect())
                    .collect::<Result<Vec<Vec<_>>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FluxSeries::new(self.times.clone(), fluxes)
    }
}
