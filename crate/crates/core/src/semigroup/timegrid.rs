use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dyadic clustering of time nodes towards `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicRefinement {
    pub levels: usize,
    pub steps_per_level: usize,
}

impl Default for DyadicRefinement {
    fn default() -> Self {
        DyadicRefinement { levels: 10, steps_per_level: 8 }
    }
}

/// Strictly increasing output times starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
    refinement: Option<DyadicRefinement>,
}

impl TimeGrid {
    /// `m` uniform steps inside every window `[2^-(j+1) T, 2^-j T]`,
    /// `j < L`, plus `m` uniform steps on `[0, 2^-L T]`.
    pub fn dyadic(horizon: f64, refinement: DyadicRefinement) -> Result<Self> {
        let DyadicRefinement { levels, steps_per_level: m } = refinement;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
        }
        if m == 0 {
            return Err(Error::Config("steps per level must be positive".into()));
        }
        if levels > 60 {
            return Err(Error::Config(format!("too many dyadic levels: {levels}")));
        }
        let bottom = horizon * libm::ldexp(1.0, -(levels as i32));
        let mut times = Vec::with_capacity((levels + 1) * m + 1);
        for k in 0..m {
            times.push(bottom * k as f64 / m as f64);
        }
        for j in (0..levels).rev() {
            let lo = horizon * libm::ldexp(1.0, -(j as i32 + 1));
            for k in 0..m {
                times.push(lo * (1.0 + k as f64 / m as f64));
            }
        }
        times.push(horizon);
        Ok(TimeGrid { times, refinement: Some(refinement) })
    }

    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) || steps == 0 {
            return Err(Error::Config(format!(
                "uniform grid needs positive horizon and steps, got {horizon}, {steps}"
            )));
        }
        let mut times: Vec<f64> = (0..steps).map(|k| horizon * k as f64 / steps as f64).collect();
        times.push(horizon);
        Ok(TimeGrid { times, refinement: None })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times[0] != 0.0 {
            return Err(Error::Config("time grid must start at 0 and have 2+ nodes".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0] || !w[1].is_finite() || w[0].is_nan()) {
            return Err(Error::Config("time grid must be strictly increasing".into()));
        }
        Ok(TimeGrid { times, refinement: None })
    }

    /// Splits every interval into `factor` equal sub-steps.
    pub fn refined(&self, factor: usize) -> TimeGrid {
        let factor = factor.max(1);
        let mut times = Vec::with_capacity((self.times.len() - 1) * factor + 1);
        for w in self.times.windows(2) {
            for k in 0..factor {
                times.push(w[0] + (w[1] - w[0]) * k as f64 / factor as f64);
            }
        }
        times.push(self.horizon());
        TimeGrid { times, refinement: None }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn refinement(&self) -> Option<DyadicRefinement> {
        self.refinement
    }

    /// Indices `k` with `lo <= t_k <= hi` up to a relative slack of 1e-12.
    pub fn indices_within(&self, lo: f64, hi: f64) -> core::ops::Range<usize> {
        let slack = 1e-12 * hi.abs().max(1e-300);
        let start = self.times.partition_point(|&t| t < lo - slack);
        let end = self.times.partition_point(|&t| t <= hi + slack);
        start..end.max(start)
    }
}
