//! `L^p(R^n)` norms of the gradient of the Gaussian heat kernel
//! `Phi(t, x) = (4 pi t)^{-n/2} exp(-|x|^2 / 4t)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Write;

use crate::{Error, Result};

/// Radial quadrature nodes per decade of radius.
const NODES_PER_DECADE: f64 = 4096.0;
/// Inner and outer radius in units of `sqrt(t)`.
const INNER_RADIUS: f64 = 1e-7;
const OUTER_RADIUS: f64 = 16.0;

/// Largest admissible max/min ratio across a scaling report.
pub const KERNEL_SPREAD_LIMIT: f64 = 1.02;

/// `|grad Phi(t, x)|` as a function of `r = |x|`.
fn gradient_profile(t: f64, r: f64, dim: usize) -> f64 {
    libm::pow(4.0 * PI * t, -(dim as f64) / 2.0) * r / (2.0 * t) * libm::exp(-r * r / (4.0 * t))
}

/// Surface measure of the unit sphere in `R^n`.
fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        _ => 2.0 * PI,
    }
}

fn check_args(t: f64, p: f64, dim: usize) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Argument(format!("kernel time must be positive, got {t}")));
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::Argument(format!("L^p exponent must be >= 1, got {p}")));
    }
    if dim != 1 && dim != 2 {
        return Err(Error::Config(format!("unsupported dimension {dim}")));
    }
    Ok(())
}

/// Maximum of `|grad Phi(t, .)|`, attained on the sphere `|x| = sqrt(2t)`.
pub fn kernel_gradient_max(t: f64, dim: usize) -> Result<f64> {
    check_args(t, f64::INFINITY, dim)?;
    Ok(gradient_profile(t, libm::sqrt(2.0 * t), dim))
}

/// `|| grad Phi(t, .) ||_{L^p(R^n)}` by trapezoidal quadrature in `log r`.
pub fn kernel_gradient_lp(t: f64, p: f64, dim: usize) -> Result<f64> {
    check_args(t, p, dim)?;
    if p.is_infinite() {
        return kernel_gradient_max(t, dim);
    }
    let scale = libm::sqrt(t);
    let (lo, hi) = (libm::log(INNER_RADIUS * scale), libm::log(OUTER_RADIUS * scale));
    let decades = (hi - lo) / core::f64::consts::LN_10;
    let intervals = libm::ceil(decades * NODES_PER_DECADE) as usize;
    let ds = (hi - lo) / intervals as f64;
    let integrand = |s: f64| {
        let r = libm::exp(s);
        // dr = r ds
        libm::pow(gradient_profile(t, r, dim), p) * libm::pow(r, dim as f64)
    };
    let interior: f64 = (1..intervals).map(|k| integrand(lo + k as f64 * ds)).sum();
    let total = ds * (interior + 0.5 * (integrand(lo) + integrand(hi))) * sphere_area(dim);
    Ok(libm::pow(total, 1.0 / p))
}

/// `-n/2 - 1/2 + n/(2p)`, the power of `t` governing the gradient norm.
pub fn kernel_scaling_exponent(dim: usize, p: f64) -> f64 {
    let n = dim as f64;
    let tail = if p.is_infinite() { 0.0 } else { n / (2.0 * p) };
    -n / 2.0 - 0.5 + tail
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub t: f64,
    pub norm: f64,
    /// `norm / t^{exponent}`; constant in `t` when the scaling law holds.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelEstimateReport {
    pub dim: usize,
    pub p: f64,
    pub samples: Vec<KernelSample>,
}

impl KernelEstimateReport {
    /// `max ratio / min ratio` across the samples.
    pub fn spread(&self) -> f64 {
        let max = self.samples.iter().map(|s| s.ratio).fold(f64::NEG_INFINITY, f64::max);
        let min = self.samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn passed(&self) -> bool {
        self.samples.iter().all(|s| s.ratio.is_finite() && s.ratio > 0.0)
            && self.spread() <= KERNEL_SPREAD_LIMIT
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,norm,ratio\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:e},{:e},{:e}", s.t, s.norm, s.ratio);
        }
        out
    }
}

pub fn kernel_scaling_report(dim: usize, p: f64, times: &[f64]) -> Result<KernelEstimateReport> {
    if times.is_empty() {
        return Err(Error::NoSamples);
    }
    let exponent = kernel_scaling_exponent(dim, p);
    let samples = times
        .iter()
        .map(|&t| {
            let norm = kernel_gradient_lp(t, p, dim)?;
            Ok(KernelSample { t, norm, ratio: norm / libm::pow(t, exponent) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelEstimateReport { dim, p, samples })
}
