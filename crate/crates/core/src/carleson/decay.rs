use alloc::format;
use alloc::vec::Vec;

use crate::fields::{ScalarField, Torus};
use crate::trajectory::Trajectory;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySample {
    pub t: f64,
    /// `sup_x |d_t^k d_x^beta w(t)|`, maximized over species.
    pub sup: f64,
    /// `t^{k + |beta|/2} * sup`.
    pub scaled: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayProbe {
    pub k: usize,
    pub beta: Vec<usize>,
    pub samples: Vec<DecaySample>,
    pub max_scaled: f64,
    /// Least-squares slope of `log sup` against `log t` over `fit_window`.
    pub slope: Option<f64>,
    pub fit_window: (f64, f64),
}

impl DecayProbe {
    /// Expected power law `-(k + |beta|/2)`.
    pub fn expected_slope(&self) -> f64 {
        -(self.k as f64 + self.beta.iter().sum::<usize>() as f64 / 2.0)
    }
}

/// Weights of the derivative at `at` of the quadratic through `x`.
fn lagrange_slope_weights(x: [f64; 3], at: f64) -> [f64; 3] {
    let mut w = [0.0; 3];
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        w[a] = ((at - x[b]) + (at - x[c])) / ((x[a] - x[b]) * (x[a] - x[c]));
    }
    w
}

/// Samples of `t^{k+|beta|/2} sup_x |d_t^k d_x^beta w|` for `t > 0`.
///
/// Spatial derivatives are spectral; the time derivative (`k = 1`) uses the
/// three-point stencil on the stored (nonuniform) times, one-sided at the
/// final node. The slope is fitted over `fit_window`, by default
/// `[t_1, 100 t_1]`.
pub fn decay_probe(
    traj: &Trajectory,
    k: usize,
    beta: &[usize],
    fit_window: Option<(f64, f64)>,
) -> Result<DecayProbe> {
    let grid = traj.grid();
    let order = k + beta.iter().sum::<usize>();
    if k > 1 || beta.len() != grid.dim() || order > 2 {
        return Err(Error::Argument(format!(
            "unsupported derivative order k = {k}, beta = {beta:?}"
        )));
    }
    let times = traj.times();
    let needed = if k == 1 { 3 } else { 2 };
    if times.len() < needed {
        return Err(Error::Stencil(format!(
            "{} stored times, the stencil needs {needed}",
            times.len()
        )));
    }
    let torus = Torus::new(grid);
    let spatial: Vec<Vec<ScalarField>> = traj
        .states()
        .iter()
        .map(|s| {
            s.iter()
                .map(|f| if order - k == 0 { f.clone() } else { torus.derivative(f, beta) })
                .collect()
        })
        .collect();

    let last = times.len() - 1;
    let power = order as f64 - k as f64 / 2.0;
    let mut samples = Vec::with_capacity(last);
    for j in 1..=last {
        let sup = if k == 0 {
            spatial[j].iter().map(ScalarField::sup_norm).fold(0.0, f64::max)
        } else {
            let nodes = if j < last { [j - 1, j, j + 1] } else { [j - 2, j - 1, j] };
            let w = lagrange_slope_weights(nodes.map(|n| times[n]), times[j]);
            (0..traj.species_count())
                .map(|i| {
                    let f = nodes.map(|n| spatial[n][i].values());
                    (0..grid.len())
                        .map(|x| (w[0] * f[0][x] + w[1] * f[1][x] + w[2] * f[2][x]).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        };
        let t = times[j];
        samples.push(DecaySample { t, sup, scaled: libm::pow(t, power) * sup });
    }
    let max_scaled = samples.iter().map(|s| s.scaled).fold(0.0, f64::max);
    let window = fit_window.unwrap_or((times[1], 100.0 * times[1]));
    let slope = fit_slope(&samples, window);
    Ok(DecayProbe { k, beta: beta.to_vec(), samples, max_scaled, slope, fit_window: window })
}

fn fit_slope(samples: &[DecaySample], (lo, hi): (f64, f64)) -> Option<f64> {
    let slack = 1e-12 * hi;
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.t >= lo - slack && s.t <= hi + slack && s.sup > 0.0)
        .map(|s| (libm::log(s.t), libm::log(s.sup)))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_is_exact_on_quadratics() {
        let x = [0.1, 0.25, 0.7];
        let f = |t: f64| 3.0 * t * t - 2.0 * t + 0.5;
        for at in [0.25, 0.7] {
            let w = lagrange_slope_weights(x, at);
            let d = w[0] * f(x[0]) + w[1] * f(x[1]) + w[2] * f(x[2]);
            assert!((d - (6.0 * at - 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn slope_of_exact_power_law() {
        let samples: Vec<DecaySample> = (1..40)
            .map(|j| {
                let t = libm::exp2(-(j as f64) / 3.0);
                DecaySample { t, sup: 2.0 * libm::pow(t, -0.5), scaled: 2.0 }
            })
            .collect();
        let s = fit_slope(&samples, (1e-4, 1.0)).unwrap();
        assert!((s + 0.5).abs() < 1e-12);
        assert!(fit_slope(&samples, (2.0, 3.0)).is_none());
    }
}
