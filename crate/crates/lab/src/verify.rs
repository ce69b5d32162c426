//! Invariant checks on stored trajectories and the report that collects them.

use std::fmt;
use std::fmt::Write as _;

use anyhow::{ensure, Result};
use crossdiff_core::model::{clamp_species, ReducedModel};
use crossdiff_core::{ScalarField, Torus, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `value <= threshold`.
    AtMost,
    /// `value >= threshold`.
    AtLeast,
    /// `value > threshold`.
    Exceeds,
    /// `value < threshold`.
    Below,
}

impl Relation {
    fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Relation::AtMost => value <= threshold,
            Relation::AtLeast => value >= threshold,
            Relation::Exceeds => value > threshold,
            Relation::Below => value < threshold,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Exceeds => ">",
            Relation::Below => "<",
        }
    }
}

/// A measured value with its explicit threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64) -> Self {
        // NaN never passes.
        let passed = relation.holds(value, threshold);
        Check { name: name.into(), value, relation, threshold, passed }
    }

    /// A boolean property recorded as 1 (true) or 0 (false), required to be 1.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Check::new(name, if holds { 1.0 } else { 0.0 }, Relation::AtLeast, 1.0)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {:.6e} {} {:.3e}",
            if self.passed { "pass" } else { "FAIL" },
            self.name,
            self.value,
            self.relation.symbol(),
            self.threshold
        )
    }
}

/// Max over `(t, x)` of `|sum_i w_i - delta|`.
pub fn partition_defect(traj: &Trajectory, delta: f64) -> f64 {
    traj.states()
        .iter()
        .map(|s| s.total().values().iter().map(|v| (v - delta).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

pub fn verify_partition(traj: &Trajectory, delta: f64, tolerance: f64) -> Check {
    Check::new("partition defect max|sum w - delta|", partition_defect(traj, delta), Relation::AtMost, tolerance)
}

pub fn verify_nonnegativity(traj: &Trajectory, floor: f64) -> Check {
    Check::new("min over species, nodes, times", traj.min(), Relation::AtLeast, floor)
}

/// Largest drift of any species' spatial mean.
pub fn mass_drift(traj: &Trajectory) -> f64 {
    let initial: Vec<f64> = traj.initial().iter().map(ScalarField::mean).collect();
    traj.states()
        .iter()
        .flat_map(|s| s.iter().zip(&initial).map(|(f, m)| (f.mean() - m).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

/// Terms of `1/2 d/dt ||w_i^-||^2 + int |grad w_i^-|^2 (1 + sum_j alpha_ij w^_j) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// Max over interior times and species of `|dE/dt + D|`.
    pub residual: f64,
    /// Largest `|dE/dt|` and `D` seen, for scale.
    pub max_rate: f64,
    pub max_dissipation: f64,
    /// Min over `(t, x, i)` of `1 + sum_j alpha_ij w^_j`.
    pub coercivity_min: f64,
}

/// `w^- = min(w, 0)`, `grad w^- = 1_{w<0} grad w` (spectral gradient),
/// `E = 1/2 ||w^-||^2` by the midpoint rule, `dE/dt` by the three-point
/// nonuniform stencil at interior nodes.
pub fn energy_identity_probe(traj: &Trajectory, model: &ReducedModel) -> Result<EnergyReport> {
    let d = traj.species_count();
    ensure!(model.species_count() == d, "model has {} species, trajectory {d}", model.species_count());
    ensure!(traj.len() >= 3, "energy probe needs at least three stored times");
    let grid = traj.grid();
    let torus = Torus::new(grid);
    let cell = 1.0 / grid.len() as f64;
    let times = traj.times();

    let mut energy = vec![vec![0.0; d]; traj.len()];
    let mut dissipation = vec![vec![0.0; d]; traj.len()];
    let mut coercivity_min = f64::INFINITY;
    for (k, state) in traj.states().iter().enumerate() {
        let clamped = clamp_species(state, model.delta);
        for i in 0..d {
            let w = state.species(i).values();
            let grads = torus.gradient(state.species(i));
            let mut e = 0.0;
            let mut diss = 0.0;
            for (node, &value) in w.iter().enumerate() {
                let factor = 1.0
                    + (0..d)
                        .filter(|&j| j != i)
                        .map(|j| model.alpha.get(i, j) * clamped.species(j).values()[node])
                        .sum::<f64>();
                coercivity_min = coercivity_min.min(factor);
                if value < 0.0 {
                    e += 0.5 * value * value;
                    let g2: f64 = grads.iter().map(|g| g.values()[node].powi(2)).sum();
                    diss += g2 * factor;
                }
            }
            energy[k][i] = e * cell;
            dissipation[k][i] = diss * cell;
        }
    }

    let mut residual = 0.0f64;
    let mut max_rate = 0.0f64;
    let mut max_dissipation = 0.0f64;
    for k in 1..traj.len() - 1 {
        let (h1, h2) = (times[k] - times[k - 1], times[k + 1] - times[k]);
        let (a, b, c) = (-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2)));
        for i in 0..d {
            let rate = a * energy[k - 1][i] + b * energy[k][i] + c * energy[k + 1][i];
            residual = residual.max((rate + dissipation[k][i]).abs());
            max_rate = max_rate.max(rate.abs());
            max_dissipation = max_dissipation.max(dissipation[k][i]);
        }
    }
    Ok(EnergyReport { residual, max_rate, max_dissipation, coercivity_min })
}

/// Provenance plus named checks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub config_hash: String,
    pub code_version: String,
    pub sections: Vec<(String, Vec<Check>)>,
}

impl VerificationReport {
    pub fn new(config_hash: impl Into<String>) -> Self {
        VerificationReport {
            config_hash: config_hash.into(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            sections: Vec::new(),
        }
    }

    pub fn push(&mut self, section: impl Into<String>, checks: Vec<Check>) {
        self.sections.push((section.into(), checks));
    }

    pub fn section_passed(&self, section: usize) -> bool {
        self.sections[section].1.iter().all(|c| c.passed)
    }

    pub fn passed(&self) -> bool {
        (0..self.sections.len()).all(|s| self.section_passed(s))
    }

    pub fn summary(&self) -> String {
        let mut out = format!("config {} / crossdiff-lab {}\n", self.config_hash, self.code_version);
        for (s, (name, checks)) in self.sections.iter().enumerate() {
            let verdict = if self.section_passed(s) { "PASS" } else { "FAIL" };
            writeln!(out, "{verdict} {name}").unwrap();
            for c in checks {
                writeln!(out, "    {c}").unwrap();
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# config = {}; version = {}\n", self.config_hash, self.code_version);
        out.push_str("section,check,value,relation,threshold,passed\n");
        for (name, checks) in &self.sections {
            for c in checks {
                writeln!(
                    out,
                    "\"{}\",\"{}\",{},{},{},{}",
                    name,
                    c.name,
                    c.value,
                    c.relation.symbol(),
                    c.threshold,
                    c.passed
                )
                .unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_initial_data, InitialDataSpec};
    use crossdiff_core::model::{reduce_coefficients, RawCoefficients};
    use crossdiff_core::semigroup::{heat_flow, DyadicRefinement, TimeGrid};
    use crossdiff_core::{make_grid, Scheme, SpeciesVector};

    fn model(delta: f64) -> ReducedModel {
        let raw = RawCoefficients::from_upper_triangular(3, &[0.9, 1.1, 1.0]).unwrap();
        reduce_coefficients(&raw).unwrap().with_delta(delta).unwrap()
    }

    #[test]
    fn checks_report_thresholds() {
        let c = Check::new("x", 2.0, Relation::AtMost, 1.0);
        assert!(!c.passed);
        assert!(c.to_string().contains("[FAIL] x"));
        assert!(!Check::new("nan", f64::NAN, Relation::AtLeast, 0.0).passed);
        assert!(Check::flag("f", true).passed);
    }

    #[test]
    fn uniform_data_checks() {
        let g = make_grid(1, 32).unwrap();
        let h = generate_initial_data(&InitialDataSpec::Uniform, g, 3, 0.1).unwrap();
        let tg = TimeGrid::dyadic(0.5, DyadicRefinement { levels: 3, steps_per_level: 4 }).unwrap();
        let traj = heat_flow(&Torus::new(g), &h, &tg).unwrap();
        assert_eq!(traj.min(), 0.1 / 3.0);
        assert!(verify_partition(&traj, 0.1, 1e-12).passed);
        assert!(verify_nonnegativity(&traj, -1e-8).passed);
        let e = energy_identity_probe(&traj, &model(0.1)).unwrap();
        assert_eq!(e.residual, 0.0);
        assert!(e.coercivity_min >= 0.5);
        assert_eq!(mass_drift(&traj), 0.0);
    }

    #[test]
    fn negative_bump_shows_up_in_the_energy() {
        let g = make_grid(1, 64).unwrap();
        let tg = TimeGrid::dyadic(0.01, DyadicRefinement { levels: 4, steps_per_level: 8 }).unwrap();
        let h = generate_initial_data(&InitialDataSpec::Uniform, g, 3, 0.03).unwrap();
        let bump = crossdiff_core::ScalarField::from_fn(g, |x| {
            -0.05 * (-((x[0] - 0.5) / 0.05).powi(2)).exp()
        });
        let mut fields = h.fields().to_vec();
        fields[0] = fields[0].add(&bump).unwrap();
        let bumped = SpeciesVector::new(fields).unwrap();
        let traj = heat_flow(&Torus::new(g), &bumped, &tg).unwrap();
        let traj = Trajectory::new(tg, traj.states().to_vec(), Scheme::Synthetic).unwrap();
        assert!(!verify_nonnegativity(&traj, -1e-8).passed);
        let e = energy_identity_probe(&traj, &model(0.03)).unwrap();
        assert!(e.residual > 0.0 && e.max_dissipation > 0.0);
        assert!(e.coercivity_min > 0.5);
    }

    #[test]
    fn report_rendering() {
        let mut r = VerificationReport::new("abc");
        r.push("one", vec![Check::new("a", 1.0, Relation::AtMost, 2.0)]);
        r.push("two", vec![Check::new("b", 3.0, Relation::AtMost, 2.0)]);
        assert!(r.section_passed(0) && !r.section_passed(1) && !r.passed());
        assert!(r.summary().contains("FAIL two"));
        assert_eq!(r.to_csv().lines().count(), 4);
    }
}
