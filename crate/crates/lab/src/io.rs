//! On-disk formats: field snapshots, trajectory manifests and CSV reports.
//!
//! A snapshot is a text file with header `# n N t` followed by one row per
//! node, `x_1 [x_2] value`. A trajectory directory holds one snapshot per
//! (time, species) under `snapshots/` and a `manifest.txt` of `key = value`
//! lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context, Result};
use crossdiff_core::carleson::{DecayProbe, NormReport};
use crossdiff_core::model::{InteractionMatrix, ReducedModel};
use crossdiff_core::semigroup::TimeGrid;
use crossdiff_core::solver::ContractionReport;
use crossdiff_core::{make_grid, GridSpec, ScalarField, Scheme, SpeciesVector, Trajectory};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.txt";
const SNAPSHOT_DIR: &str = "snapshots";

pub fn render_snapshot(field: &ScalarField, t: f64) -> String {
    let grid = field.grid();
    let mut out = format!("# {} {} {}\n", grid.dim(), grid.points(), t);
    for (idx, value) in field.values().iter().enumerate() {
        let x = grid.node(idx);
        match grid.dim() {
            1 => writeln!(out, "{} {}", x[0], value),
            _ => writeln!(out, "{} {} {}", x[0], x[1], value),
        }
        .unwrap();
    }
    out
}

pub fn parse_snapshot(text: &str) -> Result<(ScalarField, f64)> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty snapshot"))?;
    let fields: Vec<&str> = header
        .strip_prefix('#')
        .ok_or_else(|| anyhow!("snapshot header must start with '#'"))?
        .split_whitespace()
        .collect();
    ensure!(fields.len() == 3, "snapshot header needs `# n N t`, got {header:?}");
    let grid = make_grid(fields[0].parse()?, fields[1].parse()?)?;
    let t: f64 = fields[2].parse()?;
    let mut values = Vec::with_capacity(grid.len());
    for (row, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
        let cols: Vec<&str> = line.split_whitespace().collect();
        ensure!(cols.len() == grid.dim() + 1, "row {row}: expected {} columns", grid.dim() + 1);
        values.push(cols[grid.dim()].parse::<f64>().with_context(|| format!("row {row}"))?);
    }
    Ok((ScalarField::new(grid, values)?, t))
}

pub fn write_snapshot(path: &Path, field: &ScalarField, t: f64) -> Result<()> {
    fs::write(path, render_snapshot(field, t)).with_context(|| format!("writing {}", path.display()))
}

pub fn read_snapshot(path: &Path) -> Result<(ScalarField, f64)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_snapshot(&text).with_context(|| format!("in {}", path.display()))
}

/// Ordered `key = value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.entries
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| anyhow!("manifest lacks {key:?}"))
    }

    pub fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        self.get(key)?.parse::<T>().with_context(|| format!("manifest key {key:?}"))
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.get(key)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| s.trim().parse::<f64>().with_context(|| format!("manifest key {key:?}")))
            .collect()
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut manifest = Manifest::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("manifest line {}: expected `key = value`", n + 1))?;
            manifest.set(k.trim(), v.trim());
        }
        Ok(manifest)
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.render().as_bytes()))
    }
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn snapshot_path(dir: &Path, k: usize, species: usize) -> PathBuf {
    dir.join(SNAPSHOT_DIR).join(format!("t{k:05}_s{species}.txt"))
}

pub fn trajectory_manifest(traj: &Trajectory) -> Manifest {
    let grid = traj.grid();
    let mut m = Manifest::default();
    m.set("format", "crossdiff-trajectory-1");
    m.set("code_version", env!("CARGO_PKG_VERSION"));
    m.set("scheme", traj.scheme().name());
    m.set("dim", grid.dim());
    m.set("points", grid.points());
    m.set("species", traj.species_count());
    m.set("truncated", traj.truncated());
    m.set("times", join(traj.times().iter().copied()));
    if let Some(model) = traj.model() {
        m.set("delta", model.delta);
        m.set("reference_diffusivity", model.reference_diffusivity);
        m.set("closeness_margin", model.closeness_margin);
        m.set("closeness_threshold", model.closeness_threshold);
        m.set("alpha", join(model.alpha.entries().iter().copied()));
    }
    m
}

/// Writes snapshots and the manifest; `extra` entries (config hash, seeds,
/// ...) are merged into the manifest.
pub fn save_trajectory(dir: &Path, traj: &Trajectory, extra: &[(&str, String)]) -> Result<Manifest> {
    fs::create_dir_all(dir.join(SNAPSHOT_DIR))
        .with_context(|| format!("creating {}", dir.display()))?;
    for (k, (state, &t)) in traj.states().iter().zip(traj.times()).enumerate() {
        for (i, field) in state.iter().enumerate() {
            write_snapshot(&snapshot_path(dir, k, i), field, t)?;
        }
    }
    let mut manifest = trajectory_manifest(traj);
    for (k, v) in extra {
        manifest.set(k, v);
    }
    fs::write(dir.join(MANIFEST_FILE), manifest.render())?;
    Ok(manifest)
}

pub fn load_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    Manifest::parse(&text)
}

pub fn manifest_model(manifest: &Manifest) -> Result<Option<ReducedModel>> {
    if !manifest.entries.contains_key("alpha") {
        return Ok(None);
    }
    let d: usize = manifest.parse_value("species")?;
    let alpha = InteractionMatrix::from_rows(d, manifest.list("alpha")?)?;
    let mut model = ReducedModel::from_alpha(alpha, manifest.parse_value("delta")?)?;
    model.reference_diffusivity = manifest.parse_value("reference_diffusivity")?;
    model.closeness_threshold = manifest.parse_value("closeness_threshold")?;
    Ok(Some(model))
}

pub fn load_trajectory(dir: &Path) -> Result<(Trajectory, Manifest)> {
    let manifest = load_manifest(dir)?;
    let grid: GridSpec = make_grid(manifest.parse_value("dim")?, manifest.parse_value("points")?)?;
    let d: usize = manifest.parse_value("species")?;
    let times = TimeGrid::from_times(manifest.list("times")?)?;
    let mut states = Vec::with_capacity(times.len());
    for (k, &t) in times.times().iter().enumerate() {
        let mut fields = Vec::with_capacity(d);
        for i in 0..d {
            let (field, stored_t) = read_snapshot(&snapshot_path(dir, k, i))?;
            ensure!(field.grid() == grid, "snapshot ({k}, {i}) is on a different grid");
            ensure!(stored_t == t, "snapshot ({k}, {i}) has t = {stored_t}, manifest says {t}");
            fields.push(field);
        }
        states.push(SpeciesVector::new(fields)?);
    }
    let scheme_name = manifest.get("scheme")?;
    let scheme = Scheme::from_name(scheme_name)
        .ok_or_else(|| anyhow!("unknown scheme {scheme_name:?} in manifest"))?;
    let mut traj = Trajectory::new(times, states, scheme)?;
    if let Some(model) = manifest_model(&manifest)? {
        traj = traj.with_model(model, manifest.parse_value("truncated")?);
    }
    Ok((traj, manifest))
}

fn csv_preamble(p: Option<f64>, grid: GridSpec, manifest_hash: &str) -> String {
    let p = p.map_or_else(|| "-".to_string(), |p| p.to_string());
    format!("# p = {p}; grid = {}x{}; manifest = {manifest_hash}\n", grid.dim(), grid.points())
}

pub fn norm_report_csv(report: &NormReport, grid: GridSpec, manifest_hash: &str) -> String {
    let mut out = csv_preamble(Some(report.p), grid, manifest_hash);
    out.push_str("p,sup_norm,seminorm,norm,radius,center_x,center_y,species,scanned,skipped\n");
    let (radius, cx, cy, species) = match report.attained {
        Some(a) => (
            a.cylinder.radius.to_string(),
            a.cylinder.center[0].to_string(),
            a.cylinder.center[1].to_string(),
            a.species.to_string(),
        ),
        None => Default::default(),
    };
    writeln!(
        out,
        "{},{},{},{},{radius},{cx},{cy},{species},{},{}",
        report.p,
        report.sup_norm,
        report.seminorm,
        report.norm(),
        report.scanned,
        report.skipped
    )
    .unwrap();
    out
}

pub fn decay_csv(probe: &DecayProbe, grid: GridSpec, manifest_hash: &str) -> String {
    let mut out = csv_preamble(None, grid, manifest_hash);
    let beta: Vec<String> = probe.beta.iter().map(|b| b.to_string()).collect();
    let slope = probe.slope.map_or_else(String::new, |s| s.to_string());
    writeln!(
        out,
        "# k = {}; beta = {}; slope = {slope}; fit = [{}, {}]; max_scaled = {}",
        probe.k,
        beta.join(" "),
        probe.fit_window.0,
        probe.fit_window.1,
        probe.max_scaled
    )
    .unwrap();
    out.push_str("t,sup,scaled\n");
    for s in &probe.samples {
        writeln!(out, "{},{},{}", s.t, s.sup, s.scaled).unwrap();
    }
    out
}

pub fn contraction_csv(report: &ContractionReport) -> String {
    let mut out = format!(
        "# theta_hat = {}; converged = {}; data_exceeds_delta = {}\niterate,distance\n",
        report.theta_hat, report.converged, report.data_exceeds_delta
    );
    for (m, d) in report.distances.iter().enumerate() {
        writeln!(out, "{},{}", m + 1, d).unwrap();
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    if path.exists() && !path.is_dir() {
        bail!("{} exists and is not a directory", path.display());
    }
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}
