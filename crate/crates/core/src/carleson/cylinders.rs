use alloc::format;
use alloc::vec::Vec;

use crate::fields::GridSpec;
use crate::semigroup::TimeGrid;
use crate::{Error, Result};

/// Parabolic cylinder `Q_R(z) = [R^2/2, R^2] x B_R(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderSpec {
    /// Flat index of the grid node at the center.
    pub center_node: usize,
    pub center: [f64; 2],
    pub radius: f64,
}

impl CylinderSpec {
    pub fn window(&self) -> (f64, f64) {
        let r2 = self.radius * self.radius;
        (0.5 * r2, r2)
    }
}

/// Discretization of the supremum over `(z, R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderLadder {
    /// Radii per octave of `R`; 2 means `R^2` halves from rung to rung.
    pub radii_per_octave: usize,
    /// Node stride between centers; `None` picks `N / 16`.
    pub centers_stride: Option<usize>,
    /// A window `[R^2/2, R^2]` counts as resolved once it holds this many
    /// stored times.
    pub min_window_nodes: usize,
}

impl Default for CylinderLadder {
    fn default() -> Self {
        CylinderLadder { radii_per_octave: 2, centers_stride: None, min_window_nodes: 3 }
    }
}

/// Largest admissible radius: `B_R` covers the torus once `2R >= 1`.
pub const MAX_RADIUS: f64 = 0.5;

/// Radii from `min(1/2, sqrt(T_end))` down to the smallest resolved window.
pub fn cylinder_radii(tg: &TimeGrid, ladder: &CylinderLadder) -> Result<Vec<f64>> {
    if ladder.radii_per_octave == 0 {
        return Err(Error::Config("radii_per_octave must be positive".into()));
    }
    let top = MAX_RADIUS.min(libm::sqrt(tg.horizon()));
    let mut radii = Vec::new();
    for j in 0.. {
        let r = top * libm::exp2(-(j as f64) / ladder.radii_per_octave as f64);
        let r2 = r * r;
        if tg.indices_within(0.5 * r2, r2).len() < ladder.min_window_nodes.max(1) {
            break;
        }
        radii.push(r);
    }
    if radii.is_empty() {
        return Err(Error::Config(format!(
            "no cylinder window holds {} stored times",
            ladder.min_window_nodes
        )));
    }
    Ok(radii)
}

/// Every `(z, R)` pair of the ladder, ordered by increasing `R`, then by `z`.
pub fn enumerate_cylinders(
    grid: GridSpec,
    tg: &TimeGrid,
    ladder: &CylinderLadder,
) -> Result<Vec<CylinderSpec>> {
    let stride = center_stride(grid, ladder)?;
    let mut radii = cylinder_radii(tg, ladder)?;
    radii.reverse();
    let centers = center_nodes(grid, stride);
    let mut out = Vec::with_capacity(radii.len() * centers.len());
    for &radius in &radii {
        out.extend(centers.iter().map(|&node| CylinderSpec {
            center_node: node,
            center: grid.node(node),
            radius,
        }));
    }
    Ok(out)
}

fn center_stride(grid: GridSpec, ladder: &CylinderLadder) -> Result<usize> {
    let stride = ladder.centers_stride.unwrap_or((grid.points() / 16).max(1));
    if stride == 0 || stride > grid.points() {
        return Err(Error::Config(format!(
            "center stride {stride} outside 1..={}",
            grid.points()
        )));
    }
    Ok(stride)
}

fn center_nodes(grid: GridSpec, stride: usize) -> Vec<usize> {
    let n = grid.points();
    let axis: Vec<usize> = (0..n).step_by(stride).collect();
    match grid.dim() {
        1 => axis,
        _ => axis
            .iter()
            .flat_map(|&a| axis.iter().map(move |&b| grid.flat_index([a, b])))
            .collect(),
    }
}

/// Node offsets (as flat-index displacements per axis) of the periodic ball
/// `B_R(0)`; each residue class appears once.
pub(crate) fn ball_offsets(grid: GridSpec, radius: f64) -> Vec<[usize; 2]> {
    let n = grid.points();
    let dim = grid.dim();
    let whole = 2.0 * radius >= 1.0;
    let signed = |a: usize| -> f64 {
        let a = a as i64;
        let a = if a > (n / 2) as i64 { a - n as i64 } else { a };
        a as f64 / n as f64
    };
    let r2 = radius * radius * (1.0 + 1e-12);
    let mut out = Vec::new();
    let second = if dim == 2 { n } else { 1 };
    for a in 0..n {
        for b in 0..second {
            let dist2 = signed(a) * signed(a) + if dim == 2 { signed(b) * signed(b) } else { 0.0 };
            if whole || dist2 <= r2 {
                out.push([a, b]);
            }
        }
    }
    out
}
