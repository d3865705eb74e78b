use std::io::{self, Write};

use crate::model::{self, EcosystemConfig, ModelError, State};
use crate::roots::{bisect, linspace};

const ROOT_TOL: f64 = 1e-8;

/// Zero sets of the diner and waiter rates in the `(D, W)` plane at a fixed
/// cook share. Points are `(D, W)` pairs ordered along the scan lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Nullclines {
    pub cooks: f64,
    pub diner: Vec<(f64, f64)>,
    pub waiter: Vec<(f64, f64)>,
}

impl Nullclines {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "curve,D,W")?;
        for (d, w) in &self.diner {
            writeln!(out, "dD/dt=0,{d},{w}")?;
        }
        for (d, w) in &self.waiter {
            writeln!(out, "dW/dt=0,{d},{w}")?;
        }
        Ok(())
    }
}

/// Distance from `p` to the polyline through `points`.
pub fn distance_to_polyline(points: &[(f64, f64)], p: (f64, f64)) -> f64 {
    let point_dist = |a: (f64, f64)| ((a.0 - p.0).powi(2) + (a.1 - p.1).powi(2)).sqrt();
    let mut best = points.first().map_or(f64::INFINITY, |&a| point_dist(a));
    for seg in points.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
        };
        best = best.min(point_dist((a.0 + t * dx, a.1 + t * dy)));
    }
    best
}

/// Roots of `f` on `[0, 1]` found by scanning `grid` and bisecting each
/// sign change.
fn scan_roots(
    grid: &[f64],
    mut f: impl FnMut(f64) -> Result<f64, ModelError>,
) -> Result<Vec<f64>, ModelError> {
    let mut roots = Vec::new();
    let values = grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>, _>>()?;
    for (i, &v) in values.iter().enumerate() {
        if v == 0.0 {
            roots.push(grid[i]);
        }
    }
    for i in 0..grid.len() - 1 {
        let (a, b) = (values[i], values[i + 1]);
        if a != 0.0 && b != 0.0 && (a > 0.0) != (b > 0.0) {
            roots.push(bisect(&mut f, grid[i], grid[i + 1], a, ROOT_TOL)?);
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Samples both nullclines on `grid_n` scan lines each.
///
/// The diner nullcline is traced along lines of constant `W`, the waiter
/// nullcline along lines of constant `D`.
pub fn nullclines(
    cfg: &EcosystemConfig,
    cooks: f64,
    grid_n: usize,
) -> Result<Nullclines, ModelError> {
    let grid_n = grid_n.max(32);
    let grid = linspace(0.0, 1.0, grid_n);
    let mut out = Nullclines {
        cooks,
        ..Default::default()
    };
    for &w in &grid {
        let roots = scan_roots(&grid, |d| {
            Ok(model::rhs(cfg, &State::new(d, w, cooks))?[0])
        })?;
        out.diner.extend(roots.into_iter().map(|d| (d, w)));
    }
    for &d in &grid {
        let roots = scan_roots(&grid, |w| {
            Ok(model::rhs(cfg, &State::new(d, w, cooks))?[1])
        })?;
        out.waiter.extend(roots.into_iter().map(|w| (d, w)));
    }
    Ok(out)
}
