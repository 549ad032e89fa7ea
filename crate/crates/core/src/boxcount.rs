//! Anchored-grid box counting and log-log box-dimension estimates.
//!
//! Cells have side `δ` and are anchored at the lower corner of the ambient box.
//! A point on a cell boundary belongs to the lower of the two adjacent cells.
//! A box is counted in every cell its interior meets; along a degenerate axis
//! it follows the point rule. Grid-aligned cylinders therefore occupy exactly
//! one cell each.

use std::collections::HashSet;

use crate::error::{domain, usage, Error, Result};
use crate::exec::{self, Exec};
use crate::geometry::{AmbientBox, Bbox, Point};
use crate::model::{cylinder_cover_with, CoverOptions, CylinderCover, Rifs};
use crate::omega::OmegaSeq;

/// Grid coordinates within this distance of an integer are treated as lying
/// on the boundary, absorbing rounding in composed maps.
pub const SNAP_TOL: f64 = 1e-9;

/// Minimum number of rungs in a ladder passed to [`estimate_box_dims`].
pub const MIN_RUNGS: usize = 4;

type Cell = (i64, i64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGrid {
    origin: Point,
    delta: f64,
}

impl BoxGrid {
    /// Grid of side `delta` anchored at the ambient box corner.
    pub fn anchored(ambient: &AmbientBox, delta: f64) -> Result<Self> {
        BoxGrid::shifted(ambient, delta, 0.0)
    }

    /// Grid whose anchor is moved by `-shift·delta` along every axis.
    pub fn shifted(ambient: &AmbientBox, delta: f64, shift: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return domain(format!("box side must be positive, got {delta}"));
        }
        let lo = ambient.bounds().lo;
        Ok(BoxGrid {
            origin: [lo[0] - shift * delta, lo[1] - shift * delta],
            delta,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn coord(&self, x: f64, axis: usize) -> f64 {
        let t = (x - self.origin[axis]) / self.delta;
        let r = t.round();
        if (t - r).abs() <= SNAP_TOL {
            r
        } else {
            t
        }
    }

    fn point_index(t: f64) -> i64 {
        (t.ceil() as i64 - 1).max(0)
    }

    pub fn cell_of(&self, p: Point) -> Cell {
        (
            Self::point_index(self.coord(p[0], 0)),
            Self::point_index(self.coord(p[1], 1)),
        )
    }

    /// Cells met by `[lo, hi]` along one axis.
    fn span(&self, lo: f64, hi: f64, axis: usize) -> (i64, i64) {
        let (a, b) = (self.coord(lo, axis), self.coord(hi, axis));
        if b <= a {
            let i = Self::point_index(a);
            return (i, i);
        }
        let first = (a.floor() as i64).max(0);
        (first, (b.ceil() as i64 - 1).max(first))
    }

    fn insert_box(&self, b: &Bbox, out: &mut HashSet<Cell>) {
        let (i0, i1) = self.span(b.lo[0], b.hi[0], 0);
        let (j0, j1) = self.span(b.lo[1], b.hi[1], 1);
        for i in i0..=i1 {
            for j in j0..=j1 {
                out.insert((i, j));
            }
        }
    }

    /// Number of cells meeting at least one of the boxes.
    pub fn count_boxes(&self, boxes: &[Bbox], exec: Exec) -> u64 {
        self.count(boxes, exec, |b, set| self.insert_box(b, set))
    }

    /// Number of cells holding at least one of the points.
    pub fn count_points(&self, points: &[Point], exec: Exec) -> u64 {
        self.count(points, exec, |p, set| {
            set.insert(self.cell_of(*p));
        })
    }

    fn count<T, F>(&self, items: &[T], exec: Exec, insert: F) -> u64
    where
        T: Sync,
        F: Fn(&T, &mut HashSet<Cell>) + Sync + Send,
    {
        let parts = (4 * exec::workers(exec)).max(1);
        let size = items.len().div_ceil(parts).max(1);
        let chunks: Vec<&[T]> = items.chunks(size).collect();
        let sets = exec::map_slice(exec, &chunks, |chunk| {
            let mut set = HashSet::new();
            for it in *chunk {
                insert(it, &mut set);
            }
            set
        });
        let mut all: HashSet<Cell> = HashSet::new();
        for s in sets {
            all.extend(s);
        }
        all.len() as u64
    }
}

/// `N_δ` of a cylinder cover: anchored-grid cells meeting some cylinder box.
/// Returns 1 when `δ` exceeds the ambient diameter.
pub fn count_boxes(
    cover: &CylinderCover,
    ambient: &AmbientBox,
    delta: f64,
    exec: Exec,
) -> Result<u64> {
    let grid = BoxGrid::anchored(ambient, delta)?;
    if delta > ambient.diameter() {
        return Ok(1);
    }
    Ok(grid.count_boxes(cover.boxes(), exec))
}

/// `N_δ` of a finite point set. Returns 1 when `δ` exceeds the ambient
/// diameter.
pub fn count_points(points: &[Point], ambient: &AmbientBox, delta: f64, exec: Exec) -> Result<u64> {
    let grid = BoxGrid::anchored(ambient, delta)?;
    if points.is_empty() {
        return Ok(0);
    }
    if delta > ambient.diameter() {
        return Ok(1);
    }
    Ok(grid.count_points(points, exec))
}

/// `[base^-from, …, base^-to]`.
pub fn geometric_ladder(base: f64, from: i32, to: i32) -> Result<Vec<f64>> {
    if !(base > 1.0) || from > to {
        return usage(format!(
            "invalid ladder base {base}, exponents {from}..{to}"
        ));
    }
    Ok((from..=to).map(|k| base.powi(-k)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxCountRow {
    pub delta: f64,
    pub count: u64,
    /// Depth of the cover that was counted.
    pub depth: usize,
    /// `log N_δ / (-log δ)`.
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxCountTable {
    pub source: String,
    pub rows: Vec<BoxCountRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxDimEstimate {
    pub table: BoxCountTable,
    /// Smallest exponent over the trailing half of the ladder.
    pub lower_est: f64,
    /// Largest exponent over the trailing half of the ladder.
    pub upper_est: f64,
    /// Least-squares slope of `log N_δ` against `-log δ` over the whole ladder.
    pub slope: f64,
    pub slope_window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoxDimOptions {
    pub cover: CoverOptions,
    /// Grid anchor offset as a fraction of `δ`.
    pub grid_shift: f64,
}

fn check_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < MIN_RUNGS {
        return usage(format!(
            "ladder needs at least {MIN_RUNGS} rungs, got {}",
            ladder.len()
        ));
    }
    if ladder.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return usage("ladder rungs must lie in (0,1)");
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return usage("ladder must be strictly decreasing");
    }
    Ok(())
}

/// Count each rung `δ` on the shallowest cover with `error_bound ≤ δ/4` and
/// summarise the exponents.
pub fn estimate_box_dims(
    rifs: &Rifs,
    omega: &OmegaSeq,
    ladder: &[f64],
    opts: &BoxDimOptions,
) -> Result<BoxDimEstimate> {
    check_ladder(ladder)?;
    let ambient = rifs.ambient();
    let mut depth = 1;
    let mut cover = cylinder_cover_with(rifs, omega, depth, &opts.cover)?;
    let mut rows = Vec::with_capacity(ladder.len());
    for &delta in ladder {
        while cover.error_bound() > delta / 4.0 {
            depth += 1;
            cover = match cylinder_cover_with(rifs, omega, depth, &opts.cover) {
                Err(Error::Resource {
                    what,
                    requested,
                    budget,
                    ..
                }) => {
                    return Err(Error::Resource {
                        what: format!("{what} for box side {delta}"),
                        requested,
                        budget,
                        best_error: Some(cover.error_bound()),
                    })
                }
                other => other?,
            };
        }
        let count = if delta > ambient.diameter() {
            1
        } else {
            BoxGrid::shifted(ambient, delta, opts.grid_shift)?
                .count_boxes(cover.boxes(), opts.cover.exec)
        };
        rows.push(BoxCountRow {
            delta,
            count,
            depth,
            exponent: (count as f64).ln() / -delta.ln(),
        });
    }

    let tail = &rows[rows.len() / 2..];
    let lower_est = tail
        .iter()
        .map(|r| r.exponent)
        .fold(f64::INFINITY, f64::min);
    let upper_est = tail
        .iter()
        .map(|r| r.exponent)
        .fold(f64::NEG_INFINITY, f64::max);
    let xs: Vec<f64> = rows.iter().map(|r| -r.delta.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| (r.count as f64).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(BoxDimEstimate {
        table: BoxCountTable {
            source: format!("F_{omega}"),
            rows,
        },
        lower_est,
        upper_est,
        slope: sxy / sxx,
        slope_window: (ladder[0], ladder[ladder.len() - 1]),
    })
}
