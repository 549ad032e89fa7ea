//! Exact Hausdorff distance between finite point sets.
//!
//! Small inputs are handled by brute force. Above [`ACCEL_THRESHOLD`] points
//! nearest neighbours are found through a uniform bucket grid; the search
//! visits rings of cells until no unvisited cell can hold a closer point, so
//! the result is bit-identical to the brute-force value.

use crate::error::{usage, Result};
use crate::exec::{self, Exec};
use crate::geometry::Point;

pub const ACCEL_THRESHOLD: usize = 10_000;

#[inline]
fn sq_dist(p: Point, q: Point) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    dx * dx + dy * dy
}

pub fn hausdorff_distance(a: &[Point], b: &[Point]) -> Result<f64> {
    hausdorff_distance_with(a, b, Exec::Parallel)
}

pub fn hausdorff_distance_with(a: &[Point], b: &[Point], exec: Exec) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return usage("Hausdorff distance needs two non-empty point sets");
    }
    let accel = a.len().max(b.len()) > ACCEL_THRESHOLD;
    let ab = directed(a, b, accel, exec);
    let ba = directed(b, a, accel, exec);
    Ok(ab.max(ba).sqrt())
}

/// O(|a|·|b|) reference implementation.
pub fn hausdorff_distance_brute(a: &[Point], b: &[Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return usage("Hausdorff distance needs two non-empty point sets");
    }
    Ok(directed(a, b, false, Exec::Sequential)
        .max(directed(b, a, false, Exec::Sequential))
        .sqrt())
}

/// `max_{x∈from} min_{y∈to} |x-y|²`.
fn directed(from: &[Point], to: &[Point], accel: bool, exec: Exec) -> f64 {
    let nearest: Box<dyn Fn(&Point) -> f64 + Sync + Send> = if accel {
        let grid = BucketGrid::new(to);
        Box::new(move |p| grid.nearest_sq(*p))
    } else {
        Box::new(|p| {
            to.iter()
                .map(|&q| sq_dist(*p, q))
                .fold(f64::INFINITY, f64::min)
        })
    };
    exec::map_reduce(exec, from, 0.0, |p| nearest(p), f64::max)
}

struct BucketGrid<'a> {
    points: &'a [Point],
    origin: Point,
    cell: f64,
    nx: i64,
    ny: i64,
    /// Point indices grouped by cell, `starts[c]..starts[c+1]`.
    starts: Vec<usize>,
    order: Vec<usize>,
}

impl<'a> BucketGrid<'a> {
    fn new(points: &'a [Point]) -> Self {
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let (ex, ey) = (hi[0] - lo[0], hi[1] - lo[1]);
        let n = points.len() as f64;
        let mut cell = if ex > 0.0 && ey > 0.0 {
            (ex * ey / n).sqrt()
        } else {
            ex.max(ey) / n
        };
        if !(cell > 0.0) {
            cell = 1.0;
        }
        let nx = ((ex / cell).floor() as i64 + 1).max(1);
        let ny = ((ey / cell).floor() as i64 + 1).max(1);
        let mut grid = BucketGrid {
            points,
            origin: lo,
            cell,
            nx,
            ny,
            starts: Vec::new(),
            order: Vec::new(),
        };
        let keys: Vec<usize> = points
            .iter()
            .map(|&p| {
                let (i, j) = grid.cell_of(p);
                (j.clamp(0, ny - 1) * nx + i.clamp(0, nx - 1)) as usize
            })
            .collect();
        let ncell = (nx * ny) as usize;
        let mut counts = vec![0usize; ncell + 1];
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for c in 0..ncell {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut order = vec![0; points.len()];
        for (idx, &k) in keys.iter().enumerate() {
            order[fill[k]] = idx;
            fill[k] += 1;
        }
        grid.starts = counts;
        grid.order = order;
        grid
    }

    fn cell_of(&self, p: Point) -> (i64, i64) {
        (
            ((p[0] - self.origin[0]) / self.cell).floor() as i64,
            ((p[1] - self.origin[1]) / self.cell).floor() as i64,
        )
    }

    fn scan(&self, i: i64, j: i64, p: Point, best: &mut f64) {
        if i < 0 || j < 0 || i >= self.nx || j >= self.ny {
            return;
        }
        let c = (j * self.nx + i) as usize;
        for &idx in &self.order[self.starts[c]..self.starts[c + 1]] {
            let d = sq_dist(p, self.points[idx]);
            if d < *best {
                *best = d;
            }
        }
    }

    fn nearest_sq(&self, p: Point) -> f64 {
        let (ci, cj) = self.cell_of(p);
        // Rings beyond this radius contain no grid cells.
        let max_ring = [ci, self.nx - 1 - ci, cj, self.ny - 1 - cj]
            .iter()
            .map(|d| d.abs())
            .max()
            .unwrap_or(0)
            + 1;
        let mut best = f64::INFINITY;
        for r in 0..=max_ring {
            if r == 0 {
                self.scan(ci, cj, p, &mut best);
            } else {
                for i in ci - r..=ci + r {
                    self.scan(i, cj - r, p, &mut best);
                    self.scan(i, cj + r, p, &mut best);
                }
                for j in cj - r + 1..=cj + r - 1 {
                    self.scan(ci - r, j, p, &mut best);
                    self.scan(ci + r, j, p, &mut best);
                }
            }
            // Every point in ring r+1 or beyond is at least r cells away.
            let reach = r as f64 * self.cell;
            if best.is_finite() && best <= reach * reach {
                break;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_sets() {
        let a = vec![[0.1, 0.2], [0.5, 0.5]];
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn two_singletons() {
        assert_eq!(
            hausdorff_distance(&[[0.0, 0.0]], &[[1.0, 0.0]]).unwrap(),
            1.0
        );
    }

    #[test]
    fn empty_is_usage_error() {
        assert!(hausdorff_distance(&[], &[[1.0, 0.0]]).is_err());
    }

    #[test]
    fn asymmetric_sets() {
        let a = [[0.0, 0.0], [1.0, 0.0]];
        let b = [[0.0, 0.0]];
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn accelerated_matches_brute_force() {
        let a: Vec<Point> = (0..12_000u64)
            .map(|i| {
                [
                    crate::geometry::halton(i + 1, 2),
                    crate::geometry::halton(i + 1, 3),
                ]
            })
            .collect();
        let b: Vec<Point> = (0..3_000u64)
            .map(|i| {
                [
                    crate::geometry::halton(i + 7, 5),
                    0.5 * crate::geometry::halton(i + 7, 7),
                ]
            })
            .collect();
        let fast = hausdorff_distance(&a, &b).unwrap();
        let slow = hausdorff_distance_brute(&a, &b).unwrap();
        assert_eq!(fast, slow);
        let seq = hausdorff_distance_with(&a, &b, Exec::Sequential).unwrap();
        assert_eq!(fast, seq);
    }

    #[test]
    fn accelerated_on_a_line() {
        let a: Vec<Point> = (0..20_000).map(|i| [i as f64 / 20_000.0, 0.0]).collect();
        let b: Vec<Point> = (0..50).map(|i| [i as f64 / 49.0 + 0.3, 0.0]).collect();
        assert_eq!(
            hausdorff_distance(&a, &b).unwrap(),
            hausdorff_distance_brute(&a, &b).unwrap()
        );
    }
}
