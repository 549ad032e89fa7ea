//! Ambient boxes, contraction maps and their compositions.
//!
//! Points always carry two coordinates. One-dimensional spaces keep the
//! second coordinate at zero, which lets the same map and box machinery serve
//! both the interval and the unit-square examples.

use std::f64::consts::PI;

use crate::error::{domain, usage, Result};

pub type Point = [f64; 2];

/// Slack used when checking that a point lies inside the ambient box.
pub const CONTAINMENT_TOL: f64 = 1e-12;

fn dist(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Axis-aligned closed box. Degenerate (zero-width) axes are allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bbox {
    pub lo: Point,
    pub hi: Point,
}

impl Bbox {
    pub fn new(lo: Point, hi: Point) -> Self {
        Bbox { lo, hi }
    }

    pub fn point(p: Point) -> Self {
        Bbox { lo: p, hi: p }
    }

    pub fn diameter(&self) -> f64 {
        (self.hi[0] - self.lo[0]).hypot(self.hi[1] - self.lo[1])
    }

    pub fn center(&self) -> Point {
        [
            0.5 * (self.lo[0] + self.hi[0]),
            0.5 * (self.lo[1] + self.hi[1]),
        ]
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            self.lo,
            [self.hi[0], self.lo[1]],
            [self.lo[0], self.hi[1]],
            self.hi,
        ]
    }

    pub fn include(&mut self, p: Point) {
        self.lo = [self.lo[0].min(p[0]), self.lo[1].min(p[1])];
        self.hi = [self.hi[0].max(p[0]), self.hi[1].max(p[1])];
    }

    /// Smallest box containing all `points`.
    pub fn hull<I: IntoIterator<Item = Point>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let mut b = Bbox::point(it.next()?);
        for p in it {
            b.include(p);
        }
        Some(b)
    }

    pub fn union(&self, other: &Bbox) -> Bbox {
        let mut b = *self;
        b.include(other.lo);
        b.include(other.hi);
        b
    }

    pub fn contains_point(&self, p: Point, slack: f64) -> bool {
        (0..2).all(|a| p[a] >= self.lo[a] - slack && p[a] <= self.hi[a] + slack)
    }

    pub fn contains_box(&self, other: &Bbox, slack: f64) -> bool {
        self.contains_point(other.lo, slack) && self.contains_point(other.hi, slack)
    }

    /// Euclidean distance from `p` to the box (zero inside).
    pub fn distance_to(&self, p: Point) -> f64 {
        let dx = (self.lo[0] - p[0]).max(0.0).max(p[0] - self.hi[0]);
        let dy = (self.lo[1] - p[1]).max(0.0).max(p[1] - self.hi[1]);
        dx.hypot(dy)
    }

    /// Largest distance from `p` to a point of the box.
    pub fn farthest_distance(&self, p: Point) -> f64 {
        let dx = (p[0] - self.lo[0]).abs().max((self.hi[0] - p[0]).abs());
        let dy = (p[1] - self.lo[1]).abs().max((self.hi[1] - p[1]).abs());
        dx.hypot(dy)
    }
}

/// The compact space `K` every system maps into: an axis-aligned box in one
/// or two dimensions with the Euclidean metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientBox {
    dim: usize,
    bounds: Bbox,
    diameter: f64,
}

impl AmbientBox {
    pub fn new(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let dim = lo.len();
        if !(dim == 1 || dim == 2) || hi.len() != dim {
            return usage(format!(
                "ambient box needs 1 or 2 axes with matching bounds, got lo {lo:?} hi {hi:?}"
            ));
        }
        let mut l = [0.0; 2];
        let mut h = [0.0; 2];
        for a in 0..dim {
            if !(lo[a].is_finite() && hi[a].is_finite() && lo[a] < hi[a]) {
                return domain(format!(
                    "ambient axis {a}: need lo < hi, got {} and {}",
                    lo[a], hi[a]
                ));
            }
            l[a] = lo[a];
            h[a] = hi[a];
        }
        let bounds = Bbox::new(l, h);
        Ok(AmbientBox {
            dim,
            bounds,
            diameter: bounds.diameter(),
        })
    }

    /// `[0,1]` or `[0,1]²`.
    pub fn unit(dim: usize) -> Self {
        let ones = vec![1.0; dim];
        let zeros = vec![0.0; dim];
        AmbientBox::new(&zeros, &ones).expect("unit box is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> Bbox {
        self.bounds
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn center(&self) -> Point {
        self.bounds.center()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.bounds.contains_point(p, CONTAINMENT_TOL)
    }

    /// Corner points of the box (2 in 1-D, 4 in 2-D).
    pub fn corners(&self) -> Vec<Point> {
        let c = self.bounds.corners();
        if self.dim == 1 {
            vec![c[0], c[1]]
        } else {
            c.to_vec()
        }
    }

    /// Deterministic quasi-random point of the box (Halton sequence).
    pub fn sample(&self, index: u64) -> Point {
        let b = &self.bounds;
        let u = halton(index + 1, 2);
        let v = if self.dim == 2 {
            halton(index + 1, 3)
        } else {
            0.0
        };
        [
            b.lo[0] + u * (b.hi[0] - b.lo[0]),
            b.lo[1] + v * (b.hi[1] - b.lo[1]),
        ]
    }
}

/// Radical-inverse (van der Corput) value of `index` in `base`.
pub fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while index > 0 {
        f /= b;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Linear map plus translation on the plane. 1-D maps keep `m[1][1] = 0`
/// so the second coordinate stays at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub m: [[f64; 2]; 2],
    pub t: [f64; 2],
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap {
        m: [[1.0, 0.0], [0.0, 1.0]],
        t: [0.0, 0.0],
    };

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        [
            self.m[0][0] * p[0] + self.m[0][1] * p[1] + self.t[0],
            self.m[1][0] * p[0] + self.m[1][1] * p[1] + self.t[1],
        ]
    }

    /// `self ∘ inner`.
    pub fn then_inner(&self, inner: &AffineMap) -> AffineMap {
        let a = &self.m;
        let b = &inner.m;
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        let t = [
            a[0][0] * inner.t[0] + a[0][1] * inner.t[1] + self.t[0],
            a[1][0] * inner.t[0] + a[1][1] * inner.t[1] + self.t[1],
        ];
        AffineMap { m, t }
    }

    /// Singular values `(σ_min, σ_max)` of the linear part.
    pub fn singular_values(&self) -> (f64, f64) {
        let [[a, b], [c, d]] = self.m;
        let s = a * a + b * b + c * c + d * d;
        let det = (a * d - b * c).abs();
        let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
        let hi = (0.5 * (s + disc)).sqrt();
        let lo = if hi > 0.0 { det / hi } else { 0.0 };
        (lo, hi)
    }
}

/// Which branch of a two-branch inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// The explicit nonlinear maps used by the bundled examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedForm {
    /// Inverse branches of `f(x) = -5x(x-1)`: `x ↦ 1/2 ∓ (1/2)√(1 - 4x/5)`.
    CookieFive(Side),
    /// Inverse branches of `f(x) = 9(x-1/6)(x-5/6)`: `x ↦ 1/2 ∓ (1/3)√(1 + x)`.
    CookieNine(Side),
    /// `(x, y) ↦ (x/2, y²/2)`
    HalfXSquareY,
    /// `(x, y) ↦ (x²/2, y/2 + 1/2)`
    SquareXUpperY,
    /// `(x, y) ↦ (x²/2, y/2)`
    SquareXHalfY,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 7] = [
        ClosedForm::CookieFive(Side::Left),
        ClosedForm::CookieFive(Side::Right),
        ClosedForm::CookieNine(Side::Left),
        ClosedForm::CookieNine(Side::Right),
        ClosedForm::HalfXSquareY,
        ClosedForm::SquareXUpperY,
        ClosedForm::SquareXHalfY,
    ];

    pub fn dim(self) -> usize {
        match self {
            ClosedForm::CookieFive(_) | ClosedForm::CookieNine(_) => 1,
            _ => 2,
        }
    }

    /// Stable identifier used by config files.
    pub fn name(self) -> &'static str {
        match self {
            ClosedForm::CookieFive(Side::Left) => "cookie5_left",
            ClosedForm::CookieFive(Side::Right) => "cookie5_right",
            ClosedForm::CookieNine(Side::Left) => "cookie9_left",
            ClosedForm::CookieNine(Side::Right) => "cookie9_right",
            ClosedForm::HalfXSquareY => "half_x_square_y",
            ClosedForm::SquareXUpperY => "square_x_upper_y",
            ClosedForm::SquareXHalfY => "square_x_half_y",
        }
    }

    pub fn from_name(name: &str) -> Option<ClosedForm> {
        ClosedForm::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Declared Lipschitz bounds. For the inverse branches these are the
    /// reciprocals of the expansion ranges `2 ≤ |f₁'| ≤ 5` and `6 ≤ |f₂'| ≤ 9`.
    /// The quadratic planar maps are only weak contractions on `[0,1]²`.
    fn declared_lip(self) -> (f64, f64) {
        match self {
            ClosedForm::CookieFive(_) => (1.0 / 5.0, 1.0 / 2.0),
            ClosedForm::CookieNine(_) => (1.0 / 9.0, 1.0 / 6.0),
            _ => (0.0, 1.0),
        }
    }

    #[inline]
    fn eval(self, p: Point) -> Point {
        let [x, y] = p;
        match self {
            ClosedForm::CookieFive(side) => {
                let r = 0.5 * (1.0 - 0.8 * x).max(0.0).sqrt();
                match side {
                    Side::Left => [0.5 - r, 0.0],
                    Side::Right => [0.5 + r, 0.0],
                }
            }
            ClosedForm::CookieNine(side) => {
                let r = (1.0 + x).max(0.0).sqrt() / 3.0;
                match side {
                    Side::Left => [0.5 - r, 0.0],
                    Side::Right => [0.5 + r, 0.0],
                }
            }
            ClosedForm::HalfXSquareY => [0.5 * x, 0.5 * y * y],
            ClosedForm::SquareXUpperY => [0.5 * x * x, 0.5 * y + 0.5],
            ClosedForm::SquareXHalfY => [0.5 * x * x, 0.5 * y],
        }
    }

    /// Diagonal of the Jacobian (all closed forms act on each axis separately).
    pub fn derivative(self, p: Point) -> [f64; 2] {
        let [x, y] = p;
        match self {
            ClosedForm::CookieFive(side) => {
                let d = 0.2 / (1.0 - 0.8 * x).sqrt();
                match side {
                    Side::Left => [d, 0.0],
                    Side::Right => [-d, 0.0],
                }
            }
            ClosedForm::CookieNine(side) => {
                let d = 1.0 / (6.0 * (1.0 + x).sqrt());
                match side {
                    Side::Left => [-d, 0.0],
                    Side::Right => [d, 0.0],
                }
            }
            ClosedForm::HalfXSquareY => [0.5, y],
            ClosedForm::SquareXUpperY => [x, 0.5],
            ClosedForm::SquareXHalfY => [x, 0.5],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind {
    Similarity {
        ratio: f64,
        /// Rotation angle in radians (ignored in 1-D).
        rotation: f64,
        reflect: bool,
        translation: Point,
    },
    Affine {
        matrix: [[f64; 2]; 2],
        translation: Point,
    },
    ClosedForm(ClosedForm),
}

/// A self-map of the ambient box with declared bi-Lipschitz bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionMap {
    kind: MapKind,
    dim: usize,
    lip_lo: f64,
    lip_hi: f64,
    linear: Option<AffineMap>,
}

impl ContractionMap {
    /// `x ↦ ±ratio·x + t` on the line.
    pub fn similarity_1d(ratio: f64, reflect: bool, translation: f64) -> Result<Self> {
        check_ratio(ratio)?;
        let s = if reflect { -ratio } else { ratio };
        Ok(ContractionMap {
            kind: MapKind::Similarity {
                ratio,
                rotation: 0.0,
                reflect,
                translation: [translation, 0.0],
            },
            dim: 1,
            lip_lo: ratio,
            lip_hi: ratio,
            linear: Some(AffineMap {
                m: [[s, 0.0], [0.0, 0.0]],
                t: [translation, 0.0],
            }),
        })
    }

    /// `p ↦ ratio·R(rotation)·F·p + t` with `F` an optional reflection in the x-axis.
    pub fn similarity_2d(
        ratio: f64,
        rotation: f64,
        reflect: bool,
        translation: Point,
    ) -> Result<Self> {
        check_ratio(ratio)?;
        if !rotation.is_finite() {
            return domain("rotation must be finite");
        }
        let (s, c) = snap_trig(rotation);
        let f = if reflect { -1.0 } else { 1.0 };
        let m = [[ratio * c, -ratio * s * f], [ratio * s, ratio * c * f]];
        Ok(ContractionMap {
            kind: MapKind::Similarity {
                ratio,
                rotation,
                reflect,
                translation,
            },
            dim: 2,
            lip_lo: ratio,
            lip_hi: ratio,
            linear: Some(AffineMap { m, t: translation }),
        })
    }

    /// General planar affine map; Lipschitz bounds are the singular values.
    pub fn affine(matrix: [[f64; 2]; 2], translation: Point) -> Result<Self> {
        let lin = AffineMap {
            m: matrix,
            t: translation,
        };
        let (lo, hi) = lin.singular_values();
        if !(lo > 0.0 && hi < 1.0) {
            return domain(format!(
                "affine map is not a bi-Lipschitz contraction: singular values {lo} and {hi}"
            ));
        }
        Ok(ContractionMap {
            kind: MapKind::Affine {
                matrix,
                translation,
            },
            dim: 2,
            lip_lo: lo,
            lip_hi: hi,
            linear: Some(lin),
        })
    }

    pub fn closed_form(form: ClosedForm) -> Self {
        let (lip_lo, lip_hi) = form.declared_lip();
        ContractionMap {
            kind: MapKind::ClosedForm(form),
            dim: form.dim(),
            lip_lo,
            lip_hi,
            linear: None,
        }
    }

    /// Cell `(column, row)` of an `m × n` grid on the unit square.
    pub fn grid_cell(m: u32, n: u32, column: u32, row: u32) -> Result<Self> {
        if m == 0 || n == 0 || column >= m || row >= n {
            return usage(format!("cell ({column},{row}) outside {m}x{n} grid"));
        }
        let t = [column as f64 / m as f64, row as f64 / n as f64];
        if m == n {
            ContractionMap::similarity_2d(1.0 / m as f64, 0.0, false, t)
        } else {
            ContractionMap::affine([[1.0 / m as f64, 0.0], [0.0, 1.0 / n as f64]], t)
        }
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lip_lo(&self) -> f64 {
        self.lip_lo
    }

    pub fn lip_hi(&self) -> f64 {
        self.lip_hi
    }

    /// Linear part plus translation, when the map is affine.
    pub fn as_affine(&self) -> Option<&AffineMap> {
        self.linear.as_ref()
    }

    pub fn is_similarity(&self) -> bool {
        matches!(self.kind, MapKind::Similarity { .. })
    }

    /// Contraction ratio of a similarity.
    pub fn ratio(&self) -> Option<f64> {
        match self.kind {
            MapKind::Similarity { ratio, .. } => Some(ratio),
            _ => None,
        }
    }

    /// Evaluate without domain checks.
    #[inline]
    pub fn eval(&self, p: Point) -> Point {
        match (&self.linear, &self.kind) {
            (Some(l), _) => l.apply(p),
            (None, MapKind::ClosedForm(f)) => f.eval(p),
            (None, _) => unreachable!("non-affine maps are closed forms"),
        }
    }

    /// Evaluate at a point of the ambient box.
    pub fn apply(&self, ambient: &AmbientBox, p: Point) -> Result<Point> {
        if !ambient.contains(p) {
            return domain(format!("point {p:?} lies outside the ambient box"));
        }
        Ok(self.eval(p))
    }

    /// Bounding box of the image of `b`. Exact for affine maps and for the
    /// closed forms, which are monotone on each axis separately.
    pub fn image_box(&self, b: &Bbox) -> Bbox {
        Bbox::hull(b.corners().into_iter().map(|c| self.eval(c))).expect("four corners")
    }

    /// Does the map send the ambient box into itself? Checks the corners and
    /// `interior` quasi-random points.
    pub fn maps_into(&self, ambient: &AmbientBox, interior: u64) -> bool {
        ambient
            .corners()
            .into_iter()
            .all(|c| ambient.contains(self.eval(c)))
            && (0..interior).all(|i| ambient.contains(self.eval(ambient.sample(i))))
    }
}

fn check_ratio(ratio: f64) -> Result<()> {
    if ratio > 0.0 && ratio < 1.0 {
        Ok(())
    } else {
        domain(format!("contraction ratio must lie in (0,1), got {ratio}"))
    }
}

/// `(sin, cos)` with exact values at multiples of a quarter turn.
fn snap_trig(angle: f64) -> (f64, f64) {
    let quarters = angle / (0.5 * PI);
    if (quarters - quarters.round()).abs() < 1e-12 {
        match (quarters.round() as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        angle.sin_cos()
    }
}

/// Ordered composition `factors[0] ∘ factors[1] ∘ …`; the last factor is
/// applied first.
#[derive(Debug, Clone, PartialEq)]
pub struct MapComposition {
    factors: Vec<ContractionMap>,
    lip_lo_bound: f64,
    lip_hi_bound: f64,
}

/// Compose a non-empty list of maps. Lipschitz bounds multiply: `Lip⁺` is
/// submultiplicative and `Lip⁻` supermultiplicative, so the products bound
/// the composite from above and below.
pub fn compose(maps: &[ContractionMap]) -> Result<MapComposition> {
    if maps.is_empty() {
        return usage("cannot compose an empty list of maps");
    }
    let dim = maps[0].dim;
    if maps.iter().any(|m| m.dim != dim) {
        return usage("cannot compose maps of different dimension");
    }
    Ok(MapComposition {
        lip_lo_bound: maps.iter().map(|m| m.lip_lo).product(),
        lip_hi_bound: maps.iter().map(|m| m.lip_hi).product(),
        factors: maps.to_vec(),
    })
}

impl MapComposition {
    pub fn factors(&self) -> &[ContractionMap] {
        &self.factors
    }

    pub fn lip_lo_bound(&self) -> f64 {
        self.lip_lo_bound
    }

    pub fn lip_hi_bound(&self) -> f64 {
        self.lip_hi_bound
    }

    pub fn eval(&self, p: Point) -> Point {
        self.factors.iter().rev().fold(p, |q, m| m.eval(q))
    }

    pub fn apply(&self, ambient: &AmbientBox, p: Point) -> Result<Point> {
        if !ambient.contains(p) {
            return domain(format!("point {p:?} lies outside the ambient box"));
        }
        Ok(self.eval(p))
    }

    /// Collapse to a single affine map when every factor is affine.
    pub fn as_affine(&self) -> Option<AffineMap> {
        self.factors.iter().try_fold(AffineMap::IDENTITY, |acc, f| {
            f.as_affine().map(|a| acc.then_inner(a))
        })
    }
}

/// Observed distance ratios over a deterministic sample of point pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipReport {
    pub observed_lo: f64,
    pub observed_hi: f64,
    pub ok: bool,
}

/// Compare the declared Lipschitz bounds of `map` with observed ratios
/// `|map(x) - map(y)| / |x - y|` over `samples` Halton points, each paired
/// with the next sample point and with a nearby point (to probe the local
/// derivative). Coincident pairs are skipped.
pub fn validate_lip_bounds(
    map: &ContractionMap,
    ambient: &AmbientBox,
    samples: usize,
    tol: f64,
) -> Result<LipReport> {
    if samples < 2 {
        return usage("validate_lip_bounds needs at least 2 samples");
    }
    let pts: Vec<Point> = (0..samples as u64).map(|i| ambient.sample(i)).collect();
    let h = 1e-6 * ambient.diameter();
    let b = ambient.bounds();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut record = |p: Point, q: Point| {
        let d = dist(p, q);
        if d == 0.0 {
            return;
        }
        let r = dist(map.eval(p), map.eval(q)) / d;
        lo = lo.min(r);
        hi = hi.max(r);
    };
    for (i, &p) in pts.iter().enumerate() {
        record(p, pts[(i + 1) % pts.len()]);
        for axis in 0..ambient.dim() {
            let mut q = p;
            q[axis] = if p[axis] + h <= b.hi[axis] {
                p[axis] + h
            } else {
                p[axis] - h
            };
            record(p, q);
        }
    }
    for c in ambient.corners() {
        for axis in 0..ambient.dim() {
            let mut q = c;
            q[axis] = if c[axis] + h <= b.hi[axis] {
                c[axis] + h
            } else {
                c[axis] - h
            };
            record(c, q);
        }
    }
    if !lo.is_finite() {
        return usage("all sampled pairs were degenerate");
    }
    let ok = map.lip_lo - tol <= lo && hi <= map.lip_hi + tol;
    Ok(LipReport {
        observed_lo: lo,
        observed_hi: hi,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit1() -> AmbientBox {
        AmbientBox::unit(1)
    }

    #[test]
    fn similarity_third_at_point_nine() {
        let s = ContractionMap::similarity_1d(1.0 / 3.0, false, 0.0).unwrap();
        let p = s.apply(&unit1(), [0.9, 0.0]).unwrap();
        assert!((p[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn cookie_left_branch_endpoints() {
        let s = ContractionMap::closed_form(ClosedForm::CookieFive(Side::Left));
        assert_eq!(s.apply(&unit1(), [0.0, 0.0]).unwrap()[0], 0.0);
        let at1 = s.apply(&unit1(), [1.0, 0.0]).unwrap()[0];
        assert!((at1 - (0.5 - 0.5 * (0.2f64).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn cookie_branches_invert_the_expanding_maps() {
        let f1 = |x: f64| -5.0 * x * (x - 1.0);
        let f2 = |x: f64| 9.0 * (x - 1.0 / 6.0) * (x - 5.0 / 6.0);
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            for side in [Side::Left, Side::Right] {
                let y = ClosedForm::CookieFive(side).eval([x, 0.0])[0];
                assert!((f1(y) - x).abs() < 1e-12);
                let y = ClosedForm::CookieNine(side).eval([x, 0.0])[0];
                assert!((f2(y) - x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_derivatives_match_finite_differences() {
        let h = 1e-6;
        for form in ClosedForm::ALL {
            for i in 1..10 {
                let t = i as f64 / 10.0;
                let p = [t, if form.dim() == 2 { 1.0 - t } else { 0.0 }];
                let d = form.derivative(p);
                for axis in 0..form.dim() {
                    let mut a = p;
                    let mut b = p;
                    a[axis] -= h;
                    b[axis] += h;
                    let fd = (form.eval(b)[axis] - form.eval(a)[axis]) / (2.0 * h);
                    assert!((fd - d[axis]).abs() < 1e-6, "{form:?} axis {axis} at {p:?}");
                }
            }
        }
    }

    #[test]
    fn carpet_cell_corner() {
        let s = ContractionMap::grid_cell(2, 4, 1, 0).unwrap();
        let p = s.apply(&AmbientBox::unit(2), [1.0, 1.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15);
        assert!((s.lip_lo() - 0.25).abs() < 1e-15 && (s.lip_hi() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn apply_outside_box_is_domain_error() {
        let s = ContractionMap::similarity_1d(0.5, false, 0.0).unwrap();
        assert!(matches!(
            s.apply(&unit1(), [1.5, 0.0]),
            Err(crate::Error::Domain(_))
        ));
    }

    #[test]
    fn invalid_ratios_rejected() {
        assert!(ContractionMap::similarity_1d(1.0, false, 0.0).is_err());
        assert!(ContractionMap::similarity_1d(0.0, false, 0.0).is_err());
        assert!(ContractionMap::affine([[1.0, 0.0], [0.0, 0.5]], [0.0, 0.0]).is_err());
    }

    #[test]
    fn cookie_lip_bounds_hold() {
        let amb = unit1();
        for (form, lo, hi) in [
            (ClosedForm::CookieFive(Side::Left), 0.2, 0.5),
            (ClosedForm::CookieFive(Side::Right), 0.2, 0.5),
            (ClosedForm::CookieNine(Side::Left), 1.0 / 9.0, 1.0 / 6.0),
            (ClosedForm::CookieNine(Side::Right), 1.0 / 9.0, 1.0 / 6.0),
        ] {
            let r =
                validate_lip_bounds(&ContractionMap::closed_form(form), &amb, 500, 1e-9).unwrap();
            assert!(r.ok, "{form:?}: {r:?}");
            assert!(r.observed_lo >= lo - 1e-9 && r.observed_hi <= hi + 1e-9);
        }
    }

    #[test]
    fn similarity_lip_report_is_exact() {
        let s = ContractionMap::similarity_2d(1.0 / 3.0, 0.7, true, [0.1, 0.2]).unwrap();
        let r = validate_lip_bounds(&s, &AmbientBox::unit(2), 200, 1e-8).unwrap();
        assert!(r.ok);
        assert!((r.observed_lo - 1.0 / 3.0).abs() < 1e-9);
        assert!((r.observed_hi - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn validate_needs_two_samples() {
        let s = ContractionMap::similarity_1d(0.5, false, 0.0).unwrap();
        assert!(validate_lip_bounds(&s, &unit1(), 1, 0.0).is_err());
    }

    #[test]
    fn compose_bounds() {
        let t = ContractionMap::similarity_1d(1.0 / 3.0, false, 0.0).unwrap();
        let c = compose(&[t, t]).unwrap();
        assert!((c.lip_lo_bound() - 1.0 / 9.0).abs() < 1e-15);
        assert!((c.lip_hi_bound() - 1.0 / 9.0).abs() < 1e-15);

        let a = ContractionMap::closed_form(ClosedForm::CookieFive(Side::Left));
        let b = ContractionMap::closed_form(ClosedForm::CookieNine(Side::Left));
        let c = compose(&[a, b]).unwrap();
        assert!(c.lip_hi_bound() <= 1.0 / 12.0 + 1e-15);
        assert!(c.lip_lo_bound() >= 1.0 / 45.0 - 1e-15);

        let single = compose(&[a]).unwrap();
        assert_eq!(single.lip_lo_bound(), a.lip_lo());
        assert_eq!(single.lip_hi_bound(), a.lip_hi());

        assert!(compose(&[]).is_err());
    }

    #[test]
    fn composition_applies_right_to_left() {
        let a = ContractionMap::similarity_1d(0.5, false, 0.5).unwrap();
        let b = ContractionMap::similarity_1d(0.25, false, 0.0).unwrap();
        let c = compose(&[a, b]).unwrap();
        // a(b(1)) = 0.5·0.25 + 0.5
        assert_eq!(c.eval([1.0, 0.0])[0], 0.625);
        assert_eq!(c.as_affine().unwrap().apply([1.0, 0.0])[0], 0.625);
    }

    #[test]
    fn closed_forms_map_into_their_box() {
        for form in ClosedForm::ALL {
            let amb = AmbientBox::unit(form.dim());
            assert!(
                ContractionMap::closed_form(form).maps_into(&amb, 1000),
                "{form:?}"
            );
        }
    }

    #[test]
    fn quarter_turn_is_exact() {
        let s = ContractionMap::similarity_2d(0.5, 0.5 * PI, false, [0.5, 0.0]).unwrap();
        assert_eq!(s.eval([1.0, 0.0]), [0.5, 0.5]);
    }

    #[test]
    fn halton_is_radical_inverse() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert_eq!(halton(3, 2), 0.75);
        assert!((halton(1, 3) - 1.0 / 3.0).abs() < 1e-16);
    }
}
