//! Random iterated function systems, cylinder covers of `F_ω` and their
//! Hausdorff-metric error certificates.

use crate::carpet::CarpetSpec;
use crate::error::{domain, usage, Error, Result};
use crate::exec::{self, Exec};
use crate::geometry::{
    compose, AffineMap, AmbientBox, Bbox, ContractionMap, MapComposition, Point,
};
use crate::hausdorff::hausdorff_distance_with;
use crate::omega::{omega_distance, splice, OmegaSeq};

/// Default cap on the number of cylinders a single cover may hold.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Relative slack when comparing a computed error bound against a target.
const TARGET_SLACK: f64 = 1e-12;

/// One deterministic system `𝕀_i = {S_{i,j}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicIfs {
    label: String,
    maps: Vec<ContractionMap>,
}

impl DeterministicIfs {
    pub fn new(label: impl Into<String>, maps: Vec<ContractionMap>) -> Result<Self> {
        let label = label.into();
        if maps.is_empty() {
            return usage(format!("system '{label}' has no maps"));
        }
        Ok(DeterministicIfs { label, maps })
    }

    /// The grid carpet as a system of cell maps on `[0,1]²`.
    pub fn from_carpet(label: impl Into<String>, carpet: &CarpetSpec) -> Result<Self> {
        let maps = carpet
            .cells()
            .iter()
            .map(|&(c, r)| ContractionMap::grid_cell(carpet.m(), carpet.n(), c, r))
            .collect::<Result<Vec<_>>>()?;
        DeterministicIfs::new(label, maps)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn maps(&self) -> &[ContractionMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }
}

/// The list `𝕀 = {𝕀₁,…,𝕀_N}` over a shared ambient box.
#[derive(Debug, Clone, PartialEq)]
pub struct Rifs {
    ambient: AmbientBox,
    systems: Vec<DeterministicIfs>,
    affine: bool,
}

impl Rifs {
    pub fn new(ambient: AmbientBox, systems: Vec<DeterministicIfs>) -> Result<Self> {
        if systems.is_empty() {
            return usage("a RIFS needs at least one system");
        }
        if systems.len() > u16::MAX as usize {
            return usage("too many systems");
        }
        for sys in &systems {
            if sys.len() > u16::MAX as usize {
                return usage(format!("system '{}' has too many maps", sys.label));
            }
            for (j, map) in sys.maps.iter().enumerate() {
                if map.dim() != ambient.dim() {
                    return usage(format!(
                        "map {} of system '{}' is {}-dimensional, ambient box is {}-dimensional",
                        j + 1,
                        sys.label,
                        map.dim(),
                        ambient.dim()
                    ));
                }
                if !map.maps_into(&ambient, 1000) {
                    return domain(format!(
                        "map {} of system '{}' does not map the ambient box into itself",
                        j + 1,
                        sys.label
                    ));
                }
            }
        }
        let affine = systems
            .iter()
            .all(|s| s.maps.iter().all(|m| m.as_affine().is_some()));
        Ok(Rifs {
            ambient,
            systems,
            affine,
        })
    }

    pub fn ambient(&self) -> &AmbientBox {
        &self.ambient
    }

    pub fn systems(&self) -> &[DeterministicIfs] {
        &self.systems
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    /// System addressed by a 1-based symbol.
    pub fn system(&self, symbol: u16) -> &DeterministicIfs {
        &self.systems[symbol as usize - 1]
    }

    pub fn is_affine(&self) -> bool {
        self.affine
    }

    pub fn check_omega(&self, omega: &OmegaSeq) -> Result<()> {
        let max = omega.max_symbol() as usize;
        if max > self.systems.len() {
            return usage(format!(
                "sequence uses symbol {max} but the RIFS has {} systems",
                self.systems.len()
            ));
        }
        Ok(())
    }

    /// `∏_{l ≤ depth} |𝓘_{ω_l}|`, saturating.
    pub fn cylinder_count(&self, omega: &OmegaSeq, depth: usize) -> u128 {
        (0..depth).fold(1u128, |acc, l| {
            acc.saturating_mul(self.system(omega.symbol_at(l)).len() as u128)
        })
    }

    /// Bounding box of `⋃_j S_{i,j}(b)` for system symbol `i`.
    fn level_image(&self, symbol: u16, b: &Bbox) -> Bbox {
        let maps = self.system(symbol).maps();
        maps[1..]
            .iter()
            .fold(maps[0].image_box(b), |acc, m| acc.union(&m.image_box(b)))
    }
}

/// Box known to contain `F_ω`.
///
/// The periodic part is handled by iterating the one-period box operator from
/// the ambient box until it stops shrinking; every iterate contains the
/// attractor of the cycle. The prefix is then applied level by level.
pub fn attractor_hull(rifs: &Rifs, omega: &OmegaSeq) -> Result<Bbox> {
    rifs.check_omega(omega)?;
    let mut b = rifs.ambient.bounds();
    for _ in 0..2000 {
        let next = omega
            .cycle()
            .iter()
            .rev()
            .fold(b, |acc, &s| rifs.level_image(s, &acc));
        if next == b {
            break;
        }
        b = next;
    }
    Ok(omega
        .prefix()
        .iter()
        .rev()
        .fold(b, |acc, &s| rifs.level_image(s, &acc)))
}

/// A point of `F_ω`: the fixed point of the first map of each cycle system,
/// carried back through the first map of each prefix system.
pub fn attractor_point(rifs: &Rifs, omega: &OmegaSeq) -> Result<Point> {
    rifs.check_omega(omega)?;
    let first = |s: u16| &rifs.system(s).maps()[0];
    let mut z = rifs.ambient.center();
    for _ in 0..4000 {
        let next = omega.cycle().iter().rev().fold(z, |p, &s| first(s).eval(p));
        if next == z {
            break;
        }
        z = next;
    }
    Ok(omega
        .prefix()
        .iter()
        .rev()
        .fold(z, |p, &s| first(s).eval(p)))
}

/// The set every cylinder map is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoverSeed {
    /// The ambient box `K`.
    #[default]
    Ambient,
    /// The bounding box of the tail attractor `F_{σ^k ω}` (see [`attractor_hull`]).
    AttractorHull,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverOptions {
    pub budget: u64,
    pub seed: CoverSeed,
    pub exec: Exec,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            budget: DEFAULT_BUDGET,
            seed: CoverSeed::Ambient,
            exec: Exec::Parallel,
        }
    }
}

impl CoverOptions {
    pub fn with_budget(budget: u64) -> Self {
        CoverOptions {
            budget,
            ..Default::default()
        }
    }
}

/// The depth-`k` cylinders `S_{ω₁,i₁}∘…∘S_{ω_k,i_k}(seed)` in lexicographic
/// order of their index words, stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderCover {
    depth: usize,
    omega: OmegaSeq,
    ambient_diameter: f64,
    words: Vec<u16>,
    lip_lo: Vec<f64>,
    lip_hi: Vec<f64>,
    boxes: Vec<Bbox>,
    points: Vec<Point>,
    error_bound: f64,
}

/// Borrowed view of one cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder<'a> {
    /// 0-based map indices `(i₁,…,i_k)`.
    pub word: &'a [u16],
    pub lip_lo_bound: f64,
    pub lip_hi_bound: f64,
    pub bbox: Bbox,
    /// Image of the seed-box center.
    pub point: Point,
    /// Certified bound on the cylinder's diameter.
    pub diameter: f64,
}

impl CylinderCover {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn omega(&self) -> &OmegaSeq {
        &self.omega
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Upper bound on `d_H(⋃ cylinders, F_ω)`.
    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    pub fn word(&self, i: usize) -> &[u16] {
        &self.words[i * self.depth..(i + 1) * self.depth]
    }

    pub fn bbox(&self, i: usize) -> Bbox {
        self.boxes[i]
    }

    pub fn boxes(&self) -> &[Bbox] {
        &self.boxes
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn lip_hi_bound(&self, i: usize) -> f64 {
        self.lip_hi[i]
    }

    pub fn lip_lo_bound(&self, i: usize) -> f64 {
        self.lip_lo[i]
    }

    /// `min(Lip⁺ bound · |K|, diameter of the bounding box)`; both bound the
    /// diameter of the cylinder.
    pub fn element_diameter(&self, i: usize) -> f64 {
        (self.lip_hi[i] * self.ambient_diameter).min(self.boxes[i].diameter())
    }

    pub fn cylinder(&self, i: usize) -> Cylinder<'_> {
        Cylinder {
            word: self.word(i),
            lip_lo_bound: self.lip_lo[i],
            lip_hi_bound: self.lip_hi[i],
            bbox: self.boxes[i],
            point: self.points[i],
            diameter: self.element_diameter(i),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Cylinder<'_>> + '_ {
        (0..self.len()).map(move |i| self.cylinder(i))
    }

    /// The composed map of cylinder `i`.
    pub fn composition(&self, rifs: &Rifs, i: usize) -> Result<MapComposition> {
        let maps: Vec<ContractionMap> = self
            .word(i)
            .iter()
            .enumerate()
            .map(|(l, &j)| rifs.system(self.omega.symbol_at(l)).maps()[j as usize])
            .collect();
        compose(&maps)
    }
}

#[derive(Default)]
struct Chunk {
    words: Vec<u16>,
    lip_lo: Vec<f64>,
    lip_hi: Vec<f64>,
    boxes: Vec<Bbox>,
    points: Vec<Point>,
}

struct Enumerator<'a> {
    levels: Vec<&'a [ContractionMap]>,
    seed: Bbox,
    center: Point,
    affine: bool,
}

impl Enumerator<'_> {
    fn leaf(&self, word: &[u16], lo: f64, hi: f64, composite: &AffineMap, out: &mut Chunk) {
        let (bbox, point) = if self.affine {
            let b = Bbox::hull(self.seed.corners().into_iter().map(|c| composite.apply(c)))
                .expect("four corners");
            (b, composite.apply(self.center))
        } else {
            let mut b = self.seed;
            let mut p = self.center;
            for l in (0..word.len()).rev() {
                let m = &self.levels[l][word[l] as usize];
                b = m.image_box(&b);
                p = m.eval(p);
            }
            (b, p)
        };
        out.words.extend_from_slice(word);
        out.lip_lo.push(lo);
        out.lip_hi.push(hi);
        out.boxes.push(bbox);
        out.points.push(point);
    }

    fn descend(
        &self,
        word: &mut Vec<u16>,
        lo: f64,
        hi: f64,
        composite: &AffineMap,
        out: &mut Chunk,
    ) {
        let level = word.len();
        if level == self.levels.len() {
            self.leaf(word, lo, hi, composite, out);
            return;
        }
        for (j, m) in self.levels[level].iter().enumerate() {
            let next = match (self.affine, m.as_affine()) {
                (true, Some(a)) => composite.then_inner(a),
                _ => *composite,
            };
            word.push(j as u16);
            self.descend(word, lo * m.lip_lo(), hi * m.lip_hi(), &next, out);
            word.pop();
        }
    }

    fn subtree(&self, prefix: &[u16]) -> Chunk {
        let mut composite = AffineMap::IDENTITY;
        let mut lo = 1.0;
        let mut hi = 1.0;
        for (l, &j) in prefix.iter().enumerate() {
            let m = &self.levels[l][j as usize];
            if let (true, Some(a)) = (self.affine, m.as_affine()) {
                composite = composite.then_inner(a);
            }
            lo *= m.lip_lo();
            hi *= m.lip_hi();
        }
        let mut out = Chunk::default();
        let mut word = prefix.to_vec();
        self.descend(&mut word, lo, hi, &composite, &mut out);
        out
    }
}

/// Lexicographically ordered words of the first `split` levels.
fn prefixes(sizes: &[usize]) -> Vec<Vec<u16>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n as u16).map(move |j| {
                    let mut v = w.clone();
                    v.push(j);
                    v
                })
            })
            .collect();
    }
    out
}

/// Depth-`depth` cylinder cover of `F_ω` seeded with the ambient box.
pub fn cylinder_cover(rifs: &Rifs, omega: &OmegaSeq, depth: usize) -> Result<CylinderCover> {
    cylinder_cover_with(rifs, omega, depth, &CoverOptions::default())
}

pub fn cylinder_cover_with(
    rifs: &Rifs,
    omega: &OmegaSeq,
    depth: usize,
    opts: &CoverOptions,
) -> Result<CylinderCover> {
    if depth == 0 {
        return usage("cover depth must be at least 1");
    }
    rifs.check_omega(omega)?;
    let count = rifs.cylinder_count(omega, depth);
    if count > opts.budget as u128 {
        return Err(Error::Resource {
            what: format!("cylinder cover at depth {depth}"),
            requested: count,
            budget: opts.budget as u128,
            best_error: None,
        });
    }
    let seed = match opts.seed {
        CoverSeed::Ambient => rifs.ambient.bounds(),
        CoverSeed::AttractorHull => attractor_hull(rifs, &omega.shift(depth))?,
    };
    let levels: Vec<&[ContractionMap]> = (0..depth)
        .map(|l| rifs.system(omega.symbol_at(l)).maps())
        .collect();
    let sizes: Vec<usize> = levels.iter().map(|m| m.len()).collect();

    // Split the tree into enough independent subtrees to keep all workers busy.
    let want = 8 * exec::workers(opts.exec);
    let mut split = 0;
    let mut tasks = 1usize;
    while split < depth && tasks < want {
        tasks *= sizes[split];
        split += 1;
    }
    let enumerator = Enumerator {
        levels,
        seed,
        center: seed.center(),
        affine: rifs.affine,
    };
    let chunks = exec::map_slice(opts.exec, &prefixes(&sizes[..split]), |p| {
        enumerator.subtree(p)
    });

    let n = count as usize;
    let mut cover = CylinderCover {
        depth,
        omega: omega.clone(),
        ambient_diameter: rifs.ambient.diameter(),
        words: Vec::with_capacity(n * depth),
        lip_lo: Vec::with_capacity(n),
        lip_hi: Vec::with_capacity(n),
        boxes: Vec::with_capacity(n),
        points: Vec::with_capacity(n),
        error_bound: 0.0,
    };
    for c in chunks {
        cover.words.extend(c.words);
        cover.lip_lo.extend(c.lip_lo);
        cover.lip_hi.extend(c.lip_hi);
        cover.boxes.extend(c.boxes);
        cover.points.extend(c.points);
    }
    cover.error_bound = (0..cover.len())
        .map(|i| cover.element_diameter(i))
        .fold(0.0, f64::max);
    Ok(cover)
}

/// Representative points of `F_ω` at the first depth whose certificate meets
/// the target.
#[derive(Debug, Clone, PartialEq)]
pub struct AttractorPoints {
    pub points: Vec<Point>,
    pub depth: usize,
    pub error_bound: f64,
}

/// One point per cylinder at the smallest depth with `error_bound ≤ target`.
/// The returned set lies within `2·target` of `F_ω` in the Hausdorff metric.
pub fn attractor_points(
    rifs: &Rifs,
    omega: &OmegaSeq,
    target_error: f64,
    opts: &CoverOptions,
) -> Result<AttractorPoints> {
    if !(target_error > 0.0) {
        return domain(format!("target error must be positive, got {target_error}"));
    }
    let cover = cover_for_error(rifs, omega, target_error, opts)?;
    Ok(AttractorPoints {
        depth: cover.depth,
        error_bound: cover.error_bound,
        points: cover.points,
    })
}

/// Shallowest cover whose error bound is at most `target_error`.
pub fn cover_for_error(
    rifs: &Rifs,
    omega: &OmegaSeq,
    target_error: f64,
    opts: &CoverOptions,
) -> Result<CylinderCover> {
    rifs.check_omega(omega)?;
    let mut best: Option<f64> = None;
    for depth in 1.. {
        let count = rifs.cylinder_count(omega, depth);
        if count > opts.budget as u128 {
            return Err(Error::Resource {
                what: format!("error {target_error} (needs depth {depth} or more)"),
                requested: count,
                budget: opts.budget as u128,
                best_error: best,
            });
        }
        let cover = cylinder_cover_with(rifs, omega, depth, opts)?;
        if cover.error_bound <= target_error * (1.0 + TARGET_SLACK) {
            return Ok(cover);
        }
        best = Some(cover.error_bound);
    }
    unreachable!("loop only exits by return")
}

/// One row of [`continuity_probe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRow {
    pub d_omega: f64,
    pub d_hausdorff: f64,
    /// `2·max depth-k cylinder diameter + 2·max error bound`.
    pub bound: f64,
}

/// Compare `F_ω` with `F_v` for `v = splice(ω, k, tail)`: sequences sharing a
/// `k`-prefix share their depth-`k` cylinders, so their attractors are close.
pub fn continuity_probe(
    rifs: &Rifs,
    omega: &OmegaSeq,
    k: usize,
    tails: &[OmegaSeq],
    depth: usize,
    opts: &CoverOptions,
) -> Result<Vec<ProbeRow>> {
    if depth < k {
        return usage(format!(
            "probe depth {depth} is below the splice length {k}"
        ));
    }
    let base = cylinder_cover_with(rifs, omega, depth, opts)?;
    let shared = if k == 0 {
        rifs.ambient.diameter()
    } else {
        cylinder_cover_with(rifs, omega, k, opts)?.error_bound
    };
    tails
        .iter()
        .map(|tail| {
            let v = splice(omega, k, tail);
            let other = cylinder_cover_with(rifs, &v, depth, opts)?;
            let d_hausdorff = hausdorff_distance_with(base.points(), other.points(), opts.exec)?;
            Ok(ProbeRow {
                d_omega: omega_distance(omega, &v),
                d_hausdorff,
                bound: 2.0 * shared + 2.0 * base.error_bound.max(other.error_bound),
            })
        })
        .collect()
}
