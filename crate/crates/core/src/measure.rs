//! Gauges, explicit cover and packing bounds, the cylinder measure `μ_ω` and
//! mass-distribution bounds.
//!
//! Nothing here computes a Hausdorff or packing measure. Every quantity is a
//! one-sided bound at an explicit scale from an explicit cover, packing or
//! ball-mass bracket.

use crate::carpet::CarpetSpec;
use crate::dimension::hutchinson_fn;
use crate::error::{domain, usage, Error, Result};
use crate::exec;
use crate::geometry::Point;
use crate::model::{attractor_point, cover_for_error, CoverOptions, CylinderCover, Rifs};
use crate::omega::OmegaSeq;
use crate::roots::{bisect_decreasing, BRACKET, ITERATIONS};

/// Points in the sampled doubling grid.
pub const DOUBLING_GRID: usize = 10_000;

/// Tabulated gauge, linear between samples and through the origin, extended
/// past the last sample with the last slope.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomGauge {
    ts: Vec<f64>,
    gs: Vec<f64>,
}

impl CustomGauge {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return usage("custom gauge has no samples");
        }
        let (ts, gs): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        if !(ts[0] > 0.0 && gs[0] > 0.0) {
            return domain("custom gauge samples must start at positive t and G(t)");
        }
        for w in 0..ts.len() - 1 {
            if !(ts[w + 1] > ts[w]) {
                return domain(format!(
                    "custom gauge abscissae not increasing at sample {}",
                    w + 1
                ));
            }
            if !(gs[w + 1] > gs[w]) {
                return domain(format!(
                    "custom gauge is not strictly increasing at t = {}",
                    ts[w + 1]
                ));
            }
        }
        Ok(CustomGauge { ts, gs })
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let k = self.ts.partition_point(|&x| x < t);
        let ((t0, g0), (t1, g1)) = match k {
            0 => ((0.0, 0.0), (self.ts[0], self.gs[0])),
            k if k == self.ts.len() => {
                if k == 1 {
                    ((0.0, 0.0), (self.ts[0], self.gs[0]))
                } else {
                    (
                        (self.ts[k - 2], self.gs[k - 2]),
                        (self.ts[k - 1], self.gs[k - 1]),
                    )
                }
            }
            k => ((self.ts[k - 1], self.gs[k - 1]), (self.ts[k], self.gs[k])),
        };
        g0 + (g1 - g0) * (t - t0) / (t1 - t0)
    }
}

/// A gauge function `G`.
#[derive(Debug, Clone, PartialEq)]
pub enum Gauge {
    /// `t^s`
    Power(f64),
    /// `t^s·log(1/t)`, increasing on `(0, e^{-1/s}]` and held constant beyond.
    PowerLog(f64),
    Custom(CustomGauge),
}

impl Gauge {
    pub fn power(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return domain(format!("gauge exponent must be positive, got {s}"));
        }
        Ok(Gauge::Power(s))
    }

    pub fn power_log(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return domain(format!("gauge exponent must be positive, got {s}"));
        }
        Ok(Gauge::PowerLog(s))
    }

    /// Largest scale on which the gauge is strictly increasing.
    pub fn max_scale(&self) -> f64 {
        match self {
            Gauge::PowerLog(s) => (-1.0 / s).exp(),
            _ => f64::INFINITY,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Gauge::Power(s) => t.powf(*s),
            Gauge::PowerLog(s) => {
                let t = t.min(self.max_scale());
                t.powf(*s) * (1.0 / t).ln()
            }
            Gauge::Custom(c) => c.eval(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingReport {
    pub c: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    /// `None` for exact values, otherwise the log grid `(t_min, t_max, points)`.
    pub sampled: Option<(f64, f64, usize)>,
}

/// `D⁻(G,c) = inf G(ct)/G(t)` and `D⁺(G,c) = sup G(ct)/G(t)`.
///
/// Exact for power gauges and for `c = 1`. Otherwise the extremes over a
/// log-spaced grid on `[1e-9·T, T/max(1,c)]` with `T = min(diameter, max_scale)`.
pub fn doubling_constants(g: &Gauge, c: f64, diameter: f64) -> Result<DoublingReport> {
    if !(c > 0.0 && c.is_finite()) {
        return domain(format!("doubling factor must be positive, got {c}"));
    }
    if !(diameter > 0.0) {
        return domain("diameter must be positive");
    }
    if let Gauge::Power(s) = g {
        let v = c.powf(*s);
        return Ok(DoublingReport {
            c,
            d_minus: v,
            d_plus: v,
            sampled: None,
        });
    }
    if c == 1.0 {
        return Ok(DoublingReport {
            c,
            d_minus: 1.0,
            d_plus: 1.0,
            sampled: None,
        });
    }
    let top = diameter.min(g.max_scale());
    let (lo, hi) = (1e-9 * top, top / c.max(1.0));
    let (l0, l1) = (lo.ln(), hi.ln());
    let (mut d_minus, mut d_plus) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..DOUBLING_GRID {
        let t = (l0 + (l1 - l0) * k as f64 / (DOUBLING_GRID - 1) as f64).exp();
        let r = g.eval(c * t) / g.eval(t);
        d_minus = d_minus.min(r);
        d_plus = d_plus.max(r);
    }
    Ok(DoublingReport {
        c,
        d_minus,
        d_plus,
        sampled: Some((lo, hi, DOUBLING_GRID)),
    })
}

/// `Σ G(|Uᵢ|)` over an explicit cover given by element diameters.
pub fn cover_mass(diameters: &[f64], g: &Gauge) -> f64 {
    diameters.iter().map(|&d| g.eval(d)).sum()
}

/// `Σ G(|C|)` over the cylinders of `cover`: an upper bound for `𝓗^G_δ(F_ω)`
/// with `δ` the largest cylinder diameter.
pub fn hausdorff_upper_bound(cover: &CylinderCover, g: &Gauge) -> f64 {
    (0..cover.len())
        .map(|i| g.eval(cover.element_diameter(i)))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingBound {
    pub centers: Vec<Point>,
    /// `count·G(δ)`.
    pub value: f64,
}

/// Greedy centred packing by closed balls of diameter `δ`.
///
/// Starting from the lexicographically smallest point, the point farthest from
/// the chosen centres is added while that distance exceeds `δ`; ties go to the
/// lexicographically smaller point. The value lower-bounds `𝓟^G_{0,δ}` of any
/// set containing the points.
pub fn packing_lower_bound(points: &[Point], g: &Gauge, delta: f64) -> Result<PackingBound> {
    if !(delta > 0.0) {
        return domain(format!("packing scale must be positive, got {delta}"));
    }
    if points.is_empty() {
        return usage("packing needs at least one point");
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let dist = |a: Point, b: Point| (a[0] - b[0]).hypot(a[1] - b[1]);
    let mut centers = vec![pts[0]];
    let mut nearest: Vec<f64> = pts.iter().map(|&p| dist(p, pts[0])).collect();
    loop {
        let (best, far) =
            nearest
                .iter()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc },
                );
        if !(far > delta) {
            break;
        }
        let c = pts[best];
        centers.push(c);
        for (d, &p) in nearest.iter_mut().zip(&pts) {
            *d = d.min(dist(p, c));
        }
    }
    Ok(PackingBound {
        value: centers.len() as f64 * g.eval(delta),
        centers,
    })
}

/// The measure `μ_ω` giving the word `(i₁,…,i_k)` mass
/// `∏ Lip⁺(S_{ω_l,i_l})^{s_{ω_l}}`, where `s_i` solves `Σⱼ Lip⁺(S_{i,j})^s = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderMeasure {
    rifs: Rifs,
    omega: OmegaSeq,
    exponents: Vec<f64>,
}

impl CylinderMeasure {
    pub fn new(rifs: &Rifs, omega: &OmegaSeq) -> Result<Self> {
        rifs.check_omega(omega)?;
        let exponents = rifs
            .systems()
            .iter()
            .map(|sys| {
                let lips: Vec<f64> = sys.maps().iter().map(|m| m.lip_hi()).collect();
                bisect_decreasing(hutchinson_fn(&lips), BRACKET.0, BRACKET.1, ITERATIONS)
                    .map(|r| r.0)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CylinderMeasure {
            rifs: rifs.clone(),
            omega: omega.clone(),
            exponents,
        })
    }

    pub fn rifs(&self) -> &Rifs {
        &self.rifs
    }

    pub fn omega(&self) -> &OmegaSeq {
        &self.omega
    }

    /// `s_i` for each system.
    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    /// Mass of a 0-based index word. The empty word has mass 1.
    pub fn mass(&self, word: &[u16]) -> Result<f64> {
        let mut m = 1.0;
        for (l, &j) in word.iter().enumerate() {
            let sym = self.omega.symbol_at(l);
            let maps = self.rifs.system(sym).maps();
            let Some(map) = maps.get(j as usize) else {
                return usage(format!(
                    "word index {j} at level {} exceeds system {sym} with {} maps",
                    l + 1,
                    maps.len()
                ));
            };
            m *= map.lip_hi().powf(self.exponents[sym as usize - 1]);
        }
        Ok(m)
    }

    /// Masses of all cylinders of a cover over the same `ω`, in cover order.
    pub fn cover_masses(&self, cover: &CylinderCover) -> Result<Vec<f64>> {
        if cover.omega() != &self.omega {
            return usage("cover was built for a different sequence");
        }
        (0..cover.len()).map(|i| self.mass(cover.word(i))).collect()
    }
}

/// Mass of the depth-`k` word `word`; see [`CylinderMeasure::mass`].
pub fn cylinder_mass(cm: &CylinderMeasure, word: &[u16]) -> Result<f64> {
    cm.mass(word)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdpRow {
    pub radius: f64,
    /// Largest outer ratio `μ⁺(B(x,r))/r^s` over the sampled centres.
    pub outer_max: f64,
    /// Smallest inner ratio `μ⁻(B(x,r))/r^s` over the sampled centres.
    pub inner_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdpReport {
    pub s: f64,
    pub depth: usize,
    pub samples: usize,
    pub rows: Vec<MdpRow>,
    pub lambda_sup: f64,
    pub lambda_inf: f64,
    /// `1/λ_sup`
    pub h_lower: f64,
    /// `2^s/λ_inf`
    pub p_upper: f64,
}

/// Cover resolution relative to the smallest radius in [`mdp_bounds`].
pub const MDP_RESOLUTION: f64 = 1.0 / 8.0;

/// Mass-distribution bounds from sampled balls `B(x,r)` with `x ∈ F_ω`.
///
/// `μ(B(x,r))` is bracketed by the total mass of cylinders whose boxes meet
/// the ball (outer) and of those whose boxes lie inside it (inner), on the
/// shallowest cover with error at most `r_min/8`. Centres are cylinder images
/// of a point of the tail attractor, taken at evenly spaced cover indices.
pub fn mdp_bounds(
    cm: &CylinderMeasure,
    s: f64,
    radii: &[f64],
    samples: usize,
    opts: &CoverOptions,
) -> Result<MdpReport> {
    let rifs = &cm.rifs;
    let diam = rifs.ambient().diameter();
    if radii.is_empty() || samples == 0 {
        return usage("mass distribution bounds need radii and at least one sample");
    }
    if let Some(r) = radii.iter().find(|&&r| !(r > 0.0 && r <= diam)) {
        return domain(format!("radius {r} is outside (0, {diam}]"));
    }
    if !(s >= 0.0) {
        return domain(format!("exponent must be non-negative, got {s}"));
    }
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let cover = cover_for_error(rifs, &cm.omega, r_min * MDP_RESOLUTION, opts)?;
    let masses = cm.cover_masses(&cover)?;
    let tail_point = attractor_point(rifs, &cm.omega.shift(cover.depth()))?;

    let n = cover.len();
    let picks: Vec<usize> = if samples >= n {
        (0..n).collect()
    } else {
        (0..samples).map(|k| k * n / samples).collect()
    };
    let per_center: Vec<Result<Vec<(f64, f64)>>> = exec::map_slice(opts.exec, &picks, |&i| {
        let x = cover.composition(rifs, i)?.eval(tail_point);
        Ok(radii
            .iter()
            .map(|&r| {
                let (mut outer, mut inner) = (0.0, 0.0);
                for (b, m) in cover.boxes().iter().zip(&masses) {
                    if b.distance_to(x) <= r {
                        outer += m;
                        if b.farthest_distance(x) <= r {
                            inner += m;
                        }
                    }
                }
                let scale = r.powf(s);
                (outer / scale, inner / scale)
            })
            .collect())
    });
    let per_center = per_center.into_iter().collect::<Result<Vec<_>>>()?;

    let rows: Vec<MdpRow> = radii
        .iter()
        .enumerate()
        .map(|(k, &radius)| MdpRow {
            radius,
            outer_max: per_center
                .iter()
                .map(|v| v[k].0)
                .fold(f64::NEG_INFINITY, f64::max),
            inner_min: per_center
                .iter()
                .map(|v| v[k].1)
                .fold(f64::INFINITY, f64::min),
        })
        .collect();
    let lambda_sup = rows
        .iter()
        .map(|r| r.outer_max)
        .fold(f64::NEG_INFINITY, f64::max);
    let lambda_inf = rows
        .iter()
        .map(|r| r.inner_min)
        .fold(f64::INFINITY, f64::min);
    Ok(MdpReport {
        s,
        depth: cover.depth(),
        samples: picks.len(),
        rows,
        lambda_sup,
        lambda_inf,
        h_lower: 1.0 / lambda_sup,
        p_upper: 2f64.powf(s) / lambda_inf,
    })
}

/// Sibling cells of every carpet used in the first `depth` levels of `ω`
/// overlap at most along edges. Affine cylinder maps are injective, so this
/// is the same test for sibling cylinders at every level.
pub fn check_msc_grid(carpets: &[CarpetSpec], omega: &OmegaSeq, depth: usize) -> Result<bool> {
    if (omega.max_symbol() as usize) > carpets.len() {
        return Err(Error::Usage(format!(
            "sequence uses symbol {} but only {} carpets are given",
            omega.max_symbol(),
            carpets.len()
        )));
    }
    let mut used: Vec<u16> = (0..depth).map(|l| omega.symbol_at(l)).collect();
    used.sort_unstable();
    used.dedup();
    Ok(used
        .iter()
        .all(|&s| siblings_separated(&carpets[s as usize - 1])))
}

fn siblings_separated(c: &CarpetSpec) -> bool {
    let rect = |&(col, row): &(u32, u32)| {
        let (w, h) = (1.0 / c.m() as f64, 1.0 / c.n() as f64);
        (
            [col as f64 * w, row as f64 * h],
            [(col + 1) as f64 * w, (row + 1) as f64 * h],
        )
    };
    let rects: Vec<_> = c.cells().iter().map(rect).collect();
    rects.iter().enumerate().all(|(i, a)| {
        rects[i + 1..].iter().all(|b| {
            let ox = a.1[0].min(b.1[0]) - a.0[0].max(b.0[0]);
            let oy = a.1[1].min(b.1[1]) - a.0[1].max(b.0[1]);
            ox <= 0.0 || oy <= 0.0
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AmbientBox, ContractionMap};
    use crate::model::{cylinder_cover, DeterministicIfs};

    const S: f64 = 0.630_929_753_571_457_4;

    fn cantor() -> Rifs {
        let third = |t| ContractionMap::similarity_1d(1.0 / 3.0, false, t).unwrap();
        Rifs::new(
            AmbientBox::unit(1),
            vec![DeterministicIfs::new("cantor", vec![third(0.0), third(2.0 / 3.0)]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn power_doubling_is_exact() {
        let g = Gauge::power(0.7).unwrap();
        let r = doubling_constants(&g, 0.5, 1.0).unwrap();
        assert_eq!(r.d_minus, 0.5f64.powf(0.7));
        assert_eq!(r.d_plus, r.d_minus);
        assert!(r.sampled.is_none());
        let r = doubling_constants(&Gauge::power_log(1.0).unwrap(), 1.0, 1.0).unwrap();
        assert_eq!((r.d_minus, r.d_plus), (1.0, 1.0));
    }

    #[test]
    fn power_log_doubling_brackets_grid_ratios() {
        let g = Gauge::power_log(1.0).unwrap();
        let r = doubling_constants(&g, 0.5, 1.0).unwrap();
        assert!(0.5 <= r.d_minus && r.d_minus <= r.d_plus && r.d_plus <= 1.0);
        // Direct evaluation at a few grid-interior scales.
        for t in [1e-8f64, 1e-4, 0.01, 0.2] {
            let ratio = (0.5 * t) * (1.0 / (0.5 * t)).ln() / (t * (1.0 / t).ln());
            assert!(r.d_minus <= ratio + 1e-12 && ratio <= r.d_plus + 1e-12);
        }
    }

    #[test]
    fn custom_gauge_interpolates() {
        let c = CustomGauge::new(vec![(0.1, 0.2), (0.2, 0.3), (0.4, 0.5)]).unwrap();
        assert!((c.eval(0.05) - 0.1).abs() < 1e-15);
        assert!((c.eval(0.3) - 0.4).abs() < 1e-15);
        assert!((c.eval(0.5) - 0.6).abs() < 1e-15);
        assert!(c.eval(1e-12) < 1e-10);
        assert!(CustomGauge::new(vec![(0.1, 0.2), (0.2, 0.2)]).is_err());
        assert!(CustomGauge::new(vec![(0.2, 0.2), (0.1, 0.3)]).is_err());
    }

    #[test]
    fn cantor_cover_mass_is_one() {
        let r = cantor();
        let g = Gauge::power(S).unwrap();
        let c = cylinder_cover(&r, &OmegaSeq::constant(1).unwrap(), 5).unwrap();
        let oracle = 32.0 * 3f64.powi(-5).powf(S);
        assert!((hausdorff_upper_bound(&c, &g) - oracle).abs() < 1e-13);
        assert!((oracle - 1.0).abs() < 1e-13);
    }

    #[test]
    fn interval_cover_mass() {
        let m = 17;
        let d = vec![1.0 / m as f64; m];
        assert!((cover_mass(&d, &Gauge::Power(1.0)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn packing_of_interval_points() {
        let pts: Vec<Point> = (0..=100).map(|i| [i as f64 / 100.0, 0.0]).collect();
        let g = Gauge::Power(1.0);
        for m in [2, 5, 10, 33] {
            let d = 1.0 / m as f64;
            let p = packing_lower_bound(&pts, &g, d).unwrap();
            assert!(p.value >= (m / 2) as f64 * d - 1e-12);
            for (i, a) in p.centers.iter().enumerate() {
                for b in &p.centers[i + 1..] {
                    assert!((a[0] - b[0]).abs() > d);
                }
            }
        }
        let single = packing_lower_bound(&[[0.3, 0.3]], &g, 0.1).unwrap();
        assert_eq!(single.value, 0.1);
    }

    #[test]
    fn cantor_packing_at_level_scale() {
        let r = cantor();
        let c = cylinder_cover(&r, &OmegaSeq::constant(1).unwrap(), 4).unwrap();
        let delta = 3f64.powi(-4);
        let p = packing_lower_bound(c.points(), &Gauge::Power(S), delta).unwrap();
        assert!(p.value >= 0.5 - 1e-12);
        // Pairwise separation of every other cylinder centre.
        let alt: Vec<f64> = c.points().iter().step_by(2).map(|p| p[0]).collect();
        assert!(alt.windows(2).all(|w| w[1] - w[0] > delta));
    }

    #[test]
    fn cantor_word_mass() {
        let cm = CylinderMeasure::new(&cantor(), &OmegaSeq::constant(1).unwrap()).unwrap();
        assert_eq!(cm.mass(&[]).unwrap(), 1.0);
        assert!((cm.mass(&[0, 1]).unwrap() - 0.25).abs() < 1e-14);
        assert!(cm.mass(&[2]).is_err());
        let parent = cm.mass(&[1, 0]).unwrap();
        let kids = cm.mass(&[1, 0, 0]).unwrap() + cm.mass(&[1, 0, 1]).unwrap();
        assert!((parent - kids).abs() < 1e-15);
    }

    #[test]
    fn cantor_mdp_lower_bound() {
        let cm = CylinderMeasure::new(&cantor(), &OmegaSeq::constant(1).unwrap()).unwrap();
        let radii: Vec<f64> = (1..=5).map(|k| 3f64.powi(-k)).collect();
        let rep = mdp_bounds(&cm, S, &radii, 64, &CoverOptions::default()).unwrap();
        assert!(rep.h_lower > 0.0 && rep.h_lower <= 1.0 + 1e-9, "{rep:?}");
        assert!(rep.lambda_inf <= rep.lambda_sup);
    }

    #[test]
    fn msc_grid() {
        let a = CarpetSpec::new(2, 2, vec![(0, 0), (1, 1)]).unwrap();
        let dup = CarpetSpec::new(2, 2, vec![(0, 0), (0, 0)]).unwrap();
        let w = OmegaSeq::periodic(vec![1, 2]).unwrap();
        assert!(check_msc_grid(&[a.clone(), a.clone()], &w, 4).unwrap());
        assert!(!check_msc_grid(&[a.clone(), dup.clone()], &w, 4).unwrap());
        assert!(check_msc_grid(&[a.clone(), dup], &w, 1).unwrap());
        assert!(check_msc_grid(&[a], &w, 3).is_err());
    }
}
