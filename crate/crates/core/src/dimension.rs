//! Dimension formulas: Hutchinson's equation and its randomised form,
//! Bedford–McMullen carpets and random carpets, extremal bounds and the
//! Lip± growth factors.
//!
//! Every root is found by bisection of a strictly decreasing function on
//! `[0, 64]`. The functions are written in log form (`s ↦ log Σ rᵢ^s`), which
//! stays strictly decreasing in floating point across the whole bracket.

use crate::carpet::CarpetSpec;
use crate::error::{domain, usage, Error, Result};
use crate::exec::{self, Exec};
use crate::model::Rifs;
use crate::omega::{OmegaSeq, Weights};
use crate::roots::{bisect_decreasing, golden_section_min, BRACKET, ITERATIONS};

/// Points in the unimodality pre-scan of [`minimize_carpet_dimension`].
pub const PRESCAN_POINTS: usize = 257;
/// Bracket width at which the golden-section search stops.
pub const MINIMIZER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equation {
    /// `Σ rᵢ^s = 1`
    Hutchinson,
    /// `∏ᵢ (Σⱼ r_{ij}^s)^{pᵢ} = 1`
    RandomizedHutchinson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionReport {
    pub value: f64,
    pub equation: Equation,
    /// Value of the (log-form) defining function at `value`.
    pub residual: f64,
    pub bracket: (f64, f64),
}

fn check_ratios(ratios: &[f64]) -> Result<()> {
    if ratios.is_empty() {
        return usage("ratio list is empty");
    }
    if let Some(r) = ratios.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
        return domain(format!("ratio {r} is outside (0,1)"));
    }
    Ok(())
}

/// `log Σ exp(s·log rᵢ)` evaluated stably.
fn log_sum_pow(log_ratios: &[f64], s: f64) -> f64 {
    let top = log_ratios
        .iter()
        .map(|&l| s * l)
        .fold(f64::NEG_INFINITY, f64::max);
    top + log_ratios
        .iter()
        .map(|&l| (s * l - top).exp())
        .sum::<f64>()
        .ln()
}

/// `s ↦ log Σ rᵢ^s`, the log form of Hutchinson's equation.
pub fn hutchinson_fn(ratios: &[f64]) -> impl Fn(f64) -> f64 {
    let logs: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    move |s| log_sum_pow(&logs, s)
}

/// `s ↦ Σᵢ pᵢ · log Σⱼ r_{ij}^s`, with zero-weight systems dropped.
pub fn randomized_hutchinson_fn(ratio_lists: &[Vec<f64>], weights: &[f64]) -> impl Fn(f64) -> f64 {
    let terms: Vec<(f64, Vec<f64>)> = ratio_lists
        .iter()
        .zip(weights)
        .filter(|(_, &p)| p > 0.0)
        .map(|(rs, &p)| (p, rs.iter().map(|r| r.ln()).collect()))
        .collect();
    move |s| terms.iter().map(|(p, logs)| p * log_sum_pow(logs, s)).sum()
}

fn solve<F: Fn(f64) -> f64>(f: F, equation: Equation) -> Result<DimensionReport> {
    let (value, bracket) = bisect_decreasing(&f, BRACKET.0, BRACKET.1, ITERATIONS)?;
    Ok(DimensionReport {
        value,
        equation,
        residual: f(value),
        bracket,
    })
}

/// Similarity dimension: the root of `Σ rᵢ^s = 1`.
pub fn similarity_dimension(ratios: &[f64]) -> Result<DimensionReport> {
    check_ratios(ratios)?;
    solve(hutchinson_fn(ratios), Equation::Hutchinson)
}

/// Root of `∏ᵢ (Σⱼ r_{ij}^s)^{pᵢ} = 1`, the almost-sure dimension of a random
/// self-similar set with Bernoulli weights `p`.
pub fn randomized_similarity_dimension(
    ratio_lists: &[Vec<f64>],
    weights: &Weights,
) -> Result<DimensionReport> {
    if ratio_lists.len() != weights.len() {
        return usage(format!(
            "{} ratio lists but {} weights",
            ratio_lists.len(),
            weights.len()
        ));
    }
    for rs in ratio_lists {
        check_ratios(rs)?;
    }
    solve(
        randomized_hutchinson_fn(ratio_lists, weights.as_slice()),
        Equation::RandomizedHutchinson,
    )
}

/// Per-system contraction ratios, failing on any non-similarity.
pub fn similarity_ratios(rifs: &Rifs) -> Result<Vec<Vec<f64>>> {
    rifs.systems()
        .iter()
        .map(|sys| {
            sys.maps()
                .iter()
                .map(|m| {
                    m.ratio().ok_or_else(|| {
                        Error::Unsupported(format!(
                            "system '{}' contains a non-similarity map",
                            sys.label()
                        ))
                    })
                })
                .collect()
        })
        .collect()
}

/// Dimension of `F_ω` for an eventually periodic `ω` over similarity systems
/// satisfying the UOSC: the randomised equation weighted by the symbol
/// frequencies of the cycle.
pub fn periodic_similarity_dimension(rifs: &Rifs, omega: &OmegaSeq) -> Result<DimensionReport> {
    rifs.check_omega(omega)?;
    let ratios = similarity_ratios(rifs)?;
    let w = Weights::new(omega.cycle_frequencies(rifs.len()))?;
    randomized_similarity_dimension(&ratios, &w)
}

fn sum_counts_pow(counts: &[u32], t: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| (c as f64).powf(t))
        .sum()
}

/// `(1/log m)·log Σⱼ C_j^{log m / log n}`; empty columns contribute nothing.
pub fn bedford_mcmullen_dimension(carpet: &CarpetSpec) -> Result<f64> {
    if carpet.m() == 1 {
        return domain("Bedford–McMullen formula needs m > 1");
    }
    let lm = (carpet.m() as f64).ln();
    let ln = (carpet.n() as f64).ln();
    Ok(sum_counts_pow(carpet.column_counts(), lm / ln).ln() / lm)
}

/// Almost-sure Hausdorff dimension of the random carpet with weights `p`:
/// `ν₁ = ∏ mᵢ^{pᵢ}`, `ν₂ = ∏ nᵢ^{pᵢ}` and
/// `Σᵢ pᵢ·(1/log ν₁)·log Σⱼ C_{ij}^{log ν₁/log ν₂}`.
pub fn random_carpet_dimension(carpets: &[CarpetSpec], weights: &Weights) -> Result<f64> {
    if carpets.len() != weights.len() {
        return usage(format!(
            "{} carpets but {} weights",
            carpets.len(),
            weights.len()
        ));
    }
    let active: Vec<(f64, &CarpetSpec)> = weights
        .as_slice()
        .iter()
        .copied()
        .zip(carpets)
        .filter(|(p, _)| *p > 0.0)
        .collect();
    let log_nu1: f64 = active.iter().map(|(p, c)| p * (c.m() as f64).ln()).sum();
    let log_nu2: f64 = active.iter().map(|(p, c)| p * (c.n() as f64).ln()).sum();
    if !(log_nu1 > 0.0) {
        return domain("ν₁ = 1: every weighted carpet has a single column");
    }
    let t = log_nu1 / log_nu2;
    Ok(active
        .iter()
        .map(|(p, c)| p * sum_counts_pow(c.column_counts(), t).ln())
        .sum::<f64>()
        / log_nu1)
}

/// Dimension of `F_ω` for an eventually periodic `ω` over grid carpets:
/// the random-carpet formula at the cycle's symbol frequencies.
pub fn periodic_carpet_dimension(carpets: &[CarpetSpec], omega: &OmegaSeq) -> Result<f64> {
    let w = Weights::new(omega.cycle_frequencies(carpets.len()))?;
    random_carpet_dimension(carpets, &w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub weights: Vec<f64>,
    pub dim: f64,
}

/// Evaluate [`random_carpet_dimension`] at every probability vector of the grid.
pub fn carpet_dimension_curve(
    carpets: &[CarpetSpec],
    grid: &[Weights],
    exec: Exec,
) -> Result<Vec<CurveRow>> {
    if grid.is_empty() {
        return usage("weights grid is empty");
    }
    exec::map_slice(exec, grid, |w| {
        random_carpet_dimension(carpets, w).map(|dim| CurveRow {
            weights: w.as_slice().to_vec(),
            dim,
        })
    })
    .into_iter()
    .collect()
}

/// `(p, 1-p)` for `p = 0, 1/steps, …, 1`.
pub fn pair_grid(steps: usize) -> Vec<Weights> {
    (0..=steps)
        .map(|k| {
            let p = k as f64 / steps as f64;
            Weights::pair(p).expect("p in [0,1]")
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveMinimum {
    pub p: f64,
    pub dim: f64,
}

/// Minimise `p ↦ dim(p, 1-p)` over `[0,1]` for a pair of carpets.
///
/// A 257-point pre-scan certifies that the sampled curve is unimodal; a
/// golden-section search then refines the grid minimiser. A flat curve
/// returns the grid midpoint.
pub fn minimize_carpet_dimension(carpets: &[CarpetSpec]) -> Result<CurveMinimum> {
    if carpets.len() != 2 {
        return usage(format!(
            "minimisation needs exactly two carpets, got {}",
            carpets.len()
        ));
    }
    let f = |p: f64| random_carpet_dimension(carpets, &Weights::pair(p).expect("p in [0,1]"));
    let steps = PRESCAN_POINTS - 1;
    let ps: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
    let vals = ps.iter().map(|&p| f(p)).collect::<Result<Vec<_>>>()?;

    let (lo, hi) = vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let tol = 1e-12 * lo.abs().max(1.0);
    if hi - lo <= tol {
        return Ok(CurveMinimum {
            p: 0.5,
            dim: f(0.5)?,
        });
    }
    let arg = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    let unimodal = vals[..=arg].windows(2).all(|w| w[1] <= w[0] + tol)
        && vals[arg..].windows(2).all(|w| w[1] + tol >= w[0]);
    if !unimodal {
        return Err(Error::Unsupported(format!(
            "dimension curve is not unimodal on the pre-scan; grid minimum {} at p = {}",
            vals[arg], ps[arg]
        )));
    }
    let a = ps[arg.saturating_sub(1)];
    let b = ps[(arg + 1).min(steps)];
    let g = |p: f64| f(p).unwrap_or(f64::INFINITY);
    let p = golden_section_min(g, a, b, MINIMIZER_TOL);
    let dim = f(p)?;
    if dim <= vals[arg] {
        Ok(CurveMinimum { p, dim })
    } else {
        Ok(CurveMinimum {
            p: ps[arg],
            dim: vals[arg],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalBounds {
    pub s_min: f64,
    pub s_max: f64,
    pub per_system: Vec<DimensionReport>,
}

/// Similarity dimensions `sᵢ` of each system and their extremes. Under the
/// UOSC these are the infimal and supremal dimensions over `Ω`.
pub fn extremal_ss_bounds(rifs: &Rifs) -> Result<ExtremalBounds> {
    let per_system = similarity_ratios(rifs)?
        .iter()
        .map(|rs| similarity_dimension(rs))
        .collect::<Result<Vec<_>>>()?;
    let s_min = per_system
        .iter()
        .map(|r| r.value)
        .fold(f64::INFINITY, f64::min);
    let s_max = per_system
        .iter()
        .map(|r| r.value)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ExtremalBounds {
        s_min,
        s_max,
        per_system,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub h: f64,
    pub p: f64,
    /// `Φ⁻ᵢ(h) = Σⱼ Lip⁻(S_{i,j})^h` per system.
    pub lip_minus_factors: Vec<f64>,
    /// `Φ⁺ᵢ(p) = Σⱼ Lip⁺(S_{i,j})^p` per system.
    pub lip_plus_factors: Vec<f64>,
    /// 1-based system with `Φ⁻ᵢ(h) > 1`: along `(i,i,…)` the level sums of
    /// `Lip⁻(composition)^h` are at least `Φ⁻ᵢ(h)^k → ∞`.
    pub lip_minus_witness: Option<usize>,
    /// 1-based system with `Φ⁺ᵢ(p) < 1`: along `(i,i,…)` the level sums of
    /// `Lip⁺(composition)^p` are at most `Φ⁺ᵢ(p)^k → 0`.
    pub lip_plus_witness: Option<usize>,
}

pub fn check_growth_conditions(rifs: &Rifs, h: f64, p: f64) -> Result<GrowthReport> {
    if !(h >= 0.0 && p >= 0.0) {
        return domain(format!(
            "exponents must be non-negative, got h = {h}, p = {p}"
        ));
    }
    let factor = |exp: f64, lip: fn(&crate::geometry::ContractionMap) -> f64| -> Vec<f64> {
        rifs.systems()
            .iter()
            .map(|s| s.maps().iter().map(|m| lip(m).powf(exp)).sum())
            .collect()
    };
    let lip_minus_factors = factor(h, |m| m.lip_lo());
    let lip_plus_factors = factor(p, |m| m.lip_hi());
    Ok(GrowthReport {
        h,
        p,
        lip_minus_witness: lip_minus_factors
            .iter()
            .position(|&f| f > 1.0)
            .map(|i| i + 1),
        lip_plus_witness: lip_plus_factors
            .iter()
            .position(|&f| f < 1.0)
            .map(|i| i + 1),
        lip_minus_factors,
        lip_plus_factors,
    })
}

/// Uniform open set condition for grid carpets with the open unit square as
/// the common witness: every carpet must select distinct cells.
pub fn check_uosc_grid(carpets: &[CarpetSpec]) -> bool {
    carpets.iter().all(CarpetSpec::has_distinct_cells)
}
