//! Task execution and atomic output.

use std::io::Write;
use std::path::{Path, PathBuf};

use rifslab_core::dimension::{
    pair_grid, periodic_carpet_dimension, periodic_similarity_dimension, similarity_ratios,
};
use rifslab_core::measure::{cylinder_mass, doubling_constants};
use rifslab_core::model::{attractor_point, cover_for_error, DEFAULT_BUDGET};
use rifslab_core::{
    attractor_points, bedford_mcmullen_dimension, carpet_dimension_curve, check_growth_conditions,
    check_msc_grid, check_uosc_grid, cylinder_cover_with, estimate_box_dims, extremal_ss_bounds,
    hausdorff_upper_bound, mdp_bounds, minimize_carpet_dimension, omega_distance,
    packing_lower_bound, random_carpet_dimension, randomized_similarity_dimension,
    similarity_dimension, splice, BernoulliSampler, BoxDimOptions, CoverOptions, CoverSeed,
    CylinderMeasure, Error, Exec, OmegaSeq, Point, Result, Weights,
};

use crate::config::{
    build_gauge, build_ladder, build_tail, ExperimentConfig, GrowthSpec, OmegaSource, Real,
    TaskSpec,
};
use crate::format::{fmt_g, Table};
use crate::render::{render_ppm, RenderSpec};
use crate::{ConfigError, RunError};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Overrides the config seed.
    pub seed: Option<u64>,
    pub budget: u64,
    /// Print the run log to standard error.
    pub verbose: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            out_dir: PathBuf::from("."),
            seed: None,
            budget: DEFAULT_BUDGET,
            verbose: true,
        }
    }
}

/// The bytes produced by one task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskOutput {
    pub name: String,
    pub bytes: Vec<u8>,
    /// One-line summary for the run log.
    pub summary: String,
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    omega: OmegaSeq,
    seed: u64,
    cover: CoverOptions,
}

/// Run every task and write its output into `opts.out_dir`.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(&opts.out_dir).map_err(|e| RunError::Io {
        path: opts.out_dir.display().to_string(),
        source: e,
    })?;
    let log = |msg: String| {
        if opts.verbose {
            eprintln!("{msg}");
        }
    };
    log(format!(
        "rifslab: {} ({} tasks)",
        cfg.name(),
        cfg.tasks().len()
    ));
    let mut written = Vec::new();
    for (index, task) in cfg.tasks().iter().enumerate() {
        let out = execute_task(cfg, index, opts)?;
        let path = opts.out_dir.join(&out.name);
        write_atomic(&path, &out.bytes)?;
        log(format!(
            "  [{index}] {}: {} -> {}",
            task.kind(),
            out.summary,
            path.display()
        ));
        written.push(path);
    }
    Ok(written)
}

/// Run every task in memory.
pub fn execute(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<TaskOutput>, RunError> {
    (0..cfg.tasks().len())
        .map(|i| execute_task(cfg, i, opts))
        .collect()
}

pub fn execute_task(
    cfg: &ExperimentConfig,
    index: usize,
    opts: &RunOptions,
) -> Result<TaskOutput, RunError> {
    let task = &cfg.tasks()[index];
    let seed = opts.seed.unwrap_or(cfg.seed());
    let wrap = |source: Error| RunError::Task {
        index,
        task: task.kind(),
        source,
    };
    let ctx = Ctx {
        cfg,
        omega: cfg.omega(seed).map_err(wrap)?,
        seed,
        cover: CoverOptions {
            budget: opts.budget,
            seed: CoverSeed::Ambient,
            exec: Exec::Parallel,
        },
    };
    let (bytes, summary) = match task {
        TaskSpec::Dim {
            growth, msc_depth, ..
        } => dim(&ctx, growth.as_ref(), *msc_depth),
        TaskSpec::Curve { steps, .. } => curve(&ctx, *steps),
        TaskSpec::Minimize { .. } => minimize(&ctx),
        TaskSpec::Boxdim {
            ladder, grid_shift, ..
        } => {
            let ladder = build_ladder(ladder, "ladder")?;
            boxdim(&ctx, &ladder, *grid_shift)
        }
        TaskSpec::MeasureBounds {
            gauge,
            depths,
            cylinder_mass,
            packing,
            mdp,
            doubling,
            ..
        } => {
            let packing = packing
                .as_ref()
                .map(|l| build_ladder(l, "packing"))
                .transpose()?;
            let mdp = match mdp {
                Some(m) => Some((m.s.0, build_ladder(&m.radii, "mdp.radii")?, m.samples)),
                None => None,
            };
            let plan = MeasurePlan {
                gauge: build_gauge(gauge, "gauge")?,
                depths,
                cylinder_mass: *cylinder_mass,
                packing,
                mdp,
                doubling,
            };
            measure_bounds(&ctx, &plan)
        }
        TaskSpec::Render {
            width,
            height,
            target_error,
            fg,
            bg,
            ..
        } => {
            let spec = RenderSpec {
                width: *width,
                height: *height,
                target_error: target_error.0,
                fg: *fg,
                bg: *bg,
            };
            render(&ctx, &spec)
        }
        TaskSpec::SpliceDemo {
            epsilon,
            tail,
            max_depth,
            gauge,
            ..
        } => {
            let tail = build_tail(tail, "tail")?;
            let gauge = build_gauge(gauge, "gauge")?;
            splice_demo(&ctx, epsilon.0, &tail, *max_depth, &gauge)
        }
        TaskSpec::Sample {
            weights, horizon, ..
        } => {
            let w = Weights::new(weights.iter().map(|r| r.0).collect()).map_err(|source| {
                ConfigError::Semantic {
                    field: "weights".into(),
                    source,
                }
            })?;
            sample(&ctx, w, *horizon)
        }
    }
    .map_err(wrap)?;
    Ok(TaskOutput {
        name: task.output_name(),
        bytes,
        summary,
    })
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io = |e: std::io::Error| RunError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

type TaskResult = Result<(Vec<u8>, String)>;

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.into()
}

fn dim(ctx: &Ctx, growth: Option<&GrowthSpec>, msc_depth: usize) -> TaskResult {
    let rifs = &ctx.cfg.rifs;
    let mut t = Table::new(["quantity", "value"]);
    let mut omega_dim = None;
    let mut almost_sure = None;

    let carpets = ctx.cfg.carpets.as_ref();
    let affine_carpets = carpets.filter(|c| c.iter().all(|c| c.m() >= 2));
    if let Some(cs) = affine_carpets {
        for (sys, c) in rifs.systems().iter().zip(cs) {
            t.push([
                format!("bm_dimension:{}", sys.label()),
                fmt_g(bedford_mcmullen_dimension(c)?),
            ]);
        }
        match &ctx.cfg.omega {
            OmegaSource::Fixed(w) => omega_dim = Some(periodic_carpet_dimension(cs, w)?),
            OmegaSource::Bernoulli { weights, .. } => {
                almost_sure = Some(random_carpet_dimension(cs, weights)?)
            }
        }
    }
    if let Ok(ratios) = similarity_ratios(rifs) {
        for (sys, r) in rifs.systems().iter().zip(&ratios) {
            t.push([
                format!("similarity_dimension:{}", sys.label()),
                fmt_g(similarity_dimension(r)?.value),
            ]);
        }
        let ext = extremal_ss_bounds(rifs)?;
        t.push(["s_min".to_string(), fmt_g(ext.s_min)]);
        t.push(["s_max".to_string(), fmt_g(ext.s_max)]);
        match &ctx.cfg.omega {
            OmegaSource::Fixed(w) if omega_dim.is_none() => {
                omega_dim = Some(periodic_similarity_dimension(rifs, w)?.value)
            }
            OmegaSource::Bernoulli { weights, .. } if almost_sure.is_none() => {
                almost_sure = Some(randomized_similarity_dimension(&ratios, weights)?.value)
            }
            _ => {}
        }
    }
    if let Some(d) = omega_dim {
        t.push(["omega_dimension".to_string(), fmt_g(d)]);
    }
    if let Some(d) = almost_sure {
        t.push(["almost_sure_dimension".to_string(), fmt_g(d)]);
    }
    if let Some(cs) = carpets {
        t.push(["uosc_grid".to_string(), flag(check_uosc_grid(cs))]);
        t.push([
            "msc_grid".to_string(),
            flag(check_msc_grid(cs, &ctx.omega, msc_depth)?),
        ]);
    }
    if let Some(g) = growth {
        let rep = check_growth_conditions(rifs, g.h.0, g.p.0)?;
        t.push(["growth_h".to_string(), fmt_g(rep.h)]);
        t.push(["growth_p".to_string(), fmt_g(rep.p)]);
        for (i, sys) in rifs.systems().iter().enumerate() {
            t.push([
                format!("lip_minus_factor:{}", sys.label()),
                fmt_g(rep.lip_minus_factors[i]),
            ]);
            t.push([
                format!("lip_plus_factor:{}", sys.label()),
                fmt_g(rep.lip_plus_factors[i]),
            ]);
        }
        t.push([
            "lip_minus_witness".to_string(),
            rep.lip_minus_witness.unwrap_or(0).to_string(),
        ]);
        t.push([
            "lip_plus_witness".to_string(),
            rep.lip_plus_witness.unwrap_or(0).to_string(),
        ]);
    }
    let mut w = ctx.omega.to_string();
    if w.len() > 40 {
        w = format!("{}...", &w[..40]);
    }
    let summary = format!("{} quantities for omega = {w}", t.rows().len());
    Ok((t.to_csv(), summary))
}

fn carpets<'a>(ctx: &'a Ctx) -> Result<&'a [rifslab_core::CarpetSpec]> {
    ctx.cfg
        .carpets
        .as_deref()
        .ok_or_else(|| Error::Usage("this task needs grid systems".into()))
}

fn curve(ctx: &Ctx, steps: usize) -> TaskResult {
    let cs = carpets(ctx)?;
    let rows = carpet_dimension_curve(cs, &pair_grid(steps), Exec::Parallel)?;
    let mut header: Vec<String> = (1..=cs.len()).map(|i| format!("p{i}")).collect();
    header.push("dim".into());
    let mut t = Table::new(header);
    for r in &rows {
        let mut cells: Vec<String> = r.weights.iter().map(|&p| fmt_g(p)).collect();
        cells.push(fmt_g(r.dim));
        t.push(cells);
    }
    let best = rows
        .iter()
        .min_by(|a, b| a.dim.total_cmp(&b.dim))
        .expect("grid is non-empty");
    let summary = format!(
        "{} rows, grid minimum {} at p1 = {}",
        rows.len(),
        fmt_g(best.dim),
        fmt_g(best.weights[0])
    );
    Ok((t.to_csv(), summary))
}

fn minimize(ctx: &Ctx) -> TaskResult {
    let m = minimize_carpet_dimension(carpets(ctx)?)?;
    let mut t = Table::new(["quantity", "value"]);
    t.push(["p_star".to_string(), fmt_g(m.p)]);
    t.push(["dim_star".to_string(), fmt_g(m.dim)]);
    Ok((
        t.to_csv(),
        format!("p* = {}, dim* = {}", fmt_g(m.p), fmt_g(m.dim)),
    ))
}

fn boxdim(ctx: &Ctx, ladder: &[f64], grid_shift: f64) -> TaskResult {
    let opts = BoxDimOptions {
        cover: ctx.cover,
        grid_shift,
    };
    let est = estimate_box_dims(&ctx.cfg.rifs, &ctx.omega, ladder, &opts)?;
    let mut t = Table::new(["delta", "count", "exponent"]);
    for r in &est.table.rows {
        t.push([fmt_g(r.delta), r.count.to_string(), fmt_g(r.exponent)]);
    }
    let summary = format!(
        "lower {} upper {} slope {}",
        fmt_g(est.lower_est),
        fmt_g(est.upper_est),
        fmt_g(est.slope)
    );
    Ok((t.to_csv(), summary))
}

struct MeasurePlan<'a> {
    gauge: rifslab_core::Gauge,
    depths: &'a [usize],
    cylinder_mass: bool,
    packing: Option<Vec<f64>>,
    mdp: Option<(f64, Vec<f64>, usize)>,
    doubling: &'a [Real],
}

/// Points of `F_ω` itself: cylinder maps applied to a point of the tail
/// attractor, on the shallowest cover finer than `delta / 8`.
fn attractor_samples(ctx: &Ctx, delta: f64) -> Result<Vec<Point>> {
    let rifs = &ctx.cfg.rifs;
    let cover = cover_for_error(rifs, &ctx.omega, delta / 8.0, &ctx.cover)?;
    let z = attractor_point(rifs, &ctx.omega.shift(cover.depth()))?;
    (0..cover.len())
        .map(|i| Ok(cover.composition(rifs, i)?.eval(z)))
        .collect()
}

fn measure_bounds(ctx: &Ctx, plan: &MeasurePlan) -> TaskResult {
    let rifs = &ctx.cfg.rifs;
    let g = &plan.gauge;
    let mut t = Table::new(["bound", "delta", "value", "direction"]);
    let measure = if plan.cylinder_mass || plan.mdp.is_some() {
        Some(CylinderMeasure::new(rifs, &ctx.omega)?)
    } else {
        None
    };
    for &depth in plan.depths {
        let cover = cylinder_cover_with(rifs, &ctx.omega, depth, &ctx.cover)?;
        let delta = fmt_g(cover.error_bound());
        t.push([
            "hausdorff_cover".into(),
            delta.clone(),
            fmt_g(hausdorff_upper_bound(&cover, g)),
            "upper".into(),
        ]);
        if let (true, Some(cm)) = (plan.cylinder_mass, &measure) {
            let total: f64 = (0..cover.len())
                .map(|i| cylinder_mass(cm, cover.word(i)))
                .sum::<Result<f64>>()?;
            t.push([
                "cylinder_mass_total".into(),
                delta,
                fmt_g(total),
                "exact".into(),
            ]);
        }
    }
    for &delta in plan.packing.iter().flatten() {
        let pts = attractor_samples(ctx, delta)?;
        let p = packing_lower_bound(&pts, g, delta)?;
        t.push([
            "packing".into(),
            fmt_g(delta),
            fmt_g(p.value),
            "lower".into(),
        ]);
    }
    let mut mdp_note = String::new();
    if let (Some((s, radii, samples)), Some(cm)) = (&plan.mdp, &measure) {
        let rep = mdp_bounds(cm, *s, radii, *samples, &ctx.cover)?;
        let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
        t.push([
            "mdp_hausdorff_lower".into(),
            fmt_g(r_min),
            fmt_g(rep.h_lower),
            "lower".into(),
        ]);
        t.push([
            "mdp_packing_upper".into(),
            fmt_g(r_min),
            fmt_g(rep.p_upper),
            "upper".into(),
        ]);
        mdp_note = format!(
            "; mass distribution at s = {}: H >= {}, P <= {}",
            fmt_g(*s),
            fmt_g(rep.h_lower),
            fmt_g(rep.p_upper)
        );
    }
    let diam = rifs.ambient().diameter();
    for c in plan.doubling {
        let rep = doubling_constants(g, c.0, diam)?;
        let (lo_dir, hi_dir) = if rep.sampled.is_some() {
            ("upper", "lower")
        } else {
            ("exact", "exact")
        };
        let at = fmt_g(c.0);
        t.push([
            format!("doubling_d_minus@{at}"),
            fmt_g(diam),
            fmt_g(rep.d_minus),
            lo_dir.into(),
        ]);
        t.push([
            format!("doubling_d_plus@{at}"),
            fmt_g(diam),
            fmt_g(rep.d_plus),
            hi_dir.into(),
        ]);
    }
    let summary = format!("{} bounds{mdp_note}", t.rows().len());
    Ok((t.to_csv(), summary))
}

fn render(ctx: &Ctx, spec: &RenderSpec) -> TaskResult {
    let pts = attractor_points(&ctx.cfg.rifs, &ctx.omega, spec.target_error, &ctx.cover)?;
    let bytes = render_ppm(&pts.points, ctx.cfg.rifs.ambient(), spec)?;
    let summary = format!(
        "{}x{} image of {} points (depth {}, error {})",
        spec.width,
        spec.height,
        pts.points.len(),
        pts.depth,
        fmt_g(pts.error_bound)
    );
    Ok((bytes, summary))
}

/// Smallest `k ≥ 0` with `2^-k ≤ ε`.
pub fn splice_length(epsilon: f64) -> usize {
    (1.0 / epsilon).log2().ceil().max(0.0) as usize
}

fn splice_demo(
    ctx: &Ctx,
    epsilon: f64,
    tail: &OmegaSeq,
    max_depth: usize,
    g: &rifslab_core::Gauge,
) -> TaskResult {
    let k = splice_length(epsilon);
    let v = splice(&ctx.omega, k, tail);
    let d = omega_distance(&ctx.omega, &v);
    let first = k.max(1);
    if max_depth < first {
        return Err(Error::Usage(format!(
            "max_depth {max_depth} is below the splice length {first}"
        )));
    }
    // Cylinders of F_v are images of the tail attractor, not of the whole box.
    let opts = CoverOptions {
        seed: CoverSeed::AttractorHull,
        ..ctx.cover
    };
    let mut t = Table::new(["k", "v", "d_omega", "depth", "cover_mass"]);
    let mut worst: f64 = 0.0;
    for depth in first..=max_depth {
        let cover = cylinder_cover_with(&ctx.cfg.rifs, &v, depth, &opts)?;
        let mass = hausdorff_upper_bound(&cover, g);
        worst = worst.max(mass);
        t.push([
            k.to_string(),
            v.to_string(),
            fmt_g(d),
            depth.to_string(),
            fmt_g(mass),
        ]);
    }
    let summary = format!(
        "k = {k}, v = {v}, d = {}, largest cover mass {}",
        fmt_g(d),
        fmt_g(worst)
    );
    Ok((t.to_csv(), summary))
}

fn sample(ctx: &Ctx, weights: Weights, horizon: usize) -> TaskResult {
    let n = weights.len();
    let w = BernoulliSampler::new(weights, ctx.seed).sample_omega(horizon)?;
    let mut counts = vec![0u64; n];
    for s in w.unfold(horizon) {
        counts[s as usize - 1] += 1;
    }
    let mut t = Table::new(["symbol", "count", "frequency"]);
    for (i, &c) in counts.iter().enumerate() {
        t.push([
            (i + 1).to_string(),
            c.to_string(),
            fmt_g(c as f64 / horizon as f64),
        ]);
    }
    Ok((
        t.to_csv(),
        format!("{horizon} draws with seed {}", ctx.seed),
    ))
}
