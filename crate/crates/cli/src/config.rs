//! Experiment configs: a versioned JSON document describing a RIFS, a
//! sequence ω and the tasks to run on them.
//!
//! Loading happens in three stages, each with its own error class: JSON
//! syntax, schema (shape, field names, structural checks) and semantics
//! (anything the core library rejects while the model is being built).

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rifslab_core::{
    AmbientBox, BernoulliSampler, CarpetSpec, ClosedForm, ContractionMap, DeterministicIfs, Gauge,
    OmegaSeq, Rifs, Weights,
};
use serde::de::{self, Deserializer};
use serde::Deserialize;

use crate::ConfigError;

pub const CONFIG_VERSION: u32 = 1;

/// A real number written as a JSON number or as a short expression:
/// `"1/3"`, `"log(2)/log(3)"`, `"sqrt(2)"`, `"2-sqrt(2)"` are all accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)
            .map_err(|_| de::Error::custom("expected a number or an expression string"))?
        {
            Repr::Num(x) => Ok(Real(x)),
            Repr::Text(s) => parse_real(&s).map(Real).map_err(de::Error::custom),
        }
    }
}

/// Evaluate `term (op term)*` left to right, where `op` is one of `+ - * /`
/// and a term is a decimal literal, `log(x)`, `sqrt(x)` or `pi`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let bad = || format!("cannot read {text:?} as a real number");
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    let mut value: Option<f64> = None;
    let mut op = '+';
    let mut rest = s.as_str();
    loop {
        let (term, tail) = read_term(rest).ok_or_else(bad)?;
        value = Some(match (value, op) {
            (None, _) => term,
            (Some(v), '+') => v + term,
            (Some(v), '-') => v - term,
            (Some(v), '*') => v * term,
            (Some(v), _) => v / term,
        });
        match tail.chars().next() {
            None => break,
            Some(c @ ('+' | '-' | '*' | '/')) => {
                op = c;
                rest = &tail[1..];
            }
            Some(_) => return Err(bad()),
        }
    }
    match value {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(format!("{text:?} does not evaluate to a finite number")),
    }
}

fn read_term(s: &str) -> Option<(f64, &str)> {
    for (name, f) in [("log", f64::ln as fn(f64) -> f64), ("sqrt", f64::sqrt)] {
        if let Some(inner) = s.strip_prefix(name).and_then(|r| r.strip_prefix('(')) {
            let close = inner.find(')')?;
            let arg = read_number(&inner[..close])?;
            return Some((f(arg), &inner[close + 1..]));
        }
    }
    if let Some(rest) = s.strip_prefix("pi") {
        return Some((std::f64::consts::PI, rest));
    }
    let b = s.as_bytes();
    let mut end = usize::from(matches!(b.first(), Some(b'-' | b'+')));
    while end < b.len() && (b[end].is_ascii_digit() || b[end] == b'.') {
        end += 1;
    }
    if end < b.len() && matches!(b[end], b'e' | b'E') {
        end += 1;
        if end < b.len() && matches!(b[end], b'-' | b'+') {
            end += 1;
        }
        while end < b.len() && b[end].is_ascii_digit() {
            end += 1;
        }
    }
    Some((read_number(&s[..end])?, &s[end..]))
}

fn read_number(s: &str) -> Option<f64> {
    if s.is_empty()
        || !s
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '-' | '+'))
    {
        return None;
    }
    s.parse().ok()
}

fn reals(v: &[Real]) -> Vec<f64> {
    v.iter().map(|r| r.0).collect()
}

// ---------------------------------------------------------------------------
// Raw schema

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub ambient: AmbientSpec,
    pub systems: Vec<SystemSpec>,
    pub omega: OmegaSpec,
    #[serde(default)]
    pub seed: u64,
    pub tasks: Vec<TaskSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSpec {
    pub lo: Vec<Real>,
    pub hi: Vec<Real>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub label: String,
    pub maps: Option<Vec<MapSpec>>,
    pub grid: Option<GridSpec>,
}

/// Cells of an `m × n` grid on the unit square, as `[column, row]` pairs.
/// On the unit interval use `m = 1`: row `r` is the piece `[r/n, (r+1)/n]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub m: u32,
    pub n: u32,
    pub cells: Vec<[u32; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Similarity {
        ratio: Real,
        /// Counter-clockwise, in degrees.
        #[serde(default)]
        rotation: Option<Real>,
        #[serde(default)]
        reflect: bool,
        translation: Vec<Real>,
    },
    Affine {
        matrix: [[Real; 2]; 2],
        translation: [Real; 2],
    },
    ClosedForm {
        name: String,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    #[serde(default)]
    pub prefix: Vec<u16>,
    pub cycle: Option<Vec<u16>>,
    pub bernoulli: Option<BernoulliSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BernoulliSpec {
    pub weights: Vec<Real>,
    pub horizon: usize,
}

/// An eventually periodic sequence, used where ω itself may not be random.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    #[serde(default)]
    pub prefix: Vec<u16>,
    pub cycle: Vec<u16>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    pub h: Real,
    pub p: Real,
}

/// `base^-from, …, base^-to`, or an explicit list.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    pub base: Option<Real>,
    pub from: Option<i32>,
    pub to: Option<i32>,
    pub values: Option<Vec<Real>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub power: Option<Real>,
    pub power_log: Option<Real>,
    /// `(t, G(t))` samples of a custom gauge.
    pub custom: Option<Vec<[Real; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MdpSpec {
    pub s: Real,
    pub radii: LadderSpec,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    256
}

fn default_steps() -> usize {
    100
}

fn default_msc_depth() -> usize {
    8
}

fn default_fg() -> [u8; 3] {
    [0, 0, 0]
}

fn default_bg() -> [u8; 3] {
    [255, 255, 255]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    Dim {
        out: Option<String>,
        growth: Option<GrowthSpec>,
        #[serde(default = "default_msc_depth")]
        msc_depth: usize,
    },
    Curve {
        out: Option<String>,
        #[serde(default = "default_steps")]
        steps: usize,
    },
    Minimize {
        out: Option<String>,
    },
    Boxdim {
        out: Option<String>,
        ladder: LadderSpec,
        #[serde(default)]
        grid_shift: f64,
    },
    MeasureBounds {
        out: Option<String>,
        gauge: GaugeSpec,
        #[serde(default)]
        depths: Vec<usize>,
        #[serde(default)]
        cylinder_mass: bool,
        packing: Option<LadderSpec>,
        mdp: Option<MdpSpec>,
        #[serde(default)]
        doubling: Vec<Real>,
    },
    Render {
        out: Option<String>,
        width: u32,
        height: u32,
        target_error: Real,
        #[serde(default = "default_fg")]
        fg: [u8; 3],
        #[serde(default = "default_bg")]
        bg: [u8; 3],
    },
    SpliceDemo {
        out: Option<String>,
        epsilon: Real,
        tail: SequenceSpec,
        max_depth: usize,
        gauge: GaugeSpec,
    },
    Sample {
        out: Option<String>,
        weights: Vec<Real>,
        horizon: usize,
    },
}

impl TaskSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::Dim { .. } => "dim",
            TaskSpec::Curve { .. } => "curve",
            TaskSpec::Minimize { .. } => "minimize",
            TaskSpec::Boxdim { .. } => "boxdim",
            TaskSpec::MeasureBounds { .. } => "measure-bounds",
            TaskSpec::Render { .. } => "render",
            TaskSpec::SpliceDemo { .. } => "splice-demo",
            TaskSpec::Sample { .. } => "sample",
        }
    }

    fn out(&self) -> Option<&str> {
        match self {
            TaskSpec::Dim { out, .. }
            | TaskSpec::Curve { out, .. }
            | TaskSpec::Minimize { out }
            | TaskSpec::Boxdim { out, .. }
            | TaskSpec::MeasureBounds { out, .. }
            | TaskSpec::Render { out, .. }
            | TaskSpec::SpliceDemo { out, .. }
            | TaskSpec::Sample { out, .. } => out.as_deref(),
        }
    }

    /// The declared output file name, or `<task>.csv` / `<task>.ppm`.
    pub fn output_name(&self) -> String {
        match self.out() {
            Some(o) => o.to_string(),
            None => {
                let ext = if matches!(self, TaskSpec::Render { .. }) {
                    "ppm"
                } else {
                    "csv"
                };
                format!("{}.{ext}", self.kind())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Validated model

/// How ω is obtained.
#[derive(Debug, Clone)]
pub enum OmegaSource {
    Fixed(OmegaSeq),
    Bernoulli { weights: Weights, horizon: usize },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub file: ConfigFile,
    pub rifs: Rifs,
    /// Present when every system is a grid.
    pub carpets: Option<Vec<CarpetSpec>>,
    pub omega: OmegaSource,
}

impl ExperimentConfig {
    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn seed(&self) -> u64 {
        self.file.seed
    }

    pub fn tasks(&self) -> &[TaskSpec] {
        &self.file.tasks
    }

    /// The sequence ω; Bernoulli sequences are drawn with `seed`.
    pub fn omega(&self, seed: u64) -> rifslab_core::Result<OmegaSeq> {
        match &self.omega {
            OmegaSource::Fixed(w) => Ok(w.clone()),
            OmegaSource::Bernoulli { weights, horizon } => {
                BernoulliSampler::new(weights.clone(), seed).sample_omega(*horizon)
            }
        }
    }
}

/// Read and fully validate a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: ConfigFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        json_error(e.into_inner(), field)
    })?;
    de.end().map_err(|e| json_error(e, String::new()))?;
    build(file)
}

fn json_error(e: serde_json::Error, field: String) -> ConfigError {
    let message = strip_position(&e.to_string());
    if e.is_data() {
        ConfigError::Schema { field, message }
    } else {
        ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn schema<T>(field: impl Into<String>, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Schema {
        field: field.into(),
        message: message.into(),
    })
}

fn semantic(field: impl Into<String>) -> impl FnOnce(rifslab_core::Error) -> ConfigError {
    let field = field.into();
    move |source| ConfigError::Semantic { field, source }
}

fn build(file: ConfigFile) -> Result<ExperimentConfig, ConfigError> {
    if file.version != CONFIG_VERSION {
        return schema(
            "version",
            format!(
                "unsupported version {} (expected {CONFIG_VERSION})",
                file.version
            ),
        );
    }
    let lo = reals(&file.ambient.lo);
    let hi = reals(&file.ambient.hi);
    let ambient = AmbientBox::new(&lo, &hi).map_err(semantic("ambient"))?;
    if file.systems.is_empty() {
        return schema("systems", "at least one system is required");
    }

    let mut systems = Vec::with_capacity(file.systems.len());
    let mut carpets = Vec::new();
    for (i, sys) in file.systems.iter().enumerate() {
        let at = format!("systems[{i}]");
        let (ifs, carpet) = build_system(sys, &ambient, &at)?;
        systems.push(ifs);
        if let Some(c) = carpet {
            carpets.push(c);
        }
    }
    let all_grids = carpets.len() == systems.len();
    let rifs = Rifs::new(ambient, systems).map_err(semantic("systems"))?;

    let omega = build_omega(&file.omega, rifs.len())?;
    if let OmegaSource::Fixed(w) = &omega {
        rifs.check_omega(w).map_err(semantic("omega"))?;
    }

    if file.tasks.is_empty() {
        return schema("tasks", "at least one task is required");
    }
    let mut outputs = BTreeSet::new();
    for (i, task) in file.tasks.iter().enumerate() {
        let at = format!("tasks[{i}]");
        let name = task.output_name();
        if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
            return schema(
                format!("{at}.out"),
                format!("{name:?} must be a plain file name"),
            );
        }
        if !outputs.insert(name.clone()) {
            return schema(
                format!("{at}.out"),
                format!("output {name:?} is declared twice"),
            );
        }
        check_task(task, &at, &rifs, all_grids)?;
    }

    Ok(ExperimentConfig {
        rifs,
        carpets: all_grids.then_some(carpets),
        omega,
        file,
    })
}

fn build_system(
    sys: &SystemSpec,
    ambient: &AmbientBox,
    at: &str,
) -> Result<(DeterministicIfs, Option<CarpetSpec>), ConfigError> {
    match (&sys.maps, &sys.grid) {
        (Some(maps), None) => {
            if maps.is_empty() {
                return schema(format!("{at}.maps"), "maps must be non-empty");
            }
            let maps = maps
                .iter()
                .enumerate()
                .map(|(j, m)| build_map(m, ambient.dim(), &format!("{at}.maps[{j}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let ifs = DeterministicIfs::new(sys.label.clone(), maps).map_err(semantic(at))?;
            Ok((ifs, None))
        }
        (None, Some(g)) => {
            let unit = AmbientBox::unit(ambient.dim());
            if ambient.bounds() != unit.bounds() {
                return schema(
                    format!("{at}.grid"),
                    "grid systems need the unit interval or unit square",
                );
            }
            let cells = g.cells.iter().map(|&[c, r]| (c, r)).collect();
            let carpet =
                CarpetSpec::new(g.m, g.n, cells).map_err(semantic(format!("{at}.grid")))?;
            let ifs = if ambient.dim() == 1 {
                if g.m != 1 {
                    return schema(
                        format!("{at}.grid.m"),
                        "grids on the unit interval have m = 1",
                    );
                }
                let r = 1.0 / g.n as f64;
                let maps = carpet
                    .cells()
                    .iter()
                    .map(|&(_, row)| ContractionMap::similarity_1d(r, false, row as f64 * r))
                    .collect::<rifslab_core::Result<Vec<_>>>()
                    .map_err(semantic(format!("{at}.grid")))?;
                DeterministicIfs::new(sys.label.clone(), maps)
            } else {
                DeterministicIfs::from_carpet(sys.label.clone(), &carpet)
            }
            .map_err(semantic(at))?;
            Ok((ifs, Some(carpet)))
        }
        _ => schema(at, "a system needs exactly one of \"maps\" or \"grid\""),
    }
}

fn build_map(spec: &MapSpec, dim: usize, at: &str) -> Result<ContractionMap, ConfigError> {
    let map = match spec {
        MapSpec::Similarity {
            ratio,
            rotation,
            reflect,
            translation,
        } => {
            if translation.len() != dim {
                return schema(
                    format!("{at}.translation"),
                    format!("expected {dim} components, got {}", translation.len()),
                );
            }
            if dim == 1 {
                if rotation.is_some() {
                    return schema(
                        format!("{at}.rotation"),
                        "rotations need a planar ambient space",
                    );
                }
                ContractionMap::similarity_1d(ratio.0, *reflect, translation[0].0)
            } else {
                let theta = rotation.map_or(0.0, |r| r.0.to_radians());
                ContractionMap::similarity_2d(
                    ratio.0,
                    theta,
                    *reflect,
                    [translation[0].0, translation[1].0],
                )
            }
        }
        MapSpec::Affine {
            matrix,
            translation,
        } => {
            if dim != 2 {
                return schema(at, "affine maps need a planar ambient space");
            }
            let m = [
                [matrix[0][0].0, matrix[0][1].0],
                [matrix[1][0].0, matrix[1][1].0],
            ];
            ContractionMap::affine(m, [translation[0].0, translation[1].0])
        }
        MapSpec::ClosedForm { name } => match ClosedForm::from_name(name) {
            Some(form) if form.dim() == dim => Ok(ContractionMap::closed_form(form)),
            Some(_) => {
                return schema(
                    format!("{at}.name"),
                    format!("{name} acts on a {}-dimensional space", 3 - dim),
                )
            }
            None => {
                let known: Vec<_> = ClosedForm::ALL.iter().map(|c| c.name()).collect();
                return schema(
                    format!("{at}.name"),
                    format!("unknown map {name:?} (known: {})", known.join(", ")),
                );
            }
        },
    };
    map.map_err(semantic(at))
}

fn build_omega(spec: &OmegaSpec, n_systems: usize) -> Result<OmegaSource, ConfigError> {
    match (&spec.cycle, &spec.bernoulli) {
        (Some(cycle), None) => Ok(OmegaSource::Fixed(build_sequence(
            &spec.prefix,
            cycle,
            "omega",
        )?)),
        (None, Some(b)) => {
            if !spec.prefix.is_empty() {
                return schema("omega.prefix", "a Bernoulli sequence takes no prefix");
            }
            let weights = build_weights(&b.weights, n_systems, "omega.bernoulli.weights")?;
            if b.horizon == 0 {
                return schema("omega.bernoulli.horizon", "horizon must be at least 1");
            }
            Ok(OmegaSource::Bernoulli {
                weights,
                horizon: b.horizon,
            })
        }
        _ => schema("omega", "give exactly one of \"cycle\" or \"bernoulli\""),
    }
}

fn build_sequence(prefix: &[u16], cycle: &[u16], at: &str) -> Result<OmegaSeq, ConfigError> {
    if cycle.is_empty() {
        return schema(format!("{at}.cycle"), "cycle must be non-empty");
    }
    OmegaSeq::new(prefix.to_vec(), cycle.to_vec()).map_err(semantic(at))
}

fn build_weights(w: &[Real], n_systems: usize, at: &str) -> Result<Weights, ConfigError> {
    if w.len() != n_systems {
        return schema(at, format!("expected {n_systems} weights, got {}", w.len()));
    }
    Weights::new(reals(w)).map_err(semantic(at))
}

/// Build a gauge function from its spec.
pub fn build_gauge(g: &GaugeSpec, at: &str) -> Result<Gauge, ConfigError> {
    match (&g.power, &g.power_log, &g.custom) {
        (Some(s), None, None) => Gauge::power(s.0).map_err(semantic(at)),
        (None, Some(s), None) => Gauge::power_log(s.0).map_err(semantic(at)),
        (None, None, Some(samples)) => {
            let pts = samples.iter().map(|[t, v]| (t.0, v.0)).collect();
            rifslab_core::measure::CustomGauge::new(pts)
                .map(Gauge::Custom)
                .map_err(semantic(at))
        }
        _ => schema(
            at,
            "give exactly one of \"power\", \"power_log\" or \"custom\"",
        ),
    }
}

/// Expand a ladder spec into its rungs.
pub fn build_ladder(l: &LadderSpec, at: &str) -> Result<Vec<f64>, ConfigError> {
    match (l.base, l.from, l.to, &l.values) {
        (Some(base), Some(from), Some(to), None) => {
            rifslab_core::boxcount::geometric_ladder(base.0, from, to).map_err(semantic(at))
        }
        (None, None, None, Some(v)) if !v.is_empty() => Ok(reals(v)),
        (None, None, None, Some(_)) => schema(format!("{at}.values"), "values must be non-empty"),
        _ => schema(
            at,
            "give either \"base\", \"from\" and \"to\", or \"values\"",
        ),
    }
}

/// Sequence given for a splice tail.
pub fn build_tail(t: &SequenceSpec, at: &str) -> Result<OmegaSeq, ConfigError> {
    build_sequence(&t.prefix, &t.cycle, at)
}

fn check_task(task: &TaskSpec, at: &str, rifs: &Rifs, all_grids: bool) -> Result<(), ConfigError> {
    match task {
        TaskSpec::Curve { steps, .. } => {
            if *steps == 0 {
                return schema(format!("{at}.steps"), "steps must be at least 1");
            }
            if !all_grids || rifs.len() != 2 {
                return schema(at, "curve needs exactly two grid systems");
            }
        }
        TaskSpec::Minimize { .. } => {
            if !all_grids || rifs.len() != 2 {
                return schema(at, "minimize needs exactly two grid systems");
            }
        }
        TaskSpec::Boxdim { ladder, .. } => {
            build_ladder(ladder, &format!("{at}.ladder"))?;
        }
        TaskSpec::MeasureBounds {
            gauge,
            packing,
            mdp,
            ..
        } => {
            build_gauge(gauge, &format!("{at}.gauge"))?;
            if let Some(p) = packing {
                build_ladder(p, &format!("{at}.packing"))?;
            }
            if let Some(m) = mdp {
                build_ladder(&m.radii, &format!("{at}.mdp.radii"))?;
                if m.samples == 0 {
                    return schema(format!("{at}.mdp.samples"), "samples must be at least 1");
                }
            }
        }
        TaskSpec::Render { target_error, .. } => {
            if !(target_error.0 > 0.0) {
                return schema(
                    format!("{at}.target_error"),
                    "target_error must be positive",
                );
            }
        }
        TaskSpec::SpliceDemo {
            epsilon,
            tail,
            gauge,
            ..
        } => {
            if !(epsilon.0 > 0.0) {
                return schema(format!("{at}.epsilon"), "epsilon must be positive");
            }
            let t = build_tail(tail, &format!("{at}.tail"))?;
            rifs.check_omega(&t)
                .map_err(semantic(format!("{at}.tail")))?;
            build_gauge(gauge, &format!("{at}.gauge"))?;
        }
        TaskSpec::Sample {
            weights, horizon, ..
        } => {
            build_weights(weights, rifs.len(), &format!("{at}.weights"))?;
            if *horizon == 0 {
                return schema(format!("{at}.horizon"), "horizon must be at least 1");
            }
        }
        TaskSpec::Dim { growth, .. } => {
            if let Some(g) = growth {
                if !(g.h.0 >= 0.0 && g.p.0 >= 0.0) {
                    return schema(format!("{at}.growth"), "h and p must be non-negative");
                }
            }
        }
    }
    Ok(())
}

impl fmt::Display for OmegaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaSource::Fixed(w) => write!(f, "{w}"),
            OmegaSource::Bernoulli { weights, horizon } => {
                write!(f, "bernoulli{:?} x {horizon}", weights.as_slice())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_expressions() {
        let close = |s: &str, v: f64| assert!((parse_real(s).unwrap() - v).abs() < 1e-15, "{s}");
        close("1/3", 1.0 / 3.0);
        close("log(2)/log(3)", 2f64.ln() / 3f64.ln());
        close("2 - sqrt(2)", 2.0 - 2f64.sqrt());
        close("1e-9", 1e-9);
        close("-0.5", -0.5);
        close("2.5e-3*4", 0.01);
        close("pi/4", std::f64::consts::FRAC_PI_4);
        for bad in ["", "x", "1//2", "log(2", "1/0", "log(-1)"] {
            assert!(parse_real(bad).is_err(), "{bad}");
        }
    }
}
