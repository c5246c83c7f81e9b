//! Experiment files.
//!
//! One experiment per TOML file. Top-level keys describe the run, and four
//! optional tables (`[set]`, `[iteration]`, `[bounds]`, `[checks]`) hold the
//! rest:
//!
//! ```toml
//! name = "quarter-turn"
//! space = "euclidean:2"              # hyperboloid:N, star-tree:L1,L2,...
//! operator = "rotation:1.5707963267948966"
//! schedule = "constant:0.5"          # alternating, list:a,b,...
//! start = [1.0, 0.0]
//! epsilons = [0.5, 0.1]
//!
//! [set]
//! kind = "ball"                      # whole, ball, box, subtree
//! radius = 1.0
//!
//! [iteration]
//! max_steps = 250
//!
//! [bounds]
//! modulus = "cat0"
//! ishikawa_k = 2
//! ```
//!
//! Points are written as coordinates in Euclidean space, as spatial
//! coordinates (lifted onto the sheet) in the hyperboloid, and as
//! `[edge, offset]` in a star tree. `operator` may be a list of stages,
//! applied right to left.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use kmrate_core::iteration::{witness_theta, LambdaSchedule, StopRule};
use serde::Deserialize;
use toml::Spanned;

use crate::error::{ConfigError, SchemaError};

pub const DEFAULT_MAX_STEPS: usize = 250;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 0;

/// Largest `n` for which a linear witness `θ(n) = s·n` is checked against
/// the schedule.
const LINEAR_THETA_CHECK: u64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceSpec {
    Euclidean(usize),
    Hyperboloid(usize),
    StarTree(Vec<f64>),
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Euclidean(d) => write!(f, "euclidean:{d}"),
            SpaceSpec::Hyperboloid(d) => write!(f, "hyperboloid:{d}"),
            SpaceSpec::StarTree(l) => write!(f, "star-tree:{}", join(l)),
        }
    }
}

/// One stage of the operator pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum StageSpec {
    Identity,
    Rotation(f64),
    Scale(f64),
    Swap(usize, usize),
    Permute(Vec<usize>),
    /// Nearest-point map onto `[set]`.
    Project,
}

impl fmt::Display for StageSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageSpec::Identity => f.write_str("identity"),
            StageSpec::Rotation(a) => write!(f, "rotation:{a}"),
            StageSpec::Scale(s) => write!(f, "scale:{s}"),
            StageSpec::Swap(a, b) => write!(f, "swap:{a},{b}"),
            StageSpec::Permute(p) => {
                let parts: Vec<String> = p.iter().map(|e| e.to_string()).collect();
                write!(f, "permute:{}", parts.join(","))
            }
            StageSpec::Project => f.write_str("project"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeSpec {
    Whole,
    Ball { center: Option<Vec<f64>>, radius: f64 },
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Subtree { limits: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetSpec {
    pub shape: ShapeSpec,
    /// Overrides the exact diameter with a larger bound.
    pub diameter: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModulusSpec {
    Cat0,
    Cat0Monotonized,
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaSpec {
    /// Least index with `Σλ_k(1−λ_k) ≥ n`.
    Witness,
    /// `⌈n/(λ(1−λ))⌉`; constant schedules only.
    ClosedForm,
    Linear(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsSpec {
    pub modulus: ModulusSpec,
    /// Radius `b` with `ρ(start, y) ≤ b` for an (approximate) fixed point `y`.
    pub afp_radius_b: Option<f64>,
    /// Explicit diameter bound; otherwise the set's own diameter.
    pub d_c: Option<f64>,
    pub ishikawa_k: Option<u64>,
    pub theta: ThetaSpec,
    pub derived: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChecksSpec {
    pub seed: u64,
    pub samples: usize,
    /// Defaults to a per-space radius.
    pub sample_radius: Option<f64>,
    /// Defaults to the space's own tolerance.
    pub tolerance: Option<f64>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub space: SpaceSpec,
    /// Outermost stage first.
    pub operator: Vec<StageSpec>,
    pub schedule: LambdaSchedule,
    pub start: Vec<f64>,
    pub reference: Option<Vec<f64>>,
    pub epsilons: Vec<f64>,
    pub set: Option<SetSpec>,
    pub stop: StopRule,
    pub bounds: BoundsSpec,
    pub checks: ChecksSpec,
    positions: BTreeMap<&'static str, (usize, usize)>,
}

impl ExperimentConfig {
    /// A schema error attached to the line of `key`, when known.
    pub(crate) fn error(&self, key: &'static str, message: impl Into<String>) -> SchemaError {
        let (line, column) = self.positions.get(key).copied().unwrap_or((0, 0));
        SchemaError { key: key.into(), line, column, message: message.into() }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Spanned<String>,
    space: Spanned<String>,
    operator: Spanned<OneOrMany>,
    schedule: Spanned<String>,
    start: Spanned<Vec<f64>>,
    reference: Option<Spanned<Vec<f64>>>,
    epsilons: Option<Spanned<Vec<f64>>>,
    set: Option<RawSet>,
    iteration: Option<RawIteration>,
    bounds: Option<RawBounds>,
    checks: Option<RawChecks>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    kind: Spanned<String>,
    center: Option<Spanned<Vec<f64>>>,
    radius: Option<Spanned<f64>>,
    lower: Option<Spanned<Vec<f64>>>,
    upper: Option<Spanned<Vec<f64>>>,
    limits: Option<Spanned<Vec<f64>>>,
    diameter: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIteration {
    max_steps: Option<Spanned<u64>>,
    target_residual: Option<Spanned<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    modulus: Option<Spanned<String>>,
    modulus_value: Option<Spanned<f64>>,
    afp_radius_b: Option<Spanned<f64>>,
    #[serde(rename = "d_C")]
    d_c: Option<Spanned<f64>>,
    ishikawa_k: Option<Spanned<u64>>,
    theta: Option<Spanned<String>>,
    derived: Option<Spanned<bool>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChecks {
    seed: Option<Spanned<u64>>,
    samples: Option<Spanned<u64>>,
    sample_radius: Option<Spanned<f64>>,
    tolerance: Option<Spanned<f64>>,
}

/// Line and column (both 1-based) of a byte offset.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

struct Collector<'a> {
    text: &'a str,
    positions: BTreeMap<&'static str, (usize, usize)>,
    errors: Vec<SchemaError>,
}

impl<'a> Collector<'a> {
    fn new(text: &'a str) -> Self {
        Collector { text, positions: BTreeMap::new(), errors: Vec::new() }
    }

    fn at<T>(&mut self, key: &'static str, v: Spanned<T>) -> T {
        self.mark(key, v.span());
        v.into_inner()
    }

    fn opt<T>(&mut self, key: &'static str, v: Option<Spanned<T>>) -> Option<T> {
        v.map(|v| self.at(key, v))
    }

    fn mark(&mut self, key: &'static str, span: Range<usize>) {
        let pos = position(self.text, span.start);
        self.positions.insert(key, pos);
    }

    fn fail(&mut self, key: &'static str, message: impl Into<String>) {
        let (line, column) = self.positions.get(key).copied().unwrap_or((0, 0));
        self.errors.push(SchemaError { key: key.into(), line, column, message: message.into() });
    }
}

/// Parses and validates one experiment. Every problem found is reported,
/// each with the line of the offending key.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| position(text, s.start));
        ConfigError::new(vec![SchemaError {
            key: String::new(),
            line,
            column,
            message: e.message().trim().to_string(),
        }])
    })?;
    let mut c = Collector::new(text);

    let name = c.at("name", raw.name);
    if name.is_empty() || !name.chars().all(|ch| ch.is_ascii_alphanumeric() || "-_.".contains(ch)) {
        c.fail("name", format!("`{name}` must be non-empty and use only letters, digits, '-', '_' or '.'"));
    }

    let space_text = c.at("space", raw.space);
    let space = match parse_space(&space_text) {
        Ok(s) => Some(s),
        Err(m) => {
            c.fail("space", m);
            None
        }
    };

    let stages = match c.at("operator", raw.operator) {
        OneOrMany::One(s) => vec![s],
        OneOrMany::Many(v) => v,
    };
    let mut operator = Vec::new();
    if stages.is_empty() {
        c.fail("operator", "needs at least one stage");
    }
    for s in &stages {
        match parse_stage(s) {
            Ok(st) => operator.push(st),
            Err(m) => c.fail("operator", m),
        }
    }

    let schedule_text = c.at("schedule", raw.schedule);
    let schedule = match parse_schedule(&schedule_text) {
        Ok(s) => Some(s),
        Err(m) => {
            c.fail("schedule", m);
            None
        }
    };

    let start = c.at("start", raw.start);
    let reference = c.opt("reference", raw.reference);
    let epsilons = c.opt("epsilons", raw.epsilons).unwrap_or_default();
    if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        c.fail("epsilons", format!("every epsilon must be positive, got {e}"));
    }

    let set = raw.set.map(|s| parse_set(&mut c, s));

    let (max_steps, target_residual) = match raw.iteration {
        Some(it) => {
            (c.opt("iteration.max_steps", it.max_steps), c.opt("iteration.target_residual", it.target_residual))
        }
        None => (None, None),
    };
    let max_steps = max_steps.unwrap_or(DEFAULT_MAX_STEPS as u64);
    if max_steps == 0 || max_steps > 10_000_000 {
        c.fail("iteration.max_steps", format!("{max_steps} outside 1..=10000000"));
    }
    let target_residual = target_residual.unwrap_or(0.0);
    if !(target_residual.is_finite() && target_residual >= 0.0) {
        c.fail("iteration.target_residual", format!("must be a nonnegative number, got {target_residual}"));
    }
    let stop = StopRule { max_steps: max_steps as usize, target_residual };

    let bounds = parse_bounds(&mut c, raw.bounds, schedule.as_ref(), max_steps);
    let checks = parse_checks(&mut c, raw.checks);

    if !epsilons.is_empty() && bounds.afp_radius_b.is_none() && bounds.d_c.is_none() {
        let bounded_set = set
            .as_ref()
            .and_then(|s| s.as_ref())
            .is_some_and(|s| !matches!(s.shape, ShapeSpec::Whole) || s.diameter.is_some());
        if !bounded_set {
            c.fail("epsilons", "bounds need a diameter (a bounded [set] or bounds.d_C) or bounds.afp_radius_b");
        }
    }

    let set = match set {
        Some(Some(s)) => Some(s),
        Some(None) => None,
        None => None,
    };
    if !c.errors.is_empty() {
        return Err(ConfigError::new(c.errors));
    }
    let (Some(space), Some(schedule)) = (space, schedule) else { unreachable!("errors were recorded") };
    let cfg = ExperimentConfig {
        name,
        space,
        operator,
        schedule,
        start,
        reference,
        epsilons,
        set,
        stop,
        bounds,
        checks,
        positions: c.positions,
    };
    // Build everything once so that geometric problems (a start point off
    // the set, an offset past the end of an edge) surface here.
    crate::experiment::validate(&cfg)?;
    Ok(cfg)
}

fn parse_f64(s: &str, what: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("{what}: `{s}` is not a finite number"))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|p| parse_f64(p, what)).collect()
}

fn parse_indices(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|p| p.trim().parse::<usize>().map_err(|_| format!("`{p}` is not an edge index"))).collect()
}

pub fn parse_space(s: &str) -> Result<SpaceSpec, String> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let dim = || -> Result<usize, String> {
        arg.trim()
            .parse::<usize>()
            .ok()
            .filter(|d| *d >= 1)
            .ok_or_else(|| format!("`{s}`: dimension must be a positive integer"))
    };
    match kind.trim() {
        "euclidean" => Ok(SpaceSpec::Euclidean(dim()?)),
        "hyperboloid" => Ok(SpaceSpec::Hyperboloid(dim()?)),
        "star-tree" => {
            let lengths = parse_list(arg, "edge length")?;
            if lengths.is_empty() || lengths.iter().any(|l| *l <= 0.0) {
                return Err(format!("`{s}`: edge lengths must be positive"));
            }
            Ok(SpaceSpec::StarTree(lengths))
        }
        other => Err(format!("unknown space kind `{other}` (expected euclidean, hyperboloid or star-tree)")),
    }
}

pub fn parse_stage(s: &str) -> Result<StageSpec, String> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let no_arg = |st: StageSpec| if arg.is_empty() { Ok(st) } else { Err(format!("`{s}` takes no argument")) };
    match kind.trim() {
        "identity" => no_arg(StageSpec::Identity),
        "project" => no_arg(StageSpec::Project),
        "rotation" => Ok(StageSpec::Rotation(parse_f64(arg, "rotation angle")?)),
        "scale" => Ok(StageSpec::Scale(parse_f64(arg, "scale factor")?)),
        "swap" => match parse_indices(arg)?.as_slice() {
            [a, b] => Ok(StageSpec::Swap(*a, *b)),
            _ => Err(format!("`{s}`: swap takes two edge indices")),
        },
        "permute" => Ok(StageSpec::Permute(parse_indices(arg)?)),
        other => Err(format!(
            "unknown operator kind `{other}` (expected identity, rotation, scale, swap, permute or project)"
        )),
    }
}

pub fn parse_schedule(s: &str) -> Result<LambdaSchedule, String> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    match kind.trim() {
        "constant" => {
            let l = parse_f64(arg, "lambda")?;
            LambdaSchedule::constant(l).map_err(|_| format!("lambda {l} outside (0, 1)"))
        }
        "alternating" if arg.is_empty() => Ok(LambdaSchedule::alternating()),
        "list" => {
            let v = parse_list(arg, "lambda")?;
            if let Some(l) = v.iter().find(|l| !(0.0..=1.0).contains(*l)) {
                return Err(format!("lambda {l} outside [0, 1]"));
            }
            if !v.iter().any(|l| *l > 0.0 && *l < 1.0) {
                return Err("no weight lies strictly between 0 and 1, so the weights never accumulate".into());
            }
            LambdaSchedule::list(&v).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown schedule `{other}` (expected constant:λ, alternating or list:λ0,λ1,...)")),
    }
}

pub fn parse_theta(s: &str) -> Result<ThetaSpec, String> {
    match s.split_once(':') {
        None if s == "witness" => Ok(ThetaSpec::Witness),
        None if s == "closed-form" => Ok(ThetaSpec::ClosedForm),
        Some(("linear", k)) => match k.trim().parse::<u64>() {
            Ok(k) if k >= 1 => Ok(ThetaSpec::Linear(k)),
            _ => Err(format!("`{s}`: slope must be a positive integer")),
        },
        _ => Err(format!("unknown theta `{s}` (expected witness, closed-form or linear:s)")),
    }
}

fn parse_set(c: &mut Collector<'_>, raw: RawSet) -> Option<SetSpec> {
    let kind = c.at("set.kind", raw.kind);
    let center = c.opt("set.center", raw.center);
    let radius = c.opt("set.radius", raw.radius);
    let lower = c.opt("set.lower", raw.lower);
    let upper = c.opt("set.upper", raw.upper);
    let limits = c.opt("set.limits", raw.limits);
    let diameter = c.opt("set.diameter", raw.diameter);

    let unused = |c: &mut Collector<'_>, key: &'static str, present: bool| {
        if present {
            c.fail(key, format!("not used by `{kind}` sets"));
        }
    };
    let shape = match kind.as_str() {
        "whole" => {
            unused(c, "set.center", center.is_some());
            unused(c, "set.radius", radius.is_some());
            unused(c, "set.lower", lower.is_some());
            unused(c, "set.upper", upper.is_some());
            unused(c, "set.limits", limits.is_some());
            if diameter.is_some() {
                c.fail("set.diameter", "the whole space is unbounded");
            }
            Some(ShapeSpec::Whole)
        }
        "ball" => {
            unused(c, "set.lower", lower.is_some());
            unused(c, "set.upper", upper.is_some());
            unused(c, "set.limits", limits.is_some());
            match radius {
                Some(r) if r.is_finite() && r > 0.0 => Some(ShapeSpec::Ball { center, radius: r }),
                Some(r) => {
                    c.fail("set.radius", format!("must be positive, got {r}"));
                    None
                }
                None => {
                    c.fail("set.kind", "a ball needs `radius`");
                    None
                }
            }
        }
        "box" => {
            unused(c, "set.center", center.is_some());
            unused(c, "set.radius", radius.is_some());
            unused(c, "set.limits", limits.is_some());
            match (lower, upper) {
                (Some(lower), Some(upper)) => Some(ShapeSpec::Box { lower, upper }),
                _ => {
                    c.fail("set.kind", "a box needs `lower` and `upper`");
                    None
                }
            }
        }
        "subtree" => {
            unused(c, "set.center", center.is_some());
            unused(c, "set.radius", radius.is_some());
            unused(c, "set.lower", lower.is_some());
            unused(c, "set.upper", upper.is_some());
            match limits {
                Some(limits) => Some(ShapeSpec::Subtree { limits }),
                None => {
                    c.fail("set.kind", "a subtree needs `limits`");
                    None
                }
            }
        }
        other => {
            c.fail("set.kind", format!("unknown set kind `{other}` (expected whole, ball, box or subtree)"));
            None
        }
    };
    if let Some(d) = diameter {
        if !(d.is_finite() && d > 0.0) {
            c.fail("set.diameter", format!("must be positive, got {d}"));
        }
    }
    shape.map(|shape| SetSpec { shape, diameter })
}

fn parse_bounds(
    c: &mut Collector<'_>,
    raw: Option<RawBounds>,
    schedule: Option<&LambdaSchedule>,
    max_steps: u64,
) -> BoundsSpec {
    let constant = matches!(schedule, Some(LambdaSchedule::Constant(_)));
    let mut out = BoundsSpec {
        modulus: ModulusSpec::Cat0,
        afp_radius_b: None,
        d_c: None,
        ishikawa_k: None,
        theta: if constant { ThetaSpec::ClosedForm } else { ThetaSpec::Witness },
        derived: false,
    };
    let Some(raw) = raw else {
        return out;
    };
    let modulus = c.opt("bounds.modulus", raw.modulus);
    let value = c.opt("bounds.modulus_value", raw.modulus_value);
    match (modulus.as_deref(), value) {
        (None | Some("cat0"), None) => {}
        (Some("cat0-monotonized"), None) => out.modulus = ModulusSpec::Cat0Monotonized,
        (Some("custom-constant"), Some(v)) if v > 0.0 && v <= 1.0 => out.modulus = ModulusSpec::Constant(v),
        (Some("custom-constant"), Some(v)) => c.fail("bounds.modulus_value", format!("{v} outside (0, 1]")),
        (Some("custom-constant"), None) => c.fail("bounds.modulus", "custom-constant needs `modulus_value`"),
        (_, Some(_)) => c.fail("bounds.modulus_value", "only used with modulus = \"custom-constant\""),
        (Some(other), None) => c.fail(
            "bounds.modulus",
            format!("unknown modulus `{other}` (expected cat0, cat0-monotonized or custom-constant)"),
        ),
    }

    for (key, v) in [("bounds.afp_radius_b", &raw.afp_radius_b), ("bounds.d_C", &raw.d_c)] {
        if let Some(v) = v {
            c.mark(key, v.span());
            if !(v.get_ref().is_finite() && *v.get_ref() > 0.0) {
                c.fail(key, format!("must be positive, got {}", v.get_ref()));
            }
        }
    }
    out.afp_radius_b = raw.afp_radius_b.map(Spanned::into_inner);
    out.d_c = raw.d_c.map(Spanned::into_inner);

    if let Some(k) = c.opt("bounds.ishikawa_k", raw.ishikawa_k) {
        if k < 2 {
            c.fail("bounds.ishikawa_k", format!("must be at least 2, got {k}"));
        } else if let Some(s) = schedule {
            // Every weight used must lie in [1/K, 1 − 1/K].
            let lo = 1.0 / k as f64;
            if let Some(i) = (0..max_steps).find(|i| {
                let l = s.lambda(*i);
                l < lo || l > 1.0 - lo
            }) {
                c.fail("bounds.ishikawa_k", format!("weight λ_{i} = {} lies outside [1/{k}, 1 - 1/{k}]", s.lambda(i)));
            }
        }
        out.ishikawa_k = Some(k);
    }

    if let Some(t) = c.opt("bounds.theta", raw.theta) {
        match parse_theta(&t) {
            Ok(ThetaSpec::ClosedForm) if !constant => {
                c.fail("bounds.theta", "closed-form needs a constant schedule");
            }
            Ok(ThetaSpec::Linear(s)) => {
                if let Some(sched) = schedule {
                    // A linear witness must dominate the least one.
                    for n in 1..=LINEAR_THETA_CHECK {
                        match witness_theta(sched, n) {
                            Ok(w) if w <= s.saturating_mul(n) => {}
                            Ok(w) => {
                                c.fail(
                                    "bounds.theta",
                                    format!("{s}n is not a witness: at n = {n} the weights need {w} terms"),
                                );
                                break;
                            }
                            Err(e) => {
                                c.fail("bounds.theta", e.to_string());
                                break;
                            }
                        }
                    }
                }
                out.theta = ThetaSpec::Linear(s);
            }
            Ok(th) => out.theta = th,
            Err(m) => c.fail("bounds.theta", m),
        }
    }
    out.derived = c.opt("bounds.derived", raw.derived).unwrap_or(false);
    out
}

fn parse_checks(c: &mut Collector<'_>, raw: Option<RawChecks>) -> ChecksSpec {
    let mut out = ChecksSpec { seed: DEFAULT_SEED, samples: DEFAULT_SAMPLES, sample_radius: None, tolerance: None };
    let Some(raw) = raw else {
        return out;
    };
    if let Some(s) = c.opt("checks.seed", raw.seed) {
        out.seed = s;
    }
    if let Some(n) = c.opt("checks.samples", raw.samples) {
        if n == 0 || n > 10_000_000 {
            c.fail("checks.samples", format!("{n} outside 1..=10000000"));
        }
        out.samples = n as usize;
    }
    out.sample_radius = c.opt("checks.sample_radius", raw.sample_radius);
    if let Some(r) = out.sample_radius {
        if !(r.is_finite() && r > 0.0) {
            c.fail("checks.sample_radius", format!("must be positive, got {r}"));
        }
    }
    out.tolerance = c.opt("checks.tolerance", raw.tolerance);
    if let Some(t) = out.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            c.fail("checks.tolerance", format!("must be nonnegative, got {t}"));
        }
    }
    out
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
