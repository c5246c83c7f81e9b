//! Running an experiment: the orbit, its trace file, the bounds for each
//! epsilon, and every check suite.

use std::fs;
use std::path::{Path, PathBuf};

use kmrate_core::convexity::{
    check_uc_inequality, check_uc_lambda_inequality, eta_cat0, ConstantModulus, Modulus, Monotonized,
};
use kmrate_core::geodesic::{check_cn_inequality, check_midpoint_uniqueness, check_segment_identities, check_w_axioms};
use kmrate_core::iteration::{
    check_descent_along, check_km_growth, check_residual_bound, check_residual_monotone, check_summed_descent_along,
    run_km_with_reference, witness_theta, IterationTrace, LambdaSchedule,
};
use kmrate_core::operators::{check_nonexpansive, compose, identity, make_metric_projection, ConvexSet, SetShape};
use kmrate_core::rates::*;
use kmrate_core::spaces::{make_euclidean, make_hyperboloid, make_star_tree};
use kmrate_core::{AxiomReport, Check, GeodesicSpace, Sampler};

use crate::config::{ExperimentConfig, ModulusSpec, ShapeSpec, SpaceSpec, StageSpec, ThetaSpec};
use crate::error::{ConfigError, HarnessError, SchemaError};
use crate::output;
use crate::spaces::{DynOperator, HarnessSpace};

/// Whether the first crossing respects a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Violated,
    /// The residual never reached epsilon and the bound lies past the trace.
    Unresolved,
}

impl Validity {
    pub fn label(self) -> &'static str {
        match self {
            Validity::Valid => "yes",
            Validity::Violated => "NO",
            Validity::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub bound: RateBound,
    pub validity: Validity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonRow {
    pub eps: f64,
    /// First `n` with `res(n) ≤ ε`.
    pub n_star: Option<usize>,
    pub bounds: Vec<BoundRow>,
    /// Bounds that could not be evaluated, with the reason.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub space: String,
    pub operator: String,
    pub schedule: String,
    pub steps: usize,
    pub final_residual: f64,
    pub d_c: Option<f64>,
    pub afp_radius_b: Option<f64>,
    pub rows: Vec<EpsilonRow>,
    pub checks: Vec<AxiomReport>,
    pub notes: Vec<String>,
    pub trace_path: Option<PathBuf>,
}

impl ExperimentReport {
    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().flat_map(|r| &r.bounds).filter(|b| b.validity != Validity::Valid).count()
    }

    pub fn passed(&self) -> bool {
        self.failed_checks() == 0 && self.failed_rows() == 0
    }
}

/// Property-suite results for `check`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub space: String,
    pub operator: String,
    pub checks: Vec<AxiomReport>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(AxiomReport::passed)
    }
}

/// Everything an experiment needs, built from its config.
pub(crate) struct Built<S: HarnessSpace> {
    pub space: S,
    pub op: DynOperator<S>,
    pub start: S::Point,
    pub reference: Option<S::Point>,
    pub set: Option<ConvexSet<S::Point>>,
    pub d_c: Option<f64>,
    pub tol: f64,
}

macro_rules! with_space {
    ($cfg:expr, $s:ident => $body:expr) => {
        match &$cfg.space {
            SpaceSpec::Euclidean(d) => {
                let $s = make_euclidean(*d).map_err(|e| ConfigError::from($cfg.error("space", e.to_string())))?;
                $body
            }
            SpaceSpec::Hyperboloid(d) => {
                let $s = make_hyperboloid(*d).map_err(|e| ConfigError::from($cfg.error("space", e.to_string())))?;
                $body
            }
            SpaceSpec::StarTree(l) => {
                let $s = make_star_tree(l).map_err(|e| ConfigError::from($cfg.error("space", e.to_string())))?;
                $body
            }
        }
    };
}

/// Builds the experiment without running it.
pub(crate) fn validate(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    with_space!(cfg, s => build(s, cfg).map(|_| ()))
}

fn build<S: HarnessSpace>(space: S, cfg: &ExperimentConfig) -> Result<Built<S>, ConfigError> {
    let mut errors: Vec<SchemaError> = Vec::new();
    let tol = cfg.checks.tolerance.unwrap_or_else(|| space.default_tolerance());

    let mut set = None;
    if let Some(spec) = &cfg.set {
        let shape = match &spec.shape {
            ShapeSpec::Whole => ConvexSet::whole(None).map_err(|e| e.to_string()),
            ShapeSpec::Ball { center, radius } => {
                let c = match center {
                    Some(c) => space.read_point(c).map_err(|m| format!("center: {m}")),
                    None => Ok(space.base_point()),
                };
                c.and_then(|c| ConvexSet::ball(&space, c, *radius).map_err(|e| e.to_string()))
            }
            other => space.read_shape(other),
        };
        match shape {
            Ok(s) => match spec.diameter {
                Some(d) => match s.with_diameter_bound(d) {
                    Ok(s) => set = Some(s),
                    Err(e) => errors.push(cfg.error("set.diameter", e.to_string())),
                },
                None => set = Some(s),
            },
            Err(m) => errors.push(cfg.error("set.kind", m)),
        }
    }

    let mut d_c = set.as_ref().and_then(ConvexSet::diameter);
    if let Some(d) = cfg.bounds.d_c {
        match &set {
            Some(s) if s.diameter().is_some() => match s.clone().with_diameter_bound(d) {
                Ok(_) => d_c = Some(d),
                Err(e) => errors.push(cfg.error("bounds.d_C", e.to_string())),
            },
            Some(_) | None => errors.push(cfg.error("bounds.d_C", "a diameter bound needs a bounded [set]")),
        }
    }

    let start = match space.read_point(&cfg.start) {
        Ok(p) => Some(p),
        Err(m) => {
            errors.push(cfg.error("start", m));
            None
        }
    };
    if let (Some(s), Some(p)) = (&set, &start) {
        match space.contains(s, p, tol) {
            Ok(true) => {}
            Ok(false) => errors.push(cfg.error("start", "lies outside [set]")),
            Err(e) => errors.push(cfg.error("start", e.to_string())),
        }
    }

    let mut op: Option<DynOperator<S>> = None;
    for stage in cfg.operator.iter().rev() {
        let next: Result<DynOperator<S>, String> = match stage {
            StageSpec::Identity => Ok(Box::new(identity(&space))),
            StageSpec::Project => match &set {
                Some(s) => make_metric_projection(&space, s.clone())
                    .map(|p| Box::new(p) as DynOperator<S>)
                    .map_err(|e| e.to_string()),
                None => Err("`project` needs a [set]".into()),
            },
            other => space.read_stage(other),
        };
        match next {
            Ok(outer) => {
                op = Some(match op.take() {
                    None => outer,
                    Some(inner) => match compose(outer, inner) {
                        Ok(c) => Box::new(c),
                        Err(e) => {
                            errors.push(cfg.error("operator", e.to_string()));
                            break;
                        }
                    },
                });
            }
            Err(m) => {
                errors.push(cfg.error("operator", m));
                op = None;
                break;
            }
        }
    }

    let reference = match &cfg.reference {
        Some(r) => match space.read_point(r) {
            Ok(p) => Some(p),
            Err(m) => {
                errors.push(cfg.error("reference", m));
                None
            }
        },
        None => op.as_ref().and_then(|o| o.fixed_point()),
    };

    if let (Some(b), Some(op), Some(x0)) = (cfg.bounds.afp_radius_b, &op, &start) {
        match &reference {
            None => errors
                .push(cfg.error("bounds.afp_radius_b", "needs `reference` or an operator with a known fixed point")),
            Some(y) => {
                let moved = op.apply(y).and_then(|ty| space.distance(y, &ty));
                let dist = space.distance(x0, y);
                match (moved, dist) {
                    (Ok(m), _) if m > tol => errors.push(cfg.error(
                        "bounds.afp_radius_b",
                        format!("the reference is not a fixed point (it moves by {m:e}), so b certifies nothing"),
                    )),
                    (_, Ok(d)) if d > b => errors.push(cfg.error(
                        "bounds.afp_radius_b",
                        format!("b = {b} is below the distance {d} from start to the reference"),
                    )),
                    (Err(e), _) | (_, Err(e)) => errors.push(cfg.error("bounds.afp_radius_b", e.to_string())),
                    _ => {}
                }
            }
        }
    }

    if !errors.is_empty() {
        return Err(ConfigError::new(errors));
    }
    let (Some(op), Some(start)) = (op, start) else { unreachable!("errors were recorded") };
    Ok(Built { space, op, start, reference, set, d_c, tol })
}

fn modulus(spec: ModulusSpec) -> Box<dyn Modulus> {
    match spec {
        ModulusSpec::Cat0 => Box::new(eta_cat0()),
        ModulusSpec::Cat0Monotonized => Box::new(Monotonized(eta_cat0())),
        ModulusSpec::Constant(v) => Box::new(ConstantModulus::new(v).expect("validated")),
    }
}

fn theta(cfg: &ExperimentConfig) -> ThetaFn {
    match (cfg.bounds.theta, &cfg.schedule) {
        (ThetaSpec::Linear(s), _) => ThetaFn::Linear(s),
        (ThetaSpec::ClosedForm, LambdaSchedule::Constant(l)) => ThetaFn::ConstantLambda(*l),
        _ => ThetaFn::Schedule(cfg.schedule.clone()),
    }
}

/// Every bound whose parameters the config supplies.
fn bounds_for(
    cfg: &ExperimentConfig,
    d_c: Option<f64>,
    eps: f64,
    m: &dyn Modulus,
    th: &ThetaFn,
) -> (Vec<RateBound>, Vec<String>) {
    let mut out = Vec::new();
    let mut notes = Vec::new();
    let mut push = |tag: &str, r: kmrate_core::Result<RateBound>| match r.and_then(|b| confirm_linear(cfg, th, b)) {
        Ok(b) => out.push(b),
        Err(e) => notes.push(format!("{tag}: {e}")),
    };
    if let Some(b) = cfg.bounds.afp_radius_b {
        push("groetsch", groetsch_bound(eps, b, th, m));
        if m.has_eta_tilde() {
            push("groetsch-tilde", groetsch_bound_tilde(eps, b, th, m));
        }
    }
    if let Some(d) = d_c {
        push("cat0", cat0_bound(eps, d, th));
        if cfg.bounds.derived {
            push("cat0-derived", cat0_bound_derived(eps, d, th));
        }
        if let LambdaSchedule::Constant(l) = cfg.schedule {
            push("cat0-constant", cat0_constant_bound(eps, d, l));
            push("constant-lambda", constant_lambda_bound(eps, d, l, m));
            if m.has_eta_tilde() {
                push("constant-lambda-tilde", constant_lambda_bound_tilde(eps, d, l, m));
            }
        }
        if let Some(k) = cfg.bounds.ishikawa_k {
            push("ishikawa", ishikawa_bound(eps, d, k));
        }
    }
    (out, notes)
}

/// A linear `θ` is only checked against the schedule for small `n` when the
/// config is read. Here it is confirmed at the argument the bound used.
fn confirm_linear(cfg: &ExperimentConfig, th: &ThetaFn, b: RateBound) -> kmrate_core::Result<RateBound> {
    let ThetaFn::Linear(s) = th else {
        return Ok(b);
    };
    if !matches!(b.kind, BoundKind::Groetsch | BoundKind::GroetschTilde | BoundKind::Cat0 | BoundKind::Cat0Derived) {
        return Ok(b);
    }
    let Some(v) = b.to_u64() else {
        return Err(kmrate_core::Error::TooLarge(format!("cannot confirm {th} as a witness at {b}")));
    };
    let n = v / s;
    let w = witness_theta(&cfg.schedule, n)?;
    if w <= v {
        Ok(b)
    } else {
        Err(kmrate_core::Error::InvalidParameter(format!("{th} is not a witness at n = {n} (needs {w})")))
    }
}

/// `res(n) ≤ ε` for every traced `n ≥ h`, when the trace reaches `h`.
fn validity(residuals: &[f64], eps: f64, n_star: Option<usize>, bound: &RateBound) -> Validity {
    match bound.to_u64() {
        Some(h) if h < residuals.len() as u64 => {
            if residuals[h as usize..].iter().all(|r| *r <= eps) {
                Validity::Valid
            } else {
                Validity::Violated
            }
        }
        _ if n_star.is_some() => Validity::Valid,
        _ => Validity::Unresolved,
    }
}

fn sampler<S: HarnessSpace>(b: &Built<S>, cfg: &ExperimentConfig) -> Sampler {
    Sampler::new(
        cfg.checks.seed,
        cfg.checks.samples,
        cfg.checks.sample_radius.unwrap_or_else(|| b.space.default_radius()),
    )
}

fn property_suites<S: HarnessSpace>(
    b: &Built<S>,
    cfg: &ExperimentConfig,
    m: &dyn Modulus,
) -> kmrate_core::Result<Vec<AxiomReport>> {
    let s = sampler(b, cfg);
    let mut out = check_w_axioms(&b.space, &s, b.tol)?;
    out.push(check_cn_inequality(&b.space, &s, b.tol)?);
    out.push(check_segment_identities(&b.space, &s, b.tol)?);
    out.push(check_midpoint_uniqueness(&b.space, &s, b.tol)?);
    out.push(check_uc_inequality(&b.space, m, &s, b.tol)?.report);
    out.push(check_uc_lambda_inequality(&b.space, m, &s, b.tol)?.report);
    out.push(check_nonexpansive(&*b.op, &s, b.tol)?);
    Ok(out)
}

fn orbit_in_set<S: HarnessSpace>(
    b: &Built<S>,
    set: &ConvexSet<S::Point>,
    trace: &IterationTrace<S::Point>,
) -> kmrate_core::Result<AxiomReport> {
    let mut report = AxiomReport::new(Check::OrbitInSet, b.tol);
    for (n, p) in trace.points.iter().enumerate() {
        let q = b.space.project(set, p)?;
        let gap = b.space.distance(p, &q)?;
        report.record(gap, || format!("n={n} x={p:?}"));
    }
    Ok(report)
}

fn trace_checks<S: HarnessSpace>(
    b: &Built<S>,
    trace: &IterationTrace<S::Point>,
    m: &dyn Modulus,
    notes: &mut Vec<String>,
) -> kmrate_core::Result<Vec<AxiomReport>> {
    let mut out = vec![check_residual_monotone(trace, b.tol)];
    if let Some(set) = &b.set {
        if !matches!(set.shape(), SetShape::Whole) {
            out.push(orbit_in_set(b, set, trace)?);
        }
    }
    let Some(y) = &b.reference else {
        notes.push("no reference point: distance and descent checks skipped".into());
        return Ok(out);
    };
    let dist0 = b.space.distance(&b.start, y)?;
    let moved = b.space.distance(y, &b.op.apply(y)?)?;
    out.push(check_residual_bound(trace, dist0, moved, b.tol));
    out.extend(check_km_growth(&*b.op, trace, y, b.tol)?);
    let mut descent = Vec::new();
    match check_descent_along(&*b.op, trace, y, m, b.tol) {
        Ok(r) => descent.extend(r),
        Err(e) => notes.push(format!("descent checks skipped: {e}")),
    }
    match check_summed_descent_along(&*b.op, trace, y, m, b.tol) {
        Ok(r) => descent.extend(r),
        Err(e) => notes.push(format!("summed descent checks skipped: {e}")),
    }
    if !m.has_eta_tilde() {
        descent.retain(|r| !matches!(r.check, Check::EtaTildeStep | Check::SummedDescentTilde));
        notes.push(format!("modulus {} has no eta-tilde form: eta-tilde checks skipped", m.name()));
    }
    out.extend(descent);
    Ok(out)
}

/// Runs the iteration, writes `<out_dir>/<name>.csv` when a directory is
/// given, evaluates the bounds and runs every check suite.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<ExperimentReport, HarnessError> {
    with_space!(cfg, s => run_in(build(s, cfg)?, cfg, out_dir))
}

fn run_in<S: HarnessSpace>(
    b: Built<S>,
    cfg: &ExperimentConfig,
    out_dir: Option<&Path>,
) -> Result<ExperimentReport, HarnessError> {
    let trace = run_km_with_reference(&*b.op, &b.start, &cfg.schedule, cfg.stop, b.reference.clone())
        .map_err(HarnessError::Iteration)?;

    let trace_path = match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_path_buf(), source })?;
            let path = dir.join(format!("{}.csv", cfg.name));
            let file = fs::File::create(&path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
            output::write_trace(file, &trace.residuals, &trace.distances)
                .map_err(|e| HarnessError::Io { path: path.clone(), source: e.into() })?;
            Some(path)
        }
        None => None,
    };

    let m = modulus(cfg.bounds.modulus);
    let th = theta(cfg);
    let mut rows = Vec::new();
    for &eps in &cfg.epsilons {
        let n_star = trace.first_crossing(eps);
        let (bounds, notes) = bounds_for(cfg, b.d_c, eps, &*m, &th);
        let bounds = bounds
            .into_iter()
            .map(|bound| {
                let validity = validity(&trace.residuals, eps, n_star, &bound);
                BoundRow { bound, validity }
            })
            .collect();
        rows.push(EpsilonRow { eps, n_star, bounds, notes });
    }

    let mut notes = Vec::new();
    let mut checks = property_suites(&b, cfg, &*m)?;
    checks.extend(trace_checks(&b, &trace, &*m, &mut notes)?);

    Ok(ExperimentReport {
        name: cfg.name.clone(),
        space: b.space.descriptor().to_string(),
        operator: trace.operator.clone(),
        schedule: cfg.schedule.to_string(),
        steps: trace.steps(),
        final_residual: *trace.residuals.last().expect("at least x_0"),
        d_c: b.d_c,
        afp_radius_b: cfg.bounds.afp_radius_b,
        rows,
        checks,
        notes,
        trace_path,
    })
}

/// The sampled property suites only: axioms, uniform convexity and
/// nonexpansiveness.
pub fn run_checks(cfg: &ExperimentConfig) -> Result<CheckReport, HarnessError> {
    with_space!(cfg, s => {
        let b = build(s, cfg)?;
        let m = modulus(cfg.bounds.modulus);
        Ok(CheckReport {
            name: cfg.name.clone(),
            space: b.space.descriptor().to_string(),
            operator: b.op.describe(),
            checks: property_suites(&b, cfg, &*m)?,
        })
    })
}
