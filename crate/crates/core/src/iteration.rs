//! Krasnoselski–Mann iteration `x_{n+1} = (1−λ_n)x_n ⊕ λ_n T x_n`, witness
//! functions for the step sizes, and checks of the descent inequalities along
//! computed orbits.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::convexity::Modulus;
use crate::error::{Error, Result};
use crate::exact;
use crate::geodesic::{GeodesicSpace, SpaceDescriptor};
use crate::operators::Operator;
use crate::report::{AxiomReport, Check};

/// Scan limit for [`witness_theta`].
pub const WITNESS_CUTOFF: u64 = 100_000_000;

/// Traces keep every point up to this many steps, then residuals only.
pub const POINT_CAP: usize = 100_000;

/// Step sizes `λ_k`.
#[derive(Clone)]
pub enum LambdaSchedule {
    Constant(f64),
    /// Repeated cyclically.
    List(Vec<f64>),
    Formula {
        name: String,
        f: fn(u64) -> f64,
    },
}

impl fmt::Debug for LambdaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LambdaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaSchedule::Constant(l) => write!(f, "constant:{l}"),
            LambdaSchedule::List(v) => {
                f.write_str("list:")?;
                for (i, l) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{l}")?;
                }
                Ok(())
            }
            LambdaSchedule::Formula { name, .. } => f.write_str(name),
        }
    }
}

impl PartialEq for LambdaSchedule {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (LambdaSchedule::Constant(a), LambdaSchedule::Constant(b)) => a == b,
            (LambdaSchedule::List(a), LambdaSchedule::List(b)) => a == b,
            (LambdaSchedule::Formula { name: a, f: fa }, LambdaSchedule::Formula { name: b, f: fb }) => {
                a == b && core::ptr::fn_addr_eq(*fa, *fb)
            }
            _ => false,
        }
    }
}

fn alternating_weight(k: u64) -> f64 {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    0.5 + sign / (k as f64 + 3.0)
}

impl LambdaSchedule {
    pub fn constant(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::WeightOutOfRange(lambda));
        }
        Ok(LambdaSchedule::Constant(lambda))
    }

    pub fn list(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("lambda list is empty".into()));
        }
        if let Some(l) = values.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::WeightOutOfRange(*l));
        }
        Ok(LambdaSchedule::List(values.to_vec()))
    }

    pub fn formula(name: &str, f: fn(u64) -> f64) -> Self {
        LambdaSchedule::Formula { name: name.into(), f }
    }

    /// `λ_k = ½ + (−1)^k/(k+3)`.
    pub fn alternating() -> Self {
        LambdaSchedule::formula("alternating", alternating_weight)
    }

    pub fn lambda(&self, k: u64) -> f64 {
        match self {
            LambdaSchedule::Constant(l) => *l,
            LambdaSchedule::List(v) => v[(k % v.len() as u64) as usize],
            LambdaSchedule::Formula { f, .. } => f(k),
        }
    }

    /// `⌈n/(λ(1−λ))⌉` for constant schedules, evaluated exactly.
    pub fn closed_form_theta(&self, n: u64) -> Option<u64> {
        let LambdaSchedule::Constant(l) = self else {
            return None;
        };
        let v = constant_theta(*l, n).ok()?;
        u64::try_from(v).ok()
    }
}

/// `⌈n/(λ(1−λ))⌉` in exact arithmetic on the decimal value of `λ`.
pub(crate) fn constant_theta(lambda: f64, n: u64) -> Result<num_bigint::BigUint> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::WeightOutOfRange(lambda));
    }
    let l = exact::rational(lambda)?;
    let one = num_rational::BigRational::from_integer(1.into());
    let w = &l * (&one - &l);
    let q = num_rational::BigRational::from_integer(n.into()) / w;
    Ok(exact::ceil_nonneg(&q))
}

/// Compensated running sum of `λ_k(1−λ_k)`.
#[derive(Debug, Clone, Copy, Default)]
struct WeightSum {
    sum: f64,
    comp: f64,
}

impl WeightSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// The least `N` with `Σ_{k=0}^{N} λ_k(1−λ_k) ≥ n`, found by direct summation.
/// `n = 0` gives 0.
pub fn witness_theta(schedule: &LambdaSchedule, n: u64) -> Result<u64> {
    if n == 0 {
        return Ok(0);
    }
    let target = n as f64;
    let mut acc = WeightSum::default();
    for k in 0..WITNESS_CUTOFF {
        let l = schedule.lambda(k);
        acc.add(l * (1.0 - l));
        if acc.value() >= target {
            return Ok(k);
        }
    }
    Err(Error::WitnessCutoff { n, cutoff: WITNESS_CUTOFF })
}

/// `Σ_{k=0}^{upto} λ_k(1−λ_k)`.
pub fn weight_sum(schedule: &LambdaSchedule, upto: u64) -> f64 {
    let mut acc = WeightSum::default();
    for k in 0..=upto {
        let l = schedule.lambda(k);
        acc.add(l * (1.0 - l));
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub max_steps: usize,
    pub target_residual: f64,
}

impl StopRule {
    pub fn steps(max_steps: usize) -> Self {
        StopRule { max_steps, target_residual: 0.0 }
    }
}

/// A computed orbit `x_0 … x_N` with residuals `ρ(x_n, Tx_n)`.
#[derive(Debug, Clone)]
pub struct IterationTrace<P> {
    pub space: SpaceDescriptor,
    pub operator: String,
    pub schedule: LambdaSchedule,
    /// `x_0 …`, truncated after [`POINT_CAP`] entries.
    pub points: Vec<P>,
    pub residuals: Vec<f64>,
    /// `λ_0 … λ_{N−1}`, the weights actually used.
    pub lambdas: Vec<f64>,
    pub reference: Option<P>,
    /// `ρ(x_n, reference)`, empty without a reference.
    pub distances: Vec<f64>,
}

impl<P> IterationTrace<P> {
    /// Number of steps `N` taken.
    pub fn steps(&self) -> usize {
        self.residuals.len() - 1
    }

    pub fn residual(&self, n: usize) -> Option<f64> {
        self.residuals.get(n).copied()
    }

    pub fn point(&self, n: usize) -> Option<&P> {
        self.points.get(n)
    }

    /// First index with `res(n) ≤ ε`.
    pub fn first_crossing(&self, eps: f64) -> Option<usize> {
        self.residuals.iter().position(|r| *r <= eps)
    }

    /// Steps whose points are all stored: `n` with `x_n` and `x_{n+1}` known.
    fn stored_steps(&self) -> usize {
        self.steps().min(self.points.len().saturating_sub(1))
    }
}

/// `(1−λ)x ⊕ λTx`.
pub fn km_step<S: GeodesicSpace, T: Operator<S> + ?Sized>(op: &T, x: &S::Point, lambda: f64) -> Result<S::Point> {
    let tx = op.apply(x)?;
    op.space().combine(x, &tx, lambda)
}

/// Runs the iteration from `x0`, measuring distances to the operator's
/// declared fixed point when it has one.
pub fn run_km<S: GeodesicSpace, T: Operator<S> + ?Sized>(
    op: &T,
    x0: &S::Point,
    schedule: &LambdaSchedule,
    stop: StopRule,
) -> Result<IterationTrace<S::Point>> {
    run_km_with_reference(op, x0, schedule, stop, op.fixed_point())
}

pub fn run_km_with_reference<S: GeodesicSpace, T: Operator<S> + ?Sized>(
    op: &T,
    x0: &S::Point,
    schedule: &LambdaSchedule,
    stop: StopRule,
    reference: Option<S::Point>,
) -> Result<IterationTrace<S::Point>> {
    let space = op.space();
    space.validate(x0)?;
    if let Some(y) = &reference {
        space.validate(y)?;
    }
    let blowup = |step: usize| move |_: Error| Error::NonFinite { step };

    let mut x = x0.clone();
    let mut tx = op.apply(&x)?;
    let mut trace = IterationTrace {
        space: space.descriptor(),
        operator: op.describe(),
        schedule: schedule.clone(),
        points: alloc::vec![x.clone()],
        residuals: alloc::vec![finite_or(space.distance(&x, &tx)?, 0)?],
        lambdas: Vec::new(),
        reference: reference.clone(),
        distances: Vec::new(),
    };
    if let Some(y) = &reference {
        trace.distances.push(space.distance(&x, y)?);
    }
    let mut n = 0;
    while n < stop.max_steps && trace.residuals[n] > stop.target_residual {
        let lambda = schedule.lambda(n as u64);
        x = space.combine(&x, &tx, lambda)?;
        space.validate(&x).map_err(blowup(n + 1))?;
        tx = op.apply(&x).map_err(blowup(n + 1))?;
        let res = space.distance(&x, &tx).map_err(blowup(n + 1))?;
        trace.residuals.push(finite_or(res, n + 1)?);
        trace.lambdas.push(lambda);
        if let Some(y) = &reference {
            trace.distances.push(finite_or(space.distance(&x, y)?, n + 1)?);
        }
        if trace.points.len() < POINT_CAP {
            trace.points.push(x.clone());
        }
        n += 1;
    }
    Ok(trace)
}

fn finite_or(v: f64, step: usize) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { step })
    }
}

/// `α(x, n, y) = ρ(x_n, y) + ρ(y, Ty)`.
pub fn alpha<S: GeodesicSpace, T: Operator<S> + ?Sized>(
    op: &T,
    trace: &IterationTrace<S::Point>,
    y: &S::Point,
    n: usize,
) -> Result<f64> {
    let space = op.space();
    let xn = stored(trace, n)?;
    Ok(space.distance(xn, y)? + space.distance(y, &op.apply(y)?)?)
}

fn stored<P>(trace: &IterationTrace<P>, n: usize) -> Result<&P> {
    trace.point(n).ok_or_else(|| Error::InvalidParameter(format!("step {n} is not stored in the trace")))
}

/// Growth of the distance to `y`:
/// `ρ(x_{n+1},y) ≤ ρ(x_n,y) + λ_n ρ(y,Ty)` (first report) and
/// `ρ(x_n,y) ≤ ρ(x_0,y) + (Σ_{i<n} λ_i) ρ(y,Ty)` (second report).
pub fn check_km_growth<S: GeodesicSpace, T: Operator<S> + ?Sized>(
    op: &T,
    trace: &IterationTrace<S::Point>,
    y: &S::Point,
    tol: f64,
) -> Result<[AxiomReport; 2]> {
    let space = op.space();
    let c = space.distance(y, &op.apply(y)?)?;
    let mut step = AxiomReport::new(Check::KmStepGrowth, tol);
    let mut total = AxiomReport::new(Check::KmCumulativeGrowth, tol);
    let d0 = space.distance(&trace.points[0], y)?;
    let mut prev = d0;
    let mut lambda_sum = 0.0;
    for n in 0..trace.stored_steps() {
        let next = space.distance(&trace.points[n + 1], y)?;
        let l = trace.lambdas[n];
        step.record(next - prev - l * c, || format!("n={n}"));
        lambda_sum += l;
        total.record(next - d0 - lambda_sum * c, || format!("n={}", n + 1));
        prev = next;
    }
    Ok([step, total])
}

/// `res(n+1) ≤ res(n)` up to `tol`.
pub fn check_residual_monotone<P>(trace: &IterationTrace<P>, tol: f64) -> AxiomReport {
    let mut report = AxiomReport::new(Check::ResidualMonotone, tol);
    for (n, w) in trace.residuals.windows(2).enumerate() {
        report.record(w[1] - w[0], || format!("n={n} res={} next={}", w[0], w[1]));
    }
    report
}

/// `res(n) ≤ 2b + c`, where `b ≥ ρ(x_0, y)` and `c ≥ ρ(y, Ty)`.
pub fn check_residual_bound<P>(trace: &IterationTrace<P>, b: f64, c: f64, tol: f64) -> AxiomReport {
    let mut report = AxiomReport::new(Check::ResidualBound, tol);
    let cap = 2.0 * b + c;
    for (n, r) in trace.residuals.iter().enumerate() {
        report.record(r - cap, || format!("n={n} res={r} 2b+c={cap}"));
    }
    report
}

/// Outcome of a conditional inequality at one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepCheck {
    /// Hypotheses held; `excess` is left side minus right side.
    Checked { excess: f64 },
    /// A hypothesis failed, so the conclusion was not tested.
    Skipped,
}

impl StepCheck {
    pub fn record(self, report: &mut AxiomReport, witness: impl FnOnce() -> String) {
        match self {
            StepCheck::Checked { excess } => report.record(excess, witness),
            StepCheck::Skipped => report.skip(),
        }
    }
}

/// Constants of the single-step descent inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentParams<P> {
    pub y: P,
    /// Lower bound on the residual.
    pub a: f64,
    /// Lower bound on `α`.
    pub gamma: f64,
    /// Upper bound on `α` used in `a/β`.
    pub beta: f64,
    /// Upper bound on `α` used as the modulus radius.
    pub beta_tilde: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn require_monotone<M: Modulus + ?Sized>(m: &M) -> Result<()> {
    if m.monotone_in_r() {
        Ok(())
    } else {
        Err(Error::NonMonotoneModulus)
    }
}

/// Single-step descent: if `γ ≤ α(x,n,y) ≤ β, β̃` and `a ≤ res(n)` then
/// `ρ(x_{n+1},y) ≤ ρ(x_n,y) + ρ(y,Ty) − 2γλ_n(1−λ_n)η(β̃, a/β)`.
pub fn check_main_lemma<S: GeodesicSpace, T: Operator<S> + ?Sized, M: Modulus + ?Sized>(
    op: &T,
    trace: &IterationTrace<S::Point>,
    params: &DescentParams<S::Point>,
    modulus: &M,
    n: usize,
) -> Result<StepCheck> {
    require_monotone(modulus)?;
    for (name, v) in
        [("a", params.a), ("gamma", params.gamma), ("beta", params.beta), ("beta_tilde", params.beta_tilde)]
    {
        positive(name, v)?;
    }
    let space = op.space();
    let y = &params.y;
    let (xn, xn1) = (stored(trace, n)?, stored(trace, n + 1)?);
    let dn = space.distance(xn, y)?;
    let c = space.distance(y, &op.apply(y)?)?;
    let al = dn + c;
    if !(params.gamma <= al && al <= params.beta && al <= params.beta_tilde && params.a <= trace.residuals[n]) {
        return Ok(StepCheck::Skipped);
    }
    let l = trace.lambdas[n];
    let eta = modulus.eval(params.beta_tilde, (params.a / params.beta).min(2.0))?;
    let rhs = dn + c - 2.0 * params.gamma * l * (1.0 - l) * eta;
    Ok(StepCheck::Checked { excess: space.distance(xn1, y)? - rhs })
}

/// Single-step descent with `η̃`: if `α(x,n,y) ≤ δ` and `a ≤ res(n)` then
/// `ρ(x_{n+1},y) ≤ ρ(x_n,y) + ρ(y,Ty) − 2aλ_n(1−λ_n)η̃(δ, a/δ)`.
pub fn check_eta_tilde_step<S: GeodesicSpace, T: Operator<S> + ?Sized, M: Modulus + ?Sized>(
    op: &T,
    trace: &IterationTrace<S::Point>,
    y: &S::Point,
    a: f64,
    delta: f64,
    modulus: &M,
    n: usize,
) -> Result<StepCheck> {
    require_monotone(modulus)?;
    positive("a", a)?;
    positive("delta", delta)?;
    let space = op.space();
    let (xn, xn1) = (stored(trace, n)?, stored(trace, n + 1)?);
    let dn = space.distance(xn, y)?;
    let c = space.distance(y, &op.apply(y)?)?;
    if !(dn + c <= delta && a <= trace.residuals[n]) {
        return Ok(StepCheck::Skipped);
    }
    let l = trace.lambdas[n];
    let eta = modulus.eta_tilde(delta, (a / delta).min(2.0))?;
    let rhs = dn + c - 2.0 * a * l * (1.0 - l) * eta;
    Ok(StepCheck::Checked { excess: space.distance(xn1, y)? - rhs })
}

/// Both single-step descent inequalities at every stored step, with the
/// sharpest admissible constants `a = res(n)`, `γ = β = β̃ = δ = α(x,n,y)`.
/// Steps with zero residual are skipped.
pub fn check_descent_along<S: GeodesicSpace, T: Operator<S> + ?Sized, M: Modulus + ?Sized>(
    op: &T,
    trace: &IterationTrace<S::Point>,
    y: &S::Point,
    modulus: &M,
    tol: f64,
) -> Result<[AxiomReport; 2]> {
    let mut main = AxiomReport::new(Check::MainLemma, tol);
    let mut tilde = AxiomReport::new(Check::EtaTildeStep, tol);
    for n in 0..trace.stored_steps() {
        let a = trace.residuals[n];
        let al = alpha(op, trace, y, n)?;
        if !(a > 0.0 && al > 0.0) {
            main.skip();
            tilde.skip();
            continue;
        }
        let params = DescentParams { y: y.clone(), a, gamma: al, beta: al, beta_tilde: al };
        check_main_lemma(op, trace, &params, modulus, n)?.record(&mut main, || format!("n={n}"));
        if modulus.has_eta_tilde() {
            check_eta_tilde_step(op, trace, y, a, al, modulus, n)?.record(&mut tilde, || format!("n={n}"));
        }
    }
    Ok([main, tilde])
}

/// Constants of the summed descent inequalities.
#[derive(Debug, Clone, PartialEq)]
pub struct SummedParams<P> {
    pub y: P,
    /// Residual lower bound on steps `0..=N`.
    pub a: f64,
    /// `b ≥ ρ(x_0, y)`.
    pub b: f64,
    /// `c ≥ ρ(y, Ty)`.
    pub c: f64,
    /// `d ≥ (N+1)c`.
    pub d: f64,
    /// Lower bound on `α` over steps `0..=N`.
    pub gamma: f64,
}

/// Summed descent after `N+1` steps, in the `η` form (first) and the `η̃`
/// form (second):
/// `ρ(x_{N+1},y) ≤ b + (N+1)c − 2γ η(b+d, a/(b+d)) Σ_{k≤N} λ_k(1−λ_k)` and the
/// same with `2a η̃(b+d, a/(b+d))` in place of `2γ η(…)`.
pub fn check_summed_descent<S: GeodesicSpace, T: Operator<S> + ?Sized, M: Modulus + ?Sized>(
    op: &T,
    trace: &IterationTrace<S::Point>,
    params: &SummedParams<S::Point>,
    modulus: &M,
    big_n: usize,
) -> Result<(StepCheck, StepCheck)> {
    require_monotone(modulus)?;
    for (name, v) in [("a", params.a), ("b", params.b), ("c", params.c), ("d", params.d), ("gamma", params.gamma)] {
        positive(name, v)?;
    }
    let space = op.space();
    let y = &params.y;
    let last = stored(trace, big_n + 1)?;
    let c_true = space.distance(y, &op.apply(y)?)?;
    let steps = (big_n + 1) as f64;
    let mut ok = space.distance(&trace.points[0], y)? <= params.b && c_true <= params.c && params.d >= steps * params.c;
    let mut weights = WeightSum::default();
    for n in 0..=big_n {
        ok = ok && params.a <= trace.residuals[n] && params.gamma <= alpha(op, trace, y, n)?;
        let l = trace.lambdas[n];
        weights.add(l * (1.0 - l));
    }
    if !ok {
        return Ok((StepCheck::Skipped, StepCheck::Skipped));
    }
    summed_excess(space.distance(last, y)?, params, modulus, steps, weights.value())
}

fn summed_excess<P, M: Modulus + ?Sized>(
    lhs: f64,
    params: &SummedParams<P>,
    modulus: &M,
    steps: f64,
    weights: f64,
) -> Result<(StepCheck, StepCheck)> {
    let r = params.b + params.d;
    let eps = (params.a / r).min(2.0);
    let base = params.b + steps * params.c;
    let plain = base - 2.0 * params.gamma * modulus.eval(r, eps)? * weights;
    let tilde = match modulus.eta_tilde_value(r, eps) {
        Some(t) => StepCheck::Checked { excess: lhs - (base - 2.0 * params.a * t * weights) },
        None => StepCheck::Skipped,
    };
    Ok((StepCheck::Checked { excess: lhs - plain }, tilde))
}

/// Summed descent for every `N` along the trace with `b = ρ(x_0,y)`,
/// `c = ρ(y,Ty)` (or the smallest positive double when `y` is fixed),
/// `d = (N+1)c`, `a = min res`, `γ = min α` over steps `0..=N`.
pub fn check_summed_descent_along<S: GeodesicSpace, T: Operator<S> + ?Sized, M: Modulus + ?Sized>(
    op: &T,
    trace: &IterationTrace<S::Point>,
    y: &S::Point,
    modulus: &M,
    tol: f64,
) -> Result<[AxiomReport; 2]> {
    require_monotone(modulus)?;
    let space = op.space();
    let mut plain = AxiomReport::new(Check::SummedDescent, tol);
    let mut tilde = AxiomReport::new(Check::SummedDescentTilde, tol);
    let b = space.distance(&trace.points[0], y)?;
    let c = space.distance(y, &op.apply(y)?)?.max(f64::MIN_POSITIVE);
    let mut a = f64::INFINITY;
    let mut gamma = f64::INFINITY;
    let mut weights = WeightSum::default();
    for n in 0..trace.stored_steps() {
        a = a.min(trace.residuals[n]);
        gamma = gamma.min(alpha(op, trace, y, n)?);
        let l = trace.lambdas[n];
        weights.add(l * (1.0 - l));
        if !(a > 0.0 && b > 0.0 && gamma > 0.0) {
            plain.skip();
            tilde.skip();
            continue;
        }
        let steps = (n + 1) as f64;
        let params = SummedParams { y: (), a, b, c, d: steps * c, gamma };
        let lhs = space.distance(&trace.points[n + 1], y)?;
        let (p, t) = summed_excess(lhs, &params, modulus, steps, weights.value())?;
        p.record(&mut plain, || format!("N={n}"));
        t.record(&mut tilde, || format!("N={n}"));
    }
    Ok([plain, tilde])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::eta_cat0;
    use crate::operators::{make_expansive_control, make_rotation};
    use crate::spaces::Euclidean;
    use core::f64::consts::{FRAC_PI_2, SQRT_2};

    #[test]
    fn witness_for_half() {
        let s = LambdaSchedule::constant(0.5).unwrap();
        assert_eq!(witness_theta(&s, 0).unwrap(), 0);
        assert_eq!(witness_theta(&s, 1).unwrap(), 3);
        assert_eq!(witness_theta(&s, 64).unwrap(), 255);
        assert_eq!(s.closed_form_theta(1), Some(4));
        assert_eq!(LambdaSchedule::constant(0.25).unwrap().closed_form_theta(64), Some(342));
    }

    #[test]
    fn witness_cutoff_on_summable_schedule() {
        fn shrinking(k: u64) -> f64 {
            1.0 / ((k as f64 + 2.0) * (k as f64 + 2.0))
        }
        let s = LambdaSchedule::formula("inverse-square", shrinking);
        assert!(matches!(witness_theta(&s, 1), Err(Error::WitnessCutoff { .. })));
    }

    #[test]
    fn bad_schedules() {
        assert!(LambdaSchedule::constant(0.0).is_err());
        assert!(LambdaSchedule::constant(1.5).is_err());
        assert!(LambdaSchedule::list(&[]).is_err());
        assert!(LambdaSchedule::list(&[0.5, 1.2]).is_err());
        let alt = LambdaSchedule::alternating();
        assert!((alt.lambda(0) - (0.5 + 1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(alt.lambda(1), 0.25);
    }

    #[test]
    fn rotation_orbit_closed_form() {
        let e = Euclidean::new(2).unwrap();
        let r = make_rotation(&e, FRAC_PI_2).unwrap();
        let x0 = e.point(&[1.0, 0.0]).unwrap();
        let half = LambdaSchedule::constant(0.5).unwrap();
        assert_eq!(km_step(&r, &x0, 0.5).unwrap().0, [0.5, 0.5]);
        assert_eq!(km_step(&r, &x0, 0.0).unwrap(), x0);
        let trace = run_km(&r, &x0, &half, StopRule::steps(40)).unwrap();
        assert_eq!(trace.steps(), 40);
        for (n, res) in trace.residuals.iter().enumerate() {
            let exact = SQRT_2 * libm::pow(2.0, -(n as f64) / 2.0);
            assert!((res - exact).abs() <= 1e-15 * exact.max(1.0), "n={n}");
        }
        assert_eq!(trace.first_crossing(0.5), Some(3));
        assert_eq!(alpha(&r, &trace, &e.origin(), 0).unwrap(), 1.0);
    }

    #[test]
    fn fixed_start_stops_immediately() {
        let e = Euclidean::new(2).unwrap();
        let r = make_rotation(&e, 1.0).unwrap();
        let trace = run_km(&r, &e.origin(), &LambdaSchedule::alternating(), StopRule::steps(10)).unwrap();
        assert_eq!(trace.steps(), 0);
        assert_eq!(trace.residuals, [0.0]);
    }

    #[test]
    fn expansive_map_blows_up_or_violates_growth() {
        let e = Euclidean::new(2).unwrap();
        let s = make_expansive_control(&e);
        let x0 = e.point(&[1.0, 1.0]).unwrap();
        let half = LambdaSchedule::constant(0.5).unwrap();
        let trace = run_km(&s, &x0, &half, StopRule::steps(50)).unwrap();
        let y = e.point(&[0.3, 0.0]).unwrap();
        let [step, _] = check_km_growth(&s, &trace, &y, 1e-9).unwrap();
        assert!(!step.passed());
        assert!(matches!(run_km(&s, &x0, &half, StopRule::steps(5000)), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn descent_on_rotation() {
        let e = Euclidean::new(2).unwrap();
        let r = make_rotation(&e, FRAC_PI_2).unwrap();
        let x0 = e.point(&[1.0, 0.0]).unwrap();
        let trace = run_km(&r, &x0, &LambdaSchedule::alternating(), StopRule::steps(200)).unwrap();
        let y = e.origin();
        for rep in check_descent_along(&r, &trace, &y, &eta_cat0(), 1e-9).unwrap() {
            assert!(rep.passed(), "{rep}");
            assert!(rep.samples > 100);
        }
        for rep in check_summed_descent_along(&r, &trace, &y, &eta_cat0(), 1e-9).unwrap() {
            assert!(rep.passed(), "{rep}");
        }
        assert!(check_residual_monotone(&trace, 1e-9).passed());
        assert!(check_residual_bound(&trace, 1.0, 0.0, 1e-9).passed());
    }

    #[test]
    fn failed_hypothesis_is_skipped() {
        let e = Euclidean::new(2).unwrap();
        let r = make_rotation(&e, FRAC_PI_2).unwrap();
        let x0 = e.point(&[1.0, 0.0]).unwrap();
        let trace = run_km(&r, &x0, &LambdaSchedule::Constant(0.5), StopRule::steps(3)).unwrap();
        let params = DescentParams { y: e.origin(), a: 10.0, gamma: 0.1, beta: 5.0, beta_tilde: 5.0 };
        assert_eq!(check_main_lemma(&r, &trace, &params, &eta_cat0(), 0).unwrap(), StepCheck::Skipped);
    }

    #[test]
    fn summed_descent_with_zero_steps_matches_single_step() {
        let e = Euclidean::new(2).unwrap();
        let r = make_rotation(&e, FRAC_PI_2).unwrap();
        let x0 = e.point(&[1.0, 0.0]).unwrap();
        let trace = run_km(&r, &x0, &LambdaSchedule::Constant(0.5), StopRule::steps(3)).unwrap();
        let y = e.origin();
        let c = f64::MIN_POSITIVE;
        let a = trace.residuals[0];
        assert!((a - SQRT_2).abs() < 1e-15);
        let sp = SummedParams { y: y.clone(), a, b: 1.0, c, d: c, gamma: 1.0 };
        let (plain, _) = check_summed_descent(&r, &trace, &sp, &eta_cat0(), 0).unwrap();
        let dp = DescentParams { y, a, gamma: 1.0, beta: 1.0 + c, beta_tilde: 1.0 + c };
        let single = check_main_lemma(&r, &trace, &dp, &eta_cat0(), 0).unwrap();
        match (plain, single) {
            (StepCheck::Checked { excess: p }, StepCheck::Checked { excess: s }) => assert!((p - s).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }
}
