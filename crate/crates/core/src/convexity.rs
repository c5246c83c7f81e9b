//! Moduli of uniform convexity and the convexity-factor algebra built on them.
//!
//! A modulus `η(r, ε)` certifies that for `ρ(x,a) ≤ r`, `ρ(y,a) ≤ r` and
//! `ρ(x,y) ≥ εr`, the midpoint satisfies `ρ(½x⊕½y, a) ≤ (1 − η(r,ε))·r`.

use alloc::format;
use alloc::string::String;

use num_rational::BigRational;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geodesic::GeodesicSpace;
use crate::report::{AxiomReport, Check};
use crate::sampler::{Sample, Sampler};

/// A modulus of uniform convexity `η : (0,∞) × (0,2] → (0,1]`.
pub trait Modulus {
    fn name(&self) -> String;

    /// `η(r, ε)` without domain checks.
    fn value(&self, r: f64, eps: f64) -> f64;

    /// Whether `η` is nonincreasing in `r` for fixed `ε`.
    fn monotone_in_r(&self) -> bool;

    /// `η̃` with `η(r,ε) = ε·η̃(r,ε)` and `η̃` nondecreasing in `ε`, when such a
    /// factorization is known.
    fn eta_tilde_value(&self, _r: f64, _eps: f64) -> Option<f64> {
        None
    }

    /// Exact rational `η(r, ε)` for moduli given by rational formulas.
    fn rational_value(&self, _r: &BigRational, _eps: &BigRational) -> Option<BigRational> {
        None
    }

    fn rational_eta_tilde(&self, _r: &BigRational, _eps: &BigRational) -> Option<BigRational> {
        None
    }

    fn has_eta_tilde(&self) -> bool {
        self.eta_tilde_value(1.0, 1.0).is_some()
    }

    fn eval(&self, r: f64, eps: f64) -> Result<f64> {
        check_domain(r, eps)?;
        Ok(self.value(r, eps))
    }

    fn eta_tilde(&self, r: f64, eps: f64) -> Result<f64> {
        check_domain(r, eps)?;
        self.eta_tilde_value(r, eps).ok_or(Error::MissingEtaTilde)
    }
}

impl<M: Modulus + ?Sized> Modulus for &M {
    fn name(&self) -> String {
        (**self).name()
    }
    fn value(&self, r: f64, eps: f64) -> f64 {
        (**self).value(r, eps)
    }
    fn monotone_in_r(&self) -> bool {
        (**self).monotone_in_r()
    }
    fn eta_tilde_value(&self, r: f64, eps: f64) -> Option<f64> {
        (**self).eta_tilde_value(r, eps)
    }
    fn rational_value(&self, r: &BigRational, eps: &BigRational) -> Option<BigRational> {
        (**self).rational_value(r, eps)
    }
    fn rational_eta_tilde(&self, r: &BigRational, eps: &BigRational) -> Option<BigRational> {
        (**self).rational_eta_tilde(r, eps)
    }
}

impl<M: Modulus + ?Sized> Modulus for alloc::boxed::Box<M> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn value(&self, r: f64, eps: f64) -> f64 {
        (**self).value(r, eps)
    }
    fn monotone_in_r(&self) -> bool {
        (**self).monotone_in_r()
    }
    fn eta_tilde_value(&self, r: f64, eps: f64) -> Option<f64> {
        (**self).eta_tilde_value(r, eps)
    }
    fn rational_value(&self, r: &BigRational, eps: &BigRational) -> Option<BigRational> {
        (**self).rational_value(r, eps)
    }
    fn rational_eta_tilde(&self, r: &BigRational, eps: &BigRational) -> Option<BigRational> {
        (**self).rational_eta_tilde(r, eps)
    }
}

pub(crate) fn check_domain(r: f64, eps: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() && eps > 0.0 && eps <= 2.0 {
        Ok(())
    } else {
        Err(Error::ModulusDomain { r, eps })
    }
}

/// The CAT(0) modulus `η(r, ε) = ε²/8`, with `η̃(r, ε) = ε/8`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Cat0Modulus;

pub fn eta_cat0() -> Cat0Modulus {
    Cat0Modulus
}

impl Modulus for Cat0Modulus {
    fn name(&self) -> String {
        "cat0".into()
    }

    fn value(&self, _r: f64, eps: f64) -> f64 {
        eps * eps / 8.0
    }

    fn monotone_in_r(&self) -> bool {
        true
    }

    fn eta_tilde_value(&self, _r: f64, eps: f64) -> Option<f64> {
        Some(eps / 8.0)
    }

    fn rational_value(&self, _r: &BigRational, eps: &BigRational) -> Option<BigRational> {
        Some(eps * eps / BigRational::from_integer(8.into()))
    }

    fn rational_eta_tilde(&self, _r: &BigRational, eps: &BigRational) -> Option<BigRational> {
        Some(eps / BigRational::from_integer(8.into()))
    }
}

/// A modulus that ignores both arguments. Only sound for spaces where the
/// constant really is a modulus; it exists for configuration and testing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantModulus(f64);

impl ConstantModulus {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(ConstantModulus(value))
        } else {
            Err(Error::InvalidParameter(format!("constant modulus {value} outside (0, 1]")))
        }
    }
}

impl Modulus for ConstantModulus {
    fn name(&self) -> String {
        format!("custom-constant:{}", self.0)
    }

    fn value(&self, _r: f64, _eps: f64) -> f64 {
        self.0
    }

    fn monotone_in_r(&self) -> bool {
        true
    }

    fn rational_value(&self, _r: &BigRational, _eps: &BigRational) -> Option<BigRational> {
        crate::exact::rational(self.0).ok()
    }
}

/// A modulus given by a plain function, with declared capabilities.
#[derive(Clone, Copy)]
pub struct FnModulus<F> {
    pub name: &'static str,
    pub f: F,
    pub monotone_in_r: bool,
}

impl<F: Fn(f64, f64) -> f64> Modulus for FnModulus<F> {
    fn name(&self) -> String {
        self.name.into()
    }

    fn value(&self, r: f64, eps: f64) -> f64 {
        (self.f)(r, eps)
    }

    fn monotone_in_r(&self) -> bool {
        self.monotone_in_r
    }
}

/// Grid resolution and depth of the monotone envelope's infimum search.
const ENVELOPE_GRID: usize = 256;
const ENVELOPE_DEPTH_LOG2: f64 = 20.0;
const GOLDEN_ITERATIONS: usize = 48;

/// `η⁺(r, ε) = inf { η(s, ε) : s ≤ r }`, approximated on a geometric grid of
/// 256 points in `(r·2⁻²⁰, r]` followed by one golden-section refinement
/// around the best grid point. The result never exceeds `η(r, ε)`.
///
/// The approximation can only over-estimate the true infimum, and only by the
/// variation of `η` below `r·2⁻²⁰` or between grid points.
pub fn eta_monotone<M: Modulus + ?Sized>(m: &M, r: f64, eps: f64) -> Result<f64> {
    check_domain(r, eps)?;
    let at = |i: f64| r * libm::exp2(-ENVELOPE_DEPTH_LOG2 * (1.0 - i / (ENVELOPE_GRID - 1) as f64));
    let mut best_i = ENVELOPE_GRID - 1;
    let mut best = m.value(r, eps);
    for i in 0..ENVELOPE_GRID - 1 {
        let v = m.value(at(i as f64), eps);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    // Golden-section search in grid-index space on the bracket around best_i.
    let mut lo = best_i.saturating_sub(1) as f64;
    let mut hi = ((best_i + 1).min(ENVELOPE_GRID - 1)) as f64;
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let mut fa = m.value(at(a), eps);
    let mut fb = m.value(at(b), eps);
    for _ in 0..GOLDEN_ITERATIONS {
        best = best.min(fa).min(fb);
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = m.value(at(a), eps);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = m.value(at(b), eps);
        }
    }
    Ok(best.min(fa).min(fb).min(m.value(r, eps)))
}

/// The monotone envelope `η⁺` of another modulus, itself a modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monotonized<M>(pub M);

impl<M: Modulus> Modulus for Monotonized<M> {
    fn name(&self) -> String {
        format!("{}-monotonized", self.0.name())
    }

    fn value(&self, r: f64, eps: f64) -> f64 {
        eta_monotone(&self.0, r, eps).unwrap_or(f64::NAN)
    }

    fn monotone_in_r(&self) -> bool {
        true
    }
}

/// `γ(r, ε, λ) = 2λ·η(r,ε)` for `λ ≤ ½`, `2(1−λ)·η(r,ε)` otherwise.
pub fn gamma_factor<M: Modulus + ?Sized>(r: f64, eps: f64, lambda: f64, m: &M) -> Result<f64> {
    crate::geodesic::check_weight(lambda)?;
    let eta = m.eval(r, eps)?;
    Ok(if lambda <= 0.5 { 2.0 * lambda * eta } else { 2.0 * (1.0 - lambda) * eta })
}

/// `2λ(1−λ)·η`, the contraction coefficient in
/// `ρ((1−λ)x⊕λy, a) ≤ (1 − 2λ(1−λ)η(r,ε))·r`.
pub fn groetsch_coefficient(lambda: f64, modulus_value: f64) -> f64 {
    2.0 * lambda * (1.0 - lambda) * modulus_value
}

/// Sampled uniform-convexity report with the parameter ranges it covered.
#[derive(Debug, Clone, PartialEq)]
pub struct UcReport {
    pub report: AxiomReport,
    pub r_range: (f64, f64),
    pub eps_range: (f64, f64),
}

impl UcReport {
    fn new(check: Check, tol: f64) -> Self {
        UcReport {
            report: AxiomReport::new(check, tol),
            r_range: (f64::INFINITY, 0.0),
            eps_range: (f64::INFINITY, 0.0),
        }
    }

    fn cover(&mut self, r: f64, eps: f64) {
        self.r_range = (self.r_range.0.min(r), self.r_range.1.max(r));
        self.eps_range = (self.eps_range.0.min(eps), self.eps_range.1.max(eps));
    }

    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Distances below this fraction of `r` leave `ε` undefined.
const DEGENERATE_RATIO: f64 = 1e-12;

/// `(r, ε)` of a sampled triple, or `None` for degenerate samples.
fn uc_parameters<S: GeodesicSpace>(space: &S, a: &S::Point, x: &S::Point, y: &S::Point) -> Result<Option<(f64, f64)>> {
    let r = space.distance(x, a)?.max(space.distance(y, a)?);
    let dxy = space.distance(x, y)?;
    if r <= 0.0 || dxy < DEGENERATE_RATIO * r {
        return Ok(None);
    }
    Ok(Some((r, (dxy / r).min(2.0))))
}

pub fn check_uc_inequality<S: Sample, M: Modulus + ?Sized>(
    space: &S,
    m: &M,
    sampler: &Sampler,
    tol: f64,
) -> Result<UcReport> {
    let mut rng = sampler.rng();
    let mut out = UcReport::new(Check::UniformConvexity, tol);
    for _ in 0..sampler.count {
        let a = space.sample_point(&mut rng, sampler.radius);
        let x = space.sample_point(&mut rng, sampler.radius);
        let y = space.sample_point(&mut rng, sampler.radius);
        let Some((r, eps)) = uc_parameters(space, &a, &x, &y)? else {
            out.report.skip();
            continue;
        };
        out.cover(r, eps);
        let mid = space.midpoint(&x, &y)?;
        let excess = space.distance(&mid, &a)? - (1.0 - m.eval(r, eps)?) * r;
        out.report.record(excess, || format!("a={a:?} x={x:?} y={y:?} r={r} ε={eps}"));
    }
    Ok(out)
}

pub fn check_uc_lambda_inequality<S: Sample, M: Modulus + ?Sized>(
    space: &S,
    m: &M,
    sampler: &Sampler,
    tol: f64,
) -> Result<UcReport> {
    let mut rng = sampler.rng();
    let mut out = UcReport::new(Check::UniformConvexityLambda, tol);
    for _ in 0..sampler.count {
        let a = space.sample_point(&mut rng, sampler.radius);
        let x = space.sample_point(&mut rng, sampler.radius);
        let y = space.sample_point(&mut rng, sampler.radius);
        let lambda: f64 = rng.random();
        let Some((r, eps)) = uc_parameters(space, &a, &x, &y)? else {
            out.report.skip();
            continue;
        };
        out.cover(r, eps);
        let p = space.combine(&x, &y, lambda)?;
        let excess = space.distance(&p, &a)? - (1.0 - gamma_factor(r, eps, lambda, m)?) * r;
        out.report.record(excess, || format!("a={a:?} x={x:?} y={y:?} λ={lambda} r={r} ε={eps}"));
    }
    Ok(out)
}
