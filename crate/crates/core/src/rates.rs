//! Explicit rates of asymptotic regularity as exact integer certificates.
//!
//! Every bound `h` comes with the guarantee `ρ(x_n, Tx_n) ≤ ε` for all
//! `n ≥ h`. Parameters are read as decimals (see the crate docs) and all
//! ceilings are taken in exact rational arithmetic.

use alloc::format;
use alloc::string::String;
use core::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::bigexp::ceil_scaled_exp;
use crate::convexity::Modulus;
use crate::error::{Error, Result};
use crate::exact::{ceil_nonneg, log10_big, rational, to_rational};
use crate::iteration::{constant_theta, witness_theta, LambdaSchedule};

/// Largest exponent `K(M+1)` for which the exponential bound is expanded to
/// an exact integer. Beyond it only the logarithm is reported.
pub const EXACT_EXP_LIMIT: u64 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// `K·M·⌈2d·e^{K(M+1)}⌉`.
    Ishikawa,
    Groetsch,
    GroetschTilde,
    ConstantLambda,
    ConstantLambdaTilde,
    Cat0,
    Cat0Constant,
    /// `θ(⌈4(d+1)²/ε²⌉)`, from the `η̃` bound with `η̃ = ε/8`.
    Cat0Derived,
}

impl BoundKind {
    pub fn tag(self) -> &'static str {
        match self {
            BoundKind::Ishikawa => "ishikawa",
            BoundKind::Groetsch => "groetsch",
            BoundKind::GroetschTilde => "groetsch-tilde",
            BoundKind::ConstantLambda => "constant-lambda",
            BoundKind::ConstantLambdaTilde => "constant-lambda-tilde",
            BoundKind::Cat0 => "cat0",
            BoundKind::Cat0Constant => "cat0-constant",
            BoundKind::Cat0Derived => "cat0-derived",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// An iteration count after which the residual stays below `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateBound {
    pub kind: BoundKind,
    /// `None` only when the exact value is too large to expand.
    pub value: Option<BigUint>,
    /// `log10(value)`; `-inf` for a zero bound.
    pub log10: f64,
    /// Inputs, as `key=value` pairs.
    pub inputs: String,
}

impl RateBound {
    fn exact(kind: BoundKind, value: BigUint, inputs: String) -> Self {
        let log10 = log10_big(&value);
        RateBound { kind, value: Some(value), log10, inputs }
    }

    pub fn is_zero(&self) -> bool {
        self.value.as_ref().is_some_and(Zero::is_zero)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.as_ref().and_then(ToPrimitive::to_u64)
    }

    /// Whether `n ≤ value`.
    pub fn admits(&self, n: u64) -> bool {
        match &self.value {
            Some(v) => BigUint::from(n) <= *v,
            None => libm::log10(n as f64) <= self.log10,
        }
    }
}

impl fmt::Display for RateBound {
    /// Plain digits up to 30 of them, `≈10^x` beyond.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Some(v) if self.log10 < 30.0 => write!(f, "{v}"),
            _ => write!(f, "≈10^{:.1}", self.log10),
        }
    }
}

/// A witness `θ` with `Σ_{k=0}^{θ(n)} λ_k(1−λ_k) ≥ n`.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaFn {
    /// `θ(n) = s·n`.
    Linear(u64),
    /// `θ(n) = ⌈n/(λ(1−λ))⌉`.
    ConstantLambda(f64),
    /// Least witness of a schedule, by direct summation.
    Schedule(LambdaSchedule),
}

impl ThetaFn {
    pub fn apply(&self, n: &BigUint) -> Result<BigUint> {
        match self {
            ThetaFn::Linear(s) => Ok(n * *s),
            ThetaFn::ConstantLambda(l) => {
                let w = lambda_weight(*l)?;
                Ok(ceil_nonneg(&(to_rational(n) / w)))
            }
            ThetaFn::Schedule(s) => {
                let n = n.to_u64().ok_or_else(|| Error::TooLarge(format!("witness argument {n}")))?;
                witness_theta(s, n).map(BigUint::from)
            }
        }
    }
}

impl fmt::Display for ThetaFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaFn::Linear(s) => write!(f, "{s}n"),
            ThetaFn::ConstantLambda(l) => write!(f, "n/({l}(1-{l}))"),
            ThetaFn::Schedule(s) => write!(f, "witness({s})"),
        }
    }
}

fn lambda_weight(lambda: f64) -> Result<BigRational> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::WeightOutOfRange(lambda));
    }
    let l = rational(lambda)?;
    let one = BigRational::from_integer(1.into());
    Ok(&l * (one - &l))
}

fn positive(name: &str, v: f64) -> Result<BigRational> {
    if v.is_finite() && v > 0.0 {
        rational(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `⌈(1+2d)/ε⌉`, the `M` of the exponential bound.
fn ishikawa_m(eps: &BigRational, d: &BigRational) -> BigUint {
    ceil_nonneg(&((int(1) + int(2) * d) / eps))
}

/// `log10` of the exponential bound, from the closed form.
pub fn ishikawa_log10(eps: f64, d: f64, k: u64) -> Result<f64> {
    let (e, dd) = (positive("eps", eps)?, positive("d", d)?);
    let m = ishikawa_m(&e, &dd);
    let m_f = m.to_f64().unwrap_or(f64::INFINITY);
    let exponent = k as f64 * (m_f + 1.0);
    Ok(libm::log10(k as f64) + libm::log10(m_f) + libm::log10(2.0 * d) + exponent * core::f64::consts::LOG10_E)
}

/// `h(ε, d, K) = K·M·⌈2d·e^{K(M+1)}⌉` with `M = ⌈(1+2d)/ε⌉`.
pub fn ishikawa_bound(eps: f64, d: f64, k: u64) -> Result<RateBound> {
    let (e, dd) = (positive("eps", eps)?, positive("d", d)?);
    if k < 2 {
        return Err(Error::InvalidParameter(format!("K must be at least 2, got {k}")));
    }
    let inputs = format!("eps={eps} d={d} K={k}");
    let m = ishikawa_m(&e, &dd);
    let log10 = ishikawa_log10(eps, d, k)?;
    let exponent = m.to_u64().and_then(|m| m.checked_add(1)).and_then(|m1| m1.checked_mul(k));
    match exponent {
        Some(n) if n <= EXACT_EXP_LIMIT => {
            let scale = int(2) * dd;
            let value = BigUint::from(k) * m * ceil_scaled_exp(&scale, n);
            Ok(RateBound::exact(BoundKind::Ishikawa, value, inputs))
        }
        _ => Ok(RateBound { kind: BoundKind::Ishikawa, value: None, log10, inputs }),
    }
}

/// `η(r, ε)` exactly when the modulus has a rational form, otherwise its
/// double value read as a decimal.
fn modulus_at<M: Modulus + ?Sized>(m: &M, r: &BigRational, eps: &BigRational) -> Result<BigRational> {
    if let Some(v) = m.rational_value(r, eps) {
        return Ok(v);
    }
    let v = m.eval(r.to_f64().unwrap_or(f64::NAN), eps.to_f64().unwrap_or(f64::NAN))?;
    nonzero_modulus(v)
}

fn tilde_at<M: Modulus + ?Sized>(m: &M, r: &BigRational, eps: &BigRational) -> Result<BigRational> {
    if let Some(v) = m.rational_eta_tilde(r, eps) {
        return Ok(v);
    }
    let v = m.eta_tilde(r.to_f64().unwrap_or(f64::NAN), eps.to_f64().unwrap_or(f64::NAN))?;
    nonzero_modulus(v)
}

fn nonzero_modulus(v: f64) -> Result<BigRational> {
    if v > 0.0 && v.is_finite() {
        rational(v)
    } else {
        Err(Error::InvalidParameter(format!("modulus value {v} is not positive")))
    }
}

/// `(b+1, ε/(b+1))` and whether `ε ≥ 2b`.
fn shifted(eps: f64, b: f64) -> Result<(BigRational, BigRational, BigRational, bool)> {
    let (e, bb) = (positive("eps", eps)?, positive("b", b)?);
    let big = e >= int(2) * &bb;
    let r = bb + int(1);
    let e_r = &e / &r;
    Ok((e, r, e_r, big))
}

fn zero(kind: BoundKind, inputs: String) -> RateBound {
    RateBound::exact(kind, BigUint::zero(), inputs)
}

/// `θ(⌈(b+1)/(ε·η(b+1, ε/(b+1)))⌉)` for `ε < 2b`, else 0.
pub fn groetsch_bound<M: Modulus + ?Sized>(eps: f64, b: f64, theta: &ThetaFn, m: &M) -> Result<RateBound> {
    if !m.monotone_in_r() {
        return Err(Error::NonMonotoneModulus);
    }
    let (e, r, e_r, big) = shifted(eps, b)?;
    let inputs = format!("eps={eps} b={b} theta={theta} modulus={}", m.name());
    if big {
        return Ok(zero(BoundKind::Groetsch, inputs));
    }
    let inner = ceil_nonneg(&(&r / (e * modulus_at(m, &r, &e_r)?)));
    Ok(RateBound::exact(BoundKind::Groetsch, theta.apply(&inner)?, inputs))
}

/// `θ(⌈(b+1)/(2ε·η̃(b+1, ε/(b+1)))⌉)` for `ε < 2b`, else 0.
pub fn groetsch_bound_tilde<M: Modulus + ?Sized>(eps: f64, b: f64, theta: &ThetaFn, m: &M) -> Result<RateBound> {
    if !m.has_eta_tilde() {
        return Err(Error::MissingEtaTilde);
    }
    let (e, r, e_r, big) = shifted(eps, b)?;
    let inputs = format!("eps={eps} b={b} theta={theta} modulus={}", m.name());
    if big {
        return Ok(zero(BoundKind::GroetschTilde, inputs));
    }
    let inner = ceil_nonneg(&(&r / (int(2) * e * tilde_at(m, &r, &e_r)?)));
    Ok(RateBound::exact(BoundKind::GroetschTilde, theta.apply(&inner)?, inputs))
}

/// `⌈⌈(d+1)/(ε·η(d+1, ε/(d+1)))⌉ / (λ(1−λ))⌉` for `ε < 2d`, else 0.
pub fn constant_lambda_bound<M: Modulus + ?Sized>(eps: f64, d_c: f64, lambda: f64, m: &M) -> Result<RateBound> {
    if !m.monotone_in_r() {
        return Err(Error::NonMonotoneModulus);
    }
    let w = lambda_weight(lambda)?;
    let (e, r, e_r, big) = shifted(eps, d_c)?;
    let inputs = format!("eps={eps} d_C={d_c} lambda={lambda} modulus={}", m.name());
    if big {
        return Ok(zero(BoundKind::ConstantLambda, inputs));
    }
    let inner = ceil_nonneg(&(&r / (e * modulus_at(m, &r, &e_r)?)));
    Ok(RateBound::exact(BoundKind::ConstantLambda, ceil_nonneg(&(to_rational(&inner) / w)), inputs))
}

/// `⌈⌈(d+1)/(ε·η̃(d+1, ε/(d+1)))⌉ / (λ(1−λ))⌉` for `ε < 2d`, else 0.
pub fn constant_lambda_bound_tilde<M: Modulus + ?Sized>(eps: f64, d_c: f64, lambda: f64, m: &M) -> Result<RateBound> {
    if !m.has_eta_tilde() {
        return Err(Error::MissingEtaTilde);
    }
    let w = lambda_weight(lambda)?;
    let (e, r, e_r, big) = shifted(eps, d_c)?;
    let inputs = format!("eps={eps} d_C={d_c} lambda={lambda} modulus={}", m.name());
    if big {
        return Ok(zero(BoundKind::ConstantLambdaTilde, inputs));
    }
    let inner = ceil_nonneg(&(&r / (e * tilde_at(m, &r, &e_r)?)));
    Ok(RateBound::exact(BoundKind::ConstantLambdaTilde, ceil_nonneg(&(to_rational(&inner) / w)), inputs))
}

/// `⌈c(d+1)²/ε²⌉`, or `None` when `ε ≥ 2d`.
fn quadratic_inner(eps: f64, d_c: f64, c: u64) -> Result<Option<BigUint>> {
    let (e, d) = (positive("eps", eps)?, positive("d_C", d_c)?);
    if e >= int(2) * &d {
        return Ok(None);
    }
    let d1 = d + int(1);
    Ok(Some(ceil_nonneg(&(int(c) * &d1 * &d1 / (&e * &e)))))
}

/// `θ(⌈8(d+1)²/ε²⌉)` for `ε < 2d`, else 0.
pub fn cat0_bound(eps: f64, d_c: f64, theta: &ThetaFn) -> Result<RateBound> {
    let inputs = format!("eps={eps} d_C={d_c} theta={theta}");
    match quadratic_inner(eps, d_c, 8)? {
        None => Ok(zero(BoundKind::Cat0, inputs)),
        Some(inner) => Ok(RateBound::exact(BoundKind::Cat0, theta.apply(&inner)?, inputs)),
    }
}

/// `θ(⌈4(d+1)²/ε²⌉)` for `ε < 2d`, else 0.
pub fn cat0_bound_derived(eps: f64, d_c: f64, theta: &ThetaFn) -> Result<RateBound> {
    let inputs = format!("eps={eps} d_C={d_c} theta={theta}");
    match quadratic_inner(eps, d_c, 4)? {
        None => Ok(zero(BoundKind::Cat0Derived, inputs)),
        Some(inner) => Ok(RateBound::exact(BoundKind::Cat0Derived, theta.apply(&inner)?, inputs)),
    }
}

/// `⌈⌈8(d+1)²/ε²⌉ / (λ(1−λ))⌉` for `ε < 2d`, else 0.
pub fn cat0_constant_bound(eps: f64, d_c: f64, lambda: f64) -> Result<RateBound> {
    let w = lambda_weight(lambda)?;
    let inputs = format!("eps={eps} d_C={d_c} lambda={lambda}");
    match quadratic_inner(eps, d_c, 8)? {
        None => Ok(zero(BoundKind::Cat0Constant, inputs)),
        Some(inner) => Ok(RateBound::exact(BoundKind::Cat0Constant, ceil_nonneg(&(to_rational(&inner) / w)), inputs)),
    }
}

/// `⌈n/(λ(1−λ))⌉`.
pub fn constant_lambda_theta(lambda: f64, n: u64) -> Result<BigUint> {
    constant_theta(lambda, n)
}
