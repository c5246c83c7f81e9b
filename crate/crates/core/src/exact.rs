//! Exact rational arithmetic on user-supplied parameters.
//!
//! A parameter `x: f64` is read as the decimal number its shortest
//! round-trip representation shows, so `0.3` means `3/10` rather than the
//! nearest binary fraction.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The decimal value of a finite `f64`.
pub(crate) fn rational(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("{x} is not finite")));
    }
    let text = alloc::format!("{:e}", x);
    let (mantissa, exp) = text.split_once('e').expect("exponent form");
    let exp: i64 = exp.parse().expect("integer exponent");
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mut digits = alloc::string::String::from(int);
    digits.push_str(frac);
    let mut n: BigInt = digits.parse().expect("decimal digits");
    if neg {
        n = -n;
    }
    let shift = exp - frac.len() as i64;
    let ten = BigInt::from(10u32);
    let q = if shift >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-shift) as usize))
    };
    Ok(q)
}

/// `⌈q⌉` for `q ≥ 0`.
pub(crate) fn ceil_nonneg(q: &BigRational) -> BigUint {
    debug_assert!(!q.is_negative());
    let (quot, rem) = q.numer().div_rem(q.denom());
    let c = if rem.is_zero() { quot } else { quot + BigInt::one() };
    c.to_biguint().unwrap_or_default()
}

pub(crate) fn to_rational(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
}

/// `log10` of a big integer, accurate to about 1e-15 relative.
pub(crate) fn log10_big(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        let v = num_traits::ToPrimitive::to_f64(n).unwrap_or(f64::INFINITY);
        return libm::log10(v);
    }
    let shift = bits - 64;
    let top = num_traits::ToPrimitive::to_f64(&(n >> shift)).unwrap_or(f64::INFINITY);
    libm::log10(top) + shift as f64 * core::f64::consts::LOG10_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceilings() {
        assert_eq!(ceil_nonneg(&rational(3.0).unwrap()), BigUint::from(3u32));
        assert_eq!(ceil_nonneg(&rational(3.25).unwrap()), BigUint::from(4u32));
        assert_eq!(ceil_nonneg(&rational(0.0).unwrap()), BigUint::zero());
        let q = rational(3.0).unwrap() / rational(0.3).unwrap();
        assert_eq!(ceil_nonneg(&q), BigUint::from(10u32));
        let q = rational(3.0).unwrap() / rational(0.01).unwrap();
        assert_eq!(ceil_nonneg(&q), BigUint::from(300u32));
    }

    #[test]
    fn decimal_reading() {
        assert_eq!(rational(0.1).unwrap(), BigRational::new(1.into(), 10.into()));
        assert_eq!(rational(-2.5e-7).unwrap(), BigRational::new((-25).into(), 100_000_000.into()));
        assert_eq!(rational(1.5e20).unwrap(), BigRational::from_integer(150_000_000_000_000_000_000u128.into()));
        assert_eq!(rational(0.0).unwrap(), BigRational::zero());
        assert!(rational(f64::NAN).is_err());
    }

    #[test]
    fn log10_of_large_values() {
        let n = BigUint::from(10u32).pow(300);
        assert!((log10_big(&n) - 300.0).abs() < 1e-12);
        let n = BigUint::from(10u32).pow(5000) * 3u32;
        assert!((log10_big(&n) - (5000.0 + libm::log10(3.0))).abs() < 1e-9);
    }
}
