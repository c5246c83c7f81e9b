//! `⌈c·eⁿ⌉` in exact integer arithmetic.
//!
//! `eⁿ` is enclosed in a fixed-point interval `[lo, hi]·2^-w` (lower bounds
//! round down, upper bounds round up at every step). When the ceilings of both
//! ends agree the result is exact; otherwise the precision grows. Since `c·eⁿ`
//! is irrational for rational `c > 0` and `n ≥ 1`, the loop terminates.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::ceil_nonneg;

/// Lower and upper fixed-point bounds for `e` with `w` fractional bits.
fn e_interval(w: u64) -> (BigUint, BigUint) {
    let one = BigUint::one() << w;
    let mut term = one.clone();
    let mut sum = BigUint::zero();
    let mut k: u64 = 0;
    while !term.is_zero() {
        sum += &term;
        k += 1;
        term /= k;
    }
    // Each truncated term lost < 1 ulp; the tail beyond the last nonzero
    // truncated term is below 2 ulps.
    let hi = &sum + BigUint::from(k + 2);
    (sum, hi)
}

fn mul_fixed(a: &BigUint, b: &BigUint, w: u64, round_up: bool) -> BigUint {
    let p = a * b;
    if round_up {
        let mask = (BigUint::one() << w) - 1u32;
        (&p + mask) >> w
    } else {
        p >> w
    }
}

fn pow_fixed(base: &BigUint, mut n: u64, w: u64, round_up: bool) -> BigUint {
    let mut acc = BigUint::one() << w;
    let mut b = base.clone();
    while n > 0 {
        if n & 1 == 1 {
            acc = mul_fixed(&acc, &b, w, round_up);
        }
        n >>= 1;
        if n > 0 {
            b = mul_fixed(&b, &b, w, round_up);
        }
    }
    acc
}

fn ceil_scaled(c: &BigRational, fixed: &BigUint, w: u64) -> BigUint {
    let num = c.numer().to_biguint().expect("positive scale") * fixed;
    let den = c.denom().to_biguint().expect("positive scale") << w;
    let (q, r) = num.div_rem(&den);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// `⌈c·eⁿ⌉` for rational `c > 0`.
pub(crate) fn ceil_scaled_exp(c: &BigRational, n: u64) -> BigUint {
    if n == 0 {
        return ceil_nonneg(c);
    }
    let log2_n = 64 - n.leading_zeros() as u64;
    let c_bits = c.numer().bits() + c.denom().bits();
    let mut guard = 2 * log2_n + c_bits + 64;
    loop {
        // Integer part of eⁿ needs about 1.4427·n bits; the working precision
        // covers it plus the guard.
        let w = n + n / 2 + guard;
        let (e_lo, e_hi) = e_interval(w + 8);
        let e_lo = e_lo >> 8u32;
        let e_hi = (e_hi + 255u32) >> 8u32;
        let lo = pow_fixed(&e_lo, n, w, false);
        let hi = pow_fixed(&e_hi, n, w, true);
        let a = ceil_scaled(c, &lo, w);
        let b = ceil_scaled(c, &hi, w);
        if a == b {
            return a;
        }
        guard *= 2;
    }
}
