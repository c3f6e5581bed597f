//! Exact arithmetic helpers shared across the crate.
//!
//! All metric values in this crate are rationals (the contraction base
//! `lambda` is rational, so every distance is a power of it, and weights are
//! rational). Floating point appears only at reporting boundaries.

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Build a rational from an integer pair. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse a rational from `"p/q"` or `"p"` form.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

/// Canonical `"p/q"` (or `"p"` when integral) rendering used by every
/// artifact this crate writes.
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `r^e` for unsigned `e`.
pub fn pow_rational(r: &BigRational, e: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

/// Natural log of a positive big integer, stable for values far beyond
/// `f64` range: uses the top 64 bits plus the bit length.
pub fn biguint_ln(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 52 {
        return (x.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 52;
    let top: BigUint = x >> shift;
    (top.to_u64().unwrap() as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn rational_ln(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "log of non-positive rational");
    biguint_ln(&r.numer().magnitude().clone()) - biguint_ln(&r.denom().magnitude().clone())
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Floor of the integer `p`-th root.
fn integer_nth_root(x: &BigUint, p: u32) -> BigUint {
    if x.is_zero() || x.is_one() || p == 1 {
        return x.clone();
    }
    // Newton iteration from a power-of-two seed above the root.
    let bits = x.bits();
    let mut r: BigUint = BigUint::one() << (bits / p as u64 + 1);
    let pm1 = BigUint::from(p - 1);
    loop {
        // r' = ((p-1)r + x / r^(p-1)) / p
        let rp1 = r.pow(p - 1);
        let next = (&pm1 * &r + x / &rp1) / BigUint::from(p);
        if next >= r {
            break;
        }
        r = next;
    }
    while r.pow(p) > *x {
        r -= BigUint::one();
    }
    r
}

/// Certified enclosure of `x^(1/p)` with width at most `2^-bits`.
/// Requires `x >= 0`.
pub fn nth_root_interval(x: &BigRational, p: u32, bits: u32) -> (BigRational, BigRational) {
    assert!(!x.is_negative());
    if x.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    // x = a/b; x^(1/p) = (a * b^(p-1))^(1/p) / b. Scale by 2^(bits*p) so the
    // integer root carries `bits` fractional bits.
    let a = x.numer().magnitude().clone();
    let b = x.denom().magnitude().clone();
    let scaled = &a * b.pow(p - 1) << (bits as u64 * p as u64);
    let root = integer_nth_root(&scaled, p);
    let denom = BigInt::from(&b << bits as u64);
    let lo = BigRational::new(BigInt::from(root.clone()), denom.clone());
    let hi = BigRational::new(BigInt::from(root + BigUint::one()), denom);
    (lo, hi)
}

/// Least-squares slope of `ys` against `xs`. Panics if fewer than two points.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/2", "3/4", "0", "7", "22/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
        assert!(parse_rational("not a ratio").is_err());
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(8, 4), BigUint::from(70u32));
        assert_eq!(binomial(19, 3), BigUint::from(969u32));
        assert_eq!(binomial(4, 9), BigUint::zero());
    }

    #[test]
    fn big_log_matches_f64_log() {
        let x = BigUint::from(12345678u64);
        assert!((biguint_ln(&x) - 12345678f64.ln()).abs() < 1e-12);
        let huge = BigUint::from(2u32).pow(10_000);
        let expect = 10_000.0 * std::f64::consts::LN_2;
        assert!((biguint_ln(&huge) - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn root_intervals_bracket() {
        let x = ratio(2, 1);
        let (lo, hi) = nth_root_interval(&x, 2, 80);
        let sqrt2 = std::f64::consts::SQRT_2;
        assert!(rational_to_f64(&lo) <= sqrt2 && sqrt2 <= rational_to_f64(&hi));
        assert!(&lo * &lo <= x && x <= &hi * &hi);
        // perfect cube stays exact on the low end
        let (lo, hi) = nth_root_interval(&ratio(27, 8), 3, 40);
        assert_eq!(lo, ratio(3, 2));
        assert!(hi > ratio(3, 2));
    }

    #[test]
    fn slope_of_linear_data_is_exact() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
        assert_eq!(least_squares_slope(&xs, &ys), 3.0);
    }
}
