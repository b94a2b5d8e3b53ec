//! Exact rational scalars.
//!
//! All coefficient arithmetic in the crate uses [`Rational`]: an
//! arbitrary-precision fraction kept in lowest terms with a positive
//! denominator (zero is 0/1). Those invariants are maintained by the
//! underlying `num-rational` type on every operation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rational = BigRational;

/// Rational from a machine integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(Int::from(n))
}

/// Rational n/d; panics if d = 0.
pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(Int::from(n), Int::from(d))
}

/// r^e without any gcd work: numerator and denominator are coprime, so
/// their powers are too.
pub fn rat_pow(r: &Rational, e: u32) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    if e == 1 {
        return r.clone();
    }
    Rational::new_raw(r.numer().pow(e), r.denom().pow(e))
}

/// Parses "n", "-n", or "n/d" (d > 0 after normalization). Returns None on
/// malformed input or zero denominator.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Int = n.trim().parse().ok()?;
            let d: Int = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => {
            let n: Int = s.parse().ok()?;
            Some(Rational::from_integer(n))
        }
    }
}

/// Formats without a superfluous "/1".
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True if r is a negative number (used for sign-aware printing).
pub fn is_negative(r: &Rational) -> bool {
    r.numer().is_negative()
}
