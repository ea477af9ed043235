//! Exact rational scalars and their canonical `num/den` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// All coefficients, moments and parameters are exact rationals.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// `n/d` in lowest terms. Panics on `d == 0`, like the underlying type.
pub fn rat(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical rendering: always `num/den`, integers included (`3/1`).
pub fn render(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `a/b`, `a`, and signed variants. Whitespace around tokens is ignored.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Scalar::new(n, d))
}

/// x^e for any integer exponent; x must be nonzero when e < 0.
pub fn powi(x: &Scalar, e: i64) -> Scalar {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), e.unsigned_abs() as usize)
    }
}

/// Rising factorial (a)_n.
pub fn pochhammer(a: &Scalar, n: usize) -> Scalar {
    (0..n).fold(Scalar::one(), |acc, k| acc * (a + int(k as i64)))
}

pub fn factorial(n: usize) -> Scalar {
    pochhammer(&Scalar::one(), n)
}

/// Returns the nonnegative integer value of `x`, if it is one.
pub fn as_index(x: &Scalar) -> Option<usize> {
    if x.is_integer() && !x.is_negative() {
        x.to_integer().try_into().ok()
    } else {
        None
    }
}
