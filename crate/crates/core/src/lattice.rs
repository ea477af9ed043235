//! Dense exact polynomials and the operator families `D`, `D*`, `E⁺`, `E⁻`.
//!
//! Three families share one interface:
//!
//! | family     | `D`        | `D*`           | `E⁺ r(x)` | `E⁻ r(x)`  |
//! |------------|------------|----------------|-----------|------------|
//! | continuous | d/dx       | d/dx           | r(x)      | r(x)       |
//! | discrete   | Δ          | ∇              | r(x+1)    | r(x−1)     |
//! | q-Hahn     | `D_q`      | `D_{1/q}`      | r(qx)     | r(x/q)     |
//!
//! The q-lattice is `x(s) = qˢ`, so every q-operator acts directly on the variable.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{int, powi, render, Scalar};

/// Polynomial with exact coefficients, `coeffs[k]` multiplying `xᵏ`.
/// Trailing zeros are always trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::monomial(1, Scalar::one())
    }

    /// `c·xᵏ`
    pub fn monomial(k: usize, c: Scalar) -> Self {
        let mut coeffs = vec![Scalar::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `x − c`
    pub fn linear_root(c: &Scalar) -> Self {
        Self::new(vec![-c.clone(), Scalar::one()])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `xᵏ` (zero past the degree).
    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as a signed integer, with `−1` for the zero polynomial.
    pub fn deg_i(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lead(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lead().recip())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| acc * x + c)
    }

    /// `p(x) ↦ p(a·x)`
    pub fn dilate(&self, a: &Scalar) -> Self {
        let mut pw = Scalar::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &pw);
            pw *= a;
        }
        Self::new(out)
    }

    /// `p(x) ↦ p(x + h)` via Horner on the shifted variable.
    pub fn shift(&self, h: &Scalar) -> Self {
        let step = Poly::new(vec![h.clone(), Scalar::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * &step) + &Poly::constant(c.clone()))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d.lead().recip();
        let mut rem = self.coeffs.clone();
        let Some(n) = self.degree().filter(|&n| n >= dd) else {
            return (Poly::zero(), self.clone());
        };
        let mut quot = vec![Scalar::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{}", render(&a))?,
                1 => write!(f, "({})x", render(&a))?,
                _ => write!(f, "({})x^{k}", render(&a))?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly { (&self).$m(&rhs) }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Which difference/derivative calculus is in force.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OperatorFamily {
    Continuous,
    Discrete,
    /// q-Hahn calculus on the lattice `x(s) = qˢ`; `q` is rational, positive, and ≠ 1.
    QHahn(Scalar),
}

impl OperatorFamily {
    pub fn qhahn(q: Scalar) -> Result<Self> {
        if !q.is_positive() || q.is_one() {
            return Err(Error::ParameterDomain(format!(
                "q must be a positive rational different from 1, got {}",
                render(&q)
            )));
        }
        Ok(OperatorFamily::QHahn(q))
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorFamily::Continuous => "continuous",
            OperatorFamily::Discrete => "discrete",
            OperatorFamily::QHahn(_) => "qhahn",
        }
    }

    /// `q` for the q-family, `1` otherwise.
    pub fn q(&self) -> Scalar {
        match self {
            OperatorFamily::QHahn(q) => q.clone(),
            _ => Scalar::one(),
        }
    }

    /// `[n]`
    pub fn bracket(&self, n: usize) -> Scalar {
        match self {
            OperatorFamily::QHahn(q) => q_number(q, n),
            _ => int(n as i64),
        }
    }

    /// `[n]*`
    pub fn bracket_star(&self, n: usize) -> Scalar {
        match self {
            OperatorFamily::QHahn(q) => q_number(&q.recip(), n),
            _ => int(n as i64),
        }
    }

    pub fn d(&self, p: &Poly) -> Poly {
        match self {
            OperatorFamily::Continuous => p.derivative(),
            OperatorFamily::Discrete => &p.shift(&Scalar::one()) - p,
            OperatorFamily::QHahn(_) => self.q_derivative(p, |n| self.bracket(n)),
        }
    }

    pub fn d_star(&self, p: &Poly) -> Poly {
        match self {
            OperatorFamily::Continuous => p.derivative(),
            OperatorFamily::Discrete => p - &p.shift(&-Scalar::one()),
            OperatorFamily::QHahn(_) => self.q_derivative(p, |n| self.bracket_star(n)),
        }
    }

    pub fn e_plus(&self, p: &Poly) -> Poly {
        match self {
            OperatorFamily::Continuous => p.clone(),
            OperatorFamily::Discrete => p.shift(&Scalar::one()),
            OperatorFamily::QHahn(q) => p.dilate(q),
        }
    }

    pub fn e_minus(&self, p: &Poly) -> Poly {
        match self {
            OperatorFamily::Continuous => p.clone(),
            OperatorFamily::Discrete => p.shift(&-Scalar::one()),
            OperatorFamily::QHahn(q) => p.dilate(&q.recip()),
        }
    }

    /// `Δx` on the lattice: `1` (discrete), `(q−1)x` (q-Hahn), `0` (continuous).
    pub fn lattice_step(&self) -> Poly {
        match self {
            OperatorFamily::Continuous => Poly::zero(),
            OperatorFamily::Discrete => Poly::one(),
            OperatorFamily::QHahn(q) => Poly::monomial(1, q - Scalar::one()),
        }
    }

    fn q_derivative(&self, p: &Poly, br: impl Fn(usize) -> Scalar) -> Poly {
        Poly::new(
            p.coeffs()
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * br(k))
                .collect(),
        )
    }
}

/// `(qⁿ − 1)/(q − 1)`, evaluated as `1 + q + … + qⁿ⁻¹`.
fn q_number(q: &Scalar, n: usize) -> Scalar {
    (0..n).map(|k| powi(q, k as i64)).sum()
}
