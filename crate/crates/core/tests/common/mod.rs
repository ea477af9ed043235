//! Strategies and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_traits::{One, Zero};
use proptest::prelude::*;
use sobolev_core::families::FamilySpec;
use sobolev_core::scalar::{int, pochhammer, rat, Scalar};
use sobolev_core::{OperatorFamily, Poly};

pub fn small_rational() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

/// Polynomials of degree at most `max_deg` with small rational coefficients.
pub fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rational(), 0..=max_deg + 1).prop_map(Poly::new)
}

pub fn family() -> impl Strategy<Value = OperatorFamily> {
    prop_oneof![
        Just(OperatorFamily::Continuous),
        Just(OperatorFamily::Discrete),
        prop::sample::select(vec![rat(1, 2), rat(2, 3), rat(3, 2), int(2)])
            .prop_map(|q| OperatorFamily::qhahn(q).unwrap()),
    ]
}

/// Determinant by exact Gaussian elimination with row swaps.
pub fn det(mut m: Vec<Vec<Scalar>>) -> Scalar {
    let n = m.len();
    let mut acc = Scalar::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Scalar::zero();
        };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        acc *= &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    acc
}

/// `det (m_{i+j})_{0 ≤ i, j < size}`.
pub fn hankel_det(moments: &[Scalar], size: usize) -> Scalar {
    if size == 0 {
        return Scalar::one();
    }
    det((0..size).map(|i| moments[i..i + size].to_vec()).collect())
}

/// Moments of `(1−x)^α(1+x)^β dx` on `[−1, 1]` (integer α, β ≥ 0), normalized to `(u)₀ = 1`,
/// by expanding the weight and integrating term by term.
pub fn jacobi_integral_moments(alpha: u32, beta: u32, count: usize) -> Vec<Scalar> {
    let mut w = Poly::one();
    for _ in 0..alpha {
        w = &w * &Poly::from_ints(&[1, -1]);
    }
    for _ in 0..beta {
        w = &w * &Poly::from_ints(&[1, 1]);
    }
    let integral = |n: usize| -> Scalar {
        (0..=w.degree().unwrap_or(0))
            .filter(|k| (k + n) % 2 == 0)
            .map(|k| w.coeff(k) * rat(2, (k + n + 1) as i64))
            .sum()
    };
    let m0 = integral(0);
    (0..count).map(|n| integral(n) / &m0).collect()
}

/// Meixner moments `(1−c)^β Σ_x (β)_x cˣ/x! · xⁿ` via falling factorial moments:
/// `Σ_x (β)_x cˣ/x! · x(x−1)…(x−k+1) = (β)_k (c/(1−c))ᵏ (1−c)^{−β}`.
pub fn meixner_moments(beta: &Scalar, c: &Scalar, count: usize) -> Vec<Scalar> {
    let ratio = c / (Scalar::one() - c);
    // Stirling numbers of the second kind convert falling factorials to powers
    let mut stirling = vec![vec![Scalar::zero(); count + 1]; count + 1];
    stirling[0][0] = Scalar::one();
    for n in 1..=count {
        for k in 1..=n {
            stirling[n][k] = &stirling[n - 1][k - 1] + int(k as i64) * &stirling[n - 1][k];
        }
    }
    (0..count)
        .map(|n| {
            (0..=n)
                .map(|k| &stirling[n][k] * pochhammer(beta, k) * num_traits::pow(ratio.clone(), k))
                .sum()
        })
        .collect()
}

pub fn defaults() -> [FamilySpec; 4] {
    FamilySpec::defaults()
}
