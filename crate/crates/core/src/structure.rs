//! Structure relations of semiclassical sequences, checked instance by instance.
//!
//! Bands use the starred pair: `u₁ = E⁺(φu)` is a constant multiple of `φ̃u`, so
//! `φ̃·Dp_{n+1}` is the product whose expansion in `(p_n)` is banded.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::families::{make_family, FamilySpec, QFreudChain};
use crate::functional::{
    admissibility, d_functional, ladder_levels, mul_poly, tilde_transform, Admissibility, MomentFunctional,
    PearsonPair,
};
use crate::lattice::{OperatorFamily, Poly};
use crate::linalg::{solve, Solution};
use crate::report::{Check, Report};
use crate::scalar::{powi, render, Scalar};
use crate::standard_ops::{solve_band_relation, OrthoSequence};

/// Coefficients of one expansion and the band they are expected to occupy.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionReport {
    pub n: usize,
    pub coefficients: BTreeMap<usize, Scalar>,
    pub expected_band: (i64, i64),
    /// Right-hand coefficients of a two-sided relation; empty for plain expansions.
    pub companion: BTreeMap<usize, Scalar>,
    pub violations: Vec<String>,
}

impl ExpansionReport {
    fn from_expansion(n: usize, coeffs: Vec<Scalar>, band: (i64, i64)) -> Self {
        let coefficients: BTreeMap<usize, Scalar> =
            coeffs.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        let violations = coefficients
            .iter()
            .filter(|(k, _)| (**k as i64) < band.0 || (**k as i64) > band.1)
            .map(|(k, c)| format!("coefficient {} at index {k} outside [{}, {}]", render(c), band.0, band.1))
            .collect();
        ExpansionReport { n, coefficients, expected_band: band, companion: BTreeMap::new(), violations }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn coefficient(&self, k: usize) -> Scalar {
        self.coefficients.get(&k).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn to_check(&self, name: &str) -> Check {
        Check::new(format!("{name} n={}", self.n), self.passed(), self.violations.join("; "))
    }
}

fn pair_of(u: &MomentFunctional) -> Result<PearsonPair> {
    u.pearson()
        .cloned()
        .ok_or_else(|| Error::InvalidPair(format!("{} carries no Pearson pair", u.label())))
}

fn tilde_degree(pair: &PearsonPair, fam: &OperatorFamily) -> usize {
    tilde_transform(pair, fam).phi.degree().unwrap_or(0)
}

/// Expands `φ̃·Dp_{n+1}` in `(p_ν)`; band `[n−σ, n+deg φ̃]`, and for `n ≥ σ+1`,
/// `λ_{n,n−σ} = 0` only where `n − σ` is a singular index.
pub fn first_structure(u: &MomentFunctional, pair: &PearsonPair, n: usize) -> Result<ExpansionReport> {
    first_structure_with(&OrthoSequence::new(u.clone()), pair, n)
}

pub fn first_structure_with(seq: &OrthoSequence, pair: &PearsonPair, n: usize) -> Result<ExpansionReport> {
    let fam = seq.functional().fam();
    let phi_t = tilde_transform(pair, fam).phi;
    let sigma = pair.sigma();
    let lhs = &phi_t * &fam.d(&seq.poly(n + 1)?);
    let band = (n as i64 - sigma as i64, (n + tilde_degree(pair, fam)) as i64);
    let mut report = ExpansionReport::from_expansion(n, seq.expand(&lhs)?, band);
    // λ_{n,n−σ} is a nonzero multiple of a_{σ+1} + q⁻¹[n−σ]*b_{σ+2}: it vanishes
    // exactly at a singular index (Medem: n − σ = 1), and nowhere for admissible pairs
    if n > sigma {
        let lam_zero = report.coefficient(n - sigma).is_zero();
        let singular = pair.singular_coefficient(fam, n - sigma).is_zero();
        if lam_zero != singular {
            report.violations.push(format!(
                "λ_({n},{}) {} but the singular coefficient at {} {}",
                n - sigma,
                if lam_zero { "vanishes" } else { "is nonzero" },
                n - sigma,
                if singular { "vanishes" } else { "does not" }
            ));
        }
    }
    Ok(report)
}

/// Solves `Σ_{n−σ}^{n+σ} ξ_ν p_ν = Σ_{n−deg φ̃}^{n+σ} ς_ν p_ν^{[1]}` with `ξ_{n+σ} = ς_{n+σ} = 1`
/// and checks `⟨D(φu), p_m⟩ = 0` for `p+1 ≤ m ≤ 2σ+t+1` (nonzero at `m = p`).
pub fn deriv_relation(u: &MomentFunctional, pair: &PearsonPair, n: usize) -> Result<ExpansionReport> {
    deriv_relation_with(&OrthoSequence::new(u.clone()), pair, n)
}

pub fn deriv_relation_with(seq: &OrthoSequence, pair: &PearsonPair, n: usize) -> Result<ExpansionReport> {
    let u = seq.functional();
    let fam = u.fam();
    let (sigma, t) = (pair.sigma() as i64, tilde_degree(pair, fam) as i64);
    let ni = n as i64;
    if ni < sigma {
        return Err(Error::ParameterDomain(format!("the derivative relation needs n ≥ σ = {sigma}")));
    }
    // only existence is claimed: when p_ν^{[1]} lies in a span of the p_ν (q-Freud:
    // p_n^{[1]} = p_n + ·p_{n−2}) the normalized coefficients are not unique
    let rel = solve_band_relation(|k| seq.poly(k), (ni - sigma, ni + sigma), |k| seq.derivative_poly(k), (ni - t, ni + sigma), n)?;
    let mut violations = Vec::new();
    let dphi_u = d_functional(&mul_poly(&pair.phi, u));
    let p = pair.p();
    if dphi_u.eval(&seq.poly(p)?)?.is_zero() {
        violations.push(format!("⟨D(φu), p_{p}⟩ vanishes"));
    }
    for m in p + 1..=2 * pair.sigma() + pair.t() + 1 {
        let v = dphi_u.eval(&seq.poly(m)?)?;
        if !v.is_zero() {
            violations.push(format!("⟨D(φu), p_{m}⟩ = {}", render(&v)));
        }
    }
    Ok(ExpansionReport {
        n,
        coefficients: rel.left,
        expected_band: (ni - sigma, ni + sigma),
        companion: rel.right,
        violations,
    })
}

/// The relation between `(p_ν^{{−1}})` and `(p_ν)`: left band `[n−σ₋₁, n+σ₋₁]`,
/// right band `[n−deg φ̃₋₁−σ₋₁, n+σ₋₁]`. For classical `u` (σ₋₁ = 0) the left side is
/// `p_n^{{−1}}` alone and the right side is a three-term combination.
pub fn k_minus_one_relation(u: &MomentFunctional, u_m1: &MomentFunctional, n: usize) -> Result<ExpansionReport> {
    let pair = pair_of(u_m1)?;
    let fam = u.fam();
    let (sigma, t) = (pair.sigma() as i64, tilde_degree(&pair, fam) as i64);
    let ni = n as i64;
    let p = OrthoSequence::new(u.clone());
    let pm1 = OrthoSequence::new(u_m1.clone());
    let rel = solve_band_relation(|k| pm1.poly(k), (ni - sigma, ni + sigma), |k| p.poly(k), (ni - t - sigma, ni + sigma), n)?;
    let mut violations = Vec::new();
    if !rel.unique {
        violations.push("relation coefficients are not uniquely determined".to_string());
    }
    Ok(ExpansionReport {
        n,
        coefficients: rel.right,
        expected_band: (ni - t - sigma, ni + sigma),
        companion: rel.left,
        violations,
    })
}

/// `Dp^{{k}}_{n+1}` expanded in the basis of the next ladder level; band `[n−σ_k, n]`.
pub fn ladder_expansion(level: &OrthoSequence, next: &OrthoSequence, sigma_k: usize, n: usize) -> Result<ExpansionReport> {
    let fam = level.functional().fam();
    let d = fam.d(&level.poly(n + 1)?);
    let band = (n as i64 - sigma_k as i64, n as i64);
    Ok(ExpansionReport::from_expansion(n, next.expand(&d)?, band))
}

/// `⟨u₁, Dp_{n+1}·xᵐ⟩ = 0` whenever `m + σ < n`, for `n ≤ n_max`.
pub fn quasi_orthogonality(u: &MomentFunctional, n_max: usize) -> Result<Report> {
    let pair = pair_of(u)?;
    let sigma = pair.sigma();
    let levels = ladder_levels(u, 1, &[])?;
    let u1 = &levels[1];
    let seq = OrthoSequence::new(u.clone());
    let fam = u.fam();
    let mut report = Report::default();
    for n in 0..=n_max {
        let dp = fam.d(&seq.poly(n + 1)?);
        let mut bad = Vec::new();
        for m in (0..n).take_while(|m| m + sigma < n) {
            let v = u1.eval(&(&dp * &Poly::monomial(m, Scalar::one())))?;
            if !v.is_zero() {
                bad.push(format!("m={m}: {}", render(&v)));
            }
        }
        report.push(Check::new(
            format!("quasi-orthogonality of order {sigma} n={n}"),
            bad.is_empty(),
            bad.join("; "),
        ));
    }
    Ok(report)
}

/// `π̃` with `D(πφ_k u_k) = π̃u_k`, found by an exact moment solve over degrees up to
/// `bound + slack`. Returns `None` when the moments do not determine it uniquely.
fn fit_pi_tilde(u_k: &MomentFunctional, lhs: &MomentFunctional, max_deg: usize) -> Result<Option<Poly>> {
    let rows = max_deg + 5;
    let m = u_k.moments(rows + max_deg)?;
    let a = (0..rows).map(|n| m[n..=n + max_deg].to_vec()).collect();
    let b = (0..rows).map(|n| lhs.moment(n)).collect::<Result<Vec<_>>>()?;
    Ok(match solve(a, b) {
        Solution::Unique(c) => Some(Poly::new(c)),
        _ => None,
    })
}

/// For ladder levels `0 ≤ k ≤ k_max` and `π = xᵐ`, `m ≤ m_max`:
/// `π̃ = (Dπ)φ_k + (E⁺π)ψ_k` satisfies `D(πφ_k u_k) = π̃u_k` (checked on moments, and
/// compared with a direct moment fit when that is unique), `deg π̃ ≤ m + σ_k + 1`, with
/// equality and leading coefficient `q^m(a_{σ_k+1} + q⁻¹[m]*b_{σ_k+2})` when the level is
/// admissible. Consecutive levels satisfy the leading-data recursion, and admissibility
/// at level `k` carries over to every later level tested.
pub fn appendix_ladder_check(u: &MomentFunctional, k_max: usize, m_max: usize) -> Result<Report> {
    let fam = u.fam().clone();
    let q = fam.q();
    let levels = ladder_levels(u, k_max + 2, &[])?;
    let pairs = levels.iter().map(pair_of).collect::<Result<Vec<_>>>()?;
    let adm: Vec<Admissibility> = pairs.iter().map(|p| admissibility(p, &fam, 64)).collect();
    let mut report = Report::default();
    let slack = 2;
    let moment_depth = 12;
    for k in 0..=k_max {
        let (u_k, pair) = (&levels[k], &pairs[k]);
        let sigma = pair.sigma();
        for m in 0..=m_max {
            let pi = Poly::monomial(m, Scalar::one());
            let pi_t = &(&fam.d(&pi) * &pair.phi) + &(&fam.e_plus(&pi) * &pair.psi);
            let lhs = d_functional(&mul_poly(&(&pi * &pair.phi), u_k));
            let label = format!("k={k} m={m}");
            let mut bad = Vec::new();
            for j in 0..=moment_depth {
                let xj = Poly::monomial(j, Scalar::one());
                if lhs.eval(&xj)? != u_k.eval(&(&pi_t * &xj))? {
                    bad.push(j);
                }
            }
            report.push(Check::new(
                format!("π̃ equation on moments {label}"),
                bad.is_empty(),
                format!("mismatch at moments {bad:?}"),
            ));
            if let Some(fit) = fit_pi_tilde(u_k, &lhs, m + sigma + 1 + slack)? {
                report.push(Check::new(
                    format!("π̃ by moment fit {label}"),
                    fit == pi_t,
                    format!("fit {fit} vs Leibniz {pi_t}"),
                ));
            }
            let bound = m + sigma + 1;
            report.push(Check::new(
                format!("deg π̃ ≤ m + σ_k + 1 {label}"),
                pi_t.degree().map_or(true, |d| d <= bound),
                format!("deg {:?}, bound {bound}", pi_t.degree()),
            ));
            if adm[k].is_admissible() {
                let lead = powi(&q, m as i64) * pair.singular_coefficient(&fam, m);
                report.push(Check::new(
                    format!("leading coefficient of π̃ {label}"),
                    pi_t.degree() == Some(bound) && pi_t.lead() == lead,
                    format!("π̃ = {pi_t}, expected leading {} in degree {bound}", render(&lead)),
                ));
            }
        }
    }
    for k in 1..=k_max + 2 {
        let (prev, cur) = (&pairs[k - 1], &pairs[k]);
        let (sp, sc) = (prev.sigma() as i64, cur.sigma() as i64);
        let lhs = powi(&q, sp + 2) * (prev.a_top() + q.recip() * fam.bracket_star((sp + 2) as usize) * prev.b_top());
        let rhs = if sp >= sc {
            Some(powi(&q, sp - sc) * (cur.a_top() + q.recip() * fam.bracket_star((sp - sc) as usize) * cur.b_top()))
        } else {
            None
        };
        report.push(Check::new(
            format!("leading-data recursion between levels {} and {k}", k - 1),
            rhs.as_ref() == Some(&lhs),
            format!(
                "σ {sp} → {sc}: {} vs {}",
                render(&lhs),
                rhs.as_ref().map_or_else(|| "undefined (σ increased)".into(), render)
            ),
        ));
    }
    for k in 0..=k_max {
        if adm[k].is_admissible() {
            let later: Vec<usize> = (k + 1..=k + 2).filter(|&l| !adm[l].is_admissible()).collect();
            report.push(Check::new(
                format!("admissibility propagates from level {k}"),
                later.is_empty(),
                format!("not admissible at {later:?}"),
            ));
        }
    }
    Ok(report)
}

/// `DP_n = [n]P_{n−1} + a_nP_{n−3}` with `a_n = Kq⁻ⁿc_nc_{n−1}c_{n−2}` for `3 ≤ n ≤ n_max`,
/// the chain's nonlinear recurrence, and `c₁² + c₁c₂ = 1`.
pub fn qfreud_structure_check(spec: &FamilySpec, n_max: usize) -> Result<Report> {
    let FamilySpec::QFreud { q, k, c1 } = spec else {
        return Err(Error::ParameterDomain(format!("{spec} is not a q-Freud family")));
    };
    let chain = QFreudChain::new(q.clone(), k.clone(), c1.clone())?;
    let u = make_family(spec)?;
    let fam = u.fam().clone();
    let seq = OrthoSequence::new(u);
    let mut report = Report::default();
    for n in 3..=n_max {
        let expected = &seq.poly(n - 1)?.scale(&fam.bracket(n)) + &seq.poly(n - 3)?.scale(&chain.a(n)?);
        let actual = fam.d(&seq.poly(n)?);
        report.push(Check::new(
            format!("q-Freud derivative structure n={n}"),
            actual == expected,
            format!("residual {}", &actual - &expected),
        ));
    }
    for n in 2..=n_max {
        let r = chain.recurrence_residual(n)?;
        report.push(Check::new(format!("q-Freud chain recurrence n={n}"), r.is_zero(), render(&r)));
        let (_, cn) = seq.ttrr(n)?;
        report.push(Check::equal(format!("c_{n} equals the OPS recurrence coefficient"), &render(&chain.c(n)?), &render(&cn)));
    }
    let (c1, c2) = (chain.c(1)?, chain.c(2)?);
    let init = &c1 * &c1 + &c1 * &c2;
    report.push(Check::new("c₁² + c₁c₂ = 1", init.is_one(), render(&init)));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{medem_pair, u_minus_one};
    use crate::scalar::{int, rat};

    fn family(spec: &FamilySpec) -> (MomentFunctional, PearsonPair) {
        let u = make_family(spec).unwrap();
        let pair = u.pearson().unwrap().clone();
        (u, pair)
    }

    #[test]
    fn first_structure_bands() {
        let (u, pair) = family(&FamilySpec::jacobi(int(0), int(0)));
        let r = first_structure(&u, &pair, 2).unwrap();
        assert_eq!(r.expected_band, (2, 4));
        assert!(r.passed());

        let (u, pair) = family(&FamilySpec::defaults()[2]);
        let r = first_structure(&u, &pair, 4).unwrap();
        assert_eq!(r.expected_band, (2, 4));
        assert!(r.passed(), "{:?}", r.violations);
        assert!(!r.coefficient(2).is_zero());

        let (u, pair) = family(&FamilySpec::Medem);
        assert_eq!(pair, medem_pair());
        let r = first_structure(&u, &pair, 3).unwrap();
        assert_eq!(r.expected_band, (2, 6));
        assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn derivative_relation_and_moment_conditions() {
        for spec in FamilySpec::defaults() {
            let (u, pair) = family(&spec);
            let seq = OrthoSequence::new(u);
            for n in pair.sigma().max(pair.t() + 1)..=7 {
                let r = deriv_relation_with(&seq, &pair, n).unwrap();
                assert!(r.passed(), "{spec} n={n}: {:?}", r.violations);
            }
        }
        let (u, pair) = family(&FamilySpec::jacobi(int(1), int(2)));
        let r = deriv_relation(&u, &pair, 4).unwrap();
        assert_eq!(r.coefficients.len(), 1, "σ = 0 leaves p_n alone on the left");
    }

    #[test]
    fn minus_one_relation_is_three_term() {
        for spec in [FamilySpec::jacobi(int(1), int(2)), FamilySpec::meixner(int(2), rat(1, 2))] {
            let u = make_family(&spec).unwrap();
            let um1 = u_minus_one(&spec).unwrap();
            assert_eq!(um1.pearson().unwrap().sigma(), 0);
            for n in 2..=8 {
                let r = k_minus_one_relation(&u, &um1, n).unwrap();
                assert!(r.passed(), "{spec} n={n}: {:?}", r.violations);
                assert_eq!(r.coefficient(n), int(1));
            }
        }
    }

    #[test]
    fn quasi_orthogonality_holds() {
        for spec in FamilySpec::defaults() {
            let r = quasi_orthogonality(&make_family(&spec).unwrap(), 6).unwrap();
            assert!(r.passed(), "{spec}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn appendix_on_small_cases() {
        for spec in FamilySpec::defaults() {
            let r = appendix_ladder_check(&make_family(&spec).unwrap(), 1, 2).unwrap();
            assert!(r.passed(), "{spec}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn ladder_expansions() {
        for spec in FamilySpec::defaults() {
            let (u, pair) = family(&spec);
            let levels = ladder_levels(&u, 1, &[]).unwrap();
            let (p0, p1) = (OrthoSequence::new(u), OrthoSequence::new(levels[1].clone()));
            let outcome = (0..=5).try_for_each(|n| {
                let r = ladder_expansion(&p0, &p1, pair.sigma(), n)?;
                assert!(r.passed(), "{spec} n={n}: {:?}", r.violations);
                Ok::<_, Error>(())
            });
            match spec {
                // u₁ = x³w has vanishing first moment
                FamilySpec::Medem => assert_eq!(outcome, Err(Error::QuasiDefiniteBreakdown { index: 0 })),
                _ => outcome.unwrap(),
            }
        }
    }

    #[test]
    fn qfreud_structure() {
        let r = qfreud_structure_check(&FamilySpec::defaults()[2], 8).unwrap();
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}
