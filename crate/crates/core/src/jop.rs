//! The operator `J = (E⁻φ̃)I + (λ/q)(D*φ̃ − ψ̃)D* − λ(E⁻φ̃)DD*`, symmetric for the
//! Sobolev form, and the banded expansions it induces.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::functional::{dstar_functional, tilde_transform, PearsonPair};
use crate::lattice::{OperatorFamily, Poly};
use crate::report::{Check, Report};
use crate::scalar::{render, Scalar};
use crate::sobolev::{SobolevForm, SobolevSequence};
use crate::standard_ops::OrthoSequence;

#[derive(Clone, Debug, PartialEq)]
pub struct JOperator {
    /// `φ̃`
    pub phi_t: Poly,
    /// `ψ̃`
    pub psi_t: Poly,
    pub lambda: Scalar,
    pub fam: OperatorFamily,
    /// Common divisor removed from `E⁻φ̃` and `D*φ̃ − ψ̃`; `1` when unreduced.
    pub reduced_by: Poly,
}

impl JOperator {
    /// `E⁻φ̃`, divided by `reduced_by`.
    pub fn multiplier(&self) -> Poly {
        let m = self.fam.e_minus(&self.phi_t);
        m.div_exact(&self.reduced_by).expect("reduced_by divides E⁻φ̃")
    }

    /// `D*φ̃ − ψ̃`, divided by `reduced_by`.
    pub fn first_order(&self) -> Poly {
        let f = &self.fam.d_star(&self.phi_t) - &self.psi_t;
        f.div_exact(&self.reduced_by).expect("reduced_by divides D*φ̃ − ψ̃")
    }

    pub fn apply(&self, r: &Poly) -> Poly {
        let fam = &self.fam;
        let m = self.multiplier();
        let ds = fam.d_star(r);
        let first = (&self.first_order() * &ds).scale(&(&self.lambda / fam.q()));
        let second = (&m * &fam.d(&ds)).scale(&self.lambda);
        &(&(&m * r) + &first) - &second
    }

    /// `H = max{deg ψ̃ − 1, deg φ̃}` of the unreduced operator.
    pub fn h(&self) -> usize {
        let dpsi = self.psi_t.degree().unwrap_or(0);
        dpsi.saturating_sub(1).max(self.phi_t.degree().unwrap_or(0))
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced_by.degree().unwrap_or(0) > 0
    }
}

/// Builds `J` from the starred pair of `pair`. With `reduce`, a nonconstant
/// `gcd(E⁻φ̃, D*φ̃ − ψ̃)` is divided out of both coefficient polynomials.
pub fn build_j(pair: &PearsonPair, fam: &OperatorFamily, lambda: Scalar, reduce: bool) -> Result<JOperator> {
    let star = tilde_transform(pair, fam);
    if star.psi.degree().unwrap_or(0) < 1 {
        return Err(Error::InvalidPair(format!("deg ψ̃ < 1 for {star}")));
    }
    let mut j = JOperator { phi_t: star.phi, psi_t: star.psi, lambda, fam: fam.clone(), reduced_by: Poly::one() };
    if reduce {
        let g = j.multiplier().gcd(&j.first_order());
        if g.degree().unwrap_or(0) > 0 {
            j.reduced_by = g;
        }
    }
    Ok(j)
}

fn monomial(k: usize) -> Poly {
    Poly::monomial(k, Scalar::from_integer(1.into()))
}

/// Checks, for all `p = xⁱ`, `r = xʲ` with `i, j ≤ depth`:
/// (a) `⟨(E⁻φ̃)p, r⟩_S = ⟨u, p·Jr⟩`,
/// (b) `⟨(ψ̃ − D*φ̃)p, r⟩_S = ⟨D*u, p·Jr⟩`,
/// (c) `⟨Jp, r⟩_S = ⟨p, Jr⟩_S`.
/// Each identity contributes one check whose detail names the first failing `(i, j)`.
pub fn adjoint_identity_check(j: &JOperator, form: &SobolevForm, depth: usize) -> Result<Report> {
    let u = form.u();
    let du = dstar_functional(u);
    let m = j.multiplier();
    let first = -j.first_order();
    let jr: Vec<Poly> = (0..=depth).map(|k| j.apply(&monomial(k))).collect();
    let mut witness: [Option<String>; 3] = [None, None, None];
    for i in 0..=depth {
        let p = monomial(i);
        for (k, jr_k) in jr.iter().enumerate() {
            let r = monomial(k);
            let pjr = &p * jr_k;
            let lhs = [
                form.inner(&(&m * &p), &r)?,
                form.inner(&(&first * &p), &r)?,
                form.inner(&jr[i], &r)?,
            ];
            let rhs = [u.eval(&pjr)?, du.eval(&pjr)?, form.inner(&p, jr_k)?];
            for (slot, (l, r)) in witness.iter_mut().zip(lhs.iter().zip(&rhs)) {
                if slot.is_none() && l != r {
                    *slot = Some(format!("(i, j) = ({i}, {k}): {} vs {}", render(l), render(r)));
                }
            }
        }
    }
    let names = ["weighted adjoint identity", "starred adjoint identity", "J-symmetry"];
    let mut report = Report::default();
    for (name, w) in names.iter().zip(witness) {
        let label = format!("{name} depth={depth}");
        report.push(match w {
            None => Check::pass(label),
            Some(detail) => Check::new(label, false, detail),
        });
    }
    Ok(report)
}

/// The three expansions at index `n`, each computed by back-substitution and
/// cross-checked against the corresponding projection.
#[derive(Clone, Debug)]
pub struct BandedExpansions {
    pub n: usize,
    pub h: usize,
    /// `(E⁻φ̃)p_n = Σ μ_{n,ν} Q_ν`
    pub mu: Vec<Scalar>,
    /// `J Q_n = Σ ϑ_{n,ν} p_ν`
    pub vartheta: Vec<Scalar>,
    /// `J Q_n = Σ ϖ_{n,ν} Q_ν`
    pub varpi: Vec<Scalar>,
    pub report: Report,
}

fn out_of_band(c: &[Scalar], lo: i64, hi: i64) -> Vec<usize> {
    (0..c.len())
        .filter(|&k| !c[k].is_zero() && ((k as i64) < lo || (k as i64) > hi))
        .collect()
}

/// Expands `(E⁻φ̃)p_n` in `Q`, `JQ_n` in `p` and `JQ_n` in `Q`, and checks the
/// bands `[n−H, n+deg φ̃]`, `[n−deg φ̃, n+H]` and `[n−H, n+H]`.
pub fn banded_expansions(j: &JOperator, form: &SobolevForm, n: usize) -> Result<BandedExpansions> {
    let p = OrthoSequence::new(form.u().clone());
    let q = SobolevSequence::new(form.clone());
    banded_expansions_with(j, &p, &q, n)
}

/// As [`banded_expansions`], reusing already built sequences.
pub fn banded_expansions_with(j: &JOperator, p: &OrthoSequence, q: &SobolevSequence, n: usize) -> Result<BandedExpansions> {
    let u = p.functional();
    let h = j.h();
    let t = j.multiplier().degree().unwrap_or(0);
    let (ni, hi, ti) = (n as i64, h as i64, t as i64);

    let weighted = &j.multiplier() * &p.poly(n)?;
    let mu = q.expand(&weighted)?;
    let mu_proj = q.project(&weighted)?;

    let jq = j.apply(&q.poly(n)?);
    let vartheta = p.expand(&jq)?;
    let vartheta_proj = match jq.degree() {
        None => Vec::new(),
        Some(d) => (0..=d)
            .map(|k| Ok(u.eval(&(&p.poly(k)? * &jq))? / p.norm_sq(k)?))
            .collect::<Result<Vec<_>>>()?,
    };
    let varpi = q.expand(&jq)?;
    let varpi_proj = q.project(&jq)?;

    let mut report = Report::default();
    for (name, c, proj, lo, hi_) in [
        ("μ", &mu, &mu_proj, ni - hi, ni + ti),
        ("ϑ", &vartheta, &vartheta_proj, ni - ti, ni + hi),
        ("ϖ", &varpi, &varpi_proj, ni - hi, ni + hi),
    ] {
        report.push(Check::new(format!("{name} back-substitution equals projection n={n}"), c == proj, ""));
        let bad = out_of_band(c, lo, hi_);
        report.push(Check::new(
            format!("{name} band [{lo}, {hi_}] n={n}"),
            bad.is_empty(),
            format!("nonzero outside the band at {bad:?}"),
        ));
    }
    Ok(BandedExpansions { n, h, mu, vartheta, varpi, report })
}

/// Monomial degrees `m ≤ m_max` at which `deg(J xᵐ) < m + H` (leading-term cancellation).
pub fn degree_drops(j: &JOperator, m_max: usize) -> Vec<usize> {
    (0..=m_max)
        .filter(|&m| j.apply(&monomial(m)).degree() != Some(m + j.h()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_family, FamilySpec};
    use crate::scalar::{int, rat};

    fn setup(spec: &FamilySpec, lambda: Scalar, reduce: bool) -> (JOperator, SobolevForm) {
        let u = make_family(spec).unwrap();
        let j = build_j(u.pearson().unwrap(), u.fam(), lambda.clone(), reduce).unwrap();
        (j, SobolevForm::new(u, lambda).unwrap())
    }

    #[test]
    fn jacobi_operator_matches_the_differential_form() {
        let (alpha, beta, lambda) = (int(1), int(2), rat(1, 3));
        let (j, _) = setup(&FamilySpec::jacobi(alpha.clone(), beta.clone()), lambda.clone(), false);
        assert_eq!(j.apply(&Poly::one()), Poly::from_ints(&[1, 0, -1]));
        let r = Poly::from_ints(&[2, -1, 3, 5]);
        let w = Poly::from_ints(&[1, 0, -1]);
        let first = Poly::new(vec![&alpha - &beta, &alpha + &beta]);
        let expected = &(&(&w * &r) + &(&first * &r.derivative()).scale(&lambda))
            - &(&w * &r.derivative().derivative()).scale(&lambda);
        assert_eq!(j.apply(&r), expected);
        assert_eq!(j.h(), 2);
    }

    #[test]
    fn identities_hold_for_every_family() {
        for spec in FamilySpec::defaults() {
            let (j, form) = setup(&spec, rat(1, 7), false);
            let report = adjoint_identity_check(&j, &form, 6).unwrap();
            assert!(report.passed(), "{spec}: {:?}", report.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn bands_and_degree_drops() {
        let expected_h = [2, 1, 2, 3];
        for (spec, h) in FamilySpec::defaults().iter().zip(expected_h) {
            let (j, form) = setup(spec, rat(1, 3), false);
            assert_eq!(j.h(), h, "{spec}");
            for n in 0..=5 {
                let b = banded_expansions(&j, &form, n).unwrap();
                assert!(b.report.passed(), "{spec} n={n}: {:?}", b.report.failures().collect::<Vec<_>>());
            }
        }
        let (j, _) = setup(&FamilySpec::defaults()[2], rat(1, 3), false);
        assert_eq!(j.apply(&Poly::one()), Poly::one());
        assert_eq!(degree_drops(&j, 8), vec![0]);
    }

    #[test]
    fn reduction_divides_a_common_factor() {
        let (j, _) = setup(&FamilySpec::jacobi(int(0), int(1)), int(1), true);
        assert!(j.is_reduced());
        assert_eq!(j.reduced_by, Poly::from_ints(&[-1, 1]));
        let (j, _) = setup(&FamilySpec::jacobi(int(1), int(2)), int(1), true);
        assert!(!j.is_reduced());
    }
}
