//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_traits::Zero;
use proptest::test_runner::{Config, TestRunner};
use sobolev_core::families::{closed_norm_ratio, make_family, u_minus_one, FamilySpec};
use sobolev_core::functional::{
    admissibility, d_functional, difference, div_linear, dstar_functional, mul_poly, tilde_transform, verify_pearson,
    Admissibility, DiracMass, MomentFunctional,
};
use sobolev_core::jop::{adjoint_identity_check, banded_expansions_with, build_j};
use sobolev_core::report::Report;
use sobolev_core::scalar::{int, rat, Scalar};
use sobolev_core::sobolev::{classical_connection, monomial_gram_ops, norm_recurrence_check, SobolevForm, SobolevSequence};
use sobolev_core::standard_ops::OrthoSequence;
use sobolev_core::structure::{appendix_ladder_check, first_structure_with, qfreud_structure_check, quasi_orthogonality};
use sobolev_core::{OperatorFamily, Poly, Result};

type Outcome = Result<(bool, String)>;

fn from_report(report: Report) -> (bool, String) {
    let total = report.checks.len();
    match report.failures().next() {
        None => (true, format!("{total} checks")),
        Some(c) => (false, format!("{} of {total} failed; first: {} ({})", report.failures().count(), c.name, c.detail)),
    }
}

fn degeneration() -> Outcome {
    let mut checked = 0;
    for spec in FamilySpec::defaults() {
        let u = make_family(&spec)?;
        let q = SobolevSequence::new(SobolevForm::new(u.clone(), int(0))?);
        let p = OrthoSequence::new(u);
        for n in 0..=12 {
            if q.poly(n)? != p.poly(n)? {
                return Ok((false, format!("{spec}: Q_{n} ≠ p_{n}")));
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} polynomials")))
}

fn sobolev_orthogonality() -> Outcome {
    for spec in FamilySpec::defaults() {
        let u = make_family(&spec)?;
        for lambda in [rat(1, 7), int(1), int(3)] {
            let form = SobolevForm::new(u.clone(), lambda.clone())?;
            let q = SobolevSequence::new(form.clone());
            for n in 0..=12 {
                let qn = q.poly(n)?;
                for m in 0..n {
                    if !form.inner(&qn, &q.poly(m)?)?.is_zero() {
                        return Ok((false, format!("{spec} λ={lambda}: ⟨Q_{n}, Q_{m}⟩_S ≠ 0")));
                    }
                }
                if n <= 10 && monomial_gram_ops(&form, n)? != qn {
                    return Ok((false, format!("{spec} λ={lambda}: Gram solve differs at n={n}")));
                }
            }
        }
    }
    Ok((true, "four families, λ ∈ {1/7, 1, 3}".into()))
}

fn norm_ratios() -> Outcome {
    for spec in FamilySpec::defaults().into_iter().take(3) {
        let seq = OrthoSequence::new(make_family(&spec)?);
        let d0 = seq.norm_sq(0)?;
        for n in 0..=10 {
            if seq.norm_sq(n)? / &d0 != closed_norm_ratio(&spec, n)? {
                return Ok((false, format!("{spec}: ratio differs at n={n}")));
            }
        }
    }
    Ok((true, "Jacobi(1,2), Meixner(2,1/2), q-Freud(1/2,4,1/2), n ≤ 10".into()))
}

fn classical_connection_suite() -> Outcome {
    let mut report = Report::default();
    for spec in [FamilySpec::jacobi(int(1), int(2)), FamilySpec::meixner(int(2), rat(1, 2))] {
        let u = make_family(&spec)?;
        let um1 = u_minus_one(&spec)?;
        for lambda in [rat(1, 3), rat(1, 5)] {
            let form = SobolevForm::new(u.clone(), lambda)?;
            // a nonzero three-term residual surfaces as an error here
            let conn = classical_connection(&form, &um1, 12)?;
            report.extend(norm_recurrence_check(&form, &conn, 12)?);
        }
    }
    Ok(from_report(report))
}

fn quasi_orthogonality_all() -> Outcome {
    let mut report = Report::default();
    for spec in FamilySpec::defaults() {
        report.extend(quasi_orthogonality(&make_family(&spec)?, 10)?);
    }
    let (ok, detail) = from_report(report);
    Ok((ok, format!("{detail}; σ = 0, 0, 2, 1")))
}

fn tilde_transform_all() -> Outcome {
    for spec in FamilySpec::defaults() {
        let u = make_family(&spec)?;
        let star = tilde_transform(u.pearson().expect("built-in pair"), u.fam());
        let r = verify_pearson(&u, &star, true, 20)?;
        if !r.passed() {
            return Ok((false, format!("{spec}: fails at moment {:?}", r.first_failure)));
        }
    }
    Ok((true, "moments 0..=20, four families".into()))
}

fn j_symmetry() -> Outcome {
    let mut report = Report::default();
    for spec in FamilySpec::defaults() {
        let u = make_family(&spec)?;
        let lambda = if spec == FamilySpec::Medem { rat(1, 7) } else { rat(1, 3) };
        let j = build_j(u.pearson().expect("built-in pair"), u.fam(), lambda.clone(), false)?;
        report.extend(adjoint_identity_check(&j, &SobolevForm::new(u, lambda)?, 10)?);
    }
    Ok(from_report(report))
}

fn bands() -> Outcome {
    let stated = [2, 1, 4, 3];
    let mut realized = Vec::new();
    let mut report = Report::default();
    for (spec, h_stated) in FamilySpec::defaults().into_iter().zip(stated) {
        let u = make_family(&spec)?;
        let lambda = rat(1, 3);
        let j = build_j(u.pearson().expect("built-in pair"), u.fam(), lambda.clone(), false)?;
        realized.push(format!("{}={} (stated {h_stated})", spec_name(&spec), j.h()));
        let p = OrthoSequence::new(u.clone());
        let q = SobolevSequence::new(SobolevForm::new(u, lambda)?);
        for n in 0..=10 {
            let b = banded_expansions_with(&j, &p, &q, n)?;
            report.extend(b.report);
            // bands at the stated H contain the realized ones
            let h = h_stated.max(j.h()) as i64;
            let ni = n as i64;
            let outside = |c: &[Scalar], lo: i64, hi: i64| {
                c.iter().enumerate().any(|(k, v)| !v.is_zero() && ((k as i64) < lo || (k as i64) > hi))
            };
            if outside(&b.varpi, ni - h, ni + h) || outside(&b.mu, ni - h, ni + h) {
                return Ok((false, format!("{spec}: nonzero outside the stated band at n={n}")));
            }
        }
    }
    let (ok, detail) = from_report(report);
    Ok((ok, format!("{detail}; H: {}", realized.join(", "))))
}

fn spec_name(spec: &FamilySpec) -> &'static str {
    match spec {
        FamilySpec::Jacobi { .. } => "Jacobi",
        FamilySpec::Meixner { .. } => "Meixner",
        FamilySpec::QFreud { .. } => "q-Freud",
        FamilySpec::Medem => "Medem",
    }
}

fn qfreud_structure() -> Outcome {
    Ok(from_report(qfreud_structure_check(&FamilySpec::defaults()[2], 12)?))
}

fn medem() -> Outcome {
    let u = make_family(&FamilySpec::Medem)?;
    let pair = u.pearson().expect("built-in pair").clone();
    let adm = admissibility(&pair, u.fam(), 64);
    if adm != Admissibility::Singular(1) {
        return Ok((false, format!("admissibility {adm:?}")));
    }
    if let Some(k) = (0..=15).map(|k| 2 * k + 1).find(|&k| u.moment(k).map_or(true, |m| !m.is_zero())) {
        return Ok((false, format!("odd moment {k} is nonzero")));
    }
    let seq = OrthoSequence::new(u);
    for n in 0..=10 {
        let r = first_structure_with(&seq, &pair, n)?;
        if r.expected_band != (n as i64 - 1, n as i64 + 3) || !r.passed() {
            return Ok((false, format!("n={n}: {:?}", r.violations)));
        }
    }
    Ok((true, "singular(1), odd moments 0 through 31, band [n−1, n+3] for n ≤ 10".into()))
}

fn appendix() -> Outcome {
    let mut report = Report::default();
    for spec in FamilySpec::defaults() {
        report.extend(appendix_ladder_check(&make_family(&spec)?, 2, 3)?);
    }
    Ok(from_report(report))
}

fn moments_equal(a: &MomentFunctional, b: &MomentFunctional, through: usize) -> Result<bool> {
    for n in 0..=through {
        if a.moment(n)? != b.moment(n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn functional_calculus() -> Outcome {
    let mut cases = 0;
    for spec in FamilySpec::defaults() {
        let u = make_family(&spec)?;
        for c in [rat(-1, 2), int(0), rat(2, 3), int(3)] {
            let xc = Poly::linear_root(&c);
            let delta = MomentFunctional::dirac(u.fam().clone(), DiracMass { c: c.clone(), weight: u.moment(0)? });
            if !moments_equal(&mul_poly(&xc, &div_linear(&u, &c)), &u, 15)?
                || !moments_equal(&div_linear(&mul_poly(&xc, &u), &c), &difference(&u, &delta), 15)?
            {
                return Ok((false, format!("{spec}, c = {c}: division identities fail")));
            }
            cases += 1;
        }
    }

    let mut runner = TestRunner::new(Config { cases: 64, failure_persistence: None, ..Config::default() });
    let u_table = |fam: &OperatorFamily| {
        MomentFunctional::from_moments(fam.clone(), "table", (0..24).map(|k| rat(k * k - 3 * k + 1, k + 1)).collect())
    };
    let leibniz = runner.run(&(common::family(), common::poly(4), common::poly(4)), |(fam, pi, xi)| {
        let ok_poly = fam.d(&(&pi * &xi)) == &(&fam.e_plus(&pi) * &fam.d(&xi)) + &(&fam.d(&pi) * &xi)
            && fam.d_star(&(&pi * &xi)) == &(&fam.e_minus(&pi) * &fam.d_star(&xi)) + &(&fam.d_star(&pi) * &xi);
        let u = u_table(&fam);
        let d_rule = MomentFunctional::combination(vec![
            (int(1), mul_poly(&fam.e_plus(&pi), &d_functional(&u))),
            (int(1), mul_poly(&fam.d(&pi), &u)),
        ]);
        let ds_rule = MomentFunctional::combination(vec![
            (int(1), mul_poly(&fam.e_minus(&pi), &dstar_functional(&u))),
            (int(1), mul_poly(&fam.d_star(&pi), &u)),
        ]);
        let ok_fun = moments_equal(&d_functional(&mul_poly(&pi, &u)), &d_rule, 15).unwrap_or(false)
            && moments_equal(&dstar_functional(&mul_poly(&pi, &u)), &ds_rule, 15).unwrap_or(false);
        proptest::prop_assert!(ok_poly && ok_fun);
        Ok(())
    });
    Ok(match leibniz {
        Ok(()) => (true, format!("{cases} division cases through moment 15; 64 random Leibniz cases")),
        Err(e) => (false, format!("Leibniz rule: {e}")),
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("λ = 0 degeneration: Q_n = p_n, n ≤ 12", degeneration),
        ("Sobolev orthogonality and Gram-matrix oracle", sobolev_orthogonality),
        ("norm ratios match closed forms", norm_ratios),
        ("classical connection, norm and e_n recurrences", classical_connection_suite),
        ("quasi-orthogonality of Dp_{n+1} for u₁", quasi_orthogonality_all),
        ("tilde transform D*(φ̃u) = ψ̃u", tilde_transform_all),
        ("J-symmetry and adjoint identities", j_symmetry),
        ("banded expansions of J", bands),
        ("q-Freud structure relation and chain", qfreud_structure),
        ("Medem singularity, parity and band", medem),
        ("ladder leading coefficients and admissibility", appendix),
        ("functional calculus identities", functional_calculus),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !ok {
            failed += 1;
        }
        println!("criterion {:>2}: {} — {title} ({detail})", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria passed in {:.1?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
