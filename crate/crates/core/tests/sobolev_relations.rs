//! Sobolev sequences: degeneration, orthogonality, and the classical connection recurrences.

use num_traits::Zero;
use sobolev_core::families::{make_family, u_minus_one, FamilySpec};
use sobolev_core::scalar::{int, rat};
use sobolev_core::sobolev::{
    classical_connection, e_from_recurrence, norm_recurrence_check, semiclassical_connection, SobolevForm,
    SobolevSequence,
};
use sobolev_core::standard_ops::OrthoSequence;

#[test]
fn zero_lambda_gives_the_standard_sequence() {
    for spec in FamilySpec::defaults() {
        let u = make_family(&spec).unwrap();
        let q = SobolevSequence::new(SobolevForm::new(u.clone(), int(0)).unwrap());
        let p = OrthoSequence::new(u);
        for n in 0..=12 {
            assert_eq!(q.poly(n).unwrap(), p.poly(n).unwrap(), "{spec} n={n}");
        }
    }
}

#[test]
fn sobolev_orthogonality_is_exact() {
    for spec in FamilySpec::defaults() {
        let form = SobolevForm::new(make_family(&spec).unwrap(), rat(1, 7)).unwrap();
        let q = SobolevSequence::new(form.clone());
        for n in 1..=12 {
            for m in 0..n {
                assert!(form.inner(&q.poly(n).unwrap(), &q.poly(m).unwrap()).unwrap().is_zero(), "{spec} ({n}, {m})");
            }
        }
    }
}

#[test]
fn connection_recurrences_hold_through_twelve() {
    for spec in [FamilySpec::jacobi(int(1), int(2)), FamilySpec::meixner(int(2), rat(1, 2))] {
        let u = make_family(&spec).unwrap();
        let um1 = u_minus_one(&spec).unwrap();
        for lambda in [rat(1, 3), rat(1, 5)] {
            let form = SobolevForm::new(u.clone(), lambda.clone()).unwrap();
            let conn = classical_connection(&form, &um1, 12).unwrap();
            let report = norm_recurrence_check(&form, &conn, 12).unwrap();
            assert!(report.passed(), "{spec} λ={lambda}: {:?}", report.failures().collect::<Vec<_>>());
            let c1 = &conn.dsq[1] / &conn.dsq[0];
            assert_eq!(conn.e[1], &c1 * &conn.eps_t[3] / (&lambda + &c1));
            assert_eq!(e_from_recurrence(u.fam(), &conn, 1), conn.e[1]);
        }
    }
}

#[test]
fn meixner_has_no_second_connection_coefficient() {
    let spec = FamilySpec::meixner(int(2), rat(1, 2));
    let form = SobolevForm::new(make_family(&spec).unwrap(), rat(1, 3)).unwrap();
    let conn = classical_connection(&form, &u_minus_one(&spec).unwrap(), 8).unwrap();
    assert!(conn.eps_t.iter().all(Zero::is_zero));
    assert!(conn.e.iter().all(Zero::is_zero));
}

#[test]
fn semiclassical_connection_bands() {
    let spec = FamilySpec::jacobi(int(1), int(2));
    let form = SobolevForm::new(make_family(&spec).unwrap(), rat(1, 3)).unwrap();
    let um1 = u_minus_one(&spec).unwrap();
    for n in 2..=10 {
        let sc = semiclassical_connection(&form, &um1, n).unwrap();
        assert!(sc.report.passed(), "n={n}: {:?}", sc.report.failures().collect::<Vec<_>>());
        assert_eq!(sc.h_star, 2);
    }
    assert!(semiclassical_connection(&form, &um1, 1).is_err());
}

#[test]
fn negative_lambda_is_rejected() {
    let u = make_family(&FamilySpec::Medem).unwrap();
    assert!(SobolevForm::new(u, rat(-1, 2)).is_err());
}
