//! Functional calculus: products, derivatives, division by (x − c), Pearson data.

mod common;

use common::{family, poly, small_rational};
use num_traits::Zero;
use proptest::prelude::*;
use sobolev_core::functional::{
    admissibility, d_functional, difference, div_linear, dstar_functional, eminus_functional, eplus_functional,
    moments_from_pearson, mul_poly, verify_pearson, Admissibility, DiracMass, FunctionalConfig, MomentFunctional,
    PearsonPair,
};
use sobolev_core::families::{make_family, medem_pair, qfreud_quoted_pair, FamilySpec};
use sobolev_core::scalar::{int, rat, Scalar};
use sobolev_core::{Error, OperatorFamily, Poly};

const DEPTH: usize = 15;

fn moments_equal(a: &MomentFunctional, b: &MomentFunctional, through: usize) -> bool {
    (0..=through).all(|n| a.moment(n).unwrap() == b.moment(n).unwrap())
}

fn table(fam: OperatorFamily, moments: Vec<Scalar>) -> MomentFunctional {
    MomentFunctional::from_moments(fam, "table", moments)
}

fn functional_in(fam: OperatorFamily) -> impl Strategy<Value = MomentFunctional> {
    prop::collection::vec(small_rational(), 32).prop_map(move |m| table(fam.clone(), m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_rule_for_d((fam, u) in family().prop_flat_map(|f| (Just(f.clone()), functional_in(f))), pi in poly(4)) {
        let lhs = d_functional(&mul_poly(&pi, &u));
        let rhs = MomentFunctional::combination(vec![
            (int(1), mul_poly(&fam.e_plus(&pi), &d_functional(&u))),
            (int(1), mul_poly(&fam.d(&pi), &u)),
        ]);
        prop_assert!(moments_equal(&lhs, &rhs, DEPTH));
    }

    #[test]
    fn product_rule_for_d_star((fam, u) in family().prop_flat_map(|f| (Just(f.clone()), functional_in(f))), pi in poly(4)) {
        let lhs = dstar_functional(&mul_poly(&pi, &u));
        let rhs = MomentFunctional::combination(vec![
            (int(1), mul_poly(&fam.e_minus(&pi), &dstar_functional(&u))),
            (int(1), mul_poly(&fam.d_star(&pi), &u)),
        ]);
        prop_assert!(moments_equal(&lhs, &rhs, DEPTH));
    }

    #[test]
    fn shifts_of_functionals_are_inverse(u in functional_in(OperatorFamily::Discrete)) {
        prop_assert!(moments_equal(&eplus_functional(&eminus_functional(&u)), &u, DEPTH));
    }

    #[test]
    fn division_by_linear_factor(u in functional_in(OperatorFamily::Continuous), c in small_rational()) {
        let xc = Poly::linear_root(&c);
        prop_assert!(moments_equal(&mul_poly(&xc, &div_linear(&u, &c)), &u, DEPTH));
        let delta = MomentFunctional::dirac(
            OperatorFamily::Continuous,
            DiracMass { c: c.clone(), weight: u.moment(0).unwrap() },
        );
        let expected = difference(&u, &delta);
        prop_assert!(moments_equal(&div_linear(&mul_poly(&xc, &u), &c), &expected, DEPTH));
    }

    #[test]
    fn eval_is_linear(u in functional_in(OperatorFamily::Continuous), a in poly(6), b in poly(6)) {
        prop_assert_eq!(u.eval(&(&a + &b)).unwrap(), u.eval(&a).unwrap() + u.eval(&b).unwrap());
    }
}

#[test]
fn dirac_moments_are_powers() {
    let d = MomentFunctional::dirac(OperatorFamily::Continuous, DiracMass { c: rat(2, 3), weight: int(3) });
    assert_eq!(d.moment(0).unwrap(), int(3));
    assert_eq!(d.moment(3).unwrap(), rat(8, 9));
    assert_eq!(d.eval(&Poly::from_ints(&[1, 0, 9])).unwrap(), int(15));
}

#[test]
fn short_tables_report_the_missing_index() {
    let u = table(OperatorFamily::Continuous, vec![int(1), int(0)]);
    assert_eq!(u.moment(2), Err(Error::MomentUnavailable { index: 2 }));
}

#[test]
fn pearson_recurrence_data() {
    let fam = OperatorFamily::Continuous;
    let pair = PearsonPair::new(Poly::from_ints(&[1, 0, -1]), Poly::from_ints(&[0, -2])).unwrap();
    let init = [(0, int(1))].into_iter().collect();
    let u = moments_from_pearson(&pair, &fam, init, "legendre").unwrap();
    assert_eq!(u.moment(2).unwrap(), rat(1, 3));
    assert_eq!(u.moment(4).unwrap(), rat(1, 5));
    assert!(u.moment(5).unwrap().is_zero());

    // Medem's 1-singularity: (w)₁ must be supplied, and a contradiction is caught
    let medem = medem_pair();
    assert_eq!(admissibility(&medem, &fam, 10), Admissibility::Singular(1));
    let missing = [(0, int(1))].into_iter().collect();
    assert!(matches!(
        moments_from_pearson(&medem, &fam, missing, "w").and_then(|w| w.moment(2)),
        Err(Error::SingularMoment { index: 1 })
    ));
    let contradicting = [(0, int(1)), (1, int(0)), (2, int(7))].into_iter().collect();
    assert!(matches!(
        moments_from_pearson(&medem, &fam, contradicting, "w"),
        Err(Error::InconsistentInit { index: 2, .. })
    ));
}

#[test]
fn built_in_pairs_hold_on_moments() {
    for spec in FamilySpec::defaults() {
        let u = make_family(&spec).unwrap();
        let r = verify_pearson(&u, u.pearson().unwrap(), false, 20).unwrap();
        assert!(r.passed(), "{spec}: {r:?}");
    }
}

#[test]
fn quoted_qfreud_pair_does_not_hold() {
    let spec = FamilySpec::defaults()[2].clone();
    let FamilySpec::QFreud { q, k, .. } = &spec else { unreachable!() };
    let u = make_family(&spec).unwrap();
    let r = verify_pearson(&u, &qfreud_quoted_pair(q, k), false, 10).unwrap();
    assert_eq!(r.first_failure, Some(1));
}

#[test]
fn config_files_build_functionals() {
    let cfg = FunctionalConfig::from_json(
        r#"{"family_kind": "continuous", "phi": ["1/1", 0, "-1/1"], "psi": [0, -2],
            "init_moments": {"0": "1/1"}, "label": "legendre"}"#,
    )
    .unwrap();
    let u = cfg.build().unwrap();
    assert_eq!(u.moment(2).unwrap(), rat(1, 3));
    assert_eq!(u.label(), "legendre");

    let bad = FunctionalConfig::from_json(r#"{"family_kind": "qhahn", "phi": [1], "psi": [0, 1], "init_moments": {"0": 1}}"#)
        .unwrap()
        .build();
    assert!(matches!(bad, Err(Error::Config(_))));
    assert!(FunctionalConfig::from_json(r#"{"family_kind": "continuous", "surprise": 1}"#).is_err());
}
