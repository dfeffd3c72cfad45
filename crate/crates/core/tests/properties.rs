use proptest::prelude::*;
use quadmod_core::classify::{self, Connectivity, TierPolicy};
use quadmod_core::complex::{self, C64, ONE};
use quadmod_core::dynamics::DEFAULT_TOL;
use quadmod_core::moduli::{self, EigenvalueTriple, MapForm};
use quadmod_core::MobiusMap;

fn cpx(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(re, im)| C64::new(re, im))
}

fn disk(r: f64) -> impl Strategy<Value = C64> {
    (0.0..r, -3.2..3.2f64).prop_map(|(m, t)| C64::from_polar(m, t))
}

/// Triples on the fixed-point relation, with a share of multipliers pinned
/// to the unit circle or to 1 so that the boundary pieces are hit.
fn triple() -> impl Strategy<Value = EigenvalueTriple> {
    let l = prop_oneof![
        4 => cpx(2.0),
        2 => (-3.2..3.2f64).prop_map(|t| C64::from_polar(1.0, t)),
        1 => Just(ONE),
    ];
    (l.clone(), l).prop_filter_map("product one", |(a, b)| {
        moduli::lambda3_from_eq1(a, b).ok().map(|c| EigenvalueTriple::new(a, b, c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20_000))]

    #[test]
    fn region_predicates_are_exclusive(t in triple()) {
        let hits = [
            classify::in_h(&t),
            classify::in_b0(&t),
            classify::in_b1(&t),
            classify::in_b2(&t),
            classify::in_b2_closure_only(&t),
        ];
        prop_assert!(hits.iter().filter(|h| **h).count() <= 1, "{:?} {:?}", t, hits);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn sigma_coordinates_round_trip(t in triple()) {
        let p = moduli::sigma_coordinates(&t).unwrap();
        let back = moduli::eigenvalues_from_sigma(&p);
        let scale = t.to_array().iter().map(|z| complex::abs(*z)).fold(1.0, f64::max);
        prop_assert!(t.multiset_distance(&back) < 1e-6 * scale, "{:?} {:?}", t, back);
    }

    #[test]
    fn multipliers_are_conjugation_invariant(
        l1 in cpx(3.0), l2 in cpx(3.0),
        a in disk(1.0), b in cpx(2.0), c in cpx(2.0), d in disk(1.0),
    ) {
        prop_assume!(complex::abs(l1 * l2 - ONE) > 1e-2);
        let m = MobiusMap::new(a + 2.0, b, c, d + 2.0).unwrap();
        prop_assume!(complex::abs(m.determinant()) > 0.5);
        let base = MapForm::lambda(l1, l2).unwrap();
        let t0 = moduli::eigenvalue_triple(&base).unwrap();
        let t1 = moduli::eigenvalue_triple(&MapForm::conjugated(base, m)).unwrap();
        let scale = t0.to_array().iter().map(|z| complex::abs(*z)).fold(1.0, f64::max);
        prop_assert!(t0.multiset_distance(&t1) < 1e-7 * scale, "{:?} {:?}", t0, t1);
    }

    #[test]
    fn numeric_agrees_with_escape_bound(l in disk(30.0)) {
        prop_assume!(complex::abs(l - ONE) > 9.0);
        let v = classify::connectivity_per1(l, &TierPolicy::NUMERIC_ONLY, 10_000, DEFAULT_TOL);
        prop_assert_eq!(v.connectivity, Connectivity::Cantor);
    }

    #[test]
    fn numeric_agrees_on_attracting_classes(l in disk(0.95)) {
        let v = classify::connectivity_per1(l, &TierPolicy::NUMERIC_ONLY, 100_000, DEFAULT_TOL);
        prop_assert_eq!(v.connectivity, Connectivity::Connected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    /// More iterations never overturn a decided numeric verdict.
    #[test]
    fn decided_verdicts_survive_larger_budgets(l in cpx(6.0)) {
        let small = classify::connectivity_per1(l, &TierPolicy::NUMERIC_ONLY, 500, DEFAULT_TOL);
        let large = classify::connectivity_per1(l, &TierPolicy::NUMERIC_ONLY, 5_000, DEFAULT_TOL);
        if small.connectivity != Connectivity::Undetermined {
            prop_assert_eq!(small.connectivity, large.connectivity);
        }
    }

    /// Verdicts for `λ` and its conjugate agree.
    #[test]
    fn verdicts_respect_complex_conjugation(l in cpx(6.0)) {
        let policy = TierPolicy::default();
        let a = classify::connectivity_per1(l, &policy, 2_000, DEFAULT_TOL);
        let b = classify::connectivity_per1(l.conj(), &policy, 2_000, DEFAULT_TOL);
        prop_assert_eq!(a.connectivity, b.connectivity);
        prop_assert_eq!(a.rule, b.rule);
    }
}
