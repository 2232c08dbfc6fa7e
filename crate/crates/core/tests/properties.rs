use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use permfree::harness::report::{read_csv, read_json, write_csv, write_json};
use permfree::harness::{Estimator, ReportRow};
use permfree::limit::{cumulants_from_moments, moments_from_cumulants};
use permfree::perm::{enumerate_nc_pairings, enumerate_noncrossing, Parity};
use permfree::sim::{build_ensemble, evaluate_monomial_trace, ComplexMatrix, ModelTags};
use permfree::words::Letter;
use permfree::{FreeWord, Monomial, Perm};

const S: usize = 3;

fn letters() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((1..=S as u32, any::<bool>()).prop_map(|(g, i)| Letter::new(g, i)), 0..12)
}

fn word() -> impl Strategy<Value = FreeWord> {
    letters().prop_map(|l| FreeWord::reduce(l, S).unwrap())
}

fn perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((1..=n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|images| Perm::from_images(&images).unwrap())
}

fn perm_tuple(n: usize) -> impl Strategy<Value = Vec<Perm>> {
    prop::collection::vec(perm(n), S)
}

fn sized_tuple() -> impl Strategy<Value = (usize, Vec<Perm>)> {
    (1usize..=12).prop_flat_map(|n| (Just(n), perm_tuple(n)))
}

proptest! {
    #[test]
    fn reduce_is_idempotent(raw in letters()) {
        let once = FreeWord::reduce(raw, S).unwrap();
        let twice = FreeWord::reduce(once.letters().iter().copied(), S).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in word(), b in word(), (_, sigmas) in sized_tuple()) {
        let lhs = a.concat(&b).evaluate(&sigmas).unwrap();
        let rhs = a.evaluate(&sigmas).unwrap().compose(&b.evaluate(&sigmas).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_word_has_the_same_fixed_points(w in word(), (_, sigmas) in sized_tuple()) {
        let p = w.evaluate(&sigmas).unwrap();
        let q = w.inverse().evaluate(&sigmas).unwrap();
        prop_assert_eq!(p.fix_count(), q.fix_count());
        prop_assert_eq!(p.inverse(), q);
    }

    #[test]
    fn permutation_matrices_multiply(
        (a, b) in (1usize..=16).prop_flat_map(|n| (perm(n), perm(n)))
    ) {
        let ma = ComplexMatrix::from_perm(&a);
        let mb = ComplexMatrix::from_perm(&b);
        let prod = ComplexMatrix::from_perm(&a.compose(&b).unwrap());
        prop_assert_eq!(ma.mul(&mb).unwrap().max_abs_diff(&prod), 0.0);
        prop_assert_eq!(ma.adjoint().max_abs_diff(&ComplexMatrix::from_perm(&a.inverse())), 0.0);
    }

    #[test]
    fn simulated_word_trace_counts_fixed_points(w in word(), n in 1usize..=12, seed in any::<u64>(), index in 0u64..1000) {
        let e = build_ensemble(n, n, S, ModelTags::PERM, seed, index).unwrap();
        let m = Monomial::new(vec![permfree::Factor::U(w.clone())], S).unwrap();
        let v = evaluate_monomial_trace(&m, &e).unwrap();
        let fix = w.evaluate(&e.sigmas).unwrap().fix_count();
        prop_assert_eq!(v.re, fix as f64 / n as f64);
        prop_assert_eq!(v.im, 0.0);
    }

    #[test]
    fn cumulant_transform_round_trips(table in prop::collection::vec((-20i64..20, 1i64..6), 1..=6)) {
        let moments: Vec<BigRational> = table
            .iter()
            .map(|&(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
            .collect();
        let back = moments_from_cumulants(&cumulants_from_moments(&moments).unwrap()).unwrap();
        prop_assert_eq!(back, moments);
    }

    #[test]
    fn reports_round_trip(
        re in any::<f64>().prop_filter("finite", |x| x.is_finite()),
        im in any::<f64>().prop_filter("finite", |x| x.is_finite()),
        stderr in prop::option::of(0.0f64..1e6),
        n in prop::option::of(1usize..5000),
    ) {
        let mut row = ReportRow::new("G1 U[g1] G1* U[g1^-1]", n, None, Estimator::Mc);
        row.value = num_complex::Complex64::new(re, im);
        row.stderr = stderr;
        row.abs_error_vs_limit = Some(re.abs());
        let mut csv = Vec::new();
        write_csv(std::slice::from_ref(&row), &mut csv).unwrap();
        let mut json = Vec::new();
        write_json(std::slice::from_ref(&row), &mut json).unwrap();
        for back in [read_csv(csv.as_slice()).unwrap(), read_json(json.as_slice()).unwrap()] {
            prop_assert_eq!(back[0].value, row.value);
            prop_assert_eq!(back[0].stderr, row.stderr);
            prop_assert_eq!(back[0].abs_error_vs_limit, row.abs_error_vs_limit);
            prop_assert_eq!(back[0].n, row.n);
        }
    }
}

#[test]
fn kreweras_structure() {
    for n in 1..=7 {
        let gamma = Perm::gamma(n);
        for tau in enumerate_noncrossing(n).unwrap() {
            let k = tau.kreweras().unwrap();
            assert!(k.is_noncrossing());
            assert_eq!(tau.cycle_count() + k.cycle_count(), n + 1);
            let conj = gamma.inverse().compose(&tau).unwrap().compose(&gamma).unwrap();
            assert_eq!(k.kreweras().unwrap(), conj, "K(K({tau}))");
        }
    }
}

#[test]
fn nc_pairings_alternate_parity() {
    for k in 1..=4 {
        for tau in enumerate_nc_pairings(2 * k).unwrap() {
            assert_eq!(tau.parity_classify(), Parity::Alternating);
            assert_eq!(tau.kreweras().unwrap().parity_classify(), Parity::Preserving);
        }
    }
}
