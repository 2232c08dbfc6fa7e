use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use permfree::exact::{
    exact_expectation, exact_mode_feasible, exact_variance, wick_oracle_moment, ExactValue, PermMode,
};
use permfree::harness::{parse_monomial, GOLDEN_S, GOLDEN_SUITE};
use permfree::limit::{circular_mixed_moment, freeness_prediction};
use permfree::monomial::GaussSlot;
use permfree::sim::mc_estimate;
use permfree::{Canonical, FreeWord, Monomial};

fn suite() -> Vec<(&'static str, Monomial)> {
    GOLDEN_SUITE.iter().map(|t| (*t, parse_monomial(t, GOLDEN_S).unwrap())).collect()
}

fn exact(m: &Monomial, n: usize) -> BigRational {
    let v = exact_expectation(&m.canonicalize(), n, n, PermMode::Exact).unwrap().value;
    v.rational().unwrap().clone()
}

fn limit(m: &Monomial) -> BigRational {
    freeness_prediction(&m.canonicalize()).unwrap().eval_exact(&BigRational::one())
}

fn int(n: usize) -> BigInt {
    BigInt::from(n)
}

#[test]
fn formulas_match_the_wick_oracle() {
    for (text, m) in suite() {
        for n in 1..=3 {
            let oracle = wick_oracle_moment(&m, n, Some(n)).unwrap();
            assert_eq!(exact(&m, n), oracle, "{text} at N = {n}");
        }
    }
}

#[test]
fn error_against_the_limit_shrinks() {
    for (text, m) in suite() {
        if !exact_mode_feasible(&m.canonicalize(), 6, 6) {
            continue;
        }
        let l = limit(&m);
        let e2 = (exact(&m, 2) - &l).abs();
        let e6 = (exact(&m, 6) - &l).abs();
        assert!(e6 <= e2, "{text}: {e6} > {e2}");
    }
}

#[test]
fn scaled_error_stays_bounded() {
    for (text, m) in suite() {
        let l = limit(&m);
        for n in [2, 4, 6] {
            if !exact_mode_feasible(&m.canonicalize(), n, n) {
                continue;
            }
            let scaled = (exact(&m, n) - &l).abs() * int(n);
            assert!(scaled <= BigRational::from_integer(8.into()), "{text} at N = {n}: N·err = {scaled}");
        }
    }
}

#[test]
fn gaussian_denominators_divide_the_size_factor() {
    for (text, m) in suite() {
        let Canonical::Gaussian(slots) = m.canonicalize() else {
            continue;
        };
        for n in 2..=4usize {
            let fact: BigInt = (1..=n).map(int).product();
            let bound = num_traits::pow(int(n), slots.len() + 1) * num_traits::pow(fact, GOLDEN_S);
            let v = exact(&m, n);
            assert!((&bound % v.denom()).is_zero(), "{text} at N = {n}: {v}");
        }
    }
}

#[test]
fn wishart_terms_carry_m_to_the_cycle_count() {
    for (text, m) in suite() {
        let c = m.canonicalize();
        if !matches!(c, Canonical::Wishart(_)) {
            continue;
        }
        let moment = exact_expectation(&c, 3, 5, PermMode::Exact).unwrap();
        assert!(!moment.terms.is_empty(), "{text}");
        for t in &moment.terms {
            assert_eq!(t.power_of_m, t.tau.cycle_count() as i64, "{text}: {}", t.tau);
        }
    }
}

#[test]
fn mixed_indices_vanish_in_the_limit() {
    let slot = |r, star| GaussSlot {
        r,
        star,
        word: FreeWord::identity(),
    };
    assert!(circular_mixed_moment(&[slot(1, false), slot(2, true)]).unwrap().is_zero());
    assert!(circular_mixed_moment(&[slot(1, false), slot(1, false)]).unwrap().is_zero());
    assert_eq!(circular_mixed_moment(&[slot(1, false), slot(1, true)]).unwrap(), BigInt::one());
}

#[test]
fn normalized_variance_is_stable() {
    for (text, m) in suite() {
        let c = m.canonicalize();
        let scaled: Vec<f64> = (3..=5)
            .filter(|&n| exact_mode_feasible(&c, n, n))
            .map(|n| (exact_variance(&m, n, Some(n)).unwrap() * int(n * n)).to_f64().unwrap())
            .collect();
        let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = scaled.iter().cloned().fold(0.0, f64::max);
        if hi > 1e-12 {
            assert!(hi <= 4.0 * lo, "{text}: {scaled:?}");
        }
    }
}

#[test]
fn sampled_mode_is_unbiased() {
    for (text, m) in suite() {
        let c = m.canonicalize();
        let truth = exact(&m, 4).to_f64().unwrap();
        let mode = PermMode::Sampled {
            samples: 20_000,
            seed: 7,
        };
        match exact_expectation(&c, 4, 4, mode).unwrap().value {
            ExactValue::Estimate { mean, stderr, .. } => {
                assert!((mean - truth).abs() <= 4.0 * stderr + 1e-12, "{text}: {mean} ± {stderr} vs {truth}");
            }
            ExactValue::Rational(r) => assert_eq!(r.to_f64().unwrap(), truth, "{text}"),
        }
    }
}

#[test]
fn monte_carlo_agrees_with_exact() {
    for (text, m) in suite() {
        for n in [2, 5] {
            let truth = exact(&m, n).to_f64().unwrap();
            let r = mc_estimate(&m, n, n, 10_000, 11).unwrap();
            let err = (r.mean - truth).norm();
            assert!(err <= 4.0 * r.stderr + 1e-9, "{text} at N = {n}: {} ± {} vs {truth}", r.mean, r.stderr);
        }
    }
}

#[test]
fn estimates_do_not_depend_on_the_pool() {
    let m = parse_monomial("G1 U[g1] G1* U[g2]", 2).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_estimate(&m, 6, 6, 2000, 3).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.mean.re.to_bits(), b.mean.re.to_bits());
    assert_eq!(a.mean.im.to_bits(), b.mean.im.to_bits());
    assert_eq!(a.variance.to_bits(), b.variance.to_bits());
}
