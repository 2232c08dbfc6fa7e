//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use permfree::exact::{exact_expectation, exact_variance, wick_oracle_moment, PermMode};
use permfree::harness::{
    run_convergence_study, run_demo, run_variance_study, DemoConfig, Estimator, ExperimentConfig, MSizes, ReportRow,
    StudyMode, GOLDEN_S, GOLDEN_SUITE,
};
use permfree::limit::{
    cumulants_from_moments, freeness_prediction, moments_from_cumulants, rectangular_limit_moment,
    rectangular_limit_symbolic,
};
use permfree::perm::{enumerate_nc_pairings, enumerate_noncrossing, enumerate_pairings, enumerate_permutations};
use permfree::{CPolynomial, Canonical, Monomial, Perm};

type Outcome = Result<String, String>;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn mono(text: &str) -> Monomial {
    Monomial::parse(text, GOLDEN_S).unwrap()
}

fn family_uses_m(c: &Canonical) -> bool {
    matches!(
        c,
        Canonical::Wishart(_) | Canonical::Rectangular(_) | Canonical::RectPure { .. }
    )
}

fn exact_value(text: &str, n: usize, m: usize) -> Result<BigRational, String> {
    let em = exact_expectation(&mono(text).canonicalize(), n, m, PermMode::Exact).map_err(|e| format!("{text}: {e}"))?;
    em.value
        .rational()
        .cloned()
        .ok_or_else(|| format!("{text}: exact mode returned an estimate"))
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for text in GOLDEN_SUITE {
        let m = mono(text);
        let canon = m.canonicalize();
        let ms: &[usize] = if family_uses_m(&canon) { &[2, 3] } else { &[2] };
        for n in [2, 3] {
            for &msize in ms {
                let exact = exact_value(text, n, msize)?;
                let oracle = wick_oracle_moment(&m, n, Some(msize)).map_err(|e| format!("{text}: {e}"))?;
                if exact != oracle {
                    return Err(format!("{text} at N={n}, M={msize}: exact {exact} vs oracle {oracle}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{} monomials, {checked} (monomial, N, M) cases equal as rationals", GOLDEN_SUITE.len()))
}

fn criterion_2() -> Outcome {
    let cases: Vec<(&str, Box<dyn Fn(i64, i64) -> BigRational>)> = vec![
        ("G1 U[e] G1* U[e]", Box::new(|_, _| q(1, 1))),
        ("G1 U[e] G1* U[e] G1 U[e] G1* U[e]", Box::new(|_, _| q(2, 1))),
        ("G1 U[g1] G1* U[g1^-1]", Box::new(|n, _| q(2, n * n))),
        ("W1", Box::new(|n, m| q(m, n))),
        ("W1 U[e] W1 U[e]", Box::new(|n, m| q(m, n) + q(m * m, n * n))),
        ("W1 U[g1] W1 U[g1^-1]", Box::new(|n, m| q(m * m, n * n) + q(2 * m, n * n * n))),
        ("H1* T[e] H1 U[e]", Box::new(|n, m| q(m * n, (m + n) * (m + n)))),
        ("U[g1]", Box::new(|n, _| q(1, n))),
        ("U[g1^2]", Box::new(|n, _| q(2, n))),
    ];
    let mut checked = 0;
    for (text, want) in &cases {
        for n in 2..=6usize {
            for m in [2usize, 3, 5] {
                let got = exact_value(text, n, m)?;
                let w = want(n as i64, m as i64);
                if got != w {
                    return Err(format!("{text} at N={n}, M={m}: got {got}, want {w}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{} closed forms, {checked} exact equalities", cases.len()))
}

fn criterion_3() -> Outcome {
    let g = mono("G1 U[e] G1* U[e]");
    for n in 2..=6usize {
        let v = exact_variance(&g, n, None).map_err(|e| e.to_string())?;
        let scaled = v * BigRational::from_integer(BigInt::from(n * n));
        if !scaled.is_one() {
            return Err(format!("N²·Var at N={n} is {scaled}, want 1"));
        }
    }
    let cfg = ExperimentConfig {
        s: GOLDEN_S,
        monomials: GOLDEN_SUITE.iter().map(|s| s.to_string()).collect(),
        sizes: vec![16, 32, 64],
        m_sizes: MSizes::Ratio(1.0),
        samples: 1000,
        mode: StudyMode::Sampled,
        seed: 7,
        ..Default::default()
    };
    let rows = run_variance_study(&cfg).map_err(|e| e.to_string())?;
    let mut worst: f64 = 1.0;
    for text in GOLDEN_SUITE {
        let label = mono(text).to_string();
        let series: Vec<_> = rows.iter().filter(|r| r.monomial == label).collect();
        if series.len() != 3 || series.iter().any(|r| r.error.is_some()) {
            return Err(format!("{text}: missing or failed variance rows"));
        }
        let base = series[0].n2_variance;
        for r in &series[1..] {
            let ratio = r.n2_variance / base;
            worst = worst.max(ratio).max(1.0 / ratio);
            if !(0.25..=4.0).contains(&ratio) {
                return Err(format!(
                    "{text}: N²·Var {} at N={} vs {} at N=16",
                    r.n2_variance, r.n, base
                ));
            }
        }
    }
    Ok(format!(
        "exact N²·Var = 1 for N = 2..6; MC N²·Var within factor {worst:.2} of N=16 across the suite"
    ))
}

fn catalan(k: u64) -> u64 {
    (0..k).fold(1u64, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

fn criterion_4() -> Outcome {
    for k in 1..=5 {
        let text = vec!["G1 G1*"; k].join(" ");
        let l = freeness_prediction(&mono(&text).canonicalize()).map_err(|e| e.to_string())?;
        if l.as_constant() != Some(BigInt::from(catalan(k as u64))) {
            return Err(format!("φ((GG*)^{k}) = {l}"));
        }
    }
    let via_cumulants = moments_from_cumulants(&vec![CPolynomial::c(); 6]).map_err(|e| e.to_string())?;
    for n in 1..=6usize {
        let text = vec!["W1"; n].join(" ");
        let l = freeness_prediction(&mono(&text).canonicalize()).map_err(|e| e.to_string())?;
        let mut direct = CPolynomial::zero();
        for tau in enumerate_noncrossing(n).map_err(|e| e.to_string())? {
            direct = direct + CPolynomial::monomial(1, tau.cycle_count() as u32);
        }
        if l.one_plus_c_power != 0 || l.numerator != direct || direct != via_cumulants[n - 1] {
            return Err(format!("φ(W^{n}): prediction {l}, NC sum {direct}, cumulants {}", via_cumulants[n - 1]));
        }
    }
    // and back: every free cumulant of the free Poisson law is c
    let c = q(3, 7);
    let moments: Vec<BigRational> = via_cumulants.iter().map(|p| p.eval_exact(&c)).collect();
    if cumulants_from_moments(&moments).map_err(|e| e.to_string())?.iter().any(|k| *k != c) {
        return Err("cumulants of the free Poisson moments are not all c".into());
    }
    let rect = [
        "H1* T[e] H1 U[e]",
        "H1* T[g1] H1 U[g1^-1]",
        "H1* T[e] H1 U[g2]",
        "H1* T[e] H1 U[e] H1* T[e] H1 U[e]",
        "H1* T[e] H2 U[e] H2* T[e] H1 U[e]",
        "H1* T[g1] H1 U[e] H1* T[g1^-1] H1 U[e]",
        "H1* T[e] H1 U[g1] H1* T[e] H1 U[g1^-1]",
        "H1* T[e] H1 U[e] H1* T[e] H1 U[e] H1* T[e] H1 U[e]",
    ];
    let mut compared = 0;
    for text in rect {
        let Canonical::Rectangular(slots) = mono(text).canonicalize() else {
            return Err(format!("{text} is not rectangular"));
        };
        let symbolic = rectangular_limit_symbolic(&slots).map_err(|e| e.to_string())?;
        for c in [q(1, 1), q(1, 3), q(5, 2), q(7, 11)] {
            let a = rectangular_limit_moment(&slots, &c).map_err(|e| e.to_string())?;
            let b = symbolic.eval_exact(&c);
            if a != b {
                return Err(format!("{text} at c={c}: cumulant sum {a} vs pairing sum {b}"));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "Catalan k ≤ 5; free Poisson n ≤ 6 three ways; {compared} rectangular comparisons equal"
    ))
}

fn finite_rows<'a>(rows: &'a [ReportRow], label: &str, n: usize) -> Result<&'a ReportRow, String> {
    rows.iter()
        .find(|r| r.monomial == label && r.n == Some(n) && r.estimator != Estimator::Limit)
        .filter(|r| r.estimator != Estimator::Error)
        .ok_or_else(|| format!("{label}: no finite-N value at N={n}"))
}

fn criterion_5() -> Outcome {
    let cfg = ExperimentConfig {
        s: GOLDEN_S,
        monomials: GOLDEN_SUITE.iter().map(|s| s.to_string()).collect(),
        sizes: vec![8, 64],
        m_sizes: MSizes::Ratio(1.0),
        perm_samples: 100_000,
        mode: StudyMode::Auto,
        seed: 11,
        ..Default::default()
    };
    let rows = run_convergence_study(&cfg).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for text in GOLDEN_SUITE {
        let label = mono(text).to_string();
        let small = finite_rows(&rows, &label, 8)?;
        let large = finite_rows(&rows, &label, 64)?;
        let (e8, e64) = (small.abs_error_vs_limit.unwrap(), large.abs_error_vs_limit.unwrap());
        let se = small.stderr.unwrap_or(0.0).hypot(large.stderr.unwrap_or(0.0));
        worst = worst.max(e64);
        if e64 > 0.1 || e64 > e8 + 3.0 * se {
            return Err(format!("{text}: error {e64:.3e} at N=64 vs {e8:.3e} at N=8 (stderr {se:.1e})"));
        }
    }
    Ok(format!("largest |value − limit| at N=64 is {worst:.3e}"))
}

fn mc_row<'a>(rows: &'a [ReportRow], label: &str) -> &'a ReportRow {
    rows.iter()
        .find(|r| r.monomial == label && r.estimator == Estimator::Mc)
        .expect("demo row")
}

fn criterion_6() -> Outcome {
    let rows = run_demo(
        "permuted-gue",
        &DemoConfig {
            n: Some(512),
            samples: Some(400),
            seed: 3,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (k, target) in [(1, 1.0), (2, 2.0), (3, 5.0)] {
        let r = mc_row(&rows, &format!("tr((XX*)^{k})"));
        let se = r.stderr.unwrap();
        let err = (r.value.re - target).abs();
        if err > (0.05 * target).max(4.0 * se) {
            return Err(format!("k={k}: {} vs {target} (stderr {se:.1e})", r.value.re));
        }
        parts.push(format!("k={k}: {:.4}", r.value.re));
    }
    Ok(parts.join(", "))
}

fn criterion_7() -> Outcome {
    let rows = run_demo(
        "permuted-wishart",
        &DemoConfig {
            n: Some(256),
            samples: Some(400),
            seed: 5,
            c: 1.0,
        },
    )
    .map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for label in ["tr((YY*)^1)", "tr((YY*)^2)", "tr((YY*)^3)", "tr(Y^2)"] {
        let target = rows
            .iter()
            .find(|r| r.monomial == label && r.estimator == Estimator::Limit)
            .unwrap()
            .value
            .re;
        let r = mc_row(&rows, label);
        let se = r.stderr.unwrap();
        let err = (r.value - target).norm();
        if err > 4.0 * se + 0.05 {
            return Err(format!("{label}: {} vs {target} (stderr {se:.1e})", r.value));
        }
        parts.push(format!("{label} {:.3} vs {target}", r.value.re));
    }
    Ok(parts.join(", "))
}

fn criterion_8() -> Outcome {
    let count = |it: Result<std::vec::IntoIter<Perm>, _>| it.map(|i| i.count()).map_err(|e: permfree::Error| e.to_string());
    for (n, want) in [(1, 1), (2, 2), (3, 5), (4, 14), (5, 42)] {
        if count(enumerate_noncrossing(n))? != want {
            return Err(format!("|NC_{n}| != {want}"));
        }
    }
    for k in 1..=4usize {
        if count(enumerate_nc_pairings(2 * k))? as u64 != catalan(k as u64) {
            return Err(format!("|NC_{}^(2)| != Catalan({k})", 2 * k));
        }
        let dfact: usize = (1..2 * k).step_by(2).product();
        if count(enumerate_pairings(2 * k))? != dfact {
            return Err(format!("|S_{}^(2)| != {dfact}", 2 * k));
        }
    }
    let mut checked = 0usize;
    for n in 1..=7usize {
        let gamma = Perm::gamma(n);
        for tau in enumerate_permutations(n).map_err(|e| e.to_string())? {
            let k = tau.inverse().compose(&gamma).map_err(|e| e.to_string())?;
            if tau.cycle_count() + k.cycle_count() > n + 1 {
                return Err(format!("#τ + #τ⁻¹γ > n+1 for {tau}"));
            }
            checked += 1;
        }
    }
    for total in 2..=7usize {
        for m in 1..total {
            let n = total - m;
            let gamma = Perm::gamma_mn(m, n);
            for tau in enumerate_permutations(total).map_err(|e| e.to_string())? {
                if !tau.is_mn_connected(m, n).map_err(|e| e.to_string())? {
                    continue;
                }
                let k = tau.inverse().compose(&gamma).map_err(|e| e.to_string())?;
                if tau.cycle_count() + k.cycle_count() > total {
                    return Err(format!("#τ + #τ⁻¹γ_(m,n) > m+n for {tau}, m={m}, n={n}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("counts match; {checked} permutations satisfy both inequalities"))
}

fn criterion_9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_permfree");
    let run = |threads: &str| -> Result<String, String> {
        let out = Command::new(bin)
            .env("PERMFREE_THREADS", threads)
            .args([
                "converge",
                "--monomial",
                "G1 U[g1] G1* U[g2]",
                "--monomial",
                "W1 U[g1] W1 U[g1^-1]",
                "--monomial",
                "H1* T[g1] H1 U[g1^-1]",
                "--n",
                "3,12",
                "--mode",
                "sampled",
                "--perm-samples",
                "3000",
                "--samples",
                "700",
                "--with-mc",
                "--seed",
                "42",
            ])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
        // drop the runtime_ms column
        Ok(text
            .lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
            .collect::<Vec<_>>()
            .join("\n"))
    };
    let one = run("1")?;
    let four = run("4")?;
    if one != four {
        return Err("reports differ between 1 and 4 worker threads".into());
    }
    Ok(format!("{} report lines identical with 1 and 4 threads", one.lines().count()))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("oracle equivalence", Duration::from_secs(120), criterion_1),
        ("closed-form exact values", Duration::from_secs(60), criterion_2),
        ("variance decay", Duration::from_secs(300), criterion_3),
        ("limit formulas", Duration::from_secs(30), criterion_4),
        ("convergence", Duration::from_secs(600), criterion_5),
        ("permuted GUE is circular", Duration::from_secs(600), criterion_6),
        ("permuted Wishart predictions", Duration::from_secs(600), criterion_7),
        ("combinatorial counts", Duration::from_secs(60), criterion_8),
        ("determinism", Duration::MAX, criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let tag = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| tag.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > *budget => Err(format!("{detail}; took {took:.1?}, limit {budget:.0?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("{tag} ({name}): PASS [{took:.1?}] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{tag} ({name}): FAIL [{took:.1?}] {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
