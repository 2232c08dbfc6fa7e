use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};

use super::report::{sort_rows, Estimator, ReportRow};
use super::{elapsed_ms, parse_monomial};
use crate::error::{Error, Result};
use crate::limit::freeness_prediction;
use crate::perm::Perm;
use crate::sim::stats::{chunked, Accumulator};
use crate::sim::{build_ensemble, ComplexMatrix, ModelTags};

pub const DEMOS: &[&str] = &["permuted-gue", "permuted-wishart", "diagonal-obstruction"];

#[derive(Clone, Debug, PartialEq)]
pub struct DemoConfig {
    /// Matrix size; each demo has its own default.
    pub n: Option<usize>,
    /// Draws; each demo has its own default.
    pub samples: Option<u64>,
    pub seed: u64,
    /// `M/N` for the Wishart demo.
    pub c: f64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            n: None,
            samples: None,
            seed: 0,
            c: 1.0,
        }
    }
}

/// Runs one of [`DEMOS`].
pub fn run_demo(name: &str, cfg: &DemoConfig) -> Result<Vec<ReportRow>> {
    let mut rows = match name {
        "permuted-gue" => permuted_gue(cfg.n.unwrap_or(512), cfg.samples.unwrap_or(400), cfg.seed)?,
        "permuted-wishart" => permuted_wishart(cfg.n.unwrap_or(256), cfg.c, cfg.samples.unwrap_or(400), cfg.seed)?,
        "diagonal-obstruction" => diagonal_obstruction(cfg.n.unwrap_or(32), cfg.samples.unwrap_or(100), cfg.seed)?,
        _ => {
            return Err(Error::validation(format!(
                "unknown demo {name:?}; expected one of {}",
                DEMOS.join(", ")
            )))
        }
    };
    sort_rows(&mut rows);
    Ok(rows)
}

fn check(n: usize, samples: u64) -> Result<()> {
    if n == 0 || samples == 0 {
        return Err(Error::validation("demo size and sample count must be positive"));
    }
    Ok(())
}

/// Runs `f` on every draw and averages each returned statistic.
fn average<F>(samples: u64, stats: usize, f: F) -> Result<Vec<(Accumulator, Accumulator)>>
where
    F: Fn(u64) -> Result<Vec<Complex64>> + Sync,
{
    let parts = chunked(samples, |range| -> Result<Vec<(Accumulator, Accumulator)>> {
        let mut acc = vec![(Accumulator::default(), Accumulator::default()); stats];
        for i in range {
            for (a, v) in acc.iter_mut().zip(f(i)?) {
                a.0.push(v.re);
                a.1.push(v.im);
            }
        }
        Ok(acc)
    });
    let mut total = vec![(Accumulator::default(), Accumulator::default()); stats];
    for p in parts {
        for (t, a) in total.iter_mut().zip(p?) {
            t.0.merge(&a.0);
            t.1.merge(&a.1);
        }
    }
    Ok(total)
}

fn rows_for(
    labels: &[String],
    targets: &[f64],
    acc: &[(Accumulator, Accumulator)],
    n: usize,
    m: Option<usize>,
    ms: f64,
) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for ((label, &target), (re, im)) in labels.iter().zip(targets).zip(acc) {
        let mut limit = ReportRow::new(label.clone(), Some(n), m, Estimator::Limit);
        limit.value.re = target;
        limit.abs_error_vs_limit = Some(0.0);
        rows.push(limit);
        let mut mc = ReportRow::new(label.clone(), Some(n), m, Estimator::Mc);
        mc.value = Complex64::new(re.mean(), im.mean());
        mc.stderr = Some((re.variance() + im.variance()).sqrt() / (re.count() as f64).sqrt());
        mc.abs_error_vs_limit = Some((mc.value - target).norm());
        mc.runtime_ms = ms;
        rows.push(mc);
    }
    rows
}

/// `tr((XX*)^k)` for `X = U·(G + G*)/√2`, compared with the Catalan numbers.
fn permuted_gue(n: usize, samples: u64, seed: u64) -> Result<Vec<ReportRow>> {
    check(n, samples)?;
    let start = Instant::now();
    let tags = ModelTags::GAUSS.union(ModelTags::PERM);
    let nf = n as f64;
    let acc = average(samples, 3, |i| {
        let e = build_ensemble(n, n, 1, tags, seed, i)?;
        let g = &e.gauss[0];
        let h = g.add(&g.adjoint())?.scale(std::f64::consts::FRAC_1_SQRT_2);
        let x = h.permute_rows(&e.sigmas[0])?;
        let y = x.gram();
        let y2 = y.gram();
        Ok(vec![y.trace() / nf, y2.trace() / nf, y2.trace_of_product(&y)? / nf])
    })?;
    let labels: Vec<String> = (1..=3).map(|k| format!("tr((XX*)^{k})")).collect();
    Ok(rows_for(&labels, &[1.0, 2.0, 5.0], &acc, n, None, elapsed_ms(start)))
}

/// The monomial whose limit predicts `tr((YY*)^k)` for `Y = U·W`.
fn alternating_monomial(k: usize) -> String {
    vec!["U[g1] W1 W1 U[g1^-1]"; k].join(" ")
}

/// `*`-moments of `Y = U·W`, compared with the freeness predictions.
fn permuted_wishart(n: usize, c: f64, samples: u64, seed: u64) -> Result<Vec<ReportRow>> {
    check(n, samples)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::validation("c must be a positive number"));
    }
    let m = ((c * n as f64).round() as usize).max(1);
    let ratio = BigRational::from_f64(c).ok_or_else(|| Error::validation("c is not representable"))?;
    let start = Instant::now();
    let mut labels = Vec::new();
    let mut targets = Vec::new();
    let mut sources: Vec<String> = (1..=3).map(alternating_monomial).collect();
    sources.push("U[g1] W1 U[g1] W1".into());
    for (j, src) in sources.iter().enumerate() {
        let canon = parse_monomial(src, 1)?.canonicalize();
        let v = freeness_prediction(&canon)?.eval_exact(&ratio);
        targets.push(v.to_f64().unwrap_or(f64::NAN));
        labels.push(if j < 3 {
            format!("tr((YY*)^{})", j + 1)
        } else {
            "tr(Y^2)".into()
        });
    }
    let tags = ModelTags::WISHART.union(ModelTags::PERM);
    let nf = n as f64;
    let acc = average(samples, 4, |i| {
        let e = build_ensemble(n, m, 1, tags, seed, i)?;
        let y = e.wishart[0].permute_rows(&e.sigmas[0])?;
        let yy = y.gram();
        let yy2 = yy.gram();
        Ok(vec![
            yy.trace() / nf,
            yy2.trace() / nf,
            yy2.trace_of_product(&yy)? / nf,
            y.trace_of_product(&y)? / nf,
        ])
    })?;
    Ok(rows_for(&labels, &targets, &acc, n, Some(m), elapsed_ms(start)))
}

/// Largest entry of `U*DUD − DU*DU` over sampled permutation matrices `U`
/// and the fixed diagonal `D = diag(1, ..., N)/N`.
fn diagonal_obstruction(n: usize, samples: u64, seed: u64) -> Result<Vec<ReportRow>> {
    check(n, samples)?;
    let start = Instant::now();
    let d = ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::new(if i == j { (i + 1) as f64 / n as f64 } else { 0.0 }, 0.0)
    });
    let parts = chunked(samples, |range| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in range {
            let e = build_ensemble(n, n, 1, ModelTags::PERM, seed, i)?;
            let u: &Perm = &e.sigmas[0];
            let um = ComplexMatrix::from_perm(u);
            let ua = um.adjoint();
            let lhs = ua.mul(&d)?.mul(&um)?.mul(&d)?;
            let rhs = d.mul(&ua)?.mul(&d)?.mul(&um)?;
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
        Ok(worst)
    });
    let mut worst: f64 = 0.0;
    for p in parts {
        worst = worst.max(p?);
    }
    let label = "max|U*DUD - DU*DU|";
    let mut limit = ReportRow::new(label, Some(n), None, Estimator::Limit);
    limit.abs_error_vs_limit = Some(0.0);
    let mut row = ReportRow::new(label, Some(n), None, Estimator::Exact);
    row.value.re = worst;
    row.abs_error_vs_limit = Some(worst);
    row.runtime_ms = elapsed_ms(start);
    Ok(vec![limit, row])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get<'a>(rows: &'a [ReportRow], label: &str, est: Estimator) -> &'a ReportRow {
        rows.iter().find(|r| r.monomial == label && r.estimator == est).unwrap()
    }

    #[test]
    fn wishart_predictions() {
        let rows = run_demo(
            "permuted-wishart",
            &DemoConfig {
                n: Some(8),
                samples: Some(4),
                ..Default::default()
            },
        )
        .unwrap();
        let targets: Vec<f64> = ["tr((YY*)^1)", "tr((YY*)^2)", "tr((YY*)^3)", "tr(Y^2)"]
            .iter()
            .map(|l| get(&rows, l, Estimator::Limit).value.re)
            .collect();
        assert_eq!(targets, vec![2.0, 14.0, 132.0, 0.0]);
    }

    #[test]
    fn obstruction_is_exact() {
        let rows = run_demo("diagonal-obstruction", &DemoConfig::default()).unwrap();
        assert!(get(&rows, "max|U*DUD - DU*DU|", Estimator::Exact).value.re <= 1e-12);
    }

    #[test]
    fn small_gue_is_reasonable() {
        let rows = run_demo(
            "permuted-gue",
            &DemoConfig {
                n: Some(32),
                samples: Some(50),
                ..Default::default()
            },
        )
        .unwrap();
        let r = get(&rows, "tr((XX*)^1)", Estimator::Mc);
        assert!((r.value.re - 1.0).abs() < 0.05);
        assert!(run_demo("nope", &DemoConfig::default()).is_err());
    }
}
