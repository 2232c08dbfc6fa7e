use std::time::Instant;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use super::report::{sort_rows, Estimator, ReportRow};
use super::table::{Cell, TableRow};
use super::{elapsed_ms, uses_m, ExperimentConfig, StudyMode};
use crate::error::Result;
use crate::exact::{exact_expectation, exact_mode_feasible, exact_variance, ExactValue, PermMode};
use crate::limit::freeness_prediction;
use crate::monomial::{Canonical, Monomial};
use crate::sim::{mc_estimate, mc_samples};

/// Largest `N` at which the automatic mode still computes variances exactly.
const EXACT_VARIANCE_MAX_N: usize = 8;

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn perm_mode(cfg: &ExperimentConfig, c: &Canonical, n: usize, m: usize) -> PermMode {
    let sampled = PermMode::Sampled {
        samples: cfg.perm_samples,
        seed: cfg.seed,
    };
    match cfg.mode {
        StudyMode::Exact => PermMode::Exact,
        StudyMode::Sampled => sampled,
        StudyMode::Auto if exact_mode_feasible(c, n, m) => PermMode::Exact,
        StudyMode::Auto => sampled,
    }
}

/// The limit row and its exact value at `c = ratio(N, M)`.
pub(crate) fn limit_row(cfg: &ExperimentConfig, mono: &Monomial, n: usize, m: usize) -> (ReportRow, Option<BigRational>) {
    let label = mono.to_string();
    let mcol = uses_m(mono).then_some(m);
    let start = Instant::now();
    match freeness_prediction(&mono.canonicalize()) {
        Ok(l) => {
            let v = l.eval_exact(&cfg.ratio(n, m));
            let mut row = ReportRow::new(label, Some(n), mcol, Estimator::Limit);
            row.value.re = to_f64(&v);
            row.abs_error_vs_limit = Some(0.0);
            row.exact = Some(ratio_string(&v));
            row.runtime_ms = elapsed_ms(start);
            (row, Some(v))
        }
        Err(e) => (ReportRow::failed(label, Some(n), mcol, &e), None),
    }
}

/// The finite-`N` expectation row, exact or with sampled permutation averages.
pub(crate) fn expectation_row(
    cfg: &ExperimentConfig,
    mono: &Monomial,
    n: usize,
    m: usize,
    limit: Option<&BigRational>,
) -> ReportRow {
    let label = mono.to_string();
    let mcol = uses_m(mono).then_some(m);
    let canon = mono.canonicalize();
    let start = Instant::now();
    let moment = match exact_expectation(&canon, n, m, perm_mode(cfg, &canon, n, m)) {
        Ok(em) => em,
        Err(e) => return ReportRow::failed(label, Some(n), mcol, &e),
    };
    let mut row = match &moment.value {
        ExactValue::Rational(r) => {
            let mut row = ReportRow::new(label, Some(n), mcol, Estimator::Exact);
            row.exact = Some(ratio_string(r));
            row.abs_error_vs_limit = limit.map(|l| to_f64(&(r - l).abs()));
            row
        }
        ExactValue::Estimate { stderr, .. } => {
            let mut row = ReportRow::new(label, Some(n), mcol, Estimator::ExactSampled);
            row.stderr = Some(*stderr);
            row.abs_error_vs_limit = limit.map(|l| (moment.value.to_f64() - to_f64(l)).abs());
            row
        }
    };
    row.value.re = moment.value.to_f64();
    row.runtime_ms = elapsed_ms(start);
    row
}

pub(crate) fn mc_row(cfg: &ExperimentConfig, mono: &Monomial, n: usize, m: usize, limit: Option<&BigRational>) -> ReportRow {
    let label = mono.to_string();
    let mcol = uses_m(mono).then_some(m);
    let start = Instant::now();
    match mc_estimate(mono, n, m, cfg.samples, cfg.seed) {
        Ok(est) => {
            let mut row = ReportRow::new(label, Some(n), mcol, Estimator::Mc);
            row.value = est.mean;
            row.stderr = Some(est.stderr);
            row.abs_error_vs_limit = limit.map(|l| (est.mean - to_f64(l)).norm());
            row.runtime_ms = elapsed_ms(start);
            row
        }
        Err(e) => ReportRow::failed(label, Some(n), mcol, &e),
    }
}

fn jobs(cfg: &ExperimentConfig, count: usize) -> Vec<(usize, usize, usize)> {
    let pairs = cfg.size_pairs();
    (0..count)
        .flat_map(|i| pairs.iter().map(move |&(n, m)| (i, n, m)))
        .collect()
}

fn sweep<F>(cfg: &ExperimentConfig, rows_for: F) -> Result<Vec<ReportRow>>
where
    F: Fn(&Monomial, usize, usize) -> Vec<ReportRow> + Sync,
{
    let monos = cfg.validate()?;
    let mut rows: Vec<ReportRow> = jobs(cfg, monos.len())
        .into_par_iter()
        .flat_map_iter(|(i, n, m)| rows_for(&monos[i], n, m))
        .collect();
    sort_rows(&mut rows);
    Ok(rows)
}

/// For each monomial and size: the limit, the finite-`N` expectation and,
/// if requested, a full-matrix Monte Carlo estimate. Failing rows become
/// `error` rows and the sweep continues.
pub fn run_convergence_study(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    sweep(cfg, |mono, n, m| {
        let (limit, value) = limit_row(cfg, mono, n, m);
        let mut out = vec![limit, expectation_row(cfg, mono, n, m, value.as_ref())];
        if cfg.with_mc {
            out.push(mc_row(cfg, mono, n, m, value.as_ref()));
        }
        out
    })
}

/// Limit values only. With `M = c·N` the limit does not depend on `N`, and
/// each monomial gets a single row without sizes.
pub fn run_limits(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let per_size = sweep(cfg, |mono, n, m| vec![limit_row(cfg, mono, n, m).0])?;
    if !matches!(cfg.m_sizes, super::MSizes::Ratio(_)) {
        return Ok(per_size);
    }
    let mut rows: Vec<ReportRow> = per_size
        .into_iter()
        .filter(|r| r.n == Some(cfg.sizes[0]))
        .map(|mut r| {
            r.n = None;
            r.m = None;
            r
        })
        .collect();
    sort_rows(&mut rows);
    Ok(rows)
}

/// Finite-`N` expectations with their distance from the limit.
pub fn run_exact_study(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    sweep(cfg, |mono, n, m| {
        let (_, value) = limit_row(cfg, mono, n, m);
        vec![expectation_row(cfg, mono, n, m, value.as_ref())]
    })
}

/// Full-matrix Monte Carlo estimates with their distance from the limit.
pub fn run_mc_study(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    sweep(cfg, |mono, n, m| {
        let (_, value) = limit_row(cfg, mono, n, m);
        vec![mc_row(cfg, mono, n, m, value.as_ref())]
    })
}

/// One variance measurement: `Var tr α` and `N²·Var tr α`.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceRow {
    pub monomial: String,
    pub n: usize,
    pub m: Option<usize>,
    pub estimator: Estimator,
    pub variance: f64,
    pub n2_variance: f64,
    pub stderr: Option<f64>,
    pub exact: Option<String>,
    pub error: Option<String>,
    pub runtime_ms: f64,
}

impl TableRow for VarianceRow {
    fn header() -> &'static [&'static str] {
        &[
            "monomial",
            "N",
            "M",
            "estimator",
            "variance",
            "n2_variance",
            "stderr",
            "exact",
            "error",
            "runtime_ms",
        ]
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.monomial.clone()),
            Cell::Int(Some(self.n)),
            Cell::Int(self.m),
            Cell::Text(self.estimator.to_string()),
            Cell::Num(Some(self.variance)),
            Cell::Num(Some(self.n2_variance)),
            Cell::Num(self.stderr),
            Cell::Text(self.exact.clone().unwrap_or_default()),
            Cell::Text(self.error.clone().unwrap_or_default()),
            Cell::Millis(self.runtime_ms),
        ]
    }
}

/// Unbiased `E|X − E X|²` and the standard error of that estimate.
fn sample_variance(xs: &[num_complex::Complex64]) -> (f64, f64) {
    let k = xs.len() as f64;
    if xs.len() < 2 {
        return (0.0, f64::NAN);
    }
    let mean = xs.iter().sum::<num_complex::Complex64>() / k;
    let d2: Vec<f64> = xs.iter().map(|x| (x - mean).norm_sqr()).collect();
    let var = d2.iter().sum::<f64>() / (k - 1.0);
    let m4 = d2.iter().map(|d| d * d).sum::<f64>() / k;
    (var, ((m4 - var * var).max(0.0) / k).sqrt())
}

fn variance_row(cfg: &ExperimentConfig, mono: &Monomial, n: usize, m: usize) -> VarianceRow {
    let label = mono.to_string();
    let mcol = uses_m(mono).then_some(m);
    let canon = mono.canonicalize();
    let start = Instant::now();
    let exact = match cfg.mode {
        StudyMode::Exact => true,
        StudyMode::Sampled => false,
        StudyMode::Auto => n <= EXACT_VARIANCE_MAX_N && exact_mode_feasible(&canon, n, m),
    };
    let n2 = (n * n) as f64;
    let mut row = VarianceRow {
        monomial: label,
        n,
        m: mcol,
        estimator: Estimator::Error,
        variance: f64::NAN,
        n2_variance: f64::NAN,
        stderr: None,
        exact: None,
        error: None,
        runtime_ms: 0.0,
    };
    let outcome = if exact {
        exact_variance(mono, n, Some(m)).map(|v| {
            row.estimator = Estimator::Exact;
            row.variance = to_f64(&v);
            row.exact = Some(ratio_string(&v));
        })
    } else {
        mc_samples(mono, n, m, cfg.samples, cfg.seed).map(|xs| {
            let (var, se) = sample_variance(&xs);
            row.estimator = Estimator::Mc;
            row.variance = var;
            row.stderr = Some(se * n2);
        })
    };
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row.n2_variance = row.variance * n2;
    row.runtime_ms = elapsed_ms(start);
    row
}

/// `Var tr α` across sizes: exact at small `N`, Monte Carlo beyond, with
/// `N²·Var` alongside for the `O(1/N²)` decay check. `stderr` refers to
/// the `n2_variance` column.
pub fn run_variance_study(cfg: &ExperimentConfig) -> Result<Vec<VarianceRow>> {
    let monos = cfg.validate()?;
    let mut rows: Vec<VarianceRow> = jobs(cfg, monos.len())
        .into_par_iter()
        .map(|(i, n, m)| variance_row(cfg, &monos[i], n, m))
        .collect();
    rows.sort_by(|a, b| (&a.monomial, a.n).cmp(&(&b.monomial, b.n)));
    Ok(rows)
}
