//! Experiment orchestration: convergence and variance studies, demos,
//! the permutation boundedness probe, and report output.

mod demo;
mod probe;
pub mod report;
mod studies;
pub mod table;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::FromPrimitive;

use crate::error::{Error, Result};
use crate::monomial::{Factor, Family, Monomial};

pub use demo::{run_demo, DemoConfig, DEMOS};
pub use probe::{run_boundedness_probe, ProbeConfig, ProbeRow};
pub use report::{emit_report, sort_rows, Estimator, Format, ReportRow};
pub use studies::{run_convergence_study, run_exact_study, run_limits, run_mc_study, run_variance_study, VarianceRow};
pub use table::{emit_table, write_table, Cell, TableRow};

/// Test monomials used across the cross-checks, with `s = 2`.
pub const GOLDEN_SUITE: &[&str] = &[
    "G1 U[e] G1* U[e]",
    "G1 U[g1] G1* U[g1^-1]",
    "G1 U[g1] G1* U[g2]",
    "G1 U[e] G2* U[e]",
    "G1 U[g1.g2] G1* U[g2^-1.g1^-1]",
    "G1 U[g1] G1 U[g1]",
    "W1",
    "W1 U[e] W1 U[e]",
    "W1 U[g1] W1 U[g1^-1]",
    "W1 U[g1] W2 U[g2]",
    "W1 W1 W1",
    "H1* T[e] H1 U[e]",
    "H1* T[g1] H1 U[g1^-1]",
    "H1* T[e] H1 U[g2]",
    "U[g1]",
    "U[g1^2]",
    "U[g1.g2]",
];

/// `s` used by [`GOLDEN_SUITE`].
pub const GOLDEN_S: usize = 2;

/// Parses a monomial with `s` generator families and rejects shapes no
/// formula covers, such as Gaussian and Wishart factors in one product.
pub fn parse_monomial(text: &str, s: usize) -> Result<Monomial> {
    let m = Monomial::parse(text, s)?;
    let gauss = m.factors().iter().any(|f| matches!(f, Factor::Gauss { .. }));
    let wishart = m.factors().iter().any(|f| matches!(f, Factor::Wishart { .. }));
    if gauss && wishart {
        return Err(Error::Unsupported("mixed Gauss/Wishart monomials".into()));
    }
    Ok(m)
}

/// How finite-`N` expectations are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StudyMode {
    /// Exhaustive permutation averages; rows over budget become error rows.
    Exact,
    /// Permutation averages from sampled tuples.
    Sampled,
    /// Exact when within budget, sampled otherwise.
    #[default]
    Auto,
}

impl std::str::FromStr for StudyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(StudyMode::Exact),
            "sampled" => Ok(StudyMode::Sampled),
            "auto" => Ok(StudyMode::Auto),
            _ => Err(Error::validation(format!("unknown mode {s:?}; expected exact, sampled or auto"))),
        }
    }
}

/// How `M` follows `N`.
#[derive(Clone, Debug, PartialEq)]
pub enum MSizes {
    /// One `M` per entry of `sizes`.
    Explicit(Vec<usize>),
    /// `M = round(c·N)`, at least 1.
    Ratio(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub s: usize,
    pub monomials: Vec<String>,
    pub sizes: Vec<usize>,
    pub m_sizes: MSizes,
    /// Samples for full-matrix Monte Carlo.
    pub samples: u64,
    /// Tuples for sampled permutation averages.
    pub perm_samples: u64,
    pub seed: u64,
    pub mode: StudyMode,
    /// Also run full-matrix Monte Carlo in convergence studies.
    pub with_mc: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            s: 2,
            monomials: Vec::new(),
            sizes: vec![2, 4, 6],
            m_sizes: MSizes::Ratio(1.0),
            samples: 1000,
            perm_samples: 100_000,
            seed: 0,
            mode: StudyMode::Auto,
            with_mc: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<Vec<Monomial>> {
        if self.s == 0 {
            return Err(Error::validation("s must be at least 1"));
        }
        if self.sizes.is_empty() || self.sizes[0] == 0 {
            return Err(Error::validation("sizes must be positive"));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("sizes must be strictly increasing"));
        }
        match &self.m_sizes {
            MSizes::Explicit(ms) if ms.len() != self.sizes.len() => {
                return Err(Error::validation("give one M per N"));
            }
            MSizes::Explicit(ms) if ms.contains(&0) => return Err(Error::validation("M must be positive")),
            MSizes::Ratio(c) if !(c.is_finite() && *c > 0.0) => {
                return Err(Error::validation("c must be a positive number"));
            }
            _ => {}
        }
        if self.samples < 1 || self.perm_samples < 1 {
            return Err(Error::validation("sample counts must be at least 1"));
        }
        self.monomials.iter().map(|t| parse_monomial(t, self.s)).collect()
    }

    /// `(N, M)` pairs in order.
    pub fn size_pairs(&self) -> Vec<(usize, usize)> {
        self.sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let m = match &self.m_sizes {
                    MSizes::Explicit(ms) => ms[i],
                    MSizes::Ratio(c) => ((c * n as f64).round() as usize).max(1),
                };
                (n, m)
            })
            .collect()
    }

    /// The ratio the limit is taken at for the row `(N, M)`.
    pub(crate) fn ratio(&self, n: usize, m: usize) -> BigRational {
        match &self.m_sizes {
            MSizes::Ratio(c) => BigRational::from_f64(*c).unwrap_or_else(|| BigRational::from_integer(1.into())),
            MSizes::Explicit(_) => BigRational::new(BigInt::from(m), BigInt::from(n)),
        }
    }
}

/// Whether reports carry an `M` column for this monomial.
pub(crate) fn uses_m(m: &Monomial) -> bool {
    m.family() == Family::Rectangular || m.factors().iter().any(|f| matches!(f, Factor::Wishart { .. }))
}

pub(crate) fn elapsed_ms(start: std::time::Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
