//! Exact finite-`N` expectations of normalized traces.
//!
//! Every formula has the same skeleton: a sum over admissible `τ` of a size
//! factor times the average, over independent uniform permutations, of
//! `Π_{C ∈ τ⁻¹γ} Fix w_C`. The families differ in which `τ` are admissible
//! and in the size factor:
//!
//! | family      | `τ` ranges over                          | size factor                     |
//! |-------------|------------------------------------------|---------------------------------|
//! | Gaussian    | pairings, `r` matched, `G` with `G*`     | `N^{#τ} / N^{n+t}`              |
//! | Wishart     | all permutations, `r` matched            | `M^{#τ} / N^{n+t}`              |
//! | rectangular | pairings, `r` matched, `H*` with `H`     | `(M+N)^{#τ} / (M+N)^{n+t}`      |
//!
//! with `t` the number of traces (1 for a moment, 2 for a product).

mod kernel;
mod oracle;

use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::monomial::{Block, Canonical, Family, GaussSlot, Monomial, RectSlot, WishartSlot};
use crate::perm::{Perm, ENUMERATION_CAP};
use crate::sim::stats::Accumulator;
use crate::words::FreeWord;

pub use kernel::{exact_feasible, exact_tuple_count, permutation_fix_average, PermAverageSpec, PermMode, EXACT_BUDGET};
pub use oracle::{wick_oracle_moment, wick_oracle_product};

use kernel::{evaluate_terms, exact_fix_averages, TermSpec};

/// An exact rational, or a sampled estimate with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactValue {
    Rational(BigRational),
    Estimate { mean: f64, stderr: f64, samples: u64 },
}

impl ExactValue {
    pub fn zero() -> Self {
        ExactValue::Rational(BigRational::zero())
    }

    pub(crate) fn estimate(a: &Accumulator) -> Self {
        ExactValue::Estimate {
            mean: a.mean(),
            stderr: a.stderr(),
            samples: a.count(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactValue::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            ExactValue::Estimate { mean, .. } => *mean,
        }
    }

    pub fn stderr(&self) -> Option<f64> {
        match self {
            ExactValue::Rational(_) => None,
            ExactValue::Estimate { stderr, .. } => Some(*stderr),
        }
    }

    pub fn rational(&self) -> Option<&BigRational> {
        match self {
            ExactValue::Rational(r) => Some(r),
            ExactValue::Estimate { .. } => None,
        }
    }

    fn scale(&self, k: &BigRational) -> ExactValue {
        match self {
            ExactValue::Rational(r) => ExactValue::Rational(r * k),
            ExactValue::Estimate { mean, stderr, samples } => {
                let k = k.to_f64().unwrap_or(f64::NAN);
                ExactValue::Estimate {
                    mean: mean * k,
                    stderr: stderr * k.abs(),
                    samples: *samples,
                }
            }
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Rational(r) => write!(f, "{r}"),
            ExactValue::Estimate { mean, stderr, .. } => write!(f, "{mean} ± {stderr}"),
        }
    }
}

/// Contribution of one admissible `τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub tau: Perm,
    /// Exponent of `N` in the size factor; of `M+N` for the rectangular family.
    pub power_of_n: i64,
    /// Exponent of `M` (Wishart only).
    pub power_of_m: i64,
    pub perm_average: ExactValue,
    pub contribution: ExactValue,
}

/// An expectation together with its per-`τ` breakdown.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMoment {
    pub value: ExactValue,
    pub terms: Vec<Term>,
}

impl ExactMoment {
    fn zero() -> Self {
        ExactMoment {
            value: ExactValue::zero(),
            terms: Vec::new(),
        }
    }

    /// Writes the term breakdown as CSV.
    pub fn write_terms_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "tau_cycles",
            "power_of_N",
            "power_of_M",
            "perm_average_num",
            "perm_average_den",
            "contribution",
        ])?;
        for t in &self.terms {
            let (num, den) = match &t.perm_average {
                ExactValue::Rational(r) => (r.numer().to_string(), r.denom().to_string()),
                ExactValue::Estimate { mean, .. } => (format!("{mean:.16e}"), String::new()),
            };
            w.write_record([
                t.tau.cycles().to_string(),
                t.power_of_n.to_string(),
                t.power_of_m.to_string(),
                num,
                den,
                t.contribution.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `w_C = w_{a_1} w_{a_2} ... w_{a_p}` for each cycle `C = (a_1, ..., a_p)` of
/// `τ⁻¹γ`, in canonical cycle order. `words[a-1]` is `w_a`.
pub fn word_cycle_products(words: &[FreeWord], tau: &Perm, gamma: &Perm) -> Result<Vec<FreeWord>> {
    Ok(cycle_words(words, tau, gamma)?.into_iter().map(|(_, w)| w).collect())
}

/// Each cycle word together with the cycle's first element.
fn cycle_words(words: &[FreeWord], tau: &Perm, gamma: &Perm) -> Result<Vec<(usize, FreeWord)>> {
    if words.len() != tau.len() {
        return Err(Error::validation(format!(
            "{} words for a permutation of [{}]",
            words.len(),
            tau.len()
        )));
    }
    let pi = tau.inverse().compose(gamma)?;
    Ok(pi
        .cycles()
        .iter()
        .map(|c| {
            let w = c.iter().fold(FreeWord::identity(), |acc, &a| acc.concat(&words[a - 1]));
            (c[0], w)
        })
        .collect())
}

fn check_enumerable(n: usize) -> Result<()> {
    if n > ENUMERATION_CAP {
        return Err(Error::budget(format!("enumeration of S_{n}"), ENUMERATION_CAP));
    }
    Ok(())
}

/// Pairings of `[n]` in lexicographic order with `allowed(a, b)` for every pair.
fn constrained_pairings(n: usize, allowed: &dyn Fn(usize, usize) -> bool) -> Result<Vec<Perm>> {
    check_enumerable(n)?;
    fn rec(images: &mut Vec<u32>, allowed: &dyn Fn(usize, usize) -> bool, out: &mut Vec<Perm>) {
        let Some(a) = images.iter().position(|&v| v == u32::MAX) else {
            out.push(Perm::from_zero_based(images.clone()));
            return;
        };
        for b in a + 1..images.len() {
            if images[b] == u32::MAX && allowed(a + 1, b + 1) {
                images[a] = b as u32;
                images[b] = a as u32;
                rec(images, allowed, out);
                images[a] = u32::MAX;
                images[b] = u32::MAX;
            }
        }
    }
    let mut out = Vec::new();
    if n % 2 == 0 {
        rec(&mut vec![u32::MAX; n], allowed, &mut out);
    }
    out.sort_by(|a, b| a.images0().cmp(b.images0()));
    Ok(out)
}

/// Permutations of `[n]` in lexicographic order with `allowed(a, τ(a))` for all `a`.
fn constrained_permutations(n: usize, allowed: &dyn Fn(usize, usize) -> bool) -> Result<Vec<Perm>> {
    check_enumerable(n)?;
    fn rec(
        a: usize,
        images: &mut Vec<u32>,
        used: &mut Vec<bool>,
        allowed: &dyn Fn(usize, usize) -> bool,
        out: &mut Vec<Perm>,
    ) {
        if a == images.len() {
            out.push(Perm::from_zero_based(images.clone()));
            return;
        }
        for b in 0..images.len() {
            if !used[b] && allowed(a + 1, b + 1) {
                used[b] = true;
                images[a] = b as u32;
                rec(a + 1, images, used, allowed, out);
                used[b] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, &mut vec![0; n], &mut vec![false; n], allowed, &mut out);
    Ok(out)
}

fn gamma_for(lengths: &[usize]) -> Perm {
    match lengths {
        [n] => Perm::gamma(*n),
        [m, n] => Perm::gamma_mn(*m, *n),
        _ => unreachable!("one or two traces"),
    }
}

fn pow_ratio(base: usize, exp: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(base));
    if exp >= 0 {
        num_traits::pow(b, exp as usize)
    } else {
        num_traits::pow(b.recip(), (-exp) as usize)
    }
}

/// Shared tail: cycle words, size factors, averaging, breakdown.
struct Plan {
    taus: Vec<Perm>,
    terms: Vec<TermSpec>,
    powers: Vec<(i64, i64)>,
}

fn run_plan(plan: Plan, n: usize, m: usize, mode: PermMode) -> Result<ExactMoment> {
    let (value, values) = evaluate_terms(&plan.terms, n, m, mode)?;
    let terms = plan
        .taus
        .into_iter()
        .zip(plan.powers)
        .zip(values)
        .map(|((tau, (pn, pm)), v)| Term {
            tau,
            power_of_n: pn,
            power_of_m: pm,
            perm_average: v.average,
            contribution: v.contribution,
        })
        .collect();
    Ok(ExactMoment { value, terms })
}

fn gaussian_plan(traces: &[&[GaussSlot]], n: usize) -> Result<Option<Plan>> {
    let slots: Vec<&GaussSlot> = traces.iter().flat_map(|t| t.iter()).collect();
    let len = slots.len();
    let stars = slots.iter().filter(|s| s.star).count();
    if len % 2 == 1 || 2 * stars != len {
        return Ok(None);
    }
    let words: Vec<FreeWord> = slots.iter().map(|s| s.word.clone()).collect();
    let gamma = gamma_for(&traces.iter().map(|t| t.len()).collect::<Vec<_>>());
    let allowed = |a: usize, b: usize| slots[a - 1].r == slots[b - 1].r && slots[a - 1].star != slots[b - 1].star;
    let taus = constrained_pairings(len, &allowed)?;
    let base = (len + traces.len()) as i64;
    let mut terms = Vec::new();
    let mut powers = Vec::new();
    for tau in &taus {
        let p = tau.cycle_count() as i64 - base;
        terms.push(TermSpec {
            coeff: pow_ratio(n, p),
            n_words: word_cycle_products(&words, tau, &gamma)?,
            m_words: Vec::new(),
        });
        powers.push((p, 0));
    }
    Ok(Some(Plan { taus, terms, powers }))
}

fn wishart_plan(traces: &[&[WishartSlot]], n: usize, m: usize) -> Result<Plan> {
    let slots: Vec<&WishartSlot> = traces.iter().flat_map(|t| t.iter()).collect();
    let len = slots.len();
    let words: Vec<FreeWord> = slots.iter().map(|s| s.word.clone()).collect();
    let gamma = gamma_for(&traces.iter().map(|t| t.len()).collect::<Vec<_>>());
    let allowed = |a: usize, b: usize| slots[a - 1].r == slots[b - 1].r;
    let taus = constrained_permutations(len, &allowed)?;
    let pn = -((len + traces.len()) as i64);
    let mut terms = Vec::new();
    let mut powers = Vec::new();
    for tau in &taus {
        let pm = tau.cycle_count() as i64;
        terms.push(TermSpec {
            coeff: pow_ratio(m, pm) * pow_ratio(n, pn),
            n_words: word_cycle_products(&words, tau, &gamma)?,
            m_words: Vec::new(),
        });
        powers.push((pn, pm));
    }
    Ok(Plan { taus, terms, powers })
}

fn rectangular_plan(traces: &[&[RectSlot]], n: usize, m: usize) -> Result<Plan> {
    let slots: Vec<&RectSlot> = traces.iter().flat_map(|t| t.iter()).collect();
    let len = slots.len();
    for t in traces {
        if t.is_empty() || t.len() % 2 == 1 {
            return Err(Error::validation("rectangular alternating form needs an even number of H factors"));
        }
    }
    let words: Vec<FreeWord> = slots.iter().map(|s| s.word.clone()).collect();
    let gamma = gamma_for(&traces.iter().map(|t| t.len()).collect::<Vec<_>>());
    // odd positions hold H*, even positions H
    let allowed = |a: usize, b: usize| slots[a - 1].r == slots[b - 1].r && (a + b) % 2 == 1;
    let taus = constrained_pairings(len, &allowed)?;
    let base = (len + traces.len()) as i64;
    let mut terms = Vec::new();
    let mut powers = Vec::new();
    for tau in &taus {
        let p = tau.cycle_count() as i64 - base;
        let mut m_words = Vec::new();
        let mut n_words = Vec::new();
        for (first, w) in cycle_words(&words, tau, &gamma)? {
            if first % 2 == 1 {
                m_words.push(w);
            } else {
                n_words.push(w);
            }
        }
        terms.push(TermSpec {
            coeff: pow_ratio(m + n, p),
            n_words,
            m_words,
        });
        powers.push((p, 0));
    }
    Ok(Plan { taus, terms, powers })
}

fn expect_family(m: &Monomial, family: Family) -> Result<Canonical> {
    if m.family() != family {
        return Err(Error::validation(format!("{m} is not in the {family:?} family")));
    }
    Ok(m.canonicalize())
}

/// `E tr^{(N)}` of a monomial in `G_r`, `G_r*` and `U_w`.
pub fn exact_moment_gaussian(m: &Monomial, n: usize, mode: PermMode) -> Result<ExactMoment> {
    match expect_family(m, Family::Square)? {
        Canonical::Gaussian(slots) => gaussian_expectation(&[&slots], n, mode),
        Canonical::Zero => Ok(ExactMoment::zero()),
        other => Err(Error::validation(format!("{other} has no Gaussian factor"))),
    }
}

/// `E tr^{(N)}` of a monomial in `W_r` and `U_w`, with `W_r` built from `M×N` Gaussians.
pub fn exact_moment_wishart(m: &Monomial, msize: usize, n: usize, mode: PermMode) -> Result<ExactMoment> {
    match expect_family(m, Family::Square)? {
        Canonical::Wishart(slots) => run_plan(wishart_plan(&[&slots], n, msize)?, n, msize, mode),
        other => Err(Error::validation(format!("{other} has no Wishart factor"))),
    }
}

/// `E tr^{(M+N)}` of a rectangular-family monomial.
pub fn exact_rectangular_moment(m: &Monomial, msize: usize, n: usize, mode: PermMode) -> Result<ExactMoment> {
    let c = expect_family(m, Family::Rectangular)?;
    exact_expectation(&c, n, msize, mode)
}

fn gaussian_expectation(traces: &[&[GaussSlot]], n: usize, mode: PermMode) -> Result<ExactMoment> {
    match gaussian_plan(traces, n)? {
        Some(plan) => run_plan(plan, n, n, mode),
        None => Ok(ExactMoment::zero()),
    }
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::validation("matrix sizes must be positive"));
    }
    Ok(())
}

/// `E tr` of any canonical monomial: the Gaussian, Wishart and rectangular
/// formulas, plus pure permutation words. `m` is ignored by the Gaussian and
/// pure-`U` square cases.
pub fn exact_expectation(c: &Canonical, n: usize, m: usize, mode: PermMode) -> Result<ExactMoment> {
    check_sizes(n, m)?;
    match c {
        Canonical::Gaussian(slots) => gaussian_expectation(&[slots], n, mode),
        Canonical::Wishart(slots) => run_plan(wishart_plan(&[slots], n, m)?, n, m, mode),
        Canonical::Rectangular(slots) => run_plan(rectangular_plan(&[slots], n, m)?, n, m, mode),
        Canonical::PureU(w) => Ok(ExactMoment {
            value: pure_word_moment(w, n, n, mode)?,
            terms: Vec::new(),
        }),
        Canonical::RectPure { block, word } => {
            let k = match block {
                Block::T => m,
                Block::U => n,
            };
            Ok(ExactMoment {
                value: pure_word_moment(word, k, m + n, mode)?,
                terms: Vec::new(),
            })
        }
        Canonical::Zero => Ok(ExactMoment::zero()),
    }
}

/// `E Fix w / dim` over `S_k`.
fn pure_word_moment(w: &FreeWord, k: usize, dim: usize, mode: PermMode) -> Result<ExactValue> {
    let avg = permutation_fix_average(&PermAverageSpec {
        words: vec![w.clone()],
        n: k,
        mode,
    })?;
    Ok(avg.scale(&BigRational::new(1.into(), dim.into())))
}

/// `E tr^{(N)} U_w = E Fix w / N`.
pub fn pure_u_moment(w: &FreeWord, n: usize, mode: PermMode) -> Result<ExactValue> {
    check_sizes(n, n)?;
    pure_word_moment(w, n, n, mode)
}

/// `Var tr^{(N)} U_w = (E Fix(w)² − (E Fix w)²) / N²`.
pub fn pure_u_variance(w: &FreeWord, n: usize) -> Result<BigRational> {
    check_sizes(n, n)?;
    pure_word_variance(w, n, n)
}

fn pure_word_variance(w: &FreeWord, k: usize, dim: usize) -> Result<BigRational> {
    let avgs = exact_fix_averages(k, &[vec![w.clone(), w.clone()], vec![w.clone()]])?;
    let d2 = BigRational::from_integer(BigInt::from(dim * dim));
    Ok((&avgs[0] - &avgs[1] * &avgs[1]) / d2)
}

fn pure_shape_error(c: &Canonical) -> Error {
    Error::Unsupported(format!(
        "{c} is a pure permutation word; the product formula needs Gaussian, Wishart or H factors (use pure_u_variance)"
    ))
}

fn require_m(m: Option<usize>) -> Result<usize> {
    m.ok_or_else(|| Error::validation("this family needs the size M"))
}

/// `E[tr α · tr β]` over `S_{m+n}` pairings (Gaussian, rectangular) or
/// permutations (Wishart) with `γ_{m,n}` in place of `γ_n`.
pub fn exact_product_expectation(
    a: &Monomial,
    b: &Monomial,
    n: usize,
    msize: Option<usize>,
    mode: PermMode,
) -> Result<ExactMoment> {
    let (ca, cb) = (a.canonicalize(), b.canonicalize());
    if ca == Canonical::Zero || cb == Canonical::Zero {
        return Ok(ExactMoment::zero());
    }
    match (&ca, &cb) {
        (Canonical::Gaussian(x), Canonical::Gaussian(y)) => gaussian_expectation(&[x, y], n, mode),
        (Canonical::Wishart(x), Canonical::Wishart(y)) => {
            let m = require_m(msize)?;
            check_sizes(n, m)?;
            run_plan(wishart_plan(&[x, y], n, m)?, n, m, mode)
        }
        (Canonical::Rectangular(_), Canonical::Rectangular(_)) => {
            exact_rectangular_product_expectation(a, b, require_m(msize)?, n, mode)
        }
        _ => Err(product_shape_error(&ca, &cb)),
    }
}

fn product_shape_error(a: &Canonical, b: &Canonical) -> Error {
    match (a, b) {
        (Canonical::PureU(_) | Canonical::RectPure { .. }, _) => pure_shape_error(a),
        (_, Canonical::PureU(_) | Canonical::RectPure { .. }) => pure_shape_error(b),
        _ => Error::Unsupported(format!("no product formula for {a} with {b}")),
    }
}

/// `E[tr^{(M+N)} α · tr^{(M+N)} β]` for two rectangular alternating monomials.
pub fn exact_rectangular_product_expectation(
    a: &Monomial,
    b: &Monomial,
    msize: usize,
    n: usize,
    mode: PermMode,
) -> Result<ExactMoment> {
    check_sizes(n, msize)?;
    let (ca, cb) = (a.canonicalize(), b.canonicalize());
    match (&ca, &cb) {
        (Canonical::Zero, _) | (_, Canonical::Zero) => Ok(ExactMoment::zero()),
        (Canonical::Rectangular(x), Canonical::Rectangular(y)) => {
            run_plan(rectangular_plan(&[x, y], n, msize)?, n, msize, mode)
        }
        _ => Err(Error::Unsupported(format!("{ca} and {cb} are not both rectangular alternating forms"))),
    }
}

/// Exact covariance `E[tr α tr β] − E tr α · E tr β`, split into the sum over
/// connected `τ` and the sum over split `τ = τ_1 ⊔ τ_2` of
/// `size factor · (avg(joint) − avg(α part) · avg(β part))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covariance {
    pub value: BigRational,
    pub connected: BigRational,
    pub split: BigRational,
}

pub fn exact_covariance(a: &Monomial, b: &Monomial, n: usize, msize: Option<usize>) -> Result<Covariance> {
    let (ca, cb) = (a.canonicalize(), b.canonicalize());
    if ca == Canonical::Zero || cb == Canonical::Zero {
        let z = BigRational::zero();
        return Ok(Covariance {
            value: z.clone(),
            connected: z.clone(),
            split: z,
        });
    }
    let (plan, la, m) = match (&ca, &cb) {
        (Canonical::Gaussian(x), Canonical::Gaussian(y)) => match gaussian_plan(&[x, y], n)? {
            Some(plan) => (plan, x.len(), n),
            None => {
                // an odd or unbalanced product; the covariance is 0 − E α E β
                let ea = gaussian_expectation(&[x], n, PermMode::Exact)?;
                let eb = gaussian_expectation(&[y], n, PermMode::Exact)?;
                let v = -(ea.value.rational().unwrap() * eb.value.rational().unwrap());
                return Ok(Covariance {
                    value: v.clone(),
                    connected: BigRational::zero(),
                    split: v,
                });
            }
        },
        (Canonical::Wishart(x), Canonical::Wishart(y)) => {
            let m = require_m(msize)?;
            (wishart_plan(&[x, y], n, m)?, x.len(), m)
        }
        (Canonical::Rectangular(x), Canonical::Rectangular(y)) => {
            let m = require_m(msize)?;
            (rectangular_plan(&[x, y], n, m)?, x.len(), m)
        }
        _ => return Err(product_shape_error(&ca, &cb)),
    };
    check_sizes(n, m)?;
    let total = plan.taus.first().map_or(0, Perm::len);
    let lb = total - la;
    let mut connected_idx = Vec::new();
    let mut split_idx = Vec::new();
    for (i, tau) in plan.taus.iter().enumerate() {
        if tau.is_mn_connected(la, lb)? {
            connected_idx.push(i);
        } else {
            split_idx.push(i);
        }
    }
    let all_words = plan_words(&ca, &cb);
    let rect = matches!(ca, Canonical::Rectangular(_));
    let mut n_products: Vec<Vec<FreeWord>> = Vec::new();
    let mut m_products: Vec<Vec<FreeWord>> = Vec::new();
    for t in &plan.terms {
        n_products.push(t.n_words.clone());
        m_products.push(t.m_words.clone());
    }
    let mut split_parts = Vec::new();
    for &i in &split_idx {
        let [pa, pb] = split_words(&all_words, &plan.taus[i], la, lb, rect)?;
        split_parts.push((n_products.len(), m_products.len()));
        n_products.push(pa.0);
        m_products.push(pa.1);
        n_products.push(pb.0);
        m_products.push(pb.1);
    }
    let n_avg = exact_fix_averages(n, &n_products)?;
    let m_avg = if m_products.iter().all(Vec::is_empty) {
        vec![BigRational::one(); m_products.len()]
    } else {
        exact_fix_averages(m, &m_products)?
    };
    let avg = |i: usize| &n_avg[i] * &m_avg[i];
    let mut connected = BigRational::zero();
    for &i in &connected_idx {
        connected += &plan.terms[i].coeff * avg(i);
    }
    let mut split = BigRational::zero();
    for (&i, &(j, _)) in split_idx.iter().zip(&split_parts) {
        split += &plan.terms[i].coeff * (avg(i) - avg(j) * avg(j + 1));
    }
    Ok(Covariance {
        value: &connected + &split,
        connected,
        split,
    })
}

/// Cycle words of a split `τ`, grouped as `[(α, N side, M side), (β, ...)]`.
fn split_words(
    words: &[FreeWord],
    tau: &Perm,
    la: usize,
    lb: usize,
    rect: bool,
) -> Result<[(Vec<FreeWord>, Vec<FreeWord>); 2]> {
    let mut parts: [(Vec<FreeWord>, Vec<FreeWord>); 2] = Default::default();
    for (first, w) in cycle_words(words, tau, &Perm::gamma_mn(la, lb))? {
        let side = usize::from(first > la);
        if rect && first % 2 == 1 {
            parts[side].1.push(w);
        } else {
            parts[side].0.push(w);
        }
    }
    Ok(parts)
}

fn plan_words(a: &Canonical, b: &Canonical) -> Vec<FreeWord> {
    let mut w = a.words();
    w.extend(b.words());
    w
}

/// `Var tr α = E[tr α · tr α*] − E tr α · E tr α*`, exactly.
pub fn exact_variance(m: &Monomial, n: usize, msize: Option<usize>) -> Result<BigRational> {
    match m.canonicalize() {
        Canonical::PureU(w) => pure_u_variance(&w, n),
        Canonical::RectPure { block, word } => {
            let msize = require_m(msize)?;
            check_sizes(n, msize)?;
            let k = if block == Block::T { msize } else { n };
            pure_word_variance(&word, k, msize + n)
        }
        Canonical::Zero => Ok(BigRational::zero()),
        _ => Ok(exact_covariance(m, &m.adjoint(), n, msize)?.value),
    }
}

/// Whether the permutation part of this canonical monomial fits the exact
/// budget at the given sizes.
pub fn exact_mode_feasible(c: &Canonical, n: usize, m: usize) -> bool {
    let words = c.words();
    let mut n_gens: Vec<u32> = Vec::new();
    let mut m_gens: Vec<u32> = Vec::new();
    match c {
        Canonical::Rectangular(_) => {
            for (i, w) in words.iter().enumerate() {
                if i % 2 == 0 {
                    m_gens.extend(w.generators());
                } else {
                    n_gens.extend(w.generators());
                }
            }
        }
        Canonical::RectPure { block: Block::T, word } => m_gens.extend(word.generators()),
        _ => n_gens.extend(words.iter().flat_map(FreeWord::generators)),
    }
    for g in [&mut n_gens, &mut m_gens] {
        g.sort_unstable();
        g.dedup();
    }
    exact_tuple_count(n, n_gens.len()).is_ok() && exact_tuple_count(m, m_gens.len()).is_ok()
}

/// Absolute value helper for diagnostics.
pub fn abs_diff(a: &BigRational, b: &BigRational) -> BigRational {
    (a - b).abs()
}
