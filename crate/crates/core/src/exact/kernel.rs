//! Averages of products of fixed-point counts over independent uniform
//! permutation tuples, exactly by enumeration or by sampling.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{next_permutation, unrank_lex, ENUMERATION_CAP};
use crate::sim::rng::{self, Role};
use crate::sim::stats::{chunked, Accumulator};
use crate::words::FreeWord;

use super::ExactValue;

/// Largest number of permutation tuples exact mode will enumerate.
pub const EXACT_BUDGET: u128 = 10_000_000;

/// How permutation averages are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermMode {
    Exact,
    Sampled { samples: u64, seed: u64 },
}

/// One average `E Π_{w ∈ words} Fix w(σ_1, ..., σ_s)` over `σ_r ∈ S_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermAverageSpec {
    pub words: Vec<FreeWord>,
    pub n: usize,
    pub mode: PermMode,
}

/// `(1/(n!)^{s'}) Σ Π Fix`, with `s'` the number of generators that occur.
pub fn permutation_fix_average(spec: &PermAverageSpec) -> Result<ExactValue> {
    let term = TermSpec {
        coeff: BigRational::from_integer(1.into()),
        n_words: spec.words.clone(),
        m_words: Vec::new(),
    };
    let (value, _) = evaluate_terms(&[term], spec.n, 1, spec.mode)?;
    Ok(value)
}

/// `n!`, saturating at `u128::MAX`.
fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1, u128::saturating_mul)
}

fn occurring(products: &[Vec<FreeWord>]) -> Vec<u32> {
    let mut g: Vec<u32> = products.iter().flatten().flat_map(FreeWord::generators).collect();
    g.sort_unstable();
    g.dedup();
    g
}

/// `(n!)^{s'}` if it fits the exact budget.
pub fn exact_tuple_count(n: usize, generators: usize) -> Result<u128> {
    let f = factorial(n);
    let mut total: u128 = 1;
    for _ in 0..generators {
        total = total.saturating_mul(f);
        if total > EXACT_BUDGET {
            return Err(Error::budget(
                format!("exact permutation average over ({n}!)^{generators} tuples"),
                EXACT_BUDGET,
            ));
        }
    }
    Ok(total)
}

/// Whether exact mode can average these words at size `n`.
pub fn exact_feasible(n: usize, words: &[FreeWord]) -> bool {
    exact_tuple_count(n, occurring(&[words.to_vec()]).len()).is_ok()
}

/// Distinct words and, per product, indices into them.
struct Dedup {
    words: Vec<FreeWord>,
    products: Vec<Vec<usize>>,
}

impl Dedup {
    fn new(products: &[Vec<FreeWord>]) -> Self {
        let mut index: HashMap<&FreeWord, usize> = HashMap::new();
        let mut words = Vec::new();
        let products = products
            .iter()
            .map(|p| {
                p.iter()
                    .map(|w| {
                        *index.entry(w).or_insert_with(|| {
                            words.push(w.clone());
                            words.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        Dedup { words, products }
    }

    /// Fixed-point counts of every distinct word, then each product.
    fn eval(&self, n: usize, fwd: &[&[u32]], inv: &[&[u32]], fix: &mut [u64], out: &mut [u128]) {
        for (f, w) in fix.iter_mut().zip(&self.words) {
            *f = w.fix_count_with(n, fwd, inv) as u64;
        }
        for (o, p) in out.iter_mut().zip(&self.products) {
            *o = p.iter().map(|&i| u128::from(fix[i])).product();
        }
    }
}

/// Exact averages of every product over `S_n^{s'}`.
pub(crate) fn exact_fix_averages(n: usize, products: &[Vec<FreeWord>]) -> Result<Vec<BigRational>> {
    let gens = occurring(products);
    if gens.is_empty() {
        // Every word is e, so every Fix equals n.
        return Ok(products
            .iter()
            .map(|p| BigRational::from_integer(num_traits::pow(BigInt::from(n), p.len())))
            .collect());
    }
    let total = exact_tuple_count(n, gens.len())?;
    let dedup = Dedup::new(products);
    let max_gen = *gens.last().unwrap() as usize;
    let sums = if gens.len() == 1 {
        sum_single(n, gens[0], max_gen, &dedup)
    } else {
        sum_table(n, &gens, max_gen, &dedup)?
    };
    let denom = BigInt::from(total);
    Ok(sums
        .into_iter()
        .map(|s| BigRational::new(BigInt::from(s), denom.clone()))
        .collect())
}

fn add_into(acc: &mut [u128], x: &[u128]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += b;
    }
}

/// One generator: stream `S_n` in lexicographic blocks.
fn sum_single(n: usize, gen: u32, max_gen: usize, dedup: &Dedup) -> Vec<u128> {
    const BLOCK: u64 = 5040;
    let total = factorial(n) as u64;
    let blocks = total.div_ceil(BLOCK);
    let parts: Vec<Vec<u128>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(total);
            let mut images = unrank_lex(n, start);
            let mut inverse = vec![0u32; n];
            let mut fix = vec![0u64; dedup.words.len()];
            let mut prod = vec![0u128; dedup.products.len()];
            let mut acc = vec![0u128; dedup.products.len()];
            let empty: &[u32] = &[];
            for rank in start..end {
                for (i, &v) in images.iter().enumerate() {
                    inverse[v as usize] = i as u32;
                }
                let mut fwd = vec![empty; max_gen];
                let mut inv = vec![empty; max_gen];
                fwd[gen as usize - 1] = &images;
                inv[gen as usize - 1] = &inverse;
                dedup.eval(n, &fwd, &inv, &mut fix, &mut prod);
                add_into(&mut acc, &prod);
                if rank + 1 < end {
                    next_permutation(&mut images);
                }
            }
            acc
        })
        .collect();
    let mut acc = vec![0u128; dedup.products.len()];
    for p in &parts {
        add_into(&mut acc, p);
    }
    acc
}

/// Several generators: materialize `S_n` and run an odometer over tuples.
fn sum_table(n: usize, gens: &[u32], max_gen: usize, dedup: &Dedup) -> Result<Vec<u128>> {
    if n > ENUMERATION_CAP {
        return Err(Error::budget(format!("S_{n} table"), ENUMERATION_CAP));
    }
    let mut table: Vec<Vec<u32>> = Vec::new();
    let mut images: Vec<u32> = (0..n as u32).collect();
    loop {
        table.push(images.clone());
        if !next_permutation(&mut images) {
            break;
        }
    }
    let inverses: Vec<Vec<u32>> = table
        .iter()
        .map(|p| {
            let mut q = vec![0u32; n];
            for (i, &v) in p.iter().enumerate() {
                q[v as usize] = i as u32;
            }
            q
        })
        .collect();
    let k = gens.len();
    let parts: Vec<Vec<u128>> = (0..table.len())
        .into_par_iter()
        .map(|first| {
            let empty: &[u32] = &[];
            let mut fix = vec![0u64; dedup.words.len()];
            let mut prod = vec![0u128; dedup.products.len()];
            let mut acc = vec![0u128; dedup.products.len()];
            let mut odometer = vec![0usize; k];
            odometer[0] = first;
            loop {
                let mut fwd = vec![empty; max_gen];
                let mut inv = vec![empty; max_gen];
                for (g, &i) in gens.iter().zip(&odometer) {
                    fwd[*g as usize - 1] = &table[i];
                    inv[*g as usize - 1] = &inverses[i];
                }
                dedup.eval(n, &fwd, &inv, &mut fix, &mut prod);
                add_into(&mut acc, &prod);
                // advance digits 1..k, leaving digit 0 fixed
                let mut d = k - 1;
                loop {
                    if d == 0 {
                        return acc;
                    }
                    odometer[d] += 1;
                    if odometer[d] < table.len() {
                        break;
                    }
                    odometer[d] = 0;
                    d -= 1;
                }
            }
        })
        .collect();
    let mut acc = vec![0u128; dedup.products.len()];
    for p in &parts {
        add_into(&mut acc, p);
    }
    Ok(acc)
}

/// `coeff · E[Π Fix over S_N] · E[Π Fix over S_M]`.
#[derive(Clone, Debug)]
pub(crate) struct TermSpec {
    pub coeff: BigRational,
    pub n_words: Vec<FreeWord>,
    pub m_words: Vec<FreeWord>,
}

pub(crate) struct TermValue {
    pub average: ExactValue,
    pub contribution: ExactValue,
}

/// Evaluates `Σ_t coeff_t · avg_t`. Sampled mode uses the same permutation
/// tuples for every term, so the total's standard error accounts for their
/// correlation.
pub(crate) fn evaluate_terms(
    terms: &[TermSpec],
    n: usize,
    m: usize,
    mode: PermMode,
) -> Result<(ExactValue, Vec<TermValue>)> {
    match mode {
        PermMode::Exact => evaluate_exact(terms, n, m),
        PermMode::Sampled { samples, seed } => evaluate_sampled(terms, n, m, samples, seed),
    }
}

fn evaluate_exact(terms: &[TermSpec], n: usize, m: usize) -> Result<(ExactValue, Vec<TermValue>)> {
    let n_products: Vec<Vec<FreeWord>> = terms.iter().map(|t| t.n_words.clone()).collect();
    let m_products: Vec<Vec<FreeWord>> = terms.iter().map(|t| t.m_words.clone()).collect();
    let n_avg = exact_fix_averages(n, &n_products)?;
    let m_avg = if m_products.iter().all(Vec::is_empty) {
        vec![BigRational::from_integer(1.into()); terms.len()]
    } else {
        exact_fix_averages(m, &m_products)?
    };
    let mut total = BigRational::zero();
    let values = terms
        .iter()
        .zip(n_avg.into_iter().zip(m_avg))
        .map(|(t, (a, b))| {
            let average = a * b;
            let contribution = &t.coeff * &average;
            total += &contribution;
            TermValue {
                average: ExactValue::Rational(average),
                contribution: ExactValue::Rational(contribution),
            }
        })
        .collect();
    Ok((ExactValue::Rational(total), values))
}

fn evaluate_sampled(
    terms: &[TermSpec],
    n: usize,
    m: usize,
    samples: u64,
    seed: u64,
) -> Result<(ExactValue, Vec<TermValue>)> {
    if samples < 2 {
        return Err(Error::validation("sampled mode needs at least 2 samples"));
    }
    if n == 0 {
        return Err(Error::validation("matrix size must be positive"));
    }
    let n_products: Vec<Vec<FreeWord>> = terms.iter().map(|t| t.n_words.clone()).collect();
    let m_products: Vec<Vec<FreeWord>> = terms.iter().map(|t| t.m_words.clone()).collect();
    let n_gens = occurring(&n_products);
    let m_gens = occurring(&m_products);
    if !m_gens.is_empty() && m == 0 {
        return Err(Error::validation("matrix size M must be positive"));
    }
    let n_dedup = Dedup::new(&n_products);
    let m_dedup = Dedup::new(&m_products);
    let coeffs: Vec<f64> = terms.iter().map(|t| t.coeff.to_f64().unwrap_or(f64::NAN)).collect();
    let n_max = n_gens.last().copied().unwrap_or(0) as usize;
    let m_max = m_gens.last().copied().unwrap_or(0) as usize;

    let parts = chunked(samples, |range| {
        let mut total = Accumulator::default();
        let mut per_term = vec![Accumulator::default(); terms.len()];
        let mut n_fix = vec![0u64; n_dedup.words.len()];
        let mut m_fix = vec![0u64; m_dedup.words.len()];
        let mut n_prod = vec![0u128; terms.len()];
        let mut m_prod = vec![0u128; terms.len()];
        for index in range {
            let n_draw = draw(n, &n_gens, n_max, seed, index, Role::Perm);
            let m_draw = draw(m, &m_gens, m_max, seed, index, Role::PermM);
            let (f, i) = n_draw.tables();
            n_dedup.eval(n, &f, &i, &mut n_fix, &mut n_prod);
            let (f, i) = m_draw.tables();
            m_dedup.eval(m, &f, &i, &mut m_fix, &mut m_prod);
            let mut value = 0.0;
            for t in 0..terms.len() {
                let p = n_prod[t] as f64 * m_prod[t] as f64;
                per_term[t].push(p);
                value += coeffs[t] * p;
            }
            total.push(value);
        }
        (total, per_term)
    });
    let mut total = Accumulator::default();
    let mut per_term = vec![Accumulator::default(); terms.len()];
    for (t, p) in &parts {
        total.merge(t);
        for (a, b) in per_term.iter_mut().zip(p) {
            a.merge(b);
        }
    }
    let values = per_term
        .iter()
        .zip(&coeffs)
        .map(|(a, &c)| TermValue {
            average: ExactValue::estimate(a),
            contribution: ExactValue::Estimate {
                mean: c * a.mean(),
                stderr: c.abs() * a.stderr(),
                samples: a.count(),
            },
        })
        .collect();
    Ok((ExactValue::estimate(&total), values))
}

struct Draw {
    fwd: Vec<Vec<u32>>,
    inv: Vec<Vec<u32>>,
}

impl Draw {
    fn tables(&self) -> (Vec<&[u32]>, Vec<&[u32]>) {
        (
            self.fwd.iter().map(Vec::as_slice).collect(),
            self.inv.iter().map(Vec::as_slice).collect(),
        )
    }
}

fn draw(n: usize, gens: &[u32], max_gen: usize, seed: u64, index: u64, role: fn(u32) -> Role) -> Draw {
    let mut fwd = vec![Vec::new(); max_gen];
    let mut inv = vec![Vec::new(); max_gen];
    for &g in gens {
        let images = rng::shuffled(n, &mut rng::stream(seed, role(g), index));
        let mut inverse = vec![0u32; n];
        for (i, &v) in images.iter().enumerate() {
            inverse[v as usize] = i as u32;
        }
        fwd[g as usize - 1] = images;
        inv[g as usize - 1] = inverse;
    }
    Draw { fwd, inv }
}
