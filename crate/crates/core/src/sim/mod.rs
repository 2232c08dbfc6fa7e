//! Monte Carlo sampling of the matrix models and normalized-trace estimates.

pub mod dump;
pub mod matrix;
pub mod rng;
pub mod stats;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::monomial::{Block, Canonical, Factor, Monomial};
use crate::perm::Perm;
use crate::words::FreeWord;

pub use matrix::ComplexMatrix;
pub use rng::Role;
use stats::{chunked, Accumulator};

/// Which parts of the model an ensemble draw contains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModelTags(pub u32);

impl ModelTags {
    /// Uniform permutations `σ_r` of `[N]`.
    pub const PERM: ModelTags = ModelTags(1);
    /// Square Gaussians `G_r = f / √N`.
    pub const GAUSS: ModelTags = ModelTags(2);
    /// Wishart matrices `W_r = G*G / N` with `G` of size `M×N`.
    pub const WISHART: ModelTags = ModelTags(4);
    /// Rectangular pieces: corner permutations `T_r` of `[M]` and `M×N` Gaussians behind `H_r`.
    pub const RECT: ModelTags = ModelTags(8);

    pub fn contains(self, other: ModelTags) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn union(self, other: ModelTags) -> ModelTags {
        ModelTags(self.0 | other.0)
    }

    /// Tags needed to evaluate a monomial.
    pub fn for_monomial(m: &Monomial) -> ModelTags {
        m.factors().iter().fold(ModelTags::default(), |t, f| {
            t.union(match f {
                Factor::U(_) => ModelTags::PERM,
                Factor::T(_) | Factor::H { .. } => ModelTags::RECT.union(ModelTags::PERM),
                Factor::Gauss { .. } => ModelTags::GAUSS,
                Factor::Wishart { .. } => ModelTags::WISHART,
            })
        })
    }
}

/// One joint draw of the matrix model.
#[derive(Clone, Debug)]
pub struct EnsembleSample {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub tags: ModelTags,
    /// `σ_r` acting on `[N]`; `U_r = Mat σ_r`.
    pub sigmas: Vec<Perm>,
    /// `G_r^{(N)}`, already scaled by `1/√N`.
    pub gauss: Vec<ComplexMatrix>,
    /// `W_r^{(M,N)}`.
    pub wishart: Vec<ComplexMatrix>,
    /// Corner permutations `T_r` acting on `[M]`.
    pub t_perms: Vec<Perm>,
    /// Unscaled `M×N` Gaussians; `H_r` carries `rect[r] / √(M+N)` in its top-right block.
    pub rect: Vec<ComplexMatrix>,
}

/// `n` i.i.d. complex standard Gaussians drawn for one role.
fn gaussian_entries(rows: usize, cols: usize, seed: u64, role: Role, index: u64, scale: f64) -> ComplexMatrix {
    let mut r = rng::stream(seed, role, index);
    ComplexMatrix::from_fn(rows, cols, |_, _| rng::complex_gaussian(&mut r) * scale)
}

/// Uniform permutation of `[n]` from the stream `(seed, role, index)`.
pub fn sample_uniform_permutation(n: usize, seed: u64, role: Role, index: u64) -> Result<Perm> {
    if n == 0 {
        return Err(Error::validation("permutation size must be positive"));
    }
    Ok(rng::uniform_perm(n, &mut rng::stream(seed, role, index)))
}

/// `rows × cols` matrix of i.i.d. complex standard Gaussians.
pub fn sample_gaussian_matrix(rows: usize, cols: usize, seed: u64, role: Role, index: u64) -> Result<ComplexMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::validation("matrix dimensions must be positive"));
    }
    Ok(gaussian_entries(rows, cols, seed, role, index, 1.0))
}

/// Draws every requested part of the model for sample `index`. Each part and
/// each `r` reads its own stream, so the parts are independent.
pub fn build_ensemble(n: usize, m: usize, s: usize, tags: ModelTags, seed: u64, index: u64) -> Result<EnsembleSample> {
    if n == 0 || (m == 0 && (tags.contains(ModelTags::WISHART) || tags.contains(ModelTags::RECT))) {
        return Err(Error::validation("matrix sizes must be positive"));
    }
    let gens = 1..=s as u32;
    let perms_needed = tags.contains(ModelTags::PERM) || tags.contains(ModelTags::RECT);
    let sigmas = if perms_needed {
        gens.clone()
            .map(|r| rng::uniform_perm(n, &mut rng::stream(seed, Role::Perm(r), index)))
            .collect()
    } else {
        Vec::new()
    };
    let gauss = if tags.contains(ModelTags::GAUSS) {
        let k = 1.0 / (n as f64).sqrt();
        gens.clone()
            .map(|r| gaussian_entries(n, n, seed, Role::Gauss(r), index, k))
            .collect()
    } else {
        Vec::new()
    };
    let wishart = if tags.contains(ModelTags::WISHART) {
        gens.clone()
            .map(|r| {
                // W = G*G / N; G* has rows indexed by [N]
                let g_adj = gaussian_entries(n, m, seed, Role::Wishart(r), index, 1.0);
                g_adj.gram().scale(1.0 / n as f64)
            })
            .collect()
    } else {
        Vec::new()
    };
    let (t_perms, rect) = if tags.contains(ModelTags::RECT) {
        (
            gens.clone()
                .map(|r| rng::uniform_perm(m, &mut rng::stream(seed, Role::PermM(r), index)))
                .collect(),
            gens.map(|r| gaussian_entries(m, n, seed, Role::Rect(r), index, 1.0))
                .collect(),
        )
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(EnsembleSample {
        n,
        m,
        s,
        tags,
        sigmas,
        gauss,
        wishart,
        t_perms,
        rect,
    })
}

impl EnsembleSample {
    /// The full `(M+N)×(M+N)` matrix `H_r` (1-based `r`).
    pub fn h_block(&self, r: usize) -> ComplexMatrix {
        let (m, n) = (self.m, self.n);
        let g = &self.rect[r - 1];
        let k = 1.0 / ((m + n) as f64).sqrt();
        ComplexMatrix::from_fn(m + n, m + n, |i, j| {
            if i < m && j >= m {
                g.get(i, j - m) * k
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

enum Operand<'a> {
    Dense(std::borrow::Cow<'a, ComplexMatrix>),
    Perm(Perm),
}

fn word_perm(w: &FreeWord, sigmas: &[Perm], what: &str) -> Result<Perm> {
    if sigmas.is_empty() {
        return Err(Error::validation(format!("sample has no {what} permutations")));
    }
    w.evaluate(sigmas)
}

/// `Tr` of a product that starts with a dense factor; permutations are
/// applied as index maps and the last dense factor is folded into the trace.
fn chain_trace(ops: &[Operand<'_>]) -> Result<Complex64> {
    let Some(Operand::Dense(first)) = ops.first() else {
        return Err(Error::validation("chain must start with a dense factor"));
    };
    let last_dense = ops
        .iter()
        .rposition(|o| matches!(o, Operand::Dense(_)))
        .expect("first operand is dense");
    let tail = ops[last_dense + 1..].iter().try_fold(None::<Perm>, |acc, o| match o {
        Operand::Perm(p) => Ok::<_, Error>(Some(match acc {
            None => p.clone(),
            Some(q) => q.compose(p)?,
        })),
        Operand::Dense(_) => unreachable!("after the last dense factor"),
    })?;
    if last_dense == 0 {
        return Ok(match tail {
            None => first.trace(),
            Some(p) => {
                let img = p.images0();
                (0..first.rows()).map(|i| first.get(i, img[i] as usize)).sum()
            }
        });
    }
    let mut acc: ComplexMatrix = first.as_ref().clone();
    for o in &ops[1..last_dense] {
        acc = match o {
            Operand::Dense(d) => acc.mul(d)?,
            Operand::Perm(p) => acc.permute_cols(p)?,
        };
    }
    let Operand::Dense(d) = &ops[last_dense] else { unreachable!() };
    match tail {
        None => acc.trace_of_product(d),
        Some(p) => acc.trace_of_product_perm(d, &p),
    }
}

/// Normalized trace of the monomial evaluated on one draw: `tr^{(N)}` for the
/// square family, `tr^{(M+N)}` for the rectangular one.
pub fn evaluate_monomial_trace(m: &Monomial, sample: &EnsembleSample) -> Result<Complex64> {
    let needed = ModelTags::for_monomial(m);
    if !sample.tags.contains(needed) {
        return Err(Error::validation(format!("sample lacks parts needed by {m}")));
    }
    if m.s() > sample.s {
        return Err(Error::validation("sample has fewer generators than the monomial"));
    }
    let n = sample.n as f64;
    let real = |v: f64| Complex64::new(v, 0.0);
    let perm_op = |w: &FreeWord, sigmas: &[Perm], what: &str| -> Result<Option<Operand<'_>>> {
        if w.is_identity() {
            Ok(None)
        } else {
            Ok(Some(Operand::Perm(word_perm(w, sigmas, what)?)))
        }
    };
    use std::borrow::Cow;
    match m.canonicalize() {
        Canonical::Zero => Ok(real(0.0)),
        Canonical::PureU(w) => {
            if w.is_identity() {
                return Ok(real(1.0));
            }
            let p = word_perm(&w, &sample.sigmas, "U")?;
            Ok(real(p.fix_count() as f64 / n))
        }
        Canonical::RectPure { block, word } => {
            let dim = (sample.m + sample.n) as f64;
            let fix = match block {
                Block::T if word.is_identity() => sample.m,
                Block::U if word.is_identity() => sample.n,
                Block::T => word_perm(&word, &sample.t_perms, "T")?.fix_count(),
                Block::U => word_perm(&word, &sample.sigmas, "U")?.fix_count(),
            };
            Ok(real(fix as f64 / dim))
        }
        Canonical::Gaussian(slots) => {
            let mut ops = Vec::new();
            for s in &slots {
                let g = &sample.gauss[s.r as usize - 1];
                ops.push(Operand::Dense(if s.star { Cow::Owned(g.adjoint()) } else { Cow::Borrowed(g) }));
                ops.extend(perm_op(&s.word, &sample.sigmas, "U")?);
            }
            Ok(chain_trace(&ops)? / n)
        }
        Canonical::Wishart(slots) => {
            let mut ops = Vec::new();
            for s in &slots {
                ops.push(Operand::Dense(Cow::Borrowed(&sample.wishart[s.r as usize - 1])));
                ops.extend(perm_op(&s.word, &sample.sigmas, "U")?);
            }
            Ok(chain_trace(&ops)? / n)
        }
        Canonical::Rectangular(slots) => {
            // H* T H U ... restricted to the bottom-right corner: G* (N×M), T (M×M), G (M×N), U (N×N)
            let dim = (sample.m + sample.n) as f64;
            let mut ops = Vec::new();
            for (i, s) in slots.iter().enumerate() {
                let g = &sample.rect[s.r as usize - 1];
                if i % 2 == 0 {
                    ops.push(Operand::Dense(Cow::Owned(g.adjoint())));
                    ops.extend(perm_op(&s.word, &sample.t_perms, "T")?);
                } else {
                    ops.push(Operand::Dense(Cow::Borrowed(g)));
                    ops.extend(perm_op(&s.word, &sample.sigmas, "U")?);
                }
            }
            let scale = dim.powf(-(slots.len() as f64) / 2.0);
            Ok(chain_trace(&ops)? * scale / dim)
        }
    }
}

/// Sample mean and spread of the normalized trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateResult {
    pub mean: Complex64,
    /// `E|X − E X|²`, estimated without bias.
    pub variance: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// i.i.d. estimate of `E tr α` from `samples` independent draws. Sample `i`
/// reads only the streams keyed by `(seed, role, i)`, and chunks are merged
/// in index order, so the result does not depend on the worker count.
pub fn mc_estimate(m: &Monomial, n: usize, msize: usize, samples: u64, seed: u64) -> Result<EstimateResult> {
    let (re, im) = mc_accumulate(m, n, msize, samples, seed)?;
    let variance = re.variance() + im.variance();
    Ok(EstimateResult {
        mean: Complex64::new(re.mean(), im.mean()),
        variance,
        stderr: (variance / samples as f64).sqrt(),
        samples,
        seed,
    })
}

/// The normalized trace on each of `samples` independent draws, in index order.
pub fn mc_samples(m: &Monomial, n: usize, msize: usize, samples: u64, seed: u64) -> Result<Vec<Complex64>> {
    if samples < 1 {
        return Err(Error::validation("samples must be at least 1"));
    }
    let tags = ModelTags::for_monomial(m);
    let parts = chunked(samples, |range| {
        range
            .map(|i| evaluate_monomial_trace(m, &build_ensemble(n, msize, m.s(), tags, seed, i)?))
            .collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::with_capacity(samples as usize);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

pub(crate) fn mc_accumulate(
    m: &Monomial,
    n: usize,
    msize: usize,
    samples: u64,
    seed: u64,
) -> Result<(Accumulator, Accumulator)> {
    if samples < 1 {
        return Err(Error::validation("samples must be at least 1"));
    }
    let tags = ModelTags::for_monomial(m);
    let parts = chunked(samples, |range| -> Result<(Accumulator, Accumulator)> {
        let mut re = Accumulator::default();
        let mut im = Accumulator::default();
        for i in range {
            let sample = build_ensemble(n, msize, m.s(), tags, seed, i)?;
            let v = evaluate_monomial_trace(m, &sample)?;
            re.push(v.re);
            im.push(v.im);
        }
        Ok((re, im))
    });
    let mut re = Accumulator::default();
    let mut im = Accumulator::default();
    for p in parts {
        let (a, b) = p?;
        re.merge(&a);
        im.merge(&b);
    }
    Ok((re, im))
}
