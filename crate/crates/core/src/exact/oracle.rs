//! Brute-force expectation by Wick's lemma on raw matrix entries.
//!
//! Works on the factor list exactly as written, without canonical forms or
//! pairing sums: for every tuple of permutations and every index path through
//! the trace(s) it collects the Gaussian entries `f_{r;i,j}` and their
//! conjugates, and counts the bijections matching each entry with an equal
//! conjugated one. Tiny sizes only.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::monomial::{Factor, Family, Monomial};
use crate::perm::{enumerate_permutations, Perm};
use crate::words::FreeWord;

const MAX_SIZE: usize = 4;
const MAX_S: usize = 2;
const MAX_RANDOM_PER_TRACE: usize = 4;
const MAX_RANDOM_TOTAL: usize = 8;

/// Label `(r, row, col)` of a Gaussian entry `f_{r;row,col}`.
type Label = (u32, usize, usize);

/// One elementary matrix of the expanded product, as a map on `C^dim`.
#[derive(Clone, Debug)]
enum Op {
    /// Permutation matrix of `word` acting on `[offset, offset + k)`.
    Perm { word: FreeWord, corner: Corner, offset: usize, k: usize },
    /// Gaussian entries: rows in `rows`, columns in `cols`; entry `(i, j)` is
    /// `f_{r; i - rows.0, j - cols.0}`, or the conjugate of the transposed
    /// entry when `conj`.
    Dense { r: u32, conj: bool, rows: (usize, usize), cols: (usize, usize) },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Corner {
    /// Permutations from the `S_N` tuple.
    N,
    /// Permutations from the `S_M` tuple (rectangular `T` words).
    M,
}

struct Expanded {
    ops: Vec<Op>,
    dim: usize,
}

/// Exponents of the entry scalings: `N^{-g/2} N^{-w} (M+N)^{-h/2}`.
#[derive(Default)]
struct Scale {
    g: usize,
    w: usize,
    h: usize,
}

fn expand(m: &Monomial, n: usize, msize: usize, scale: &mut Scale) -> Expanded {
    let mut ops = Vec::new();
    match m.family() {
        Family::Square => {
            for f in m.factors() {
                match f {
                    Factor::U(w) => ops.push(Op::Perm {
                        word: w.clone(),
                        corner: Corner::N,
                        offset: 0,
                        k: n,
                    }),
                    Factor::Gauss { r, star } => {
                        scale.g += 1;
                        ops.push(Op::Dense {
                            r: *r,
                            conj: *star,
                            rows: (0, n),
                            cols: (0, n),
                        });
                    }
                    Factor::Wishart { r } => {
                        // W = (1/N) G* G with G of size M×N; the inner index runs over [M]
                        scale.w += 1;
                        ops.push(Op::Dense {
                            r: *r,
                            conj: true,
                            rows: (0, n),
                            cols: (n, n + msize),
                        });
                        ops.push(Op::Dense {
                            r: *r,
                            conj: false,
                            rows: (n, n + msize),
                            cols: (0, n),
                        });
                    }
                    Factor::T(_) | Factor::H { .. } => unreachable!("validated family"),
                }
            }
            // every factor's rows, including the first, live in N-space
            Expanded { ops, dim: n }
        }
        Family::Rectangular => {
            for f in m.factors() {
                match f {
                    Factor::T(w) => ops.push(Op::Perm {
                        word: w.clone(),
                        corner: Corner::M,
                        offset: 0,
                        k: msize,
                    }),
                    Factor::U(w) => ops.push(Op::Perm {
                        word: w.clone(),
                        corner: Corner::N,
                        offset: msize,
                        k: n,
                    }),
                    Factor::H { r, star } => {
                        scale.h += 1;
                        let (rows, cols) = if *star {
                            ((msize, msize + n), (0, msize))
                        } else {
                            ((0, msize), (msize, msize + n))
                        };
                        ops.push(Op::Dense { r: *r, conj: *star, rows, cols });
                    }
                    _ => unreachable!("validated family"),
                }
            }
            Expanded { ops, dim: msize + n }
        }
    }
}

struct Walker<'a> {
    traces: &'a [Expanded],
    /// Inverses of the evaluated words per trace and op; `None` for dense ops.
    inverses: Vec<Vec<Option<Perm>>>,
    fs: Vec<Label>,
    fbars: Vec<Label>,
    total: u64,
}

impl Walker<'_> {
    /// Walks trace `t` from op `k` with current row index `i`; `start` is the
    /// index the trace must close on.
    fn walk(&mut self, t: usize, k: usize, i: usize, start: usize) {
        if t == self.traces.len() {
            self.total += wick_count(&self.fs, &self.fbars);
            return;
        }
        let traces = self.traces;
        let ops = &traces[t].ops;
        if k == ops.len() {
            if i == start {
                self.next_trace(t + 1);
            }
            return;
        }
        match &ops[k] {
            Op::Perm { offset, k: size, .. } => {
                if i < *offset || i >= offset + size {
                    return;
                }
                let p = self.inverses[t][k].as_ref().expect("evaluated word");
                // Mat(σ)_{i,j} = 1 iff σ(j) = i
                let j = p.apply(i - offset + 1) - 1 + offset;
                self.walk(t, k + 1, j, start);
            }
            Op::Dense { r, conj, rows, cols } => {
                if i < rows.0 || i >= rows.1 {
                    return;
                }
                let (r, conj, rows, cols) = (*r, *conj, *rows, *cols);
                for j in cols.0..cols.1 {
                    if conj {
                        self.fbars.push((r, j - cols.0, i - rows.0));
                    } else {
                        self.fs.push((r, i - rows.0, j - cols.0));
                    }
                    self.walk(t, k + 1, j, start);
                    if conj {
                        self.fbars.pop();
                    } else {
                        self.fs.pop();
                    }
                }
            }
        }
    }

    fn next_trace(&mut self, t: usize) {
        if t == self.traces.len() {
            self.walk(t, 0, 0, 0);
            return;
        }
        for i0 in 0..self.traces[t].dim {
            self.walk(t, 0, i0, i0);
        }
    }
}

/// `card{π bijection | fs[a] = fbars[π(a)] for all a}`, by brute force.
fn wick_count(fs: &[Label], fbars: &[Label]) -> u64 {
    if fs.len() != fbars.len() {
        return 0;
    }
    fn rec(a: usize, fs: &[Label], fbars: &[Label], used: &mut [bool]) -> u64 {
        if a == fs.len() {
            return 1;
        }
        let mut c = 0;
        for b in 0..fbars.len() {
            if !used[b] && fbars[b] == fs[a] {
                used[b] = true;
                c += rec(a + 1, fs, fbars, used);
                used[b] = false;
            }
        }
        c
    }
    rec(0, fs, fbars, &mut vec![false; fbars.len()])
}

/// `E tr m` by brute force.
pub fn wick_oracle_moment(m: &Monomial, n: usize, msize: Option<usize>) -> Result<BigRational> {
    wick_oracle_product(&[m], n, msize)
}

/// `E Π_t tr m_t` by brute force. The trace is `tr^{(N)}` for the square
/// family and `tr^{(M+N)}` for the rectangular one.
pub fn wick_oracle_product(ms: &[&Monomial], n: usize, msize: Option<usize>) -> Result<BigRational> {
    let Some(first) = ms.first() else {
        return Ok(BigRational::one());
    };
    let family = first.family();
    if ms.iter().any(|m| m.family() != family) {
        return Err(Error::Unsupported("oracle products must stay in one family".into()));
    }
    let needs_m = family == Family::Rectangular
        || ms
            .iter()
            .any(|m| m.factors().iter().any(|f| matches!(f, Factor::Wishart { .. })));
    let msize = match (needs_m, msize) {
        (true, None) => return Err(Error::validation("the oracle needs M for this monomial")),
        (_, m) => m.unwrap_or(n),
    };
    let s = ms.iter().map(|m| m.s()).max().unwrap_or(1);
    let random = |m: &Monomial| {
        m.factors()
            .iter()
            .filter(|f| !matches!(f, Factor::U(_) | Factor::T(_)))
            .count()
    };
    let per_trace = ms.iter().map(|m| random(m)).max().unwrap_or(0);
    let total: usize = ms.iter().map(|m| random(m)).sum();
    if n == 0 || msize == 0 {
        return Err(Error::validation("matrix sizes must be positive"));
    }
    if n > MAX_SIZE || msize > MAX_SIZE || s > MAX_S || per_trace > MAX_RANDOM_PER_TRACE || total > MAX_RANDOM_TOTAL {
        return Err(Error::budget(
            "Wick oracle",
            format!("N, M <= {MAX_SIZE}, s <= {MAX_S}, <= {MAX_RANDOM_PER_TRACE} random factors per trace"),
        ));
    }

    let mut scale = Scale::default();
    let traces: Vec<Expanded> = ms.iter().map(|m| expand(m, n, msize, &mut scale)).collect();
    if scale.g % 2 == 1 || scale.h % 2 == 1 {
        return Ok(BigRational::zero());
    }

    let n_tuples: Vec<Vec<Perm>> = tuples(n, s)?;
    let m_tuples: Vec<Vec<Perm>> = if family == Family::Rectangular {
        tuples(msize, s)?
    } else {
        vec![Vec::new()]
    };
    let mut count = BigInt::zero();
    for nt in &n_tuples {
        for mt in &m_tuples {
            let inverses = traces
                .iter()
                .map(|tr| {
                    tr.ops
                        .iter()
                        .map(|op| match op {
                            Op::Perm { word, corner, .. } => {
                                let tuple = if *corner == Corner::N { nt } else { mt };
                                word.evaluate(tuple).map(|p| Some(p.inverse()))
                            }
                            Op::Dense { .. } => Ok(None),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let mut walker = Walker {
                traces: &traces,
                inverses,
                fs: Vec::new(),
                fbars: Vec::new(),
                total: 0,
            };
            walker.next_trace(0);
            count += walker.total;
        }
    }

    let big = |v: usize| BigInt::from(v);
    let trace_dim = if family == Family::Rectangular { n + msize } else { n };
    let mut denom = num_traits::pow(big(trace_dim), traces.len());
    denom *= big(n_tuples.len()) * big(m_tuples.len());
    denom *= num_traits::pow(big(n), scale.g / 2 + scale.w);
    denom *= num_traits::pow(big(n + msize), scale.h / 2);
    Ok(BigRational::new(count, denom))
}

/// All `s`-tuples of permutations of `[k]`.
fn tuples(k: usize, s: usize) -> Result<Vec<Vec<Perm>>> {
    let all: Vec<Perm> = enumerate_permutations(k)?.collect();
    let mut out: Vec<Vec<Perm>> = vec![Vec::new()];
    for _ in 0..s {
        out = out
            .into_iter()
            .flat_map(|t| {
                all.iter().map(move |p| {
                    let mut t = t.clone();
                    t.push(p.clone());
                    t
                })
            })
            .collect();
    }
    Ok(out)
}
