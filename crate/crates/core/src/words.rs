//! Reduced words in the free group on `s` generators.
//!
//! A [`FreeWord`] is always stored in reduced form: no letter is ever
//! adjacent to its own inverse. The empty word is the identity `e`.
//!
//! Words evaluate to permutations by substituting a permutation for each
//! generator. The word `g_{r1} g_{r2} ... g_{rk}` evaluates to the composite
//! `σ_{r1} ∘ σ_{r2} ∘ ... ∘ σ_{rk}` with `(σ ∘ ρ)(a) = σ(ρ(a))`, which makes
//! the map `σ ↦ Mat σ` a homomorphism.

use std::fmt;

use crate::error::{Error, Result};
use crate::perm::Perm;

/// A generator or inverse generator. Generators are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: u32,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: u32, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }
}

/// An element of the free group, kept reduced.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeWord {
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity() -> Self {
        FreeWord { letters: Vec::new() }
    }

    /// The word `g_r`.
    pub fn generator(r: u32) -> Self {
        assert!(r >= 1, "generators are numbered from 1");
        FreeWord {
            letters: vec![Letter::new(r, false)],
        }
    }

    /// Reduces a raw letter sequence, validating every generator against `[1, s]`.
    pub fn reduce<I>(raw: I, s: usize) -> Result<Self>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut letters: Vec<Letter> = Vec::new();
        for letter in raw {
            if letter.generator == 0 || letter.generator as usize > s {
                return Err(Error::validation(format!(
                    "generator index {} outside [1, {s}]",
                    letter.generator
                )));
            }
            push_reduced(&mut letters, letter);
        }
        Ok(FreeWord { letters })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index occurring in the word (0 for `e`).
    pub fn max_generator(&self) -> u32 {
        self.letters.iter().map(|l| l.generator).max().unwrap_or(0)
    }

    /// Sorted, deduplicated generator indices occurring in the word.
    pub fn generators(&self) -> Vec<u32> {
        let mut g: Vec<u32> = self.letters.iter().map(|l| l.generator).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// Reduced concatenation `self · other`.
    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut letters, l);
        }
        FreeWord { letters }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> FreeWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = FreeWord::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Evaluates the word on a tuple of permutations of the same `[N]`.
    ///
    /// `sigmas[r - 1]` is substituted for `g_r`; the tuple must cover every
    /// generator in the word. The identity word returns the identity of `S_N`.
    pub fn evaluate(&self, sigmas: &[Perm]) -> Result<Perm> {
        let n = check_tuple(sigmas)?;
        if (self.max_generator() as usize) > sigmas.len() {
            return Err(Error::validation(format!(
                "word uses g{} but only {} permutations were supplied",
                self.max_generator(),
                sigmas.len()
            )));
        }
        let mut out = Perm::identity(n);
        for l in &self.letters {
            let p = &sigmas[l.generator as usize - 1];
            let step = if l.inverse { p.inverse() } else { p.clone() };
            out = out.compose(&step)?;
        }
        Ok(out)
    }

    /// Parses the textual syntax `e | term(.term)*`, `term := gIDX[^-1|^INT]`.
    pub fn parse(text: &str, s: usize) -> Result<Self> {
        Self::parse_at(text, 0, s)
    }

    /// Like [`FreeWord::parse`], reporting offsets relative to `base`.
    pub(crate) fn parse_at(text: &str, base: usize, s: usize) -> Result<Self> {
        let perr = |offset: usize, message: String| Error::Parse {
            offset: base + offset,
            message,
        };
        if text == "e" {
            return Ok(FreeWord::identity());
        }
        if text.is_empty() {
            return Err(perr(0, "empty word (use `e` for the identity)".into()));
        }
        let bytes = text.as_bytes();
        let mut raw = Vec::new();
        let mut pos = 0usize;
        loop {
            if bytes.get(pos) != Some(&b'g') {
                return Err(perr(pos, "expected `g` followed by a generator index".into()));
            }
            pos += 1;
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if start == pos {
                return Err(perr(pos, "expected a generator index".into()));
            }
            let idx: u32 = text[start..pos]
                .parse()
                .map_err(|_| perr(start, "generator index too large".into()))?;
            if idx == 0 || idx as usize > s {
                return Err(perr(start, format!("generator index {idx} outside [1, {s}]")));
            }
            let mut exponent: i64 = 1;
            if bytes.get(pos) == Some(&b'^') {
                pos += 1;
                let estart = pos;
                if bytes.get(pos) == Some(&b'-') {
                    pos += 1;
                }
                let dstart = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if dstart == pos {
                    return Err(perr(pos, "expected an integer exponent".into()));
                }
                exponent = text[estart..pos]
                    .parse()
                    .map_err(|_| perr(estart, "exponent out of range".into()))?;
                if exponent.unsigned_abs() > 64 {
                    return Err(perr(estart, "exponent magnitude above 64".into()));
                }
            }
            let letter = Letter::new(idx, exponent < 0);
            raw.extend(std::iter::repeat_n(letter, exponent.unsigned_abs() as usize));
            match bytes.get(pos) {
                None => break,
                Some(b'.') => pos += 1,
                Some(_) => return Err(perr(pos, "expected `.` between terms".into())),
            }
        }
        FreeWord::reduce(raw, s)
    }

    /// Number of points of `[N]` fixed by the evaluated word, given forward
    /// and inverse image tables (0-based) for each generator.
    pub(crate) fn fix_count_with(&self, n: usize, fwd: &[&[u32]], inv: &[&[u32]]) -> usize {
        if self.is_identity() {
            return n;
        }
        (0..n as u32)
            .filter(|&i| self.image_with(i, fwd, inv) == i)
            .count()
    }

    /// Image of the 0-based point `i` under the evaluated word.
    pub(crate) fn image_with(&self, i: u32, fwd: &[&[u32]], inv: &[&[u32]]) -> u32 {
        let mut x = i;
        for l in self.letters.iter().rev() {
            let g = l.generator as usize - 1;
            x = if l.inverse { inv[g][x as usize] } else { fwd[g][x as usize] };
        }
        x
    }
}

fn push_reduced(letters: &mut Vec<Letter>, l: Letter) {
    if letters.last() == Some(&l.inv()) {
        letters.pop();
    } else {
        letters.push(l);
    }
}

fn check_tuple(sigmas: &[Perm]) -> Result<usize> {
    let first = sigmas
        .first()
        .ok_or_else(|| Error::validation("no permutations supplied"))?;
    let n = first.len();
    if let Some(bad) = sigmas.iter().find(|p| p.len() != n) {
        return Err(Error::validation(format!(
            "permutations act on different sets: {} vs {}",
            n,
            bad.len()
        )));
    }
    Ok(n)
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            if !first {
                f.write_str(".")?;
            }
            first = false;
            write!(f, "g{}", l.generator)?;
            match (l.inverse, run) {
                (false, 1) => {}
                (false, k) => write!(f, "^{k}")?,
                (true, k) => write!(f, "^-{k}")?,
            }
            i += run;
        }
        Ok(())
    }
}
