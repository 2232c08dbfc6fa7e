//! Monomials in permutation words, Gaussian, Wishart and rectangular block symbols.
//!
//! Two families exist. The square family mixes `U_w` words with either
//! Gaussian factors `G_r`, `G_r*` or Wishart factors `W_r`. The rectangular
//! family lives on `C^{M+N}` and mixes corner permutation words `T_w`
//! (top-left `M×M` block), `U_w` (bottom-right `N×N` block) and the
//! off-diagonal Gaussian blocks `H_r`, `H_r*`.
//!
//! Text grammar, factors separated by spaces:
//!
//! ```text
//! factor := G<idx>[*] | W<idx> | H<idx>[*] | U[<word>] | T[<word>]
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::words::FreeWord;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    U(FreeWord),
    T(FreeWord),
    Gauss { r: u32, star: bool },
    Wishart { r: u32 },
    H { r: u32, star: bool },
}

impl Factor {
    fn is_rectangular(&self) -> bool {
        matches!(self, Factor::T(_) | Factor::H { .. })
    }

    fn adjoint(&self) -> Factor {
        match self {
            Factor::U(w) => Factor::U(w.inverse()),
            Factor::T(w) => Factor::T(w.inverse()),
            Factor::Gauss { r, star } => Factor::Gauss { r: *r, star: !star },
            Factor::Wishart { r } => Factor::Wishart { r: *r },
            Factor::H { r, star } => Factor::H { r: *r, star: !star },
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::U(w) => write!(f, "U[{w}]"),
            Factor::T(w) => write!(f, "T[{w}]"),
            Factor::Gauss { r, star } => write!(f, "G{r}{}", if *star { "*" } else { "" }),
            Factor::Wishart { r } => write!(f, "W{r}"),
            Factor::H { r, star } => write!(f, "H{r}{}", if *star { "*" } else { "" }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Square,
    Rectangular,
}

/// A validated product of factors, in the order written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    factors: Vec<Factor>,
    family: Family,
    s: usize,
}

impl Monomial {
    /// Validates indices against `[1, s]` and family consistency.
    pub fn new(factors: Vec<Factor>, s: usize) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::validation("empty monomial"));
        }
        for f in &factors {
            let idx = match f {
                Factor::U(w) | Factor::T(w) => w.max_generator(),
                Factor::Gauss { r, .. } | Factor::Wishart { r } | Factor::H { r, .. } => *r,
            };
            let is_word = matches!(f, Factor::U(_) | Factor::T(_));
            if (!is_word && idx == 0) || idx as usize > s {
                return Err(Error::validation(format!("index {idx} in {f} outside [1, {s}]")));
            }
        }
        let rect = factors.iter().any(Factor::is_rectangular);
        let square = factors
            .iter()
            .any(|f| matches!(f, Factor::Gauss { .. } | Factor::Wishart { .. }));
        if rect && square {
            return Err(Error::validation(
                "monomial mixes square (G/W) and rectangular (T/H) factors",
            ));
        }
        let gauss = factors.iter().any(|f| matches!(f, Factor::Gauss { .. }));
        let wishart = factors.iter().any(|f| matches!(f, Factor::Wishart { .. }));
        if gauss && wishart {
            return Err(Error::Unsupported(
                "mixed Gauss/Wishart monomials have no joint model".into(),
            ));
        }
        let family = if rect { Family::Rectangular } else { Family::Square };
        Ok(Monomial { factors, family, s })
    }

    pub fn parse(text: &str, s: usize) -> Result<Self> {
        let mut factors = Vec::new();
        let mut offset = 0usize;
        for token in text.split(' ') {
            if !token.is_empty() {
                factors.push(parse_factor(token, offset, s)?);
            }
            offset += token.len() + 1;
        }
        if factors.is_empty() {
            return Err(Error::Parse {
                offset: 0,
                message: "empty monomial".into(),
            });
        }
        Monomial::new(factors, s)
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// The adjoint monomial: reversed order, each factor replaced by its adjoint.
    pub fn adjoint(&self) -> Monomial {
        Monomial {
            factors: self.factors.iter().rev().map(Factor::adjoint).collect(),
            family: self.family,
            s: self.s,
        }
    }

    /// Rotates and merges the monomial into its alternating form.
    pub fn canonicalize(&self) -> Canonical {
        match self.family {
            Family::Square => canonicalize_square(&self.factors),
            Family::Rectangular => canonicalize_rectangular(&self.factors),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

fn parse_factor(token: &str, offset: usize, s: usize) -> Result<Factor> {
    let perr = |at: usize, message: String| Error::Parse {
        offset: offset + at,
        message,
    };
    let head = token.as_bytes()[0];
    match head {
        b'U' | b'T' => {
            let inner = token
                .strip_prefix(head as char)
                .and_then(|t| t.strip_prefix('['))
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| perr(1, format!("expected {}[word]", head as char)))?;
            let w = FreeWord::parse_at(inner, offset + 2, s)?;
            Ok(if head == b'U' { Factor::U(w) } else { Factor::T(w) })
        }
        b'G' | b'W' | b'H' => {
            let (body, star) = match token.strip_suffix('*') {
                Some(b) => (b, true),
                None => (token, false),
            };
            let digits = &body[1..];
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(perr(1, format!("expected an index after `{}`", head as char)));
            }
            let r: u32 = digits
                .parse()
                .map_err(|_| perr(1, "index too large".into()))?;
            if r == 0 || r as usize > s {
                return Err(perr(1, format!("index {r} outside [1, {s}]")));
            }
            match (head, star) {
                (b'G', _) => Ok(Factor::Gauss { r, star }),
                (b'H', _) => Ok(Factor::H { r, star }),
                (b'W', false) => Ok(Factor::Wishart { r }),
                (b'W', true) => Err(perr(token.len() - 1, "W is self-adjoint; drop the `*`".into())),
                _ => unreachable!(),
            }
        }
        _ => Err(perr(0, format!("unknown factor {token:?}"))),
    }
}

/// `G_r^ε U_w` slot of an alternating Gaussian monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussSlot {
    pub r: u32,
    pub star: bool,
    pub word: FreeWord,
}

/// `W_r U_w` slot of an alternating Wishart monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WishartSlot {
    pub r: u32,
    pub word: FreeWord,
}

/// Slot `a` of a rectangular alternating monomial: `H_r* T_w` at odd `a`,
/// `H_r U_w` at even `a` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RectSlot {
    pub r: u32,
    pub word: FreeWord,
}

/// Corner block of the rectangular model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    /// Top-left `M×M` corner carrying `T` words.
    T,
    /// Bottom-right `N×N` corner carrying `U` words.
    U,
}

/// Canonical alternating form of a monomial, up to cyclic rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Canonical {
    PureU(FreeWord),
    Gaussian(Vec<GaussSlot>),
    Wishart(Vec<WishartSlot>),
    Rectangular(Vec<RectSlot>),
    /// A lone corner word of the rectangular model.
    RectPure { block: Block, word: FreeWord },
    /// Identically zero by the block structure.
    Zero,
}

impl Canonical {
    /// Number of Gaussian/Wishart/H factors.
    pub fn random_factor_count(&self) -> usize {
        match self {
            Canonical::Gaussian(v) => v.len(),
            Canonical::Wishart(v) => v.len(),
            Canonical::Rectangular(v) => v.len(),
            _ => 0,
        }
    }

    /// Words in slot order.
    pub fn words(&self) -> Vec<FreeWord> {
        match self {
            Canonical::PureU(w) | Canonical::RectPure { word: w, .. } => vec![w.clone()],
            Canonical::Gaussian(v) => v.iter().map(|x| x.word.clone()).collect(),
            Canonical::Wishart(v) => v.iter().map(|x| x.word.clone()).collect(),
            Canonical::Rectangular(v) => v.iter().map(|x| x.word.clone()).collect(),
            Canonical::Zero => Vec::new(),
        }
    }
}

impl fmt::Display for Canonical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self {
            Canonical::PureU(w) => parts.push(format!("U[{w}]")),
            Canonical::Gaussian(v) => {
                for x in v {
                    parts.push(format!("G{}{}", x.r, if x.star { "*" } else { "" }));
                    parts.push(format!("U[{}]", x.word));
                }
            }
            Canonical::Wishart(v) => {
                for x in v {
                    parts.push(format!("W{}", x.r));
                    parts.push(format!("U[{}]", x.word));
                }
            }
            Canonical::Rectangular(v) => {
                for (i, x) in v.iter().enumerate() {
                    if i % 2 == 0 {
                        parts.push(format!("H{}*", x.r));
                        parts.push(format!("T[{}]", x.word));
                    } else {
                        parts.push(format!("H{}", x.r));
                        parts.push(format!("U[{}]", x.word));
                    }
                }
            }
            Canonical::RectPure { block: Block::T, word } => parts.push(format!("T[{word}]")),
            Canonical::RectPure { block: Block::U, word } => parts.push(format!("U[{word}]")),
            Canonical::Zero => parts.push("0".into()),
        }
        f.write_str(&parts.join(" "))
    }
}

fn rotate_to<F: Fn(&Factor) -> bool>(factors: &[Factor], pred: F) -> Option<Vec<Factor>> {
    let start = factors.iter().position(pred)?;
    Some(factors[start..].iter().chain(&factors[..start]).cloned().collect())
}

fn canonicalize_square(factors: &[Factor]) -> Canonical {
    let Some(rotated) = rotate_to(factors, |f| matches!(f, Factor::Gauss { .. } | Factor::Wishart { .. })) else {
        let w = factors.iter().fold(FreeWord::identity(), |acc, f| match f {
            Factor::U(w) => acc.concat(w),
            _ => acc,
        });
        return Canonical::PureU(w);
    };
    let mut gauss = Vec::new();
    let mut wishart = Vec::new();
    for f in rotated {
        match f {
            Factor::Gauss { r, star } => gauss.push(GaussSlot {
                r,
                star,
                word: FreeWord::identity(),
            }),
            Factor::Wishart { r } => wishart.push(WishartSlot {
                r,
                word: FreeWord::identity(),
            }),
            Factor::U(w) => {
                if let Some(last) = gauss.last_mut() {
                    last.word = last.word.concat(&w);
                } else if let Some(last) = wishart.last_mut() {
                    last.word = last.word.concat(&w);
                }
            }
            Factor::T(_) | Factor::H { .. } => unreachable!("validated family"),
        }
    }
    if gauss.is_empty() {
        Canonical::Wishart(wishart)
    } else {
        Canonical::Gaussian(gauss)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Corner {
    P,
    Q,
}

fn spaces(f: &Factor) -> (Corner, Corner) {
    match f {
        Factor::T(_) => (Corner::P, Corner::P),
        Factor::U(_) => (Corner::Q, Corner::Q),
        Factor::H { star: false, .. } => (Corner::P, Corner::Q),
        Factor::H { star: true, .. } => (Corner::Q, Corner::P),
        Factor::Gauss { .. } | Factor::Wishart { .. } => unreachable!("validated family"),
    }
}

fn canonicalize_rectangular(factors: &[Factor]) -> Canonical {
    let l = factors.len();
    let compatible = (0..l).all(|i| spaces(&factors[i]).1 == spaces(&factors[(i + 1) % l]).0);
    if !compatible {
        return Canonical::Zero;
    }
    let Some(rotated) = rotate_to(factors, |f| matches!(f, Factor::H { star: true, .. })) else {
        // No H at all: every factor lives in the same corner.
        let block = if matches!(factors[0], Factor::T(_)) { Block::T } else { Block::U };
        let word = factors.iter().fold(FreeWord::identity(), |acc, f| match f {
            Factor::T(w) | Factor::U(w) => acc.concat(w),
            _ => acc,
        });
        return Canonical::RectPure { block, word };
    };
    let mut slots: Vec<RectSlot> = Vec::new();
    for f in rotated {
        match f {
            Factor::H { r, .. } => slots.push(RectSlot {
                r,
                word: FreeWord::identity(),
            }),
            Factor::T(w) | Factor::U(w) => {
                let last = slots.last_mut().expect("rotation starts at H*");
                last.word = last.word.concat(&w);
            }
            _ => unreachable!("validated family"),
        }
    }
    Canonical::Rectangular(slots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(text: &str) -> Monomial {
        Monomial::parse(text, 2).unwrap()
    }

    #[test]
    fn rotation_merges_words() {
        assert_eq!(m("U[g1] G1 U[g2]").canonicalize().to_string(), "G1 U[g2.g1]");
        assert_eq!(m("U[g1] U[g1^-1]").canonicalize(), Canonical::PureU(FreeWord::identity()));
        assert_eq!(m("G1 G1*").canonicalize().to_string(), "G1 U[e] G1* U[e]");
        assert_eq!(m("W1 W2 U[g1]").canonicalize().to_string(), "W1 U[e] W2 U[g1]");
    }

    #[test]
    fn rectangular_forms() {
        assert_eq!(m("H1 H1").canonicalize(), Canonical::Zero);
        assert_eq!(m("T[g1] U[e]").canonicalize(), Canonical::Zero);
        assert_eq!(m("H1 U[g1] H2* T[e]").canonicalize().to_string(), "H2* T[e] H1 U[g1]");
        assert_eq!(m("H1* H1").canonicalize().to_string(), "H1* T[e] H1 U[e]");
        assert_eq!(m("H1* T[e] H1").canonicalize().to_string(), "H1* T[e] H1 U[e]");
        assert_eq!(
            m("T[g1] T[g1]").canonicalize(),
            Canonical::RectPure {
                block: Block::T,
                word: FreeWord::parse("g1^2", 2).unwrap()
            }
        );
        // odd H count is always incompatible
        assert_eq!(m("H1* T[e] H1 U[e] H2*").canonicalize(), Canonical::Zero);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(Monomial::parse("G1 W1", 2), Err(Error::Unsupported(_))));
        assert!(matches!(Monomial::parse("G1 H1", 2), Err(Error::Validation(_))));
        assert!(matches!(Monomial::parse("G3", 2), Err(Error::Parse { offset: 1, .. })));
        assert!(matches!(Monomial::parse("G1 U[g1.x]", 2), Err(Error::Parse { offset: 8, .. })));
        assert!(Monomial::parse("", 2).is_err());
        assert!(Monomial::parse("W1*", 2).is_err());
        assert!(Monomial::parse("Q1", 2).is_err());
    }

    #[test]
    fn parsed_gaussian_form() {
        let c = m("G1 U[g1] G1* U[g1^-1]").canonicalize();
        let Canonical::Gaussian(slots) = c else { panic!() };
        assert_eq!(slots.len(), 2);
        assert_eq!(slots[0].word.to_string(), "g1");
        assert_eq!(slots[1].word.to_string(), "g1^-1");
        assert!(!slots[0].star && slots[1].star);
    }

    #[test]
    fn adjoint_reverses() {
        assert_eq!(m("G1 U[g1.g2] G2*").adjoint().to_string(), "G2 U[g2^-1.g1^-1] G1*");
        assert_eq!(m("H1* T[g1]").adjoint().to_string(), "T[g1^-1] H1");
    }
}
