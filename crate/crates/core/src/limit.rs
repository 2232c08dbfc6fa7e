//! Limit (`N → ∞`) moments of Haar unitaries, circular and free Poisson elements.
//!
//! Everything here goes through [`moment_cumulant_sum`], the free
//! moment-cumulant formula for `φ(A_1 B_1 ... A_n B_n)` with `{A}` and `{B}`
//! free: a sum over non-crossing `τ` of `k_τ(A) · φ_{K(τ)}(B)`. The circular,
//! free Poisson and rectangular formulas are specializations that differ only
//! in the cumulant family and in the moments of the `B` words.

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::monomial::{Block, Canonical, GaussSlot, RectSlot, WishartSlot};
use crate::perm::{enumerate_nc_pairings, enumerate_noncrossing, Perm};
use crate::poly::CPolynomial;
use crate::words::FreeWord;

/// A limit moment of the form `numerator(c) / (1 + c)^power`.
///
/// Square-family moments always have `power = 0`; Gaussian and Haar
/// moments are constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitMoment {
    pub numerator: CPolynomial,
    pub one_plus_c_power: u32,
}

impl LimitMoment {
    pub fn constant(v: impl Into<BigInt>) -> Self {
        LimitMoment {
            numerator: CPolynomial::constant(v),
            one_plus_c_power: 0,
        }
    }

    pub fn polynomial(p: CPolynomial) -> Self {
        LimitMoment {
            numerator: p,
            one_plus_c_power: 0,
        }
    }

    pub fn eval(&self, c: f64) -> f64 {
        self.numerator.eval(c) / (1.0 + c).powi(self.one_plus_c_power as i32)
    }

    pub fn eval_exact(&self, c: &BigRational) -> BigRational {
        let denom = num_traits::pow(BigRational::one() + c, self.one_plus_c_power as usize);
        self.numerator.eval_exact(c) / denom
    }

    /// The constant value when the moment does not depend on `c`.
    pub fn as_constant(&self) -> Option<BigInt> {
        match (self.one_plus_c_power, self.numerator.degree()) {
            (0, None) => Some(BigInt::zero()),
            (0, Some(0)) => Some(self.numerator.coefficient(0)),
            _ => None,
        }
    }
}

impl std::fmt::Display for LimitMoment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.one_plus_c_power {
            0 => write!(f, "{}", self.numerator),
            1 => write!(f, "({})/(1 + c)", self.numerator),
            p => write!(f, "({})/(1 + c)^{p}", self.numerator),
        }
    }
}

/// `φ(U_w)`: 1 for the empty word, 0 otherwise.
pub fn haar_word_moment(w: &FreeWord) -> u32 {
    u32::from(w.is_identity())
}

/// `Σ_{τ ∈ NC_n} Π_{C ∈ τ} cumulant(C) · Π_{D ∈ K(τ)} word_moment(D)`.
///
/// Blocks are passed as 1-based positions in cycle order. Either closure may
/// return `None` for a vanishing factor, which drops the whole term.
pub fn moment_cumulant_sum<V, K, B>(n: usize, cumulant: K, word_moment: B) -> Result<V>
where
    V: Clone + Zero + One + Mul<Output = V>,
    K: Fn(&[usize]) -> Option<V>,
    B: Fn(&[usize]) -> Option<V>,
{
    let mut total = V::zero();
    'tau: for tau in enumerate_noncrossing(n)? {
        let mut term = V::one();
        for block in tau.cycles().iter() {
            match cumulant(block) {
                Some(k) => term = term * k,
                None => continue 'tau,
            }
        }
        for cycle in tau.kreweras()?.cycles().iter() {
            match word_moment(cycle) {
                Some(m) => term = term * m,
                None => continue 'tau,
            }
        }
        total = total + term;
    }
    Ok(total)
}

fn cycle_word(words: &[FreeWord], cycle: &[usize]) -> FreeWord {
    cycle
        .iter()
        .fold(FreeWord::identity(), |acc, &a| acc.concat(&words[a - 1]))
}

/// Mixed moment of circular elements and Haar words, i.e. the number of
/// non-crossing pairings matching indices, pairing each `G` with a `G*`, and
/// whose Kreweras cycles all carry the empty word.
pub fn circular_mixed_moment(slots: &[GaussSlot]) -> Result<BigInt> {
    let n = slots.len();
    let stars = slots.iter().filter(|s| s.star).count();
    if n % 2 == 1 || 2 * stars != n {
        return Ok(BigInt::zero());
    }
    let words: Vec<FreeWord> = slots.iter().map(|s| s.word.clone()).collect();
    moment_cumulant_sum(
        n,
        |block| circular_cumulant(block, |a| (slots[a - 1].r, slots[a - 1].star)).map(BigInt::from),
        |cycle| cycle_word(&words, cycle).is_identity().then(BigInt::one),
    )
}

fn circular_cumulant(block: &[usize], label: impl Fn(usize) -> (u32, bool)) -> Option<u32> {
    match block {
        [a, b] => {
            let (ra, sa) = label(*a);
            let (rb, sb) = label(*b);
            (ra == rb && sa != sb).then_some(1)
        }
        _ => None,
    }
}

/// Mixed moment of free Poisson elements (parameter `c`) and Haar words, as a
/// polynomial in `c`.
pub fn free_poisson_mixed_moment(slots: &[WishartSlot]) -> Result<CPolynomial> {
    let words: Vec<FreeWord> = slots.iter().map(|s| s.word.clone()).collect();
    moment_cumulant_sum(
        slots.len(),
        |block| {
            let r = slots[block[0] - 1].r;
            block.iter().all(|&a| slots[a - 1].r == r).then(CPolynomial::c)
        },
        |cycle| cycle_word(&words, cycle).is_identity().then(CPolynomial::one),
    )
}

fn check_rectangular(slots: &[RectSlot]) -> Result<()> {
    if slots.is_empty() || slots.len() % 2 == 1 {
        return Err(Error::validation(format!(
            "rectangular alternating form needs an even, positive number of H factors, got {}",
            slots.len()
        )));
    }
    Ok(())
}

/// Rectangular limit moment at a given `c`, computed through the
/// moment-cumulant formula with `φ(P) = c/(1+c)` and `φ(Q) = 1/(1+c)`.
pub fn rectangular_limit_moment(slots: &[RectSlot], c: &BigRational) -> Result<BigRational> {
    check_rectangular(slots)?;
    let words: Vec<FreeWord> = slots.iter().map(|s| s.word.clone()).collect();
    let p_mass = c / (BigRational::one() + c);
    let q_mass = BigRational::one() / (BigRational::one() + c);
    moment_cumulant_sum(
        slots.len(),
        // odd slots are H*, even slots are H
        |block| {
            circular_cumulant(block, |a| (slots[a - 1].r, a % 2 == 1))
                .map(|_| BigRational::one())
        },
        |cycle| {
            if !cycle_word(&words, cycle).is_identity() {
                return None;
            }
            let odd = cycle[0] % 2 == 1;
            debug_assert!(cycle.iter().all(|&a| (a % 2 == 1) == odd));
            Some(if odd { p_mass.clone() } else { q_mass.clone() })
        },
    )
}

/// Rectangular limit moment as `Σ_τ c^{#K(τ)_odd} / (1 + c)^{#K(τ)}` over
/// non-crossing pairings, returned over a common denominator.
pub fn rectangular_limit_symbolic(slots: &[RectSlot]) -> Result<LimitMoment> {
    check_rectangular(slots)?;
    let words: Vec<FreeWord> = slots.iter().map(|s| s.word.clone()).collect();
    let mut terms: Vec<(u32, u32)> = Vec::new();
    for tau in enumerate_nc_pairings(slots.len())? {
        let admissible = (1..=slots.len()).all(|a| {
            let b = tau.apply(a);
            slots[a - 1].r == slots[b - 1].r && (a + b) % 2 == 1
        });
        if !admissible {
            continue;
        }
        let k = tau.kreweras()?;
        if !k.cycles().iter().all(|c| cycle_word(&words, c).is_identity()) {
            continue;
        }
        let split = k.parity_split()?;
        terms.push((split.odd_cycles.len() as u32, k.cycle_count() as u32));
    }
    let power = terms.iter().map(|t| t.1).max().unwrap_or(0);
    let one_plus_c = CPolynomial::one() + CPolynomial::c();
    let mut numerator = CPolynomial::zero();
    for (odd, total) in terms {
        let mut t = CPolynomial::monomial(1, odd);
        for _ in total..power {
            t = t * one_plus_c.clone();
        }
        numerator = numerator + t;
    }
    Ok(LimitMoment {
        numerator,
        one_plus_c_power: power,
    })
}

/// Routes a canonical monomial to its limit formula.
pub fn freeness_prediction(m: &Canonical) -> Result<LimitMoment> {
    Ok(match m {
        Canonical::PureU(w) => LimitMoment::constant(haar_word_moment(w)),
        Canonical::Gaussian(slots) => LimitMoment::constant(circular_mixed_moment(slots)?),
        Canonical::Wishart(slots) => LimitMoment::polynomial(free_poisson_mixed_moment(slots)?),
        Canonical::Rectangular(slots) => rectangular_limit_symbolic(slots)?,
        Canonical::RectPure { block, word } => {
            if !word.is_identity() {
                LimitMoment::constant(0)
            } else {
                let numerator = match block {
                    Block::T => CPolynomial::c(),
                    Block::U => CPolynomial::one(),
                };
                LimitMoment {
                    numerator,
                    one_plus_c_power: 1,
                }
            }
        }
        Canonical::Zero => LimitMoment::constant(0),
    })
}

/// `φ_τ(A_1, ..., A_n)`: product over the cycles of `τ` of the moment of the
/// cycle, where `moment` receives 1-based positions in cycle order.
pub fn phi_tau<V, F>(tau: &Perm, moment: F) -> V
where
    V: One + Mul<Output = V>,
    F: Fn(&[usize]) -> V,
{
    tau.cycles().iter().fold(V::one(), |acc, c| acc * moment(c))
}

/// Free cumulants `k_1..k_n` of a single variable from its moments `m_1..m_n`.
pub fn cumulants_from_moments<V>(moments: &[V]) -> Result<Vec<V>>
where
    V: Clone + Zero + One + Add<Output = V> + Sub<Output = V> + Mul<Output = V>,
{
    let mut k: Vec<V> = Vec::with_capacity(moments.len());
    for n in 1..=moments.len() {
        let gamma = Perm::gamma(n);
        let mut rest = V::zero();
        for tau in enumerate_noncrossing(n)? {
            if tau == gamma {
                continue;
            }
            rest = rest + phi_tau(&tau, |c| k[c.len() - 1].clone());
        }
        k.push(moments[n - 1].clone() - rest);
    }
    Ok(k)
}

/// Moments `m_1..m_n` of a single variable from its free cumulants.
pub fn moments_from_cumulants<V>(cumulants: &[V]) -> Result<Vec<V>>
where
    V: Clone + Zero + One + Add<Output = V> + Mul<Output = V>,
{
    (1..=cumulants.len())
        .map(|n| {
            let mut m = V::zero();
            for tau in enumerate_noncrossing(n)? {
                m = m + phi_tau(&tau, |c| cumulants[c.len() - 1].clone());
            }
            Ok(m)
        })
        .collect()
}

/// Multivariate free cumulant `k_n(A_{l_1}, ..., A_{l_n})` from a moment
/// functional on label sequences.
pub fn mixed_cumulant<V, F>(labels: &[usize], moment: &F) -> Result<V>
where
    V: Clone + Zero + One + Add<Output = V> + Sub<Output = V> + Mul<Output = V>,
    F: Fn(&[usize]) -> V,
{
    let mut memo = HashMap::new();
    mixed_cumulant_memo(labels, moment, &mut memo)
}

fn mixed_cumulant_memo<V, F>(
    labels: &[usize],
    moment: &F,
    memo: &mut HashMap<Vec<usize>, V>,
) -> Result<V>
where
    V: Clone + Zero + One + Add<Output = V> + Sub<Output = V> + Mul<Output = V>,
    F: Fn(&[usize]) -> V,
{
    if let Some(v) = memo.get(labels) {
        return Ok(v.clone());
    }
    let n = labels.len();
    let gamma = Perm::gamma(n);
    let mut rest = V::zero();
    for tau in enumerate_noncrossing(n)? {
        if tau == gamma {
            continue;
        }
        let mut term = V::one();
        for c in tau.cycles().iter() {
            let sub: Vec<usize> = c.iter().map(|&a| labels[a - 1]).collect();
            term = term * mixed_cumulant_memo(&sub, moment, memo)?;
        }
        rest = rest + term;
    }
    let k = moment(labels) - rest;
    memo.insert(labels.to_vec(), k.clone());
    Ok(k)
}

/// Floating-point convenience for [`LimitMoment::eval`] at a rational `c`.
pub fn eval_at(m: &LimitMoment, c: &BigRational) -> f64 {
    m.eval_exact(c).to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::Monomial;

    fn canon(text: &str) -> Canonical {
        Monomial::parse(text, 2).unwrap().canonicalize()
    }

    fn gauss(text: &str) -> BigInt {
        match canon(text) {
            Canonical::Gaussian(s) => circular_mixed_moment(&s).unwrap(),
            other => panic!("{other:?}"),
        }
    }

    fn wishart(text: &str) -> CPolynomial {
        match canon(text) {
            Canonical::Wishart(s) => free_poisson_mixed_moment(&s).unwrap(),
            other => panic!("{other:?}"),
        }
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn haar_words() {
        assert_eq!(haar_word_moment(&FreeWord::identity()), 1);
        assert_eq!(haar_word_moment(&FreeWord::generator(1)), 0);
        assert_eq!(haar_word_moment(&FreeWord::parse("g1.g2.g1^-1.g2^-1", 2).unwrap()), 0);
    }

    #[test]
    fn circular_examples() {
        assert_eq!(gauss("G1 U[e] G1* U[e]"), 1.into());
        assert_eq!(gauss("G1 U[e] G1* U[e] G1 U[e] G1* U[e]"), 2.into());
        assert_eq!(gauss("G1 U[g1] G1* U[g1^-1]"), 0.into());
        assert_eq!(gauss("G1 U[e] G2* U[e]"), 0.into());
        assert_eq!(gauss("G1 G1"), 0.into());
        assert_eq!(gauss("G1 G1* G1"), 0.into());
    }

    #[test]
    fn free_poisson_examples() {
        assert_eq!(wishart("W1").to_string(), "c");
        assert_eq!(wishart("W1 W1").to_string(), "c^2 + c");
        assert_eq!(wishart("W1 W1 W1").to_string(), "c^3 + 3c^2 + c");
        assert_eq!(wishart("W1 U[g1] W1 U[g1^-1]").to_string(), "c^2");
        assert_eq!(wishart("W1 W2").to_string(), "c^2");
    }

    #[test]
    fn rectangular_examples() {
        let Canonical::Rectangular(slots) = canon("H1* T[e] H1 U[e]") else { panic!() };
        let sym = rectangular_limit_symbolic(&slots).unwrap();
        assert_eq!(sym.to_string(), "(c)/(1 + c)^2");
        for c in [rat(1, 1), rat(1, 3), rat(5, 2)] {
            let expected = &c / ((BigRational::one() + &c) * (BigRational::one() + &c));
            assert_eq!(sym.eval_exact(&c), expected);
            assert_eq!(rectangular_limit_moment(&slots, &c).unwrap(), expected);
        }
        let Canonical::Rectangular(slots) = canon("H1* T[g1] H1 U[e]") else { panic!() };
        assert!(rectangular_limit_moment(&slots, &rat(1, 1)).unwrap().is_zero());
        assert_eq!(freeness_prediction(&canon("H1* T[e] H1 U[e] H1")).unwrap(), LimitMoment::constant(0));
    }

    #[test]
    fn rect_pure_words() {
        let t = freeness_prediction(&canon("T[e]")).unwrap();
        assert_eq!(t.eval_exact(&rat(2, 1)), rat(2, 3));
        let u = freeness_prediction(&canon("T[e] H1 U[e] H1*")).unwrap();
        // rotates to H1* T[e] H1 U[e]
        assert_eq!(u.eval_exact(&rat(1, 1)), rat(1, 4));
        assert_eq!(freeness_prediction(&canon("T[e] T[e] H1* H1")).unwrap(), LimitMoment::constant(0));
    }

    #[test]
    fn prediction_dispatch() {
        assert_eq!(freeness_prediction(&canon("U[e]")).unwrap(), LimitMoment::constant(1));
        assert_eq!(freeness_prediction(&canon("U[g1^2]")).unwrap(), LimitMoment::constant(0));
        assert_eq!(freeness_prediction(&canon("G1 U[e] G2* U[e]")).unwrap(), LimitMoment::constant(0));
    }

    #[test]
    fn phi_tau_example() {
        // φ(A1 A3 A6) φ(A2) φ(A4 A5) with φ(word) encoded as a product of primes
        let primes = [2u64, 3, 5, 7, 11, 13];
        let tau = Perm::parse_cycles(6, "(1,3,6)(2)(4,5)").unwrap();
        let moment = |c: &[usize]| -> BigInt {
            let code: u64 = c.iter().map(|&a| primes[a - 1]).sum::<u64>() * 100 + c.len() as u64;
            BigInt::from(code)
        };
        let got = phi_tau(&tau, moment);
        let expected = BigInt::from((2 + 5 + 13) * 100 + 3) * BigInt::from(3 * 100 + 1) * BigInt::from((7 + 11) * 100 + 2);
        assert_eq!(got, expected);
        let ident = phi_tau(&Perm::identity(3), |c: &[usize]| BigInt::from(c[0] + 1));
        assert_eq!(ident, BigInt::from(24));
        let full = phi_tau(&Perm::gamma(4), |c: &[usize]| BigInt::from(c.len()));
        assert_eq!(full, BigInt::from(4));
    }

    #[test]
    fn cumulant_examples() {
        let m = vec![rat(3, 1), rat(11, 1), rat(2, 7)];
        let k = cumulants_from_moments(&m).unwrap();
        assert_eq!(k[0], m[0]);
        assert_eq!(k[1], &m[1] - &m[0] * &m[0]);
        assert_eq!(moments_from_cumulants(&k).unwrap(), m);

        // k2(A, B) = φ(AB) - φ(A)φ(B) for a bivariate table
        let table = |l: &[usize]| -> BigRational {
            match l {
                [0] => rat(2, 1),
                [1] => rat(5, 1),
                [0, 1] => rat(17, 1),
                [1, 0] => rat(17, 1),
                _ => rat(1, 1),
            }
        };
        assert_eq!(mixed_cumulant(&[0, 1], &table).unwrap(), rat(7, 1));
        assert_eq!(mixed_cumulant(&[1], &table).unwrap(), rat(5, 1));

        // constant cumulants c: moments are Σ_{NC_n} c^{#τ}
        let ks = vec![CPolynomial::c(); 4];
        let ms = moments_from_cumulants(&ks).unwrap();
        assert_eq!(ms[3].to_string(), "c^4 + 6c^3 + 6c^2 + c");
    }
}
