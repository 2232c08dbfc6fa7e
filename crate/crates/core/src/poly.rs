//! Polynomials in the ratio parameter `c` with big-integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `Σ coeff_k · c^k`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CPolynomial {
    coefficients: BTreeMap<u32, BigInt>,
}

impl CPolynomial {
    pub fn constant(v: impl Into<BigInt>) -> Self {
        Self::monomial(v, 0)
    }

    /// `coeff · c^power`.
    pub fn monomial(coeff: impl Into<BigInt>, power: u32) -> Self {
        let coeff = coeff.into();
        let mut coefficients = BTreeMap::new();
        if !coeff.is_zero() {
            coefficients.insert(power, coeff);
        }
        CPolynomial { coefficients }
    }

    /// The polynomial `c`.
    pub fn c() -> Self {
        Self::monomial(1, 1)
    }

    pub fn coefficient(&self, power: u32) -> BigInt {
        self.coefficients.get(&power).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigInt)> {
        self.coefficients.iter().map(|(k, v)| (*k, v))
    }

    pub fn degree(&self) -> Option<u32> {
        self.coefficients.keys().next_back().copied()
    }

    pub fn eval_exact(&self, c: &BigRational) -> BigRational {
        // Horner from the top degree
        let Some(deg) = self.degree() else {
            return BigRational::zero();
        };
        let mut acc = BigRational::zero();
        for k in (0..=deg).rev() {
            acc = acc * c + BigRational::from_integer(self.coefficient(k));
        }
        acc
    }

    pub fn eval(&self, c: f64) -> f64 {
        self.coefficients
            .iter()
            .map(|(k, v)| v.to_f64().unwrap_or(f64::NAN) * c.powi(*k as i32))
            .fold(0.0, |a, b| a + b)
    }

    fn add_term(&mut self, power: u32, coeff: BigInt) {
        let slot = self.coefficients.entry(power).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.coefficients.remove(&power);
        }
    }
}

impl Add for CPolynomial {
    type Output = CPolynomial;

    fn add(mut self, rhs: CPolynomial) -> CPolynomial {
        for (k, v) in rhs.coefficients {
            self.add_term(k, v);
        }
        self
    }
}

impl Mul for CPolynomial {
    type Output = CPolynomial;

    fn mul(self, rhs: CPolynomial) -> CPolynomial {
        let mut out = CPolynomial::default();
        for (i, a) in &self.coefficients {
            for (j, b) in &rhs.coefficients {
                out.add_term(i + j, a * b);
            }
        }
        out
    }
}

impl Zero for CPolynomial {
    fn zero() -> Self {
        CPolynomial::default()
    }

    fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }
}

impl One for CPolynomial {
    fn one() -> Self {
        CPolynomial::constant(1)
    }
}

impl fmt::Display for CPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, v)) in self.coefficients.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match (*k, v.is_one()) {
                (0, _) => write!(f, "{v}")?,
                (1, true) => f.write_str("c")?,
                (1, false) => write!(f, "{v}c")?,
                (k, true) => write!(f, "c^{k}")?,
                (k, false) => write!(f, "{v}c^{k}")?,
            }
        }
        Ok(())
    }
}
