//! Dense complex matrices with permutation matrices applied as index maps.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::perm::Perm;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// `Σ_k a_k · conj(b_k)`.
fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let (mut re0, mut im0, mut re1, mut im1) = (0.0, 0.0, 0.0, 0.0);
    let mut ca = a.chunks_exact(2);
    let mut cb = b.chunks_exact(2);
    for (x, y) in (&mut ca).zip(&mut cb) {
        re0 += x[0].re * y[0].re + x[0].im * y[0].im;
        im0 += x[0].im * y[0].re - x[0].re * y[0].im;
        re1 += x[1].re * y[1].re + x[1].im * y[1].im;
        im1 += x[1].im * y[1].re - x[1].re * y[1].im;
    }
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        re0 += x.re * y.re + x.im * y.im;
        im0 += x.im * y.re - x.re * y.im;
    }
    Complex64::new(re0 + re1, im0 + im1)
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// The permutation matrix `Mat σ`, with `(Mat σ)_{ij} = 1` iff `σ(j) = i`.
    pub fn from_perm(p: &Perm) -> Self {
        let n = p.len();
        let mut m = Self::zeros(n, n);
        for (j, &i) in p.images0().iter().enumerate() {
            m.data[i as usize * n + j] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, k: f64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::validation("matrix sizes differ"));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// `self · other*`.
    pub fn mul_adjoint(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::validation(format!(
                "cannot multiply {}x{} by the adjoint of {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a = self.row(i);
            for j in 0..other.rows {
                out.data[i * other.rows + j] = dot_conj(a, other.row(j));
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::validation(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        self.mul_adjoint(&other.adjoint())
    }

    /// `self · self*`, filling one triangle and mirroring.
    pub fn gram(&self) -> Self {
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            let a = self.row(i);
            for j in i..n {
                let v = dot_conj(a, self.row(j));
                out.data[i * n + j] = v;
                out.data[j * n + i] = v.conj();
            }
        }
        out
    }

    /// `Mat σ · self`: row `i` of the result is row `σ⁻¹(i)` of `self`.
    pub fn permute_rows(&self, p: &Perm) -> Result<Self> {
        if p.len() != self.rows {
            return Err(Error::validation("permutation size differs from row count"));
        }
        let mut out = Self::zeros(self.rows, self.cols);
        for (j, &i) in p.images0().iter().enumerate() {
            let i = i as usize;
            out.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(self.row(j));
        }
        Ok(out)
    }

    /// `self · Mat σ`: column `k` of the result is column `σ(k)` of `self`.
    pub fn permute_cols(&self, p: &Perm) -> Result<Self> {
        if p.len() != self.cols {
            return Err(Error::validation("permutation size differs from column count"));
        }
        let img = p.images0();
        Ok(Self::from_fn(self.rows, self.cols, |i, k| self.get(i, img[k] as usize)))
    }

    /// Unnormalized trace.
    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> Result<Complex64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::validation("trace of a non-square product"));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.get(i, k) * other.get(k, i);
            }
        }
        Ok(acc)
    }

    /// `Tr(self · other · Mat σ) = Σ_{i,k} self_{ik} other_{k, σ(i)}`.
    pub fn trace_of_product_perm(&self, other: &Self, p: &Perm) -> Result<Complex64> {
        if self.cols != other.rows || self.rows != other.cols || p.len() != self.rows {
            return Err(Error::validation("trace of a non-square product"));
        }
        let img = p.images0();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            let col = img[i] as usize;
            for k in 0..self.cols {
                acc += self.get(i, k) * other.get(k, col);
            }
        }
        Ok(acc)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
