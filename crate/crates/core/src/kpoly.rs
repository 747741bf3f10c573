//! Polynomials in the wavenumber `k` truncated after the `k^2` term.
//!
//! Every product silently drops contributions of order three and higher, so
//! all quantities built here carry an `O(k^3)` error. Coefficients are complex
//! because the Fourier couplings mix in factors of `i k`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest retained power of `k`.
pub const ORDER: usize = 2;

const LEN: usize = ORDER + 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KPoly {
    coeffs: [Complex64; LEN],
}

/// Sign of the exponent in `exp(±i k h)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Plus,
    Minus,
}

impl Phase {
    fn sign(self) -> f64 {
        match self {
            Phase::Plus => 1.0,
            Phase::Minus => -1.0,
        }
    }
}

impl Default for KPoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl KPoly {
    pub fn new(coeffs: [Complex64; LEN]) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: [f64; LEN]) -> Self {
        Self {
            coeffs: coeffs.map(|c| Complex64::new(c, 0.0)),
        }
    }

    pub fn zero() -> Self {
        Self {
            coeffs: [Complex64::new(0.0, 0.0); LEN],
        }
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.coeffs[0] = Complex64::new(c, 0.0);
        p
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// Truncation order of the representation (always [`ORDER`]).
    pub fn order(&self) -> usize {
        ORDER
    }

    pub fn coeffs(&self) -> &[Complex64; LEN] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> Complex64 {
        self.coeffs[power]
    }

    pub fn coeff_mut(&mut self, power: usize) -> &mut Complex64 {
        &mut self.coeffs[power]
    }

    /// Taylor expansion `1 ± i k h - h^2 k^2 / 2` of `exp(±i k h)`.
    pub fn exp_ikh(phase: Phase, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidSpacing(h));
        }
        Ok(Self::new([
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, phase.sign() * h),
            Complex64::new(-0.5 * h * h, 0.0),
        ]))
    }

    /// Horner evaluation at a real wavenumber.
    pub fn eval(&self, k: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * k + c)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.map(|x| x * c),
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for KPoly {
    type Output = KPoly;
    fn add(mut self, rhs: KPoly) -> KPoly {
        self += rhs;
        self
    }
}

impl AddAssign for KPoly {
    fn add_assign(&mut self, rhs: KPoly) {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for KPoly {
    type Output = KPoly;
    fn sub(self, rhs: KPoly) -> KPoly {
        self + (-rhs)
    }
}

impl Neg for KPoly {
    type Output = KPoly;
    fn neg(self) -> KPoly {
        KPoly {
            coeffs: self.coeffs.map(|c| -c),
        }
    }
}

impl Mul for KPoly {
    type Output = KPoly;
    fn mul(self, rhs: KPoly) -> KPoly {
        let mut out = KPoly::zero();
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs[..LEN - i].iter().enumerate() {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }
}

impl Mul<f64> for KPoly {
    type Output = KPoly;
    fn mul(self, rhs: f64) -> KPoly {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl Mul<Complex64> for KPoly {
    type Output = KPoly;
    fn mul(self, rhs: Complex64) -> KPoly {
        self.scale(rhs)
    }
}

/// Dense matrix of truncated polynomials, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct KPolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<KPoly>,
}

impl KPolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![KPoly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = KPoly::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> KPoly) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    /// Matrix-vector product in the truncated algebra.
    pub fn apply(&self, v: &[KPoly]) -> Result<Vec<KPoly>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.entries[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(KPoly::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    /// Entry-wise evaluation at a real wavenumber.
    pub fn eval(&self, k: f64) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].eval(k))
    }

    /// The matrix of `k^power` coefficients.
    pub fn coefficient(&self, power: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].coeff(power))
    }
}

impl std::ops::Index<(usize, usize)> for KPolyMatrix {
    type Output = KPoly;
    fn index(&self, (i, j): (usize, usize)) -> &KPoly {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for KPolyMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut KPoly {
        &mut self.entries[i * self.cols + j]
    }
}
