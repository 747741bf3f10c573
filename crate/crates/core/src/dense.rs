//! Dense decompositions on nalgebra matrices, computed with faer.

use faer::Mat;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

fn to_faer<T: faer::traits::ComplexField + Copy>(m: &DMatrix<T>) -> Mat<T> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer<T: nalgebra::Scalar + Copy>(m: faer::MatRef<'_, T>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full singular value decomposition `m = U diag(s) V^*`, singular values
/// descending. `u` is square in the row count, `v` in the column count.
#[derive(Clone, Debug)]
pub struct Svd<T: nalgebra::Scalar> {
    pub u: DMatrix<T>,
    pub s: Vec<f64>,
    pub v: DMatrix<T>,
}

macro_rules! svd_impl {
    ($name:ident, $t:ty, $abs:expr) => {
        pub fn $name(m: &DMatrix<$t>) -> Result<Svd<$t>> {
            if m.is_empty() {
                return Ok(Svd {
                    u: DMatrix::identity(m.nrows(), m.nrows()),
                    s: Vec::new(),
                    v: DMatrix::identity(m.ncols(), m.ncols()),
                });
            }
            let f = to_faer(m);
            let svd = f
                .svd()
                .map_err(|e| Error::Eigen(format!("SVD failed: {e:?}")))?;
            let sd = svd.S().column_vector();
            let s: Vec<f64> = (0..sd.nrows()).map(|i| $abs(sd[i])).collect();
            let (u, v) = (from_faer(svd.U()), from_faer(svd.V()));
            debug_assert!(s.windows(2).all(|w| w[0] >= w[1]));
            Ok(Svd { u, s, v })
        }
    };
}

svd_impl!(svd, f64, |x: f64| x.abs());
svd_impl!(svd_complex, Complex64, |x: Complex64| x.norm());

/// Minimum-norm least-squares solution of `a x = b`, discarding singular
/// values below `rel_cut * s_max`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rel_cut: f64) -> Result<DVector<f64>> {
    let d = svd(a)?;
    let top = d.s.first().copied().unwrap_or(0.0);
    let mut x = DVector::zeros(a.ncols());
    for (i, &si) in d.s.iter().enumerate() {
        if si > rel_cut * top && si > 0.0 {
            let coef = d.u.column(i).dot(b) / si;
            x += d.v.column(i) * coef;
        }
    }
    Ok(x)
}

/// Eigenvalues of a general real matrix.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    to_faer(m)
        .eigenvalues()
        .map_err(|e| Error::Eigen(format!("eigenvalue solve failed: {e:?}")))
}
