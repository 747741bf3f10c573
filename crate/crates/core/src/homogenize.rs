//! Slow-manifold construction of the homogenised wave model.
//!
//! For each wavenumber the cell displacements lie on
//! `u = a(k) U`, `a(k) = 1 + i k alpha + k^2 beta + O(k^3)`, and the mean
//! amplitude evolves by `d^2 U / dt^2 = g(k) U` with `g(k) = -c k^2 + O(k^3)`.
//! The shape and evolution are refined by residual-driven corrections: each
//! sweep picks the evolution correction from the solvability condition and
//! the shape correction from `L_0`, with one equation replaced by the
//! amplitude constraint that corrections average to zero.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dense;
use crate::error::{Error, Result};
use crate::kpoly::{KPoly, KPolyMatrix, ORDER};
use crate::lattice::{
    exact_wavenumber_operator, mass_diagonal, wavenumber_operator, zero_wavenumber_operator,
    LatticeSpec,
};

pub const DEFAULT_MAX_ITER: usize = 12;

/// Convergence threshold on residual coefficients, relative to `||L_0||_F`.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SlowManifold {
    /// Shape `a(k)` per mass, flat cell order.
    pub shape: Vec<KPoly>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Evolution `g(k)`; the velocity obeys `dV/dt = g(k) U`.
    pub evolution: KPoly,
    /// Effective coefficient `kappa_bar / rho_bar`.
    pub c: f64,
    pub iterations: usize,
    pub residual_norm: f64,
    /// Largest imaginary remainder discarded when extracting `alpha`, `beta`.
    pub extraction_defect: f64,
}

impl SlowManifold {
    pub fn mean_alpha(&self) -> f64 {
        mean(&self.alpha)
    }

    pub fn mean_beta(&self) -> f64 {
        mean(&self.beta)
    }

    /// Population standard deviation of `alpha`.
    pub fn std_alpha(&self) -> f64 {
        std_dev(&self.alpha)
    }

    pub fn std_beta(&self) -> f64 {
        std_dev(&self.beta)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

/// Residual `B (a g) - L_k a` of a candidate shape and evolution.
pub fn manifold_residual(
    mass: &DVector<f64>,
    lk: &KPolyMatrix,
    shape: &[KPoly],
    evolution: &KPoly,
) -> Result<Vec<KPoly>> {
    let stiff = lk.apply(shape)?;
    Ok(shape
        .iter()
        .zip(stiff)
        .zip(mass.iter())
        .map(|((a, la), &b)| (*a * *evolution) * b - la)
        .collect())
}

fn max_coeff(res: &[KPoly]) -> f64 {
    res.iter().map(KPoly::max_abs).fold(0.0, f64::max)
}

pub fn construct_slow_manifold(spec: &LatticeSpec, max_iter: usize) -> Result<SlowManifold> {
    construct_slow_manifold_with_tol(spec, max_iter, DEFAULT_RESIDUAL_TOL)
}

pub fn construct_slow_manifold_with_tol(
    spec: &LatticeSpec,
    max_iter: usize,
    rel_tol: f64,
) -> Result<SlowManifold> {
    spec.check()?;
    let n = spec.cell_size();
    let mass = mass_diagonal(spec);
    let total_mass: f64 = mass.sum();
    let lk = wavenumber_operator(spec);
    let l0 = zero_wavenumber_operator(spec);
    // a single-mass cell has L_0 = 0; fall back to the scale of L_k
    let scale = if l0.norm() > 0.0 {
        l0.norm()
    } else {
        (0..=ORDER)
            .map(|q| lk.coefficient(q).norm())
            .fold(0.0, f64::max)
    };
    let tol = rel_tol * scale;

    let mut constrained = l0.clone();
    constrained.row_mut(n - 1).fill(1.0);
    let lu = constrained.lu();
    if !lu.is_invertible() {
        return Err(Error::SingularSolve);
    }
    let rcond_probe = lu
        .solve(&DVector::from_element(n, 1.0))
        .ok_or(Error::SingularSolve)?;
    if !rcond_probe.iter().all(|x| x.is_finite()) {
        return Err(Error::SingularSolve);
    }

    let mut shape = vec![KPoly::one(); n];
    let mut evolution = KPoly::zero();
    let mut residual = manifold_residual(&mass, &lk, &shape, &evolution)?;
    let mut residual_norm = max_coeff(&residual);
    let mut iterations = 0;

    while residual_norm > tol {
        if iterations == max_iter {
            return Err(Error::NotConverged {
                iterations,
                residual: residual_norm,
            });
        }
        iterations += 1;

        // Solvability: pick the evolution correction so that the forcing is
        // orthogonal to the constant vector.
        let sum = residual.iter().fold(KPoly::zero(), |acc, &r| acc + r);
        let g_hat = sum * (-1.0 / total_mass);
        evolution += g_hat;

        let mut forcing: Vec<KPoly> = residual
            .iter()
            .zip(mass.iter())
            .map(|(&r, &b)| r + g_hat * b)
            .collect();
        forcing[n - 1] = KPoly::zero();

        let mut correction = vec![KPoly::zero(); n];
        for power in 0..=ORDER {
            for part in [Part::Re, Part::Im] {
                let rhs =
                    DVector::from_iterator(n, forcing.iter().map(|f| part.get(f.coeff(power))));
                if rhs.iter().all(|&x| x == 0.0) {
                    continue;
                }
                let sol = lu.solve(&rhs).ok_or(Error::SingularSolve)?;
                for (c, &x) in correction.iter_mut().zip(sol.iter()) {
                    *c.coeff_mut(power) += part.unit() * x;
                }
            }
        }
        let others = correction[..n - 1]
            .iter()
            .fold(KPoly::zero(), |acc, &c| acc + c);
        correction[n - 1] = -others;
        for (a, c) in shape.iter_mut().zip(correction) {
            *a += c;
        }

        residual = manifold_residual(&mass, &lk, &shape, &evolution)?;
        residual_norm = max_coeff(&residual);
    }

    let alpha: Vec<f64> = shape.iter().map(|a| a.coeff(1).im).collect();
    let beta: Vec<f64> = shape.iter().map(|a| a.coeff(2).re).collect();
    let extraction_defect = shape
        .iter()
        .map(|a| a.coeff(1).re.abs().max(a.coeff(2).im.abs()))
        .fold(0.0, f64::max);
    let c = -evolution.coeff(2).re;

    Ok(SlowManifold {
        shape,
        alpha,
        beta,
        evolution,
        c,
        iterations,
        residual_norm,
        extraction_defect,
    })
}

#[derive(Clone, Copy)]
enum Part {
    Re,
    Im,
}

impl Part {
    fn get(self, z: Complex64) -> f64 {
        match self {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }

    fn unit(self) -> Complex64 {
        match self {
            Part::Re => Complex64::new(1.0, 0.0),
            Part::Im => Complex64::new(0.0, 1.0),
        }
    }
}

/// Effective wave coefficient `c = -[k^2] g`.
pub fn effective_coefficient(sm: &SlowManifold) -> f64 {
    -sm.evolution.coeff(2).re
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormResult {
    pub rho_bar: f64,
    pub kappa_bar: f64,
}

impl ClosedFormResult {
    pub fn ratio(&self) -> f64 {
        self.kappa_bar / self.rho_bar
    }
}

/// Explicit effective density and elasticity of a two-strand, two-periodic
/// lattice.
pub fn closed_form_two_strand(spec: &LatticeSpec) -> Result<ClosedFormResult> {
    if spec.s != 2 || spec.p != 2 {
        return Err(Error::OutOfScope(format!(
            "two-strand two-periodic formula needs s = p = 2, got s = {}, p = {}",
            spec.s, spec.p
        )));
    }
    spec.check()?;
    let k = &spec.kappa_long;
    let (k00, k01, k10, k11) = (k[0][0], k[0][1], k[1][0], k[1][1]);
    let c0 = spec.kappa_cross[0][0][1];
    let c1 = spec.kappa_cross[1][0][1];
    let rho_bar = spec.rho.iter().flatten().sum::<f64>() / 4.0;
    let inv_sum = 1.0 / k00 + 1.0 / k01 + 1.0 / k10 + 1.0 / k11;
    let cross_sum = c1 + c0;
    let num = c0 * c1 * (k01 + k00) * (k11 + k10) + cross_sum * k00 * k01 * k10 * k11 * inv_sum;
    let den = c0 * c1 * (k00 + k01 + k10 + k11) + cross_sum * (k11 + k01) * (k10 + k00);
    Ok(ClosedFormResult {
        rho_bar,
        kappa_bar: num / den,
    })
}

/// All generalised eigenvalues of `lambda B w = -L_k w` at a real wavenumber,
/// ascending, using exact exponentials.
pub fn dispersion_eigenvalues(spec: &LatticeSpec, k: f64) -> Result<Vec<f64>> {
    spec.check()?;
    let lk = exact_wavenumber_operator(spec, k);
    let inv_sqrt: Vec<f64> = mass_diagonal(spec).iter().map(|b| 1.0 / b.sqrt()).collect();
    let n = spec.cell_size();
    let scaled = DMatrix::from_fn(n, n, |i, j| -lk[(i, j)] * (inv_sqrt[i] * inv_sqrt[j]));
    let eig = scaled
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen(format!("Hermitian eigensolve at k = {k}")))?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Least-squares fit `lambda_0(k) ~ c k^2 + d k^4` of the acoustic branch,
/// returning `c`. With a single sample only the quadratic term is fitted.
pub fn dispersion_fit(spec: &LatticeSpec, k_samples: &[f64]) -> Result<f64> {
    let samples: Vec<(f64, f64)> = k_samples
        .iter()
        .filter(|k| **k != 0.0)
        .map(|&k| Ok((k, dispersion_eigenvalues(spec, k)?[0])))
        .collect::<Result<_>>()?;
    if samples.is_empty() {
        return Err(Error::Eigen(
            "dispersion fit needs a nonzero wavenumber".into(),
        ));
    }
    let quartic = samples.len() >= 2;
    let cols = if quartic { 2 } else { 1 };
    // scale columns to unit size so the fit stays well conditioned
    let kmax = samples.iter().map(|s| s.0.abs()).fold(0.0, f64::max);
    let a = DMatrix::from_fn(samples.len(), cols, |r, c| {
        (samples[r].0 / kmax).powi(2 * (c as i32 + 1))
    });
    let y = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1 / (kmax * kmax)));
    let sol = dense::lstsq(&a, &y, 0.0)?;
    Ok(sol[0])
}

/// Default fit wavenumbers `{1, 2, 4} * 1e-3 / (p h)`.
pub fn default_fit_wavenumbers(spec: &LatticeSpec) -> [f64; 3] {
    let cell = spec.p as f64 * spec.h;
    [1e-3 / cell, 2e-3 / cell, 4e-3 / cell]
}
