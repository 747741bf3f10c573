//! Slowest modes of the full microscale lattice and of the macroscale wave
//! equation, their comparison, and spectral sanity checks of `L_0`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::MacroBc;
use crate::error::{Error, Result};
use crate::homogenize::SlowManifold;
use crate::lattice::{mass_diagonal, steady_operator, zero_wavenumber_operator, LatticeSpec};

/// Eigenvalues at most this fraction of the largest count as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Spectrum of `-K w = lambda M w` on the whole lattice with `u = 0` at both
/// ends. Eigenvectors are over the interior columns `1..N`, `s` per column.
fn microscale_eigen(spec: &LatticeSpec) -> Result<(Vec<f64>, DMatrix<f64>)> {
    spec.check()?;
    let s = spec.s;
    let rows = spec.n_intervals - 1;
    let n = s * rows;
    let full = steady_operator(spec, rows);
    let stiffness = full.columns(s, n).into_owned();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|r| {
            let col = r / s + 1;
            1.0 / (spec.density(col as i64, r % s) * spec.h * spec.h).sqrt()
        })
        .collect();
    let sym = DMatrix::from_fn(n, n, |i, j| {
        // symmetrise away rounding; the stiffness is symmetric by construction
        -0.5 * (stiffness[(i, j)] + stiffness[(j, i)]) * inv_sqrt[i] * inv_sqrt[j]
    });
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Eigen("microscale eigensolve did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])] * inv_sqrt[r]);
    Ok((values, vectors))
}

/// All eigenvalues of the pinned microscale lattice, ascending.
pub fn microscale_spectrum(spec: &LatticeSpec) -> Result<Vec<f64>> {
    Ok(microscale_eigen(spec)?.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct MicroMode {
    pub lambda: f64,
    /// `values[n][j]` for columns `n = 0..=N`, zero at both ends.
    pub values: Vec<Vec<f64>>,
}

impl MicroMode {
    pub fn strand_average(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect()
    }
}

pub fn microscale_slowest_mode(spec: &LatticeSpec) -> Result<MicroMode> {
    let (values, vectors) = microscale_eigen(spec)?;
    let top = values.iter().copied().fold(0.0f64, |a, b| a.max(b.abs()));
    let idx = values
        .iter()
        .position(|&l| l > ZERO_TOL * top)
        .ok_or_else(|| Error::Eigen("no positive microscale eigenvalue".into()))?;
    let s = spec.s;
    let mut cols = vec![vec![0.0; s]; spec.n_intervals + 1];
    for r in 0..vectors.nrows() {
        cols[r / s + 1][r % s] = vectors[(r, idx)];
    }
    Ok(MicroMode {
        lambda: values[idx],
        values: cols,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MacroMode {
    pub lambda: f64,
    pub q: f64,
    pub values: Vec<f64>,
}

/// Boundary functional `a U + b dU/dx` at one end.
pub type Homogeneous = (f64, f64);

/// Smallest positive `q` with a nontrivial `A sin qx + B cos qx` meeting both
/// homogeneous conditions, found by a sign scan then bisection on `(0, 3 pi / L]`.
pub fn macroscale_slowest_mode(
    c: f64,
    length: f64,
    left: Homogeneous,
    right: Homogeneous,
    x: &[f64],
) -> Result<MacroMode> {
    if !(c > 0.0) || !(length > 0.0) {
        return Err(Error::OutOfScope(format!(
            "macroscale mode needs c > 0 and L > 0 (c = {c}, L = {length})"
        )));
    }
    let (a0, b0) = left;
    let (al, bl) = right;
    // U = a0 sin(qx) - b0 q cos(qx) meets the left condition for every q
    let g = |q: f64| {
        let (sn, cs) = (q * length).sin_cos();
        (sn * (al * a0 + bl * b0 * q * q) + q * cs * (bl * a0 - al * b0)) / q
    };
    let upper = 3.0 * std::f64::consts::PI / length;
    let steps = 3000;
    let mut lo = upper * 1e-6;
    let mut g_lo = g(lo);
    let mut bracket = None;
    for i in 1..=steps {
        let hi = upper * i as f64 / steps as f64;
        let g_hi = g(hi);
        if g_hi == 0.0 {
            bracket = Some((hi, hi));
            break;
        }
        if g_lo != 0.0 && g_lo.signum() != g_hi.signum() {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        g_lo = g_hi;
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::NoRootInBracket { upper })?;
    let mut g_lo = g(lo);
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if gm.signum() == g_lo.signum() {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    let q = 0.5 * (lo + hi);
    let mut values: Vec<f64> = x
        .iter()
        .map(|&xi| a0 * (q * xi).sin() - b0 * q * (q * xi).cos())
        .collect();
    normalise_unit_max(&mut values);
    Ok(MacroMode {
        lambda: c * q * q,
        q,
        values,
    })
}

fn normalise_unit_max(v: &mut [f64]) {
    let pivot = v
        .iter()
        .copied()
        .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    if pivot != 0.0 {
        v.iter_mut().for_each(|x| *x /= pivot);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModeComparison {
    pub n_grid: Vec<usize>,
    pub x_grid: Vec<f64>,
    pub micro_mode: Vec<Vec<f64>>,
    pub micro_average: Vec<f64>,
    pub macro_robin: Vec<f64>,
    pub macro_dirichlet: Vec<f64>,
    pub lambda_micro: f64,
    pub lambda_robin: f64,
    pub lambda_dirichlet: f64,
    pub interior_error_robin: f64,
    pub interior_error_dirichlet: f64,
    /// Inclusive column range used for the errors.
    pub window: (usize, usize),
}

/// Columns `p..=N-p`: everything but the first and last cell.
pub fn interior_window(spec: &LatticeSpec) -> (usize, usize) {
    let n = spec.n_intervals;
    if n >= 2 * spec.p + 1 {
        (spec.p, n - spec.p)
    } else {
        (1, n - 1)
    }
}

/// Scale `model` by the least-squares factor matching `target` on the
/// window, and return the relative L2 error there.
fn fit_and_error(target: &[f64], model: &mut [f64], window: (usize, usize)) -> f64 {
    let range = window.0..=window.1;
    let dot: f64 = range.clone().map(|i| target[i] * model[i]).sum();
    let nn: f64 = range.clone().map(|i| model[i] * model[i]).sum();
    if nn > 0.0 {
        let a = dot / nn;
        model.iter_mut().for_each(|x| *x *= a);
    }
    let err: f64 = range.clone().map(|i| (target[i] - model[i]).powi(2)).sum();
    let base: f64 = range.map(|i| target[i] * target[i]).sum();
    (err / base).sqrt()
}

pub fn compare_modes(
    spec: &LatticeSpec,
    sm: &SlowManifold,
    left: &MacroBc,
    right: &MacroBc,
) -> Result<ModeComparison> {
    let hom = |bc: &MacroBc| {
        bc.homogeneous().ok_or_else(|| {
            Error::BoundaryData(format!(
                "mode comparison needs a single relation at each end, got {}",
                bc.kind()
            ))
        })
    };
    let (l, r) = (hom(left)?, hom(right)?);
    let micro = microscale_slowest_mode(spec)?;
    let mut micro_average = micro.strand_average();
    normalise_unit_max(&mut micro_average);

    let n = spec.n_intervals;
    let x_grid: Vec<f64> = (0..=n).map(|i| i as f64 * spec.h).collect();
    let length = spec.length();
    let robin = macroscale_slowest_mode(sm.c, length, l, r, &x_grid)?;
    let dirichlet = macroscale_slowest_mode(sm.c, length, (1.0, 0.0), (1.0, 0.0), &x_grid)?;

    let window = interior_window(spec);
    let mut macro_robin = robin.values;
    let mut macro_dirichlet = dirichlet.values;
    let interior_error_robin = fit_and_error(&micro_average, &mut macro_robin, window);
    let interior_error_dirichlet = fit_and_error(&micro_average, &mut macro_dirichlet, window);

    Ok(ModeComparison {
        n_grid: (0..=n).collect(),
        x_grid,
        micro_mode: micro.values,
        micro_average,
        macro_robin,
        macro_dirichlet,
        lambda_micro: micro.lambda,
        lambda_robin: robin.lambda,
        lambda_dirichlet: dirichlet.lambda,
        interior_error_robin,
        interior_error_dirichlet,
        window,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub symmetry_defect: f64,
    pub max_row_sum: f64,
    pub min_eigenvalue: f64,
    pub zero_multiplicity: usize,
    /// `lambda_2 - lambda_1`; absent when the cell has a single mass.
    pub spectral_gap: Option<f64>,
    pub rayleigh_min: f64,
    pub rayleigh_max: f64,
    pub rayleigh_within_spectrum: bool,
    pub eigenvalues: Vec<f64>,
}

impl SpectrumReport {
    pub fn passes(&self) -> bool {
        let scale = self
            .eigenvalues
            .iter()
            .copied()
            .fold(1.0f64, |a, b| a.max(b.abs()));
        self.symmetry_defect < 1e-12 * scale
            && self.max_row_sum <= 1e-12 * scale
            && self.min_eigenvalue >= -1e-10 * scale
            && self.zero_multiplicity == 1
            && self.spectral_gap.is_none_or(|g| g > 0.0)
            && self.rayleigh_min >= -1e-12 * scale
            && self.rayleigh_within_spectrum
    }
}

/// Checks on the cell operator `L_0` and `-L_0 w = lambda B w`.
pub fn spectrum_checks(spec: &LatticeSpec) -> Result<SpectrumReport> {
    spec.check()?;
    let l0 = zero_wavenumber_operator(spec);
    let b = mass_diagonal(spec);
    let n = l0.nrows();
    let symmetry_defect = (&l0 - l0.transpose()).abs().max();
    let max_row_sum = l0.row_iter().map(|r| r.sum().abs()).fold(0.0, f64::max);

    let inv_sqrt: Vec<f64> = b.iter().map(|x| 1.0 / x.sqrt()).collect();
    let sym = DMatrix::from_fn(n, n, |i, j| {
        -0.5 * (l0[(i, j)] + l0[(j, i)]) * inv_sqrt[i] * inv_sqrt[j]
    });
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Eigen("cell eigensolve did not converge".into()))?;
    let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let top = eigenvalues
        .iter()
        .copied()
        .fold(0.0f64, |a, b| a.max(b.abs()));
    let zero_multiplicity = eigenvalues
        .iter()
        .filter(|l| l.abs() <= 1e-10 * top.max(1.0))
        .count();
    let spectral_gap = (n >= 2).then(|| eigenvalues[1] - eigenvalues[0]);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut rayleigh_min, mut rayleigh_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..10 {
        let w = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let num = w.dot(&(-&l0 * &w));
        let den: f64 = w.iter().zip(b.iter()).map(|(x, m)| x * x * m).sum();
        let q = num / den;
        rayleigh_min = rayleigh_min.min(q);
        rayleigh_max = rayleigh_max.max(q);
    }
    let slack = 1e-10 * top.max(1.0);
    let rayleigh_within_spectrum =
        rayleigh_min >= eigenvalues[0] - slack && rayleigh_max <= eigenvalues[n - 1] + slack;
    Ok(SpectrumReport {
        symmetry_defect,
        max_row_sum,
        min_eigenvalue: eigenvalues[0],
        zero_multiplicity,
        spectral_gap,
        rayleigh_min,
        rayleigh_max,
        rayleigh_within_spectrum,
        eigenvalues,
    })
}
