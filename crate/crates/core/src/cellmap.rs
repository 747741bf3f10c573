//! Spatial cell-to-cell map of quasi-steady equilibria and its spectrum.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dense;
use crate::error::{Error, Result};
use crate::lattice::{steady_operator, LatticeSpec};

/// Tolerance for grouping eigenvalues with one, relative to one.
pub const DEFAULT_CENTRE_TOL: f64 = 1e-6;

/// Transfer map `u_1 = T u_0` between the first two columns of consecutive
/// cells, with its stable / centre / unstable decomposition.
#[derive(Clone, Debug)]
pub struct CellMap {
    pub transfer: DMatrix<f64>,
    /// The inverse map `u_0 = T^{-1} u_1`, solved directly from the steady
    /// equations rather than by inverting `transfer`.
    pub backward: DMatrix<f64>,
    /// Eigenvalues sorted ascending by modulus.
    pub eigenvalues: Vec<Complex64>,
    pub stable_values: Vec<Complex64>,
    /// Real basis of the stable subspace; a complex pair contributes its real
    /// and imaginary parts.
    pub stable_vectors: Vec<DVector<f64>>,
    pub unstable_values: Vec<Complex64>,
    pub unstable_vectors: Vec<DVector<f64>>,
    pub center_vector: DVector<f64>,
    /// `(T - I) v_g = 1`, gauge fixed so that the first component is zero.
    pub generalized_vector: DVector<f64>,
    /// Generalised mode continued over the `s p` masses of the first cell.
    pub first_cell_gen: DVector<f64>,
}

impl CellMap {
    /// Replace `v_g` by `v_g + shift * 1`, another valid Jordan partner.
    pub fn shift_gauge(&mut self, shift: f64) {
        self.generalized_vector.add_scalar_mut(shift);
        self.first_cell_gen.add_scalar_mut(shift);
    }

    pub fn strands(&self) -> usize {
        self.transfer.nrows() / 2
    }

    pub fn trichotomy(&self) -> Trichotomy {
        Trichotomy {
            eigenvalues: self.eigenvalues.clone(),
            stable: self.stable_values.clone(),
            centre: self
                .eigenvalues
                .iter()
                .copied()
                .filter(|z| !self.stable_values.contains(z) && !self.unstable_values.contains(z))
                .collect(),
            unstable: self.unstable_values.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trichotomy {
    pub eigenvalues: Vec<Complex64>,
    pub stable: Vec<Complex64>,
    pub centre: Vec<Complex64>,
    pub unstable: Vec<Complex64>,
}

/// Imaginary parts below this fraction of the modulus count as real.
pub const REAL_TOL: f64 = 1e-8;

fn is_real_positive(z: &Complex64) -> bool {
    z.im.abs() <= REAL_TOL * z.norm() && z.re > 0.0
}

impl Trichotomy {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.stable.len(), self.centre.len(), self.unstable.len())
    }

    /// Every non-centre eigenvalue is real and positive.
    pub fn all_real_positive(&self) -> bool {
        self.stable
            .iter()
            .chain(&self.unstable)
            .all(is_real_positive)
    }

    fn from_parts(
        stable: Vec<Complex64>,
        centre: Vec<Complex64>,
        unstable: Vec<Complex64>,
    ) -> Self {
        let mut eigenvalues: Vec<Complex64> = stable
            .iter()
            .chain(&centre)
            .chain(&unstable)
            .copied()
            .collect();
        eigenvalues.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        Self {
            eigenvalues,
            stable,
            centre,
            unstable,
        }
    }

    fn check(self, s: usize) -> Result<Self> {
        let expected = (s.saturating_sub(1), 2, s.saturating_sub(1));
        if self.counts() != expected {
            let (stable, centre, unstable) = self.counts();
            return Err(Error::UnexpectedSpectrum {
                stable,
                centre,
                unstable,
                eigenvalues: self.eigenvalues,
            });
        }
        Ok(self)
    }
}

/// Solve the steady equations of one cell for every column given two
/// adjacent known columns: `masses 0, 1` (forward) or `p, p+1` (backward).
fn continuation_from(spec: &LatticeSpec, forward: bool) -> Result<DMatrix<f64>> {
    let (s, p) = (spec.s, spec.p);
    let a = steady_operator(spec, p);
    let (known_at, unknown_at) = if forward { (0, 2 * s) } else { (p * s, 0) };
    let known = a.columns(known_at, 2 * s).into_owned();
    let unknown = a.columns(unknown_at, s * p).into_owned();
    let lu = unknown.lu();
    if !lu.is_invertible() {
        return Err(Error::SingularInterior);
    }
    let solved = lu.solve(&(-known)).ok_or(Error::SingularInterior)?;
    if !solved.iter().all(|x| x.is_finite()) {
        return Err(Error::SingularInterior);
    }
    let mut full = DMatrix::zeros(s * (p + 2), 2 * s);
    full.view_mut((known_at, 0), (2 * s, 2 * s))
        .fill_with_identity();
    full.view_mut((unknown_at, 0), (s * p, 2 * s))
        .copy_from(&solved);
    Ok(full)
}

fn continuation(spec: &LatticeSpec) -> Result<DMatrix<f64>> {
    continuation_from(spec, true)
}

pub fn transfer_matrix(spec: &LatticeSpec) -> Result<DMatrix<f64>> {
    spec.check()?;
    let (s, p) = (spec.s, spec.p);
    let full = continuation(spec)?;
    Ok(full.rows(p * s, 2 * s).into_owned())
}

/// `T^{-1}`, obtained by solving the cell backwards from columns `p, p+1`.
pub fn backward_transfer_matrix(spec: &LatticeSpec) -> Result<DMatrix<f64>> {
    spec.check()?;
    let full = continuation_from(spec, false)?;
    Ok(full.rows(0, 2 * spec.s).into_owned())
}

/// Masses `0..p-1` of the quasi-steady solution that starts from the given
/// displacements of columns `0` and `1`.
pub fn reconstruct_first_cell(
    spec: &LatticeSpec,
    boundary_pair: &DVector<f64>,
) -> Result<DVector<f64>> {
    spec.check()?;
    let s = spec.s;
    if boundary_pair.len() != 2 * s {
        return Err(Error::DimensionMismatch {
            expected: 2 * s,
            found: boundary_pair.len(),
        });
    }
    let full = continuation(spec)? * boundary_pair;
    Ok(full.rows(0, spec.cell_size()).into_owned())
}

fn schur_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = dense::eigenvalues(m)?;
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen("non-finite cell map eigenvalue".into()));
    }
    out.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    Ok(out)
}

/// Split off the invariant subspace spanned by `1` and a Jordan partner.
/// Returns the two centre eigenvalue estimates (the pair's mean, which unlike
/// the individual values of a perturbed Jordan block is well conditioned) and
/// the eigenvalues of the complementary block.
fn deflate_centre(t: &DMatrix<f64>, vg: &DVector<f64>) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let n = t.nrows();
    let ones = DVector::from_element(n, 1.0);
    let basis = DMatrix::from_columns(&[ones, vg.clone()]);
    let tb = t * &basis;
    let restricted_trace = dense::lstsq(&basis, &tb.column(0).into_owned(), 0.0)?[0]
        + dense::lstsq(&basis, &tb.column(1).into_owned(), 0.0)?[1];
    let centre = Complex64::new(restricted_trace / 2.0, 0.0);

    let mut stacked = DMatrix::zeros(n, n + 2);
    stacked.view_mut((0, 0), (n, 2)).copy_from(&basis);
    stacked.view_mut((0, 2), (n, n)).fill_with_identity();
    let q = stacked.qr().q();
    let w = q.columns(2, n - 2).into_owned();
    let rest = w.transpose() * t * &w;
    Ok((vec![centre; 2], schur_eigenvalues(&rest)?))
}

fn split(values: Vec<Complex64>, tol: f64) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let (mut stable, mut centre, mut unstable) = (Vec::new(), Vec::new(), Vec::new());
    for z in values {
        if (z - 1.0).norm() <= tol {
            centre.push(z);
        } else if z.norm() < 1.0 {
            stable.push(z);
        } else {
            unstable.push(z);
        }
    }
    (stable, centre, unstable)
}

/// Eigen-structure of a cell map from the matrix alone.
///
/// When `T` has a Jordan chain at one the pair is deflated first; otherwise
/// the plain Schur eigenvalues are grouped. Eigenvalues much smaller than
/// `eps * |T|` are not resolved by any method working on `T` alone; see
/// [`classify_cell_map`] for the two-sided variant.
pub fn classify_trichotomy(t: &DMatrix<f64>, tol: f64) -> Result<Trichotomy> {
    let s = t.nrows() / 2;
    let tri = match jordan_chain(t) {
        Ok(vg) => {
            let (centre, rest) = deflate_centre(t, &vg)?;
            let (stable, extra, unstable) = split(rest, tol);
            Trichotomy::from_parts(stable, centre.into_iter().chain(extra).collect(), unstable)
        }
        Err(Error::NoJordanChain) => {
            let (stable, centre, unstable) = split(schur_eigenvalues(t)?, tol);
            Trichotomy::from_parts(stable, centre, unstable)
        }
        Err(e) => return Err(e),
    };
    tri.check(s)
}

/// Eigen-structure using the forward map for the growing modes and the
/// directly solved backward map for the decaying ones, so that both ends of
/// a widely spread spectrum are resolved to relative accuracy.
pub fn classify_cell_map(
    forward: &DMatrix<f64>,
    backward: &DMatrix<f64>,
    tol: f64,
) -> Result<Trichotomy> {
    let s = forward.nrows() / 2;
    let (vf, vb) = match (jordan_chain(forward), jordan_chain(backward)) {
        (Ok(f), Ok(b)) => (f, b),
        (Err(Error::NoJordanChain), _) | (_, Err(Error::NoJordanChain)) => {
            return classify_trichotomy(forward, tol)
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let (centre, rest_f) = deflate_centre(forward, &vf)?;
    let (_, rest_b) = deflate_centre(backward, &vb)?;
    let (_, extra, unstable) = split(rest_f, tol);
    let (_, extra_b, grow_b) = split(rest_b, tol);
    let stable: Vec<Complex64> = grow_b.iter().rev().map(|z| z.inv()).collect();
    let mut centre = centre;
    centre.extend(extra);
    let tri = Trichotomy::from_parts(stable, centre, unstable);
    if !extra_b.is_empty() {
        let (st, ce, un) = tri.counts();
        return Err(Error::UnexpectedSpectrum {
            stable: st,
            centre: ce + extra_b.len(),
            unstable: un,
            eigenvalues: tri.eigenvalues,
        });
    }
    tri.check(s)
}

pub fn jordan_chain(t: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = t.nrows();
    let shifted = t - DMatrix::<f64>::identity(n, n);
    let sv = dense::svd(&shifted)?.s;
    // numerical rank cut: a second null direction means no Jordan chain
    if n >= 2 && sv[n - 2] <= n as f64 * f64::EPSILON * sv[0].max(1.0) {
        return Err(Error::NoJordanChain);
    }
    // The kernel of T - I is spanned by 1, which has a nonzero first entry, so
    // dropping the first column leaves a full-rank consistent system; its
    // least-squares solution is the gauge with v_g[0] = 0.
    let reduced = shifted.columns(1, n - 1).into_owned();
    let ones = DVector::from_element(n, 1.0);
    let tail = dense::lstsq(&reduced, &ones, 0.0)?;
    let mut v = DVector::zeros(n);
    v.rows_mut(1, n - 1).copy_from(&tail);
    let defect = (&shifted * &v - &ones).norm();
    if !(defect < 1e-9 * (1.0 + t.norm() * v.norm()).max(1.0)) {
        return Err(Error::NoJordanChain);
    }
    Ok(v)
}

/// The steady solution growing by one per cell, `u_m = (m + phi_m) / p` with a
/// `p`-periodic corrector `phi`, gauge fixed so that `u_{0,0} = 0`. Returns
/// its first two columns (the Jordan partner of `1` under the cell map) and
/// its first cell. Solving for the corrector on one period avoids the
/// exponential spread of the cell map.
pub fn linear_mode(spec: &LatticeSpec) -> Result<(DVector<f64>, DVector<f64>)> {
    spec.check()?;
    let (s, p) = (spec.s, spec.p);
    let a = steady_operator(spec, p);
    let cell = s * p;
    let mut wrap = DMatrix::zeros(s * (p + 2), cell);
    let mut ramp = DVector::zeros(s * (p + 2));
    for m in 0..p + 2 {
        for j in 0..s {
            wrap[(m * s + j, (m % p) * s + j)] = 1.0;
            ramp[m * s + j] = m as f64;
        }
    }
    let periodic = &a * &wrap;
    let rhs = -(&a * &ramp);
    let mut phi = DVector::zeros(cell);
    if cell > 1 {
        let reduced = periodic.columns(1, cell - 1).into_owned();
        let tail = dense::lstsq(&reduced, &rhs, cell as f64 * f64::EPSILON)?;
        phi.rows_mut(1, cell - 1).copy_from(&tail);
    }
    let defect = (&periodic * &phi - &rhs).norm();
    // a disconnected cell leaves the corrector equations inconsistent
    if !(defect <= 1e-9 * (1.0 + periodic.norm() * phi.norm())) {
        return Err(Error::NoJordanChain);
    }
    let pf = p as f64;
    let u = |k: usize| (ramp[k] + phi[k % cell]) / pf;
    let origin = u(0);
    let pair = DVector::from_fn(2 * s, |k, _| u(k) - origin);
    let first = DVector::from_fn(cell, |k, _| u(k) - origin);
    Ok((pair, first))
}

fn orient(mut x: DVector<f64>) -> DVector<f64> {
    let pivot = x
        .iter()
        .copied()
        .fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    if pivot < 0.0 {
        x.neg_mut();
    }
    x.normalize()
}

/// Real basis of the invariant subspace belonging to `values`, which must be
/// closed under conjugation. Clusters of equal values take as many null
/// vectors of `t - mu I` as they have members.
fn real_invariant_basis(t: &DMatrix<f64>, values: &[Complex64]) -> Result<Vec<DVector<f64>>> {
    let n = t.nrows();
    let mut out = Vec::with_capacity(values.len());
    let mut used = vec![false; values.len()];
    for i in 0..values.len() {
        if used[i] {
            continue;
        }
        let z = values[i];
        let scale = z.norm().max(f64::MIN_POSITIVE);
        let members: Vec<usize> = (i..values.len())
            .filter(|&j| !used[j] && (values[j] - z).norm() <= 1e-8 * scale)
            .collect();
        for &j in &members {
            used[j] = true;
        }
        let g = members.len();
        let mean = members.iter().map(|&j| values[j]).sum::<Complex64>() / g as f64;
        if mean.im.abs() <= REAL_TOL * scale {
            let shifted = t - DMatrix::<f64>::identity(n, n) * mean.re;
            let v = dense::svd(&shifted)?.v;
            out.extend((n - g..n).map(|r| orient(v.column(r).into_owned())));
        } else {
            // the conjugate partner contributes nothing new
            for (j, w) in values.iter().enumerate() {
                if !used[j] && (w.conj() - z).norm() <= 1e-8 * scale {
                    used[j] = true;
                }
            }
            let mean = if mean.im < 0.0 { mean.conj() } else { mean };
            let shifted =
                t.map(|x| Complex64::new(x, 0.0)) - DMatrix::<Complex64>::identity(n, n) * mean;
            let v = dense::svd_complex(&shifted)?.v;
            for r in n - g..n {
                let x = v.column(r).into_owned();
                // rotate so the real and imaginary parts are orthogonal
                let a: Complex64 = x.iter().map(|c| c * c).sum();
                let x = x * Complex64::from_polar(1.0, -a.arg() / 2.0);
                out.push(orient(x.map(|c| c.re)));
                out.push(orient(x.map(|c| c.im)));
            }
        }
    }
    Ok(out)
}

pub fn build_cell_map(spec: &LatticeSpec) -> Result<CellMap> {
    build_cell_map_with_tol(spec, DEFAULT_CENTRE_TOL)
}

pub fn build_cell_map_with_tol(spec: &LatticeSpec, centre_tol: f64) -> Result<CellMap> {
    let transfer = transfer_matrix(spec)?;
    let backward = backward_transfer_matrix(spec)?;
    let tri = classify_cell_map(&transfer, &backward, centre_tol)?;
    let decaying: Vec<Complex64> = tri.stable.iter().map(|z| z.inv()).collect();
    let stable_vectors = real_invariant_basis(&backward, &decaying)?;
    let unstable_vectors = real_invariant_basis(&transfer, &tri.unstable)?;
    let (generalized_vector, first_cell_gen) = linear_mode(spec)?;
    Ok(CellMap {
        center_vector: DVector::from_element(transfer.nrows(), 1.0),
        transfer,
        backward,
        eigenvalues: tri.eigenvalues,
        stable_values: tri.stable,
        stable_vectors,
        unstable_values: tri.unstable,
        unstable_vectors,
        generalized_vector,
        first_cell_gen,
    })
}
