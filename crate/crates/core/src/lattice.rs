//! Lattice description and the linear operators assembled from it.
//!
//! Masses are labelled by a longitudinal index `n` and a strand index `j`.
//! Material data is `p`-periodic in `n`; inside one cell the flat ordering is
//! `m * s + j` with `m = n mod p`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kpoly::{KPoly, KPolyMatrix, Phase};

/// Periodic cell of an `s`-strand, `p`-periodic spring-mass lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub s: usize,
    pub p: usize,
    pub h: f64,
    /// Number of longitudinal intervals of the finite domain.
    #[serde(rename = "N")]
    pub n_intervals: usize,
    /// `kappa_long[m][j]` couples `(m, j)` to `(m + 1, j)`.
    pub kappa_long: Vec<Vec<f64>>,
    /// `kappa_cross[m][i][j]` couples strands `i` and `j` at sub-cell `m`.
    pub kappa_cross: Vec<Vec<Vec<f64>>>,
    pub rho: Vec<Vec<f64>>,
}

/// Position of a mass inside the periodic cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CellIndex {
    pub m: usize,
    pub j: usize,
    pub flat: usize,
}

impl CellIndex {
    pub fn new(m: usize, j: usize, s: usize) -> Self {
        Self {
            m,
            j,
            flat: m * s + j,
        }
    }

    pub fn from_flat(flat: usize, s: usize) -> Self {
        Self {
            m: flat / s,
            j: flat % s,
            flat,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    ZeroStrands,
    ZeroPeriod,
    NonPositiveSpacing(f64),
    TooFewIntervals(usize),
    Shape {
        field: &'static str,
        detail: String,
    },
    NonFinite {
        field: &'static str,
        m: usize,
        j: usize,
    },
    NonPositiveLongitudinal {
        m: usize,
        j: usize,
        value: f64,
    },
    NonPositiveDensity {
        m: usize,
        j: usize,
        value: f64,
    },
    NegativeCross {
        m: usize,
        i: usize,
        j: usize,
        value: f64,
    },
    AsymmetricCross {
        m: usize,
        i: usize,
        j: usize,
    },
    SelfCross {
        m: usize,
        j: usize,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroStrands => write!(f, "strand count s must be at least 1"),
            Violation::ZeroPeriod => write!(f, "periodicity p must be at least 1"),
            Violation::NonPositiveSpacing(h) => write!(f, "nonpositive spacing h = {h}"),
            Violation::TooFewIntervals(n) => write!(f, "N = {n} is below the minimum of 2"),
            Violation::Shape { field, detail } => write!(f, "{field}: {detail}"),
            Violation::NonFinite { field, m, j } => write!(f, "{field}[{m}][{j}] is not finite"),
            Violation::NonPositiveLongitudinal { m, j, value } => {
                write!(
                    f,
                    "nonpositive longitudinal elasticity kappa_long[{m}][{j}] = {value}"
                )
            }
            Violation::NonPositiveDensity { m, j, value } => {
                write!(f, "nonpositive density rho[{m}][{j}] = {value}")
            }
            Violation::NegativeCross { m, i, j, value } => {
                write!(
                    f,
                    "negative cross elasticity kappa_cross[{m}][{i}][{j}] = {value}"
                )
            }
            Violation::AsymmetricCross { m, i, j } => {
                write!(f, "asymmetric cross elasticity kappa_cross[{m}][{i}][{j}] != kappa_cross[{m}][{j}][{i}]")
            }
            Violation::SelfCross { m, j, value } => {
                write!(
                    f,
                    "self cross elasticity kappa_cross[{m}][{j}][{j}] = {value} must be zero"
                )
            }
        }
    }
}

impl LatticeSpec {
    /// Uniform lattice: every longitudinal spring `kappa`, every cross spring
    /// `cross`, every density `rho`.
    pub fn uniform(
        s: usize,
        p: usize,
        h: f64,
        n_intervals: usize,
        kappa: f64,
        cross: f64,
        rho: f64,
    ) -> Self {
        let kappa_cross = (0..p)
            .map(|_| {
                (0..s)
                    .map(|i| (0..s).map(|j| if i == j { 0.0 } else { cross }).collect())
                    .collect()
            })
            .collect();
        Self {
            s,
            p,
            h,
            n_intervals,
            kappa_long: vec![vec![kappa; s]; p],
            kappa_cross,
            rho: vec![vec![rho; s]; p],
        }
    }

    /// Connected lattice with every elasticity and density drawn uniformly
    /// from `range`. Cross elasticities are symmetric with zero diagonal.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        s: usize,
        p: usize,
        h: f64,
        n_intervals: usize,
        range: std::ops::Range<f64>,
    ) -> Self {
        let draw = |rng: &mut R| loop {
            let v = rng.random_range(range.clone());
            if v > 0.0 {
                break v;
            }
        };
        let kappa_long = (0..p)
            .map(|_| (0..s).map(|_| draw(rng)).collect())
            .collect();
        let rho = (0..p)
            .map(|_| (0..s).map(|_| draw(rng)).collect())
            .collect();
        let kappa_cross = (0..p)
            .map(|_| {
                let mut c = vec![vec![0.0; s]; s];
                for i in 0..s {
                    for j in i + 1..s {
                        let v = draw(rng);
                        c[i][j] = v;
                        c[j][i] = v;
                    }
                }
                c
            })
            .collect();
        Self {
            s,
            p,
            h,
            n_intervals,
            kappa_long,
            kappa_cross,
            rho,
        }
    }

    /// Number of masses in one cell.
    pub fn cell_size(&self) -> usize {
        self.s * self.p
    }

    pub fn flat(&self, m: usize, j: usize) -> usize {
        m * self.s + j
    }

    fn sub_cell(&self, n: i64) -> usize {
        n.rem_euclid(self.p as i64) as usize
    }

    /// Longitudinal elasticity between `(n, j)` and `(n + 1, j)` for any `n`.
    pub fn kl(&self, n: i64, j: usize) -> f64 {
        self.kappa_long[self.sub_cell(n)][j]
    }

    /// Cross elasticity between strands `i` and `j` at longitudinal index `n`.
    pub fn kc(&self, n: i64, i: usize, j: usize) -> f64 {
        self.kappa_cross[self.sub_cell(n)][i][j]
    }

    pub fn density(&self, n: i64, j: usize) -> f64 {
        self.rho[self.sub_cell(n)][j]
    }

    /// Domain length `L = N h`.
    pub fn length(&self) -> f64 {
        self.n_intervals as f64 * self.h
    }

    /// True when the strand graph (edges where some cross elasticity is
    /// positive) is connected.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.s];
        let mut stack = vec![0usize];
        seen[0] = self.s > 0;
        while let Some(i) = stack.pop() {
            for j in 0..self.s {
                if !seen[j] && (0..self.p).any(|m| self.kappa_cross[m][i][j] > 0.0) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.iter().all(|&x| x)
    }

    /// Mirror image seen from the right end: index `n' = N - n`.
    ///
    /// A longitudinal spring between columns `n` and `n + 1` becomes the spring
    /// between `N - n - 1` and `N - n`, so it moves to sub-cell
    /// `(N - 1 - m') mod p`; densities and cross springs move to `(N - m') mod p`.
    pub fn reversed(&self) -> Self {
        let n = self.n_intervals as i64;
        let p = self.p;
        let kappa_long = (0..p as i64)
            .map(|m| self.kappa_long[self.sub_cell(n - 1 - m)].clone())
            .collect();
        let kappa_cross = (0..p as i64)
            .map(|m| self.kappa_cross[self.sub_cell(n - m)].clone())
            .collect();
        let rho = (0..p as i64)
            .map(|m| self.rho[self.sub_cell(n - m)].clone())
            .collect();
        Self {
            kappa_long,
            kappa_cross,
            rho,
            ..self.clone()
        }
    }

    /// Check every structural invariant, reporting all violations.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.s == 0 {
            out.push(Violation::ZeroStrands);
        }
        if self.p == 0 {
            out.push(Violation::ZeroPeriod);
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            out.push(Violation::NonPositiveSpacing(self.h));
        }
        if self.n_intervals < 2 {
            out.push(Violation::TooFewIntervals(self.n_intervals));
        }
        if !out.is_empty() && (self.s == 0 || self.p == 0) {
            return out;
        }
        let (s, p) = (self.s, self.p);
        let shape_2d = |field: &'static str, a: &Vec<Vec<f64>>, out: &mut Vec<Violation>| {
            if a.len() != p || a.iter().any(|r| r.len() != s) {
                out.push(Violation::Shape {
                    field,
                    detail: format!("expected {p} x {s} array"),
                });
                false
            } else {
                true
            }
        };
        if shape_2d("kappa_long", &self.kappa_long, &mut out) {
            for (m, row) in self.kappa_long.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        out.push(Violation::NonFinite {
                            field: "kappa_long",
                            m,
                            j,
                        });
                    } else if v <= 0.0 {
                        out.push(Violation::NonPositiveLongitudinal { m, j, value: v });
                    }
                }
            }
        }
        if shape_2d("rho", &self.rho, &mut out) {
            for (m, row) in self.rho.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        out.push(Violation::NonFinite { field: "rho", m, j });
                    } else if v <= 0.0 {
                        out.push(Violation::NonPositiveDensity { m, j, value: v });
                    }
                }
            }
        }
        let cross_ok = self.kappa_cross.len() == p
            && self
                .kappa_cross
                .iter()
                .all(|b| b.len() == s && b.iter().all(|r| r.len() == s));
        if !cross_ok {
            out.push(Violation::Shape {
                field: "kappa_cross",
                detail: format!("expected {p} x {s} x {s} array"),
            });
        } else {
            for (m, block) in self.kappa_cross.iter().enumerate() {
                for i in 0..s {
                    for j in 0..s {
                        let v = block[i][j];
                        if !v.is_finite() {
                            out.push(Violation::NonFinite {
                                field: "kappa_cross",
                                m,
                                j,
                            });
                        } else if i == j {
                            if v != 0.0 {
                                out.push(Violation::SelfCross { m, j, value: v });
                            }
                        } else {
                            if v < 0.0 {
                                out.push(Violation::NegativeCross { m, i, j, value: v });
                            }
                            if i < j && v != block[j][i] {
                                out.push(Violation::AsymmetricCross { m, i, j });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// [`validate`](Self::validate), as a `Result`.
    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(v))
        }
    }
}

/// Diagonal of the mass matrix `B = h^2 diag(rho)` in flat cell order.
pub fn mass_diagonal(spec: &LatticeSpec) -> DVector<f64> {
    let h2 = spec.h * spec.h;
    DVector::from_iterator(
        spec.cell_size(),
        spec.rho
            .iter()
            .flat_map(|row| row.iter().map(move |&r| h2 * r)),
    )
}

pub fn mass_matrix(spec: &LatticeSpec) -> DMatrix<f64> {
    DMatrix::from_diagonal(&mass_diagonal(spec))
}

/// Diagonal block entries `-kappa^+` and cross couplings of sub-cell `m`.
fn intra_cell_block(spec: &LatticeSpec, m: usize) -> DMatrix<f64> {
    let s = spec.s;
    let mut blk = DMatrix::zeros(s, s);
    for i in 0..s {
        let mut plus = spec.kl(m as i64 - 1, i) + spec.kl(m as i64, i);
        for j in 0..s {
            if j != i {
                blk[(i, j)] = spec.kc(m as i64, i, j);
                plus += spec.kc(m as i64, i, j);
            }
        }
        blk[(i, i)] = -plus;
    }
    blk
}

/// Generic Fourier operator assembly; `forward` and `backward` are the phase
/// factors attached to couplings into the next and previous sub-cell.
fn assemble_fourier<T>(
    spec: &LatticeSpec,
    zero: T,
    real: impl Fn(f64) -> T,
    forward: T,
    backward: T,
) -> Vec<Vec<T>>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
{
    let (s, p) = (spec.s, spec.p);
    let n = spec.cell_size();
    let mut out = vec![vec![zero; n]; n];
    for m in 0..p {
        let blk = intra_cell_block(spec, m);
        for i in 0..s {
            for j in 0..s {
                out[m * s + i][m * s + j] = out[m * s + i][m * s + j] + real(blk[(i, j)]);
            }
        }
        let next = (m + 1) % p;
        let prev = (m + p - 1) % p;
        for j in 0..s {
            let a = m * s + j;
            out[a][next * s + j] = out[a][next * s + j] + real(spec.kl(m as i64, j)) * forward;
            out[a][prev * s + j] = out[a][prev * s + j] + real(spec.kl(m as i64 - 1, j)) * backward;
        }
    }
    out
}

/// `L_k` with `exp(±ikh)` replaced by its second-order Taylor polynomial.
pub fn wavenumber_operator(spec: &LatticeSpec) -> KPolyMatrix {
    // h > 0 is a spec invariant; fall back to the bare constant otherwise.
    let plus = KPoly::exp_ikh(Phase::Plus, spec.h).unwrap_or_else(|_| KPoly::one());
    let minus = KPoly::exp_ikh(Phase::Minus, spec.h).unwrap_or_else(|_| KPoly::one());
    let rows = assemble_fourier(spec, KPoly::zero(), KPoly::constant, plus, minus);
    let n = spec.cell_size();
    KPolyMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// `L_k` at a real wavenumber using exact exponentials.
pub fn exact_wavenumber_operator(spec: &LatticeSpec, k: f64) -> DMatrix<Complex64> {
    let plus = Complex64::from_polar(1.0, k * spec.h);
    let minus = plus.conj();
    let rows = assemble_fourier(
        spec,
        Complex64::new(0.0, 0.0),
        |x| Complex64::new(x, 0.0),
        plus,
        minus,
    );
    let n = spec.cell_size();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// `L_0`, the zero-wavenumber stiffness within one periodic cell.
pub fn zero_wavenumber_operator(spec: &LatticeSpec) -> DMatrix<f64> {
    let rows = assemble_fourier(spec, 0.0, |x| x, 1.0, 1.0);
    let n = spec.cell_size();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Quasi-steady equilibrium equations for columns `n = 1..=rows`.
///
/// The result has `s * rows` rows and `s * (rows + 2)` columns; column
/// `n * s + i` multiplies `u_{n,i}` for `n = 0..=rows + 1`.
pub fn steady_operator(spec: &LatticeSpec, rows: usize) -> DMatrix<f64> {
    let s = spec.s;
    let mut a = DMatrix::zeros(s * rows, s * (rows + 2));
    for n in 1..=rows {
        let ni = n as i64;
        for j in 0..s {
            let r = (n - 1) * s + j;
            let back = spec.kl(ni - 1, j);
            let fwd = spec.kl(ni, j);
            a[(r, (n - 1) * s + j)] += back;
            a[(r, (n + 1) * s + j)] += fwd;
            a[(r, n * s + j)] -= back + fwd;
            for i in 0..s {
                if i != j {
                    let c = spec.kc(ni, i, j);
                    a[(r, n * s + i)] += c;
                    a[(r, n * s + j)] -= c;
                }
            }
        }
    }
    a
}

/// Which end of the domain a boundary condition applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Microscale boundary condition at one end of the lattice.
///
/// Values are listed per strand. At the right end the same fields refer to
/// the mirrored columns (`b_{N,j}` in place of `b_{0,j}`, and so on).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MicroBc {
    /// `u_{0,j} = b_{0,j}`.
    Dirichlet { b: Vec<f64> },
    /// `u_{1,j} - u_{0,j} = h d_{0,j}`.
    Flux { d: Vec<f64> },
    /// `u_{0,j} + (d_{0,j} / h)(u_{1,j} - u_{0,j}) = b_{0,j}`.
    RobinLike { d: Vec<f64>, b: Vec<f64> },
    /// Two strands: `u_{0,0} = b_{0,0}`, `u_{1,0} = b_{1,0}`.
    CauchyLike { b00: f64, b10: f64 },
    /// Two strands. Left end: `[b_{0,0}, b_{0,1}, b_{1,0}]`;
    /// right end: `[b_{N,0}]` only.
    Mixed { b: Vec<f64> },
}

impl MicroBc {
    pub fn dirichlet_zero(s: usize) -> Self {
        MicroBc::Dirichlet { b: vec![0.0; s] }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MicroBc::Dirichlet { .. } => "dirichlet",
            MicroBc::Flux { .. } => "flux",
            MicroBc::RobinLike { .. } => "robin_like",
            MicroBc::CauchyLike { .. } => "cauchy_like",
            MicroBc::Mixed { .. } => "mixed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicroBcSpec {
    #[serde(flatten)]
    pub kind: MicroBc,
    pub side: Side,
}

impl MicroBcSpec {
    pub fn new(kind: MicroBc, side: Side) -> Self {
        Self { kind, side }
    }

    pub fn left(kind: MicroBc) -> Self {
        Self::new(kind, Side::Left)
    }

    pub fn right(kind: MicroBc) -> Self {
        Self::new(kind, Side::Right)
    }
}
