//! Macroscale boundary conditions from the centre-stable projection of the
//! first cell.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::Serialize;

use crate::cellmap::{build_cell_map_with_tol, CellMap, DEFAULT_CENTRE_TOL};
use crate::dense;
use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, MicroBc, MicroBcSpec, Side};

/// Singular values below this fraction of the largest count as zero.
pub const NULL_TOL: f64 = 1e-10;

/// Boundary constraint system `M c = rhs`.
///
/// Columns: stable coefficients, constant mode, generalised mode. Rows: one
/// per microscale condition, then the `U` and `dU/dx` amplitude rows.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub matrix: DMatrix<f64>,
    /// One label per row.
    pub rhs_labels: Vec<String>,
    /// Microscale data entering row `i` of the right-hand side is
    /// `data_scale[i] * data[i]` (the flux kind carries `h d`).
    pub data_scale: Vec<f64>,
    pub expected_null: usize,
    pub kind: &'static str,
    pub side: Side,
    pub gamma_u: f64,
}

impl ConstraintSystem {
    pub fn data_rows(&self) -> usize {
        self.data_scale.len()
    }

    pub fn data_labels(&self) -> &[String] {
        &self.rhs_labels[..self.data_rows()]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MacroCondition {
    /// `U + d dU/dx = sum_i weights[i] data[i]`.
    Robin { d: f64, weights: Vec<f64> },
    /// `dU/dx = sum_i weights[i] data[i]`.
    Neumann { weights: Vec<f64> },
    /// `U = sum value_weights * data` and `dU/dx = sum slope_weights * data`.
    CauchyPair {
        value_weights: Vec<f64>,
        slope_weights: Vec<f64>,
    },
    /// The microscale data impose nothing at this end.
    Unconstrained,
}

#[derive(Clone, Debug, Serialize)]
pub struct MacroBc {
    pub condition: MacroCondition,
    pub side: Side,
    pub data_labels: Vec<String>,
    /// `|W^T M| / |M|` for the null basis used; zero for closed forms.
    pub residual: f64,
}

impl MacroBc {
    pub fn kind(&self) -> &'static str {
        match self.condition {
            MacroCondition::Robin { .. } => "robin",
            MacroCondition::Neumann { .. } => "neumann",
            MacroCondition::CauchyPair { .. } => "cauchy_pair",
            MacroCondition::Unconstrained => "unconstrained",
        }
    }

    /// Robin coefficient of `dU/dx`, if this is a Robin condition.
    pub fn d(&self) -> Option<f64> {
        match self.condition {
            MacroCondition::Robin { d, .. } => Some(d),
            _ => None,
        }
    }

    /// Homogeneous form `a U + b dU/dx = 0` for the eigenproblem, when the
    /// condition is a single relation.
    pub fn homogeneous(&self) -> Option<(f64, f64)> {
        match self.condition {
            MacroCondition::Robin { d, .. } => Some((1.0, d)),
            MacroCondition::Neumann { .. } => Some((0.0, 1.0)),
            _ => None,
        }
    }

    fn flip(mut self) -> Self {
        match &mut self.condition {
            MacroCondition::Robin { d, .. } => *d = -*d,
            MacroCondition::Neumann { weights } => weights.iter_mut().for_each(|w| *w = -*w),
            MacroCondition::CauchyPair { slope_weights, .. } => {
                slope_weights.iter_mut().for_each(|w| *w = -*w)
            }
            MacroCondition::Unconstrained => {}
        }
        self.side = Side::Right;
        self
    }
}

/// `U`-row entry of the generalised column: the cell-average of the
/// generalised mode extrapolated back from the first cell's centroid.
pub fn gamma_u(cm: &CellMap, p: usize) -> f64 {
    cm.first_cell_gen.mean() - (p as f64 - 1.0) / (2.0 * p as f64)
}

struct Row {
    functional: Vec<(usize, f64)>,
    label: String,
    scale: f64,
}

fn data_len(kind: &'static str, v: &[f64], s: usize) -> Result<()> {
    if v.len() != s {
        return Err(Error::BoundaryData(format!(
            "{kind} needs {s} values, got {}",
            v.len()
        )));
    }
    Ok(())
}

fn micro_rows(bc: &MicroBcSpec, s: usize, h: f64) -> Result<(Vec<Row>, usize)> {
    let (c0, c1) = match bc.side {
        Side::Left => ("0", "1"),
        Side::Right => ("N", "N-1"),
    };
    let label = |sym: &str, col: &str, j: usize| format!("{sym}_{{{col},{j}}}");
    let value = |col: &str, j: usize, offset: usize| Row {
        functional: vec![(offset + j, 1.0)],
        label: label("b", col, j),
        scale: 1.0,
    };
    let two_strands = |kind: &'static str| {
        if s == 2 {
            Ok(())
        } else {
            Err(Error::KindUnsupported { kind, s })
        }
    };
    let rows = match &bc.kind {
        MicroBc::Dirichlet { b } => {
            data_len("dirichlet", b, s)?;
            (0..s).map(|j| value(c0, j, 0)).collect()
        }
        MicroBc::Flux { d } => {
            data_len("flux", d, s)?;
            (0..s)
                .map(|j| Row {
                    functional: vec![(s + j, 1.0), (j, -1.0)],
                    label: label("d", c0, j),
                    scale: h,
                })
                .collect()
        }
        MicroBc::RobinLike { d, b } => {
            data_len("robin_like d", d, s)?;
            data_len("robin_like b", b, s)?;
            (0..s)
                .map(|j| Row {
                    functional: vec![(j, 1.0 - d[j] / h), (s + j, d[j] / h)],
                    label: label("b", c0, j),
                    scale: 1.0,
                })
                .collect()
        }
        MicroBc::CauchyLike { .. } => {
            two_strands("cauchy_like")?;
            vec![value(c0, 0, 0), value(c1, 0, s)]
        }
        MicroBc::Mixed { b } => {
            two_strands("mixed")?;
            match bc.side {
                Side::Left => {
                    data_len("mixed (left)", b, 3)?;
                    vec![value(c0, 0, 0), value(c0, 1, 0), value(c1, 0, s)]
                }
                Side::Right => {
                    data_len("mixed (right)", b, 1)?;
                    vec![value(c0, 0, 0)]
                }
            }
        }
    };
    let expected_null = match (&bc.kind, bc.side) {
        (MicroBc::Mixed { .. }, Side::Left) => 2,
        (MicroBc::Mixed { .. }, Side::Right) => 0,
        _ => 1,
    };
    Ok((rows, expected_null))
}

/// Assemble the constraint system. The cell map must be built from the
/// lattice as seen from the end in question (see [`right_end_bc`]).
pub fn assemble_constraints(
    cm: &CellMap,
    bc: &MicroBcSpec,
    spec: &LatticeSpec,
) -> Result<ConstraintSystem> {
    let s = spec.s;
    if cm.strands() != s {
        return Err(Error::DimensionMismatch {
            expected: 2 * s,
            found: cm.transfer.nrows(),
        });
    }
    let (rows, expected_null) = micro_rows(bc, s, spec.h)?;
    let ns = cm.stable_vectors.len();
    let cols = ns + 2;
    let gamma = gamma_u(cm, spec.p);

    let mut columns: Vec<&DVector<f64>> = cm.stable_vectors.iter().collect();
    columns.push(&cm.center_vector);
    columns.push(&cm.generalized_vector);

    let nrows = rows.len() + 2;
    let mut matrix = DMatrix::zeros(nrows, cols);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in columns.iter().enumerate() {
            matrix[(r, c)] = row.functional.iter().map(|&(i, coef)| coef * v[i]).sum();
        }
    }
    let u_row = rows.len();
    matrix[(u_row, ns)] = 1.0;
    matrix[(u_row, ns + 1)] = gamma;
    matrix[(u_row + 1, ns + 1)] = 1.0 / (spec.p as f64 * spec.h);

    let mut rhs_labels: Vec<String> = rows.iter().map(|r| r.label.clone()).collect();
    rhs_labels.push("U".into());
    rhs_labels.push("dU/dx".into());
    Ok(ConstraintSystem {
        matrix,
        rhs_labels,
        data_scale: rows.iter().map(|r| r.scale).collect(),
        expected_null,
        kind: bc.kind.name(),
        side: bc.side,
        gamma_u: gamma,
    })
}

/// Orthonormal basis of the left null space of `m`.
pub fn left_null_space(m: &DMatrix<f64>, rel_tol: f64) -> Result<Vec<DVector<f64>>> {
    let r = m.nrows();
    let d = dense::svd(m)?;
    let sigma_max = d.s.first().copied().unwrap_or(0.0);
    // columns of U beyond the singular values are null directions too
    Ok((0..r)
        .filter(|&i| d.s.get(i).is_none_or(|&si| si <= rel_tol * sigma_max))
        .map(|i| d.u.column(i).into_owned())
        .collect())
}

pub fn derive_macro_bc(cs: &ConstraintSystem) -> Result<MacroBc> {
    derive_macro_bc_with(cs, NULL_TOL)
}

pub fn derive_macro_bc_with(cs: &ConstraintSystem, rel_tol: f64) -> Result<MacroBc> {
    let null = left_null_space(&cs.matrix, rel_tol)?;
    if null.len() != cs.expected_null {
        return Err(Error::NullSpaceDimension {
            expected: cs.expected_null,
            found: null.len(),
        });
    }
    let m = cs.data_rows();
    let residual = if null.is_empty() {
        0.0
    } else {
        (DMatrix::from_columns(&null).transpose() * &cs.matrix).norm() / cs.matrix.norm()
    };
    let scaled = |w: &DVector<f64>, by: f64| -> Vec<f64> {
        (0..m).map(|i| -w[i] * cs.data_scale[i] / by).collect()
    };

    let condition = match null.as_slice() {
        [] => MacroCondition::Unconstrained,
        [w] => {
            let (wu, wd) = (w[m], w[m + 1]);
            if wu.abs() < NULL_TOL * w.norm() {
                MacroCondition::Neumann {
                    weights: scaled(w, wd),
                }
            } else {
                MacroCondition::Robin {
                    d: wd / wu,
                    weights: scaled(w, wu),
                }
            }
        }
        [w1, w2] => {
            // each null vector gives  wU U + wD U' = -sum w_i scale_i data_i
            let a = Matrix2::new(w1[m], w1[m + 1], w2[m], w2[m + 1]);
            let inv = a.try_inverse().ok_or(Error::NullSpaceDimension {
                expected: 2,
                found: 1,
            })?;
            let mut value_weights = vec![0.0; m];
            let mut slope_weights = vec![0.0; m];
            for i in 0..m {
                let rhs = Vector2::new(-w1[i], -w2[i]) * cs.data_scale[i];
                let sol = inv * rhs;
                value_weights[i] = sol[0];
                slope_weights[i] = sol[1];
            }
            MacroCondition::CauchyPair {
                value_weights,
                slope_weights,
            }
        }
        _ => {
            return Err(Error::NullSpaceDimension {
                expected: cs.expected_null,
                found: null.len(),
            })
        }
    };
    Ok(MacroBc {
        condition,
        side: cs.side,
        data_labels: cs.data_labels().to_vec(),
        residual,
    })
}

/// Tolerances used along the boundary pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryTolerances {
    /// Distance from one within which a cell-map eigenvalue counts as centre.
    pub centre: f64,
    /// Relative singular-value cut for the left null space.
    pub null: f64,
}

impl Default for BoundaryTolerances {
    fn default() -> Self {
        Self {
            centre: DEFAULT_CENTRE_TOL,
            null: NULL_TOL,
        }
    }
}

fn left_pipeline(spec: &LatticeSpec, bc: &MicroBcSpec, tol: BoundaryTolerances) -> Result<MacroBc> {
    let cm = build_cell_map_with_tol(spec, tol.centre)?;
    derive_macro_bc_with(&assemble_constraints(&cm, bc, spec)?, tol.null)
}

/// Right-end condition: the left-end pipeline on the mirrored lattice, with
/// the sign of `dU/dx` flipped back.
pub fn right_end_bc(spec: &LatticeSpec, bc: &MicroBc) -> Result<MacroBc> {
    right_end_bc_with(spec, bc, BoundaryTolerances::default())
}

fn right_end_bc_with(spec: &LatticeSpec, bc: &MicroBc, tol: BoundaryTolerances) -> Result<MacroBc> {
    let mirrored = spec.reversed();
    Ok(left_pipeline(&mirrored, &MicroBcSpec::right(bc.clone()), tol)?.flip())
}

/// Macroscale condition for either end.
pub fn derive_boundary(spec: &LatticeSpec, bc: &MicroBcSpec) -> Result<MacroBc> {
    derive_boundary_with(spec, bc, BoundaryTolerances::default())
}

pub fn derive_boundary_with(
    spec: &LatticeSpec,
    bc: &MicroBcSpec,
    tol: BoundaryTolerances,
) -> Result<MacroBc> {
    spec.check()?;
    match bc.side {
        Side::Left => left_pipeline(spec, bc, tol),
        Side::Right => right_end_bc_with(spec, &bc.kind, tol),
    }
}

/// Literal two-strand, two-periodic closed forms, evaluated with the
/// eigenvectors of `cm` (stable vector `v1`, generalised vector `v3`).
pub fn closed_form_bc(spec: &LatticeSpec, cm: &CellMap, bc: &MicroBcSpec) -> Result<MacroBc> {
    if spec.s != 2 || spec.p != 2 || cm.strands() != 2 {
        return Err(Error::OutOfScope(format!(
            "closed-form boundary conditions need s = p = 2 (got s = {}, p = {})",
            spec.s, spec.p
        )));
    }
    if cm.stable_vectors.len() != 1 {
        return Err(Error::OutOfScope(
            "closed forms need one real stable eigenvector".into(),
        ));
    }
    let h = spec.h;
    let v1 = &cm.stable_vectors[0];
    let v3 = &cm.generalized_vector;
    let (v11, v12, v13, v14) = (v1[0], v1[1], v1[2], v1[3]);
    let (v31, v32, v33, v34) = (v3[0], v3[1], v3[2], v3[3]);
    let gamma = 0.25 * (v3.sum() - 1.0);
    // shared by the Dirichlet, Cauchy-like and mixed forms: the two-row
    // Robin relation for rows picking components a and b of u_0
    let robin = |va: f64, vb: f64, v3a: f64, v3b: f64| {
        let d = -2.0 * h * ((vb * v3a - va * v3b) / (va - vb) + gamma);
        (d, vec![-vb / (va - vb), va / (va - vb)])
    };

    let (rows, _) = micro_rows(bc, 2, h)?;
    let data_labels = rows.into_iter().map(|r| r.label).collect();
    let condition = match &bc.kind {
        MicroBc::Dirichlet { .. } => {
            let (d, weights) = robin(v11, v12, v31, v32);
            MacroCondition::Robin { d, weights }
        }
        MicroBc::CauchyLike { .. } => {
            let (d, weights) = robin(v11, v13, v31, v33);
            MacroCondition::Robin { d, weights }
        }
        MicroBc::Flux { .. } => {
            let den = 2.0 * ((v13 - v11) * (v34 - v32) - (v14 - v12) * (v33 - v31));
            MacroCondition::Neumann {
                weights: vec![-(v14 - v12) / den, (v13 - v11) / den],
            }
        }
        MicroBc::RobinLike { d, .. } => {
            let (d0, d1) = (d[0], d[1]);
            let a1 = h * v11 + d0 * (v13 - v11);
            let a2 = h * v12 + d1 * (v14 - v12);
            let b1 = h * v31 + d0 * (v33 - v31);
            let b2 = h * v32 + d1 * (v34 - v32);
            let den = a1 - a2;
            let w1 = a2 / den;
            let w2 = -a1 / den;
            // the h-weighted products carry one extra factor of h
            let w4 = -2.0 * (a2 * b1 - a1 * b2) / den - 0.5 * h * (v3.sum() - 1.0);
            MacroCondition::Robin {
                d: w4,
                weights: vec![-w1, -w2],
            }
        }
        MicroBc::Mixed { .. } => match bc.side {
            Side::Right => MacroCondition::Unconstrained,
            Side::Left => {
                let den =
                    (v11 * v33 - v31 * v13) * (v12 - v11) + (v12 * v31 - v11 * v32) * (v13 - v11);
                // D = sum(dw * [b00, b01, b10])
                let dw = [
                    v11 * (-(v13 - v11) + (v12 - v11)) / den,
                    v11 * (v13 - v11) / den,
                    -v11 * (v12 - v11) / den,
                ];
                let bracket = (v13 * v31 - v11 * v33) / (v11 - v13) + gamma;
                let base = [-v13 / (v11 - v13), 0.0, v11 / (v11 - v13)];
                MacroCondition::CauchyPair {
                    value_weights: (0..3).map(|i| base[i] - bracket * dw[i]).collect(),
                    slope_weights: dw.iter().map(|x| -x / (2.0 * h)).collect(),
                }
            }
        },
    };
    Ok(MacroBc {
        condition,
        side: bc.side,
        data_labels,
        residual: 0.0,
    })
}

/// Evaluate a condition's right-hand side for concrete microscale data.
pub fn apply_weights(weights: &[f64], data: &[f64]) -> f64 {
    weights.iter().zip(data).map(|(w, x)| w * x).sum()
}

/// Microscale data of a boundary specification, in row order.
pub fn boundary_data(bc: &MicroBc) -> Vec<f64> {
    match bc {
        MicroBc::Dirichlet { b } => b.clone(),
        MicroBc::Flux { d } => d.clone(),
        MicroBc::RobinLike { b, .. } => b.clone(),
        MicroBc::CauchyLike { b00, b10 } => vec![*b00, *b10],
        MicroBc::Mixed { b } => b.clone(),
    }
}
