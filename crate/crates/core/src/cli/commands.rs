//! Subcommands. Each returns an [`Output`]: a JSON report plus any CSV
//! tables, written by [`emit`].

use serde_json::{json, Map, Value};

use super::config::{Format, RunConfig};
use super::output::{float, json_string, write_file, Table};
use super::presets::{TABLE1_CANDIDATE_H, TABLE1_REFERENCE};
use crate::boundary::{closed_form_bc, derive_boundary_with, MacroBc, MacroCondition};
use crate::cellmap::build_cell_map_with_tol;
use crate::error::Result;
use crate::homogenize::{
    closed_form_two_strand, construct_slow_manifold_with_tol, default_fit_wavenumbers,
    dispersion_eigenvalues, dispersion_fit, SlowManifold,
};
use crate::lattice::{CellIndex, LatticeSpec, MicroBcSpec, Side};
use crate::validate::{compare_modes, spectrum_checks};

#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub report: Value,
    /// `(file name, table)`; the first one is what `--format csv` prints.
    pub tables: Vec<(&'static str, Table)>,
    pub warnings: Vec<String>,
}

const TABLE1: &str = "paper-5x10-table1";
const FIG3: &str = "paper-2x2-fig3";

fn lattice_summary(cfg: &RunConfig) -> Value {
    let s = &cfg.spec;
    let mut m = Map::new();
    if let Some(p) = &cfg.preset {
        m.insert("preset".into(), json!(p));
    }
    m.insert("s".into(), json!(s.s));
    m.insert("p".into(), json!(s.p));
    m.insert("h".into(), json!(s.h));
    m.insert("N".into(), json!(s.n_intervals));
    Value::Object(m)
}

fn is_preset(cfg: &RunConfig, name: &str) -> bool {
    cfg.preset.as_deref() == Some(name)
}

fn table1_note(cfg: &RunConfig) -> Option<String> {
    (is_preset(cfg, TABLE1) && (cfg.spec.h - TABLE1_CANDIDATE_H).abs() > 1e-12 * TABLE1_CANDIDATE_H).then(|| {
        format!(
            "published coefficients were produced with an unstated spacing; h = {} differs from the candidate 2*pi/46",
            cfg.spec.h
        )
    })
}

fn slow_manifold(cfg: &RunConfig) -> Result<SlowManifold> {
    construct_slow_manifold_with_tol(&cfg.spec, cfg.tolerances.max_iter, cfg.tolerances.residual)
}

pub fn cmd_homogenize(cfg: &RunConfig) -> Result<Output> {
    let sm = slow_manifold(cfg)?;
    let spec = &cfg.spec;
    let mut report = Map::new();
    report.insert("command".into(), json!("homogenize"));
    report.insert("lattice".into(), lattice_summary(cfg));
    report.insert("c".into(), json!(sm.c));
    let g: Vec<Value> = sm.evolution.coeffs().iter().map(|z| json!(z.re)).collect();
    report.insert("evolution".into(), Value::Array(g));
    report.insert("alpha".into(), json!(sm.alpha));
    report.insert("beta".into(), json!(sm.beta));
    report.insert("mean_alpha".into(), json!(sm.mean_alpha()));
    report.insert("std_alpha".into(), json!(sm.std_alpha()));
    report.insert("mean_beta".into(), json!(sm.mean_beta()));
    report.insert("std_beta".into(), json!(sm.std_beta()));
    report.insert("iterations".into(), json!(sm.iterations));
    report.insert("residual_norm".into(), json!(sm.residual_norm));
    if spec.s == 2 && spec.p == 2 {
        let cf = closed_form_two_strand(spec)?;
        report.insert(
            "closed_form".into(),
            json!({"rho_bar": cf.rho_bar, "kappa_bar": cf.kappa_bar, "c": cf.ratio(), "difference": sm.c - cf.ratio()}),
        );
    }
    if is_preset(cfg, TABLE1) {
        let r = &TABLE1_REFERENCE;
        report.insert(
            "published".into(),
            json!({"c": r.c, "std_alpha": r.std_alpha, "std_beta": r.std_beta}),
        );
    }

    let mut table = Table::new(["index", "m", "j", "alpha", "beta"]);
    for i in 0..sm.alpha.len() {
        let idx = CellIndex::from_flat(i, spec.s);
        table.push(vec![
            i.to_string(),
            idx.m.to_string(),
            idx.j.to_string(),
            float(sm.alpha[i]),
            float(sm.beta[i]),
        ]);
    }
    Ok(Output {
        report: Value::Object(report),
        tables: vec![("alphabeta.csv", table)],
        warnings: table1_note(cfg).into_iter().collect(),
    })
}

fn bc_json(bc: &MacroBc, h: f64) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), json!(bc.kind()));
    m.insert("side".into(), json!(bc.side));
    match &bc.condition {
        MacroCondition::Robin { d, weights } => {
            m.insert("d".into(), json!(d));
            m.insert("d_over_h".into(), json!(d / h));
            m.insert("rhs_weights".into(), json!(weights));
        }
        MacroCondition::Neumann { weights } => {
            m.insert("d_over_h".into(), Value::Null);
            m.insert("rhs_weights".into(), json!(weights));
        }
        MacroCondition::CauchyPair {
            value_weights,
            slope_weights,
        } => {
            m.insert("d_over_h".into(), Value::Null);
            m.insert(
                "rhs_weights".into(),
                json!({"value": value_weights, "slope": slope_weights}),
            );
        }
        MacroCondition::Unconstrained => {
            m.insert("d_over_h".into(), Value::Null);
            m.insert("rhs_weights".into(), json!([]));
        }
    }
    m.insert("data_labels".into(), json!(bc.data_labels));
    m.insert("residual".into(), json!(bc.residual));
    Value::Object(m)
}

/// Closed-form Robin coefficient at either end of a two-strand,
/// two-periodic lattice, when the kind has one.
fn closed_form_d(spec: &LatticeSpec, bc: &MicroBcSpec, centre_tol: f64) -> Result<Option<f64>> {
    let (lattice, sign) = match bc.side {
        Side::Left => (spec.clone(), 1.0),
        Side::Right => (spec.reversed(), -1.0),
    };
    let cm = build_cell_map_with_tol(&lattice, centre_tol)?;
    let cf = closed_form_bc(&lattice, &cm, bc)?;
    Ok(cf.d().map(|d| sign * d))
}

pub fn derive_both(cfg: &RunConfig) -> Result<(MacroBc, MacroBc)> {
    let tol = cfg.tolerances.boundary();
    Ok((
        derive_boundary_with(&cfg.spec, &cfg.micro_bc_left, tol)?,
        derive_boundary_with(&cfg.spec, &cfg.micro_bc_right, tol)?,
    ))
}

pub fn cmd_derive_bc(cfg: &RunConfig) -> Result<Output> {
    let h = cfg.spec.h;
    let (left, right) = derive_both(cfg)?;
    let mut report = Map::new();
    report.insert("command".into(), json!("derive-bc"));
    report.insert("lattice".into(), lattice_summary(cfg));
    report.insert("micro_bc_left".into(), json!(cfg.micro_bc_left));
    report.insert("micro_bc_right".into(), json!(cfg.micro_bc_right));
    report.insert("left".into(), bc_json(&left, h));
    report.insert("right".into(), bc_json(&right, h));
    if cfg.spec.s == 2 && cfg.spec.p == 2 {
        let mut cf = Map::new();
        for (name, bc, derived) in [
            ("left", &cfg.micro_bc_left, &left),
            ("right", &cfg.micro_bc_right, &right),
        ] {
            if let (Some(d), Some(numeric)) = (
                closed_form_d(&cfg.spec, bc, cfg.tolerances.centre)?,
                derived.d(),
            ) {
                cf.insert(
                    name.into(),
                    json!({"d": d, "d_over_h": d / h, "difference": numeric - d}),
                );
            }
        }
        if !cf.is_empty() {
            report.insert("closed_form".into(), Value::Object(cf));
        }
    }
    if is_preset(cfg, TABLE1) {
        let r = &TABLE1_REFERENCE;
        report.insert(
            "published".into(),
            json!({"d_left_over_h": r.d_left_over_h, "d_right_over_h": r.d_right_over_h}),
        );
    }
    let mut table = Table::new(["side", "kind", "d_over_h", "label", "weight"]);
    for bc in [&left, &right] {
        let side = json!(bc.side).as_str().unwrap_or_default().to_string();
        let d = bc.d().map(|d| float(d / h)).unwrap_or_default();
        let weights: Vec<(String, f64)> = match &bc.condition {
            MacroCondition::Robin { weights, .. } | MacroCondition::Neumann { weights } => bc
                .data_labels
                .iter()
                .cloned()
                .zip(weights.iter().copied())
                .collect(),
            MacroCondition::CauchyPair {
                value_weights,
                slope_weights,
            } => bc
                .data_labels
                .iter()
                .map(|l| format!("value:{l}"))
                .zip(value_weights.iter().copied())
                .chain(
                    bc.data_labels
                        .iter()
                        .map(|l| format!("slope:{l}"))
                        .zip(slope_weights.iter().copied()),
                )
                .collect(),
            MacroCondition::Unconstrained => Vec::new(),
        };
        if weights.is_empty() {
            table.push(vec![
                side.clone(),
                bc.kind().into(),
                d.clone(),
                String::new(),
                String::new(),
            ]);
        }
        for (label, w) in weights {
            table.push(vec![
                side.clone(),
                bc.kind().into(),
                d.clone(),
                label,
                float(w),
            ]);
        }
    }
    Ok(Output {
        report: Value::Object(report),
        tables: vec![("boundary.csv", table)],
        warnings: table1_note(cfg).into_iter().collect(),
    })
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<Output> {
    let sm = slow_manifold(cfg)?;
    let (left, right) = derive_both(cfg)?;
    let cmp = compare_modes(&cfg.spec, &sm, &left, &right)?;
    let h = cfg.spec.h;
    let report = json!({
        "command": "validate",
        "lattice": lattice_summary(cfg),
        "c": sm.c,
        "d_left_over_h": left.d().map(|d| d / h),
        "d_right_over_h": right.d().map(|d| d / h),
        "lambda_micro": cmp.lambda_micro,
        "lambda_robin": cmp.lambda_robin,
        "lambda_dirichlet": cmp.lambda_dirichlet,
        "interior_error_robin": cmp.interior_error_robin,
        "interior_error_dirichlet": cmp.interior_error_dirichlet,
        "window": [cmp.window.0, cmp.window.1],
        "robin_better": cmp.interior_error_robin < cmp.interior_error_dirichlet,
    });
    let mut table = Table::new(["n", "x", "micro_avg", "macro_robin", "macro_dirichlet"]);
    for i in 0..cmp.n_grid.len() {
        table.push(vec![
            cmp.n_grid[i].to_string(),
            float(cmp.x_grid[i]),
            float(cmp.micro_average[i]),
            float(cmp.macro_robin[i]),
            float(cmp.macro_dirichlet[i]),
        ]);
    }
    let mut warnings: Vec<String> = table1_note(cfg).into_iter().collect();
    if is_preset(cfg, FIG3) && cmp.interior_error_robin >= cmp.interior_error_dirichlet {
        warnings.push("derived Robin conditions did not beat Dirichlet in the interior".into());
    }
    Ok(Output {
        report,
        tables: vec![("modes.csv", table)],
        warnings,
    })
}

/// Default wavenumbers: seventeen points from zero to the first Brillouin
/// zone edge `pi / (p h)`.
pub fn default_wavenumbers(spec: &LatticeSpec) -> Vec<f64> {
    let edge = std::f64::consts::PI / (spec.p as f64 * spec.h);
    (0..=16).map(|i| edge * i as f64 / 16.0).collect()
}

pub fn cmd_dispersion(cfg: &RunConfig, k_list: &[f64]) -> Result<Output> {
    let spec = &cfg.spec;
    let n = spec.cell_size();
    let mut header = vec!["k".to_string()];
    header.extend((0..n).map(|i| format!("lambda_{i}")));
    let mut table = Table::new(header);
    for &k in k_list {
        if !k.is_finite() || k < 0.0 {
            return Err(crate::Error::Parse {
                path: "--k".into(),
                message: format!("wavenumbers must be finite and nonnegative, got {k}"),
            });
        }
        let vals = dispersion_eigenvalues(spec, k)?;
        let mut row = vec![float(k)];
        row.extend(vals.iter().map(|&v| float(v)));
        table.push(row);
    }
    let c_fit = dispersion_fit(spec, &default_fit_wavenumbers(spec))?;
    let report = json!({
        "command": "dispersion",
        "lattice": lattice_summary(cfg),
        "k": k_list,
        "c_fit": c_fit,
        "fit_wavenumbers": default_fit_wavenumbers(spec),
    });
    Ok(Output {
        report,
        tables: vec![("dispersion.csv", table)],
        warnings: Vec::new(),
    })
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Output> {
    let r = spectrum_checks(&cfg.spec)?;
    let mut warnings = Vec::new();
    if r.zero_multiplicity != 1 {
        warnings.push(format!(
            "zero eigenvalue has multiplicity {} (lattice is not connected)",
            r.zero_multiplicity
        ));
    }
    if !r.passes() {
        warnings.push("spectrum checks did not all pass".into());
    }
    let report = json!({
        "command": "spectrum",
        "lattice": lattice_summary(cfg),
        "passes": r.passes(),
        "symmetry_defect": r.symmetry_defect,
        "max_row_sum": r.max_row_sum,
        "min_eigenvalue": r.min_eigenvalue,
        "zero_multiplicity": r.zero_multiplicity,
        "spectral_gap": r.spectral_gap,
        "rayleigh_min": r.rayleigh_min,
        "rayleigh_max": r.rayleigh_max,
        "rayleigh_within_spectrum": r.rayleigh_within_spectrum,
        "eigenvalues": r.eigenvalues,
    });
    let mut table = Table::new(["index", "eigenvalue"]);
    for (i, v) in r.eigenvalues.iter().enumerate() {
        table.push(vec![i.to_string(), float(*v)]);
    }
    Ok(Output {
        report,
        tables: vec![("spectrum.csv", table)],
        warnings,
    })
}

/// Write `report.json` and the tables into the output directory and return
/// what belongs on stdout.
pub fn emit(cfg: &RunConfig, out: &Output) -> Result<String> {
    let json = json_string(&out.report);
    write_file(&cfg.output_dir, "report.json", &json)?;
    let mut first_csv = None;
    for (name, table) in &out.tables {
        let csv = table.to_csv()?;
        write_file(&cfg.output_dir, name, &csv)?;
        first_csv.get_or_insert(csv);
    }
    Ok(match cfg.format {
        Format::Json => json,
        Format::Csv => first_csv.unwrap_or(json),
    })
}
