//! Run configuration: a JSON lattice file or a builtin preset, plus
//! command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::presets;
use crate::boundary::{BoundaryTolerances, NULL_TOL};
use crate::cellmap::DEFAULT_CENTRE_TOL;
use crate::error::{Error, Result};
use crate::homogenize::{DEFAULT_MAX_ITER, DEFAULT_RESIDUAL_TOL};
use crate::lattice::{LatticeSpec, MicroBc, MicroBcSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

/// Numerical tolerances, addressable by name from `--tol NAME=VALUE`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Slow-manifold residual threshold relative to `||L_0||`.
    pub residual: f64,
    pub max_iter: usize,
    /// Cell-map centre band around one.
    pub centre: f64,
    /// Relative singular-value cut for the boundary null space.
    pub null: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: DEFAULT_RESIDUAL_TOL,
            max_iter: DEFAULT_MAX_ITER,
            centre: DEFAULT_CENTRE_TOL,
            null: NULL_TOL,
        }
    }
}

pub const TOLERANCE_NAMES: [&str; 4] = ["residual", "max_iter", "centre", "null"];

impl Tolerances {
    pub fn set(&mut self, name: &str, value: &str) -> Result<()> {
        let bad = |msg: String| Error::Parse {
            path: "--tol".into(),
            message: msg,
        };
        let float = || -> Result<f64> {
            let v: f64 = value
                .parse()
                .map_err(|_| bad(format!("{name}: {value:?} is not a number")))?;
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(bad(format!("{name} must be positive, got {value}")))
            }
        };
        match name {
            "residual" => self.residual = float()?,
            "centre" | "center" => self.centre = float()?,
            "null" => self.null = float()?,
            "max_iter" => {
                self.max_iter = value
                    .parse()
                    .ok()
                    .filter(|&n: &usize| n > 0)
                    .ok_or_else(|| {
                        bad(format!(
                            "max_iter must be a positive integer, got {value:?}"
                        ))
                    })?
            }
            other => {
                return Err(bad(format!(
                    "unknown tolerance {other:?} (known: {})",
                    TOLERANCE_NAMES.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Apply `NAME=VALUE` overrides in order.
    pub fn apply(&mut self, overrides: &[String]) -> Result<()> {
        for o in overrides {
            let (name, value) = o.split_once('=').ok_or_else(|| Error::Parse {
                path: "--tol".into(),
                message: format!("expected NAME=VALUE, got {o:?}"),
            })?;
            self.set(name.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn boundary(&self) -> BoundaryTolerances {
        BoundaryTolerances {
            centre: self.centre,
            null: self.null,
        }
    }
}

/// Fully resolved configuration handed to a subcommand.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    /// Name of the builtin lattice this came from, if any. Written back as
    /// `label` so a saved config parses as a plain lattice.
    #[serde(rename = "label", skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(flatten)]
    pub spec: LatticeSpec,
    pub micro_bc_left: MicroBcSpec,
    pub micro_bc_right: MicroBcSpec,
    pub output_dir: PathBuf,
    pub format: Format,
    pub tolerances: Tolerances,
}

/// Command-line values that take precedence over the file or preset.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub h: Option<f64>,
    pub n_intervals: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub tolerances: Vec<String>,
}

pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    preset: Option<String>,
    label: Option<String>,
    s: Option<usize>,
    p: Option<usize>,
    h: Option<f64>,
    #[serde(rename = "N")]
    n: Option<usize>,
    kappa_long: Option<Vec<Vec<f64>>>,
    kappa_cross: Option<Vec<Vec<Vec<f64>>>>,
    rho: Option<Vec<Vec<f64>>>,
    micro_bc_left: Option<MicroBcValue>,
    micro_bc_right: Option<MicroBcValue>,
    output_dir: Option<PathBuf>,
    format: Option<Format>,
    tolerances: Option<BTreeMap<String, Value>>,
}

/// A boundary entry may carry a `side` field, which must then agree with
/// its position.
#[derive(Deserialize)]
struct MicroBcValue {
    #[serde(flatten)]
    kind: MicroBc,
    side: Option<crate::lattice::Side>,
}

fn parse_error(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

/// Read and validate a JSON config file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    parse_config_with(path, &Overrides::default())
}

pub fn parse_config_with(path: &Path, overrides: &Overrides) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| parse_error(&path.display().to_string(), e.to_string()))?;
    parse_config_str(&text, &path.display().to_string(), overrides)
}

/// Parse config text; `origin` names the source in error messages.
pub fn parse_config_str(text: &str, origin: &str, overrides: &Overrides) -> Result<RunConfig> {
    let file: FileConfig = serde_json::from_str(text).map_err(|e| {
        parse_error(
            origin,
            format!("line {} column {}: {e}", e.line(), e.column()),
        )
    })?;
    let spec = match &file.preset {
        Some(name) => {
            if file.s.is_some()
                || file.p.is_some()
                || file.kappa_long.is_some()
                || file.kappa_cross.is_some()
                || file.rho.is_some()
            {
                return Err(parse_error(
                    origin,
                    "a preset config may only set h and N among the lattice fields",
                ));
            }
            presets::preset(
                name,
                overrides.h.or(file.h),
                overrides.n_intervals.or(file.n),
            )?
        }
        None => {
            let missing = |field: &str| parse_error(origin, format!("missing field {field:?}"));
            LatticeSpec {
                s: file.s.ok_or_else(|| missing("s"))?,
                p: file.p.ok_or_else(|| missing("p"))?,
                h: overrides.h.or(file.h).ok_or_else(|| missing("h"))?,
                n_intervals: overrides
                    .n_intervals
                    .or(file.n)
                    .ok_or_else(|| missing("N"))?,
                kappa_long: file.kappa_long.ok_or_else(|| missing("kappa_long"))?,
                kappa_cross: file.kappa_cross.ok_or_else(|| missing("kappa_cross"))?,
                rho: file.rho.ok_or_else(|| missing("rho"))?,
            }
        }
    };
    let mut tolerances = Tolerances::default();
    if let Some(map) = &file.tolerances {
        for (name, value) in map {
            let text = match value {
                Value::Number(n) => n.to_string(),
                other => {
                    return Err(parse_error(
                        origin,
                        format!("tolerances.{name}: expected a number, got {other}"),
                    ))
                }
            };
            tolerances
                .set(name, &text)
                .map_err(|e| parse_error(origin, format!("tolerances.{name}: {e}")))?;
        }
    }
    let bc =
        |v: Option<MicroBcValue>, side: crate::lattice::Side, field: &str| -> Result<MicroBcSpec> {
            match v {
                None => Ok(MicroBcSpec::new(MicroBc::dirichlet_zero(spec.s), side)),
                Some(MicroBcValue {
                    side: Some(given), ..
                }) if given != side => Err(parse_error(
                    origin,
                    format!("{field}: side {given:?} does not match its position"),
                )),
                Some(v) => Ok(MicroBcSpec::new(v.kind, side)),
            }
        };
    let cfg = RunConfig {
        preset: file.preset.clone().or(file.label),
        micro_bc_left: bc(
            file.micro_bc_left,
            crate::lattice::Side::Left,
            "micro_bc_left",
        )?,
        micro_bc_right: bc(
            file.micro_bc_right,
            crate::lattice::Side::Right,
            "micro_bc_right",
        )?,
        spec,
        output_dir: overrides
            .output_dir
            .clone()
            .or(file.output_dir)
            .unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into()),
        format: overrides.format.or(file.format).unwrap_or_default(),
        tolerances,
    };
    finish(cfg, overrides)
}

/// Configuration for a builtin lattice.
pub fn preset_config(name: &str, overrides: &Overrides) -> Result<RunConfig> {
    let spec = presets::preset(name, overrides.h, overrides.n_intervals)?;
    let s = spec.s;
    let cfg = RunConfig {
        preset: Some(name.to_string()),
        spec,
        micro_bc_left: MicroBcSpec::left(MicroBc::dirichlet_zero(s)),
        micro_bc_right: MicroBcSpec::right(MicroBc::dirichlet_zero(s)),
        output_dir: overrides
            .output_dir
            .clone()
            .unwrap_or_else(|| DEFAULT_OUTPUT_DIR.into()),
        format: overrides.format.unwrap_or_default(),
        tolerances: Tolerances::default(),
    };
    finish(cfg, overrides)
}

fn finish(mut cfg: RunConfig, overrides: &Overrides) -> Result<RunConfig> {
    cfg.tolerances.apply(&overrides.tolerances)?;
    cfg.spec.check()?;
    Ok(cfg)
}

impl RunConfig {
    /// The config as JSON that [`parse_config`] reads back to an equal value.
    pub fn to_json(&self) -> String {
        super::output::json_string(&serde_json::to_value(self).expect("config serialises"))
    }
}
