//! Builtin lattices: the two-strand example, the five-strand ten-periodic
//! example generated from its coefficient table, and a uniform chain.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

pub const PRESETS: [&str; 3] = ["paper-2x2-fig3", "paper-5x10-table1", "uniform-chain"];

/// Spacing that makes `4.6 n h` exactly ten-periodic in `n`.
pub const TABLE1_CANDIDATE_H: f64 = 2.0 * PI / 46.0;
pub const TABLE1_DEFAULT_N: usize = 23;
pub const FIG3_DEFAULT_N: usize = 16;

const A: [f64; 5] = [0.929, 0.776, 0.487, 0.436, 0.447];
const B: [f64; 5] = [0.963, 0.547, 0.521, 0.231, 0.489];
const PHI: [f64; 5] = [-1.217, 0.053, 0.068, 1.996, 1.852];
const VARPHI: [f64; 5] = [0.779, 1.126, -0.656, -0.833, 3.066];
const A_CROSS: [[f64; 5]; 5] = [
    [0.0, 0.939, 0.208, 0.195, 0.311],
    [0.939, 0.0, 0.301, 0.226, 0.923],
    [0.208, 0.301, 0.0, 0.171, 0.430],
    [0.195, 0.226, 0.171, 0.0, 0.185],
    [0.311, 0.923, 0.430, 0.185, 0.0],
];
const PHI_CROSS: [[f64; 5]; 5] = [
    [0.0, 0.596, -2.404, -2.604, 1.447],
    [0.596, 0.0, -1.278, -1.492, -0.0720],
    [-2.404, -1.278, 0.0, 1.891, 0.493],
    [-2.604, -1.492, 1.891, 0.0, -1.651],
    [1.447, -0.0720, 0.493, -1.651, 0.0],
];

/// Published five-strand slow-manifold summary and boundary coefficients.
pub struct Table1Reference {
    pub c: f64,
    pub std_alpha: f64,
    pub std_beta: f64,
    pub d_left_over_h: f64,
    pub d_right_over_h: f64,
}

pub const TABLE1_REFERENCE: Table1Reference = Table1Reference {
    c: 1.176,
    std_alpha: 0.46,
    std_beta: 0.64,
    d_left_over_h: 0.058,
    d_right_over_h: 0.53,
};

pub fn fig3(h: f64, n_intervals: usize) -> LatticeSpec {
    LatticeSpec {
        s: 2,
        p: 2,
        h,
        n_intervals,
        kappa_long: vec![vec![2.0, 0.5], vec![0.1, 5.0]],
        kappa_cross: vec![
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![vec![0.0, 0.1], vec![0.1, 0.0]],
        ],
        rho: vec![vec![1.0, 2.0], vec![4.0, 0.5]],
    }
}

/// Five strands, period ten, coefficients sampled at `n = 0..9`.
pub fn table1(h: f64, n_intervals: usize) -> LatticeSpec {
    let (s, p) = (5, 10);
    let arg = |n: usize| 4.6 * n as f64 * h;
    let kappa_long = (0..p)
        .map(|n| {
            (0..s)
                .map(|j| 1.0 / (1.0 + A[j] * (arg(n) + PHI[j]).cos()))
                .collect()
        })
        .collect();
    let kappa_cross = (0..p)
        .map(|n| {
            (0..s)
                .map(|i| {
                    (0..s)
                        .map(|j| {
                            if i == j {
                                0.0
                            } else {
                                1.0 / (1.0 + A_CROSS[i][j] * (arg(n) + PHI_CROSS[i][j]).cos())
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let rho = (0..p)
        .map(|n| {
            (0..s)
                .map(|j| 1.0 + B[j] * (arg(n) + VARPHI[j]).sin())
                .collect()
        })
        .collect();
    LatticeSpec {
        s,
        p,
        h,
        n_intervals,
        kappa_long,
        kappa_cross,
        rho,
    }
}

pub fn uniform_chain(h: f64, n_intervals: usize) -> LatticeSpec {
    LatticeSpec::uniform(1, 1, h, n_intervals, 1.0, 0.0, 1.0)
}

/// Resolve a preset by name. The five-strand preset has no published
/// spacing, so `h` is mandatory for it.
pub fn preset(name: &str, h: Option<f64>, n_intervals: Option<usize>) -> Result<LatticeSpec> {
    let spec = match name {
        "paper-2x2-fig3" => fig3(h.unwrap_or(1.0), n_intervals.unwrap_or(FIG3_DEFAULT_N)),
        "paper-5x10-table1" => {
            let h = h.ok_or_else(|| Error::Parse {
                path: format!("preset:{name}"),
                message: format!("--h is required (candidate {TABLE1_CANDIDATE_H:.17} = 2*pi/46)"),
            })?;
            table1(h, n_intervals.unwrap_or(TABLE1_DEFAULT_N))
        }
        "uniform-chain" => uniform_chain(h.unwrap_or(1.0), n_intervals.unwrap_or(8)),
        other => {
            return Err(Error::Parse {
                path: format!("preset:{other}"),
                message: format!("unknown preset; expected one of {}", PRESETS.join(", ")),
            })
        }
    };
    spec.check()?;
    Ok(spec)
}
