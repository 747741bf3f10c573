//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! (plus indented diagnostics) and exits nonzero if any failed.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use multistrand::boundary::{
    assemble_constraints, closed_form_bc, derive_boundary, derive_macro_bc, MacroBc, MacroCondition,
};
use multistrand::cellmap::{
    backward_transfer_matrix, build_cell_map, classify_cell_map, transfer_matrix,
    DEFAULT_CENTRE_TOL,
};
use multistrand::cli::presets::{
    fig3, table1, TABLE1_CANDIDATE_H, TABLE1_DEFAULT_N, TABLE1_REFERENCE,
};
use multistrand::homogenize::{
    closed_form_two_strand, construct_slow_manifold, default_fit_wavenumbers, dispersion_fit,
    effective_coefficient, manifold_residual, DEFAULT_MAX_ITER,
};
use multistrand::lattice::{
    mass_diagonal, steady_operator, wavenumber_operator, zero_wavenumber_operator, LatticeSpec,
    MicroBc, MicroBcSpec,
};
use multistrand::validate::{
    compare_modes, macroscale_slowest_mode, microscale_spectrum, spectrum_checks,
};

struct Outcome {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            notes: Vec::new(),
        }
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Largest difference between two conditions relative to their size.
fn bc_distance(a: &MacroBc, b: &MacroBc) -> f64 {
    fn flat(c: &MacroCondition) -> (u8, Vec<f64>) {
        match c {
            MacroCondition::Robin { d, weights } => (
                0,
                std::iter::once(*d).chain(weights.iter().copied()).collect(),
            ),
            MacroCondition::Neumann { weights } => (1, weights.clone()),
            MacroCondition::CauchyPair {
                value_weights,
                slope_weights,
            } => (
                2,
                value_weights.iter().chain(slope_weights).copied().collect(),
            ),
            MacroCondition::Unconstrained => (3, Vec::new()),
        }
    }
    let (ka, va) = flat(&a.condition);
    let (kb, vb) = flat(&b.condition);
    if ka != kb || va.len() != vb.len() {
        return f64::INFINITY;
    }
    let scale = va
        .iter()
        .chain(&vb)
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    va.iter()
        .zip(&vb)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Specs drawn for criteria 1 to 3, reused by the residual certificate.
struct Samples {
    two_by_two: Vec<LatticeSpec>,
    small: Vec<LatticeSpec>,
    trichotomy: Vec<LatticeSpec>,
}

fn samples() -> Samples {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let two_by_two = (0..200)
        .map(|_| LatticeSpec::random(&mut rng, 2, 2, 1.0, 16, 0.1..10.0))
        .collect();
    let small = (0..50)
        .map(|_| {
            let s = rng.random_range(1..=3);
            let p = rng.random_range(1..=4);
            let h = rng.random_range(0.2..2.0);
            LatticeSpec::random(&mut rng, s, p, h, 4 * p, 0.1..10.0)
        })
        .collect();
    let trichotomy = (0..500)
        .map(|_| {
            let s = rng.random_range(2..=6);
            let p = rng.random_range(2..=8);
            LatticeSpec::random(&mut rng, s, p, 1.0, 4 * p, 0.0..100.0)
        })
        .collect();
    Samples {
        two_by_two,
        small,
        trichotomy,
    }
}

fn criterion_1(samples: &Samples) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for spec in &samples.two_by_two {
        let c =
            construct_slow_manifold(spec, DEFAULT_MAX_ITER).map(|sm| effective_coefficient(&sm));
        let cf = closed_form_two_strand(spec).map(|r| r.ratio());
        match (c, cf) {
            (Ok(c), Ok(cf)) => {
                let e = rel(c, cf);
                worst = worst.max(e);
                if e >= 1e-9 {
                    failures += 1;
                }
            }
            _ => failures += 1,
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        failures == 0 && elapsed < Duration::from_secs(10),
        format!("closed-form equivalence: 200 specs, worst relative error {worst:.2e}, {failures} failures, {elapsed:.2?}"),
    )
}

fn criterion_2(samples: &Samples) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for spec in &samples.small {
        let res = construct_slow_manifold(spec, DEFAULT_MAX_ITER).and_then(|sm| {
            Ok((
                effective_coefficient(&sm),
                dispersion_fit(spec, &default_fit_wavenumbers(spec))?,
            ))
        });
        match res {
            Ok((c, fit)) => {
                let e = rel(c, fit);
                worst = worst.max(e);
                if e >= 1e-4 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        failures == 0 && elapsed < Duration::from_secs(30),
        format!("dispersion oracle: 50 specs, worst relative error {worst:.2e}, {failures} failures, {elapsed:.2?}"),
    )
}

fn criterion_3(samples: &Samples) -> Outcome {
    let start = Instant::now();
    let mut counts_ok = 0;
    let mut real_ok = 0;
    let mut errors = 0;
    let mut complex_examples = Vec::new();
    let mut worst_imag = 0.0f64;
    let (mut with_complex, mut with_negative) = (0, 0);
    for (i, spec) in samples.trichotomy.iter().enumerate() {
        assert!(spec.is_connected());
        let s = spec.s;
        let tri = transfer_matrix(spec)
            .and_then(|t| Ok((t, backward_transfer_matrix(spec)?)))
            .and_then(|(t, b)| classify_cell_map(&t, &b, DEFAULT_CENTRE_TOL));
        let tri = match tri {
            Ok(t) => t,
            Err(_) => {
                errors += 1;
                continue;
            }
        };
        if tri.counts() == (s - 1, 2, s - 1) {
            counts_ok += 1;
        }
        if tri.all_real_positive() {
            real_ok += 1;
        } else {
            let im = tri
                .stable
                .iter()
                .chain(&tri.unstable)
                .map(|z| z.im.abs() / z.norm())
                .fold(0.0, f64::max);
            worst_imag = worst_imag.max(im);
            let off: Vec<_> = tri.stable.iter().chain(&tri.unstable).collect();
            if off.iter().any(|z| z.im.abs() > 1e-9 * z.norm()) {
                with_complex += 1;
            }
            if off
                .iter()
                .any(|z| z.im.abs() <= 1e-9 * z.norm() && z.re < 0.0)
            {
                with_negative += 1;
            }
            if complex_examples.len() < 3 {
                complex_examples.push(format!(
                    "#{i} (s={}, p={}): max |Im mu|/|mu| = {im:.3}",
                    spec.s, spec.p
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    let n = samples.trichotomy.len();
    let mut out = Outcome::new(
        counts_ok == n && real_ok == n && elapsed < Duration::from_secs(60),
        format!(
            "trichotomy: {n} specs, counts (s-1,2,s-1) in {counts_ok}, all real positive in {real_ok}, {errors} errors, {elapsed:.2?}"
        ),
    );
    if real_ok < n {
        out = out
            .note(format!(
                "{} specs have non-centre multipliers off the positive real axis: {with_complex} with complex pairs (largest relative imaginary part {worst_imag:.3}), {with_negative} with negative reals",
                n - real_ok
            ))
            .note(if counts_ok == n {
                "the stable/centre/unstable counts are right for every spec"
            } else {
                "some specs also miss the expected counts"
            })
            .note("the off-axis multipliers persist in high-precision arithmetic, so the realness claim does not hold for this sampling");
        for e in complex_examples {
            out = out.note(e);
        }
    }
    out
}

/// The two-strand cell map written out from its literal 4x4 factors.
fn literal_fig3_map(spec: &LatticeSpec) -> DMatrix<f64> {
    let k = &spec.kappa_long;
    let (k00, k01, k10, k11) = (k[0][0], k[0][1], k[1][0], k[1][1]);
    let (c0, c1) = (spec.kappa_cross[0][0][1], spec.kappa_cross[1][0][1]);
    #[rustfmt::skip]
    let left = Matrix4::new(
        k10, 0.0, 0.0, 0.0,
        0.0, k11, 0.0, 0.0,
        -k10 - k00 - c0, c0, k00, 0.0,
        c0, -k11 - k01 - c0, 0.0, k01,
    );
    #[rustfmt::skip]
    let right = Matrix4::new(
        k00, 0.0, -k00 - k10 - c1, c1,
        0.0, k01, c1, -k01 - k11 - c1,
        0.0, 0.0, k10, 0.0,
        0.0, 0.0, 0.0, k11,
    );
    let t = -(left.try_inverse().expect("invertible") * right);
    DMatrix::from_iterator(4, 4, t.iter().copied())
}

fn criterion_4() -> Outcome {
    let spec = fig3(1.0, 16);
    let cm = match build_cell_map(&spec) {
        Ok(cm) => cm,
        Err(e) => return Outcome::new(false, format!("two-strand example: cell map failed: {e}")),
    };
    let map_err = (&cm.transfer - literal_fig3_map(&spec)).abs().max();

    let v1 = &cm.stable_vectors[0];
    let v3 = &cm.generalized_vector;
    let h = spec.h;
    let (v11, v12, v31, v32) = (v1[0], v1[1], v3[0], v3[1]);
    let d_lit = -2.0 * h * ((v12 * v31 - v11 * v32) / (-v12 + v11) + 0.25 * (v3.sum() - 1.0));
    let w_lit = [-v12 / (v11 - v12), v11 / (v11 - v12)];
    let bc_err = match derive_boundary(&spec, &MicroBcSpec::left(MicroBc::dirichlet_zero(2))) {
        Ok(MacroBc {
            condition: MacroCondition::Robin { d, weights },
            ..
        }) => rel(d, d_lit)
            .max((weights[0] - w_lit[0]).abs())
            .max((weights[1] - w_lit[1]).abs()),
        _ => f64::INFINITY,
    };

    let bc = MicroBc::dirichlet_zero(2);
    let cmp = construct_slow_manifold(&spec, DEFAULT_MAX_ITER).and_then(|sm| {
        let l = derive_boundary(&spec, &MicroBcSpec::left(bc.clone()))?;
        let r = derive_boundary(&spec, &MicroBcSpec::right(bc.clone()))?;
        compare_modes(&spec, &sm, &l, &r)
    });
    let (er, ed) = cmp
        .map(|c| (c.interior_error_robin, c.interior_error_dirichlet))
        .unwrap_or((f64::NAN, f64::NAN));
    Outcome::new(
        map_err < 1e-12 && bc_err < 1e-9 && er < ed,
        format!(
            "two-strand example: map error {map_err:.1e}, boundary condition error {bc_err:.1e}, interior error Robin {er:.5} < Dirichlet {ed:.5}"
        ),
    )
    .note(format!("d = {d_lit:.6}, U + d dU/dx = {:.6} b00 + {:.6} b01", w_lit[0], w_lit[1]))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst = [0.0f64; 5];
    let mut failures = 0;
    let names = [
        "flux",
        "robin_like",
        "cauchy_like",
        "mixed (left)",
        "mixed (right)",
    ];
    for _ in 0..100 {
        let h = rng.random_range(0.5..2.0);
        let spec = LatticeSpec::random(&mut rng, 2, 2, h, 16, 0.1..10.0);
        let mut draw = |n: usize| {
            (0..n)
                .map(|_| rng.random_range(-1.0..1.0))
                .collect::<Vec<f64>>()
        };
        let dd = draw(2)
            .iter()
            .map(|x| (x.abs() * 0.5 + 0.05) * spec.h)
            .collect::<Vec<_>>();
        let b = draw(3);
        let kinds = [
            MicroBcSpec::left(MicroBc::Flux { d: draw(2) }),
            MicroBcSpec::left(MicroBc::RobinLike { d: dd, b: draw(2) }),
            MicroBcSpec::left(MicroBc::CauchyLike {
                b00: b[0],
                b10: b[1],
            }),
            MicroBcSpec::left(MicroBc::Mixed { b: b.clone() }),
            MicroBcSpec::right(MicroBc::Mixed { b: vec![b[2]] }),
        ];
        let cm = match build_cell_map(&spec) {
            Ok(cm) => cm,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        for (i, bc) in kinds.iter().enumerate() {
            let numeric = if i == 4 {
                derive_boundary(&spec, bc)
            } else {
                assemble_constraints(&cm, bc, &spec).and_then(|cs| derive_macro_bc(&cs))
            };
            let closed = if i == 4 {
                build_cell_map(&spec.reversed())
                    .and_then(|m| closed_form_bc(&spec.reversed(), &m, bc))
            } else {
                closed_form_bc(&spec, &cm, bc)
            };
            let e = match (numeric, closed) {
                (Ok(n), Ok(c)) if i == 4 => {
                    // nothing is imposed, so b_{N,0} cannot appear
                    if matches!(n.condition, MacroCondition::Unconstrained)
                        && matches!(c.condition, MacroCondition::Unconstrained)
                    {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                }
                (Ok(n), Ok(c)) => bc_distance(&n, &c),
                _ => f64::INFINITY,
            };
            worst[i] = worst[i].max(e);
            if e >= 1e-9 {
                failures += 1;
            }
        }
    }
    let detail: Vec<String> = names
        .iter()
        .zip(worst)
        .map(|(n, w)| format!("{n} {w:.1e}"))
        .collect();
    Outcome::new(
        failures == 0,
        format!("closed-form boundary conditions: 100 specs, worst relative error {}; {failures} failures", detail.join(", ")),
    )
}

/// Boundary condition at the left end of `spec` from first principles: the
/// backward map from a dense solve of the steady equations, its dominant
/// subspace by orthogonal iteration, the linear mode from a bordered cell
/// solve, the null vector from a square solve.
fn dense_dirichlet_bc(spec: &LatticeSpec) -> Option<(f64, Vec<f64>)> {
    let (s, p, h) = (spec.s, spec.p, spec.h);
    let a = steady_operator(spec, p);
    let n = 2 * s;
    // backward: unknowns u_0..u_{p-1} from u_p, u_{p+1}
    let known_b = a.columns(s * p, n).into_owned();
    let unknown_b = a.columns(0, s * p).into_owned();
    let back_full = -unknown_b.lu().solve(&known_b)?;
    let back = back_full.rows(0, n).into_owned();

    // orthogonal iteration: dominant s-1 directions of the backward map are
    // the decaying ones of the forward map
    let k = s - 1;
    let mut q = DMatrix::from_fn(n, k, |i, j| ((i * 7 + j * 13) % 11) as f64 - 5.0);
    for _ in 0..300 {
        q = (&back * &q).qr().q();
    }
    // linear mode u_m = (m + phi_m) / p with periodic phi, mean-zero gauge,
    // from a bordered solve over one period
    let nc = s * p;
    let mut wrap = DMatrix::zeros(s * (p + 2), nc);
    let mut ramp = DVector::zeros(s * (p + 2));
    for m in 0..p + 2 {
        for j in 0..s {
            wrap[(m * s + j, (m % p) * s + j)] = 1.0;
            ramp[m * s + j] = m as f64;
        }
    }
    let mut bordered = DMatrix::zeros(nc + 1, nc + 1);
    bordered.view_mut((0, 0), (nc, nc)).copy_from(&(&a * &wrap));
    bordered.view_mut((0, nc), (nc, 1)).fill(1.0);
    bordered.view_mut((nc, 0), (1, nc)).fill(1.0);
    let mut rhs = DVector::zeros(nc + 1);
    rhs.rows_mut(0, nc).copy_from(&(-(&a * &ramp)));
    let phi = bordered.lu().solve(&rhs)?;
    let mode: Vec<f64> = (0..nc + n)
        .map(|k| (ramp[k] + phi[k % nc]) / p as f64)
        .collect();
    let vg = DVector::from_column_slice(&mode[..n]);
    let cell = &mode[..nc];
    let gamma = cell.iter().sum::<f64>() / (s * p) as f64 - (p as f64 - 1.0) / (2.0 * p as f64);

    let cols = k + 2;
    let mut m = DMatrix::zeros(s + 2, cols);
    for j in 0..s {
        for c in 0..k {
            m[(j, c)] = q[(j, c)];
        }
        m[(j, k)] = 1.0;
        m[(j, k + 1)] = vg[j];
    }
    m[(s, k)] = 1.0;
    m[(s, k + 1)] = gamma;
    m[(s + 1, k + 1)] = 1.0 / (p as f64 * h);
    // left null vector w of M normalised by w_U = 1: the other s + 1 entries
    // solve a square system
    let mt = m.transpose();
    let mut sq = DMatrix::zeros(cols, s + 1);
    for (c, r) in (0..s).chain([s + 1]).enumerate() {
        sq.set_column(c, &mt.column(r));
    }
    let rest = sq.lu().solve(&(-mt.column(s)))?;
    Some((rest[s], (0..s).map(|i| -rest[i]).collect()))
}

fn criterion_6() -> Outcome {
    let h = TABLE1_CANDIDATE_H;
    let spec = table1(h, TABLE1_DEFAULT_N);
    let bc = MicroBc::dirichlet_zero(5);
    let sm = construct_slow_manifold(&spec, DEFAULT_MAX_ITER);
    let left = derive_boundary(&spec, &MicroBcSpec::left(bc.clone()));
    let right = derive_boundary(&spec, &MicroBcSpec::right(bc));
    let (sm, left, right) = match (sm, left, right) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (a, b, c) => {
            return Outcome::new(
                false,
                format!(
                    "five-strand example: pipeline failed: {:?} {:?} {:?}",
                    a.err(),
                    b.err(),
                    c.err()
                ),
            )
        }
    };
    let oracle_l = dense_dirichlet_bc(&spec);
    let oracle_r = dense_dirichlet_bc(&spec.reversed()).map(|(d, w)| (-d, w));
    let diff = |bc: &MacroBc, o: &Option<(f64, Vec<f64>)>| match (&bc.condition, o) {
        (MacroCondition::Robin { d, weights }, Some((od, ow))) => {
            let scale = weights.iter().fold(d.abs(), |m, x| m.max(x.abs()));
            weights
                .iter()
                .zip(ow)
                .map(|(a, b)| (a - b).abs())
                .fold((d - od).abs(), f64::max)
                / scale
        }
        _ => f64::INFINITY,
    };
    let (el, er) = (diff(&left, &oracle_l), diff(&right, &oracle_r));
    let r = &TABLE1_REFERENCE;
    let d0 = left.d().unwrap_or(f64::NAN) / h;
    let dl = right.d().unwrap_or(f64::NAN) / h;
    let cmp = |name: &str, ours: f64, published: f64| {
        let ok = (ours - published).abs() <= 0.01;
        format!(
            "{name}: {ours:.4} vs published {published} [{}]",
            if ok { "match" } else { "FLAGGED" }
        )
    };
    Outcome::new(
        el < 1e-9 && er < 1e-9,
        format!("five-strand example (h = 2pi/46): dense re-derivation agrees to {:.1e} (left), {:.1e} (right)", el, er),
    )
    .note(cmp("c", sm.c, r.c))
    .note(cmp("std(alpha)", sm.std_alpha(), r.std_alpha))
    .note(cmp("std(beta)", sm.std_beta(), r.std_beta))
    .note(cmp("d0/h", d0, r.d_left_over_h))
    .note(cmp("dL/h", dl, r.d_right_over_h))
    .note("published values depend on an unstated spacing; mismatches are reported, not failed")
}

fn criterion_7(samples: &Samples) -> Outcome {
    let start = Instant::now();
    let mut worst_res = 0.0f64;
    let mut worst_mean = 0.0f64;
    let mut worst_g = 0.0f64;
    let mut failures = 0;
    let all: Vec<&LatticeSpec> = samples
        .two_by_two
        .iter()
        .chain(&samples.small)
        .chain(&samples.trichotomy)
        .collect();
    for spec in &all {
        let sm = match construct_slow_manifold(spec, DEFAULT_MAX_ITER) {
            Ok(sm) => sm,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let l0 = zero_wavenumber_operator(spec).norm();
        let res = manifold_residual(
            &mass_diagonal(spec),
            &wavenumber_operator(spec),
            &sm.shape,
            &sm.evolution,
        )
        .map(|r| r.iter().map(|a| a.max_abs()).fold(0.0, f64::max))
        .unwrap_or(f64::INFINITY);
        let r = res / l0.max(f64::MIN_POSITIVE);
        let mean = sm.mean_alpha().abs().max(sm.mean_beta().abs());
        let g = sm
            .evolution
            .coeff(0)
            .norm()
            .max(sm.evolution.coeff(1).norm());
        worst_res = worst_res.max(r);
        worst_mean = worst_mean.max(mean);
        worst_g = worst_g.max(g);
        if !(r < 1e-12 && mean < 1e-12 && g < 1e-12) {
            failures += 1;
        }
    }
    Outcome::new(
        failures == 0,
        format!(
            "residual certificate: {} specs, residual/|L0| {worst_res:.1e}, |mean alpha, beta| {worst_mean:.1e}, |g0|,|g1| {worst_g:.1e}, {failures} failures, {:.2?}",
            all.len(),
            start.elapsed()
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut failures = Vec::new();
    let mut worst_sym = 0.0f64;
    let mut worst_row = 0.0f64;
    let mut min_gap = f64::INFINITY;
    for i in 0..100 {
        let (s, p) = loop {
            let s = rng.random_range(1..=5);
            let p = rng.random_range(1..=6);
            if s * p >= 2 {
                break (s, p);
            }
        };
        let h = rng.random_range(0.2..2.0);
        let spec = LatticeSpec::random(&mut rng, s, p, h, 4 * p, 0.1..10.0);
        match spectrum_checks(&spec) {
            Ok(r) => {
                let scale = r.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
                worst_sym = worst_sym.max(r.symmetry_defect);
                worst_row = worst_row.max(r.max_row_sum / scale);
                let gap = r.spectral_gap.unwrap_or(f64::NAN);
                min_gap = min_gap.min(gap / scale);
                let ok = r.symmetry_defect < 1e-12
                    && r.max_row_sum <= 1e-12 * scale
                    && r.min_eigenvalue >= -1e-10 * scale
                    && r.zero_multiplicity == 1
                    && gap > 0.0
                    && r.rayleigh_within_spectrum
                    && r.passes();
                if !ok {
                    failures.push(i);
                }
            }
            Err(_) => failures.push(i),
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "spectrum suite: 100 specs, symmetry defect {worst_sym:.1e}, row sums {worst_row:.1e}, smallest relative gap {min_gap:.2e}, failures {failures:?}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..50 {
        let s = rng.random_range(2..=4);
        let p = rng.random_range(2..=5);
        let h = rng.random_range(0.5..2.0);
        let spec = LatticeSpec::random(&mut rng, s, p, h, 4 * p, 0.1..10.0);
        let cm = match build_cell_map(&spec) {
            Ok(cm) => cm,
            Err(_) => {
                failures += 1;
                continue;
            }
        };
        let data: Vec<f64> = (0..s).map(|_| rng.random_range(-1.0..1.0)).collect();
        for bc in [
            MicroBcSpec::left(MicroBc::Dirichlet { b: data.clone() }),
            MicroBcSpec::left(MicroBc::Flux { d: data.clone() }),
        ] {
            let base = assemble_constraints(&cm, &bc, &spec).and_then(|cs| derive_macro_bc(&cs));
            let mut moved = cm.clone();
            moved.shift_gauge(rng.random_range(-10.0..10.0));
            for v in moved.stable_vectors.iter_mut() {
                let f: f64 =
                    rng.random_range(0.1..10.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 };
                *v *= f;
            }
            let other =
                assemble_constraints(&moved, &bc, &spec).and_then(|cs| derive_macro_bc(&cs));
            let e = match (base, other) {
                (Ok(a), Ok(b)) => bc_distance(&a, &b),
                _ => f64::INFINITY,
            };
            worst = worst.max(e);
            if e >= 1e-9 {
                failures += 1;
            }
        }
    }
    Outcome::new(
        failures == 0,
        format!("gauge invariance: 50 specs x 2 kinds, worst relative change {worst:.1e}, {failures} failures"),
    )
}

fn criterion_10() -> Outcome {
    let mut worst_micro = 0.0f64;
    let mut worst_macro = 0.0f64;
    let mut ok = true;
    for (kappa, rho, h, n) in [(1.0, 1.0, 1.0, 8), (2.5, 0.4, 0.1, 40), (0.3, 7.0, 2.0, 17)] {
        let spec = LatticeSpec::uniform(1, 1, h, n, kappa, 0.0, rho);
        match microscale_spectrum(&spec) {
            Ok(vals) => {
                let positive: Vec<f64> = vals.into_iter().filter(|v| *v > 1e-12).collect();
                ok &= positive.len() == n - 1;
                for (m, v) in positive.iter().enumerate() {
                    let exact = 2.0 * kappa / (rho * h * h)
                        * (1.0 - (PI * (m + 1) as f64 / n as f64).cos());
                    worst_micro = worst_micro.max(rel(*v, exact));
                }
            }
            Err(_) => ok = false,
        }
        let c = kappa / rho;
        let length = n as f64 * h;
        let x: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        match macroscale_slowest_mode(c, length, (1.0, 0.0), (1.0, 0.0), &x) {
            Ok(mode) => {
                worst_macro = worst_macro.max(rel(mode.lambda, c * PI * PI / (length * length)))
            }
            Err(_) => ok = false,
        }
    }
    Outcome::new(
        ok && worst_micro < 1e-10 && worst_macro < 1e-12,
        format!("uniform chain: microscale spectrum error {worst_micro:.1e}, macroscale Dirichlet error {worst_macro:.1e}"),
    )
}

fn main() {
    // accept and ignore libtest flags such as --nocapture or filters
    let samples = samples();
    let criteria: Vec<(usize, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, Box::new(|| criterion_1(&samples))),
        (2, Box::new(|| criterion_2(&samples))),
        (3, Box::new(|| criterion_3(&samples))),
        (4, Box::new(criterion_4)),
        (5, Box::new(criterion_5)),
        (6, Box::new(criterion_6)),
        (7, Box::new(|| criterion_7(&samples))),
        (8, Box::new(criterion_8)),
        (9, Box::new(criterion_9)),
        (10, Box::new(criterion_10)),
    ];
    let mut failed = Vec::new();
    for (n, run) in &criteria {
        let out = run();
        println!(
            "{} criterion {n}: {}",
            if out.pass { "PASS" } else { "FAIL" },
            out.summary
        );
        for note in &out.notes {
            println!("    {note}");
        }
        if !out.pass {
            failed.push(*n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
