//! The effective coefficient against the lowest Bloch branch: lambda_0(k)/k^2
//! tends to c as k -> 0, and a c k^2 + d k^4 fit recovers it.

use multistrand::cli::presets::{fig3, FIG3_DEFAULT_N};
use multistrand::homogenize::{
    construct_slow_manifold, default_fit_wavenumbers, dispersion_eigenvalues, dispersion_fit,
    DEFAULT_MAX_ITER,
};
use multistrand::lattice::LatticeSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> multistrand::Result<()> {
    let spec = fig3(1.0, FIG3_DEFAULT_N);
    let c = construct_slow_manifold(&spec, DEFAULT_MAX_ITER)?.c;
    println!("c from the slow manifold: {c:.10}");
    println!("          k   lambda_0/k^2");
    for k in [0.4, 0.2, 0.1, 0.05, 0.01] {
        let lam = dispersion_eigenvalues(&spec, k)?[0];
        println!("{k:>11.4} {:>14.10}", lam / (k * k));
    }
    let fit = dispersion_fit(&spec, &default_fit_wavenumbers(&spec))?;
    println!(
        "fit: {fit:.10} (relative difference {:.1e})",
        (fit - c).abs() / c
    );

    // same check over a handful of random lattices
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (s, p) in [(1, 3), (2, 4), (3, 2), (3, 3)] {
        let spec = LatticeSpec::random(&mut rng, s, p, 0.5, 4 * p, 0.1..10.0);
        let c = construct_slow_manifold(&spec, DEFAULT_MAX_ITER)?.c;
        let fit = dispersion_fit(&spec, &default_fit_wavenumbers(&spec))?;
        println!(
            "s={s} p={p}: c = {c:.8}, fit = {fit:.8}, rel diff {:.1e}",
            (fit - c).abs() / c
        );
    }
    Ok(())
}
