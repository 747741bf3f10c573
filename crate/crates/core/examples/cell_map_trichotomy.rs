//! Cell map eigen-structure: s-1 decaying, two unit (a Jordan pair) and s-1
//! growing multipliers for a connected lattice.

use multistrand::cellmap::build_cell_map;
use multistrand::cli::presets::{fig3, FIG3_DEFAULT_N};
use multistrand::lattice::LatticeSpec;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn show(name: &str, spec: &LatticeSpec) -> multistrand::Result<()> {
    let cm = build_cell_map(spec)?;
    let (st, ce, un) = cm.trichotomy().counts();
    println!(
        "{name}: s={} p={} -> stable {st}, centre {ce}, unstable {un}",
        spec.s, spec.p
    );
    for z in &cm.eigenvalues {
        println!("    {:>14.6e} {:+.3e}i", z.re, z.im);
    }
    let n = cm.transfer.nrows();
    let vg = &cm.generalized_vector;
    let defect = (&cm.transfer * vg - vg - DMatrix::from_element(n, 1, 1.0).column(0)).norm();
    println!("    (T - I) v_g = 1 defect {defect:.1e}");
    Ok(())
}

fn main() -> multistrand::Result<()> {
    show("two-strand example", &fig3(1.0, FIG3_DEFAULT_N))?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (s, p) in [(3, 2), (4, 5)] {
        let spec = LatticeSpec::random(&mut rng, s, p, 1.0, 4 * p, 0.1..10.0);
        show("random", &spec)?;
    }
    Ok(())
}
