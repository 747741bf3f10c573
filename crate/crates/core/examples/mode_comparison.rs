//! Slowest microscale mode against the macroscale modes with the derived
//! Robin conditions and with naive U = 0 ends.

use multistrand::boundary::derive_boundary;
use multistrand::cli::presets::{fig3, FIG3_DEFAULT_N};
use multistrand::homogenize::{construct_slow_manifold, DEFAULT_MAX_ITER};
use multistrand::lattice::{MicroBc, MicroBcSpec};
use multistrand::validate::compare_modes;

fn main() -> multistrand::Result<()> {
    let spec = fig3(1.0, FIG3_DEFAULT_N);
    let sm = construct_slow_manifold(&spec, DEFAULT_MAX_ITER)?;
    let left = derive_boundary(&spec, &MicroBcSpec::left(MicroBc::dirichlet_zero(2)))?;
    let right = derive_boundary(&spec, &MicroBcSpec::right(MicroBc::dirichlet_zero(2)))?;
    let cmp = compare_modes(&spec, &sm, &left, &right)?;

    println!(
        "lambda: micro {:.6}, Robin {:.6}, Dirichlet {:.6}",
        cmp.lambda_micro, cmp.lambda_robin, cmp.lambda_dirichlet
    );
    println!(" n      x   micro   robin  dirichlet");
    for i in 0..cmp.n_grid.len() {
        println!(
            "{:>2} {:>6.2} {:>7.4} {:>7.4} {:>10.4}",
            cmp.n_grid[i],
            cmp.x_grid[i],
            cmp.micro_average[i],
            cmp.macro_robin[i],
            cmp.macro_dirichlet[i]
        );
    }
    println!(
        "interior error over columns {}..={}: Robin {:.5}, Dirichlet {:.5}",
        cmp.window.0, cmp.window.1, cmp.interior_error_robin, cmp.interior_error_dirichlet
    );
    Ok(())
}
