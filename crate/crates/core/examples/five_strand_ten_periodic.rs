//! The five-strand, ten-periodic lattice. The spacing is an input; the
//! default makes the sampled cosines exactly ten-periodic.
//!
//!     cargo run --example five_strand_ten_periodic -- 0.13659

use multistrand::boundary::derive_boundary;
use multistrand::cli::presets::{table1, TABLE1_CANDIDATE_H, TABLE1_DEFAULT_N, TABLE1_REFERENCE};
use multistrand::homogenize::{construct_slow_manifold, DEFAULT_MAX_ITER};
use multistrand::lattice::{MicroBc, MicroBcSpec};

fn main() -> multistrand::Result<()> {
    let h = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("spacing must be a number"))
        .unwrap_or(TABLE1_CANDIDATE_H);
    let spec = table1(h, TABLE1_DEFAULT_N);
    let sm = construct_slow_manifold(&spec, DEFAULT_MAX_ITER)?;
    let left = derive_boundary(&spec, &MicroBcSpec::left(MicroBc::dirichlet_zero(5)))?;
    let right = derive_boundary(&spec, &MicroBcSpec::right(MicroBc::dirichlet_zero(5)))?;
    let r = &TABLE1_REFERENCE;

    println!("h = {h:.6}");
    println!("               ours  published");
    println!("c          {:>8.4} {:>10}", sm.c, r.c);
    println!("std alpha  {:>8.4} {:>10}", sm.std_alpha(), r.std_alpha);
    println!("std beta   {:>8.4} {:>10}", sm.std_beta(), r.std_beta);
    println!(
        "d0 / h     {:>8.4} {:>10}",
        left.d().unwrap_or(f64::NAN) / h,
        r.d_left_over_h
    );
    println!(
        "dL / h     {:>8.4} {:>10}",
        right.d().unwrap_or(f64::NAN) / h,
        r.d_right_over_h
    );
    Ok(())
}
