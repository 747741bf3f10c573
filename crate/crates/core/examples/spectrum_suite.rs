//! Structural checks on the cell operator: symmetry, zero row sums,
//! semi-definiteness and the Rayleigh quotient bounds.

use multistrand::cli::presets::{
    fig3, table1, FIG3_DEFAULT_N, TABLE1_CANDIDATE_H, TABLE1_DEFAULT_N,
};
use multistrand::lattice::LatticeSpec;
use multistrand::validate::spectrum_checks;

fn main() -> multistrand::Result<()> {
    let cases = [
        ("two-strand", fig3(1.0, FIG3_DEFAULT_N)),
        ("five-strand", table1(TABLE1_CANDIDATE_H, TABLE1_DEFAULT_N)),
        (
            "single mass",
            LatticeSpec::uniform(1, 1, 1.0, 8, 1.0, 0.0, 1.0),
        ),
    ];
    for (name, spec) in cases {
        let r = spectrum_checks(&spec)?;
        println!("{name}: passes = {}", r.passes());
        println!(
            "    symmetry defect {:.1e}, max row sum {:.1e}",
            r.symmetry_defect, r.max_row_sum
        );
        println!(
            "    zero multiplicity {}, gap {:?}",
            r.zero_multiplicity, r.spectral_gap
        );
        println!(
            "    Rayleigh in [{:.4}, {:.4}], within spectrum: {}",
            r.rayleigh_min, r.rayleigh_max, r.rayleigh_within_spectrum
        );
    }
    Ok(())
}
