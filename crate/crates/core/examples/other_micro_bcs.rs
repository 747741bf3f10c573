//! Flux, Robin-like, Cauchy-like and mixed microscale conditions, each
//! reduced to a macroscale condition at both ends where it applies.

use multistrand::boundary::{apply_weights, boundary_data, derive_boundary};
use multistrand::cli::presets::{fig3, FIG3_DEFAULT_N};
use multistrand::lattice::{MicroBc, MicroBcSpec, Side};

fn main() -> multistrand::Result<()> {
    let spec = fig3(1.0, FIG3_DEFAULT_N);
    let cases = [
        MicroBc::Flux { d: vec![0.3, -0.1] },
        MicroBc::RobinLike {
            d: vec![0.5, 0.2],
            b: vec![1.0, 2.0],
        },
        MicroBc::CauchyLike { b00: 1.0, b10: 1.5 },
        MicroBc::Mixed {
            b: vec![1.0, 0.5, 2.0],
        },
    ];
    for kind in cases {
        let left = derive_boundary(&spec, &MicroBcSpec::new(kind.clone(), Side::Left))?;
        println!("{} (left): {:?}", kind.name(), left.condition);
        println!(
            "    data {:?} = {:?}",
            left.data_labels,
            boundary_data(&kind)
        );
        if let Some((a, b)) = left.homogeneous() {
            println!("    homogeneous part {a:.6} U + {b:.6} dU/dx");
        }
        if let multistrand::boundary::MacroCondition::Robin { weights, .. } = &left.condition {
            println!(
                "    right-hand side {:.6}",
                apply_weights(weights, &boundary_data(&kind))
            );
        }
    }
    // at the right end the mixed condition only pins one mass
    let right = derive_boundary(&spec, &MicroBcSpec::right(MicroBc::Mixed { b: vec![0.0] }))?;
    println!("mixed (right): {:?}", right.condition);
    Ok(())
}
