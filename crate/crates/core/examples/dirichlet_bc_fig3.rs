//! Macroscale boundary conditions for clamped ends of the two-strand lattice,
//! from the null space of the constraint system and from the closed forms.

use multistrand::boundary::{
    assemble_constraints, closed_form_bc, derive_boundary, left_null_space, NULL_TOL,
};
use multistrand::cellmap::build_cell_map;
use multistrand::cli::presets::{fig3, FIG3_DEFAULT_N};
use multistrand::lattice::{MicroBc, MicroBcSpec};

fn main() -> multistrand::Result<()> {
    let spec = fig3(1.0, FIG3_DEFAULT_N);
    let cm = build_cell_map(&spec)?;
    let left = MicroBcSpec::left(MicroBc::dirichlet_zero(2));

    let cs = assemble_constraints(&cm, &left, &spec)?;
    println!(
        "constraint matrix ({} x {}), rows {:?}:",
        cs.matrix.nrows(),
        cs.matrix.ncols(),
        cs.rhs_labels
    );
    println!("{:.6}", cs.matrix);
    println!(
        "left null space dimension: {}",
        left_null_space(&cs.matrix, NULL_TOL)?.len()
    );

    let numeric = derive_boundary(&spec, &left)?;
    let closed = closed_form_bc(&spec, &cm, &left)?;
    println!("left  (null space): {:?}", numeric.condition);
    println!("left  (closed form): {:?}", closed.condition);

    let right = derive_boundary(&spec, &MicroBcSpec::right(MicroBc::dirichlet_zero(2)))?;
    println!("right (null space): {:?}", right.condition);
    println!(
        "d0 = {:.6}, dL = {:.6}",
        numeric.d().unwrap(),
        right.d().unwrap()
    );
    Ok(())
}
