//! Building a run from JSON text, as the command line does, and rendering its
//! report and tables without touching the file system.

use multistrand::cli::config::parse_config_str;
use multistrand::cli::{cmd_derive_bc, cmd_homogenize, Overrides};

const CONFIG: &str = r#"{
  "preset": "paper-2x2-fig3",
  "N": 16,
  "micro_bc_left": { "side": "left", "kind": "dirichlet", "b": [0.0, 0.0] },
  "output_dir": "out/example",
  "format": "json",
  "tolerances": { "residual": 1e-12 }
}"#;

fn main() -> multistrand::Result<()> {
    let cfg = parse_config_str(CONFIG, "inline", &Overrides::default())?;
    println!("resolved configuration:\n{}", cfg.to_json());

    let out = cmd_homogenize(&cfg)?;
    println!(
        "homogenize report:\n{}",
        multistrand::cli::output::json_string(&out.report)
    );
    let out = cmd_derive_bc(&cfg)?;
    for (name, table) in &out.tables {
        println!("{name}:\n{}", table.to_csv()?);
    }
    Ok(())
}
