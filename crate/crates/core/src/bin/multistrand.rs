use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use multistrand::cli::commands::{self, default_wavenumbers};
use multistrand::cli::config::{parse_config_with, preset_config, Format, Overrides, RunConfig};
use multistrand::cli::presets::PRESETS;
use multistrand::Error;

#[derive(Parser)]
#[command(
    name = "multistrand",
    version,
    about = "Homogenised models and boundary conditions for multi-strand lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Slow manifold: effective coefficient c and the alpha, beta shape vectors.
    Homogenize(Common),
    /// Macroscale boundary conditions at both ends.
    DeriveBc(Common),
    /// Slowest microscale mode against the Robin and Dirichlet macroscale modes.
    Validate(Common),
    /// Bloch dispersion branches at chosen wavenumbers.
    Dispersion {
        #[command(flatten)]
        common: Common,
        /// Comma-separated wavenumbers (default: 17 points up to pi/(p h)).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        k: Vec<f64>,
    },
    /// Symmetry, row-sum, definiteness and Rayleigh checks on the cell operator.
    Spectrum(Common),
}

#[derive(Args)]
struct Common {
    /// JSON lattice configuration.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Builtin lattice.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    preset: Option<String>,
    #[arg(long)]
    h: Option<f64>,
    /// Number of lattice intervals.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Tolerance override NAME=VALUE (residual, max_iter, centre, null).
    #[arg(long = "tol")]
    tol: Vec<String>,
}

impl Common {
    fn resolve(&self) -> multistrand::Result<RunConfig> {
        let o = Overrides {
            h: self.h,
            n_intervals: self.n,
            output_dir: self.out.clone(),
            format: self.format,
            tolerances: self.tol.clone(),
        };
        match (&self.config, &self.preset) {
            (Some(path), _) => parse_config_with(path, &o),
            (None, Some(name)) => preset_config(name, &o),
            (None, None) => unreachable!("clap requires one of --config, --preset"),
        }
    }
}

fn run(cli: Cli) -> multistrand::Result<String> {
    let (common, k) = match &cli.command {
        Command::Homogenize(c)
        | Command::DeriveBc(c)
        | Command::Validate(c)
        | Command::Spectrum(c) => (c, None),
        Command::Dispersion { common, k } => (common, Some(k)),
    };
    let cfg = common.resolve()?;
    let out = match &cli.command {
        Command::Homogenize(_) => commands::cmd_homogenize(&cfg)?,
        Command::DeriveBc(_) => commands::cmd_derive_bc(&cfg)?,
        Command::Validate(_) => commands::cmd_validate(&cfg)?,
        Command::Spectrum(_) => commands::cmd_spectrum(&cfg)?,
        Command::Dispersion { .. } => {
            let ks = match k {
                Some(k) if !k.is_empty() => k.clone(),
                _ => default_wavenumbers(&cfg.spec),
            };
            commands::cmd_dispersion(&cfg, &ks)?
        }
    };
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    commands::emit(&cfg, &out)
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ERROR code={} msg={}", e.code(), one_line(&e.to_string()));
            ExitCode::from(match e {
                Error::Parse { .. } | Error::InvalidSpec(_) => 2,
                _ => 1,
            })
        }
    }
}
