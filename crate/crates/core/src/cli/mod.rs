//! Command-line front end: configs, presets, subcommands and output files.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

pub use commands::{
    cmd_derive_bc, cmd_dispersion, cmd_homogenize, cmd_spectrum, cmd_validate, emit, Output,
};
pub use config::{parse_config, Format, Overrides, RunConfig, Tolerances};
