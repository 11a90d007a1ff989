//! The `offaxis` command-line front end.
//!
//! Exit codes: 0 success, 1 strategy comparison failed, 2 configuration or
//! validation error, 3 I/O error.

mod commands;
mod config;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::{
    cmd_compare, cmd_derive, cmd_render, compare_eye, corrupt_view, output_paths,
    pinhole_differences, EyeComparison, COMPARE_ANGLE_TOL, COMPARE_DISTANCE_TOL,
};
pub use config::{
    parse_config, parse_config_with, ConfigError, Overrides, RunConfig, SceneSelector,
    StrategySelection, DEFAULT_IPD, DEFAULT_OUTPUT, DEFAULT_SIZE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPARE_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Geometry(#[from] crate::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("writing report: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Geometry(_) => EXIT_CONFIG,
            CliError::Io { .. } | CliError::Output(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "offaxis",
    version,
    about = "Off-axis stereo cameras for ray tracing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a stereo pair to PPM files.
    Render(CommonArgs),
    /// Check that the three ray generation strategies agree.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Perturb the view matrix fed to strategies 1 and 3 (negative control).
        #[arg(long, hide = true)]
        corrupt_view: bool,
    },
    /// Print matrices, pinhole parameters and their reconstruction.
    Derive(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Configuration file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Ray generation strategy: 1, 2, 3 or all.
    #[arg(long)]
    pub strategy: Option<StrategySelection>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    /// Output path prefix.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Built-in scene: default or empty.
    #[arg(long)]
    pub scene: Option<SceneSelector>,
}

impl CommonArgs {
    pub fn load(&self) -> Result<RunConfig, CliError> {
        let text = fs::read_to_string(&self.config).map_err(|source| CliError::Io {
            path: self.config.clone(),
            source,
        })?;
        let overrides = Overrides {
            strategy: self.strategy,
            width: self.width,
            height: self.height,
            output_prefix: self.out.clone(),
            scene: self.scene,
        };
        let config = parse_config_with(&text, &overrides).map_err(|e| match e {
            ConfigError::Parse(msg) => {
                ConfigError::Parse(format!("{}: {msg}", self.config.display()))
            }
            other => other,
        })?;
        Ok(config)
    }
}

/// Runs a parsed command line, writing reports to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Render(args) => args
            .load()
            .and_then(|c| cmd_render(&c, out))
            .map(|_| EXIT_OK),
        Command::Compare {
            common,
            corrupt_view,
        } => common
            .load()
            .and_then(|c| cmd_compare(&c, *corrupt_view, out))
            .map(|pass| if pass { EXIT_OK } else { EXIT_COMPARE_FAILED }),
        Command::Derive(args) => args
            .load()
            .and_then(|c| cmd_derive(&c, out))
            .map(|_| EXIT_OK),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
