//! Command-line interface. Exit codes: 0 success, 1 a bound failed,
//! 2 usage, parse or configuration error.

mod manifest;
mod profile;
mod run;
mod state;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::harness::{parse_override, Catalog, CATALOG_ENV};
use crate::optics::field::{Plane, Projection};
use crate::polarization::{PolAxis, PolBasis};

pub use manifest::{sha256_hex, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BOUND_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pathmarker",
    version,
    about = "Two-slit experiments with polarization path markers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every scenario of a catalog and write summaries, profiles and a manifest.
    Run(RunArgs),
    /// Evolve the exact path-polarization state and print amplitudes and statistics.
    State(StateArgs),
    /// Write the intensity profile of one scenario at one plane as CSV.
    Profile(ProfileArgs),
}

#[derive(Debug, clap::Args)]
pub struct CatalogArgs {
    /// Scenario catalog (TOML). Defaults to the built-in catalog.
    #[arg(long, env = CATALOG_ENV)]
    pub catalog: Option<PathBuf>,
    /// Override a config field in every scenario, e.g. `--set grid_points=65536`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl CatalogArgs {
    pub fn load(&self) -> Result<(Catalog, String), Error> {
        let overrides = self
            .overrides
            .iter()
            .map(|o| parse_override(o))
            .collect::<Result<Vec<_>, _>>()?;
        match &self.catalog {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Config(format!("cannot read catalog {}: {e}", path.display()))
                })?;
                let catalog = Catalog::parse(&text, &overrides).map_err(|e| match e {
                    Error::Parse { .. } => Error::Config(format!("{}: {e}", path.display())),
                    other => other,
                })?;
                Ok((catalog, path.display().to_string()))
            }
            None => Ok((
                Catalog::parse(crate::harness::DEFAULT_CATALOG, &overrides)?,
                "builtin".to_string(),
            )),
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub catalog: CatalogArgs,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Seed for photon sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write profiles over the whole grid instead of the region of interest.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    /// Rewrite the path part in the (phi+, phi-) basis.
    PlusMinus,
    /// Rewrite the path part in the (psi_A, psi_B) basis.
    Slit,
    /// Apply the lens, mapping the slits onto the detectors.
    Lens,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Linear,
    Circular,
}

impl From<BasisArg> for PolBasis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Linear => PolBasis::Linear,
            BasisArg::Circular => PolBasis::Circular,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct StateArgs {
    /// Put the quarter-wave plates behind the slits.
    #[arg(long)]
    pub markers: bool,
    /// Stages applied in order; the lens may appear once and must come last.
    #[arg(long = "stage", value_enum)]
    pub stages: Vec<Stage>,
    /// Polarization basis for printing and statistics [default: circular
    /// with markers, linear without].
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    /// Finish with an ideal polarizer along this axis.
    #[arg(long, value_parser = parse_axis)]
    pub project: Option<PolAxis>,
}

fn parse_axis(s: &str) -> Result<PolAxis, String> {
    s.parse::<PolAxis>()
        .map_err(|_| format!("unknown axis `{s}` (expected H, V, L or R)"))
}

fn parse_plane(s: &str) -> Result<Plane, String> {
    match s.parse::<Plane>()? {
        Plane::Intermediate => Err("expected aperture, lens-entry or image".into()),
        p => Ok(p),
    }
}

#[derive(Debug, clap::Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub catalog: CatalogArgs,
    #[arg(long)]
    pub scenario: String,
    /// aperture, lens-entry or image.
    #[arg(long, value_parser = parse_plane)]
    pub plane: Plane,
    /// H, V, L, R or total.
    #[arg(long, value_parser = |s: &str| s.parse::<Projection>(), default_value = "total")]
    pub projection: Projection,
    /// Output file; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Whole grid instead of the region of interest.
    #[arg(long)]
    pub full: bool,
}

/// Parses `args` and runs the command. Returns the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Run(a) => run::cmd_run(&a),
        Command::State(a) => state::cmd_state(&a),
        Command::Profile(a) => profile::cmd_profile(&a),
    }
}
