//! Argument parsing and dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use equidist_core::fixtures::{self, FixtureKind};

use crate::commands::{self, VerifyPlan};
use crate::config::{parse_formats, parse_lambdas, parse_tolerances, Command, RunConfig};
use crate::curve_file::read_curve;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "equidist", version, about = "Affine equidistants, Wigner caustics and Centre Symmetry Sets of closed planar curves")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Comma-separated list of λ values.
    #[arg(long, global = true, env = "EQUIDIST_LAMBDA", allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Samples per period; a power of two in [256, 65536].
    #[arg(long, global = true, env = "EQUIDIST_SAMPLES", default_value_t = 4096)]
    pub samples: usize,
    /// Output directory.
    #[arg(long, global = true, env = "EQUIDIST_OUT", default_value = "out")]
    pub out: PathBuf,
    /// Comma-separated output formats out of svg, csv, json.
    #[arg(long, global = true, env = "EQUIDIST_FORMAT", default_value = "svg,csv,json")]
    pub format: String,
    /// Seed of the random curves.
    #[arg(long, global = true, env = "EQUIDIST_SEED", default_value_t = 7)]
    pub seed: u64,
    /// Tolerance override `key=value`; repeatable or comma-separated.
    #[arg(long, global = true, env = "EQUIDIST_TOL", value_delimiter = ',')]
    pub tol: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Trace every branch of E_λ for each λ.
    Compute { input: PathBuf },
    /// Print the maximal glueing schemes and what they predict.
    Branches { input: PathBuf },
    /// Check the global theorems on fixtures, random curves or a file.
    Verify {
        /// Only `all` is accepted.
        #[arg(long, value_parser = ["all"])]
        fixtures: Option<String>,
        /// A built-in fixture by name; repeatable.
        #[arg(long)]
        fixture: Vec<String>,
        /// Number of random generic curves.
        #[arg(long)]
        random: Option<usize>,
        input: Option<PathBuf>,
    },
    /// Trace the Centre Symmetry Set.
    Css { input: PathBuf },
    /// List the built-in fixtures; with --out, write them as curve files.
    Fixtures {
        #[arg(long)]
        write: bool,
    },
}

impl Cli {
    pub fn config(&self) -> Result<RunConfig, CliError> {
        let c = &self.common;
        let (command, input) = match &self.command {
            Cmd::Compute { input } => (Command::Compute, Some(input.clone())),
            Cmd::Branches { input } => (Command::Branches, Some(input.clone())),
            Cmd::Verify { input, .. } => (Command::Verify, input.clone()),
            Cmd::Css { input } => (Command::Css, Some(input.clone())),
            Cmd::Fixtures { .. } => (Command::Fixtures, None),
        };
        Ok(RunConfig {
            command,
            input,
            lambdas: c.lambda.as_deref().map(parse_lambdas).transpose()?.unwrap_or_default(),
            samples: c.samples,
            out: c.out.clone(),
            formats: parse_formats(&c.format)?,
            seed: c.seed,
            tol: parse_tolerances(&c.tol.join(","))?,
        })
    }
}

fn kind_name(k: FixtureKind) -> String {
    match k {
        FixtureKind::Analytic => "analytic".into(),
        FixtureKind::Convex => "convex".into(),
        FixtureKind::Rosette(n) => format!("rosette, rotation {n}"),
        FixtureKind::TwoInflexion(n) => format!("two inflexions, rotation {n}"),
        FixtureKind::Inflected => "inflected".into(),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

/// Runs a parsed command line, writing the human summary to `stdout`.
pub fn run(cli: &Cli, stdout: &mut impl Write) -> Result<(), CliError> {
    let config = cli.config()?;
    let curve = || read_curve(config.input.as_deref().expect("command takes an input file"));
    match &cli.command {
        Cmd::Compute { .. } => {
            let s = commands::compute(&config, curve()?)?;
            write!(stdout, "{}", s.human()).map_err(io)
        }
        Cmd::Branches { .. } => {
            let s = commands::branches(&config, curve()?)?;
            write!(stdout, "{s}").map_err(io)
        }
        Cmd::Css { .. } => {
            let s = commands::css(&config, curve()?)?;
            write!(stdout, "{}", s.human()).map_err(io)
        }
        Cmd::Verify { fixtures: all, fixture, random, input } => {
            let mut plan = VerifyPlan { random: *random, ..VerifyPlan::default() };
            if all.is_some() {
                plan.fixtures = fixtures::all();
            }
            for name in fixture {
                let f = fixtures::by_name(name).ok_or_else(|| CliError::Invalid(format!("unknown fixture `{name}`")))?;
                if !plan.fixtures.iter().any(|g| g.name == f.name) {
                    plan.fixtures.push(f);
                }
            }
            if let Some(p) = input {
                plan.curve = Some(read_curve(p)?);
            }
            if plan.fixtures.is_empty() && plan.curve.is_none() && plan.random.is_none() {
                return Err(CliError::Invalid("nothing to verify: give --fixtures all, --fixture, --random or a file".into()));
            }
            let report = commands::verify(&config, plan)?;
            writeln!(stdout, "{report}").map_err(io)?;
            match report.failures().count() {
                0 => Ok(()),
                n => Err(CliError::Verification(n)),
            }
        }
        Cmd::Fixtures { write } => {
            for f in fixtures::all() {
                writeln!(stdout, "{:<18} {}", f.name, kind_name(f.kind)).map_err(io)?;
            }
            if *write {
                let files = commands::write_fixtures(&config)?;
                writeln!(stdout, "wrote {} curve files to {}", files.len(), config.out.display()).map_err(io)?;
            }
            Ok(())
        }
    }
}
