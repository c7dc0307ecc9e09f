//! `hardy-spec` command line front end.
//!
//! Exit codes: 0 pass, 1 check failed, 2 configuration or usage error,
//! 3 the series could not be certified.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;
mod svg;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use config::{ConfigError, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hardy-spec",
    version,
    about = "Quasi-parabolic composition operators on the bidisc: build, predict, verify"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster sets, predicted spiral set and sample spirals.
    Predict(RunArgs),
    /// Certified series operator, its dump and the cross-check.
    Build(RunArgs),
    /// Eigenvalues and pseudospectrum of the built operator.
    Spectrum(RunArgs),
    /// Containment of the predicted set in the essential-spectrum surrogate.
    Verify(RunArgs),
    /// Run the bundled configurations and compare with their expected outcomes.
    Demo(Overrides),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file, or `builtin:NAME` for a bundled one.
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Clone)]
struct Overrides {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Surrogate sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Pseudospectrum levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    no_crosscheck: bool,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(spectra) = cfg.spectra.as_mut() {
            if let Some(sizes) = &self.sizes {
                spectra.sizes = sizes.clone();
            }
            if let Some(eps) = &self.eps {
                spectra.eps = eps.clone();
            }
        }
        if self.no_crosscheck {
            cfg.crosscheck.enabled = false;
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("HARDY_SPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = match v.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(ConfigError(format!("HARDY_SPEC_THREADS must be a positive integer (got '{v}')")).into()),
    };
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(format!("cannot size the thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<hardy_spec::Error>() {
        Some(hardy_spec::Error::Certification(_) | hardy_spec::Error::Divergence(_)) => 3,
        Some(hardy_spec::Error::Linalg(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn execute(cli: Cli) -> Result<bool> {
    init_threads()?;
    let (args, f): (RunArgs, fn(&run::Ctx) -> Result<bool>) = match cli.command {
        Command::Demo(o) => return run::demo(&o.out, &|cfg| o.apply(cfg)),
        Command::Predict(a) => (a, run::predict),
        Command::Build(a) => (a, run::build),
        Command::Spectrum(a) => (a, run::spectrum),
        Command::Verify(a) => (a, run::verify),
    };
    let mut cfg = RunConfig::load(&args.config)?;
    args.overrides.apply(&mut cfg);
    cfg.validate()?;
    let ctx = run::Ctx::new(cfg, args.overrides.out.clone())?;
    f(&ctx)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
