use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::error::ErrorKind;
use clap::Parser;

use spherelab_cli::commands::{self, COMMANDS};
use spherelab_cli::config::{ConfigInput, Format};
use spherelab_cli::report::write_atomic;
use spherelab_cli::{exit, Result};

/// Geometry experiments in the round 3-sphere.
///
/// Reports are JSON (or CSV) on stdout unless `--out` is given. Exit status
/// is 0 on success, 2 if an assertion failed and 1 on invalid input.
#[derive(Debug, Parser)]
#[command(name = "spherelab", version, allow_negative_numbers = true)]
struct Cli {
    #[arg(value_parser = PossibleValuesParser::new(COMMANDS))]
    command: String,

    /// Flat TOML file with any of the keys below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    /// Curve samples, reach lattice or band lattice, depending on the command.
    #[arg(long)]
    resolution: Option<usize>,
    /// Quadrature grid per side.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    /// Level of the band level set probed by band-width.
    #[arg(long)]
    level: Option<f64>,
    /// `family[:p1,p2,...]` or `grid:PATH`.
    #[arg(long)]
    surface: Option<String>,
    #[arg(long)]
    pair: Option<String>,
    /// Point set for convexity-check.
    #[arg(long)]
    set: Option<String>,
    /// Starting loops for gehring-search.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n_t: Option<usize>,
    #[arg(long)]
    n_pairs: Option<usize>,
    /// CSV file for the gehring-search trajectory.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    /// Read `--radius` and `--level` in degrees.
    #[arg(long)]
    degrees: bool,
}

impl Cli {
    fn overrides(&self) -> ConfigInput {
        ConfigInput {
            surface: self.surface.clone(),
            pair: self.pair.clone(),
            set: self.set.clone(),
            family: self.family.clone(),
            radius: self.radius,
            level: self.level,
            resolution: self.resolution,
            grid: self.grid,
            n_t: self.n_t,
            n_pairs: self.n_pairs,
            seed: self.seed,
            format: self.format,
            out: self.out.clone(),
            trajectory: self.trajectory.clone(),
            degrees: self.degrees.then_some(true),
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let file = match &cli.config {
        Some(path) => ConfigInput::load(path)?,
        None => ConfigInput::default(),
    };
    let cfg = file.merge(cli.overrides()).resolve()?;
    let report = commands::run(&cli.command, &cfg)?;
    let text = report.render(cfg.format)?;
    match &cfg.out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    ExitCode::from(exit::SUCCESS as u8)
                }
                _ => ExitCode::from(exit::INPUT_ERROR as u8),
            };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::from(exit::SUCCESS as u8),
        Ok(false) => ExitCode::from(exit::ASSERTION_FAILED as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::INPUT_ERROR as u8)
        }
    }
}
