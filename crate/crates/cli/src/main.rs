use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use photon_cli::demo::DEFAULT_SCENARIO;
use photon_cli::{parse_scenario, run, CliError, ConfigError, Kind};
use photon_core::media::Convention;

#[derive(Parser)]
#[command(name = "photon", version, about = "Photon wave equation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Refractive index, potential and wavenumber of a Lorentz medium.
    Dispersion(Common),
    /// Time evolution of a wave packet.
    Evolve(Common),
    /// Photonic band structure along a wavevector path.
    Bands(Common),
    /// Double-slit interference (built-in scenario unless one is given).
    Demo(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output directory (overrides the scenario's `output`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_convention)]
    convention: Option<Convention>,
    #[arg(long)]
    quiet: bool,
}

fn parse_convention(s: &str) -> Result<Convention, String> {
    s.parse().map_err(|e: photon_core::Error| e.to_string())
}

fn execute(expected: Kind, args: &Common) -> Result<(), CliError> {
    let text = match &args.scenario {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| ConfigError::new(None, None, format!("cannot read {}: {e}", path.display())))?,
        None if expected == Kind::DemoDoubleSlit => DEFAULT_SCENARIO.to_owned(),
        None => return Err(ConfigError::new(None, None, "--scenario is required").into()),
    };
    let mut scenario = parse_scenario(&text)?;
    if scenario.kind() != expected {
        return Err(ConfigError::new(
            None,
            Some("kind"),
            format!("'{}' scenarios run with `photon {}`", scenario.kind().name(), scenario.kind().subcommand()),
        )
        .into());
    }
    if args.convention.is_some() {
        scenario.convention = args.convention;
    }
    let out = args.out.clone().or_else(|| scenario.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let report = run(&scenario, &out)?;
    if !args.quiet {
        for line in &report.summary {
            println!("{line}");
        }
        for f in &report.files {
            println!("wrote {}", f.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Dispersion(a) => (Kind::Dispersion, a),
        Command::Evolve(a) => (Kind::Evolve, a),
        Command::Bands(a) => (Kind::Bands, a),
        Command::Demo(a) => (Kind::DemoDoubleSlit, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
