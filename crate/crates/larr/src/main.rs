use clap::{Args, Parser, Subcommand};
use larr::cli::{self, CliError, JobConfig, RunKind};
use std::path::PathBuf;
use std::process::ExitCode;

/// Laser-assisted radiative recombination spectra with leading-order
/// nondipole corrections.
#[derive(Parser)]
#[command(name = "larr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Job configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Worker-pool size; overrides the config (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Photon-energy spectrum over a grid.
    Spectrum(RunArgs),
    /// Spectra swept over the electron polar angle.
    AngularMap(RunArgs),
    /// Time-frequency spectrogram of the spectrum near the emission line.
    Spectrogram(RunArgs),
    /// Instantaneous emission-energy curves and their cutoff.
    Saddle(RunArgs),
    /// Newton-Lorentz trajectories against the analytic 1/c correction.
    ClassicalCheck(RunArgs),
    /// Field and vector-potential samples of the configured pulse.
    PulsePreview(RunArgs),
    /// Closed-form kernels against quadrature and finite-difference oracles.
    ValidateKernels(RunArgs),
}

impl Command {
    fn kind(&self) -> RunKind {
        match self {
            Command::Spectrum(_) => RunKind::Spectrum,
            Command::AngularMap(_) => RunKind::AngularMap,
            Command::Spectrogram(_) => RunKind::Spectrogram,
            Command::Saddle(_) => RunKind::Saddle,
            Command::ClassicalCheck(_) => RunKind::ClassicalCheck,
            Command::PulsePreview(_) => RunKind::PulsePreview,
            Command::ValidateKernels(_) => RunKind::ValidateKernels,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Spectrum(a)
            | Command::AngularMap(a)
            | Command::Spectrogram(a)
            | Command::Saddle(a)
            | Command::ClassicalCheck(a)
            | Command::PulsePreview(a)
            | Command::ValidateKernels(a) => a,
        }
    }
}

fn execute(command: &Command) -> Result<(), CliError> {
    let args = command.args();
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.config.display())))?;
    let job = JobConfig::from_json(&text)?;
    if job.run != command.kind() {
        return Err(CliError::Config(format!(
            "config requests run kind '{}' but the subcommand is '{}'",
            job.run.name(),
            command.kind().name()
        )));
    }
    cli::run(&job, &args.out, args.workers)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("larr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
