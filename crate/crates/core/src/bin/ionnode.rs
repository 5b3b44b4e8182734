use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ionnode::cli::{load_config, run_experiment, Experiment, RunConfig, EXIT_ERROR};

#[derive(Parser)]
#[command(name = "ionnode", version, about = "Simulated experiments on a dual-type trapped-ion network node")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON run configuration; defaults apply to every missing key.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials (successful trials per setting for heralded experiments).
    #[arg(long)]
    trials: Option<u64>,
    /// Shots per setting.
    #[arg(long)]
    shots: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Ion-photon correlators and entanglement fidelity.
    IonPhoton(RunArgs),
    /// Two-ion Bell state: populations and parity scan.
    Bell(RunArgs),
    /// Memory storage of the six MUB states.
    Storage(RunArgs),
    /// Memory-to-photon teleportation with state and process tomography.
    Teleport(RunArgs),
    /// Ion-ion-photon GHZ state.
    Ghz(RunArgs),
    /// Sideband thermometry against the number of attempts.
    Heating(RunArgs),
    /// Ramsey decay of the stored memory qubit.
    Ramsey(RunArgs),
    /// Fidelity against the number of conversion round trips.
    Conversion(RunArgs),
    /// Heralding Monte Carlo: success fraction and herald times.
    Herald(RunArgs),
    /// Waveplate settings of the photon analyzer.
    CheckWaveplates(RunArgs),
}

impl Command {
    fn split(self) -> (Experiment, RunArgs) {
        match self {
            Command::IonPhoton(a) => (Experiment::IonPhoton, a),
            Command::Bell(a) => (Experiment::Bell, a),
            Command::Storage(a) => (Experiment::Storage, a),
            Command::Teleport(a) => (Experiment::Teleport, a),
            Command::Ghz(a) => (Experiment::Ghz, a),
            Command::Heating(a) => (Experiment::Heating, a),
            Command::Ramsey(a) => (Experiment::Ramsey, a),
            Command::Conversion(a) => (Experiment::Conversion, a),
            Command::Herald(a) => (Experiment::Herald, a),
            Command::CheckWaveplates(a) => (Experiment::CheckWaveplates, a),
        }
    }
}

fn run(e: Experiment, args: RunArgs) -> ionnode::Result<i32> {
    let mut config = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if args.trials.is_some() {
        config.trials = args.trials;
    }
    if args.shots.is_some() {
        config.shots = args.shots;
    }
    if args.out.is_some() {
        config.output_dir = args.out;
    }
    config.experiment = Some(e);
    let report = run_experiment(e, &config)?;
    let dir = config.output_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(e.name()));
    report.write(&dir, &config)?;
    for c in &report.checks {
        println!("  {c}");
    }
    println!("{}", report.verdict_line());
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (e, args) = cli.command.split();
    let code = match run(e, args) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let mut src = std::error::Error::source(&err);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            EXIT_ERROR
        }
    };
    ExitCode::from(code as u8)
}
