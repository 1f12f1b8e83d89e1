use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use peano_lab::{run, ConfigError, Experiment, ExperimentConfig, LabError, Outcome};

#[derive(Parser)]
#[command(name = "peano-lab", version, about = "Zero-noise limit experiments for SDEs with non-Lipschitz drift")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Terminal laws of the perturbed equation against the zero-noise reference.
    Convergence(Common),
    /// Time-space self-similarity of the model equation.
    Scaling(Common),
    /// Long-horizon growth, limit angle and the bounded counterexample.
    LargeTime(Common),
    /// Exit-angle law of the model equation at radius R.
    ExitDist(Common),
    /// Modulus-of-continuity diagnostic over the eps ensemble.
    Modulus(Common),
    /// Characteristic-function check of the stable increment sampler.
    NoiseSelftest(Common),
}

#[derive(Args)]
struct Common {
    /// Flat TOML file overriding the experiment defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn split(cmd: Command) -> (Experiment, Common) {
    match cmd {
        Command::Convergence(c) => (Experiment::Convergence, c),
        Command::Scaling(c) => (Experiment::Scaling, c),
        Command::LargeTime(c) => (Experiment::LargeTime, c),
        Command::ExitDist(c) => (Experiment::ExitDist, c),
        Command::Modulus(c) => (Experiment::Modulus, c),
        Command::NoiseSelftest(c) => (Experiment::NoiseSelftest, c),
    }
}

fn configure(experiment: Experiment, args: &Common) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(experiment, path)?,
        None => ExperimentConfig::defaults(experiment),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_outputs(dir: &Path, outcome: &Outcome) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), outcome.report.to_json())?;
    for a in &outcome.artifacts {
        std::fs::write(dir.join(&a.file), &a.contents)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = split(cli.command);
    let cfg = match configure(experiment, &args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match pool.install(|| run(&cfg)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(LabError::exit_code(&e) as u8);
        }
    };
    if let Err(e) = write_outputs(&cfg.output_dir, &outcome) {
        eprintln!("error: cannot write to {}: {e}", cfg.output_dir.display());
        return ExitCode::from(1);
    }
    for m in &outcome.report.metrics {
        let verdict = match m.passed {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "info",
        };
        println!("{verdict:>4}  {} = {}", m.name, m.value);
    }
    println!(
        "{}: {} ({})",
        experiment.name(),
        if outcome.report.passed { "PASS" } else { "FAIL" },
        cfg.output_dir.join("report.json").display()
    );
    if outcome.report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
