use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use condcodes::concat::ConcatDescriptor;
use condcodes::harness::suite::{run_suite, SuiteOptions};
use condcodes::harness::{run, ExperimentConfig, ExperimentKind};
use condcodes::{Channel, EnsembleKind, LinearCondenser};

#[derive(Parser)]
#[command(name = "condcodes", version, about = "Code ensembles from linear condensers: experiments and claim checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closeness of a condenser's output on a panel of flat sources.
    Verify(RunArgs),
    /// Erasure tolerance census of a code ensemble.
    Census(RunArgs),
    /// Tuned brute-force decoding over a BSC weight window.
    Simulate(RunArgs),
    /// Monte-Carlo block error of a concatenated code.
    Concat(RunArgs),
    /// Random instances of the extractor/condenser duality.
    Duality(RunArgs),
    /// Run the claim battery and print one verdict per claim.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config; a built-in default is used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// CSV output path (stdout when neither this nor the config sets one).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Claim name (e.g. lemma11) or criterion number.
    #[arg(long)]
    filter: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable rank repair so the ensemble invariant check must fail.
    #[arg(long)]
    sabotage: bool,
}

fn default_config(kind: ExperimentKind) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(kind);
    match kind {
        ExperimentKind::VerifyCondenser => {
            cfg.condenser = Some(LinearCondenser::linear_hash_family(8, 6)?.to_descriptor());
            cfg.entropy = Some(4);
            cfg.sources = Some(20);
        }
        ExperimentKind::ErasureCensus => {
            cfg.condenser = Some(LinearCondenser::linear_hash_family(10, 4)?.to_descriptor());
            cfg.ensemble = Some(EnsembleKind::G);
            cfg.entropy = Some(4);
            cfg.channel = Some(Channel::bec(0.35)?.to_json());
        }
        ExperimentKind::BscCensus => {
            cfg.condenser = Some(LinearCondenser::linear_hash_family(10, 6)?.to_descriptor());
            cfg.channel = Some(Channel::bsc(0.1)?.to_json());
            cfg.eta = Some(0.1);
        }
        ExperimentKind::ConcatSim => {
            cfg.code = Some(ConcatDescriptor {
                condenser: LinearCondenser::linear_hash_family(10, 6)?.to_descriptor(),
                ensemble: EnsembleKind::G,
                k: 6,
                s: 32,
                k_prime: 24,
            });
            cfg.channel = Some(Channel::bec(0.2)?.to_json());
            cfg.trials = 1000;
        }
        ExperimentKind::DualityScan => cfg.trials = 1000,
    }
    Ok(cfg)
}

fn run_experiment(kind: ExperimentKind, args: RunArgs) -> Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => default_config(kind)?,
    };
    if cfg.experiment != kind {
        bail!("config is for {}, not {}", cfg.experiment.as_str(), kind.as_str());
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if args.out.is_some() {
        cfg.out = args.out;
    }
    let record = run(&cfg)?;
    if cfg.out.is_none() {
        let mut stdout = std::io::stdout().lock();
        record.write_csv(&mut stdout)?;
        stdout.flush()?;
    }
    eprintln!(
        "{}: {} rows, config sha256 {}, {:.2}s",
        record.experiment,
        record.rows.len(),
        record.config_digest,
        record.wall_clock.as_secs_f64()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_claims(args: SuiteArgs) -> Result<ExitCode> {
    let opts = SuiteOptions { filter: args.filter, sabotage: args.sabotage, seed: args.seed };
    let reports = run_suite(&opts)?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    for rep in &reports {
        println!("{rep}");
    }
    println!("{} of {} claims passed", reports.len() - failed, reports.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => run_experiment(ExperimentKind::VerifyCondenser, a),
        Command::Census(a) => run_experiment(ExperimentKind::ErasureCensus, a),
        Command::Simulate(a) => run_experiment(ExperimentKind::BscCensus, a),
        Command::Concat(a) => run_experiment(ExperimentKind::ConcatSim, a),
        Command::Duality(a) => run_experiment(ExperimentKind::DualityScan, a),
        Command::Suite(a) => run_claims(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(2)
    })
}
