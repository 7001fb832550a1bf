use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iori_core::config::PRESET_NAMES;
use iori_core::emit::{emit, emit_analysis};
use iori_core::ingest::ingest_prices;
use iori_core::run::AnalysisSettings;
use iori_core::{analyze_daily_closes, run, Error, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(
    name = "iori",
    version,
    about = "Trust-herding lattice market simulator and stylized-fact analyzer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a scenario and write its tables.
    Run(RunArgs),
    /// Run the statistics pipeline on a delimited close-price file.
    Analyze(AnalyzeArgs),
    /// List the built-in scenarios.
    Presets,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Built-in scenario name (see `iori presets`).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Scenario file in `key = value` form.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the number of decision rounds.
    #[arg(long)]
    rounds: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// File with a header row naming a close column (and usually a date column).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    fit_min: usize,
    #[arg(long, default_value_t = 100)]
    fit_max: usize,
    #[arg(long, default_value_t = 50)]
    bins: usize,
}

fn load_config(args: &RunArgs) -> Result<ScenarioConfig, Error> {
    let mut config = match (&args.preset, &args.config) {
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            ScenarioConfig::parse(&text)?
        }
        (Some(name), None) => ScenarioConfig::preset(name)?,
        (None, None) => ScenarioConfig::preset("A-small")?,
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(rounds) = args.rounds {
        config.rounds = rounds;
    }
    config.validate()?;
    Ok(config)
}

fn print_fit(stats: &iori_core::run::StatsReport) {
    match stats.gamma() {
        Some(fit) => println!(
            "gamma = {:.4} over lags {}..={} (residual {:.4}, R^2 {:.3}{})",
            fit.gamma,
            fit.fit_min,
            fit.fit_max,
            fit.residual,
            fit.r_squared,
            if fit.truncated { ", truncated" } else { "" }
        ),
        None => println!(
            "gamma: fit failed ({})",
            stats.fit_error.as_deref().unwrap_or("unknown")
        ),
    }
    if let Some(k) = stats.excess_kurtosis() {
        println!("excess kurtosis of daily returns = {k:.4}");
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => {
            let config = load_config(&args)?;
            let artifact = run(&config)?;
            let files = emit(&artifact, &args.out)?;
            println!(
                "{} rounds, {} daily returns, {} files in {}",
                artifact.records.len(),
                artifact.stats.daily_returns.len(),
                files.len(),
                args.out.display()
            );
            print_fit(&artifact.stats);
        }
        Command::Analyze(args) => {
            let series = ingest_prices(&args.input)?;
            for row in &series.rejected {
                eprintln!("line {}: rejected, {}", row.line, row.reason);
            }
            let settings = AnalysisSettings {
                fit_min: args.fit_min,
                fit_max: args.fit_max,
                histogram_bins: args.bins,
                resolution: 1,
            };
            let stats = analyze_daily_closes(&series.closes, settings)?;
            let files = emit_analysis(&stats, &args.out)?;
            println!(
                "{} closes, {} rejected rows, {} files in {}",
                series.closes.len(),
                series.rejected.len(),
                files.len(),
                args.out.display()
            );
            print_fit(&stats);
        }
        Command::Presets => {
            println!(
                "{:<16} {:>6} {:>7} {:>4} {:>4} {:>3} {:>3} {:>5}",
                "name", "n", "L", "tau", "K", "k", "rho", "pi"
            );
            for name in PRESET_NAMES {
                let c = ScenarioConfig::preset(name)?;
                println!(
                    "{:<16} {:>6} {:>7} {:>4} {:>4} {:>3} {:>3} {:>5}",
                    name,
                    c.agents,
                    c.rounds,
                    c.memory,
                    c.base_period,
                    c.jitter_max,
                    c.window,
                    c.fundamental_probability
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
