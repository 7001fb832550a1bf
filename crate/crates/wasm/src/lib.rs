//! Browser bindings. Every export takes plain text and returns a JSON string;
//! the page in `www/` draws the result on a canvas.

use iori_core::ingest::parse_prices;
use iori_core::run::{analyze_daily_closes, AnalysisSettings, StatsReport};
use iori_core::{Error, ScenarioConfig, Simulation};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Longest series sent back for plotting.
const MAX_POINTS: usize = 2000;
/// Upper bound on rounds so a tab never hangs for minutes.
const MAX_ROUNDS: u64 = 200_000;

#[derive(Debug, Serialize)]
struct StatsView {
    observations: usize,
    returns: Vec<f64>,
    return_acf: Vec<f64>,
    abs_acf: Vec<f64>,
    gamma: Option<f64>,
    r_squared: Option<f64>,
    fit_error: Option<String>,
    excess_kurtosis: Option<f64>,
    bin_edges: Vec<f64>,
    counts: Vec<u64>,
}

impl From<&StatsReport> for StatsView {
    fn from(stats: &StatsReport) -> Self {
        Self {
            observations: stats.daily_returns.values.len(),
            returns: thin(&stats.daily_returns.values),
            return_acf: stats.return_acf.values.clone(),
            abs_acf: stats.abs_acf.values.clone(),
            gamma: stats.gamma().map(|f| f.gamma),
            r_squared: stats.gamma().map(|f| f.r_squared),
            fit_error: stats.fit_error.clone(),
            excess_kurtosis: stats.excess_kurtosis(),
            bin_edges: stats.histogram.bin_edges.clone(),
            counts: stats.histogram.counts.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct SimulationView {
    rounds: u64,
    prices: Vec<f64>,
    fundamental: Vec<f64>,
    degenerate_rounds: u64,
    stats: StatsView,
}

#[derive(Debug, Serialize)]
struct LatticeView {
    side: usize,
    round: u64,
    price: f64,
    spins: Vec<i8>,
}

/// Every k-th point so that at most `MAX_POINTS` remain; the last point is kept.
fn thin(values: &[f64]) -> Vec<f64> {
    let step = values.len().div_ceil(MAX_POINTS).max(1);
    let mut out: Vec<f64> = values.iter().step_by(step).copied().collect();
    if let Some(&last) = values.last() {
        if !(values.len() - 1).is_multiple_of(step) {
            out.push(last);
        }
    }
    out
}

fn checked_config(config_text: &str) -> Result<ScenarioConfig, Error> {
    let config = ScenarioConfig::parse(config_text)?;
    if config.rounds > MAX_ROUNDS {
        return Err(Error::config(
            "rounds",
            format!("the browser demo is limited to {MAX_ROUNDS} rounds"),
        ));
    }
    Ok(config)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("views serialize")
}

pub fn simulate_json(config_text: &str) -> Result<String, Error> {
    let config = checked_config(config_text)?;
    let artifact = iori_core::run(&config)?;
    let fundamental: Vec<f64> = artifact.records.iter().map(|r| r.fundamental).collect();
    Ok(to_json(&SimulationView {
        rounds: config.rounds,
        prices: thin(&artifact.prices),
        fundamental: thin(&fundamental),
        degenerate_rounds: artifact.diagnostics.degenerate_price_rounds,
        stats: (&artifact.stats).into(),
    }))
}

pub fn analyze_json(csv_text: &str, fit_max: usize) -> Result<String, Error> {
    let series = parse_prices(csv_text)?;
    let settings = AnalysisSettings {
        fit_max,
        ..AnalysisSettings::default()
    };
    let stats = analyze_daily_closes(&series.closes, settings)?;
    #[derive(Serialize)]
    struct View {
        rejected_rows: Vec<u64>,
        stats: StatsView,
    }
    Ok(to_json(&View {
        rejected_rows: series.rejected.iter().map(|r| r.line).collect(),
        stats: (&stats).into(),
    }))
}

pub fn lattice_json(config_text: &str, rounds: u64) -> Result<String, Error> {
    let config = checked_config(config_text)?;
    let mut sim = Simulation::new(&config)?;
    let target = rounds.min(config.rounds);
    while sim.round() < target {
        sim.step()?;
    }
    let state = sim.state();
    Ok(to_json(&LatticeView {
        side: state.lattice.side(),
        round: sim.round(),
        price: state.history.latest_price(),
        spins: state.agents.iter().map(|a| a.spin.value()).collect(),
    }))
}

fn js(result: Result<String, Error>) -> Result<String, JsError> {
    result.map_err(|e| JsError::new(&e.to_string()))
}

/// Runs a scenario given as `key = value` lines and returns prices and statistics.
#[wasm_bindgen]
pub fn simulate(config_text: &str) -> Result<String, JsError> {
    js(simulate_json(config_text))
}

/// Analyzes a pasted daily-close table.
#[wasm_bindgen]
pub fn analyze(csv_text: &str, fit_max: usize) -> Result<String, JsError> {
    js(analyze_json(csv_text, fit_max))
}

/// Spin configuration of the lattice after `rounds` rounds.
#[wasm_bindgen]
pub fn lattice(config_text: &str, rounds: u32) -> Result<String, JsError> {
    js(lattice_json(config_text, u64::from(rounds)))
}
