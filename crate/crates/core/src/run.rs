//! Whole-run orchestration and the statistics pipeline shared by simulated
//! and ingested price series.

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::market::RoundRecord;
use crate::simulation::Simulation;
use crate::state::{Diagnostics, SimulationState};
use crate::stats::{
    abs_acf_power_fit, acf, aggregate_daily, histogram, log_returns, variogram, AcfReport,
    HistogramReport, PowerLawFit, ReturnSeries, VariogramReport,
};

/// Parameters of the statistics pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    pub fit_min: usize,
    pub fit_max: usize,
    pub histogram_bins: usize,
    /// Decision rounds per sample of the analysed closes.
    pub resolution: usize,
}

impl AnalysisSettings {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        Self {
            fit_min: config.fit_min,
            fit_max: config.fit_max,
            histogram_bins: config.histogram_bins,
            resolution: config.rounds_per_day,
        }
    }
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            fit_min: 1,
            fit_max: 100,
            histogram_bins: 50,
            resolution: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub settings: AnalysisSettings,
    pub daily_closes: Vec<f64>,
    pub daily_returns: ReturnSeries,
    /// Autocorrelation of the raw daily returns.
    pub return_acf: AcfReport,
    /// Autocorrelation of the absolute daily returns, with its power-law fit.
    pub abs_acf: AcfReport,
    /// Why the power-law fit failed, when it did.
    pub fit_error: Option<String>,
    pub histogram: HistogramReport,
    pub variogram: VariogramReport,
}

impl StatsReport {
    pub fn gamma(&self) -> Option<&PowerLawFit> {
        self.abs_acf.fit.as_ref()
    }

    pub fn excess_kurtosis(&self) -> Option<f64> {
        self.histogram.excess_kurtosis
    }
}

/// Daily closes in, stylized-fact reports out.
pub fn analyze_daily_closes(closes: &[f64], settings: AnalysisSettings) -> Result<StatsReport> {
    let mut daily_returns = log_returns(closes, 1)?;
    daily_returns.resolution = settings.resolution;
    let max_lag = settings.fit_max;
    let return_acf = acf(&daily_returns.values, max_lag)?;
    let (abs_acf, fit_error) =
        match abs_acf_power_fit(&daily_returns, settings.fit_min, settings.fit_max) {
            Ok(report) => (report, None),
            Err(Error::Stats(msg)) => (acf(&daily_returns.absolute(), max_lag)?, Some(msg)),
            Err(e) => return Err(e),
        };
    let histogram = histogram(&daily_returns.values, settings.histogram_bins)?;
    let variogram = variogram(&daily_returns, max_lag)?;
    Ok(StatsReport {
        settings,
        daily_closes: closes.to_vec(),
        daily_returns,
        return_acf,
        abs_acf,
        fit_error,
        histogram,
        variogram,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifact {
    pub config: ScenarioConfig,
    /// P(0), P(1), ..., P(L).
    pub prices: Vec<f64>,
    pub records: Vec<RoundRecord>,
    pub stats: StatsReport,
    pub diagnostics: Diagnostics,
}

/// Checks the settlement invariants after a round.
pub fn check_round_invariants(
    state: &SimulationState,
    initial_cash: f64,
    initial_shares: u64,
) -> Result<()> {
    let round = state.round;
    if let Some(i) = state.agents.iter().position(|a| !(a.cash >= 0.0)) {
        return Err(Error::invariant(
            round,
            format!("agent {i} has negative cash {}", state.agents[i].cash),
        ));
    }
    if !(state.market.maker.cash >= 0.0) {
        return Err(Error::invariant(round, "maker has negative cash"));
    }
    if state.total_shares() != initial_shares {
        return Err(Error::invariant(round, "total share count changed"));
    }
    let cash = state.total_cash();
    if (cash - initial_cash).abs() > 1e-9 * initial_cash.abs().max(1.0) {
        return Err(Error::invariant(
            round,
            format!("total cash drifted from {initial_cash} to {cash}"),
        ));
    }
    Ok(())
}

/// Simulates `config.rounds` decision rounds and analyses the daily closes.
pub fn run(config: &ScenarioConfig) -> Result<RunArtifact> {
    let mut sim = Simulation::new(config)?;
    let (cash, shares) = (sim.state().total_cash(), sim.state().total_shares());
    let records = sim.run_with(|state, _| check_round_invariants(state, cash, shares))?;
    let state = sim.into_state();
    let prices = state.market.price_history;
    let closes = aggregate_daily(&prices[1..], config.rounds_per_day)?;
    let stats = analyze_daily_closes(&closes, AnalysisSettings::from_config(config))?;
    Ok(RunArtifact {
        config: config.clone(),
        prices,
        records,
        stats,
        diagnostics: state.diagnostics,
    })
}
