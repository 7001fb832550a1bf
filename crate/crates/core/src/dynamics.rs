//! Agent update rules: trust-memory forces, local field, threshold decision,
//! threshold rescaling, the consultation round and the fundamental trigger.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::{NoiseSchedule, ScenarioConfig};
use crate::error::{Error, Result};
use crate::state::{SimulationState, Spin, Threshold};

/// `sum_k spin_k * ln(reference / price_k)` over a memory window, oldest first.
pub fn memory_sum(spins: &[Spin], prices: &[f64], reference: f64) -> Result<f64> {
    if spins.len() != prices.len() {
        return Err(Error::invariant(
            0,
            "memory window spins and prices differ in length",
        ));
    }
    if reference <= 0.0 || prices.iter().any(|&p| p <= 0.0) {
        return Err(Error::invariant(0, "nonpositive price in memory window"));
    }
    let mut sum = 0.0;
    for (spin, &price) in spins.iter().zip(prices) {
        sum += spin.as_f64() * (reference / price).ln();
    }
    Ok(sum)
}

/// Force of neighbour `j` on an agent: the static background plus the
/// neighbour's past spins weighted by the log-return realised since each of them.
///
/// `spins` and `prices` cover rounds `t - tau ..= t - 1`; `reference` is the
/// price of round `t - 1`.
pub fn coupling_force(
    background: f64,
    spins: &[Spin],
    prices: &[f64],
    reference: f64,
) -> Result<f64> {
    Ok(background + memory_sum(spins, prices, reference)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalField {
    pub value: f64,
    pub forces: [f64; 4],
    pub noise: f64,
}

pub fn local_field(forces: [f64; 4], noise: f64) -> LocalField {
    LocalField {
        value: forces[0] + forces[1] + forces[2] + forces[3] + noise,
        forces,
        noise,
    }
}

/// Buy at or above the threshold, sell at or below its negative, hold in between.
#[inline]
pub fn decide_spin(field: f64, threshold: Threshold) -> Spin {
    let xi = threshold.get();
    if field >= xi {
        Spin::Buy
    } else if field <= -xi {
        Spin::Sell
    } else {
        Spin::Hold
    }
}

/// Rescales a threshold by the latest price ratio.
pub fn update_threshold(previous: Threshold, price: f64, previous_price: f64) -> Result<Threshold> {
    if !(price > 0.0 && previous_price > 0.0) {
        return Err(Error::invariant(
            0,
            format!("nonpositive price {price} / {previous_price}"),
        ));
    }
    Threshold::new(previous.get() * price / previous_price)
        .ok_or_else(|| Error::invariant(0, "threshold left the positive reals"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsultationOutcome {
    pub sweeps: u32,
    /// The sweep cap stopped the round before a flip-free sweep.
    pub capped: bool,
}

/// Relaxes the spins for the coming decision round.
///
/// Agents are drawn uniformly at random, `n` draws per sweep, and each draw
/// re-decides the agent's spin from its local field. Stops after the first
/// sweep without a single flip, or at `max_sweeps`. Under
/// [`NoiseSchedule::Round`] every agent's noise is drawn once up front; under
/// [`NoiseSchedule::Update`] it is redrawn at each visit. Cash and shares are
/// not touched.
pub fn consultation_round(state: &mut SimulationState) -> Result<ConsultationOutcome> {
    let round = state.round + 1;
    let fields = state.neighbour_fields().map_err(|e| e.at_round(round))?;
    let n = state.agents.len();
    let noise = Normal::new(0.0, state.config.noise_sd)
        .map_err(|e| Error::config("noise_sd", e.to_string()))?;
    let max_sweeps = state.config.max_sweeps;
    let schedule = state.config.noise_schedule;
    let rng = &mut state.rng;
    let agents = &mut state.agents;

    if schedule == NoiseSchedule::Round {
        for agent in agents.iter_mut() {
            agent.noise = noise.sample(&mut rng.noise);
        }
    }
    for sweep in 1..=max_sweeps {
        let mut flips = 0usize;
        for _ in 0..n {
            let i = rng.selection.random_range(0..n);
            let agent = &mut agents[i];
            if schedule == NoiseSchedule::Update {
                agent.noise = noise.sample(&mut rng.noise);
            }
            // same association order as `local_field`
            let spin = decide_spin(fields[i] + agent.noise, agent.threshold);
            if spin != agent.spin {
                agent.spin = spin;
                flips += 1;
            }
        }
        if flips == 0 {
            state.diagnostics.total_sweeps += u64::from(sweep);
            return Ok(ConsultationOutcome {
                sweeps: sweep,
                capped: false,
            });
        }
    }
    state.diagnostics.total_sweeps += u64::from(max_sweeps);
    state.diagnostics.max_sweep_hits += 1;
    Ok(ConsultationOutcome {
        sweeps: max_sweeps,
        capped: true,
    })
}

/// Valuation-driven trading rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalPolicy {
    pub sell_factor: f64,
    pub buy_factor: f64,
    pub obey_probability: f64,
    pub base_period: u64,
    pub jitter_max: u64,
    pub window: u64,
}

impl FundamentalPolicy {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        Self {
            sell_factor: config.sell_factor,
            buy_factor: config.buy_factor,
            obey_probability: config.fundamental_probability,
            base_period: config.base_period,
            jitter_max: config.jitter_max,
            window: config.window,
        }
    }

    /// Uniform draw of the period jitter k from `1..=jitter_max`.
    pub fn draw_jitter<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(1..=self.jitter_max)
    }

    /// Whether `t mod (K + k) < rho`.
    pub fn window_open(&self, t: u64, jitter: u64) -> bool {
        t % (self.base_period + jitter) < self.window
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FundamentalAction {
    SellAtMarket,
    BuyAtMarket,
    None,
}

pub fn fundamental_trigger(
    t: u64,
    policy: &FundamentalPolicy,
    jitter: u64,
    price: f64,
    fundamental: f64,
    coin: f64,
) -> FundamentalAction {
    if !policy.window_open(t, jitter) || coin >= policy.obey_probability {
        return FundamentalAction::None;
    }
    if price > policy.sell_factor * fundamental {
        FundamentalAction::SellAtMarket
    } else if price < policy.buy_factor * fundamental {
        FundamentalAction::BuyAtMarket
    } else {
        FundamentalAction::None
    }
}
