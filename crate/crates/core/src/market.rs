//! Market maker pricing, order settlement under wealth constraints and the
//! decision-round orchestration.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::dynamics::{
    fundamental_trigger, update_threshold, ConsultationOutcome, FundamentalAction,
    FundamentalPolicy,
};
use crate::error::{Error, Result};
use crate::state::{AgentState, SimulationState, Spin};

/// Passive counterparty inventory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MakerBook {
    pub cash: f64,
    pub shares: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    pub price: f64,
    /// Prices from round 0 onwards; index `t` holds P(t).
    pub price_history: Vec<f64>,
    pub fundamental: f64,
    pub activity_coeff: f64,
    pub fundamental_growth: f64,
    pub demand: usize,
    pub supply: usize,
    /// kappa of the last decision round.
    pub activity: f64,
    pub maker: MakerBook,
}

impl MarketState {
    /// Opening market at `price`; the fundamental price starts equal to it.
    pub fn new(price: f64, config: &ScenarioConfig) -> Self {
        Self {
            price,
            price_history: vec![price],
            fundamental: price,
            activity_coeff: config.alpha,
            fundamental_growth: config.fundamental_growth,
            demand: 0,
            supply: 0,
            activity: 0.0,
            maker: MakerBook {
                cash: config.maker_cash,
                shares: config.maker_shares,
            },
        }
    }
}

/// kappa = alpha (D + S) / n.
pub fn market_activity(demand: usize, supply: usize, n: usize, alpha: f64) -> f64 {
    alpha * (demand + supply) as f64 / n as f64
}

/// New price `P (D / S)^kappa`; held at `P` when either side is empty.
pub fn form_price(previous: f64, demand: usize, supply: usize, n: usize, alpha: f64) -> f64 {
    if demand == 0 || supply == 0 {
        return previous;
    }
    let kappa = market_activity(demand, supply, n, alpha);
    previous * (demand as f64 / supply as f64).powf(kappa)
}

/// Compounds the fundamental price by one round.
pub fn advance_fundamental(fundamental: f64, growth: f64) -> Result<f64> {
    if 1.0 + growth <= 0.0 {
        return Err(Error::config(
            "fundamental_growth",
            "1 + growth must be positive",
        ));
    }
    Ok(fundamental * (1.0 + growth))
}

/// One-share orders of a decision round.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderBookRound {
    pub buyers: Vec<usize>,
    pub sellers: Vec<usize>,
}

impl OrderBookRound {
    pub fn from_spins(agents: &[AgentState]) -> Self {
        let mut book = Self::default();
        for (id, agent) in agents.iter().enumerate() {
            match agent.spin {
                Spin::Buy => book.buyers.push(id),
                Spin::Sell => book.sellers.push(id),
                Spin::Hold => {}
            }
        }
        book
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettlementReport {
    /// Agent-to-agent pairs.
    pub matched: usize,
    /// Orders filled against the maker.
    pub maker_filled: usize,
    /// Affordable orders left unfilled because the maker ran out.
    pub lapsed: usize,
    /// Orders the agent could not afford (no cash for a buy, no share for a sell).
    pub dropped: usize,
}

/// Settles one round of one-share orders at `price`.
///
/// Unaffordable orders are dropped, the rest are paired at random, and the
/// unmatched side trades with the maker until its inventory runs out.
pub fn settle_trades<R: Rng + ?Sized>(
    orders: &OrderBookRound,
    price: f64,
    agents: &mut [AgentState],
    maker: &mut MakerBook,
    rng: &mut R,
) -> SettlementReport {
    let mut buyers: Vec<usize> = orders
        .buyers
        .iter()
        .copied()
        .filter(|&i| agents[i].cash >= price)
        .collect();
    let mut sellers: Vec<usize> = orders
        .sellers
        .iter()
        .copied()
        .filter(|&i| agents[i].shares >= 1)
        .collect();
    let dropped = orders.buyers.len() + orders.sellers.len() - buyers.len() - sellers.len();

    buyers.shuffle(rng);
    sellers.shuffle(rng);
    let matched = buyers.len().min(sellers.len());
    for (&b, &s) in buyers.iter().zip(&sellers) {
        agents[b].cash -= price;
        agents[b].shares += 1;
        agents[s].cash += price;
        agents[s].shares -= 1;
    }

    let mut maker_filled = 0;
    let mut lapsed = 0;
    for &b in &buyers[matched..] {
        if maker.shares >= 1 {
            maker.shares -= 1;
            maker.cash += price;
            agents[b].shares += 1;
            agents[b].cash -= price;
            maker_filled += 1;
        } else {
            lapsed += 1;
        }
    }
    for &s in &sellers[matched..] {
        if maker.cash >= price {
            maker.cash -= price;
            maker.shares += 1;
            agents[s].shares -= 1;
            agents[s].cash += price;
            maker_filled += 1;
        } else {
            lapsed += 1;
        }
    }
    SettlementReport {
        matched,
        maker_filled,
        lapsed,
        dropped,
    }
}

/// One row of the per-round table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub price: f64,
    pub fundamental: f64,
    pub demand: usize,
    pub supply: usize,
    pub activity: f64,
    pub fundamental_orders: usize,
    pub matched: usize,
    pub maker_filled: usize,
    pub lapsed: usize,
    pub dropped: usize,
    pub sweeps: u32,
}

impl RoundRecord {
    pub const HEADER: &'static str = "round,price,fundamental,demand,supply,activity,fundamental_orders,matched,maker_filled,lapsed,dropped,sweeps";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:?},{:?},{},{},{:?},{},{},{},{},{},{}",
            self.round,
            self.price,
            self.fundamental,
            self.demand,
            self.supply,
            self.activity,
            self.fundamental_orders,
            self.matched,
            self.maker_filled,
            self.lapsed,
            self.dropped,
            self.sweeps
        )
    }
}

/// Trading phase of round `state.round + 1`, run after its consultation round.
///
/// Applies fundamental overrides, counts demand and supply, forms the price,
/// settles, rescales thresholds, grows the fundamental price and records the
/// round's decisions in the history.
pub fn run_decision_round(
    state: &mut SimulationState,
    consultation: ConsultationOutcome,
) -> Result<RoundRecord> {
    let t = state.round + 1;
    let policy = FundamentalPolicy::from_config(&state.config);
    let previous = state.market.price;

    let jitter = policy.draw_jitter(&mut state.rng.fundamental);
    let mut fundamental_orders = 0;
    if policy.window_open(t, jitter) {
        for agent in &mut state.agents {
            let coin: f64 = state.rng.fundamental.random();
            match fundamental_trigger(t, &policy, jitter, previous, state.market.fundamental, coin)
            {
                FundamentalAction::SellAtMarket => {
                    agent.spin = Spin::Sell;
                    fundamental_orders += 1;
                }
                FundamentalAction::BuyAtMarket => {
                    agent.spin = Spin::Buy;
                    fundamental_orders += 1;
                }
                FundamentalAction::None => {}
            }
        }
    }
    if fundamental_orders > 0 {
        state.diagnostics.fundamental_rounds += 1;
    }

    let orders = OrderBookRound::from_spins(&state.agents);
    let (demand, supply) = (orders.buyers.len(), orders.sellers.len());
    let n = state.agents.len();
    let alpha = state.market.activity_coeff;
    let activity = market_activity(demand, supply, n, alpha);
    if demand == 0 || supply == 0 {
        state.diagnostics.degenerate_price_rounds += 1;
    }
    let price = form_price(previous, demand, supply, n, alpha);
    if !(price > 0.0 && price.is_finite()) {
        return Err(Error::invariant(
            t,
            format!("price left the positive reals: {price}"),
        ));
    }

    let report = settle_trades(
        &orders,
        price,
        &mut state.agents,
        &mut state.market.maker,
        &mut state.rng.matching,
    );
    state.diagnostics.lapsed_orders += report.lapsed as u64;
    state.diagnostics.dropped_orders += report.dropped as u64;

    for agent in &mut state.agents {
        agent.threshold =
            update_threshold(agent.threshold, price, previous).map_err(|e| e.at_round(t))?;
    }
    let fundamental =
        advance_fundamental(state.market.fundamental, state.market.fundamental_growth)?;

    let market = &mut state.market;
    market.price = price;
    market.price_history.push(price);
    market.fundamental = fundamental;
    market.demand = demand;
    market.supply = supply;
    market.activity = activity;
    state
        .history
        .push_round(state.agents.iter().map(|a| a.spin).collect(), price);
    state.round = t;

    Ok(RoundRecord {
        round: t,
        price,
        fundamental,
        demand,
        supply,
        activity,
        fundamental_orders,
        matched: report.matched,
        maker_filled: report.maker_filled,
        lapsed: report.lapsed,
        dropped: report.dropped,
        sweeps: consultation.sweeps,
    })
}
