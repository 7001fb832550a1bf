//! Agent, coupling and history containers, and the initialization of a run.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Bernoulli, Distribution, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::config::{InitialForce, ScenarioConfig};
use crate::dynamics::{decide_spin, local_field};
use crate::error::{Error, Result};
use crate::lattice::LatticeTopology;
use crate::market::MarketState;
use crate::rng::RandomSource;

/// An agent's stance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(i8)]
pub enum Spin {
    Sell = -1,
    Hold = 0,
    Buy = 1,
}

impl Spin {
    #[inline]
    pub fn value(self) -> i8 {
        self as i8
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self as i8 as f64
    }

    /// Uniform draw from the three states.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        match rng.random_range(0..3u8) {
            0 => Spin::Sell,
            1 => Spin::Hold,
            _ => Spin::Buy,
        }
    }
}

impl std::ops::Neg for Spin {
    type Output = Spin;

    fn neg(self) -> Spin {
        match self {
            Spin::Sell => Spin::Buy,
            Spin::Hold => Spin::Hold,
            Spin::Buy => Spin::Sell,
        }
    }
}

/// Half-width of the passivity band; strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(value: f64) -> Option<Self> {
        (value > 0.0 && value.is_finite()).then_some(Self(value))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub spin: Spin,
    pub threshold: Threshold,
    /// Most recent noise draw.
    pub noise: f64,
    pub cash: f64,
    pub shares: u64,
}

/// Static part of the directed neighbour couplings.
///
/// Slot `k` of agent `i` describes the influence of `lattice.neighbours(i)[k]` on `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingState {
    pub background: Vec<[f64; 4]>,
    pub initial_force: Vec<[u8; 4]>,
    pub connect_probability: f64,
}

/// The last `depth` decision-round spins of every agent together with the
/// prices of those rounds and the one before them.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryBuffer {
    depth: usize,
    spins: VecDeque<Box<[Spin]>>,
    prices: VecDeque<f64>,
}

impl HistoryBuffer {
    fn new(depth: usize) -> Self {
        Self {
            depth,
            spins: VecDeque::with_capacity(depth + 1),
            prices: VecDeque::with_capacity(depth + 2),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn spin_len(&self) -> usize {
        self.spins.len()
    }

    pub fn price_len(&self) -> usize {
        self.prices.len()
    }

    pub fn prices(&self) -> impl Iterator<Item = f64> + '_ {
        self.prices.iter().copied()
    }

    pub fn latest_price(&self) -> f64 {
        *self
            .prices
            .back()
            .expect("history holds at least one price")
    }

    fn push_spins(&mut self, spins: Box<[Spin]>) {
        self.spins.push_back(spins);
        if self.spins.len() > self.depth {
            self.spins.pop_front();
        }
    }

    fn push_price(&mut self, price: f64) {
        self.prices.push_back(price);
        if self.prices.len() > self.depth + 1 {
            self.prices.pop_front();
        }
    }

    /// Appends one decision round.
    pub fn push_round(&mut self, spins: Box<[Spin]>, price: f64) {
        self.push_spins(spins);
        self.push_price(price);
    }

    /// Prices aligned with the stored spin rounds (oldest first).
    fn window_prices(&self) -> Vec<f64> {
        let skip = self.prices.len() - self.spins.len();
        self.prices.iter().skip(skip).copied().collect()
    }

    /// Spins of agent `j` over the stored rounds, oldest first.
    pub fn agent_spins(&self, j: usize) -> Vec<Spin> {
        self.spins.iter().map(|round| round[j]).collect()
    }

    /// Trust-memory sum of every agent against the latest stored price.
    pub fn memory_sums(&self, n: usize) -> Result<Vec<f64>> {
        let window = self.window_prices();
        let reference = self.latest_price();
        if reference <= 0.0 || window.iter().any(|&p| p <= 0.0) {
            return Err(Error::invariant(0, "nonpositive price in history"));
        }
        let log_ratios: Vec<f64> = window.iter().map(|&p| (reference / p).ln()).collect();
        let mut sums = vec![0.0; n];
        for (round, ratio) in self.spins.iter().zip(&log_ratios) {
            for (sum, spin) in sums.iter_mut().zip(round.iter()) {
                *sum += spin.as_f64() * ratio;
            }
        }
        Ok(sums)
    }

    /// Memory-window view used by the pure force function.
    pub fn window(&self, j: usize) -> (Vec<Spin>, Vec<f64>, f64) {
        (
            self.agent_spins(j),
            self.window_prices(),
            self.latest_price(),
        )
    }
}

/// Running totals of non-fatal events.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Rounds where demand or supply was zero and the price was held.
    pub degenerate_price_rounds: u64,
    /// Consultation rounds that stopped at the sweep cap.
    pub max_sweep_hits: u64,
    pub total_sweeps: u64,
    pub lapsed_orders: u64,
    pub dropped_orders: u64,
    /// Decision rounds in which at least one fundamental order was placed.
    pub fundamental_rounds: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    pub config: ScenarioConfig,
    pub lattice: LatticeTopology,
    pub agents: Vec<AgentState>,
    pub coupling: CouplingState,
    pub history: HistoryBuffer,
    pub market: MarketState,
    pub rng: RandomSource,
    /// Last completed decision round; 0 right after initialization.
    pub round: u64,
    pub diagnostics: Diagnostics,
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}

impl SimulationState {
    /// Prepares round 0: prehistory of spins and prices, couplings,
    /// thresholds, noise, endowments, the initial field and the first decisions.
    pub fn new(config: &ScenarioConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let lattice = LatticeTopology::new(config.agents)?;
        let n = lattice.len();
        let tau = config.memory;
        let mut rng = RandomSource::new(seed);
        let init = &mut rng.init;

        let mut history = HistoryBuffer::new(tau);
        for _ in 0..tau {
            let spins: Box<[Spin]> = (0..n).map(|_| Spin::random(init)).collect();
            let price = open01(init);
            history.push_round(spins, price);
        }

        let background: Vec<[f64; 4]> = (0..n)
            .map(|_| std::array::from_fn(|_| 4.0 * open01(init) - 2.0))
            .collect();
        let connect = Bernoulli::new(config.connect_probability)
            .map_err(|e| Error::config("connect_probability", e.to_string()))?;
        let initial_force: Vec<[u8; 4]> = (0..n)
            .map(|_| std::array::from_fn(|_| u8::from(connect.sample(init))))
            .collect();

        let thresholds: Vec<Threshold> = (0..n)
            .map(|_| loop {
                let draw: f64 = StandardNormal.sample(init);
                if let Some(t) = Threshold::new(draw.abs()) {
                    break t;
                }
            })
            .collect();
        let noise: Vec<f64> = (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(init);
                config.noise_sd * z
            })
            .collect();

        let memory = history.memory_sums(n)?;
        let agents: Vec<AgentState> = (0..n)
            .map(|i| {
                let forces: [f64; 4] = match config.initial_force {
                    InitialForce::Memory => {
                        std::array::from_fn(|k| background[i][k] + memory[lattice.neighbours(i)[k]])
                    }
                    InitialForce::Bernoulli => {
                        std::array::from_fn(|k| f64::from(initial_force[i][k]))
                    }
                };
                let field = local_field(forces, noise[i]);
                AgentState {
                    spin: decide_spin(field.value, thresholds[i]),
                    threshold: thresholds[i],
                    noise: noise[i],
                    cash: config.endowment_cash,
                    shares: config.endowment_shares,
                }
            })
            .collect();

        let price = open01(init);
        history.push_round(agents.iter().map(|a| a.spin).collect(), price);
        let market = MarketState::new(price, config);

        Ok(Self {
            config: config.clone(),
            lattice,
            agents,
            coupling: CouplingState {
                background,
                initial_force,
                connect_probability: config.connect_probability,
            },
            history,
            market,
            rng,
            round: 0,
            diagnostics: Diagnostics::default(),
        })
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn total_agent_cash(&self) -> f64 {
        self.agents.iter().map(|a| a.cash).sum()
    }

    pub fn total_agent_shares(&self) -> u64 {
        self.agents.iter().map(|a| a.shares).sum()
    }

    /// Cash held by agents and maker together.
    pub fn total_cash(&self) -> f64 {
        self.total_agent_cash() + self.market.maker.cash
    }

    pub fn total_shares(&self) -> u64 {
        self.total_agent_shares() + self.market.maker.shares
    }

    /// Directed force of neighbour slot `k` on agent `i` from the current history.
    pub fn coupling_force(&self, i: usize, k: usize) -> Result<f64> {
        let j = self.lattice.neighbours(i)[k];
        let (spins, prices, reference) = self.history.window(j);
        crate::dynamics::coupling_force(self.coupling.background[i][k], &spins, &prices, reference)
    }

    /// Sum of the four neighbour forces on every agent for the coming round.
    pub(crate) fn neighbour_fields(&self) -> Result<Vec<f64>> {
        let memory = self.history.memory_sums(self.len())?;
        Ok((0..self.len())
            .map(|i| {
                let nb = self.lattice.neighbours(i);
                let w = &self.coupling.background[i];
                let f: [f64; 4] = std::array::from_fn(|k| w[k] + memory[nb[k]]);
                f[0] + f[1] + f[2] + f[3]
            })
            .collect())
    }
}
