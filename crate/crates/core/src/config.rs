//! Scenario parameters, named presets and the `key = value` config format.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeTopology;

/// How the neighbour forces entering the very first local field are built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialForce {
    /// Background plus the trust-memory sum over the drawn prehistory.
    Memory,
    /// The Bernoulli(p) 0/1 connection drawn for every directed pair.
    Bernoulli,
}

impl InitialForce {
    fn as_str(self) -> &'static str {
        match self {
            InitialForce::Memory => "memory",
            InitialForce::Bernoulli => "bernoulli",
        }
    }
}

impl FromStr for InitialForce {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "memory" => Ok(InitialForce::Memory),
            "bernoulli" => Ok(InitialForce::Bernoulli),
            other => Err(Error::config(
                "initial_force",
                format!("unknown mode `{other}`"),
            )),
        }
    }
}

/// When the agents' white noise is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseSchedule {
    /// One draw per agent per decision round, held through the consultation round.
    Round,
    /// A fresh draw at every agent update inside the consultation round.
    Update,
}

impl NoiseSchedule {
    fn as_str(self) -> &'static str {
        match self {
            NoiseSchedule::Round => "round",
            NoiseSchedule::Update => "update",
        }
    }
}

impl FromStr for NoiseSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "round" => Ok(NoiseSchedule::Round),
            "update" => Ok(NoiseSchedule::Update),
            other => Err(Error::config(
                "noise_schedule",
                format!("unknown schedule `{other}`"),
            )),
        }
    }
}

/// Every model, run and analysis parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Number of agents; must be a square of at least 16.
    pub agents: usize,
    /// Number of decision rounds L.
    pub rounds: u64,
    /// Trust-memory depth tau in decision rounds.
    pub memory: usize,
    /// Calibration coefficient alpha of the market activity.
    pub alpha: f64,
    /// Standard deviation of the agents' white noise.
    pub noise_sd: f64,
    pub noise_schedule: NoiseSchedule,
    /// Probability p of a unit initial force on a directed pair.
    pub connect_probability: f64,
    pub initial_force: InitialForce,
    pub endowment_cash: f64,
    pub endowment_shares: u64,
    pub maker_cash: f64,
    pub maker_shares: u64,
    /// Agents sell above `sell_factor` times the fundamental price.
    pub sell_factor: f64,
    /// Agents buy below `buy_factor` times the fundamental price.
    pub buy_factor: f64,
    /// Probability pi of acting on the fundamental price in an open window.
    pub fundamental_probability: f64,
    /// K in the window period m = K + k.
    pub base_period: u64,
    /// k is drawn uniformly from 1..=jitter_max every decision round.
    pub jitter_max: u64,
    /// rho: the window is open while t mod m < rho.
    pub window: u64,
    /// Per-round multiplicative growth of the fundamental price.
    pub fundamental_growth: f64,
    pub rounds_per_day: usize,
    pub seed: u64,
    pub max_sweeps: u32,
    /// Inclusive lag range, in days, of the power-law fit.
    pub fit_min: usize,
    pub fit_max: usize,
    pub histogram_bins: usize,
}

/// Per-round growth that compounds to a factor 1.05 over 1500 rounds.
pub fn yearly_growth_per_round() -> f64 {
    1.05f64.powf(1.0 / 1500.0) - 1.0
}

pub const PRESET_NAMES: [&str; 6] = [
    "A",
    "B",
    "no-esteem",
    "A-small",
    "B-small",
    "no-esteem-small",
];

impl ScenarioConfig {
    /// Simulation A: n = 1024, tau = 20, K = 275, k in 1..=15, rho = 20, pi = 0.7.
    pub fn preset_a() -> Self {
        Self {
            agents: 1024,
            rounds: 80_000,
            memory: 20,
            alpha: 0.01,
            noise_sd: 1.0,
            noise_schedule: NoiseSchedule::Round,
            connect_probability: 0.5,
            initial_force: InitialForce::Memory,
            endowment_cash: 100.0,
            endowment_shares: 100,
            maker_cash: 10_240.0,
            maker_shares: 10_240,
            sell_factor: 1.5,
            buy_factor: 0.667,
            fundamental_probability: 0.70,
            base_period: 275,
            jitter_max: 15,
            window: 20,
            fundamental_growth: yearly_growth_per_round(),
            rounds_per_day: 6,
            seed: 42,
            max_sweeps: 50,
            fit_min: 1,
            fit_max: 100,
            histogram_bins: 50,
        }
    }

    /// Simulation B: A with tau = 40, K = 200, k in 1..=10, rho = 30, pi = 0.9.
    pub fn preset_b() -> Self {
        Self {
            memory: 40,
            base_period: 200,
            jitter_max: 10,
            window: 30,
            fundamental_probability: 0.90,
            ..Self::preset_a()
        }
    }

    /// The memoryless control: A with tau = 1.
    pub fn preset_no_esteem() -> Self {
        Self {
            memory: 1,
            ..Self::preset_a()
        }
    }

    fn small(self) -> Self {
        Self {
            agents: 64,
            rounds: 6_000,
            // endowments scale with the agent count like the full-size maker's 10 * n
            maker_cash: 640.0,
            maker_shares: 640,
            ..self
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        let normalized = name.trim().to_ascii_lowercase().replace('_', "-");
        match normalized.as_str() {
            "a" => Ok(Self::preset_a()),
            "b" => Ok(Self::preset_b()),
            "no-esteem" => Ok(Self::preset_no_esteem()),
            "a-small" => Ok(Self::preset_a().small()),
            "b-small" => Ok(Self::preset_b().small()),
            "no-esteem-small" => Ok(Self::preset_no_esteem().small()),
            _ => Err(Error::config(
                "preset",
                format!(
                    "unknown preset `{name}` (known: {})",
                    PRESET_NAMES.join(", ")
                ),
            )),
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        LatticeTopology::new(self.agents)?;
        let check = |ok: bool, field: &str, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::config(field, msg))
            }
        };
        check(self.memory >= 1, "memory", "must be at least 1")?;
        check(
            self.alpha.is_finite() && self.alpha > 0.0,
            "alpha",
            "must be positive",
        )?;
        check(
            self.noise_sd.is_finite() && self.noise_sd >= 0.0,
            "noise_sd",
            "must be nonnegative",
        )?;
        check(
            (0.0..=1.0).contains(&self.connect_probability),
            "connect_probability",
            "must lie in [0, 1]",
        )?;
        check(
            self.endowment_cash.is_finite() && self.endowment_cash >= 0.0,
            "endowment_cash",
            "must be nonnegative",
        )?;
        check(
            self.maker_cash.is_finite() && self.maker_cash >= 0.0,
            "maker_cash",
            "must be nonnegative",
        )?;
        check(
            self.sell_factor.is_finite() && self.sell_factor > 1.0,
            "sell_factor",
            "must exceed 1",
        )?;
        check(
            self.buy_factor > 0.0 && self.buy_factor < 1.0,
            "buy_factor",
            "must lie strictly between 0 and 1",
        )?;
        check(
            (0.0..=1.0).contains(&self.fundamental_probability),
            "fundamental_probability",
            "must lie in [0, 1]",
        )?;
        check(self.base_period >= 1, "base_period", "must be at least 1")?;
        check(self.jitter_max >= 1, "jitter_max", "must be at least 1")?;
        check(
            self.window < self.base_period,
            "window",
            "must be below base_period",
        )?;
        check(
            self.fundamental_growth.is_finite() && 1.0 + self.fundamental_growth > 0.0,
            "fundamental_growth",
            "1 + growth must be positive",
        )?;
        check(
            self.rounds_per_day >= 1,
            "rounds_per_day",
            "must be at least 1",
        )?;
        check(self.max_sweeps >= 1, "max_sweeps", "must be at least 1")?;
        check(self.fit_min >= 1, "fit_min", "must be at least 1")?;
        check(
            self.fit_max > self.fit_min,
            "fit_max",
            "must exceed fit_min",
        )?;
        check(
            self.histogram_bins >= 2,
            "histogram_bins",
            "must be at least 2",
        )?;
        Ok(())
    }

    /// Renders the flat `key = value` form; [`ScenarioConfig::parse`] reads it back exactly.
    pub fn to_config_string(&self) -> String {
        let mut out = String::from("# scenario configuration\n");
        for (key, value) in self.entries() {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("agents", self.agents.to_string()),
            ("rounds", self.rounds.to_string()),
            ("memory", self.memory.to_string()),
            ("alpha", fmt_f64(self.alpha)),
            ("noise_sd", fmt_f64(self.noise_sd)),
            ("noise_schedule", self.noise_schedule.as_str().to_string()),
            ("connect_probability", fmt_f64(self.connect_probability)),
            ("initial_force", self.initial_force.as_str().to_string()),
            ("endowment_cash", fmt_f64(self.endowment_cash)),
            ("endowment_shares", self.endowment_shares.to_string()),
            ("maker_cash", fmt_f64(self.maker_cash)),
            ("maker_shares", self.maker_shares.to_string()),
            ("sell_factor", fmt_f64(self.sell_factor)),
            ("buy_factor", fmt_f64(self.buy_factor)),
            (
                "fundamental_probability",
                fmt_f64(self.fundamental_probability),
            ),
            ("base_period", self.base_period.to_string()),
            ("jitter_max", self.jitter_max.to_string()),
            ("window", self.window.to_string()),
            ("fundamental_growth", fmt_f64(self.fundamental_growth)),
            ("rounds_per_day", self.rounds_per_day.to_string()),
            ("seed", self.seed.to_string()),
            ("max_sweeps", self.max_sweeps.to_string()),
            ("fit_min", self.fit_min.to_string()),
            ("fit_max", self.fit_max.to_string()),
            ("histogram_bins", self.histogram_bins.to_string()),
        ]
    }

    /// Parses the `key = value` format. `#` starts a comment. A `preset = NAME`
    /// line selects the base values; otherwise keys not given keep preset A values.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}", idx + 1), "expected `key = value`")
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        let mut config = match pairs.iter().find(|(k, _)| k == "preset") {
            Some((_, name)) => Self::preset(name)?,
            None => Self::preset_a(),
        };
        for (key, value) in &pairs {
            config.set(key, value)?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
        }
        match key {
            "preset" => {}
            "agents" => self.agents = num(key, value)?,
            "rounds" => self.rounds = num(key, value)?,
            "memory" => self.memory = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "noise_sd" => self.noise_sd = num(key, value)?,
            "noise_schedule" => self.noise_schedule = value.parse()?,
            "connect_probability" => self.connect_probability = num(key, value)?,
            "initial_force" => self.initial_force = value.parse()?,
            "endowment_cash" => self.endowment_cash = num(key, value)?,
            "endowment_shares" => self.endowment_shares = num(key, value)?,
            "maker_cash" => self.maker_cash = num(key, value)?,
            "maker_shares" => self.maker_shares = num(key, value)?,
            "sell_factor" => self.sell_factor = num(key, value)?,
            "buy_factor" => self.buy_factor = num(key, value)?,
            "fundamental_probability" => self.fundamental_probability = num(key, value)?,
            "base_period" => self.base_period = num(key, value)?,
            "jitter_max" => self.jitter_max = num(key, value)?,
            "window" => self.window = num(key, value)?,
            "fundamental_growth" => self.fundamental_growth = num(key, value)?,
            "rounds_per_day" => self.rounds_per_day = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "max_sweeps" => self.max_sweeps = num(key, value)?,
            "fit_min" => self.fit_min = num(key, value)?,
            "fit_max" => self.fit_max = num(key, value)?,
            "histogram_bins" => self.histogram_bins = num(key, value)?,
            other => return Err(Error::config(other, "unknown key")),
        }
        Ok(())
    }
}

/// Shortest text that parses back to the same `f64`.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
