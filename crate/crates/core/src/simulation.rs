//! Round-by-round driver.

use crate::config::ScenarioConfig;
use crate::dynamics::consultation_round;
use crate::error::Result;
use crate::market::{run_decision_round, RoundRecord};
use crate::state::SimulationState;

#[derive(Debug, Clone)]
pub struct Simulation {
    state: SimulationState,
}

impl Simulation {
    /// Initializes from `config`, seeded with `config.seed`.
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        Self::with_seed(config, config.seed)
    }

    pub fn with_seed(config: &ScenarioConfig, seed: u64) -> Result<Self> {
        Ok(Self {
            state: SimulationState::new(config, seed)?,
        })
    }

    pub fn state(&self) -> &SimulationState {
        &self.state
    }

    pub fn into_state(self) -> SimulationState {
        self.state
    }

    pub fn round(&self) -> u64 {
        self.state.round
    }

    pub fn is_finished(&self) -> bool {
        self.state.round >= self.state.config.rounds
    }

    /// Consultation followed by decision for the next round.
    pub fn step(&mut self) -> Result<RoundRecord> {
        let consultation = consultation_round(&mut self.state)?;
        run_decision_round(&mut self.state, consultation)
    }

    /// Runs every remaining round, handing each record and the updated state to `observe`.
    pub fn run_with<F>(&mut self, mut observe: F) -> Result<Vec<RoundRecord>>
    where
        F: FnMut(&SimulationState, &RoundRecord) -> Result<()>,
    {
        let remaining = self.state.config.rounds.saturating_sub(self.state.round);
        let mut records = Vec::with_capacity(remaining as usize);
        while !self.is_finished() {
            let record = self.step()?;
            observe(&self.state, &record)?;
            records.push(record);
        }
        Ok(records)
    }
}
