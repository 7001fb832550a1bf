//! Three-state agent market on a periodic square lattice in which every agent
//! weighs its neighbours by how well their past decisions foresaw the price.
//!
//! The crate has two halves:
//! - the simulator: [`state`] (initialization), [`dynamics`] (field, spin and
//!   threshold rules, consultation round), [`market`] (pricing, settlement,
//!   decision round) and [`simulation`] (the round loop);
//! - the statistics of [`stats`] that check volatility clustering, fat tails
//!   and the power-law decay of the absolute-return autocorrelation.
//!
//! [`run`] ties both together, [`ingest`] reads empirical close series into the
//! same pipeline and [`emit`] writes the plot-ready tables.

pub mod config;
pub mod dynamics;
pub mod emit;
pub mod error;
pub mod ingest;
pub mod lattice;
pub mod market;
pub mod rng;
pub mod run;
pub mod simulation;
pub mod state;
pub mod stats;

pub use config::{InitialForce, NoiseSchedule, ScenarioConfig};
pub use error::{Error, Result};
pub use run::{analyze_daily_closes, run, RunArtifact};
pub use simulation::Simulation;
