//! Agent-based simulation of lexical conventions emerging in task-oriented
//! dialogue, where communicative success may or may not decide what agents
//! remember.
//!
//! A run pairs agents ([`population`]), has them talk about sampled events
//! ([`world`], [`dialogue`]), and measures the resulting lexicons
//! ([`lexicon`], [`metrics`]). [`harness`] sweeps parameter grids and
//! writes CSV results; [`stats`] aggregates and compares them.

pub mod dialogue;
pub mod error;
pub mod harness;
pub mod lexicon;
pub mod metrics;
pub mod population;
pub mod stats;
pub mod world;

pub use error::{ConfigError, Error, Result, StatsError};
pub use population::{run_simulation, Arrangement, RunConfig, Simulation};
