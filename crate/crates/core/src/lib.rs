//! Core of the evaluation harness: world models, the ground-truth
//! simulator, reference agents, the black-box agent protocol, and the
//! scoring functions that combine them.

pub mod agents;
pub mod metrics;
pub mod protocol;
pub mod rng;
pub mod simulator;
pub mod task;
pub mod worldmodel;

pub use worldmodel::{NormWeights, Value, WorldModel};
