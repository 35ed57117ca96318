//! Slot-level Monte Carlo simulator for single-AP mmWave downlink scheduling
//! under dynamic human blockage.
//!
//! The crate is organised around one simulated *drop*: users are placed
//! uniformly in a disc around the access point, each user's link attenuation
//! evolves through a four-state blockage process (LOS, linear decay, NLOS,
//! linear rise), and a scheduler assigns exactly one user per time slot.
//! Everything downstream of a [`engine::ScenarioConfig`] and a master seed is
//! deterministic, so different policies can be compared on common random
//! numbers.

pub mod blockage;
pub mod channel;
pub mod engine;
pub mod metrics;
pub mod predictor;
pub mod schedulers;
pub mod seeds;
