//! Air-ground collaborative charging of a wireless rechargeable sensor network.
//!
//! An aerial vehicle (AAV) and a ground vehicle (SV) each control heading and
//! travel distance every slot; sensors burn energy sensing and harvest RF
//! power from nearby chargers. The simulator is generic over the floating
//! point type; the aliases below fix it to `f64`, which is what the CLI and
//! wire protocol use.

pub mod agent;
pub mod baselines;
pub mod config;
pub mod error;
pub mod physics;
pub mod protocol;
pub mod report;
pub mod scalar;
pub mod world;

pub use agent::{Agent, PerAgent};
pub use error::{ConfigIssue, Error, Result};
pub use scalar::Scalar;

/// Scalar used by the CLI and protocol.
pub type Real = f64;

pub type WorldConfig = config::WorldConfig<Real>;
pub type WorldState = world::WorldState<Real>;
pub type SlotMetrics = world::SlotMetrics<Real>;
pub type Move = world::Move<Real>;
pub type ChargingParams = physics::ChargingParams<Real>;
pub type AavPowerParams = physics::AavPowerParams<Real>;
pub type SvPowerParams = physics::SvPowerParams<Real>;
