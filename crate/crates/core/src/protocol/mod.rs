//! Observation encoding, action decoding and the line-delimited JSON server.

pub mod server;

use serde::{Deserialize, Serialize};

use crate::config::WorldConfig;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::world::{Move, WorldState};

pub use server::{serve_stdio, serve_stream, serve_tcp, Session};

/// Shared global observation.
///
/// Layout: `(x/X, y/Y, q/e_max)` per sensor with `q = 0` for dead sensors,
/// then `(x/X, y/Y, h/X)` for the AAV, then `(x/X, y/Y)` for the SV.
pub fn encode_observation<F: Scalar>(world: &WorldState<F>) -> Vec<F> {
    let s = &world.config.scenario;
    let mut obs = Vec::with_capacity(world.config.obs_dim());
    for sensor in &world.sensors {
        let q = if sensor.alive {
            sensor.energy
        } else {
            F::zero()
        };
        obs.extend([sensor.x / s.x_max, sensor.y / s.y_max, q / s.e_max]);
    }
    let aav = &world.chargers.aav;
    obs.extend([aav.x / s.x_max, aav.y / s.y_max, aav.altitude / s.x_max]);
    let sv = &world.chargers.sv;
    obs.extend([sv.x / s.x_max, sv.y / s.y_max]);
    obs
}

/// A policy output before scaling: both components in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawAction<F> {
    pub u_theta: F,
    pub u_d: F,
}

impl<F: Scalar> RawAction<F> {
    pub fn new(u_theta: F, u_d: F) -> Self {
        Self { u_theta, u_d }
    }

    /// Inverse of [`decode_action`].
    pub fn from_move(mv: Move<F>, config: &WorldConfig<F>) -> Self {
        Self {
            u_theta: mv.theta / F::TAU(),
            u_d: mv.distance / config.scenario.d_move_max,
        }
    }
}

/// Scales a raw action to heading `2 pi u_theta` and distance `d_move_max u_d`.
pub fn decode_action<F: Scalar>(raw: RawAction<F>, config: &WorldConfig<F>) -> Result<Move<F>> {
    let unit = |name: &str, v: F| {
        if v.is_finite() && v >= F::zero() && v <= F::one() {
            Ok(v)
        } else {
            Err(Error::Protocol(format!("{name} = {v} is outside [0, 1]")))
        }
    };
    let u_theta = unit("u_theta", raw.u_theta)?;
    let u_d = unit("u_d", raw.u_d)?;
    Ok(Move::new(
        F::TAU() * u_theta,
        config.scenario.d_move_max * u_d,
    ))
}
