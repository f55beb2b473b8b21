//! Scripted, non-learning controllers.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::agent::Agent;
use crate::config::WorldConfig;
use crate::protocol::RawAction;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControllerKind {
    Random,
    Stationary,
    Greedy,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 3] = [
        ControllerKind::Random,
        ControllerKind::Stationary,
        ControllerKind::Greedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Random => "random",
            ControllerKind::Stationary => "stationary",
            ControllerKind::Greedy => "greedy",
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown policy `{s}` (expected random, stationary or greedy)"))
    }
}

/// Uniform raw action on `[0, 1]^2`.
pub fn random_policy<F: Scalar, R: Rng + ?Sized>(rng: &mut R) -> RawAction<F> {
    let u_theta = rng.random_range(F::zero()..=F::one());
    let u_d = rng.random_range(F::zero()..=F::one());
    RawAction::new(u_theta, u_d)
}

/// Never moves.
pub fn stationary_policy<F: Scalar>() -> RawAction<F> {
    RawAction::new(F::zero(), F::zero())
}

/// Heads for the weakest alive sensor in this agent's half of the network.
///
/// A sensor belongs to an agent when it is at least as close (planar) to it
/// as to the other agent. If the agent's share is empty, the weakest alive
/// sensor overall is used. Ties on energy go to the lower sensor index.
pub fn greedy_policy<F: Scalar>(obs: &[F], agent: Agent, config: &WorldConfig<F>) -> RawAction<F> {
    let s = &config.scenario;
    let n = (obs.len().saturating_sub(5)) / 3;
    let charger_at = |a: Agent| {
        let base = 3 * n + if a == Agent::Aav { 0 } else { 3 };
        (obs[base] * s.x_max, obs[base + 1] * s.y_max)
    };
    let (sx, sy) = charger_at(agent);
    let (ox, oy) = charger_at(agent.other());

    let mut own: Option<(F, F, F)> = None;
    let mut global: Option<(F, F, F)> = None;
    for i in 0..n {
        let q = obs[3 * i + 2];
        if q <= F::zero() {
            continue;
        }
        let x = obs[3 * i] * s.x_max;
        let y = obs[3 * i + 1] * s.y_max;
        let weaker = |best: &Option<(F, F, F)>| best.is_none_or(|(_, _, bq)| q < bq);
        if weaker(&global) {
            global = Some((x, y, q));
        }
        let mine = (x - sx).hypot(y - sy) <= (x - ox).hypot(y - oy);
        if mine && weaker(&own) {
            own = Some((x, y, q));
        }
    }

    let Some((tx, ty, _)) = own.or(global) else {
        return stationary_policy();
    };
    let (dx, dy) = (tx - sx, ty - sy);
    let dist = dx.hypot(dy);
    if dist.is_zero() {
        return stationary_policy();
    }
    let mut theta = dy.atan2(dx);
    if theta < F::zero() {
        theta = theta + F::TAU();
    }
    let u_theta = (theta / F::TAU()).min(F::one());
    let u_d = (dist.min(s.d_move_max) / s.d_move_max).min(F::one());
    RawAction::new(u_theta, u_d)
}

/// A controller instance for one episode. Holds its own generator so that
/// random actions never perturb the world's random stream.
pub struct Controller {
    kind: ControllerKind,
    rng: ChaCha8Rng,
}

impl Controller {
    pub fn new(kind: ControllerKind, seed: u64) -> Self {
        // Decorrelate from the world generator seeded with the same value.
        let rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5DEE_CE66_D1CE_4E5B);
        Self { kind, rng }
    }

    pub fn kind(&self) -> ControllerKind {
        self.kind
    }

    pub fn act<F: Scalar>(
        &mut self,
        obs: &[F],
        agent: Agent,
        config: &WorldConfig<F>,
    ) -> RawAction<F> {
        match self.kind {
            ControllerKind::Random => random_policy(&mut self.rng),
            ControllerKind::Stationary => stationary_policy(),
            ControllerKind::Greedy => greedy_policy(obs, agent, config),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::encode_observation;
    use crate::world::WorldState;

    fn lone_sensor_world(x: f64, y: f64) -> (WorldState<f64>, WorldConfig<f64>) {
        let cfg = WorldConfig::<f64>::default();
        let mut w = WorldState::reset(&cfg, 0).unwrap();
        for s in w.sensors.iter_mut() {
            s.alive = false;
            s.energy = 0.0;
        }
        w.sensors[0].alive = true;
        w.sensors[0].energy = 1.0;
        w.sensors[0].x = x;
        w.sensors[0].y = y;
        (w, cfg)
    }

    #[test]
    fn greedy_heads_east_to_lone_sensor() {
        let (w, cfg) = lone_sensor_world(29.0, 25.0);
        let a = greedy_policy(&encode_observation(&w), Agent::Aav, &cfg);
        assert_eq!(a.u_theta, 0.0);
        assert!((a.u_d - 0.4).abs() < 1e-12);
    }

    #[test]
    fn greedy_caps_distance_and_wraps_heading() {
        let (w, cfg) = lone_sensor_world(25.0, 0.0);
        let a = greedy_policy(&encode_observation(&w), Agent::Aav, &cfg);
        assert!((a.u_theta - 0.75).abs() < 1e-12);
        assert_eq!(a.u_d, 1.0);
    }

    #[test]
    fn greedy_at_target_stays() {
        let (w, cfg) = lone_sensor_world(25.0, 25.0);
        assert_eq!(
            greedy_policy(&encode_observation(&w), Agent::Aav, &cfg),
            stationary_policy()
        );
    }

    #[test]
    fn greedy_falls_back_to_global_minimum() {
        // The only alive sensor sits next to the SV, so the AAV's share is empty.
        let (w, cfg) = lone_sensor_world(75.0, 70.0);
        let a = greedy_policy(&encode_observation(&w), Agent::Aav, &cfg);
        let expected = (45.0f64).atan2(50.0) / std::f64::consts::TAU;
        assert!((a.u_theta - expected).abs() < 1e-12);
        assert_eq!(a.u_d, 1.0);
    }

    #[test]
    fn greedy_prefers_weakest_in_own_share() {
        let (mut w, cfg) = lone_sensor_world(20.0, 25.0);
        w.sensors[1].alive = true;
        w.sensors[1].energy = 0.3;
        w.sensors[1].x = 25.0;
        w.sensors[1].y = 30.0;
        w.sensors[2].alive = true;
        w.sensors[2].energy = 0.1;
        w.sensors[2].x = 80.0;
        w.sensors[2].y = 80.0;
        let a = greedy_policy(&encode_observation(&w), Agent::Aav, &cfg);
        assert!((a.u_theta - 0.25).abs() < 1e-12);
        assert!((a.u_d - 0.5).abs() < 1e-12);
        let b = greedy_policy(&encode_observation(&w), Agent::Sv, &cfg);
        assert!((b.u_theta - 0.125).abs() < 1e-12);
    }

    #[test]
    fn greedy_with_all_dead_is_stationary() {
        let (mut w, cfg) = lone_sensor_world(0.0, 0.0);
        w.sensors[0].alive = false;
        w.sensors[0].energy = 0.0;
        assert_eq!(
            greedy_policy(&encode_observation(&w), Agent::Sv, &cfg),
            stationary_policy()
        );
    }

    #[test]
    fn random_policy_is_seeded_and_centered() {
        let mut a = Controller::new(ControllerKind::Random, 9);
        let mut b = Controller::new(ControllerKind::Random, 9);
        let cfg = WorldConfig::<f64>::default();
        let obs = vec![0.0; 305];
        let mut sum = 0.0;
        let n = 100_000;
        for _ in 0..n {
            let x: RawAction<f64> = a.act(&obs, Agent::Aav, &cfg);
            let y: RawAction<f64> = b.act(&obs, Agent::Aav, &cfg);
            assert_eq!(x, y);
            assert!((0.0..=1.0).contains(&x.u_theta) && (0.0..=1.0).contains(&x.u_d));
            sum += x.u_d;
        }
        assert!((sum / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn policy_names_parse() {
        for k in ControllerKind::ALL {
            assert_eq!(k.name().parse::<ControllerKind>().unwrap(), k);
        }
        assert!("ppo".parse::<ControllerKind>().is_err());
    }
}
