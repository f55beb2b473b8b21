//! Markov-game state and the per-slot dynamics.
//!
//! A slot runs four phases in a fixed order: sensing (consumption and
//! deaths), movement of both chargers, charging, then objective and reward
//! accounting. Deaths are permanent for the episode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::agent::{Agent, PerAgent};
use crate::config::WorldConfig;
use crate::error::{Error, Result};
use crate::physics::{ChargingParams, MotionModel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorNode<F> {
    pub id: usize,
    pub x: F,
    pub y: F,
    /// Stored energy, joules. Always 0 once dead.
    pub energy: F,
    pub alive: bool,
    /// Sensing consumption drawn in the most recent slot.
    pub last_draw: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargerState<F> {
    pub kind: Agent,
    pub x: F,
    pub y: F,
    /// Constant within an episode; 0 for the ground vehicle.
    pub altitude: F,
    /// Joules. Clamped to 0 at the end of the slot that exhausts it.
    pub battery: F,
    pub initial_battery: F,
    /// Everything drawn since reset, including any overshoot past empty.
    pub energy_spent: F,
    pub cruise_speed: F,
    pub charging: ChargingParams<F>,
    pub power_model: MotionModel<F>,
    pub dist_travelled_slot: F,
    pub motion_energy_slot: F,
    pub transmit_energy_slot: F,
}

impl<F: Scalar> ChargerState<F> {
    pub fn is_powered(&self) -> bool {
        self.battery > F::zero()
    }

    /// Draws from the battery. The level is recomputed from the running
    /// total so rounding does not accumulate at the battery's magnitude.
    fn draw(&mut self, joules: F) {
        self.energy_spent = self.energy_spent + joules;
        self.battery = self.initial_battery - self.energy_spent;
    }

    /// Energy to travel `distance` meters at cruise speed.
    pub fn motion_energy(&self, distance: F) -> Result<F> {
        if distance.is_zero() {
            return Ok(F::zero());
        }
        let power = self.power_model.power(self.cruise_speed)?;
        Ok(power * (distance / self.cruise_speed))
    }

    /// Euclidean distance to a ground point, including altitude.
    pub fn distance_to(&self, x: F, y: F) -> F {
        let dx = self.x - x;
        let dy = self.y - y;
        (dx * dx + dy * dy + self.altitude * self.altitude).sqrt()
    }
}

/// A decoded per-agent command: heading in radians and travel distance in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Move<F> {
    pub theta: F,
    pub distance: F,
}

impl<F: Scalar> Move<F> {
    pub fn new(theta: F, distance: F) -> Self {
        Self { theta, distance }
    }

    pub fn stay() -> Self {
        Self::new(F::zero(), F::zero())
    }
}

/// Objectives and rewards of one slot.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SlotMetrics<F> {
    /// Slot index these metrics belong to (the value of `t` before the step).
    pub t: usize,
    /// Sum of received power over charged sensors, watts.
    pub f1: PerAgent<F>,
    /// Distance actually travelled, meters.
    pub f2: PerAgent<F>,
    /// Fraction of dead sensors after the slot.
    pub f3: F,
    pub rewards: PerAgent<F>,
    pub alive_count: usize,
    pub deaths: usize,
    pub battery: PerAgent<F>,
    pub motion_energy: PerAgent<F>,
    pub transmit_energy: PerAgent<F>,
}

/// Result of [`WorldState::step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<F> {
    pub metrics: SlotMetrics<F>,
    pub done: bool,
}

#[derive(Debug, Clone)]
pub struct WorldState<F> {
    pub config: WorldConfig<F>,
    pub t: usize,
    pub sensors: Vec<SensorNode<F>>,
    pub chargers: PerAgent<ChargerState<F>>,
    pub last_metrics: SlotMetrics<F>,
    rng: ChaCha8Rng,
    done: bool,
}

impl<F: Scalar> WorldState<F> {
    /// Places sensors uniformly at random from `seed` and puts both chargers
    /// at their spawn points with full batteries.
    pub fn reset(config: &WorldConfig<F>, seed: u64) -> Result<Self> {
        config.validate()?;
        let s = &config.scenario;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [frac_lo, frac_hi] = s.initial_energy_range;
        let sensors = (0..s.n_sensors)
            .map(|id| {
                let x = rng.random_range(F::zero()..=s.x_max);
                let y = rng.random_range(F::zero()..=s.y_max);
                let energy = rng.random_range(frac_lo * s.e_max..=frac_hi * s.e_max);
                SensorNode {
                    id,
                    x,
                    y,
                    energy,
                    alive: true,
                    last_draw: F::zero(),
                }
            })
            .collect();

        let aav = &config.chargers.aav;
        let sv = &config.chargers.sv;
        let chargers = PerAgent::new(
            ChargerState {
                kind: Agent::Aav,
                x: aav.spawn[0],
                y: aav.spawn[1],
                altitude: aav.altitude,
                battery: aav.initial_battery,
                initial_battery: aav.initial_battery,
                energy_spent: F::zero(),
                cruise_speed: aav.cruise_speed,
                charging: aav.charging,
                power_model: MotionModel::Aerial(aav.power),
                dist_travelled_slot: F::zero(),
                motion_energy_slot: F::zero(),
                transmit_energy_slot: F::zero(),
            },
            ChargerState {
                kind: Agent::Sv,
                x: sv.spawn[0],
                y: sv.spawn[1],
                altitude: F::zero(),
                battery: sv.initial_battery,
                initial_battery: sv.initial_battery,
                energy_spent: F::zero(),
                cruise_speed: sv.cruise_speed,
                charging: sv.charging,
                power_model: MotionModel::Ground(sv.power),
                dist_travelled_slot: F::zero(),
                motion_energy_slot: F::zero(),
                transmit_energy_slot: F::zero(),
            },
        );

        let mut world = Self {
            config: config.clone(),
            t: 0,
            sensors,
            chargers,
            last_metrics: SlotMetrics::default(),
            rng,
            done: false,
        };
        world.last_metrics = SlotMetrics {
            alive_count: world.alive_count(),
            battery: world.chargers.map(|_, c| c.battery),
            ..SlotMetrics::default()
        };
        Ok(world)
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn alive_count(&self) -> usize {
        self.sensors.iter().filter(|s| s.alive).count()
    }

    /// Fraction of sensors that are dead.
    pub fn mortality(&self) -> F {
        let n = self.sensors.len();
        let dead = n - self.alive_count();
        F::from_usize(dead).unwrap() / F::from_usize(n).unwrap()
    }

    /// Each alive sensor pays a fresh uniform sensing cost; sensors that hit
    /// zero die. Returns the ids of sensors that died in this phase.
    pub fn sense_phase(&mut self) -> Vec<usize> {
        let [lo, hi] = self.config.scenario.consumption_range;
        let mut died = Vec::new();
        for sensor in self.sensors.iter_mut() {
            if !sensor.alive {
                sensor.last_draw = F::zero();
                continue;
            }
            let draw = self.rng.random_range(lo..=hi);
            sensor.last_draw = draw;
            sensor.energy = sensor.energy - draw;
            if sensor.energy <= F::zero() {
                sensor.energy = F::zero();
                sensor.alive = false;
                died.push(sensor.id);
            }
        }
        died
    }

    /// Checks a command against the action bounds.
    pub fn check_move(&self, mv: Move<F>) -> Result<()> {
        let tau = F::TAU();
        let d_max = self.config.scenario.d_move_max;
        if !(mv.theta.is_finite() && mv.theta >= F::zero() && mv.theta <= tau) {
            return Err(Error::Protocol(format!(
                "heading {} outside [0, 2pi]",
                mv.theta
            )));
        }
        if !(mv.distance.is_finite() && mv.distance >= F::zero() && mv.distance <= d_max) {
            return Err(Error::Protocol(format!(
                "travel distance {} outside [0, {d_max}]",
                mv.distance
            )));
        }
        Ok(())
    }

    /// Moves one charger, clamping the target to the area. Returns the
    /// distance actually travelled and charges the motion energy for it.
    /// A charger with an empty battery stays put.
    pub fn apply_action(&mut self, agent: Agent, mv: Move<F>) -> Result<F> {
        self.check_move(mv)?;
        let (x_max, y_max) = (self.config.scenario.x_max, self.config.scenario.y_max);
        let charger = &mut self.chargers[agent];
        charger.dist_travelled_slot = F::zero();
        charger.motion_energy_slot = F::zero();
        if !charger.is_powered() {
            return Ok(F::zero());
        }

        let tx = clamp(charger.x + mv.distance * mv.theta.cos(), x_max);
        let ty = clamp(charger.y + mv.distance * mv.theta.sin(), y_max);
        let travelled = (tx - charger.x).hypot(ty - charger.y);
        let energy = charger.motion_energy(travelled)?;
        charger.x = tx;
        charger.y = ty;
        charger.draw(energy);
        charger.dist_travelled_slot = travelled;
        charger.motion_energy_slot = energy;
        Ok(travelled)
    }

    /// Powered chargers radiate for one charging period. Returns the summed
    /// received power per charger over alive sensors at or above the
    /// reception threshold.
    pub fn charge_phase(&mut self) -> PerAgent<F> {
        let tau = self.config.scenario.slot_charge_duration;
        let e_max = self.config.scenario.e_max;
        let mut f1 = PerAgent::new(F::zero(), F::zero());
        for agent in Agent::ALL {
            let charger = &mut self.chargers[agent];
            charger.transmit_energy_slot = F::zero();
            if !charger.is_powered() {
                continue;
            }
            let params = charger.charging;
            let mut delivered = F::zero();
            for sensor in self.sensors.iter_mut().filter(|s| s.alive) {
                let d = charger.distance_to(sensor.x, sensor.y);
                let p = params
                    .received_power(d)
                    .expect("distances are non-negative");
                if p > F::zero() && p >= params.rx_threshold {
                    delivered = delivered + p;
                    let room = e_max - sensor.energy;
                    sensor.energy = sensor.energy + (p * tau).min(room);
                }
            }
            let cost = params.p0 * tau;
            charger.draw(cost);
            charger.transmit_energy_slot = cost;
            f1[agent] = delivered;
        }
        f1
    }

    /// Advances one slot.
    pub fn step(&mut self, actions: PerAgent<Move<F>>) -> Result<StepOutcome<F>> {
        if self.done {
            return Err(Error::EpisodeDone);
        }
        for (_, mv) in actions.iter() {
            self.check_move(*mv)?;
        }

        let slot = self.t;
        let deaths = self.sense_phase().len();
        let mut f2 = PerAgent::new(F::zero(), F::zero());
        for agent in Agent::ALL {
            f2[agent] = self.apply_action(agent, actions[agent])?;
        }
        let f1 = self.charge_phase();
        for agent in Agent::ALL {
            let c = &mut self.chargers[agent];
            if c.battery < F::zero() {
                c.battery = F::zero();
            }
        }

        let f3 = self.mortality();
        let rewards = PerAgent::from_fn(|a| self.config.rewards[a].reward(f1[a], f2[a], f3));
        let alive_count = self.alive_count();
        self.t += 1;
        let exhausted = Agent::ALL.iter().all(|&a| !self.chargers[a].is_powered());
        self.done = self.t >= self.config.scenario.episode_len || exhausted || alive_count == 0;

        let metrics = SlotMetrics {
            t: slot,
            f1,
            f2,
            f3,
            rewards,
            alive_count,
            deaths,
            battery: self.chargers.map(|_, c| c.battery),
            motion_energy: self.chargers.map(|_, c| c.motion_energy_slot),
            transmit_energy: self.chargers.map(|_, c| c.transmit_energy_slot),
        };
        self.last_metrics = metrics.clone();
        Ok(StepOutcome {
            metrics,
            done: self.done,
        })
    }
}

fn clamp<F: Scalar>(v: F, hi: F) -> F {
    v.max(F::zero()).min(hi)
}
