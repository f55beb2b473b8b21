//! Seeded multi-episode runs under a scripted controller, with metrics and
//! trajectory CSV export.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::agent::{Agent, PerAgent};
use crate::baselines::{Controller, ControllerKind};
use crate::error::Result;
use crate::protocol::{decode_action, encode_observation};
use crate::{Move, Real, WorldConfig, WorldState};

pub const METRICS_HEADER: &str =
    "episode,seed,agent,final_mortality,mean_reward,total_f1_j,total_distance_m,slots,slots_powered,remaining_battery_j";

pub const TRAJECTORY_HEADER: &str = "episode,t,entity_id,kind,x,y,z,energy_or_battery,alive";

/// Per-agent outcome of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSummary {
    pub mean_reward: Real,
    /// Received power summed over slots, times the charging period.
    pub total_f1_j: Real,
    pub total_distance_m: Real,
    /// Slots that ended with the charger still powered.
    pub slots_powered: usize,
    pub remaining_battery_j: Real,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSummary {
    pub episode: usize,
    pub seed: u64,
    pub final_mortality: Real,
    /// Slots executed before the episode ended.
    pub slots: usize,
    pub agents: PerAgent<AgentSummary>,
    /// Mortality after every slot, in order.
    pub mortality_curve: Vec<Real>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: Real,
    pub std: Real,
}

impl Stat {
    /// Mean and sample standard deviation (0 for a single value).
    pub fn of(values: &[Real]) -> Self {
        let n = values.len() as Real;
        let mean = values.iter().sum::<Real>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<Real>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentAggregate {
    pub final_mortality: Stat,
    pub mean_reward: Stat,
    pub total_f1_j: Stat,
    pub total_distance_m: Stat,
    pub slots: Stat,
    pub slots_powered: Stat,
    pub remaining_battery_j: Stat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub policy: ControllerKind,
    pub episodes: Vec<EpisodeSummary>,
}

impl RunReport {
    pub fn aggregate(&self, agent: Agent) -> AgentAggregate {
        let col = |f: &dyn Fn(&EpisodeSummary) -> Real| -> Stat {
            Stat::of(&self.episodes.iter().map(f).collect::<Vec<_>>())
        };
        AgentAggregate {
            final_mortality: col(&|e| e.final_mortality),
            mean_reward: col(&|e| e.agents[agent].mean_reward),
            total_f1_j: col(&|e| e.agents[agent].total_f1_j),
            total_distance_m: col(&|e| e.agents[agent].total_distance_m),
            slots: col(&|e| e.slots as Real),
            slots_powered: col(&|e| e.agents[agent].slots_powered as Real),
            remaining_battery_j: col(&|e| e.agents[agent].remaining_battery_j),
        }
    }

    pub fn mean_final_mortality(&self) -> Real {
        self.aggregate(Agent::Aav).final_mortality.mean
    }

    /// One row per episode per agent, then `mean` and `std` rows per agent.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{METRICS_HEADER}").unwrap();
        for e in &self.episodes {
            for (agent, a) in e.agents.iter() {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    e.episode,
                    e.seed,
                    agent,
                    sig9(e.final_mortality),
                    sig9(a.mean_reward),
                    sig9(a.total_f1_j),
                    sig9(a.total_distance_m),
                    e.slots,
                    a.slots_powered,
                    sig9(a.remaining_battery_j),
                )
                .unwrap();
            }
        }
        for (label, pick) in [("mean", true), ("std", false)] {
            for agent in Agent::ALL {
                let g = self.aggregate(agent);
                let v = |s: Stat| sig9(if pick { s.mean } else { s.std });
                writeln!(
                    out,
                    "{label},,{agent},{},{},{},{},{},{},{}",
                    v(g.final_mortality),
                    v(g.mean_reward),
                    v(g.total_f1_j),
                    v(g.total_distance_m),
                    v(g.slots),
                    v(g.slots_powered),
                    v(g.remaining_battery_j),
                )
                .unwrap();
            }
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "policy {} over {} episode(s)",
            self.policy,
            self.episodes.len()
        )
        .unwrap();
        writeln!(
            out,
            "final mortality: {} +/- {}",
            sig9(self.aggregate(Agent::Aav).final_mortality.mean),
            sig9(self.aggregate(Agent::Aav).final_mortality.std)
        )
        .unwrap();
        for agent in Agent::ALL {
            let g = self.aggregate(agent);
            writeln!(
                out,
                "{agent}: mean reward {} +/- {}, f1 {} J, distance {} m, battery left {} J",
                sig9(g.mean_reward.mean),
                sig9(g.mean_reward.std),
                sig9(g.total_f1_j.mean),
                sig9(g.total_distance_m.mean),
                sig9(g.remaining_battery_j.mean),
            )
            .unwrap();
        }
        out
    }
}

/// Runs one episode. When `trajectory` is given, appends one CSV row per
/// entity for the initial state and after every slot.
pub fn run_episode(
    config: &WorldConfig,
    policy: ControllerKind,
    episode: usize,
    seed: u64,
    mut trajectory: Option<&mut String>,
) -> Result<EpisodeSummary> {
    let mut world = WorldState::reset(config, seed)?;
    let mut controller = Controller::new(policy, seed);
    let tau = config.scenario.slot_charge_duration;

    let mut reward_sum = PerAgent::new(0.0, 0.0);
    let mut f1_sum = PerAgent::new(0.0, 0.0);
    let mut dist_sum = PerAgent::new(0.0, 0.0);
    let mut powered = PerAgent::new(0usize, 0usize);
    let mut mortality_curve = Vec::with_capacity(config.scenario.episode_len);

    if let Some(buf) = trajectory.as_deref_mut() {
        write_snapshot(buf, episode, &world);
    }
    while !world.is_done() {
        let obs = encode_observation(&world);
        let mut moves = PerAgent::new(Move::stay(), Move::stay());
        for agent in Agent::ALL {
            let raw = controller.act(&obs, agent, config);
            moves[agent] = decode_action(raw, config)?;
        }
        let outcome = world.step(moves)?;
        let m = &outcome.metrics;
        for agent in Agent::ALL {
            reward_sum[agent] += m.rewards[agent];
            f1_sum[agent] += m.f1[agent] * tau;
            dist_sum[agent] += m.f2[agent];
            if m.battery[agent] > 0.0 {
                powered[agent] += 1;
            }
        }
        mortality_curve.push(m.f3);
        if let Some(buf) = trajectory.as_deref_mut() {
            write_snapshot(buf, episode, &world);
        }
    }

    let slots = world.t;
    Ok(EpisodeSummary {
        episode,
        seed,
        final_mortality: world.mortality(),
        slots,
        agents: PerAgent::from_fn(|a| AgentSummary {
            mean_reward: reward_sum[a] / slots as Real,
            total_f1_j: f1_sum[a],
            total_distance_m: dist_sum[a],
            slots_powered: powered[a],
            remaining_battery_j: world.chargers[a].battery,
        }),
        mortality_curve,
    })
}

/// Runs `episodes` episodes in parallel; episode `e` uses seed `seed + e`.
/// Output order follows the episode index.
pub fn run(
    config: &WorldConfig,
    policy: ControllerKind,
    episodes: usize,
    seed: u64,
    with_trajectory: bool,
) -> Result<(RunReport, Option<String>)> {
    let results: Vec<(EpisodeSummary, String)> = (0..episodes)
        .into_par_iter()
        .map(|e| {
            let mut traj = String::new();
            let sink = with_trajectory.then_some(&mut traj);
            run_episode(config, policy, e, seed.wrapping_add(e as u64), sink).map(|s| (s, traj))
        })
        .collect::<Result<_>>()?;

    let trajectory = with_trajectory.then(|| {
        let mut out = format!("{TRAJECTORY_HEADER}\n");
        for (_, t) in &results {
            out.push_str(t);
        }
        out
    });
    let report = RunReport {
        policy,
        episodes: results.into_iter().map(|(s, _)| s).collect(),
    };
    Ok((report, trajectory))
}

fn write_snapshot(buf: &mut String, episode: usize, world: &WorldState) {
    let t = world.t;
    for s in &world.sensors {
        writeln!(
            buf,
            "{episode},{t},{},sensor,{},{},0,{},{}",
            s.id,
            sig9(s.x),
            sig9(s.y),
            sig9(s.energy),
            u8::from(s.alive)
        )
        .unwrap();
    }
    let n = world.sensors.len();
    for (offset, agent) in Agent::ALL.into_iter().enumerate() {
        let c = &world.chargers[agent];
        writeln!(
            buf,
            "{episode},{t},{},{agent},{},{},{},{},{}",
            n + offset,
            sig9(c.x),
            sig9(c.y),
            sig9(c.altitude),
            sig9(c.battery),
            u8::from(c.is_powered())
        )
        .unwrap();
    }
}

/// Formats with 9 significant digits, `%g` style.
pub fn sig9(x: Real) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
