//! Scenario configuration: TOML document, defaults, environment overrides and
//! validation.
//!
//! A user document is merged key by key over the default document, so any
//! subset of keys may be given. Keys that do not exist in the default
//! document produce warnings, except below `[trainer]`, which is carried
//! through untouched for external training tools.
//!
//! Environment variables named `WRSN_<SECTION>__<KEY>` override single keys,
//! for example `WRSN_SCENARIO__N_SENSORS=20` or
//! `WRSN_CHARGERS__AAV__SPAWN=[10,10]`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::agent::PerAgent;
use crate::error::{ConfigIssue, Error, Result};
use crate::physics::{non_negative, positive, AavPowerParams, ChargingParams, SvPowerParams};
use crate::scalar::Scalar;

/// Prefix of environment variables that override config keys.
pub const ENV_PREFIX: &str = "WRSN_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig<F> {
    /// Area extent along x, meters.
    pub x_max: F,
    /// Area extent along y, meters.
    pub y_max: F,
    pub n_sensors: usize,
    /// Sensor battery capacity, joules.
    pub e_max: F,
    /// Per-slot sensing consumption is drawn uniformly from this range, joules.
    pub consumption_range: [F; 2],
    /// Initial sensor energy is drawn uniformly from this range, as fractions of `e_max`.
    pub initial_energy_range: [F; 2],
    /// Length of the charging phase, seconds.
    pub slot_charge_duration: F,
    /// Largest distance a charger may be commanded to travel in one slot, meters.
    pub d_move_max: F,
    /// Slots per episode.
    pub episode_len: usize,
    pub seed: u64,
}

impl<F: Scalar> Default for ScenarioConfig<F> {
    fn default() -> Self {
        Self {
            x_max: F::lit(100.0),
            y_max: F::lit(100.0),
            n_sensors: 100,
            e_max: F::lit(2.0),
            consumption_range: [F::lit(0.025), F::lit(0.04)],
            initial_energy_range: [F::lit(0.5), F::lit(1.0)],
            slot_charge_duration: F::one(),
            d_move_max: F::lit(10.0),
            episode_len: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AavConfig<F> {
    pub spawn: [F; 2],
    /// Flight altitude, fixed for the episode.
    pub altitude: F,
    pub cruise_speed: F,
    /// Joules.
    pub initial_battery: F,
    pub charging: ChargingParams<F>,
    pub power: AavPowerParams<F>,
}

impl<F: Scalar> Default for AavConfig<F> {
    fn default() -> Self {
        Self {
            spawn: [F::lit(25.0), F::lit(25.0)],
            altitude: F::lit(3.0),
            cruise_speed: F::lit(5.0),
            initial_battery: F::lit(150_000.0),
            charging: ChargingParams::default(),
            power: AavPowerParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvConfig<F> {
    pub spawn: [F; 2],
    pub cruise_speed: F,
    /// Joules.
    pub initial_battery: F,
    pub charging: ChargingParams<F>,
    pub power: SvPowerParams<F>,
}

impl<F: Scalar> Default for SvConfig<F> {
    fn default() -> Self {
        Self {
            spawn: [F::lit(75.0), F::lit(75.0)],
            cruise_speed: F::lit(2.0),
            initial_battery: F::lit(300_000.0),
            charging: ChargingParams::default(),
            power: SvPowerParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargersConfig<F> {
    pub aav: AavConfig<F>,
    pub sv: SvConfig<F>,
}

impl<F: Scalar> Default for ChargersConfig<F> {
    fn default() -> Self {
        Self {
            aav: AavConfig::default(),
            sv: SvConfig::default(),
        }
    }
}

/// Weights of `r = l1 * f1 - l2 * f2 - l3 * f3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights<F> {
    pub lambda1: F,
    pub lambda2: F,
    pub lambda3: F,
}

impl<F: Scalar> RewardWeights<F> {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Self {
        Self {
            lambda1: F::lit(lambda1),
            lambda2: F::lit(lambda2),
            lambda3: F::lit(lambda3),
        }
    }

    pub fn reward(&self, f1: F, f2: F, f3: F) -> F {
        self.lambda1 * f1 - self.lambda2 * f2 - self.lambda3 * f3
    }
}

/// Full scenario description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldConfig<F> {
    pub scenario: ScenarioConfig<F>,
    pub chargers: ChargersConfig<F>,
    pub rewards: PerAgent<RewardWeights<F>>,
    /// Opaque settings for external trainers.
    #[serde(default)]
    pub trainer: Table,
}

impl<F: Scalar> Default for WorldConfig<F> {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            chargers: ChargersConfig::default(),
            rewards: PerAgent::new(
                RewardWeights::new(1.0, 0.02, 2.0),
                RewardWeights::new(1.0, 0.04, 1.0),
            ),
            trainer: Table::new(),
        }
    }
}

impl<F: Scalar> WorldConfig<F> {
    /// Checks every invariant and returns all violations.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let s = &self.scenario;
        positive("scenario", "x_max", s.x_max, &mut out);
        positive("scenario", "y_max", s.y_max, &mut out);
        if s.n_sensors == 0 {
            out.push(ConfigIssue::new("scenario.n_sensors", "must be at least 1"));
        }
        positive("scenario", "e_max", s.e_max, &mut out);
        let [lo, hi] = s.consumption_range;
        positive("scenario", "consumption_range[0]", lo, &mut out);
        positive("scenario", "consumption_range[1]", hi, &mut out);
        if lo > hi {
            out.push(ConfigIssue::new(
                "scenario.consumption_range",
                format!("lower bound {lo} exceeds upper bound {hi}"),
            ));
        }
        let [lo, hi] = s.initial_energy_range;
        positive("scenario", "initial_energy_range[0]", lo, &mut out);
        if !(lo <= hi && hi <= F::one()) {
            out.push(ConfigIssue::new(
                "scenario.initial_energy_range",
                format!("need 0 < lo <= hi <= 1, got [{lo}, {hi}]"),
            ));
        }
        positive(
            "scenario",
            "slot_charge_duration",
            s.slot_charge_duration,
            &mut out,
        );
        positive("scenario", "d_move_max", s.d_move_max, &mut out);
        let diag = s.x_max.hypot(s.y_max);
        if s.d_move_max > diag {
            out.push(ConfigIssue::new(
                "scenario.d_move_max",
                format!("exceeds the area diagonal {diag}"),
            ));
        }
        if s.episode_len == 0 {
            out.push(ConfigIssue::new(
                "scenario.episode_len",
                "must be at least 1",
            ));
        }

        let aav = &self.chargers.aav;
        self.check_spawn("chargers.aav.spawn", aav.spawn, &mut out);
        non_negative("chargers.aav", "altitude", aav.altitude, &mut out);
        if aav.altitude >= aav.charging.d_max {
            out.push(ConfigIssue::new(
                "chargers.aav.altitude",
                format!(
                    "must be below the charging radius {} or the AAV can never charge",
                    aav.charging.d_max
                ),
            ));
        }
        positive("chargers.aav", "cruise_speed", aav.cruise_speed, &mut out);
        positive(
            "chargers.aav",
            "initial_battery",
            aav.initial_battery,
            &mut out,
        );
        aav.charging.validate("chargers.aav.charging", &mut out);
        aav.power.validate("chargers.aav.power", &mut out);

        let sv = &self.chargers.sv;
        self.check_spawn("chargers.sv.spawn", sv.spawn, &mut out);
        positive("chargers.sv", "cruise_speed", sv.cruise_speed, &mut out);
        positive(
            "chargers.sv",
            "initial_battery",
            sv.initial_battery,
            &mut out,
        );
        sv.charging.validate("chargers.sv.charging", &mut out);
        sv.power.validate("chargers.sv.power", &mut out);

        for (agent, w) in self.rewards.iter() {
            let prefix = format!("rewards.{agent}");
            non_negative(&prefix, "lambda1", w.lambda1, &mut out);
            non_negative(&prefix, "lambda2", w.lambda2, &mut out);
            non_negative(&prefix, "lambda3", w.lambda3, &mut out);
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    fn check_spawn(&self, key: &str, [x, y]: [F; 2], out: &mut Vec<ConfigIssue>) {
        let s = &self.scenario;
        let inside = |v: F, hi: F| v.is_finite() && v >= F::zero() && v <= hi;
        if !(inside(x, s.x_max) && inside(y, s.y_max)) {
            out.push(ConfigIssue::new(
                key,
                format!(
                    "({x}, {y}) lies outside [0, {}] x [0, {}]",
                    s.x_max, s.y_max
                ),
            ));
        }
    }

    /// Observation vector length: one triplet per sensor plus five charger entries.
    pub fn obs_dim(&self) -> usize {
        3 * self.scenario.n_sensors + 5
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }
}

/// A resolved configuration together with non-fatal findings.
#[derive(Debug, Clone)]
pub struct LoadedConfig<F> {
    pub config: WorldConfig<F>,
    pub warnings: Vec<String>,
}

/// Resolves a config from TOML text and `(name, value)` environment pairs.
pub fn resolve<F: Scalar>(
    text: &str,
    env: impl IntoIterator<Item = (String, String)>,
) -> Result<LoadedConfig<F>> {
    let user: Table = text.parse().map_err(|e: toml::de::Error| {
        Error::Config(vec![ConfigIssue::new("<document>", e.message())])
    })?;

    let mut tree = match Value::try_from(WorldConfig::<F>::default()) {
        Ok(Value::Table(t)) => t,
        _ => unreachable!("default config serializes to a table"),
    };
    let mut warnings = Vec::new();
    merge(&mut tree, user, "", &mut warnings);

    for (name, raw) in env {
        let Some(rest) = name.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let path: Vec<String> = rest.split("__").map(str::to_ascii_lowercase).collect();
        let value = parse_env_value(&raw);
        let mut patch = Table::new();
        insert_path(&mut patch, &path, value);
        merge(&mut tree, patch, "", &mut warnings);
    }

    let config: WorldConfig<F> = Value::Table(tree)
        .try_into()
        .map_err(|e: toml::de::Error| {
            Error::Config(vec![ConfigIssue::new("<document>", e.message())])
        })?;
    config.validate()?;
    Ok(LoadedConfig { config, warnings })
}

/// Reads and resolves a config file; `None` yields the defaults.
pub fn load<F: Scalar>(path: Option<&Path>) -> Result<LoadedConfig<F>> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)?,
        None => String::new(),
    };
    resolve(&text, std::env::vars())
}

fn parse_env_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn insert_path(table: &mut Table, path: &[String], value: Value) {
    match path {
        [] => {}
        [last] => {
            table.insert(last.clone(), value);
        }
        [head, rest @ ..] => {
            let child = table
                .entry(head.clone())
                .or_insert_with(|| Value::Table(Table::new()));
            if let Value::Table(t) = child {
                insert_path(t, rest, value);
            }
        }
    }
}

fn merge(base: &mut Table, patch: Table, prefix: &str, warnings: &mut Vec<String>) {
    for (k, v) in patch {
        let path = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        if path == "trainer" || prefix == "trainer" || prefix.starts_with("trainer.") {
            match (base.get_mut(&k), v) {
                (Some(Value::Table(b)), Value::Table(p)) => merge(b, p, &path, warnings),
                (_, v) => {
                    base.insert(k, v);
                }
            }
            continue;
        }
        match base.get_mut(&k) {
            None => warnings.push(format!("unknown key `{path}` ignored")),
            Some(Value::Table(b)) => match v {
                Value::Table(p) => merge(b, p, &path, warnings),
                // A scalar where a section is expected; let deserialization report it.
                other => {
                    base.insert(k, other);
                }
            },
            Some(slot) => *slot = coerce_like(slot, v),
        }
    }
}

/// Integers given for float-valued keys are widened so the document stays well-typed.
fn coerce_like(existing: &Value, new: Value) -> Value {
    match (existing, new) {
        (Value::Float(_), Value::Integer(i)) => Value::Float(i as f64),
        (Value::Array(old), Value::Array(items)) => {
            let float_items = old.iter().any(|v| matches!(v, Value::Float(_)));
            Value::Array(
                items
                    .into_iter()
                    .map(|v| match v {
                        Value::Integer(i) if float_items => Value::Float(i as f64),
                        v => v,
                    })
                    .collect(),
            )
        }
        (_, v) => v,
    }
}
