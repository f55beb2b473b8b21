//! Closed-form wireless charging and motion power models.
//!
//! Everything here is a pure function of its parameters. Distances are in
//! meters, speeds in m/s, powers in watts.

use serde::{Deserialize, Serialize};

use crate::error::{ConfigIssue, Error, Result};
use crate::scalar::Scalar;

/// RF charging model with the Friis constants folded into one lumped gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargingParams<F> {
    /// Lumped gain `alpha` of `mu = alpha / (d + beta)^2`.
    pub alpha_lumped: F,
    /// Distance offset `beta` of the same expression, meters.
    pub beta_offset: F,
    /// Effective charging radius, meters. Inclusive.
    pub d_max: F,
    /// Transmit power, watts.
    pub p0: F,
    /// Minimum received power a sensor can store, watts.
    pub rx_threshold: F,
}

impl<F: Scalar> Default for ChargingParams<F> {
    fn default() -> Self {
        Self {
            alpha_lumped: F::lit(36.0),
            beta_offset: F::lit(30.0),
            d_max: F::lit(6.0),
            p0: F::lit(3.0),
            rx_threshold: F::lit(0.005),
        }
    }
}

impl<F: Scalar> ChargingParams<F> {
    pub fn validate(&self, prefix: &str, issues: &mut Vec<ConfigIssue>) {
        positive(prefix, "alpha_lumped", self.alpha_lumped, issues);
        positive(prefix, "beta_offset", self.beta_offset, issues);
        positive(prefix, "d_max", self.d_max, issues);
        positive(prefix, "p0", self.p0, issues);
        non_negative(prefix, "rx_threshold", self.rx_threshold, issues);
    }

    /// Charging efficiency `alpha / (d + beta)^2`, without the radius cutoff.
    pub fn efficiency(&self, d: F) -> Result<F> {
        check_non_negative("distance", d)?;
        let shifted = d + self.beta_offset;
        Ok(self.alpha_lumped / (shifted * shifted))
    }

    /// Power harvested at distance `d`; exactly zero beyond `d_max`.
    pub fn received_power(&self, d: F) -> Result<F> {
        if d > self.d_max {
            return Ok(F::zero());
        }
        Ok(self.p0 * self.efficiency(d)?)
    }
}

/// Rotary-wing propulsion power parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AavPowerParams<F> {
    /// Blade profile power in hover, watts.
    pub blade_power: F,
    /// Induced power in hover, watts.
    pub induced_power: F,
    /// Rotor blade tip speed, m/s.
    pub tip_speed: F,
    /// Mean rotor induced velocity in hover, m/s.
    pub induced_velocity: F,
    /// Fuselage drag ratio.
    pub drag_coeff: F,
    /// kg/m^3
    pub air_density: F,
    pub rotor_solidity: F,
    /// m^2
    pub rotor_area: F,
}

impl<F: Scalar> Default for AavPowerParams<F> {
    fn default() -> Self {
        Self {
            blade_power: F::lit(79.86),
            induced_power: F::lit(88.63),
            tip_speed: F::lit(120.0),
            induced_velocity: F::lit(4.03),
            drag_coeff: F::lit(0.6),
            air_density: F::lit(1.225),
            rotor_solidity: F::lit(0.05),
            rotor_area: F::lit(0.503),
        }
    }
}

impl<F: Scalar> AavPowerParams<F> {
    pub fn validate(&self, prefix: &str, issues: &mut Vec<ConfigIssue>) {
        positive(prefix, "blade_power", self.blade_power, issues);
        positive(prefix, "induced_power", self.induced_power, issues);
        positive(prefix, "tip_speed", self.tip_speed, issues);
        positive(prefix, "induced_velocity", self.induced_velocity, issues);
        positive(prefix, "drag_coeff", self.drag_coeff, issues);
        positive(prefix, "air_density", self.air_density, issues);
        positive(prefix, "rotor_solidity", self.rotor_solidity, issues);
        positive(prefix, "rotor_area", self.rotor_area, issues);
    }

    /// The parasite term `d0 * rho * s * A * v^3 / 2`.
    pub fn parasite_power(&self, v: F) -> F {
        F::half()
            * self.drag_coeff
            * self.air_density
            * self.rotor_solidity
            * self.rotor_area
            * v
            * v
            * v
    }

    /// Propulsion power at forward speed `v`.
    pub fn power(&self, v: F) -> Result<F> {
        check_non_negative("speed", v)?;
        let tip = self.tip_speed;
        let blade = self.blade_power * (F::one() + F::lit(3.0) * v * v / (tip * tip));

        // sqrt(1 + x^2) - x with x = v^2 / (2 v0^2), in the cancellation-free
        // form 1 / (sqrt(1 + x^2) + x). Exactly 1 at hover.
        let v0 = self.induced_velocity;
        let x = v * v / (F::two() * v0 * v0);
        let inner = F::one() / ((F::one() + x * x).sqrt() + x);
        let induced = self.induced_power * inner.sqrt();

        Ok(blade + induced + self.parasite_power(v))
    }
}

/// Ground vehicle DC motor power `k1 v^2 + k2 v + k3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvPowerParams<F> {
    pub k1: F,
    pub k2: F,
    pub k3: F,
}

impl<F: Scalar> Default for SvPowerParams<F> {
    fn default() -> Self {
        Self {
            k1: F::lit(0.3),
            k2: F::lit(0.04),
            k3: F::lit(10.0),
        }
    }
}

impl<F: Scalar> SvPowerParams<F> {
    pub fn validate(&self, prefix: &str, issues: &mut Vec<ConfigIssue>) {
        non_negative(prefix, "k1", self.k1, issues);
        non_negative(prefix, "k2", self.k2, issues);
        non_negative(prefix, "k3", self.k3, issues);
        if self.k1.is_zero() && self.k2.is_zero() && self.k3.is_zero() {
            issues.push(ConfigIssue::new(
                prefix.to_string(),
                "k1, k2 and k3 must not all be zero",
            ));
        }
    }

    pub fn power(&self, v: F) -> Result<F> {
        check_non_negative("speed", v)?;
        Ok((self.k1 * v + self.k2) * v + self.k3)
    }
}

/// Motion power model of one charger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MotionModel<F> {
    Aerial(AavPowerParams<F>),
    Ground(SvPowerParams<F>),
}

impl<F: Scalar> MotionModel<F> {
    pub fn power(&self, v: F) -> Result<F> {
        match self {
            MotionModel::Aerial(p) => p.power(v),
            MotionModel::Ground(p) => p.power(v),
        }
    }
}

/// `alpha / (d + beta)^2`.
pub fn charging_efficiency<F: Scalar>(params: &ChargingParams<F>, d: F) -> Result<F> {
    params.efficiency(d)
}

pub fn received_power<F: Scalar>(params: &ChargingParams<F>, d: F) -> Result<F> {
    params.received_power(d)
}

pub fn aav_motion_power<F: Scalar>(params: &AavPowerParams<F>, v: F) -> Result<F> {
    params.power(v)
}

pub fn sv_motion_power<F: Scalar>(params: &SvPowerParams<F>, v: F) -> Result<F> {
    params.power(v)
}

fn check_non_negative<F: Scalar>(what: &str, value: F) -> Result<()> {
    if value.is_nan() || value < F::zero() {
        return Err(Error::Domain(format!("{what} must be >= 0, got {value}")));
    }
    Ok(())
}

fn key(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

pub(crate) fn positive<F: Scalar>(prefix: &str, field: &str, v: F, issues: &mut Vec<ConfigIssue>) {
    if !(v.is_finite() && v > F::zero()) {
        issues.push(ConfigIssue::new(
            key(prefix, field),
            format!("must be > 0, got {v}"),
        ));
    }
}

pub(crate) fn non_negative<F: Scalar>(
    prefix: &str,
    field: &str,
    v: F,
    issues: &mut Vec<ConfigIssue>,
) {
    if !(v.is_finite() && v >= F::zero()) {
        issues.push(ConfigIssue::new(
            key(prefix, field),
            format!("must be >= 0, got {v}"),
        ));
    }
}
