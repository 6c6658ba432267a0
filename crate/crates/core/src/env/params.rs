//! Physical parameters and their domain-randomization ranges.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::Real;

/// Ground profile under the robot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Terrain {
    Flat,
    /// Constant incline; height = x * tan(angle).
    Slope { angle: Real },
    /// Upward staircase: height = rise * floor(x / run) for x > 0.
    Steps { run: Real, rise: Real },
}

impl Terrain {
    /// Ground height at horizontal position `x`.
    pub fn height(&self, x: Real) -> Real {
        match *self {
            Terrain::Flat => 0.0,
            Terrain::Slope { angle } => x * angle.tan(),
            Terrain::Steps { run, rise } => {
                if x <= 0.0 || run <= 0.0 {
                    0.0
                } else {
                    (x / run).floor() * rise
                }
            }
        }
    }
}

/// Physical parameters of an environment instance.
///
/// `latency_steps` delays actions by whole control steps; millisecond
/// latencies convert as `latency_ms / (1000 * control_dt)` rounded to the
/// nearest step (documented per environment config).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvParams {
    pub mass_scale: Real,
    pub friction: Real,
    /// Contact restitution in [0, 1]; scales down normal contact damping.
    pub restitution: Real,
    pub joint_damping: Real,
    /// Per-joint power cap on |torque * joint_velocity|; `+inf` disables it.
    pub motor_power_limit: Real,
    pub torque_limit: Real,
    pub latency_steps: usize,
    pub terrain: Terrain,
}

impl Default for EnvParams {
    fn default() -> Self {
        Self {
            mass_scale: 1.0,
            friction: 0.8,
            restitution: 0.1,
            joint_damping: 1.5,
            motor_power_limit: Real::INFINITY,
            torque_limit: Real::INFINITY,
            latency_steps: 0,
            terrain: Terrain::Flat,
        }
    }
}

impl EnvParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass_scale > 0.0) {
            return Err(CoreError::Config(format!(
                "mass_scale must be > 0, got {}",
                self.mass_scale
            )));
        }
        if !(self.friction >= 0.0) {
            return Err(CoreError::Config(format!(
                "friction must be >= 0, got {}",
                self.friction
            )));
        }
        if !(0.0..=1.0).contains(&self.restitution) {
            return Err(CoreError::Config(format!(
                "restitution must be in [0, 1], got {}",
                self.restitution
            )));
        }
        if !(self.joint_damping >= 0.0) {
            return Err(CoreError::Config(format!(
                "joint_damping must be >= 0, got {}",
                self.joint_damping
            )));
        }
        if !(self.motor_power_limit > 0.0) || !(self.torque_limit > 0.0) {
            return Err(CoreError::Config(
                "motor_power_limit and torque_limit must be positive or +inf".into(),
            ));
        }
        Ok(())
    }
}

/// Closed sampling intervals per [`EnvParams`] field. Fields left `None`
/// are held at the base value. Terrain is never randomized.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomizationRanges {
    pub mass_scale: Option<(Real, Real)>,
    pub friction: Option<(Real, Real)>,
    pub restitution: Option<(Real, Real)>,
    pub joint_damping: Option<(Real, Real)>,
    pub motor_power_limit: Option<(Real, Real)>,
    pub torque_limit: Option<(Real, Real)>,
    pub latency_steps: Option<(usize, usize)>,
}

impl RandomizationRanges {
    pub fn validate(&self) -> Result<()> {
        let scalar_entries = [
            ("mass_scale", &self.mass_scale),
            ("friction", &self.friction),
            ("restitution", &self.restitution),
            ("joint_damping", &self.joint_damping),
            ("motor_power_limit", &self.motor_power_limit),
            ("torque_limit", &self.torque_limit),
        ];
        for (name, range) in scalar_entries {
            if let Some((lo, hi)) = range {
                if !(lo <= hi) {
                    return Err(CoreError::Config(format!(
                        "range {name} has lower bound {lo} > upper bound {hi}"
                    )));
                }
            }
        }
        if let Some((lo, hi)) = self.latency_steps {
            if lo > hi {
                return Err(CoreError::Config(format!(
                    "range latency_steps has lower bound {lo} > upper bound {hi}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    /// Whether `params` lies componentwise inside every listed interval.
    pub fn contains(&self, params: &EnvParams) -> bool {
        let inside = |range: &Option<(Real, Real)>, v: Real| match range {
            Some((lo, hi)) => v >= *lo && v <= *hi,
            None => true,
        };
        inside(&self.mass_scale, params.mass_scale)
            && inside(&self.friction, params.friction)
            && inside(&self.restitution, params.restitution)
            && inside(&self.joint_damping, params.joint_damping)
            && inside(&self.motor_power_limit, params.motor_power_limit)
            && inside(&self.torque_limit, params.torque_limit)
            && match self.latency_steps {
                Some((lo, hi)) => params.latency_steps >= lo && params.latency_steps <= hi,
                None => true,
            }
    }
}

/// Draw parameters uniformly from `ranges`; fields without a range keep the
/// value from `base`. Field order is fixed, so a given rng state always
/// produces the same draw.
pub fn sample_params<R: Rng>(
    ranges: &RandomizationRanges,
    base: &EnvParams,
    rng: &mut R,
) -> EnvParams {
    let mut draw = |range: &Option<(Real, Real)>, default: Real| -> Real {
        match range {
            Some((lo, hi)) if lo < hi => rng.random_range(*lo..=*hi),
            Some((lo, _)) => *lo,
            None => default,
        }
    };
    let mass_scale = draw(&ranges.mass_scale, base.mass_scale);
    let friction = draw(&ranges.friction, base.friction);
    let restitution = draw(&ranges.restitution, base.restitution);
    let joint_damping = draw(&ranges.joint_damping, base.joint_damping);
    let motor_power_limit = draw(&ranges.motor_power_limit, base.motor_power_limit);
    let torque_limit = draw(&ranges.torque_limit, base.torque_limit);
    let latency_steps = match ranges.latency_steps {
        Some((lo, hi)) if lo < hi => rng.random_range(lo..=hi),
        Some((lo, _)) => lo,
        None => base.latency_steps,
    };
    EnvParams {
        mass_scale,
        friction,
        restitution,
        joint_damping,
        motor_power_limit,
        torque_limit,
        latency_steps,
        terrain: base.terrain,
    }
}
