//! Safe-state set: inequality constraints on height, orientation, contacts,
//! hazard regions, and speed.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::Real;

/// Body identifiers used by the contact whitelist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Body {
    Foot,
    Leg,
    Torso,
}

/// Axis-aligned rectangle, closed on all sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: [Real; 2],
    pub max: [Real; 2],
}

impl Rect {
    pub fn contains(&self, p: [Real; 2]) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }
}

/// Inequality constraints defining the safe state set.
///
/// Legged environments use the height/orientation/contact constraints;
/// navigation environments use hazard regions and the speed cap. Unused
/// bounds are `+inf`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SafetySpec {
    /// Base height lower bound.
    pub h_min: Real,
    pub pitch_max: Real,
    /// Unused in planar environments (`+inf`).
    pub roll_max: Real,
    /// Unused in planar environments (`+inf`).
    pub yaw_max: Real,
    /// Bodies allowed to touch the ground.
    #[serde(default)]
    pub allowed_contact_bodies: Vec<Body>,
    /// Forbidden regions (navigation environments).
    #[serde(default)]
    pub hazard_regions: Vec<Rect>,
    /// Speed cap (navigation environments, `+inf` elsewhere).
    pub speed_max: Real,
}

impl SafetySpec {
    /// Spec with every constraint disabled.
    pub fn unconstrained() -> Self {
        Self {
            h_min: 0.0,
            pitch_max: Real::INFINITY,
            roll_max: Real::INFINITY,
            yaw_max: Real::INFINITY,
            allowed_contact_bodies: vec![Body::Foot, Body::Leg, Body::Torso],
            hazard_regions: Vec::new(),
            speed_max: Real::INFINITY,
        }
    }

    /// Validate invariants. `legged` environments must whitelist at least
    /// one contact body.
    pub fn validate(&self, legged: bool) -> Result<()> {
        let bounds = [
            ("pitch_max", self.pitch_max),
            ("roll_max", self.roll_max),
            ("yaw_max", self.yaw_max),
            ("speed_max", self.speed_max),
        ];
        for (name, b) in bounds {
            if !(b > 0.0) {
                return Err(CoreError::Config(format!(
                    "safety bound {name} must be strictly positive or +inf, got {b}"
                )));
            }
        }
        if self.h_min.is_nan() {
            return Err(CoreError::Config("h_min must not be NaN".into()));
        }
        if legged && self.allowed_contact_bodies.is_empty() {
            return Err(CoreError::Config(
                "legged environments need a nonempty contact whitelist".into(),
            ));
        }
        for (i, r) in self.hazard_regions.iter().enumerate() {
            if r.min[0] > r.max[0] || r.min[1] > r.max[1] {
                return Err(CoreError::Config(format!("hazard region {i} has min > max")));
            }
        }
        Ok(())
    }
}

/// The slice of an environment state that safety checking consumes.
#[derive(Debug, Clone)]
pub struct SafetyState {
    pub height: Real,
    pub pitch: Real,
    pub roll: Real,
    pub yaw: Real,
    pub contacts: Vec<Body>,
    pub position: [Real; 2],
    pub speed: Real,
}

/// True iff the state lies inside the safe set: all ground contacts are
/// whitelisted, height is at least `h_min`, orientation magnitudes are within
/// bounds, the position is outside every hazard region, and speed is at most
/// `speed_max`.
pub fn check_safe(state: &SafetyState, spec: &SafetySpec) -> Result<bool> {
    let scalars = [
        state.height,
        state.pitch,
        state.roll,
        state.yaw,
        state.position[0],
        state.position[1],
        state.speed,
    ];
    if scalars.iter().any(|v| v.is_nan()) {
        return Err(CoreError::Contract(format!(
            "malformed safety state (NaN component): {state:?}"
        )));
    }
    if state
        .contacts
        .iter()
        .any(|b| !spec.allowed_contact_bodies.contains(b))
    {
        return Ok(false);
    }
    if state.height < spec.h_min {
        return Ok(false);
    }
    if state.pitch.abs() > spec.pitch_max
        || state.roll.abs() > spec.roll_max
        || state.yaw.abs() > spec.yaw_max
    {
        return Ok(false);
    }
    if spec.hazard_regions.iter().any(|r| r.contains(state.position)) {
        return Ok(false);
    }
    if state.speed > spec.speed_max {
        return Ok(false);
    }
    Ok(true)
}
