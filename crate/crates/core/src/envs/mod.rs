//! The two shipped environments.
//!
//! `PointNav2d` is a double-integrator navigation task with hazard regions
//! and a speed cap. `HopperLite` is a planar single-leg hopper with a
//! spring-loaded prismatic leg, standing in for the usual Gym-style legged
//! tasks at desk scale.

pub mod hopper;
pub mod nav;

pub use hopper::{hopper_step, HopperConfig, HopperLite, HopperMorphology, HopperState};
pub use nav::{nav_step, NavConfig, NavState, PointNav2d};

use serde::{Deserialize, Serialize};

use crate::Real;

/// Weights of the task reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskRewardWeights {
    /// Cap on the rewarded forward velocity (`+inf` disables the cap).
    pub v_max: Real,
    pub w_vel: Real,
    pub w_action: Real,
    pub w_knee: Real,
    pub w_hip: Real,
    pub w_dev: Real,
}

impl Default for TaskRewardWeights {
    fn default() -> Self {
        Self {
            v_max: Real::INFINITY,
            w_vel: 1.0,
            w_action: 0.0,
            w_knee: 0.0,
            w_hip: 0.0,
            w_dev: 0.0,
        }
    }
}

impl TaskRewardWeights {
    pub fn validate(&self) -> crate::Result<()> {
        let weights = [
            ("w_vel", self.w_vel),
            ("w_action", self.w_action),
            ("w_knee", self.w_knee),
            ("w_hip", self.w_hip),
            ("w_dev", self.w_dev),
        ];
        for (name, w) in weights {
            if !(w >= 0.0) {
                return Err(crate::CoreError::Config(format!(
                    "reward weight {name} must be >= 0, got {w}"
                )));
            }
        }
        if !(self.v_max > 0.0) {
            return Err(crate::CoreError::Config(format!(
                "v_max must be > 0 or +inf, got {}",
                self.v_max
            )));
        }
        Ok(())
    }
}

/// State-derived quantities consumed by [`task_reward`].
#[derive(Debug, Clone, Copy, Default)]
pub struct RewardInputs {
    pub forward_velocity: Real,
    pub knee_at_limit: bool,
    pub hip_angle: Real,
    pub lateral_deviation: Real,
}

/// Task reward: `1 + w_vel*min(xdot, v_max) - w_action*|a|^2
/// - w_knee*[knee at limit] - w_hip*|q_hip| - w_dev*|y|`.
/// Terms with zero weight are skipped.
pub fn task_reward(inputs: &RewardInputs, action: &[Real], w: &TaskRewardWeights) -> Real {
    let mut r = 1.0;
    if w.w_vel != 0.0 {
        r += w.w_vel * inputs.forward_velocity.min(w.v_max);
    }
    if w.w_action != 0.0 {
        r -= w.w_action * action.iter().map(|a| a * a).sum::<Real>();
    }
    if w.w_knee != 0.0 && inputs.knee_at_limit {
        r -= w.w_knee;
    }
    if w.w_hip != 0.0 {
        r -= w.w_hip * inputs.hip_angle.abs();
    }
    if w.w_dev != 0.0 {
        r -= w.w_dev * inputs.lateral_deviation.abs();
    }
    r
}

/// Optional per-step action post-processor limiting the change of each
/// action dimension between consecutive steps. Disabled (`None`) by default.
pub fn limit_action_delta(prev: &[Real], action: &mut [Real], max_delta: Option<Real>) {
    if let Some(delta) = max_delta {
        for (a, p) in action.iter_mut().zip(prev.iter()) {
            *a = a.clamp(p - delta, p + delta);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alive_term_only_at_rest() {
        let w = TaskRewardWeights {
            w_vel: 1.0,
            w_action: 0.03,
            w_knee: 0.5,
            ..Default::default()
        };
        let r = task_reward(&RewardInputs::default(), &[0.0, 0.0], &w);
        assert_eq!(r, 1.0);
    }

    #[test]
    fn velocity_term_adds_linearly() {
        let w = TaskRewardWeights { w_vel: 1.0, ..Default::default() };
        let inputs = RewardInputs { forward_velocity: 2.0, ..Default::default() };
        assert_eq!(task_reward(&inputs, &[], &w), 3.0);
    }

    #[test]
    fn velocity_cap_binds() {
        // v_max 2.5, w_vel 3: reward = 1 + 3 * 2.5 = 8.5 at xdot = 5.
        let w = TaskRewardWeights { v_max: 2.5, w_vel: 3.0, ..Default::default() };
        let inputs = RewardInputs { forward_velocity: 5.0, ..Default::default() };
        assert_eq!(task_reward(&inputs, &[], &w), 8.5);
    }

    #[test]
    fn all_zero_weights_give_alive_only() {
        let w = TaskRewardWeights {
            v_max: Real::INFINITY,
            w_vel: 0.0,
            w_action: 0.0,
            w_knee: 0.0,
            w_hip: 0.0,
            w_dev: 0.0,
        };
        let inputs = RewardInputs {
            forward_velocity: -3.0,
            knee_at_limit: true,
            hip_angle: 2.0,
            lateral_deviation: -5.0,
        };
        assert_eq!(task_reward(&inputs, &[9.0, -9.0], &w), 1.0);
    }

    #[test]
    fn action_delta_limiter() {
        let mut a = vec![0.5, -0.5];
        limit_action_delta(&[0.0, 0.0], &mut a, Some(0.2));
        assert_eq!(a, vec![0.2, -0.2]);
        let mut b = vec![0.5, -0.5];
        limit_action_delta(&[0.0, 0.0], &mut b, None);
        assert_eq!(b, vec![0.5, -0.5]);
    }
}
