//! Torque and power limiting.

use super::params::EnvParams;
use crate::Real;

/// Cap each joint's torque at `torque_limit` and its mechanical power
/// |torque * joint_velocity| at `motor_power_limit`.
///
/// When the power bound binds at nonzero joint speed the torque is scaled
/// continuously to `sign(t) * power_limit / |v|` instead of being zeroed,
/// so the limited dynamics stay continuous in the commanded torque.
pub fn clamp_actuation(torque: &[Real], joint_velocity: &[Real], params: &EnvParams) -> Vec<Real> {
    assert_eq!(
        torque.len(),
        joint_velocity.len(),
        "torque/velocity dimension mismatch"
    );
    torque
        .iter()
        .zip(joint_velocity.iter())
        .map(|(&t, &v)| {
            let mut out = t.clamp(-params.torque_limit, params.torque_limit);
            if params.motor_power_limit.is_finite() {
                let speed = v.abs();
                if speed > 0.0 && out.abs() * speed > params.motor_power_limit {
                    out = out.signum() * params.motor_power_limit / speed;
                }
            }
            out
        })
        .collect()
}
