//! HopperLite: a planar single-leg hopper.
//!
//! The torso is a point mass with rotational inertia at the hip; the leg is a
//! massless prismatic rod with a spring-damper along its axis and a point
//! foot mass at the end. Two actuators: a hip torque between torso and leg,
//! and a force along the leg axis. Ground contact is a one-sided
//! spring-damper with friction-capped tangential damping.
//!
//! Control runs at `1/dt` Hz with `substeps` physics sub-steps per control
//! step (canonically 50 Hz control, 500 Hz physics). Heights are measured
//! relative to the local terrain, so observations on slopes and stairs stay
//! in distribution.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{
    check_safe, clamp_actuation, ensure_finite, Body, EnvParams, Environment, InitDistribution,
    LatencyBuffer, SafetySpec, SafetyState, Snapshot, StepInfo, StepResult,
};
use crate::error::{CoreError, Result};
use crate::Real;

use super::{limit_action_delta, task_reward, RewardInputs, TaskRewardWeights};

/// Masses, geometry, spring constants, and actuator gains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HopperMorphology {
    pub torso_mass: Real,
    pub torso_inertia: Real,
    pub foot_mass: Real,
    /// Torso contact radius; ground contact below `z - torso_radius`.
    pub torso_radius: Real,
    /// Rest length of the leg spring.
    pub leg_rest: Real,
    pub leg_min: Real,
    pub leg_max: Real,
    pub leg_spring: Real,
    pub leg_damping: Real,
    /// Nm of hip torque per unit of (clipped) action.
    pub hip_gain: Real,
    /// N of leg force per unit of (clipped) action.
    pub leg_gain: Real,
    pub contact_stiffness: Real,
    pub contact_damping: Real,
    pub contact_tangent_damping: Real,
    pub gravity: Real,
}

impl Default for HopperMorphology {
    fn default() -> Self {
        Self {
            torso_mass: 3.0,
            torso_inertia: 0.18,
            foot_mass: 0.2,
            torso_radius: 0.25,
            leg_rest: 1.0,
            leg_min: 0.55,
            leg_max: 1.15,
            leg_spring: 1200.0,
            leg_damping: 14.0,
            hip_gain: 35.0,
            leg_gain: 130.0,
            contact_stiffness: 6000.0,
            contact_damping: 70.0,
            contact_tangent_damping: 90.0,
            gravity: 9.81,
        }
    }
}

/// Full environment configuration for HopperLite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HopperConfig {
    /// Control period in seconds.
    pub dt: Real,
    /// Physics sub-steps per control step.
    pub substeps: usize,
    pub horizon: usize,
    /// Half-width of the uniform perturbation applied at default reset.
    pub reset_noise: Real,
    pub morph: HopperMorphology,
    pub safety: SafetySpec,
    pub reward: TaskRewardWeights,
    /// Multiplier on the constant alive term of the task reward.
    pub alive_scale: Real,
    /// Optional cap on per-step action change (disabled by default).
    pub max_action_delta: Option<Real>,
}

impl Default for HopperConfig {
    fn default() -> Self {
        Self {
            dt: 0.02,
            substeps: 10,
            horizon: 1000,
            reset_noise: 0.005,
            morph: HopperMorphology::default(),
            safety: SafetySpec {
                h_min: 0.75,
                pitch_max: 0.8,
                roll_max: Real::INFINITY,
                yaw_max: Real::INFINITY,
                allowed_contact_bodies: vec![Body::Foot],
                hazard_regions: Vec::new(),
                speed_max: Real::INFINITY,
            },
            reward: TaskRewardWeights {
                v_max: Real::INFINITY,
                w_vel: 1.0,
                w_action: 0.03,
                w_knee: 0.5,
                w_hip: 0.0,
                w_dev: 0.0,
            },
            alive_scale: 1.0,
            max_action_delta: None,
        }
    }
}

impl HopperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || self.substeps == 0 || self.horizon == 0 {
            return Err(CoreError::Config(
                "hopper dt, substeps, and horizon must be positive".into(),
            ));
        }
        let m = &self.morph;
        if !(m.leg_min > 0.0 && m.leg_min < m.leg_rest && m.leg_rest < m.leg_max) {
            return Err(CoreError::Config(format!(
                "leg limits must satisfy 0 < leg_min < leg_rest < leg_max, got {} {} {}",
                m.leg_min, m.leg_rest, m.leg_max
            )));
        }
        self.safety.validate(true)?;
        self.reward.validate()
    }

    /// Torso height of the standing equilibrium under `params`.
    pub fn stand_height(&self, params: &EnvParams) -> Real {
        let m = &self.morph;
        let weight = (m.torso_mass + m.foot_mass) * params.mass_scale * m.gravity;
        let spring_load = m.torso_mass * params.mass_scale * m.gravity;
        let compressed = (m.leg_rest - spring_load / m.leg_spring).max(m.leg_min);
        compressed - weight / m.contact_stiffness
    }
}

/// Generalized state: torso pose, hip angle, leg length, their rates, and
/// ground-contact flags. The observation excludes the absolute `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopperState {
    pub x: Real,
    pub z: Real,
    pub pitch: Real,
    /// Hip angle of the leg relative to the torso (0 = straight down).
    pub hip: Real,
    pub leg_len: Real,
    pub vx: Real,
    pub vz: Real,
    pub pitch_rate: Real,
    pub hip_rate: Real,
    pub leg_rate: Real,
    pub foot_contact: bool,
    pub torso_contact: bool,
}

impl HopperState {
    /// Leg direction angle in world frame.
    pub fn leg_angle(&self) -> Real {
        self.pitch + self.hip
    }

    /// Foot position and velocity in world frame.
    pub fn foot_kinematics(&self) -> ([Real; 2], [Real; 2]) {
        let a = self.leg_angle();
        let (s, c) = (a.sin(), a.cos());
        let p = [self.x + self.leg_len * s, self.z - self.leg_len * c];
        let a_rate = self.pitch_rate + self.hip_rate;
        let v = [
            self.vx + self.leg_rate * s + self.leg_len * a_rate * c,
            self.vz - self.leg_rate * c + self.leg_len * a_rate * s,
        ];
        (p, v)
    }

    fn as_vec(&self) -> Vec<Real> {
        vec![
            self.x,
            self.z,
            self.pitch,
            self.hip,
            self.leg_len,
            self.vx,
            self.vz,
            self.pitch_rate,
            self.hip_rate,
            self.leg_rate,
        ]
    }
}

impl Snapshot for HopperState {
    fn columns() -> Vec<&'static str> {
        vec![
            "x",
            "z",
            "pitch",
            "hip",
            "leg_len",
            "vx",
            "vz",
            "pitch_rate",
            "hip_rate",
            "leg_rate",
            "foot_contact",
            "torso_contact",
        ]
    }

    fn to_row(&self) -> Vec<Real> {
        let mut row = self.as_vec();
        row.push(if self.foot_contact { 1.0 } else { 0.0 });
        row.push(if self.torso_contact { 1.0 } else { 0.0 });
        row
    }

    fn from_row(row: &[Real]) -> Result<Self> {
        if row.len() != 12 {
            return Err(CoreError::Parse(format!(
                "hopper state row needs 12 columns, got {}",
                row.len()
            )));
        }
        Ok(Self {
            x: row[0],
            z: row[1],
            pitch: row[2],
            hip: row[3],
            leg_len: row[4],
            vx: row[5],
            vz: row[6],
            pitch_rate: row[7],
            hip_rate: row[8],
            leg_rate: row[9],
            foot_contact: row[10] != 0.0,
            torso_contact: row[11] != 0.0,
        })
    }
}

/// Diagnostics accumulated over the sub-steps of one control step.
#[derive(Debug, Clone, Copy, Default)]
pub struct HopperStepDiag {
    pub knee_at_limit: bool,
    pub foot_contact_any: bool,
    pub torso_contact_any: bool,
    pub applied_hip_torque: Real,
    pub applied_leg_force: Real,
}

/// One control step of the hopper dynamics under an already-latency-resolved,
/// clipped action in `[-1, 1]^2`. Pure in `(state, action, cfg, params)`.
///
/// The returned [`StepResult`] carries the task reward and the safety flags;
/// `is_terminal` reflects safety only — the episode horizon is enforced by
/// the [`HopperLite`] wrapper.
pub fn hopper_step(
    state: &HopperState,
    action: &[Real],
    cfg: &HopperConfig,
    params: &EnvParams,
    dt: Real,
) -> Result<(HopperState, StepResult)> {
    if action.len() != 2 {
        return Err(CoreError::Contract(format!(
            "hopper action has dimension 2, got {}",
            action.len()
        )));
    }
    ensure_finite(action, "hopper action")?;
    ensure_finite(&state.as_vec(), "hopper state")?;

    let clipped = [action[0].clamp(-1.0, 1.0), action[1].clamp(-1.0, 1.0)];
    let h = dt / cfg.substeps as Real;
    let mut s = *state;
    let mut diag = HopperStepDiag::default();

    for _ in 0..cfg.substeps {
        substep(&mut s, &clipped, cfg, params, h, &mut diag)?;
    }
    ensure_finite(&s.as_vec(), "hopper state after integration")?;

    s.foot_contact = diag.foot_contact_any;
    s.torso_contact = diag.torso_contact_any;

    let forward_velocity = (s.x - state.x) / dt;
    let inputs = RewardInputs {
        forward_velocity,
        knee_at_limit: diag.knee_at_limit,
        hip_angle: s.hip,
        lateral_deviation: 0.0,
    };
    let reward = task_reward(&inputs, &clipped, &cfg.reward) + (cfg.alive_scale - 1.0);

    let safety = safety_view(&s, params);
    let is_safe = check_safe(&safety, &cfg.safety)?;
    let obs = observe(&s, params);
    let mut info = StepInfo::new();
    info.insert("forward_velocity", forward_velocity);
    info.insert("height", safety.height);
    info.insert("applied_hip_torque", diag.applied_hip_torque);
    info.insert("applied_leg_force", diag.applied_leg_force);
    info.insert("knee_at_limit", if diag.knee_at_limit { 1.0 } else { 0.0 });
    info.insert("foot_contact", if diag.foot_contact_any { 1.0 } else { 0.0 });

    let result = StepResult::new(obs, reward, is_safe, false, info);
    Ok((s, result))
}

fn substep(
    s: &mut HopperState,
    clipped: &[Real; 2],
    cfg: &HopperConfig,
    params: &EnvParams,
    h: Real,
    diag: &mut HopperStepDiag,
) -> Result<()> {
    let m = &cfg.morph;
    let m_t = m.torso_mass * params.mass_scale;
    let m_f = m.foot_mass * params.mass_scale;
    let inertia = m.torso_inertia * params.mass_scale;
    let g = m.gravity;

    let alpha = s.leg_angle();
    let (sin_a, cos_a) = (alpha.sin(), alpha.cos());
    let dir = [sin_a, -cos_a]; // torso -> foot
    let tang = [cos_a, sin_a];
    let (p_f, v_f) = s.foot_kinematics();

    // Commanded torques, power- and torque-limited at current joint rates.
    let commanded = [m.hip_gain * clipped[0], m.leg_gain * clipped[1]];
    let applied = clamp_actuation(&commanded, &[s.hip_rate, s.leg_rate], params);
    diag.applied_hip_torque = applied[0];
    diag.applied_leg_force = applied[1];

    // Leg axial force (positive pushes the foot away from the torso).
    let axial = m.leg_spring * (m.leg_rest - s.leg_len) - m.leg_damping * s.leg_rate + applied[1];
    // Net hip torque: actuation plus passive joint damping.
    let hip_torque = applied[0] - params.joint_damping * s.hip_rate;
    let tangential = hip_torque / s.leg_len;

    let mut f_foot = [
        axial * dir[0] + tangential * tang[0],
        axial * dir[1] + tangential * tang[1] - m_f * g,
    ];
    let mut f_torso = [
        -axial * dir[0] - tangential * tang[0],
        -axial * dir[1] - tangential * tang[1] - m_t * g,
    ];

    // Foot-ground contact: one-sided spring-damper, friction-capped drag.
    let ground_f = params.terrain.height(p_f[0]);
    let pen_f = ground_f - p_f[1];
    if pen_f > 0.0 {
        let damping = m.contact_damping * (1.0 - params.restitution);
        let normal = (m.contact_stiffness * pen_f - damping * v_f[1]).max(0.0);
        let mut drag = -m.contact_tangent_damping * v_f[0];
        let cap = params.friction * normal;
        drag = drag.clamp(-cap, cap);
        f_foot[0] += drag;
        f_foot[1] += normal;
        diag.foot_contact_any = true;
    }

    // Torso-ground contact (normal only; a torso touch is unsafe anyway).
    let ground_t = params.terrain.height(s.x);
    let pen_t = ground_t - (s.z - m.torso_radius);
    if pen_t > 0.0 {
        let damping = m.contact_damping * (1.0 - params.restitution);
        let normal = (m.contact_stiffness * pen_t - damping * s.vz).max(0.0);
        f_torso[1] += normal;
        diag.torso_contact_any = true;
    }

    // Semi-implicit Euler in maximal coordinates.
    let v_t = [s.vx + f_torso[0] / m_t * h, s.vz + f_torso[1] / m_t * h];
    let omega = s.pitch_rate - hip_torque / inertia * h;
    let v_f_new = [v_f[0] + f_foot[0] / m_f * h, v_f[1] + f_foot[1] / m_f * h];

    let p_t = [s.x + v_t[0] * h, s.z + v_t[1] * h];
    let pitch = s.pitch + omega * h;
    let p_f_new = [p_f[0] + v_f_new[0] * h, p_f[1] + v_f_new[1] * h];

    // Back to generalized coordinates.
    let delta = [p_f_new[0] - p_t[0], p_f_new[1] - p_t[1]];
    let mut len = (delta[0] * delta[0] + delta[1] * delta[1]).sqrt().max(1e-9);
    let mut alpha_new = delta[0].atan2(-delta[1]);
    // Unwrap toward the previous angle so the hip coordinate stays continuous.
    while alpha_new - alpha > std::f64::consts::PI {
        alpha_new -= 2.0 * std::f64::consts::PI;
    }
    while alpha - alpha_new > std::f64::consts::PI {
        alpha_new += 2.0 * std::f64::consts::PI;
    }

    let rel = [v_f_new[0] - v_t[0], v_f_new[1] - v_t[1]];
    let (sin_n, cos_n) = (alpha_new.sin(), alpha_new.cos());
    let dir_n = [sin_n, -cos_n];
    let tang_n = [cos_n, sin_n];
    let mut leg_rate = rel[0] * dir_n[0] + rel[1] * dir_n[1];
    let alpha_rate = (rel[0] * tang_n[0] + rel[1] * tang_n[1]) / len;

    // Hard stops on the prismatic joint: project position and kill the
    // inbound radial rate (inelastic stop).
    if len <= m.leg_min {
        len = m.leg_min;
        if leg_rate < 0.0 {
            leg_rate = 0.0;
        }
        diag.knee_at_limit = true;
    } else if len >= m.leg_max {
        len = m.leg_max;
        if leg_rate > 0.0 {
            leg_rate = 0.0;
        }
        diag.knee_at_limit = true;
    }

    // Torso translation/rotation never gets adjusted by the projection; the
    // foot is recomputed from the clamped generalized coordinates next step.
    s.x = p_t[0];
    s.z = p_t[1];
    s.pitch = pitch;
    s.hip = alpha_new - pitch;
    s.leg_len = len;
    s.vx = v_t[0];
    s.vz = v_t[1];
    s.pitch_rate = omega;
    s.hip_rate = alpha_rate - omega;
    s.leg_rate = leg_rate;

    // Stop torso velocity from being used before the write-back above.
    let _ = &mut v_t;
    Ok(())
}

/// Observation: `[height, pitch, hip, leg_len, vx, vz, pitch_rate, hip_rate,
/// leg_rate]` with height measured relative to the local terrain. The
/// absolute `x` is excluded.
pub fn observe(s: &HopperState, params: &EnvParams) -> Vec<Real> {
    vec![
        s.z - params.terrain.height(s.x),
        s.pitch,
        s.hip,
        s.leg_len,
        s.vx,
        s.vz,
        s.pitch_rate,
        s.hip_rate,
        s.leg_rate,
    ]
}

fn safety_view(s: &HopperState, params: &EnvParams) -> SafetyState {
    let mut contacts = Vec::new();
    if s.foot_contact {
        contacts.push(Body::Foot);
    }
    if s.torso_contact {
        contacts.push(Body::Torso);
    }
    SafetyState {
        height: s.z - params.terrain.height(s.x),
        pitch: s.pitch,
        roll: 0.0,
        yaw: 0.0,
        contacts,
        position: [s.x, 0.0],
        speed: (s.vx * s.vx + s.vz * s.vz).sqrt(),
    }
}

/// Total mechanical energy (kinetic + gravitational + leg and contact spring
/// potentials). Used by the integration tests.
pub fn mechanical_energy(s: &HopperState, cfg: &HopperConfig, params: &EnvParams) -> Real {
    let m = &cfg.morph;
    let m_t = m.torso_mass * params.mass_scale;
    let m_f = m.foot_mass * params.mass_scale;
    let inertia = m.torso_inertia * params.mass_scale;
    let (p_f, v_f) = s.foot_kinematics();
    let ke = 0.5 * m_t * (s.vx * s.vx + s.vz * s.vz)
        + 0.5 * inertia * s.pitch_rate * s.pitch_rate
        + 0.5 * m_f * (v_f[0] * v_f[0] + v_f[1] * v_f[1]);
    let pe = m_t * m.gravity * s.z + m_f * m.gravity * p_f[1];
    let spring = 0.5 * m.leg_spring * (m.leg_rest - s.leg_len).powi(2);
    let pen_f = (params.terrain.height(p_f[0]) - p_f[1]).max(0.0);
    let pen_t = (params.terrain.height(s.x) - (s.z - m.torso_radius)).max(0.0);
    let contact = 0.5 * m.contact_stiffness * (pen_f * pen_f + pen_t * pen_t);
    ke + pe + spring + contact
}

/// The hopper environment: owns the state, latency queue, and step counter.
#[derive(Debug, Clone)]
pub struct HopperLite {
    cfg: HopperConfig,
    params: EnvParams,
    state: HopperState,
    latency: LatencyBuffer,
    prev_action: Vec<Real>,
    steps: usize,
    terminated: bool,
}

impl HopperLite {
    pub fn new(cfg: HopperConfig, params: EnvParams) -> Result<Self> {
        cfg.validate()?;
        params.validate()?;
        let latency = LatencyBuffer::new(params.latency_steps, vec![0.0; 2]);
        let mut env = Self {
            state: HopperState {
                x: 0.0,
                z: cfg.stand_height(&params),
                pitch: 0.0,
                hip: 0.0,
                leg_len: cfg.morph.leg_rest,
                vx: 0.0,
                vz: 0.0,
                pitch_rate: 0.0,
                hip_rate: 0.0,
                leg_rate: 0.0,
                foot_contact: true,
                torso_contact: false,
            },
            cfg,
            params,
            latency,
            prev_action: vec![0.0; 2],
            steps: 0,
            terminated: false,
        };
        env.state = env.canonical_state();
        Ok(env)
    }

    pub fn config(&self) -> &HopperConfig {
        &self.cfg
    }

    /// Canonical start pose: standing equilibrium with the leg vertical.
    pub fn canonical_state(&self) -> HopperState {
        let m = &self.cfg.morph;
        let spring_load = m.torso_mass * self.params.mass_scale * m.gravity;
        let leg_len = (m.leg_rest - spring_load / m.leg_spring).max(m.leg_min);
        HopperState {
            x: 0.0,
            z: self.cfg.stand_height(&self.params),
            pitch: 0.0,
            hip: 0.0,
            leg_len,
            vx: 0.0,
            vz: 0.0,
            pitch_rate: 0.0,
            hip_rate: 0.0,
            leg_rate: 0.0,
            foot_contact: true,
            torso_contact: false,
        }
    }

    pub fn state(&self) -> &HopperState {
        &self.state
    }

    pub fn set_state(&mut self, state: HopperState) {
        self.state = state;
    }
}

impl Environment for HopperLite {
    type State = HopperState;

    fn obs_dim(&self) -> usize {
        9
    }

    fn action_dim(&self) -> usize {
        2
    }

    fn observe(&self) -> Vec<Real> {
        observe(&self.state, &self.params)
    }

    fn step(&mut self, action: &[Real]) -> Result<StepResult> {
        if self.terminated {
            return Err(CoreError::Contract(
                "step called on a terminated episode; reset first".into(),
            ));
        }
        let delayed = self.latency.apply(action)?;
        let mut effective = delayed.clone();
        for a in effective.iter_mut() {
            *a = a.clamp(-1.0, 1.0);
        }
        limit_action_delta(&self.prev_action, &mut effective, self.cfg.max_action_delta);
        self.prev_action = effective.clone();

        let (next, mut result) = hopper_step(&self.state, &effective, &self.cfg, &self.params, self.cfg.dt)?;
        self.state = next;
        self.steps += 1;
        if self.steps >= self.cfg.horizon {
            result.is_terminal = true;
        }
        self.terminated = result.is_terminal;
        Ok(result)
    }

    fn reset<R: Rng>(
        &mut self,
        rng: &mut R,
        init: &InitDistribution<'_, HopperState>,
    ) -> Result<Vec<Real>> {
        let state = match init {
            InitDistribution::Default => {
                let mut s = self.canonical_state();
                let n = self.cfg.reset_noise;
                if n > 0.0 {
                    s.z += rng.random_range(-n..=n);
                    s.pitch += rng.random_range(-n..=n);
                    s.hip += rng.random_range(-n..=n);
                    s.vx += rng.random_range(-n..=n);
                    s.vz += rng.random_range(-n..=n);
                    s.pitch_rate += rng.random_range(-n..=n);
                }
                s
            }
            InitDistribution::Buffer(states) => {
                if states.is_empty() {
                    return Err(CoreError::EmptyBuffer(
                        "hopper reset requested from an empty buffer".into(),
                    ));
                }
                states[rng.random_range(0..states.len())]
            }
        };
        self.restore(&state)?;
        Ok(self.observe())
    }

    fn snapshot(&self) -> HopperState {
        self.state
    }

    fn restore(&mut self, state: &HopperState) -> Result<()> {
        ensure_finite(&state.as_vec(), "hopper restore state")?;
        self.state = *state;
        self.latency.reset();
        self.prev_action = vec![0.0; 2];
        self.steps = 0;
        self.terminated = false;
        Ok(())
    }

    fn safety_state(&self) -> SafetyState {
        safety_view(&self.state, &self.params)
    }

    fn params(&self) -> &EnvParams {
        &self.params
    }

    fn safety_spec(&self) -> &SafetySpec {
        &self.cfg.safety
    }

    fn horizon(&self) -> usize {
        self.cfg.horizon
    }

    fn elapsed(&self) -> usize {
        self.steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn flight_state(cfg: &HopperConfig) -> HopperState {
        HopperState {
            x: 0.0,
            z: 2.0,
            pitch: 0.0,
            hip: 0.0,
            leg_len: cfg.morph.leg_rest,
            vx: 0.5,
            vz: 0.2,
            pitch_rate: 0.0,
            hip_rate: 0.0,
            leg_rate: 0.0,
            foot_contact: false,
            torso_contact: false,
        }
    }

    #[test]
    fn zero_gravity_force_free_state_is_stationary() {
        let mut cfg = HopperConfig::default();
        cfg.morph.gravity = 0.0;
        let params = EnvParams::default();
        let mut s = flight_state(&cfg);
        s.vx = 0.0;
        s.vz = 0.0;
        let (next, _) = hopper_step(&s, &[0.0, 0.0], &cfg, &params, cfg.dt).unwrap();
        assert!((next.vx.abs() + next.vz.abs() + next.pitch_rate.abs()) < 1e-12);
        assert!((next.leg_rate.abs() + next.hip_rate.abs()) < 1e-12);
        assert!((next.z - s.z).abs() < 1e-12);
    }

    #[test]
    fn uniform_translation_is_force_free() {
        let mut cfg = HopperConfig::default();
        cfg.morph.gravity = 0.0;
        let params = EnvParams::default();
        let s = flight_state(&cfg);
        let (next, _) = hopper_step(&s, &[0.0, 0.0], &cfg, &params, cfg.dt).unwrap();
        assert!((next.vx - s.vx).abs() < 1e-12);
        assert!((next.vz - s.vz).abs() < 1e-12);
        assert!(next.leg_rate.abs() < 1e-12);
    }

    #[test]
    fn ballistic_flight_loses_g_dt_of_vertical_velocity() {
        let cfg = HopperConfig::default();
        let params = EnvParams::default();
        let s = flight_state(&cfg);
        let (next, result) = hopper_step(&s, &[0.0, 0.0], &cfg, &params, cfg.dt).unwrap();
        let expect = s.vz - cfg.morph.gravity * cfg.dt;
        assert!(
            (next.vz - expect).abs() < 1e-10,
            "vz {} expected {}",
            next.vz,
            expect
        );
        assert!(result.is_safe);
    }

    #[test]
    fn energy_non_increasing_with_damping_and_no_actuation() {
        let cfg = HopperConfig::default();
        let params = EnvParams::default();
        // Drop from slightly above the stand height with a small push.
        let mut s = HopperState {
            z: cfg.stand_height(&params) + 0.05,
            vx: 0.3,
            ..flight_state(&cfg)
        };
        let mut energies = vec![mechanical_energy(&s, &cfg, &params)];
        for _ in 0..100 {
            let (next, _) = hopper_step(&s, &[0.0, 0.0], &cfg, &params, cfg.dt).unwrap();
            s = next;
            energies.push(mechanical_energy(&s, &cfg, &params));
        }
        let scale = energies[0].abs().max(1.0);
        for w in energies.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-6 * scale,
                "energy increased: {} -> {}",
                w[0],
                w[1]
            );
        }
        // Most of the drop energy must dissipate by the end.
        assert!(energies[energies.len() - 1] < energies[0]);
    }

    #[test]
    fn coarse_energy_matches_fine_reference() {
        // 100x finer sub-steps as the reference integration.
        let cfg = HopperConfig::default();
        let mut fine = cfg.clone();
        fine.substeps = cfg.substeps * 100;
        let params = EnvParams::default();
        let start = HopperState {
            z: cfg.stand_height(&params) + 0.05,
            vx: 0.3,
            ..flight_state(&cfg)
        };

        let run = |c: &HopperConfig| {
            let mut s = start;
            for _ in 0..100 {
                let (next, _) = hopper_step(&s, &[0.0, 0.0], c, &params, c.dt).unwrap();
                s = next;
            }
            mechanical_energy(&s, c, &params)
        };
        let e0 = mechanical_energy(&start, &cfg, &params);
        let coarse = run(&cfg);
        let fine_e = run(&fine);
        let dissipated = e0 - fine_e;
        assert!(dissipated > 0.0);
        assert!(
            (coarse - fine_e).abs() < 0.15 * dissipated.max(1e-3),
            "coarse {coarse} vs fine {fine_e} (dissipated {dissipated})"
        );
    }

    #[test]
    fn determinism_given_state_action_params() {
        let cfg = HopperConfig::default();
        let params = EnvParams::default();
        let s = flight_state(&cfg);
        let (a, ra) = hopper_step(&s, &[0.3, -0.2], &cfg, &params, cfg.dt).unwrap();
        let (b, rb) = hopper_step(&s, &[0.3, -0.2], &cfg, &params, cfg.dt).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.reward, rb.reward);
    }

    #[test]
    fn default_resets_are_safe_and_deterministic() {
        let cfg = HopperConfig::default();
        let params = EnvParams::default();
        let mut env = HopperLite::new(cfg.clone(), params.clone()).unwrap();
        for k in 0..50 {
            let mut rng = stream(3, "reset", k);
            env.reset(&mut rng, &InitDistribution::Default).unwrap();
            let safe = check_safe(&env.safety_state(), env.safety_spec()).unwrap();
            assert!(safe, "reset {k} produced an unsafe state");
        }
        let mut e1 = HopperLite::new(cfg.clone(), params.clone()).unwrap();
        let mut e2 = HopperLite::new(cfg, params).unwrap();
        let o1 = e1.reset(&mut stream(5, "reset", 0), &InitDistribution::Default).unwrap();
        let o2 = e2.reset(&mut stream(5, "reset", 0), &InitDistribution::Default).unwrap();
        assert_eq!(o1, o2);
    }

    #[test]
    fn zero_reset_noise_gives_canonical_pose() {
        let mut cfg = HopperConfig::default();
        cfg.reset_noise = 0.0;
        let mut env = HopperLite::new(cfg, EnvParams::default()).unwrap();
        let canonical = env.canonical_state();
        env.reset(&mut stream(0, "reset", 0), &InitDistribution::Default).unwrap();
        assert_eq!(*env.state(), canonical);
    }

    #[test]
    fn buffer_reset_with_singleton_returns_that_state() {
        let mut env = HopperLite::new(HopperConfig::default(), EnvParams::default()).unwrap();
        let mut stored = env.canonical_state();
        stored.vx = 0.77;
        let buf = vec![stored];
        env.reset(&mut stream(1, "reset", 0), &InitDistribution::Buffer(&buf)).unwrap();
        assert_eq!(env.state().vx, 0.77);
    }

    #[test]
    fn empty_buffer_reset_errors() {
        let mut env = HopperLite::new(HopperConfig::default(), EnvParams::default()).unwrap();
        let buf: Vec<HopperState> = Vec::new();
        assert!(env
            .reset(&mut stream(1, "reset", 0), &InitDistribution::Buffer(&buf))
            .is_err());
    }

    #[test]
    fn standing_survives_with_zero_actions() {
        let mut env = HopperLite::new(HopperConfig::default(), EnvParams::default()).unwrap();
        env.reset(&mut stream(2, "reset", 0), &InitDistribution::Default).unwrap();
        for k in 0..200 {
            let r = env.step(&[0.0, 0.0]).unwrap();
            assert!(r.is_safe, "became unsafe at step {k}");
        }
    }

    #[test]
    fn random_policy_survives_at_least_20_steps_on_average() {
        let cfg = HopperConfig::default();
        let mut total = 0usize;
        let episodes = 20;
        for ep in 0..episodes {
            let mut env = HopperLite::new(cfg.clone(), EnvParams::default()).unwrap();
            let mut rng = stream(11, "random-policy", ep);
            env.reset(&mut rng, &InitDistribution::Default).unwrap();
            for step in 0..400 {
                let a = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let r = env.step(&a).unwrap();
                if r.is_terminal {
                    total += step + 1;
                    break;
                }
                if step == 399 {
                    total += 400;
                }
            }
        }
        let mean = total as f64 / episodes as f64;
        assert!(mean >= 20.0, "random policy mean survival {mean}");
    }

    #[test]
    fn nan_state_yields_integration_error() {
        let cfg = HopperConfig::default();
        let params = EnvParams::default();
        let mut s = flight_state(&cfg);
        s.vz = Real::NAN;
        let err = hopper_step(&s, &[0.0, 0.0], &cfg, &params, cfg.dt);
        assert!(matches!(err, Err(CoreError::Integration(_))));
    }

    #[test]
    fn action_continuity_away_from_contact_changes() {
        let cfg = HopperConfig::default();
        let params = EnvParams::default();
        let base = flight_state(&cfg);
        let eps = 1e-6;
        let (s0, _) = hopper_step(&base, &[0.1, 0.1], &cfg, &params, cfg.dt).unwrap();
        let (s1, _) = hopper_step(&base, &[0.1 + eps, 0.1], &cfg, &params, cfg.dt).unwrap();
        let diff = (s1.z - s0.z).abs()
            + (s1.x - s0.x).abs()
            + (s1.vx - s0.vx).abs()
            + (s1.vz - s0.vz).abs()
            + (s1.pitch - s0.pitch).abs();
        assert!(diff < 1e-3, "state jump {diff} for action perturbation {eps}");
    }

    #[test]
    fn terrain_steps_shift_the_safety_height() {
        let cfg = HopperConfig::default();
        let params = EnvParams {
            terrain: crate::env::Terrain::Steps { run: 0.5, rise: 0.03 },
            ..Default::default()
        };
        let mut env = HopperLite::new(cfg, params).unwrap();
        let mut s = env.canonical_state();
        s.x = 1.2; // two steps up: ground at 0.06
        s.z += 0.06;
        env.set_state(s);
        let view = env.safety_state();
        assert!((view.height - env.canonical_state().z).abs() < 1e-9);
    }
}
