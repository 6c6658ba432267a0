//! Environment primitives shared by all environments: safety-set checking,
//! physical parameters with domain randomization, control latency, and
//! actuation limits.

mod actuation;
mod latency;
mod params;
mod safety;

pub use actuation::clamp_actuation;
pub use latency::LatencyBuffer;
pub use params::{sample_params, EnvParams, RandomizationRanges, Terrain};
pub use safety::{check_safe, Body, Rect, SafetySpec, SafetyState};

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{CoreError, Result};
use crate::Real;

/// Per-step scalar diagnostics (forward velocity, applied torque, ...).
pub type StepInfo = BTreeMap<&'static str, Real>;

/// Result of one control step.
#[derive(Debug, Clone)]
pub struct StepResult {
    pub next_observation: Vec<Real>,
    pub reward: Real,
    pub is_safe: bool,
    pub is_terminal: bool,
    pub info: StepInfo,
}

impl StepResult {
    /// Builds a step result, enforcing that unsafe states terminate.
    pub fn new(
        next_observation: Vec<Real>,
        reward: Real,
        is_safe: bool,
        terminal: bool,
        info: StepInfo,
    ) -> Self {
        Self {
            next_observation,
            reward,
            is_safe,
            is_terminal: terminal || !is_safe,
            info,
        }
    }
}

/// Exact state snapshot usable for restore and for CSV persistence.
pub trait Snapshot: Clone + Send + Sync + 'static {
    /// Column names for the CSV row form.
    fn columns() -> Vec<&'static str>;
    fn to_row(&self) -> Vec<Real>;
    fn from_row(row: &[Real]) -> Result<Self>;
}

/// Initial-state distribution for [`Environment::reset`].
pub enum InitDistribution<'a, S> {
    /// Canonical start pose with a small uniform perturbation.
    Default,
    /// Uniform draw from stored snapshots.
    Buffer(&'a [S]),
}

/// A single-owner, resettable environment with exact state set/get.
///
/// Instances are deterministic: `step` depends only on the current state,
/// the action, and the construction-time parameters. All randomness enters
/// through `reset`.
pub trait Environment {
    type State: Snapshot;

    fn obs_dim(&self) -> usize;
    fn action_dim(&self) -> usize;

    /// Observation of the current state (never includes absolute x position).
    fn observe(&self) -> Vec<Real>;

    /// Advance one control step. Stepping a terminated episode is a contract
    /// violation; callers reset first.
    fn step(&mut self, action: &[Real]) -> Result<StepResult>;

    fn reset<R: Rng>(
        &mut self,
        rng: &mut R,
        init: &InitDistribution<'_, Self::State>,
    ) -> Result<Vec<Real>>;

    /// Exact snapshot of the physical state.
    fn snapshot(&self) -> Self::State;

    /// Restore a snapshot. Re-initializes the actuation latency queue with
    /// default actions and restarts the episode step counter.
    fn restore(&mut self, state: &Self::State) -> Result<()>;

    /// View of the state consumed by [`check_safe`].
    fn safety_state(&self) -> SafetyState;

    fn params(&self) -> &EnvParams;
    fn safety_spec(&self) -> &SafetySpec;

    /// Episode horizon in control steps.
    fn horizon(&self) -> usize;

    /// Steps elapsed since the last reset/restore.
    fn elapsed(&self) -> usize;
}

pub(crate) fn ensure_finite(values: &[Real], what: &str) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::Integration(format!(
            "{what} contains a non-finite value: {values:?}"
        )));
    }
    Ok(())
}
