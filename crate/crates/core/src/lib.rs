//! Protective policy transfer toolkit: core library.
//!
//! Trains a task policy and a protective policy in a source environment,
//! fits a one-step safety estimator on top of the protective value function,
//! composes the two policies through hysteresis thresholds, and adapts those
//! thresholds in a shifted target environment with a hard budget of at most
//! two unsafe trials.
//!
//! Layout:
//! - [`env`]: environment primitives — safety sets, physical parameters,
//!   domain randomization, latency and actuation limits.
//! - [`envs`]: the two shipped environments, `PointNav2d` and `HopperLite`.
//! - [`neural`]: minimal MLP stack (forward/backward, Adam, ensembles),
//!   generic over the scalar type.
//! - [`ppo`]: rollout collection, GAE, clipped-surrogate policy optimization.
//! - [`safety`]: protective reward, seed-state collection, and the one-step
//!   safety estimator (OSSE).
//! - [`composite`]: hysteresis-switched combined policy and the protective
//!   threshold-adaptation search.
//! - [`io`]: config files, checkpoints, CSV traces.

pub mod composite;
pub mod env;
pub mod envs;
pub mod error;
pub mod io;
pub mod neural;
pub mod ppo;
pub mod rng;
pub mod safety;
pub mod scalar;

pub use error::{CoreError, Result};

/// Scalar type used by the shipped environments, training loops, and file
/// formats. The neural substrate is generic (see [`scalar::Scalar`]); these
/// aliases pin the concrete instantiation used everywhere else.
pub type Real = f64;

/// Concrete MLP used for policies, value functions, and estimator members.
pub type Mlp = neural::MlpParams<Real>;
/// Concrete three-member ensemble.
pub type Ensemble = neural::EnsembleParams<Real>;
/// Concrete optimizer state.
pub type Adam = neural::AdamState<Real>;
