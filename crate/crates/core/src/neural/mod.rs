//! Minimal feed-forward network stack.
//!
//! Fixed topology: affine layers with `tanh` hidden activations and an
//! identity output. Enough for the policies, value functions, and safety
//! estimators used here — no convolutions, recurrence, or general autodiff.

mod adam;
mod ensemble;
mod fit;
mod mlp;

pub use adam::{optimizer_step, AdamState};
pub use ensemble::{ensemble_predict, EnsembleParams, ENSEMBLE_MEMBERS};
pub use fit::{fit_regression, RegressionConfig};
pub use mlp::{Dense, MlpCache, MlpParams};
