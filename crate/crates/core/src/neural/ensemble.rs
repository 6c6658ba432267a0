//! Fixed-size ensembles of scalar-output networks.

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

use super::mlp::MlpParams;

/// Number of ensemble members.
pub const ENSEMBLE_MEMBERS: usize = 3;

/// Exactly three scalar-output members with identical input/output
/// dimensions. Prediction is the arithmetic mean of the member outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleParams<F> {
    members: Vec<MlpParams<F>>,
}

impl<F: Scalar> EnsembleParams<F> {
    pub fn new(members: Vec<MlpParams<F>>) -> Result<Self> {
        if members.len() != ENSEMBLE_MEMBERS {
            return Err(CoreError::Contract(format!(
                "ensemble needs exactly {ENSEMBLE_MEMBERS} members, got {}",
                members.len()
            )));
        }
        let input = members[0].input_dim();
        for m in &members {
            if m.input_dim() != input || m.output_dim() != 1 {
                return Err(CoreError::Contract(
                    "ensemble members must share the input dimension and output a scalar".into(),
                ));
            }
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[MlpParams<F>] {
        &self.members
    }

    pub fn members_mut(&mut self) -> &mut [MlpParams<F>] {
        &mut self.members
    }

    pub fn input_dim(&self) -> usize {
        self.members[0].input_dim()
    }

    /// Mean of the member outputs.
    pub fn predict(&self, input: &[F]) -> Result<F> {
        let mut acc = F::zero();
        for m in &self.members {
            acc += m.forward(input)?[0];
        }
        Ok(acc / F::from_f64_lossy(self.members.len() as f64))
    }
}

/// Operation-style alias for [`EnsembleParams::predict`].
pub fn ensemble_predict<F: Scalar>(ens: &EnsembleParams<F>, input: &[F]) -> Result<F> {
    ens.predict(input)
}
