//! Adaptive-moment optimizer over an ordered list of parameter tensors.

use crate::scalar::{lit, Scalar};

/// Optimizer state: first/second moment accumulators per parameter tensor,
/// a shared step count, and the usual hyperparameters.
#[derive(Debug, Clone)]
pub struct AdamState<F> {
    pub learning_rate: F,
    pub beta1: F,
    pub beta2: F,
    pub epsilon: F,
    step: u64,
    m: Vec<Vec<F>>,
    v: Vec<Vec<F>>,
}

impl<F: Scalar> AdamState<F> {
    /// State for tensors of the given lengths, with conventional defaults
    /// (beta 0.9/0.999, epsilon 1e-8).
    pub fn new(learning_rate: f64, tensor_lens: &[usize]) -> Self {
        Self {
            learning_rate: lit(learning_rate),
            beta1: lit(0.9),
            beta2: lit(0.999),
            epsilon: lit(1e-8),
            step: 0,
            m: tensor_lens.iter().map(|&n| vec![F::zero(); n]).collect(),
            v: tensor_lens.iter().map(|&n| vec![F::zero(); n]).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected update. `params` and `grads` must list tensors in
    /// the same fixed order used to construct the state.
    pub fn update(&mut self, params: &mut [&mut [F]], grads: &[&[F]]) {
        assert_eq!(params.len(), self.m.len(), "tensor count mismatch");
        assert_eq!(grads.len(), self.m.len(), "gradient count mismatch");
        self.step += 1;
        let t = self.step as i32;
        let bc1 = F::one() - self.beta1.powi(t);
        let bc2 = F::one() - self.beta2.powi(t);
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads.iter())
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            assert_eq!(p.len(), m.len(), "tensor length mismatch");
            assert_eq!(g.len(), m.len(), "gradient length mismatch");
            for i in 0..m.len() {
                m[i] = self.beta1 * m[i] + (F::one() - self.beta1) * g[i];
                v[i] = self.beta2 * v[i] + (F::one() - self.beta2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                p[i] = p[i] - self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
    }
}

/// Convenience wrapper matching the operation-style signature: applies one
/// Adam update to a flat parameter vector.
pub fn optimizer_step<F: Scalar>(params: &mut [F], grads: &[F], opt: &mut AdamState<F>) {
    opt.update(&mut [params], &[grads]);
}
