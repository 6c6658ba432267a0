//! Minibatched mean-squared-error regression for scalar-output networks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::scalar::{lit, Scalar};

use super::adam::AdamState;
use super::mlp::MlpParams;

#[derive(Debug, Clone)]
pub struct RegressionConfig {
    pub epochs: usize,
    pub minibatch: usize,
    pub learning_rate: f64,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        Self {
            epochs: 8,
            minibatch: 256,
            learning_rate: 1e-3,
        }
    }
}

/// Fit `net` to `(inputs[i], labels[i])` pairs by minibatch Adam on MSE.
/// Sample order is shuffled per epoch from `rng`; the run is deterministic
/// given the seed.
pub fn fit_regression<F: Scalar, R: Rng>(
    net: &mut MlpParams<F>,
    inputs: &[Vec<F>],
    labels: &[F],
    cfg: &RegressionConfig,
    rng: &mut R,
) -> Result<()> {
    assert_eq!(inputs.len(), labels.len(), "input/label count mismatch");
    assert!(!inputs.is_empty(), "empty dataset");
    let lens: Vec<usize> = net.tensors().iter().map(|t| t.len()).collect();
    let mut opt = AdamState::<F>::new(cfg.learning_rate, &lens);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(cfg.minibatch.max(1)) {
            let mut grads = MlpParams::<F>::zeros(net.sizes());
            for &idx in chunk {
                let cache = net.forward_cached(&inputs[idx])?;
                let err = cache.output()[0] - labels[idx];
                let (g, _) = net.backward(&cache, &[err]);
                grads.add_assign(&g);
            }
            grads.scale(F::one() / lit::<F>(chunk.len() as f64));
            let g_tensors = grads.tensors();
            let g_refs: Vec<&[F]> = g_tensors.to_vec();
            let mut p_tensors = net.tensors_mut();
            opt.update(&mut p_tensors, &g_refs);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fits_constant_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let inputs: Vec<Vec<f64>> =
            (0..200).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        let labels = vec![0.5f64; 200];
        let mut net = MlpParams::init_uniform(&[2, 16, 1], &mut rng);
        let cfg = RegressionConfig { epochs: 60, minibatch: 32, learning_rate: 3e-3 };
        fit_regression(&mut net, &inputs, &labels, &cfg, &mut rng).unwrap();
        for x in &inputs {
            let y = net.forward(x).unwrap()[0];
            assert!((y - 0.5).abs() < 1e-2, "prediction {y}");
        }
    }

    #[test]
    fn fits_noiseless_linear_relationship() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let train: Vec<Vec<f64>> = (0..300).map(|_| vec![rng.random_range(-1.0..1.0)]).collect();
        let train_y: Vec<f64> = train.iter().map(|x| 0.8 * x[0] + 0.1).collect();
        let test: Vec<Vec<f64>> = (0..100).map(|_| vec![rng.random_range(-1.0..1.0)]).collect();
        let test_y: Vec<f64> = test.iter().map(|x| 0.8 * x[0] + 0.1).collect();
        let mut net = MlpParams::init_uniform(&[1, 16, 1], &mut rng);
        let cfg = RegressionConfig { epochs: 80, minibatch: 32, learning_rate: 3e-3 };
        fit_regression(&mut net, &train, &train_y, &cfg, &mut rng).unwrap();
        let mse: f64 = test
            .iter()
            .zip(test_y.iter())
            .map(|(x, y)| (net.forward(x).unwrap()[0] - y).powi(2))
            .sum::<f64>()
            / test.len() as f64;
        assert!(mse.sqrt() < 0.05, "held-out RMSE {}", mse.sqrt());
    }
}
