//! Multilayer perceptron parameters, forward pass, and reverse-mode gradients.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{CoreError, Result};
use crate::scalar::{lit, Scalar};

/// One affine layer. Weights are row-major `[out][in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<F> {
    pub w: Vec<F>,
    pub b: Vec<F>,
}

/// Feed-forward network parameters.
///
/// `sizes` lists the layer widths including input and output, e.g.
/// `[9, 64, 64, 2]`. Hidden activations are `tanh`, the output is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams<F> {
    sizes: Vec<usize>,
    layers: Vec<Dense<F>>,
}

/// Cached activations from a forward pass, consumed by [`MlpParams::backward`].
#[derive(Debug, Clone)]
pub struct MlpCache<F> {
    /// Post-activation values per layer boundary; `acts[0]` is the input,
    /// `acts.last()` the network output.
    acts: Vec<Vec<F>>,
}

impl<F: Scalar> MlpCache<F> {
    pub fn output(&self) -> &[F] {
        self.acts.last().expect("cache holds at least the input")
    }
}

impl<F: Scalar> MlpParams<F> {
    /// All-zero network with the given layer sizes.
    pub fn zeros(sizes: &[usize]) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output sizes");
        let layers = sizes
            .windows(2)
            .map(|w| Dense {
                w: vec![F::zero(); w[0] * w[1]],
                b: vec![F::zero(); w[1]],
            })
            .collect();
        Self {
            sizes: sizes.to_vec(),
            layers,
        }
    }

    /// Orthogonal initialization for policy networks: hidden layers use gain
    /// `sqrt(2)`, the final layer is scaled down by `0.01` so initial actions
    /// stay near zero.
    pub fn init_policy<R: Rng>(sizes: &[usize], rng: &mut R) -> Self {
        let mut net = Self::zeros(sizes);
        let last = net.layers.len() - 1;
        for (i, layer) in net.layers.iter_mut().enumerate() {
            let (rows, cols) = (sizes[i + 1], sizes[i]);
            let gain = if i == last { 0.01 } else { std::f64::consts::SQRT_2 };
            orthogonal_fill(&mut layer.w, rows, cols, lit::<F>(gain), rng);
        }
        net
    }

    /// Scaled-uniform fan-in initialization for value functions and
    /// estimators: `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`.
    pub fn init_uniform<R: Rng>(sizes: &[usize], rng: &mut R) -> Self {
        let mut net = Self::zeros(sizes);
        for (i, layer) in net.layers.iter_mut().enumerate() {
            let bound = 1.0 / (sizes[i] as f64).sqrt();
            for v in layer.w.iter_mut().chain(layer.b.iter_mut()) {
                *v = lit(rng.random_range(-bound..bound));
            }
        }
        net
    }

    pub fn from_layers(sizes: Vec<usize>, layers: Vec<Dense<F>>) -> Result<Self> {
        if sizes.len() < 2 || layers.len() != sizes.len() - 1 {
            return Err(CoreError::Contract(format!(
                "layer count {} does not match sizes {:?}",
                layers.len(),
                sizes
            )));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.w.len() != sizes[i] * sizes[i + 1] || l.b.len() != sizes[i + 1] {
                return Err(CoreError::Contract(format!(
                    "layer {i} has {}x{} entries, sizes say {}x{}",
                    l.b.len(),
                    if l.b.is_empty() { 0 } else { l.w.len() / l.b.len() },
                    sizes[i + 1],
                    sizes[i]
                )));
            }
        }
        Ok(Self { sizes, layers })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn layers(&self) -> &[Dense<F>] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// Parameter tensors in a fixed order (layer 0 weights, layer 0 biases, ...),
    /// used by the optimizer. Gradient stores expose the same order.
    pub fn tensors_mut(&mut self) -> Vec<&mut [F]> {
        let mut out = Vec::with_capacity(self.layers.len() * 2);
        for l in &mut self.layers {
            out.push(l.w.as_mut_slice());
            out.push(l.b.as_mut_slice());
        }
        out
    }

    pub fn tensors(&self) -> Vec<&[F]> {
        let mut out = Vec::with_capacity(self.layers.len() * 2);
        for l in &self.layers {
            out.push(l.w.as_slice());
            out.push(l.b.as_slice());
        }
        out
    }

    /// Forward pass. Errors if the input dimension does not match layer 0.
    pub fn forward(&self, input: &[F]) -> Result<Vec<F>> {
        let mut cache = self.forward_cached(input)?;
        Ok(cache.acts.pop().expect("cache holds the output"))
    }

    /// Forward pass that keeps per-layer activations for [`Self::backward`].
    pub fn forward_cached(&self, input: &[F]) -> Result<MlpCache<F>> {
        if input.len() != self.sizes[0] {
            return Err(CoreError::Contract(format!(
                "input dimension {} does not match network input {}",
                input.len(),
                self.sizes[0]
            )));
        }
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(input.to_vec());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let x = acts.last().unwrap();
            let (n_in, n_out) = (self.sizes[i], self.sizes[i + 1]);
            let mut y = Vec::with_capacity(n_out);
            for o in 0..n_out {
                let row = &layer.w[o * n_in..(o + 1) * n_in];
                let mut acc = layer.b[o];
                for (w, v) in row.iter().zip(x.iter()) {
                    acc = acc + *w * *v;
                }
                y.push(if i == last { acc } else { acc.tanh() });
            }
            acts.push(y);
        }
        Ok(MlpCache { acts })
    }

    /// Reverse-mode gradients of a scalar loss given `d loss / d output`.
    ///
    /// Returns the parameter gradients (same shape as `self`) and the
    /// gradient with respect to the input.
    pub fn backward(&self, cache: &MlpCache<F>, output_grad: &[F]) -> (MlpParams<F>, Vec<F>) {
        assert_eq!(
            output_grad.len(),
            self.output_dim(),
            "output gradient dimension mismatch"
        );
        let mut grads = MlpParams::zeros(&self.sizes);
        let mut delta = output_grad.to_vec();
        for i in (0..self.layers.len()).rev() {
            let (n_in, n_out) = (self.sizes[i], self.sizes[i + 1]);
            let x = &cache.acts[i];
            // Output layer is linear; hidden layers need the tanh derivative
            // applied to the post-activation values stored in the cache.
            if i != self.layers.len() - 1 {
                let y = &cache.acts[i + 1];
                for (d, yv) in delta.iter_mut().zip(y.iter()) {
                    *d = *d * (F::one() - *yv * *yv);
                }
            }
            let g = &mut grads.layers[i];
            for o in 0..n_out {
                g.b[o] += delta[o];
                let row = &mut g.w[o * n_in..(o + 1) * n_in];
                for (gw, xv) in row.iter_mut().zip(x.iter()) {
                    *gw += delta[o] * *xv;
                }
            }
            let layer = &self.layers[i];
            let mut prev = vec![F::zero(); n_in];
            for o in 0..n_out {
                let row = &layer.w[o * n_in..(o + 1) * n_in];
                for (p, w) in prev.iter_mut().zip(row.iter()) {
                    *p += delta[o] * *w;
                }
            }
            delta = prev;
        }
        (grads, delta)
    }

    /// Accumulate `other`'s entries into `self` (gradient accumulation).
    pub fn add_assign(&mut self, other: &MlpParams<F>) {
        debug_assert_eq!(self.sizes, other.sizes);
        for (a, b) in self.layers.iter_mut().zip(other.layers.iter()) {
            for (x, y) in a.w.iter_mut().zip(b.w.iter()) {
                *x += *y;
            }
            for (x, y) in a.b.iter_mut().zip(b.b.iter()) {
                *x += *y;
            }
        }
    }

    /// Scale every entry (used to average accumulated gradients).
    pub fn scale(&mut self, factor: F) {
        for l in &mut self.layers {
            for v in l.w.iter_mut().chain(l.b.iter_mut()) {
                *v *= factor;
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.w.iter().chain(l.b.iter()).all(|v| v.is_finite()))
    }
}

/// Fill `w` (row-major `rows x cols`) with a gain-scaled orthogonal matrix
/// via modified Gram-Schmidt on Gaussian rows (or columns when `rows > cols`).
fn orthogonal_fill<F: Scalar, R: Rng>(w: &mut [F], rows: usize, cols: usize, gain: F, rng: &mut R) {
    let transpose = rows > cols;
    let (n, m) = if transpose { (cols, rows) } else { (rows, cols) };
    // n vectors of dimension m, n <= m, orthonormalized.
    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
        loop {
            for u in &vecs {
                let dot: f64 = v.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
                for (vi, ui) in v.iter_mut().zip(u.iter()) {
                    *vi -= dot * ui;
                }
            }
            let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for vi in v.iter_mut() {
                    *vi /= norm;
                }
                break;
            }
            // Degenerate draw; resample.
            v = (0..m).map(|_| StandardNormal.sample(rng)).collect();
        }
        vecs.push(v);
    }
    for r in 0..rows {
        for c in 0..cols {
            let val = if transpose { vecs[c][r] } else { vecs[r][c] };
            w[r * cols + c] = gain * lit::<F>(val);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn zero_net_maps_to_zero() {
        let net = MlpParams::<f64>::zeros(&[3, 4, 2]);
        let out = net.forward(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn single_identity_layer_is_identity() {
        let mut net = MlpParams::<f64>::zeros(&[3, 3]);
        for i in 0..3 {
            net.layers[0].w[i * 3 + i] = 1.0;
        }
        let x = [0.3, -1.7, 2.2];
        let out = net.forward(&x).unwrap();
        assert_eq!(out, x.to_vec());
    }

    #[test]
    fn two_layer_matches_hand_computation() {
        // 2-2-1 net evaluated by hand:
        //   h = tanh(W1 x + b1), y = W2 h + b2
        let mut net = MlpParams::<f64>::zeros(&[2, 2, 1]);
        net.layers[0].w = vec![0.5, -1.0, 0.25, 0.75];
        net.layers[0].b = vec![0.1, -0.2];
        net.layers[1].w = vec![2.0, -3.0];
        net.layers[1].b = vec![0.05];
        let x = [0.4, -0.6];
        let h0 = (0.5 * 0.4 + (-1.0) * (-0.6) + 0.1).tanh();
        let h1 = (0.25 * 0.4 + 0.75 * (-0.6) - 0.2).tanh();
        let expect = 2.0 * h0 - 3.0 * h1 + 0.05;
        let out = net.forward(&x).unwrap();
        assert!((out[0] - expect).abs() < 1e-15, "{} vs {}", out[0], expect);
    }

    #[test]
    fn input_dim_mismatch_errors() {
        let net = MlpParams::<f64>::zeros(&[3, 2]);
        assert!(net.forward(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn linear_gradients_are_outer_product() {
        let mut net = MlpParams::<f64>::zeros(&[3, 2]);
        net.layers[0].w = vec![0.1, 0.2, 0.3, -0.1, -0.2, -0.3];
        let x = [1.0, -2.0, 0.5];
        let cache = net.forward_cached(&x).unwrap();
        let og = [0.7, -1.3];
        let (grads, _) = net.backward(&cache, &og);
        for o in 0..2 {
            for i in 0..3 {
                assert_eq!(grads.layers[0].w[o * 3 + i], og[o] * x[i]);
            }
            assert_eq!(grads.layers[0].b[o], og[o]);
        }
    }

    #[test]
    fn zero_output_gradient_gives_zero_gradients() {
        let mut r = rng(7);
        let net = MlpParams::<f64>::init_uniform(&[4, 8, 3], &mut r);
        let x: Vec<f64> = (0..4).map(|i| i as f64 * 0.25 - 0.5).collect();
        let cache = net.forward_cached(&x).unwrap();
        let (grads, input_grad) = net.backward(&cache, &[0.0, 0.0, 0.0]);
        assert!(grads
            .layers()
            .iter()
            .all(|l| l.w.iter().chain(l.b.iter()).all(|&g| g == 0.0)));
        assert!(input_grad.iter().all(|&g| g == 0.0));
    }

    /// Central-difference oracle: perturb every parameter of a small random
    /// net and compare the analytic gradient of 0.5*||f(x) - y||^2.
    fn finite_diff_check(seed: u64) -> f64 {
        let mut r = rng(seed);
        let sizes = [3, 5, 4, 2];
        let net = MlpParams::<f64>::init_uniform(&sizes, &mut r);
        let x: Vec<f64> = (0..3).map(|_| r.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..2).map(|_| r.random_range(-1.0..1.0)).collect();

        let loss = |n: &MlpParams<f64>| -> f64 {
            let out = n.forward(&x).unwrap();
            out.iter().zip(y.iter()).map(|(o, t)| 0.5 * (o - t) * (o - t)).sum()
        };

        let cache = net.forward_cached(&x).unwrap();
        let og: Vec<f64> = cache.output().iter().zip(y.iter()).map(|(o, t)| o - t).collect();
        let (grads, _) = net.backward(&cache, &og);

        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for li in 0..net.layers.len() {
            for entry in 0..(net.layers[li].w.len() + net.layers[li].b.len()) {
                let read = |n: &MlpParams<f64>| {
                    let l = &n.layers[li];
                    if entry < l.w.len() {
                        l.w[entry]
                    } else {
                        l.b[entry - l.w.len()]
                    }
                };
                let write = |n: &mut MlpParams<f64>, v: f64| {
                    let l = &mut n.layers[li];
                    if entry < l.w.len() {
                        l.w[entry] = v;
                    } else {
                        l.b[entry - l.w.len()] = v;
                    }
                };
                let mut plus = net.clone();
                write(&mut plus, read(&net) + h);
                let mut minus = net.clone();
                write(&mut minus, read(&net) - h);
                let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
                let an = read(&grads);
                let rel = (an - fd).abs() / (an.abs() + fd.abs()).max(1e-8);
                worst = worst.max(rel);
            }
        }
        worst
    }

    #[test]
    fn gradients_match_central_differences() {
        // 100+ random nets, rel. error < 1e-4 against step-1e-5 differences.
        for seed in 0..120 {
            let worst = finite_diff_check(seed);
            assert!(worst < 1e-4, "seed {seed}: worst rel err {worst}");
        }
    }

    #[test]
    fn orthogonal_init_rows_are_orthonormal() {
        let mut r = rng(3);
        let net = MlpParams::<f64>::init_policy(&[8, 4, 2], &mut r);
        // 4x8 first layer: rows orthonormal up to the sqrt(2) gain.
        let w = &net.layers()[0].w;
        for a in 0..4 {
            for b in 0..4 {
                let dot: f64 = (0..8).map(|c| w[a * 8 + c] * w[b * 8 + c]).sum();
                let expect = if a == b { 2.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-9, "({a},{b}) dot {dot}");
            }
        }
    }

    #[test]
    fn forward_is_generic_over_scalar() {
        let net64 = MlpParams::<f64>::zeros(&[2, 2]);
        let net32 = MlpParams::<f32>::zeros(&[2, 2]);
        assert_eq!(net64.forward(&[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(net32.forward(&[1.0f32, 2.0]).unwrap(), vec![0.0f32, 0.0]);
    }
}
