//! Dense feed-forward network: ReLU hidden layers, softmax output,
//! cross-entropy loss, mini-batch gradient descent with momentum.
//!
//! The reference architecture stacks four dense layers
//! (input -> 3000 -> 1000 -> 300 -> classes); `build_dnn` reports its
//! exact parameter counts. Hidden widths are configurable so small
//! problems can train small nets.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::classifiers::softmax;

pub const REFERENCE_HIDDEN: [usize; 3] = [3000, 1000, 300];

#[derive(Debug, Clone, Serialize)]
pub struct DnnParams {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub momentum: f64,
}

impl Default for DnnParams {
    fn default() -> Self {
        DnnParams {
            hidden: REFERENCE_HIDDEN.to_vec(),
            learning_rate: 0.01,
            epochs: 50,
            batch_size: 32,
            momentum: 0.9,
        }
    }
}

/// Layer widths and exact dense-layer parameter counts
/// (in*out weights + out biases per layer).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NetworkSpec {
    pub widths: Vec<usize>,
    pub layer_parameter_counts: Vec<usize>,
    pub total_parameters: usize,
    pub trainable_parameters: usize,
    pub non_trainable_parameters: usize,
}

impl NetworkSpec {
    pub fn from_widths(widths: Vec<usize>) -> NetworkSpec {
        let layer_parameter_counts: Vec<usize> = widths
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .collect();
        let total_parameters = layer_parameter_counts.iter().sum();
        NetworkSpec {
            widths,
            layer_parameter_counts,
            total_parameters,
            trainable_parameters: total_parameters,
            non_trainable_parameters: 0,
        }
    }
}

/// The reference four-dense-layer architecture for `d` inputs and
/// `c` classes.
pub fn build_dnn(d: usize, c: usize) -> NetworkSpec {
    assert!(d >= 1 && c >= 2);
    let mut widths = vec![d];
    widths.extend_from_slice(&REFERENCE_HIDDEN);
    widths.push(c);
    NetworkSpec::from_widths(widths)
}

#[derive(Debug, Clone)]
struct Dense {
    in_dim: usize,
    out_dim: usize,
    /// out x in, row-major.
    w: Vec<f64>,
    b: Vec<f64>,
}

impl Dense {
    fn forward(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.out_dim {
            let row = &self.w[o * self.in_dim..(o + 1) * self.in_dim];
            let mut acc = self.b[o];
            for (wi, xi) in row.iter().zip(x) {
                acc += wi * xi;
            }
            out.push(acc);
        }
    }
}

/// A multilayer perceptron with explicit parameter access, so gradients
/// can be probed with finite differences.
#[derive(Debug, Clone)]
pub struct Mlp {
    layers: Vec<Dense>,
}

struct Gradients {
    w: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeros_like(mlp: &Mlp) -> Gradients {
        Gradients {
            w: mlp.layers.iter().map(|l| vec![0.0; l.w.len()]).collect(),
            b: mlp.layers.iter().map(|l| vec![0.0; l.b.len()]).collect(),
        }
    }
}

impl Mlp {
    /// He-initialized network for the given widths.
    pub fn new(widths: &[usize], rng: &mut ChaCha8Rng) -> Mlp {
        assert!(widths.len() >= 2);
        let layers = widths
            .windows(2)
            .map(|w| {
                let (in_dim, out_dim) = (w[0], w[1]);
                let init = Normal::new(0.0, (2.0 / in_dim as f64).sqrt()).unwrap();
                Dense {
                    in_dim,
                    out_dim,
                    w: (0..in_dim * out_dim).map(|_| init.sample(rng)).collect(),
                    b: vec![0.0; out_dim],
                }
            })
            .collect();
        Mlp { layers }
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for l in &self.layers {
            out.extend_from_slice(&l.w);
            out.extend_from_slice(&l.b);
        }
        out
    }

    pub fn set_params_flat(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.parameter_count());
        let mut offset = 0;
        for l in &mut self.layers {
            let (wn, bn) = (l.w.len(), l.b.len());
            l.w.copy_from_slice(&params[offset..offset + wn]);
            offset += wn;
            l.b.copy_from_slice(&params[offset..offset + bn]);
            offset += bn;
        }
    }

    /// Pre-activations and post-activations per layer for one input.
    fn forward_trace(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.to_vec());
        let mut buf = Vec::new();
        for (li, layer) in self.layers.iter().enumerate() {
            layer.forward(activations.last().unwrap(), &mut buf);
            if li + 1 < self.layers.len() {
                for v in buf.iter_mut() {
                    *v = v.max(0.0); // ReLU
                }
            }
            activations.push(buf.clone());
        }
        activations
    }

    pub fn proba1(&self, x: &[f64]) -> Vec<f64> {
        let trace = self.forward_trace(x);
        softmax(trace.last().unwrap())
    }

    /// Mean cross-entropy over a batch.
    pub fn loss(&self, x: &[Vec<f64>], y: &[usize]) -> f64 {
        let mut loss = 0.0;
        for (row, &label) in x.iter().zip(y) {
            loss -= self.proba1(row)[label].max(1e-300).ln();
        }
        loss / x.len() as f64
    }

    fn loss_and_grad(&self, x: &[Vec<f64>], y: &[usize]) -> (f64, Gradients) {
        let mut grads = Gradients::zeros_like(self);
        let mut loss = 0.0;
        let scale = 1.0 / x.len() as f64;
        for (row, &label) in x.iter().zip(y) {
            let activations = self.forward_trace(row);
            let probs = softmax(activations.last().unwrap());
            loss -= probs[label].max(1e-300).ln() * scale;
            // delta at the output: softmax cross-entropy gradient
            let mut delta: Vec<f64> = probs
                .iter()
                .enumerate()
                .map(|(c, &p)| (p - if c == label { 1.0 } else { 0.0 }) * scale)
                .collect();
            for li in (0..self.layers.len()).rev() {
                let layer = &self.layers[li];
                let input = &activations[li];
                for o in 0..layer.out_dim {
                    grads.b[li][o] += delta[o];
                    let row_grad = &mut grads.w[li][o * layer.in_dim..(o + 1) * layer.in_dim];
                    for (g, xi) in row_grad.iter_mut().zip(input) {
                        *g += delta[o] * xi;
                    }
                }
                if li > 0 {
                    let mut prev = vec![0.0; layer.in_dim];
                    for o in 0..layer.out_dim {
                        let w_row = &layer.w[o * layer.in_dim..(o + 1) * layer.in_dim];
                        for (p, wi) in prev.iter_mut().zip(w_row) {
                            *p += delta[o] * wi;
                        }
                    }
                    // ReLU mask of the layer below
                    for (p, &a) in prev.iter_mut().zip(&activations[li]) {
                        if a <= 0.0 {
                            *p = 0.0;
                        }
                    }
                    delta = prev;
                }
            }
        }
        (loss, grads)
    }

    /// Analytic gradient in the same flat layout as `params_flat`.
    pub fn grad_flat(&self, x: &[Vec<f64>], y: &[usize]) -> Vec<f64> {
        let (_, grads) = self.loss_and_grad(x, y);
        let mut out = Vec::with_capacity(self.parameter_count());
        for (w, b) in grads.w.iter().zip(&grads.b) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

#[derive(Debug)]
pub struct DnnModel {
    net: Mlp,
}

impl DnnModel {
    pub(crate) fn proba1(&self, row: &[f64]) -> Vec<f64> {
        self.net.proba1(row)
    }
}

/// Trains the network; returns the model and a per-epoch loss trace whose
/// first entry is the untrained loss.
pub(crate) fn fit(
    params: &DnnParams,
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    seed: u64,
) -> (DnnModel, Vec<f64>) {
    let d = x[0].len();
    let mut widths = vec![d];
    widths.extend_from_slice(&params.hidden);
    widths.push(n_classes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Mlp::new(&widths, &mut rng);
    let mut velocity = vec![0.0; net.parameter_count()];
    let mut order: Vec<usize> = (0..x.len()).collect();
    let mut trace = Vec::with_capacity(params.epochs + 1);
    trace.push(net.loss(x, y));
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(params.batch_size.max(1)) {
            let bx: Vec<Vec<f64>> = batch.iter().map(|&i| x[i].clone()).collect();
            let by: Vec<usize> = batch.iter().map(|&i| y[i]).collect();
            let grad = net.grad_flat(&bx, &by);
            let mut p = net.params_flat();
            for ((pi, vi), gi) in p.iter_mut().zip(&mut velocity).zip(&grad) {
                *vi = params.momentum * *vi - params.learning_rate * gi;
                *pi += *vi;
            }
            net.set_params_flat(&p);
        }
        trace.push(net.loss(x, y));
    }
    (DnnModel { net }, trace)
}
