//! Multinomial logistic regression trained by mini-batch gradient descent
//! with momentum.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classifiers::softmax;
use crate::linalg::dot;

#[derive(Debug, Clone, Serialize)]
pub struct LogRegParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub momentum: f64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            learning_rate: 0.1,
            epochs: 200,
            batch_size: 32,
            momentum: 0.9,
        }
    }
}

#[derive(Debug)]
pub struct LogRegModel {
    /// c x d weight rows plus a bias per class.
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
}

impl LogRegModel {
    fn logits(&self, row: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, &b)| dot(w, row) + b)
            .collect()
    }

    pub(crate) fn proba1(&self, row: &[f64]) -> Vec<f64> {
        softmax(&self.logits(row))
    }
}

fn mean_cross_entropy(model: &LogRegModel, x: &[Vec<f64>], y: &[usize]) -> f64 {
    let mut loss = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let p = model.proba1(row);
        loss -= p[label].max(1e-300).ln();
    }
    loss / x.len() as f64
}

/// Returns the fitted model and the per-epoch loss trace; index 0 is the
/// loss of the untrained model.
pub(crate) fn fit(
    params: &LogRegParams,
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    seed: u64,
) -> (LogRegModel, Vec<f64>) {
    let d = x[0].len();
    let n = x.len();
    let mut model = LogRegModel {
        weights: vec![vec![0.0; d]; n_classes],
        biases: vec![0.0; n_classes],
    };
    let mut vel_w = vec![vec![0.0; d]; n_classes];
    let mut vel_b = vec![0.0; n_classes];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut trace = Vec::with_capacity(params.epochs + 1);
    trace.push(mean_cross_entropy(&model, x, y));
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(params.batch_size.max(1)) {
            let scale = 1.0 / batch.len() as f64;
            let mut grad_w = vec![vec![0.0; d]; n_classes];
            let mut grad_b = vec![0.0; n_classes];
            for &i in batch {
                let p = model.proba1(&x[i]);
                for c in 0..n_classes {
                    let err = (p[c] - if c == y[i] { 1.0 } else { 0.0 }) * scale;
                    grad_b[c] += err;
                    for (g, v) in grad_w[c].iter_mut().zip(&x[i]) {
                        *g += err * v;
                    }
                }
            }
            for c in 0..n_classes {
                vel_b[c] = params.momentum * vel_b[c] - params.learning_rate * grad_b[c];
                model.biases[c] += vel_b[c];
                for j in 0..d {
                    vel_w[c][j] =
                        params.momentum * vel_w[c][j] - params.learning_rate * grad_w[c][j];
                    model.weights[c][j] += vel_w[c][j];
                }
            }
        }
        trace.push(mean_cross_entropy(&model, x, y));
    }
    (model, trace)
}
