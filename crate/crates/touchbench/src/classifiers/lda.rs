//! Linear discriminant analysis with a pooled, shrunk covariance.
//!
//! The pooled within-class covariance is shrunk toward its diagonal:
//! S' = (1 - lambda) S + lambda diag(S), with the diagonal floored when
//! lambda > 0 so standardized zero-variance columns stay harmless.
//! Prediction uses the linear discriminants
//! delta_k(x) = x' S^-1 mu_k - 1/2 mu_k' S^-1 mu_k + ln pi_k.

use serde::Serialize;

use crate::classifiers::{softmax, TrainError};
use crate::linalg::{dot, Cholesky, SquareMatrix};

#[derive(Debug, Clone, Serialize)]
pub struct LdaParams {
    pub shrinkage: f64,
}

impl Default for LdaParams {
    fn default() -> Self {
        LdaParams { shrinkage: 1e-3 }
    }
}

#[derive(Debug)]
pub struct LdaModel {
    /// Precomputed S^-1 mu_k per class.
    weights: Vec<Vec<f64>>,
    /// -1/2 mu_k' S^-1 mu_k + ln pi_k per class.
    offsets: Vec<f64>,
}

/// Class means, pooled shrunk covariance, and priors, exposed for
/// inspection and tests.
pub struct LdaStatistics {
    pub means: Vec<Vec<f64>>,
    pub pooled_covariance: SquareMatrix,
    pub priors: Vec<f64>,
}

pub fn fit_statistics(
    x: &[Vec<f64>],
    y: &[usize],
    classes: &[u32],
    n_classes: usize,
    shrinkage: f64,
) -> Result<LdaStatistics, TrainError> {
    assert!((0.0..=1.0).contains(&shrinkage), "shrinkage must be in [0, 1]");
    let d = x[0].len();
    let n = x.len();
    let mut counts = vec![0usize; n_classes];
    let mut means = vec![vec![0.0; d]; n_classes];
    for (row, &c) in x.iter().zip(y) {
        counts[c] += 1;
        for (j, v) in row.iter().enumerate() {
            means[c][j] += v;
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        if count < 2 {
            return Err(TrainError::DegenerateClass(classes[c]));
        }
        for mj in &mut means[c] {
            *mj /= count as f64;
        }
    }

    let mut cov = SquareMatrix::zeros(d);
    for (row, &c) in x.iter().zip(y) {
        let centered: Vec<f64> = row.iter().zip(&means[c]).map(|(v, m)| v - m).collect();
        for i in 0..d {
            for j in i..d {
                *cov.at_mut(i, j) += centered[i] * centered[j];
            }
        }
    }
    let denom = (n - n_classes) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov.at(i, j) / denom;
            *cov.at_mut(i, j) = v;
            *cov.at_mut(j, i) = v;
        }
    }

    if shrinkage > 0.0 {
        let diag: Vec<f64> = (0..d).map(|i| cov.at(i, i)).collect();
        let positive_mean = {
            let pos: Vec<f64> = diag.iter().cloned().filter(|&v| v > 0.0).collect();
            if pos.is_empty() {
                1.0
            } else {
                pos.iter().sum::<f64>() / pos.len() as f64
            }
        };
        let floor = 1e-6 * positive_mean;
        for i in 0..d {
            for j in 0..d {
                let v = cov.at(i, j);
                *cov.at_mut(i, j) = if i == j {
                    ((1.0 - shrinkage) * v + shrinkage * diag[i]).max(floor)
                } else {
                    (1.0 - shrinkage) * v
                };
            }
        }
    }

    let priors = counts
        .iter()
        .map(|&c| c as f64 / n as f64)
        .collect();
    Ok(LdaStatistics {
        means,
        pooled_covariance: cov,
        priors,
    })
}

pub(crate) fn fit(
    params: &LdaParams,
    x: &[Vec<f64>],
    y: &[usize],
    classes: &[u32],
    n_classes: usize,
) -> Result<LdaModel, TrainError> {
    let stats = fit_statistics(x, y, classes, n_classes, params.shrinkage)?;
    let factor =
        Cholesky::factor(&stats.pooled_covariance).ok_or(TrainError::SingularCovariance)?;
    let mut weights = Vec::with_capacity(n_classes);
    let mut offsets = Vec::with_capacity(n_classes);
    for (mean, prior) in stats.means.iter().zip(&stats.priors) {
        let w = factor.solve(mean);
        offsets.push(-0.5 * dot(mean, &w) + prior.ln());
        weights.push(w);
    }
    Ok(LdaModel { weights, offsets })
}

impl LdaModel {
    pub(crate) fn discriminants(&self, row: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.offsets)
            .map(|(w, &o)| dot(row, w) + o)
            .collect()
    }

    pub(crate) fn proba1(&self, row: &[f64]) -> Vec<f64> {
        softmax(&self.discriminants(row))
    }
}
