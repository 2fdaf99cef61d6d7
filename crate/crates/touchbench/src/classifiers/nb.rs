//! Gaussian naive Bayes with a per-class per-feature variance floor.

use serde::Serialize;

use crate::classifiers::{softmax, TrainError};

#[derive(Debug, Clone, Serialize)]
pub struct NbParams {
    pub var_floor: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams { var_floor: 1e-9 }
    }
}

#[derive(Debug)]
pub struct NbModel {
    means: Vec<Vec<f64>>,
    vars: Vec<Vec<f64>>,
    log_priors: Vec<f64>,
}

pub(crate) fn fit(
    params: &NbParams,
    x: &[Vec<f64>],
    y: &[usize],
    classes: &[u32],
    n_classes: usize,
) -> Result<NbModel, TrainError> {
    assert!(params.var_floor > 0.0, "variance floor must be positive");
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
    let mut vars = vec![vec![0.0; d]; n_classes];
    for (row, &c) in x.iter().zip(y) {
        for (j, v) in row.iter().enumerate() {
            let dv = v - means[c][j];
            vars[c][j] += dv * dv;
        }
    }
    for (c, &count) in counts.iter().enumerate() {
        for vj in &mut vars[c] {
            *vj = *vj / count as f64 + params.var_floor;
        }
    }
    let log_priors = counts
        .iter()
        .map(|&c| (c as f64 / n as f64).ln())
        .collect();
    Ok(NbModel {
        means,
        vars,
        log_priors,
    })
}

impl NbModel {
    fn log_joint(&self, row: &[f64]) -> Vec<f64> {
        const LN_2PI: f64 = 1.8378770664093453;
        self.log_priors
            .iter()
            .enumerate()
            .map(|(c, &lp)| {
                let mut ll = lp;
                for ((&v, &m), &var) in row.iter().zip(&self.means[c]).zip(&self.vars[c]) {
                    let dv = v - m;
                    ll -= 0.5 * (LN_2PI + var.ln() + dv * dv / var);
                }
                ll
            })
            .collect()
    }

    pub(crate) fn proba1(&self, row: &[f64]) -> Vec<f64> {
        softmax(&self.log_joint(row))
    }
}
