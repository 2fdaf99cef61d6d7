//! One-vs-rest support vector machine with an RBF kernel, trained by
//! simplified SMO (pairwise alpha updates with random second choice).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classifiers::argmax;
use crate::linalg::squared_distance;

#[derive(Debug, Clone, Serialize)]
pub struct SvmParams {
    pub c: f64,
    /// Kernel width; defaults to 1/d when absent.
    pub gamma: Option<f64>,
    pub tol: f64,
    /// Cap on alpha updates per binary problem.
    pub max_iter: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            gamma: None,
            tol: 1e-3,
            max_iter: 10_000,
        }
    }
}

/// exp(-gamma * ||a - b||^2)
pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    assert_eq!(a.len(), b.len(), "kernel inputs must have equal length");
    assert!(gamma > 0.0, "gamma must be positive");
    (-gamma * squared_distance(a, b)).exp()
}

#[derive(Debug)]
struct BinarySvm {
    /// alpha_i * y_i for every training point (zeros for non-SVs).
    alpha_y: Vec<f64>,
    bias: f64,
}

#[derive(Debug)]
pub struct SvmModel {
    support: Vec<Vec<f64>>,
    gamma: f64,
    machines: Vec<BinarySvm>,
}

struct Smo<'a> {
    kernel: &'a [Vec<f64>],
    y: Vec<f64>,
    alpha: Vec<f64>,
    bias: f64,
    c: f64,
    tol: f64,
}

impl Smo<'_> {
    fn decision(&self, i: usize) -> f64 {
        let mut f = self.bias;
        for (j, &a) in self.alpha.iter().enumerate() {
            if a > 0.0 {
                f += a * self.y[j] * self.kernel[i][j];
            }
        }
        f
    }

    /// One pairwise update; true if the alphas changed.
    fn step(&mut self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let e_i = self.decision(i) - self.y[i];
        let e_j = self.decision(j) - self.y[j];
        let (alpha_i_old, alpha_j_old) = (self.alpha[i], self.alpha[j]);
        let (lo, hi) = if self.y[i] != self.y[j] {
            let diff = alpha_j_old - alpha_i_old;
            (diff.max(0.0), (self.c + diff).min(self.c))
        } else {
            let sum = alpha_i_old + alpha_j_old;
            ((sum - self.c).max(0.0), sum.min(self.c))
        };
        if hi - lo < 1e-12 {
            return false;
        }
        let eta = 2.0 * self.kernel[i][j] - self.kernel[i][i] - self.kernel[j][j];
        if eta >= 0.0 {
            return false;
        }
        let mut alpha_j = alpha_j_old - self.y[j] * (e_i - e_j) / eta;
        alpha_j = alpha_j.clamp(lo, hi);
        if (alpha_j - alpha_j_old).abs() < 1e-5 {
            return false;
        }
        let alpha_i = alpha_i_old + self.y[i] * self.y[j] * (alpha_j_old - alpha_j);
        self.alpha[i] = alpha_i;
        self.alpha[j] = alpha_j;

        let b1 = self.bias - e_i
            - self.y[i] * (alpha_i - alpha_i_old) * self.kernel[i][i]
            - self.y[j] * (alpha_j - alpha_j_old) * self.kernel[i][j];
        let b2 = self.bias - e_j
            - self.y[i] * (alpha_i - alpha_i_old) * self.kernel[i][j]
            - self.y[j] * (alpha_j - alpha_j_old) * self.kernel[j][j];
        self.bias = if alpha_i > 0.0 && alpha_i < self.c {
            b1
        } else if alpha_j > 0.0 && alpha_j < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        true
    }

    fn violates_kkt(&self, i: usize) -> bool {
        let r = (self.decision(i) - self.y[i]) * self.y[i];
        (r < -self.tol && self.alpha[i] < self.c) || (r > self.tol && self.alpha[i] > 0.0)
    }

    /// Returns true when a full sweep made no update before the cap.
    fn run(&mut self, max_iter: usize, rng: &mut ChaCha8Rng) -> bool {
        let n = self.y.len();
        let mut updates = 0usize;
        loop {
            let mut changed = 0usize;
            for i in 0..n {
                if updates >= max_iter {
                    return false;
                }
                if self.violates_kkt(i) {
                    let j = rng.gen_range(0..n);
                    if self.step(i, j) {
                        changed += 1;
                        updates += 1;
                    }
                }
            }
            if changed == 0 {
                return true;
            }
        }
    }
}

pub(crate) fn fit(
    params: &SvmParams,
    x: &[Vec<f64>],
    y: &[usize],
    n_classes: usize,
    seed: u64,
) -> (SvmModel, bool) {
    let n = x.len();
    let d = x[0].len();
    let gamma = params.gamma.unwrap_or(1.0 / d as f64);
    assert!(params.c > 0.0 && gamma > 0.0);
    let mut kernel = vec![vec![0.0; n]; n];
    for i in 0..n {
        kernel[i][i] = 1.0;
        for j in (i + 1)..n {
            let k = rbf_kernel(&x[i], &x[j], gamma);
            kernel[i][j] = k;
            kernel[j][i] = k;
        }
    }
    let mut machines = Vec::with_capacity(n_classes);
    let mut all_converged = true;
    for class in 0..n_classes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(class as u64 + 1);
        let mut smo = Smo {
            kernel: &kernel,
            y: y.iter().map(|&c| if c == class { 1.0 } else { -1.0 }).collect(),
            alpha: vec![0.0; n],
            bias: 0.0,
            c: params.c,
            tol: params.tol,
        };
        all_converged &= smo.run(params.max_iter, &mut rng);
        machines.push(BinarySvm {
            alpha_y: smo
                .alpha
                .iter()
                .zip(&smo.y)
                .map(|(&a, &yy)| a * yy)
                .collect(),
            bias: smo.bias,
        });
    }
    (
        SvmModel {
            support: x.to_vec(),
            gamma,
            machines,
        },
        all_converged,
    )
}

impl SvmModel {
    fn decisions(&self, row: &[f64]) -> Vec<f64> {
        let k: Vec<f64> = self
            .support
            .iter()
            .map(|s| rbf_kernel(s, row, self.gamma))
            .collect();
        self.machines
            .iter()
            .map(|m| {
                let mut f = m.bias;
                for (&ay, &kv) in m.alpha_y.iter().zip(&k) {
                    if ay != 0.0 {
                        f += ay * kv;
                    }
                }
                f
            })
            .collect()
    }

    pub(crate) fn predict1(&self, row: &[f64]) -> usize {
        argmax(&self.decisions(row))
    }

    /// Margin distances squashed through a logistic and normalized.
    pub(crate) fn proba1(&self, row: &[f64]) -> Vec<f64> {
        let squashed: Vec<f64> = self
            .decisions(row)
            .iter()
            .map(|&f| 1.0 / (1.0 + (-f).exp()))
            .collect();
        let sum: f64 = squashed.iter().sum();
        squashed.into_iter().map(|v| v / sum).collect()
    }

    #[cfg(test)]
    fn machine_alphas(&self, class: usize) -> Vec<f64> {
        self.machines[class].alpha_y.iter().map(|v| v.abs()).collect()
    }
}
