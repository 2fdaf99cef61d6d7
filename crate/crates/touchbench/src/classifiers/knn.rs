//! Brute-force k-nearest-neighbor classifier on Euclidean distance.

use serde::Serialize;

use crate::linalg::squared_distance;

#[derive(Debug, Clone, Serialize)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

#[derive(Debug)]
pub struct KnnModel {
    k: usize,
    x: Vec<Vec<f64>>,
    y: Vec<usize>,
    n_classes: usize,
}

pub(crate) fn fit(params: &KnnParams, x: &[Vec<f64>], y: &[usize], n_classes: usize) -> KnnModel {
    assert!(params.k >= 1, "k must be at least 1");
    KnnModel {
        k: params.k,
        x: x.to_vec(),
        y: y.to_vec(),
        n_classes,
    }
}

impl KnnModel {
    /// The k nearest training indices, ordered by (distance, index).
    fn neighbors(&self, row: &[f64]) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.x.len()).collect();
        let dist2: Vec<f64> = self.x.iter().map(|p| squared_distance(p, row)).collect();
        order.sort_by(|&a, &b| dist2[a].partial_cmp(&dist2[b]).unwrap().then(a.cmp(&b)));
        order.truncate(self.k.min(self.x.len()));
        order
    }

    /// Majority vote; ties broken by summed inverse distance, then by the
    /// lowest class index.
    pub(crate) fn predict1(&self, row: &[f64]) -> usize {
        let neighbors = self.neighbors(row);
        let mut votes = vec![0usize; self.n_classes];
        let mut inv_dist = vec![0.0f64; self.n_classes];
        for &i in &neighbors {
            votes[self.y[i]] += 1;
            let dist = squared_distance(&self.x[i], row).sqrt();
            inv_dist[self.y[i]] += if dist == 0.0 { 1e12 } else { 1.0 / dist };
        }
        let max_votes = *votes.iter().max().unwrap();
        (0..self.n_classes)
            .filter(|&c| votes[c] == max_votes)
            .max_by(|&a, &b| {
                inv_dist[a]
                    .partial_cmp(&inv_dist[b])
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap()
    }

    /// Vote fractions over the k neighbors.
    pub(crate) fn proba1(&self, row: &[f64]) -> Vec<f64> {
        let neighbors = self.neighbors(row);
        let mut votes = vec![0.0f64; self.n_classes];
        for &i in &neighbors {
            votes[self.y[i]] += 1.0;
        }
        let total = neighbors.len() as f64;
        votes.iter_mut().for_each(|v| *v /= total);
        votes
    }
}
