//! CART decision tree with the Gini split criterion.
//!
//! Best-split search scans midpoints of sorted distinct values for every
//! feature. No depth cap by default, so consistent training data is
//! memorized exactly.

use serde::Serialize;
use thiserror::Error;

use crate::classifiers::argmax;

#[derive(Debug, Clone, Serialize)]
pub struct CartParams {
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            max_depth: None,
            min_leaf: 1,
        }
    }
}

#[derive(Debug, Error)]
#[error("gini impurity of an empty node")]
pub struct EmptyNode;

/// Gini impurity 1 - sum((n_i/n)^2) of a label-count vector.
pub fn gini_impurity(counts: &[usize]) -> Result<f64, EmptyNode> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(EmptyNode);
    }
    let total = total as f64;
    Ok(1.0
        - counts
            .iter()
            .map(|&c| {
                let p = c as f64 / total;
                p * p
            })
            .sum::<f64>())
}

#[derive(Debug)]
enum Node {
    Leaf {
        counts: Vec<usize>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug)]
pub struct CartModel {
    root: Node,
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [usize],
    n_classes: usize,
    params: &'a CartParams,
}

impl Builder<'_> {
    fn counts_of(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes];
        for &i in rows {
            counts[self.y[i]] += 1;
        }
        counts
    }

    /// Best (feature, threshold) by weighted-Gini decrease. Zero-gain
    /// splits are allowed on impure nodes (needed to carve through
    /// xor-like plateaus where no single split helps immediately).
    /// Deterministic: strictly-better comparisons keep the lowest feature
    /// index and lowest threshold among equals.
    fn best_split(&self, rows: &[usize], parent_gini: f64) -> Option<(usize, f64)> {
        let d = self.x[0].len();
        let n = rows.len() as f64;
        let min_leaf = self.params.min_leaf;
        let mut best: Option<(f64, usize, f64)> = None;
        for feature in 0..d {
            let mut ordered: Vec<usize> = rows.to_vec();
            ordered.sort_by(|&a, &b| {
                self.x[a][feature]
                    .partial_cmp(&self.x[b][feature])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let mut left = vec![0usize; self.n_classes];
            let mut right = self.counts_of(rows);
            for w in 0..ordered.len() - 1 {
                let i = ordered[w];
                left[self.y[i]] += 1;
                right[self.y[i]] -= 1;
                let v = self.x[i][feature];
                let next = self.x[ordered[w + 1]][feature];
                if v == next {
                    continue;
                }
                let n_left = w + 1;
                let n_right = ordered.len() - n_left;
                if n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                let weighted = (n_left as f64 * gini_impurity(&left).unwrap()
                    + n_right as f64 * gini_impurity(&right).unwrap())
                    / n;
                let gain = parent_gini - weighted;
                if best.map_or(true, |(g, _, _)| gain > g + 1e-15) {
                    best = Some((gain, feature, (v + next) / 2.0));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn build(&self, rows: &[usize], depth: usize) -> Node {
        let counts = self.counts_of(rows);
        let gini = gini_impurity(&counts).unwrap();
        let depth_capped = self.params.max_depth.map_or(false, |cap| depth >= cap);
        if gini == 0.0 || depth_capped || rows.len() < 2 * self.params.min_leaf {
            return Node::Leaf { counts };
        }
        match self.best_split(rows, gini) {
            None => Node::Leaf { counts },
            Some((feature, threshold)) => {
                let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&i| self.x[i][feature] <= threshold);
                Node::Split {
                    feature,
                    threshold,
                    left: Box::new(self.build(&left_rows, depth + 1)),
                    right: Box::new(self.build(&right_rows, depth + 1)),
                }
            }
        }
    }
}

pub(crate) fn fit(params: &CartParams, x: &[Vec<f64>], y: &[usize], n_classes: usize) -> CartModel {
    let builder = Builder {
        x,
        y,
        n_classes,
        params,
    };
    let rows: Vec<usize> = (0..x.len()).collect();
    CartModel {
        root: builder.build(&rows, 0),
    }
}

impl CartModel {
    fn leaf_counts(&self, row: &[f64]) -> &[usize] {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub(crate) fn predict1(&self, row: &[f64]) -> usize {
        let counts = self.leaf_counts(row);
        let as_f64: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        argmax(&as_f64)
    }

    /// Training-label frequencies of the reached leaf.
    pub(crate) fn proba1(&self, row: &[f64]) -> Vec<f64> {
        let counts = self.leaf_counts(row);
        let total: usize = counts.iter().sum();
        counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect()
    }

    #[cfg(test)]
    fn depth(&self) -> usize {
        fn walk(node: &Node) -> usize {
            match node {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }
}
