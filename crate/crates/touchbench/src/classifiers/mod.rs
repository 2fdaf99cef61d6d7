//! From-scratch classifier suite: multinomial logistic regression, LDA,
//! kNN, CART, Gaussian naive Bayes, one-vs-rest SVM with an RBF kernel,
//! and a dense feed-forward network.

use serde::Serialize;
use thiserror::Error;

use crate::dataset::FeatureMatrix;

pub mod cart;
pub mod knn;
pub mod lda;
pub mod logreg;
pub mod mlp;
pub mod nb;
pub mod svm;

pub use cart::{gini_impurity, CartParams};
pub use knn::KnnParams;
pub use lda::LdaParams;
pub use logreg::LogRegParams;
pub use mlp::{build_dnn, DnnParams, Mlp, NetworkSpec};
pub use nb::NbParams;
pub use svm::{rbf_kernel, SvmParams};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("fewer than 2 classes in training labels")]
    NotEnoughClasses,
    #[error("class {0} has fewer than 2 samples")]
    DegenerateClass(u32),
    #[error("pooled covariance is singular; increase shrinkage")]
    SingularCovariance,
}

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Classifier kind plus its hyperparameters.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum ClassifierSpec {
    LogReg(LogRegParams),
    Lda(LdaParams),
    Knn(KnnParams),
    Cart(CartParams),
    GaussianNb(NbParams),
    SvmRbf(SvmParams),
    Dnn(DnnParams),
}

impl ClassifierSpec {
    /// Short CLI name: lr, lda, knn, cart, nb, svm, dnn.
    pub fn short_name(&self) -> &'static str {
        match self {
            ClassifierSpec::LogReg(_) => "lr",
            ClassifierSpec::Lda(_) => "lda",
            ClassifierSpec::Knn(_) => "knn",
            ClassifierSpec::Cart(_) => "cart",
            ClassifierSpec::GaussianNb(_) => "nb",
            ClassifierSpec::SvmRbf(_) => "svm",
            ClassifierSpec::Dnn(_) => "dnn",
        }
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            ClassifierSpec::LogReg(_) => "Logistic Regression (LR)",
            ClassifierSpec::Lda(_) => "Linear Discriminant Analysis (LDA)",
            ClassifierSpec::Knn(_) => "K-neighbors (kNN)",
            ClassifierSpec::Cart(_) => "Decision Tree (CART)",
            ClassifierSpec::GaussianNb(_) => "Gaussian Naive Bayes (NB)",
            ClassifierSpec::SvmRbf(_) => "Support Vector Machine (SVM)",
            ClassifierSpec::Dnn(_) => "Deep Neural Net (DNN)",
        }
    }

    pub fn from_short_name(name: &str) -> Option<ClassifierSpec> {
        match name.trim() {
            "lr" => Some(ClassifierSpec::LogReg(LogRegParams::default())),
            "lda" => Some(ClassifierSpec::Lda(LdaParams::default())),
            "knn" => Some(ClassifierSpec::Knn(KnnParams::default())),
            "cart" => Some(ClassifierSpec::Cart(CartParams::default())),
            "nb" => Some(ClassifierSpec::GaussianNb(NbParams::default())),
            "svm" => Some(ClassifierSpec::SvmRbf(SvmParams::default())),
            "dnn" => Some(ClassifierSpec::Dnn(DnnParams::default())),
            _ => None,
        }
    }

    /// Canonical benchmark ordering of the full suite.
    pub fn full_suite() -> Vec<ClassifierSpec> {
        ["lr", "lda", "knn", "cart", "nb", "svm", "dnn"]
            .iter()
            .map(|n| ClassifierSpec::from_short_name(n).unwrap())
            .collect()
    }
}

#[derive(Debug)]
pub(crate) enum ModelState {
    LogReg(logreg::LogRegModel),
    Lda(lda::LdaModel),
    Knn(knn::KnnModel),
    Cart(cart::CartModel),
    GaussianNb(nb::NbModel),
    SvmRbf(svm::SvmModel),
    Dnn(mlp::DnnModel),
}

/// A fitted classifier. Immutable after training; prediction is safe to
/// run concurrently.
#[derive(Debug)]
pub struct TrainedModel {
    pub classes: Vec<u32>,
    pub d: usize,
    pub seed: u64,
    /// Per-epoch training loss for the iterative kinds, empty otherwise.
    pub loss_trace: Vec<f64>,
    /// Set when training stopped at an iteration cap before convergence.
    pub warning: Option<String>,
    state: ModelState,
}

impl TrainedModel {
    fn check_dims(&self, rows: &[Vec<f64>]) -> Result<(), PredictError> {
        for row in rows {
            if row.len() != self.d {
                return Err(PredictError::DimensionMismatch {
                    expected: self.d,
                    got: row.len(),
                });
            }
        }
        Ok(())
    }

    /// One label per input row, drawn from the training class list.
    pub fn predict(&self, rows: &[Vec<f64>]) -> Result<Vec<u32>, PredictError> {
        self.check_dims(rows)?;
        Ok(rows
            .iter()
            .map(|row| {
                let idx = match &self.state {
                    ModelState::Knn(m) => m.predict1(row),
                    ModelState::Cart(m) => m.predict1(row),
                    ModelState::SvmRbf(m) => m.predict1(row),
                    _ => argmax(&self.proba1(row)),
                };
                self.classes[idx]
            })
            .collect())
    }

    /// Per-row class probabilities in `classes` order; each row sums to 1.
    pub fn predict_proba(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, PredictError> {
        self.check_dims(rows)?;
        Ok(rows.iter().map(|row| self.proba1(row)).collect())
    }

    fn proba1(&self, row: &[f64]) -> Vec<f64> {
        match &self.state {
            ModelState::LogReg(m) => m.proba1(row),
            ModelState::Lda(m) => m.proba1(row),
            ModelState::Knn(m) => m.proba1(row),
            ModelState::Cart(m) => m.proba1(row),
            ModelState::GaussianNb(m) => m.proba1(row),
            ModelState::SvmRbf(m) => m.proba1(row),
            ModelState::Dnn(m) => m.proba1(row),
        }
    }
}

/// Index of the largest value; ties resolve to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable softmax (max-shifted exponentials).
pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Trains `spec` on a (typically standardized) feature matrix.
pub fn train(spec: &ClassifierSpec, m: &FeatureMatrix, seed: u64) -> Result<TrainedModel, TrainError> {
    if m.n() == 0 {
        return Err(TrainError::EmptyTrainingSet);
    }
    let counts = m.class_counts();
    if counts.len() < 2 {
        return Err(TrainError::NotEnoughClasses);
    }
    let classes: Vec<u32> = counts.keys().cloned().collect();
    let y: Vec<usize> = m
        .labels
        .iter()
        .map(|l| classes.binary_search(l).unwrap())
        .collect();
    let c = classes.len();
    let d = m.d();

    let mut loss_trace = Vec::new();
    let mut warning = None;
    let state = match spec {
        ClassifierSpec::Knn(p) => ModelState::Knn(knn::fit(p, &m.rows, &y, c)),
        ClassifierSpec::Cart(p) => ModelState::Cart(cart::fit(p, &m.rows, &y, c)),
        ClassifierSpec::GaussianNb(p) => {
            ModelState::GaussianNb(nb::fit(p, &m.rows, &y, &classes, c)?)
        }
        ClassifierSpec::Lda(p) => ModelState::Lda(lda::fit(p, &m.rows, &y, &classes, c)?),
        ClassifierSpec::LogReg(p) => {
            let (model, trace) = logreg::fit(p, &m.rows, &y, c, seed);
            loss_trace = trace;
            ModelState::LogReg(model)
        }
        ClassifierSpec::Dnn(p) => {
            let (model, trace) = mlp::fit(p, &m.rows, &y, c, seed);
            loss_trace = trace;
            ModelState::Dnn(model)
        }
        ClassifierSpec::SvmRbf(p) => {
            let (model, converged) = svm::fit(p, &m.rows, &y, c, seed);
            if !converged {
                warning = Some("SMO hit its iteration cap before convergence".to_string());
            }
            ModelState::SvmRbf(model)
        }
    };
    Ok(TrainedModel {
        classes,
        d,
        seed,
        loss_trace,
        warning,
        state,
    })
}
