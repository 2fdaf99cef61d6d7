//! Touch-stroke behavioral biometrics benchmark.
//!
//! Pipeline: raw touch-event logs are segmented into strokes, strokes are
//! turned into per-stroke behavioral feature vectors, a wrapper genetic
//! algorithm selects a feature subset, and a suite of from-scratch
//! classifiers is trained and scored (accuracy, confusion matrix, per-user
//! equal error rate).

pub mod classifiers;
pub mod cli;
pub mod dataset;
pub mod eval;
pub mod features;
pub mod ga;
pub mod ingest;
pub mod linalg;
