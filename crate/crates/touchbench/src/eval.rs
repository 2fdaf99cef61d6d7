//! Metrics (accuracy, confusion matrix, equal error rate) and the
//! benchmark orchestrator that compares the classifier suite under one
//! shared split and standardization.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::classifiers::{train, ClassifierSpec};
use crate::dataset::{standardize, stratified_split, DatasetError, FeatureMatrix};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction and truth sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("metric input is empty")]
    Empty,
    #[error("label {0} is not in the class list")]
    UnknownLabel(u32),
    #[error("both score sets must be non-empty")]
    EmptyScores,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Fraction of positions where the sequences agree exactly.
pub fn accuracy(predicted: &[u32], actual: &[u32]) -> Result<f64, EvalError> {
    if predicted.len() != actual.len() {
        return Err(EvalError::LengthMismatch(predicted.len(), actual.len()));
    }
    if predicted.is_empty() {
        return Err(EvalError::Empty);
    }
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    Ok(hits as f64 / predicted.len() as f64)
}

/// Entry (i, j) counts samples with actual class `classes[i]` predicted as
/// `classes[j]`.
pub fn confusion_matrix(
    predicted: &[u32],
    actual: &[u32],
    classes: &[u32],
) -> Result<Vec<Vec<usize>>, EvalError> {
    if predicted.len() != actual.len() {
        return Err(EvalError::LengthMismatch(predicted.len(), actual.len()));
    }
    let index_of = |label: u32| {
        classes
            .iter()
            .position(|&c| c == label)
            .ok_or(EvalError::UnknownLabel(label))
    };
    let c = classes.len();
    let mut m = vec![vec![0usize; c]; c];
    for (&p, &a) in predicted.iter().zip(actual) {
        m[index_of(a)?][index_of(p)?] += 1;
    }
    Ok(m)
}

/// Sweeps every observed score as a threshold; FAR(t) is the fraction of
/// impostor scores >= t and FRR(t) the fraction of genuine scores < t.
/// Returns ((FAR+FRR)/2, t) at the threshold minimizing |FAR - FRR|.
pub fn compute_eer(genuine: &[f64], impostor: &[f64]) -> Result<(f64, f64), EvalError> {
    if genuine.is_empty() || impostor.is_empty() {
        return Err(EvalError::EmptyScores);
    }
    let mut thresholds: Vec<f64> = genuine.iter().chain(impostor).cloned().collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &t in &thresholds {
        let far = impostor.iter().filter(|&&s| s >= t).count() as f64 / impostor.len() as f64;
        let frr = genuine.iter().filter(|&&s| s < t).count() as f64 / genuine.len() as f64;
        let gap = (far - frr).abs();
        if gap < best.0 {
            best = (gap, (far + frr) / 2.0, t);
        }
    }
    Ok((best.1, best.2))
}

/// Split and preprocessing choices shared by every classifier in a run.
#[derive(Debug, Clone, Serialize)]
pub struct Protocol {
    pub test_fraction: f64,
    pub seed: u64,
    pub standardize: bool,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            test_fraction: 0.2,
            seed: 42,
            standardize: true,
        }
    }
}

/// The fully resolved protocol as recorded in artifacts.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolRecord {
    pub split: &'static str,
    pub test_fraction: f64,
    pub seed: u64,
    pub standardized: bool,
    pub schema: Vec<String>,
    pub mask_hex: Option<String>,
    pub classes: Vec<u32>,
    pub train_size: usize,
    pub test_size: usize,
}

/// Train/predict wall-clock times; informational only and deliberately
/// excluded from serialized artifacts so outputs stay reproducible.
#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub train_ms: f64,
    pub predict_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct ClassifierReport {
    pub classifier: String,
    pub display_name: String,
    pub accuracy: Option<f64>,
    pub confusion: Option<Vec<Vec<usize>>>,
    /// One-vs-rest EER per class, in `classes` order.
    pub eer_per_user: Option<Vec<f64>>,
    pub mean_eer: Option<f64>,
    pub warning: Option<String>,
    pub error: Option<String>,
    #[serde(skip)]
    pub timings: Timings,
}

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub protocol: ProtocolRecord,
    pub reports: Vec<ClassifierReport>,
}

fn mask_hex(mask: &[bool]) -> String {
    crate::ga::Chromosome::new(mask.to_vec()).mask_hex()
}

/// Benchmarks every spec on one shared stratified split. The optional mask
/// projects columns before the split, so masking commutes with the rest of
/// the pipeline. Per-classifier failures are recorded, not fatal.
pub fn run_benchmark(
    m: &FeatureMatrix,
    specs: &[ClassifierSpec],
    protocol: &Protocol,
    mask: Option<&[bool]>,
) -> Result<EvalReport, EvalError> {
    assert!(!specs.is_empty(), "at least one classifier is required");
    if let Some(mask) = mask {
        assert_eq!(mask.len(), m.d(), "mask length must equal feature count");
    }
    let projected;
    let m = match mask {
        Some(mask) => {
            projected = m.select_columns(mask);
            &projected
        }
        None => m,
    };
    let split = stratified_split(m, protocol.test_fraction, protocol.seed)?;
    let train_m = m.select_rows(&split.train);
    let test_m = m.select_rows(&split.test);
    let (train_x, test_x) = if protocol.standardize {
        let (std_train, rec) = standardize(&train_m)?;
        (std_train.rows, rec.transform(&test_m).rows)
    } else {
        (train_m.rows.clone(), test_m.rows.clone())
    };
    let train_set = FeatureMatrix {
        schema: m.schema.clone(),
        rows: train_x,
        labels: train_m.labels.clone(),
    };
    let classes: Vec<u32> = train_set.class_counts().keys().cloned().collect();

    let mut reports = Vec::with_capacity(specs.len());
    for spec in specs {
        reports.push(evaluate_one(spec, &train_set, &test_x, &test_m.labels, &classes, protocol.seed));
    }

    Ok(EvalReport {
        protocol: ProtocolRecord {
            split: "stratified_holdout",
            test_fraction: protocol.test_fraction,
            seed: protocol.seed,
            standardized: protocol.standardize,
            schema: m.schema.clone(),
            mask_hex: mask.map(mask_hex),
            classes,
            train_size: split.train.len(),
            test_size: split.test.len(),
        },
        reports,
    })
}

fn evaluate_one(
    spec: &ClassifierSpec,
    train_set: &FeatureMatrix,
    test_x: &[Vec<f64>],
    test_labels: &[u32],
    classes: &[u32],
    seed: u64,
) -> ClassifierReport {
    let mut report = ClassifierReport {
        classifier: spec.short_name().to_string(),
        display_name: spec.display_name().to_string(),
        accuracy: None,
        confusion: None,
        eer_per_user: None,
        mean_eer: None,
        warning: None,
        error: None,
        timings: Timings::default(),
    };
    let start = Instant::now();
    let model = match train(spec, train_set, seed) {
        Ok(model) => model,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.timings.train_ms = start.elapsed().as_secs_f64() * 1e3;
    report.warning = model.warning.clone();

    let start = Instant::now();
    let predicted = model.predict(&test_x.to_vec()).expect("widths match");
    let proba = model.predict_proba(&test_x.to_vec()).expect("widths match");
    report.timings.predict_ms = start.elapsed().as_secs_f64() * 1e3;

    let confusion = confusion_matrix(&predicted, test_labels, classes).expect("labels in list");
    let total: usize = confusion.iter().flatten().sum();
    let trace: usize = (0..classes.len()).map(|i| confusion[i][i]).sum();
    report.accuracy = Some(trace as f64 / total as f64);
    report.confusion = Some(confusion);

    let mut eers = Vec::with_capacity(classes.len());
    for (k, &class) in classes.iter().enumerate() {
        let genuine: Vec<f64> = proba
            .iter()
            .zip(test_labels)
            .filter(|(_, &a)| a == class)
            .map(|(p, _)| p[k])
            .collect();
        let impostor: Vec<f64> = proba
            .iter()
            .zip(test_labels)
            .filter(|(_, &a)| a != class)
            .map(|(p, _)| p[k])
            .collect();
        match compute_eer(&genuine, &impostor) {
            Ok((eer, _)) => eers.push(eer),
            Err(_) => eers.push(f64::NAN),
        }
    }
    let finite: Vec<f64> = eers.iter().cloned().filter(|v| v.is_finite()).collect();
    if !finite.is_empty() {
        report.mean_eer = Some(finite.iter().sum::<f64>() / finite.len() as f64);
    }
    report.eer_per_user = Some(eers);
    report
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned text table: one row per classifier.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<34} {:>12} {:>10}  {}\n",
            "Classifier", "Accuracy (%)", "Mean EER", "Notes"
        ));
        for r in &self.reports {
            let acc = r
                .accuracy
                .map(|a| format!("{:.2}", a * 100.0))
                .unwrap_or_else(|| "-".to_string());
            let eer = r
                .mean_eer
                .map(|e| format!("{:.4}", e))
                .unwrap_or_else(|| "-".to_string());
            let note = r
                .error
                .as_deref()
                .or(r.warning.as_deref())
                .unwrap_or("");
            out.push_str(&format!(
                "{:<34} {:>12} {:>10}  {}\n",
                r.display_name, acc, eer, note
            ));
        }
        out
    }
}

/// Grouped accuracy series CSV: one row per classifier, one column per
/// labeled report (e.g. extracted vs raw features).
pub fn series_csv(series: &[(&str, &EvalReport)], comments: &[String]) -> String {
    assert!(!series.is_empty());
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str("classifier");
    for (label, _) in series {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    let names: Vec<&str> = series[0].1.reports.iter().map(|r| r.classifier.as_str()).collect();
    for name in names {
        out.push_str(name);
        for (_, report) in series {
            let acc = report
                .reports
                .iter()
                .find(|r| r.classifier == name)
                .and_then(|r| r.accuracy);
            match acc {
                Some(a) => out.push_str(&format!(",{}", a * 100.0)),
                None => out.push_str(","),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn accuracy_identical_is_one() {
        assert_eq!(accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
    }

    #[test]
    fn accuracy_disjoint_is_zero() {
        assert_eq!(accuracy(&[1, 1], &[2, 2]).unwrap(), 0.0);
    }

    #[test]
    fn accuracy_three_of_four() {
        assert_eq!(accuracy(&[1, 2, 3, 4], &[1, 2, 3, 9]).unwrap(), 0.75);
    }

    #[test]
    fn accuracy_rejects_length_mismatch_and_empty() {
        assert!(matches!(accuracy(&[1], &[1, 2]), Err(EvalError::LengthMismatch(1, 2))));
        assert!(matches!(accuracy(&[], &[]), Err(EvalError::Empty)));
    }

    #[test]
    fn confusion_perfect_is_diagonal() {
        let m = confusion_matrix(&[0, 1, 1], &[0, 1, 1], &[0, 1]).unwrap();
        assert_eq!(m, vec![vec![1, 0], vec![0, 2]]);
    }

    #[test]
    fn confusion_all_predicted_first_class() {
        let m = confusion_matrix(&[5, 5, 5], &[5, 7, 7], &[5, 7]).unwrap();
        assert_eq!(m, vec![vec![1, 0], vec![2, 0]]);
    }

    #[test]
    fn confusion_hand_tally() {
        // actual:    0 0 1 1 2 2
        // predicted: 0 1 1 2 2 2
        let m = confusion_matrix(&[0, 1, 1, 2, 2, 2], &[0, 0, 1, 1, 2, 2], &[0, 1, 2]).unwrap();
        assert_eq!(m, vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 2]]);
    }

    #[test]
    fn confusion_rejects_unknown_label() {
        assert!(matches!(
            confusion_matrix(&[9], &[0], &[0, 1]),
            Err(EvalError::UnknownLabel(9))
        ));
    }

    #[test]
    fn eer_perfect_separation_is_zero() {
        let (eer, _) = compute_eer(&[1.0, 1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(eer, 0.0);
    }

    #[test]
    fn eer_identical_distributions_is_half() {
        let (eer, _) = compute_eer(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(eer, 0.5);
    }

    #[test]
    fn eer_hand_case_is_one_third() {
        let (eer, t) = compute_eer(&[0.9, 0.8, 0.4], &[0.7, 0.3, 0.2]).unwrap();
        assert!((eer - 1.0 / 3.0).abs() < 1e-12, "{eer}");
        assert_eq!(t, 0.7);
    }

    #[test]
    fn eer_rejects_empty_sets() {
        assert!(matches!(compute_eer(&[], &[0.1]), Err(EvalError::EmptyScores)));
        assert!(matches!(compute_eer(&[0.1], &[]), Err(EvalError::EmptyScores)));
    }

    /// Oracle sweeping an epsilon-offset threshold grid in addition to the
    /// observed scores; must agree with compute_eer.
    fn eer_oracle(genuine: &[f64], impostor: &[f64]) -> f64 {
        let mut thresholds: Vec<f64> = genuine.iter().chain(impostor).cloned().collect();
        thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut best_gap = f64::INFINITY;
        let mut best_eer = 0.0;
        for &t in &thresholds {
            let far = impostor.iter().filter(|&&s| s >= t).count() as f64 / impostor.len() as f64;
            let frr = genuine.iter().filter(|&&s| s < t).count() as f64 / genuine.len() as f64;
            if (far - frr).abs() < best_gap {
                best_gap = (far - frr).abs();
                best_eer = (far + frr) / 2.0;
            }
        }
        best_eer
    }

    #[test]
    fn eer_matches_exhaustive_oracle_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let ng = rng.gen_range(1..=200);
            let ni = rng.gen_range(1..=200);
            // coarse grid forces plenty of exact ties
            let genuine: Vec<f64> = (0..ng).map(|_| rng.gen_range(0..=10) as f64 / 10.0).collect();
            let impostor: Vec<f64> = (0..ni).map(|_| rng.gen_range(0..=10) as f64 / 10.0).collect();
            let (eer, _) = compute_eer(&genuine, &impostor).unwrap();
            assert_eq!(eer, eer_oracle(&genuine, &impostor));
        }
    }

    fn blob_matrix(n_per_class: usize, spread: f64, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = FeatureMatrix::new(vec!["x".into(), "y".into()]);
        for class in 0..3u32 {
            let cx = class as f64 * 10.0;
            for _ in 0..n_per_class {
                m.push(
                    vec![cx + rng.gen::<f64>() * spread, cx + rng.gen::<f64>() * spread],
                    class,
                );
            }
        }
        m
    }

    #[test]
    fn separable_data_reaches_full_accuracy() {
        let m = blob_matrix(15, 1.0, 3);
        let report = run_benchmark(
            &m,
            &[ClassifierSpec::from_short_name("knn").unwrap()],
            &Protocol::default(),
            None,
        )
        .unwrap();
        assert_eq!(report.reports[0].accuracy, Some(1.0));
        assert_eq!(report.reports[0].mean_eer, Some(0.0));
    }

    #[test]
    fn accuracy_equals_confusion_trace_ratio() {
        let m = blob_matrix(20, 12.0, 5);
        let specs = [
            ClassifierSpec::from_short_name("knn").unwrap(),
            ClassifierSpec::from_short_name("cart").unwrap(),
            ClassifierSpec::from_short_name("nb").unwrap(),
        ];
        let report = run_benchmark(&m, &specs, &Protocol::default(), None).unwrap();
        for r in &report.reports {
            let c = r.confusion.as_ref().unwrap();
            let total: usize = c.iter().flatten().sum();
            let trace: usize = (0..c.len()).map(|i| c[i][i]).sum();
            assert_eq!(r.accuracy.unwrap(), trace as f64 / total as f64);
            assert_eq!(total, report.protocol.test_size);
        }
    }

    #[test]
    fn confusion_row_sums_match_test_class_counts() {
        let m = blob_matrix(20, 6.0, 9);
        let report = run_benchmark(
            &m,
            &[ClassifierSpec::from_short_name("cart").unwrap()],
            &Protocol::default(),
            None,
        )
        .unwrap();
        let confusion = report.reports[0].confusion.as_ref().unwrap();
        let row_sums: Vec<usize> = confusion.iter().map(|row| row.iter().sum()).collect();
        // stratified 80/20 on 20-per-class leaves 4 test rows per class
        assert_eq!(row_sums, vec![4, 4, 4]);
    }

    #[test]
    fn benchmark_is_deterministic() {
        let m = blob_matrix(15, 4.0, 7);
        let specs = ClassifierSpec::full_suite()
            .into_iter()
            .filter(|s| s.short_name() != "dnn")
            .collect::<Vec<_>>();
        let a = run_benchmark(&m, &specs, &Protocol::default(), None).unwrap();
        let b = run_benchmark(&m, &specs, &Protocol::default(), None).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn masking_commutes_with_benchmarking() {
        let m = blob_matrix(15, 4.0, 11);
        let mask = [true, false];
        let spec = [ClassifierSpec::from_short_name("knn").unwrap()];
        let masked_run = run_benchmark(&m, &spec, &Protocol::default(), Some(&mask)).unwrap();
        let projected = m.select_columns(&mask);
        let projected_run = run_benchmark(&projected, &spec, &Protocol::default(), None).unwrap();
        assert_eq!(
            masked_run.reports[0].accuracy,
            projected_run.reports[0].accuracy
        );
        assert_eq!(
            masked_run.reports[0].confusion,
            projected_run.reports[0].confusion
        );
    }

    #[test]
    fn failed_classifier_is_reported_not_fatal() {
        // duplicated column makes the pooled covariance singular for LDA
        // with zero shrinkage, while kNN is unaffected
        let mut m = FeatureMatrix::new(vec!["x".into(), "x_copy".into()]);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for class in 0..2u32 {
            for _ in 0..10 {
                let v = class as f64 * 10.0 + rng.gen::<f64>();
                m.push(vec![v, v], class);
            }
        }
        let specs = [
            ClassifierSpec::Lda(crate::classifiers::LdaParams { shrinkage: 0.0 }),
            ClassifierSpec::from_short_name("knn").unwrap(),
        ];
        let report = run_benchmark(&m, &specs, &Protocol::default(), None).unwrap();
        let lda = &report.reports[0];
        assert!(lda.error.is_some());
        assert!(lda.accuracy.is_none());
        let knn = &report.reports[1];
        assert!(knn.error.is_none());
        assert_eq!(knn.accuracy, Some(1.0));
    }

    #[test]
    fn table_lists_every_classifier() {
        let m = blob_matrix(10, 1.0, 15);
        let specs = [
            ClassifierSpec::from_short_name("knn").unwrap(),
            ClassifierSpec::from_short_name("cart").unwrap(),
        ];
        let report = run_benchmark(&m, &specs, &Protocol::default(), None).unwrap();
        let table = report.to_table();
        assert!(table.contains("K-neighbors (kNN)"));
        assert!(table.contains("Decision Tree (CART)"));
        assert!(table.contains("100.00"));
    }

    #[test]
    fn series_csv_layout() {
        let m = blob_matrix(10, 1.0, 19);
        let spec = [ClassifierSpec::from_short_name("knn").unwrap()];
        let a = run_benchmark(&m, &spec, &Protocol::default(), None).unwrap();
        let b = run_benchmark(&m, &spec, &Protocol::default(), None).unwrap();
        let csv = series_csv(&[("extracted", &a), ("raw", &b)], &[]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "classifier,extracted,raw");
        assert_eq!(lines.next().unwrap(), "knn,100,100");
    }
}
