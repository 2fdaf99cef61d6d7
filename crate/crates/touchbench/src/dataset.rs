//! Feature-matrix container, standardization, splitting, correlation
//! analysis, and a synthetic multi-user stroke generator.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::ingest::{Action, PhoneOrientation, TouchEvent};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("need at least {needed} rows, have {have}")]
    TooFewRows { have: usize, needed: usize },
    #[error("class {label} has {size} rows, needs at least {needed}")]
    ClassTooSmall { label: u32, size: usize, needed: usize },
    #[error("feature CSV line {line}: {message}")]
    BadValue { line: usize, message: String },
    #[error("feature CSV has no `user_id` label column")]
    MissingLabelColumn,
    #[error("feature CSV contains no data rows")]
    EmptyInput,
}

/// Labeled n x d feature matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub schema: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u32>,
}

impl FeatureMatrix {
    pub fn new(schema: Vec<String>) -> Self {
        FeatureMatrix {
            schema,
            rows: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn d(&self) -> usize {
        self.schema.len()
    }

    pub fn push(&mut self, row: Vec<f64>, label: u32) {
        debug_assert_eq!(row.len(), self.d());
        self.rows.push(row);
        self.labels.push(label);
    }

    /// Sorted distinct labels with their row counts.
    pub fn class_counts(&self) -> BTreeMap<u32, usize> {
        let mut counts = BTreeMap::new();
        for &l in &self.labels {
            *counts.entry(l).or_insert(0) += 1;
        }
        counts
    }

    /// Keeps the columns whose mask bit is set.
    pub fn select_columns(&self, mask: &[bool]) -> FeatureMatrix {
        assert_eq!(mask.len(), self.d());
        let keep: Vec<usize> = (0..self.d()).filter(|&j| mask[j]).collect();
        FeatureMatrix {
            schema: keep.iter().map(|&j| self.schema[j].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| keep.iter().map(|&j| r[j]).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Feature CSV: schema columns followed by a trailing `user_id` column.
    /// `comments` lines are written first, each prefixed with `# `.
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.schema.join(","));
        out.push_str(",user_id\n");
        for (row, label) in self.rows.iter().zip(&self.labels) {
            for v in row {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{label}\n"));
        }
        out
    }

    /// Parses the feature CSV format. Any column count is accepted as long
    /// as the last column is `user_id`; `#` lines are comments.
    pub fn from_csv(text: &str) -> Result<FeatureMatrix, DatasetError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (_, header) = lines.next().ok_or(DatasetError::EmptyInput)?;
        let mut names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        if names.last().map(String::as_str) != Some("user_id") {
            return Err(DatasetError::MissingLabelColumn);
        }
        names.pop();
        let d = names.len();
        let mut m = FeatureMatrix::new(names);
        for (lineno, line) in lines {
            let line_1 = lineno + 1;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != d + 1 {
                return Err(DatasetError::BadValue {
                    line: line_1,
                    message: format!("expected {} fields, found {}", d + 1, fields.len()),
                });
            }
            let mut row = Vec::with_capacity(d);
            for (j, f) in fields[..d].iter().enumerate() {
                let v: f64 = f.parse().map_err(|_| DatasetError::BadValue {
                    line: line_1,
                    message: format!("non-numeric value `{f}` in `{}`", m.schema[j]),
                })?;
                if !v.is_finite() {
                    return Err(DatasetError::BadValue {
                        line: line_1,
                        message: format!("non-finite value in `{}`", m.schema[j]),
                    });
                }
                row.push(v);
            }
            let label: u32 = fields[d].parse().map_err(|_| DatasetError::BadValue {
                line: line_1,
                message: format!("non-integer user_id `{}`", fields[d]),
            })?;
            m.push(row, label);
        }
        if m.n() == 0 {
            return Err(DatasetError::EmptyInput);
        }
        Ok(m)
    }
}

/// Per-column mean/stddev record fitted on training rows.
///
/// Population (divide by n) stddev convention. Zero-variance columns keep
/// stddev 0 and transform to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&v, (&m, &s))| if s == 0.0 { 0.0 } else { (v - m) / s })
            .collect()
    }

    pub fn transform(&self, m: &FeatureMatrix) -> FeatureMatrix {
        FeatureMatrix {
            schema: m.schema.clone(),
            rows: m.rows.iter().map(|r| self.transform_row(r)).collect(),
            labels: m.labels.clone(),
        }
    }
}

/// Fits a standardizer on `m` and returns the transformed matrix with it.
pub fn standardize(m: &FeatureMatrix) -> Result<(FeatureMatrix, Standardizer), DatasetError> {
    if m.n() < 2 {
        return Err(DatasetError::TooFewRows {
            have: m.n(),
            needed: 2,
        });
    }
    let n = m.n() as f64;
    let d = m.d();
    let mut means = vec![0.0; d];
    for row in &m.rows {
        for (j, v) in row.iter().enumerate() {
            means[j] += v;
        }
    }
    for mj in &mut means {
        *mj /= n;
    }
    let mut vars = vec![0.0; d];
    for row in &m.rows {
        for (j, v) in row.iter().enumerate() {
            let dv = v - means[j];
            vars[j] += dv * dv;
        }
    }
    let stds: Vec<f64> = vars.iter().map(|v| (v / n).sqrt()).collect();
    let rec = Standardizer { means, stds };
    Ok((rec.transform(m), rec))
}

/// Disjoint train/test index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

// FNV-1a over the label and the row's f64 bit patterns, mixed with the seed.
// Keying the shuffle on row content (not position) makes split membership
// follow a row wherever it sits in the matrix.
fn row_key(seed: u64, label: u32, row: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325 ^ seed.wrapping_mul(0x9e3779b97f4a7c15);
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(&label.to_le_bytes());
    for v in row {
        eat(&v.to_bits().to_le_bytes());
    }
    h
}

fn ordered_class_indices(m: &FeatureMatrix, seed: u64) -> BTreeMap<u32, Vec<usize>> {
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &l) in m.labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    for indices in by_class.values_mut() {
        indices.sort_by_key(|&i| (row_key(seed, m.labels[i], &m.rows[i]), i));
    }
    by_class
}

/// Stratified train/test split. Per-class test count is
/// floor(size * test_fraction + 0.5), clamped so the class stays present
/// in the training set.
pub fn stratified_split(
    m: &FeatureMatrix,
    test_fraction: f64,
    seed: u64,
) -> Result<Split, DatasetError> {
    assert!(
        test_fraction > 0.0 && test_fraction < 1.0,
        "test_fraction must be in (0, 1)"
    );
    let by_class = ordered_class_indices(m, seed);
    for (&label, indices) in &by_class {
        if indices.len() < 2 {
            return Err(DatasetError::ClassTooSmall {
                label,
                size: indices.len(),
                needed: 2,
            });
        }
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for indices in by_class.values() {
        let size = indices.len();
        let want = (size as f64 * test_fraction + 0.5).floor() as usize;
        let take = want.min(size - 1);
        test.extend_from_slice(&indices[..take]);
        train.extend_from_slice(&indices[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

/// Stratified k folds; each row lands in exactly one test fold.
pub fn k_fold(m: &FeatureMatrix, k: usize, seed: u64) -> Result<Vec<Split>, DatasetError> {
    assert!(k >= 2, "k must be at least 2");
    let by_class = ordered_class_indices(m, seed);
    for (&label, indices) in &by_class {
        if indices.len() < k {
            return Err(DatasetError::ClassTooSmall {
                label,
                size: indices.len(),
                needed: k,
            });
        }
    }
    let mut fold_test: Vec<Vec<usize>> = vec![Vec::new(); k];
    for indices in by_class.values() {
        for (pos, &i) in indices.iter().enumerate() {
            fold_test[pos % k].push(i);
        }
    }
    let n = m.n();
    let mut folds = Vec::with_capacity(k);
    for test in fold_test {
        let mut in_test = vec![false; n];
        for &i in &test {
            in_test[i] = true;
        }
        let mut test = test;
        test.sort_unstable();
        let train: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
        folds.push(Split { train, test });
    }
    Ok(folds)
}

/// Pearson correlation matrix of the columns. Zero-variance columns get 0
/// off-diagonal and 1 on the diagonal, keeping the output well-formed.
pub fn pearson_correlation_matrix(m: &FeatureMatrix) -> Result<Vec<Vec<f64>>, DatasetError> {
    if m.n() < 2 {
        return Err(DatasetError::TooFewRows {
            have: m.n(),
            needed: 2,
        });
    }
    let n = m.n() as f64;
    let d = m.d();
    let mut means = vec![0.0; d];
    for row in &m.rows {
        for (j, v) in row.iter().enumerate() {
            means[j] += v;
        }
    }
    for mj in &mut means {
        *mj /= n;
    }
    let mut cov = vec![vec![0.0; d]; d];
    for row in &m.rows {
        let centered: Vec<f64> = row.iter().zip(&means).map(|(v, mj)| v - mj).collect();
        for i in 0..d {
            for j in i..d {
                cov[i][j] += centered[i] * centered[j];
            }
        }
    }
    let stds: Vec<f64> = (0..d).map(|j| (cov[j][j] / n).sqrt()).collect();
    let mut corr = vec![vec![0.0; d]; d];
    for i in 0..d {
        corr[i][i] = 1.0;
        for j in (i + 1)..d {
            let r = if stds[i] == 0.0 || stds[j] == 0.0 {
                0.0
            } else {
                (cov[i][j] / n / (stds[i] * stds[j])).clamp(-1.0, 1.0)
            };
            corr[i][j] = r;
            corr[j][i] = r;
        }
    }
    Ok(corr)
}

/// Writes a correlation matrix as a named d x d CSV (header row + name column).
pub fn correlation_to_csv(schema: &[String], corr: &[Vec<f64>], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str("feature");
    for name in schema {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (name, row) in schema.iter().zip(corr) {
        out.push_str(name);
        for v in row {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

// Latent per-user style for the synthetic generator. Base parameters are
// spread over value grids by user index, with seeded jitter on top, so any
// two users stay distinguishable while every draw remains seed-determined.
struct UserStyle {
    pressure: f64,
    area: f64,
    speed: f64,
    curvature: f64,
    heading: f64,
    finger_orientation: f64,
    start_x: f64,
    start_y: f64,
    points_mean: usize,
    dt_mean: u64,
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

impl UserStyle {
    fn derive(index: usize, rng: &mut ChaCha8Rng) -> UserStyle {
        const PHI: f64 = 0.618_033_988_749_894_9;
        let g = |offset: f64| frac(index as f64 * PHI + offset);
        let jitter = |rng: &mut ChaCha8Rng, scale: f64| (rng.gen::<f64>() - 0.5) * scale;
        UserStyle {
            pressure: 0.25 + 0.5 * g(0.0) + jitter(rng, 0.04),
            area: 2.0 + 6.0 * g(0.31) + jitter(rng, 0.4),
            speed: 0.3 + 1.2 * g(0.73) + jitter(rng, 0.06),
            curvature: (g(0.11) - 0.5) * 0.24 + jitter(rng, 0.01),
            heading: std::f64::consts::TAU * g(0.52) + jitter(rng, 0.2),
            finger_orientation: (g(0.87) - 0.5) * 1.2 + jitter(rng, 0.05),
            start_x: 120.0 + 800.0 * g(0.23) + jitter(rng, 40.0),
            start_y: 160.0 + 1200.0 * g(0.41) + jitter(rng, 40.0),
            points_mean: 10 + (index * 7) % 18,
            dt_mean: 8 + ((index * 3) % 14) as u64,
        }
    }
}

/// Generates raw touch events for `n_users` synthetic users with distinct
/// latent styles. Deterministic per seed; the stream satisfies the ingest
/// grouping and time-ordering preconditions.
pub fn generate_synthetic_users(
    n_users: usize,
    strokes_per_user: usize,
    seed: u64,
) -> Vec<TouchEvent> {
    assert!(n_users >= 2, "need at least 2 users");
    assert!(strokes_per_user >= 1, "need at least 1 stroke per user");
    let mut events = Vec::new();
    for u in 0..n_users {
        // independent per-user stream so user blocks are order-independent
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u as u64 + 1);
        let style = UserStyle::derive(u, &mut rng);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut clock: u64 = 1000 * u as u64;
        for _ in 0..strokes_per_user {
            clock += 200 + rng.gen_range(0..600);
            let n_points = (style.points_mean as i64 + rng.gen_range(-3..=3)).max(4) as usize;
            let mut x = style.start_x + noise.sample(&mut rng) * 30.0;
            let mut y = style.start_y + noise.sample(&mut rng) * 30.0;
            let mut heading = style.heading + noise.sample(&mut rng) * 0.3;
            let speed = style.speed * (1.0 + noise.sample(&mut rng) * 0.15).max(0.2);
            for p in 0..n_points {
                let action = if p == 0 {
                    Action::Down
                } else if p == n_points - 1 {
                    Action::Up
                } else {
                    Action::Move
                };
                events.push(TouchEvent {
                    user_id: u as u32 + 1,
                    phone_id: (u % 5) as u32 + 1,
                    doc_id: 1,
                    time_ms: clock,
                    action,
                    phone_orientation: PhoneOrientation::Portrait,
                    x,
                    y,
                    pressure: (style.pressure + noise.sample(&mut rng) * 0.03).clamp(0.0, 1.0),
                    area: (style.area + noise.sample(&mut rng) * 0.2).max(0.1),
                    finger_orientation: style.finger_orientation + noise.sample(&mut rng) * 0.05,
                });
                let dt = style.dt_mean + rng.gen_range(0..5);
                heading += style.curvature + noise.sample(&mut rng) * 0.04;
                x += heading.cos() * speed * dt as f64;
                y += heading.sin() * speed * dt as f64;
                clock += dt;
            }
        }
    }
    events
}
