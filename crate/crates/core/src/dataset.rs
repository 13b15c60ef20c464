//! Tabular datasets: CSV ingestion, z-score standardization, stratified
//! fold assignment and the two-cluster synthetic generator.
//!
//! Features are stored row-major so that a training instance is a
//! contiguous slice; every distance computation downstream works on rows.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::Write;
use std::path::Path;

use nalgebra::Matrix2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// N labelled instances over A real-valued features.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

/// Which CSV column carries the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl From<&str> for LabelColumn {
    /// A purely numeric string is taken as a 0-based index.
    fn from(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        }
    }
}

impl Dataset {
    /// Builds a dataset from rows. Class names default to the decimal label ids.
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>, feature_names: Vec<String>) -> Result<Self> {
        let n_features = feature_names.len();
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::InvalidDataset(format!(
                    "row {i} has {} values, expected {n_features}",
                    row.len()
                )));
            }
            features.extend_from_slice(row);
        }
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        let class_names = (0..n_classes).map(|c| c.to_string()).collect();
        Self::from_parts(features, labels, feature_names, class_names)
    }

    /// Builds a dataset from a row-major feature buffer.
    pub fn from_parts(
        features: Vec<f64>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let n_features = feature_names.len();
        if n_features == 0 {
            return Err(Error::InvalidDataset("at least one feature is required".into()));
        }
        if labels.len() < 2 {
            return Err(Error::InvalidDataset(format!(
                "at least two instances are required, got {}",
                labels.len()
            )));
        }
        if features.len() != labels.len() * n_features {
            return Err(Error::InvalidDataset(format!(
                "feature buffer holds {} values, expected {}",
                features.len(),
                labels.len() * n_features
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite value at row {}, feature {}",
                pos / n_features,
                pos % n_features
            )));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate feature name {name:?}")));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InvalidDataset(format!(
                "label {bad} has no class name ({} known)",
                class_names.len()
            )));
        }
        Ok(Self {
            features,
            n_features,
            labels,
            feature_names,
            class_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.n_features)
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Distinct labels present, ascending.
    pub fn class_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.labels.clone();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Instance count per label id (indexed by label, length = number of class names).
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_names.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::from_parts(
            features,
            labels,
            self.feature_names.clone(),
            self.class_names.clone(),
        )
    }

    /// Columns at `columns`, in that order.
    pub fn select_features(&self, columns: &[usize]) -> Result<Self> {
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.n_features) {
            return Err(Error::InvalidArgument(format!(
                "feature index {bad} out of range for {} features",
                self.n_features
            )));
        }
        let mut features = Vec::with_capacity(self.n_samples() * columns.len());
        for row in self.rows() {
            features.extend(columns.iter().map(|&c| row[c]));
        }
        let names = columns.iter().map(|&c| self.feature_names[c].clone()).collect();
        Self::from_parts(features, self.labels.clone(), names, self.class_names.clone())
    }

    /// Writes the dataset as CSV with the label (as its class name) in the last column.
    pub fn write_csv(&self, path: &Path, label_column: &str) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut writer = csv::Writer::from_writer(file);
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push(label_column);
        writer.write_record(&header)?;
        for (row, &label) in self.rows().zip(&self.labels) {
            let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            record.push(self.class_names[label].clone());
            writer.write_record(&record)?;
        }
        writer.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(())
    }
}

/// Reads a headered CSV. Labels are re-encoded as 0..C-1 in order of first appearance.
pub fn load_csv(path: &Path, label_column: &LabelColumn) -> Result<Dataset> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let label_idx = match label_column {
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingLabelColumn(name.clone()))?,
        LabelColumn::Index(i) if *i < headers.len() => *i,
        LabelColumn::Index(i) => return Err(Error::MissingLabelColumn(i.to_string())),
    };
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut class_lookup: HashMap<String, usize> = HashMap::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        // header is line 1
        let line = r + 2;
        if record.len() != headers.len() {
            return Err(Error::InvalidDataset(format!(
                "row {line} has {} fields, header has {}",
                record.len(),
                headers.len()
            )));
        }
        for (c, cell) in record.iter().enumerate() {
            if c == label_idx {
                let key = cell.trim().to_string();
                let next = class_names.len();
                let id = *class_lookup.entry(key.clone()).or_insert_with(|| {
                    class_names.push(key);
                    next
                });
                labels.push(id);
            } else {
                let value: f64 = cell.trim().parse().map_err(|_| Error::UnparseableCell {
                    row: line,
                    column: headers[c].clone(),
                    value: cell.to_string(),
                })?;
                features.push(value);
            }
        }
    }
    if labels.len() < 2 {
        return Err(Error::InvalidDataset(format!(
            "{} has {} data rows, at least 2 are required",
            path.display(),
            labels.len()
        )));
    }
    Dataset::from_parts(features, labels, feature_names, class_names)
}

/// Reads the named columns of a headered CSV, in the given order. Other
/// columns (a label, ids) are ignored.
pub fn load_feature_rows(path: &Path, columns: &[String]) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let idx = columns
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h == c)
                .ok_or_else(|| Error::InvalidDataset(format!("column {c:?} not found")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let line = r + 2;
        let row = idx
            .iter()
            .map(|&c| {
                let cell = record.get(c).unwrap_or("").trim();
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::UnparseableCell {
                        row: line,
                        column: headers[c].clone(),
                        value: cell.to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Per-feature location and scale used for z-scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub means: Vec<f64>,
    pub standard_deviations: Vec<f64>,
    /// Columns with zero spread; they map to 0.
    pub constant: Vec<bool>,
}

impl StandardizationParams {
    pub fn identity(n_features: usize) -> Self {
        Self {
            means: vec![0.0; n_features],
            standard_deviations: vec![1.0; n_features],
            constant: vec![false; n_features],
        }
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn apply_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: row.len(),
            });
        }
        Ok(row
            .iter()
            .enumerate()
            .map(|(a, &v)| self.scale(a, v))
            .collect())
    }

    /// Maps a z-score back to the original units. Constant columns return their mean.
    pub fn invert_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(a, &z)| {
                if self.constant[a] {
                    self.means[a]
                } else {
                    z * self.standard_deviations[a] + self.means[a]
                }
            })
            .collect()
    }

    fn scale(&self, a: usize, v: f64) -> f64 {
        if self.constant[a] {
            0.0
        } else {
            (v - self.means[a]) / self.standard_deviations[a]
        }
    }
}

/// Z-scores every column (sample standard deviation, denominator N-1).
pub fn standardize(data: &Dataset) -> (Dataset, StandardizationParams) {
    let n = data.n_samples();
    let a_count = data.n_features();
    let mut means = vec![0.0; a_count];
    for row in data.rows() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut sq = vec![0.0; a_count];
    for row in data.rows() {
        for a in 0..a_count {
            let d = row[a] - means[a];
            sq[a] += d * d;
        }
    }
    let mut standard_deviations = Vec::with_capacity(a_count);
    let mut constant = Vec::with_capacity(a_count);
    for a in 0..a_count {
        let sd = (sq[a] / (n - 1) as f64).sqrt();
        if sd <= 1e-12 * means[a].abs().max(1.0) {
            standard_deviations.push(1.0);
            constant.push(true);
        } else {
            standard_deviations.push(sd);
            constant.push(false);
        }
    }
    let params = StandardizationParams {
        means,
        standard_deviations,
        constant,
    };
    let out = apply_standardization(data, &params).expect("params built from the same data");
    (out, params)
}

/// Applies previously fitted parameters, e.g. training-fold statistics to a test fold.
pub fn apply_standardization(data: &Dataset, params: &StandardizationParams) -> Result<Dataset> {
    if params.dim() != data.n_features() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            actual: data.n_features(),
        });
    }
    let features = data
        .features
        .iter()
        .enumerate()
        .map(|(i, &v)| params.scale(i % data.n_features, v))
        .collect();
    Dataset::from_parts(
        features,
        data.labels.clone(),
        data.feature_names.clone(),
        data.class_names.clone(),
    )
}

/// Keeps the rows of the two most populous classes; ties go to the smaller label id.
/// Label ids are left unchanged.
pub fn reduce_to_top_two_classes(data: &Dataset) -> Result<Dataset> {
    let counts = data.class_counts();
    let mut present: Vec<(usize, usize)> = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(id, &c)| (id, c))
        .collect();
    if present.len() < 2 {
        return Err(Error::InvalidDataset(format!(
            "need at least two classes, found {}",
            present.len()
        )));
    }
    if present.len() == 2 {
        return Ok(data.clone());
    }
    present.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    let keep = [present[0].0, present[1].0];
    let rows: Vec<usize> = (0..data.n_samples())
        .filter(|&i| keep.contains(&data.labels[i]))
        .collect();
    data.subset(&rows)
}

/// Fold membership for k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub fold_index: Vec<usize>,
    pub k: usize,
}

impl FoldAssignment {
    /// Explicit assignment; every fold in 0..k must be non-empty.
    pub fn new(fold_index: Vec<usize>, k: usize) -> Result<Self> {
        let mut sizes = vec![0usize; k];
        for &f in &fold_index {
            if f >= k {
                return Err(Error::InvalidArgument(format!("fold {f} out of range 0..{k}")));
            }
            sizes[f] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidArgument(format!("fold {empty} is empty")));
        }
        Ok(Self { fold_index, k })
    }

    /// (training indices, held-out indices) for fold `f`.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &fi) in self.fold_index.iter().enumerate() {
            if fi == f {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }
}

/// Stratified assignment: each class is shuffled and dealt round-robin, the
/// dealing position carrying over between classes so fold sizes stay balanced.
pub fn stratified_kfold(data: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    let n = data.n_samples();
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the number of instances ({n})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_index = vec![0; n];
    let mut next = 0;
    for class in data.class_ids() {
        let mut members: Vec<usize> = (0..n).filter(|&i| data.labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            fold_index[i] = next % k;
            next += 1;
        }
    }
    FoldAssignment::new(fold_index, k)
}

const SIGNAL_COV: [f64; 4] = [1.0, 0.5, 0.5, 1.0];
const NOISE_COV: [f64; 4] = [8.0, 4.0, 4.0, 8.0];
const CLASS0_SIGNAL: [f64; 2] = [4.0, 2.0];
const CLASS0_NOISE: [f64; 2] = [8.0, -2.0];
const CLASS1_SIGNAL: [f64; 2] = [6.0, 0.0];
const CLASS1_NOISE: [f64; 2] = [2.0, 4.0];

/// Two interacting Gaussian features, two classes separated along the
/// anti-diagonal, each contaminated by a broad cluster lying on the other
/// class's side.
///
/// Rows are ordered class 0 signal, class 0 noise, class 1 signal, class 1 noise.
pub fn generate_synthetic(n_per_class: usize, noise_fraction: f64, seed: u64) -> Result<Dataset> {
    if n_per_class == 0 {
        return Err(Error::InvalidArgument("n_per_class must be at least 1".into()));
    }
    if !(0.0..=0.5).contains(&noise_fraction) {
        return Err(Error::InvalidArgument(format!(
            "noise_fraction must lie in [0, 0.5], got {noise_fraction}"
        )));
    }
    let n_noise = (noise_fraction * n_per_class as f64).round() as usize;
    let n_signal = n_per_class - n_noise;

    let signal = Matrix2::from_row_slice(&SIGNAL_COV)
        .cholesky()
        .expect("positive definite")
        .l();
    let noise = Matrix2::from_row_slice(&NOISE_COV)
        .cholesky()
        .expect("positive definite")
        .l();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Vec::with_capacity(4 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    let groups = [
        (0, CLASS0_SIGNAL, &signal, n_signal),
        (0, CLASS0_NOISE, &noise, n_noise),
        (1, CLASS1_SIGNAL, &signal, n_signal),
        (1, CLASS1_NOISE, &noise, n_noise),
    ];
    for (label, mean, chol, count) in groups {
        for _ in 0..count {
            let z0: f64 = StandardNormal.sample(&mut rng);
            let z1: f64 = StandardNormal.sample(&mut rng);
            features.push(mean[0] + chol[(0, 0)] * z0);
            features.push(mean[1] + chol[(1, 0)] * z0 + chol[(1, 1)] * z1);
            labels.push(label);
        }
    }
    Dataset::from_parts(
        features,
        labels,
        vec!["x1".into(), "x2".into()],
        vec!["0".into(), "1".into()],
    )
}

/// Writes a one-column `prediction` CSV.
pub fn write_predictions(path: &Path, predictions: &[String]) -> Result<()> {
    let mut file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut body = String::from("prediction\n");
    for p in predictions {
        body.push_str(p);
        body.push('\n');
    }
    file.write_all(body.as_bytes()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Dataset {
        let a = rows[0].len();
        let names = (0..a).map(|i| format!("f{i}")).collect();
        Dataset::new(rows, labels, names).unwrap()
    }

    fn write_tmp(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn labels_encoded_in_order_of_first_appearance() {
        let f = write_tmp("f1,f2,label\n1,2,a\n3,4,b\n5,6,a\n");
        let d = load_csv(f.path(), &LabelColumn::Name("label".into())).unwrap();
        assert_eq!(d.labels(), &[0, 1, 0]);
        assert_eq!(d.class_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(d.row(2), &[5.0, 6.0]);
    }

    #[test]
    fn label_column_by_index() {
        let f = write_tmp("y,f1\nb,1\na,2\n");
        let d = load_csv(f.path(), &LabelColumn::from("0")).unwrap();
        assert_eq!(d.labels(), &[0, 1]);
        assert_eq!(d.feature_names(), &["f1".to_string()]);
    }

    #[test]
    fn unparseable_cell_names_row_and_column() {
        let f = write_tmp("f1,f2,label\n1,2,a\n3,oops,b\n");
        let err = load_csv(f.path(), &LabelColumn::Name("label".into())).unwrap_err();
        match err {
            Error::UnparseableCell { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column, "f2");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn load_errors() {
        let f = write_tmp("f1,label\n1,a\n");
        assert!(matches!(
            load_csv(f.path(), &LabelColumn::Name("label".into())),
            Err(Error::InvalidDataset(_))
        ));
        let f = write_tmp("f1,label\n1,a\n2,b\n");
        assert!(matches!(
            load_csv(f.path(), &LabelColumn::Name("class".into())),
            Err(Error::MissingLabelColumn(_))
        ));
        assert!(matches!(
            load_csv(Path::new("/nonexistent/x.csv"), &LabelColumn::Index(0)),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn standardize_small_column() {
        let d = toy(vec![vec![1.0], vec![2.0], vec![3.0]], vec![0, 1, 0]);
        let (z, p) = standardize(&d);
        assert_eq!(p.means, vec![2.0]);
        assert_eq!(p.standard_deviations, vec![1.0]);
        assert_eq!(z.features(), &[-1.0, 0.0, 1.0]);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let d = toy(vec![vec![5.0, 1.0], vec![5.0, 2.0], vec![5.0, 4.0]], vec![0, 1, 0]);
        let (z, p) = standardize(&d);
        assert!(p.constant[0]);
        assert!(!p.constant[1]);
        assert!(z.rows().all(|r| r[0] == 0.0));
    }

    #[test]
    fn held_out_row_uses_training_statistics() {
        let train = toy(vec![vec![0.0, 10.0], vec![2.0, 14.0]], vec![0, 1]);
        let (_, p) = standardize(&train);
        // means (1, 12); sds (sqrt 2, sqrt 8)
        let test = toy(vec![vec![3.0, 8.0], vec![1.0, 12.0]], vec![0, 1]);
        let z = apply_standardization(&test, &p).unwrap();
        assert!((z.row(0)[0] - 2.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((z.row(0)[1] - (-4.0 / 8f64.sqrt())).abs() < 1e-15);
        assert_eq!(z.row(1), &[0.0, 0.0]);
    }

    #[test]
    fn identity_params_and_mismatch() {
        let d = toy(vec![vec![1.5, -2.0], vec![0.0, 3.0]], vec![0, 1]);
        let same = apply_standardization(&d, &StandardizationParams::identity(2)).unwrap();
        assert_eq!(same, d);
        assert!(matches!(
            apply_standardization(&d, &StandardizationParams::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn standardize_then_invert_recovers_inputs() {
        let d = toy(
            vec![vec![3.2, -7.0], vec![1.1, 4.5], vec![9.9, 0.25], vec![-4.0, 2.0]],
            vec![0, 1, 0, 1],
        );
        let (z, p) = standardize(&d);
        for (orig, zr) in d.rows().zip(z.rows()) {
            for (x, y) in orig.iter().zip(p.invert_row(zr)) {
                assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn top_two_classes() {
        let d = toy(vec![vec![0.0]; 6], vec![0, 0, 0, 1, 1, 2]);
        assert_eq!(reduce_to_top_two_classes(&d).unwrap().labels(), &[0, 0, 0, 1, 1]);
        let d = toy(vec![vec![0.0]; 5], vec![0, 1, 1, 2, 2]);
        assert_eq!(reduce_to_top_two_classes(&d).unwrap().labels(), &[1, 1, 2, 2]);
        let d = toy(vec![vec![0.0]; 3], vec![0, 1, 0]);
        assert_eq!(reduce_to_top_two_classes(&d).unwrap(), d);
        let d = toy(vec![vec![0.0]; 3], vec![1, 1, 1]);
        assert!(reduce_to_top_two_classes(&d).is_err());
    }

    #[test]
    fn kfold_single_class_pigeonhole() {
        let d = toy(vec![vec![0.0]; 10], vec![0; 10]);
        let folds = stratified_kfold(&d, 10, 3).unwrap();
        let mut sizes = vec![0; 10];
        for &f in &folds.fold_index {
            sizes[f] += 1;
        }
        assert!(sizes.iter().all(|&s| s == 1));
    }

    #[test]
    fn kfold_balanced_binary() {
        let labels: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let d = toy(vec![vec![0.0]; 20], labels.clone());
        let folds = stratified_kfold(&d, 10, 11).unwrap();
        for f in 0..10 {
            let (_, test) = folds.split(f);
            assert_eq!(test.len(), 2);
            assert_eq!(test.iter().filter(|&&i| labels[i] == 0).count(), 1);
        }
        assert_eq!(folds, stratified_kfold(&d, 10, 11).unwrap());
    }

    #[test]
    fn kfold_errors() {
        let d = toy(vec![vec![0.0]; 4], vec![0, 1, 0, 1]);
        assert!(stratified_kfold(&d, 1, 0).is_err());
        assert!(stratified_kfold(&d, 5, 0).is_err());
    }

    #[test]
    fn synthetic_counts_and_determinism() {
        let d = generate_synthetic(100, 0.10, 7).unwrap();
        assert_eq!(d.n_samples(), 200);
        assert_eq!(d.class_counts(), vec![100, 100]);
        assert_eq!(d, generate_synthetic(100, 0.10, 7).unwrap());
        assert_ne!(d, generate_synthetic(100, 0.10, 8).unwrap());
        assert!(generate_synthetic(10, 0.6, 0).is_err());
        assert!(generate_synthetic(0, 0.1, 0).is_err());
    }

    #[test]
    fn synthetic_signal_means() {
        // average of per-seed sample means over 50 seeds
        let mut m0 = [0.0; 2];
        let mut m1 = [0.0; 2];
        for seed in 0..50 {
            let d = generate_synthetic(100, 0.0, seed).unwrap();
            for (row, &l) in d.rows().zip(d.labels()) {
                let target = if l == 0 { &mut m0 } else { &mut m1 };
                target[0] += row[0] / 5000.0;
                target[1] += row[1] / 5000.0;
            }
        }
        let tol = 3.0 / 10.0;
        assert!((m0[0] - 4.0).abs() < tol && (m0[1] - 2.0).abs() < tol);
        assert!((m1[0] - 6.0).abs() < tol && m1[1].abs() < tol);
    }
}
