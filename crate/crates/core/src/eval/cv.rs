use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{standardize, stratified_kfold, Dataset, FoldAssignment};
use crate::error::{Error, Result};
use crate::learner::LearnerSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    pub learner: LearnerSpec,
}

/// One accuracy per (repeat, fold), in repeat-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub per_trial_accuracies: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation across trials.
    pub std: f64,
    pub config: CvConfig,
}

impl CvReport {
    fn from_trials(per_trial_accuracies: Vec<f64>, config: CvConfig) -> Self {
        let n = per_trial_accuracies.len() as f64;
        let mean = per_trial_accuracies.iter().sum::<f64>() / n;
        let std = if per_trial_accuracies.len() > 1 {
            (per_trial_accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            per_trial_accuracies,
            mean,
            std,
            config,
        }
    }
}

/// splitmix64 finalizer over a combined key.
pub(crate) fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        .wrapping_add(a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(b.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `repeats` rounds of stratified k-fold CV. Each cell standardizes on its
/// training portion, fits (tuning internally if the learner asks), and scores
/// accuracy on the held-out fold.
pub fn cross_validate(
    data: &Dataset,
    learner: &LearnerSpec,
    k: usize,
    repeats: usize,
    seed: u64,
) -> Result<CvReport> {
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be at least 1".into()));
    }
    let folds = (0..repeats)
        .map(|r| stratified_kfold(data, k, mix_seed(seed, r as u64, 0)))
        .collect::<Result<Vec<_>>>()?;
    let mut report = cross_validate_with_folds(data, learner, &folds, seed)?;
    report.config.k = k;
    Ok(report)
}

/// Cross-validation over explicit fold assignments, one per repeat.
pub fn cross_validate_with_folds(
    data: &Dataset,
    learner: &LearnerSpec,
    folds: &[FoldAssignment],
    seed: u64,
) -> Result<CvReport> {
    if folds.is_empty() {
        return Err(Error::InvalidArgument("no fold assignment given".into()));
    }
    let k = folds[0].k;
    if folds.iter().any(|f| f.k != k || f.fold_index.len() != data.n_samples()) {
        return Err(Error::InvalidArgument("fold assignments disagree with the data".into()));
    }
    let cells: Vec<(usize, usize)> = (0..folds.len())
        .flat_map(|r| (0..k).map(move |f| (r, f)))
        .collect();
    let accuracies = cells
        .par_iter()
        .map(|&(r, f)| {
            run_cell(data, learner, &folds[r], f, mix_seed(seed, r as u64, f as u64 + 1)).map_err(
                |e| Error::Fold {
                    repeat: r,
                    fold: f,
                    source: Box::new(e),
                },
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(CvReport::from_trials(
        accuracies,
        CvConfig {
            k,
            repeats: folds.len(),
            seed,
            learner: learner.clone(),
        },
    ))
}

fn run_cell(data: &Dataset, learner: &LearnerSpec, folds: &FoldAssignment, f: usize, seed: u64) -> Result<f64> {
    let (train_idx, test_idx) = folds.split(f);
    let (train, params) = standardize(&data.subset(&train_idx)?);
    let model = learner.fit(&train, seed)?;
    let mut correct = 0;
    for &i in &test_idx {
        let x = params.apply_row(data.row(i))?;
        if model.predict(&x)? == data.label(i) {
            correct += 1;
        }
    }
    Ok(correct as f64 / test_idx.len() as f64)
}
