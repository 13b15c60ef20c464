//! Internal cross-validation over the σ × pruning grid.

use super::matrix::prune;
use super::model::{fit_on_table, Hyperparameters, ImmigrateModel, TrainOptions};
use super::pairs::PairTable;
use crate::dataset::{stratified_kfold, Dataset};
use crate::error::Result;

/// σ halves from 4 while it stays above 0.2.
pub fn sigma_grid() -> Vec<f64> {
    vec![4.0, 2.0, 1.0, 0.5, 0.25]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningCandidate {
    pub sigma: f64,
    pub prune: bool,
    /// Mean inner-fold accuracy.
    pub accuracy: f64,
}

/// Returns `hp_base` with the σ and pruning flag of the best inner-CV candidate.
pub fn tune_sigma(data: &Dataset, hp_base: &Hyperparameters, inner_folds: usize) -> Result<Hyperparameters> {
    tune_sigma_on(data, hp_base, inner_folds).map(|(hp, _)| hp)
}

/// Like [`tune_sigma`], also returning every candidate's score in grid order
/// (σ descending, unpruned before pruned). Ties keep the earlier candidate.
pub fn tune_sigma_on(
    data: &Dataset,
    hp_base: &Hyperparameters,
    inner_folds: usize,
) -> Result<(Hyperparameters, Vec<TuningCandidate>)> {
    hp_base.validate()?;
    let grid = sigma_grid();
    let folds = stratified_kfold(data, inner_folds, hp_base.seed)?;
    // [sigma][prune] accumulated accuracy
    let mut totals = vec![[0.0f64; 2]; grid.len()];
    for f in 0..inner_folds {
        let (train_idx, test_idx) = folds.split(f);
        let train = data.subset(&train_idx)?;
        let test = data.subset(&test_idx)?;
        let table = PairTable::new(&train)?;
        for (g, &sigma) in grid.iter().enumerate() {
            let hp = Hyperparameters {
                sigma,
                prune_enabled: false,
                ..hp_base.clone()
            };
            let plain = fit_on_table(&table, &train, &hp, TrainOptions::default(), &mut |_| {})?;
            let threshold = hp.prune_threshold_for(train.n_features());
            let pruned = ImmigrateModel {
                weights: prune(&plain.weights, threshold)?,
                ..plain.clone()
            };
            totals[g][0] += accuracy(&plain, &test)?;
            totals[g][1] += accuracy(&pruned, &test)?;
        }
    }

    let mut candidates = Vec::with_capacity(2 * grid.len());
    for (g, &sigma) in grid.iter().enumerate() {
        for (p, prune) in [false, true].into_iter().enumerate() {
            candidates.push(TuningCandidate {
                sigma,
                prune,
                accuracy: totals[g][p] / inner_folds as f64,
            });
        }
    }
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if c.accuracy > best.accuracy {
            best = *c;
        }
    }
    let tuned = Hyperparameters {
        sigma: best.sigma,
        prune_enabled: best.prune,
        ..hp_base.clone()
    };
    Ok((tuned, candidates))
}

fn accuracy(model: &ImmigrateModel, test: &Dataset) -> Result<f64> {
    let predictions = model.predict_dataset(test)?;
    let correct = predictions
        .iter()
        .zip(test.labels())
        .filter(|(p, y)| p == y)
        .count();
    Ok(correct as f64 / test.n_samples() as f64)
}
