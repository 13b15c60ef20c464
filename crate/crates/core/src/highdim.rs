//! Two-stage learning for wide data: a diagonal (main-effects only) fit
//! screens features and seeds the diagonal of W; interactions are then
//! learned among the surviving features only.
//!
//! The diagonal stage is the IMMIGRATE alternation with W restricted to
//! diag(w). Its W-step is the Relief-style closed form on the diagonal of
//! the scatter matrix: w = (−diag Σ)⁺ / ‖(−diag Σ)⁺‖₂.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boosting::{train_bim_with, BimConfig, BoostedModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::immigrate::{
    fit_on_table, Hyperparameters, ImmigrateModel, PairTable, TrainOptions, WeightMatrix,
};

/// Features kept by pre-screening, as indices into the original feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenResult {
    pub kept_features: Vec<usize>,
    pub diag_weights: Vec<f64>,
}

impl ScreenResult {
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.diag_weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.diag_weights.len(),
                actual: x.len(),
            });
        }
        Ok(self.kept_features.iter().map(|&c| x[c]).collect())
    }
}

fn unit(v: &mut [f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// Main-effect weights from the diagonal-restricted alternation; unit ℓ2 norm.
pub fn train_diagonal(data: &Dataset, hp: &Hyperparameters) -> Result<Vec<f64>> {
    hp.validate()?;
    let table = PairTable::new(data)?;
    let a = data.n_features();
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut w: Vec<f64> = (0..a).map(|_| rng.gen::<f64>()).collect();
    if !unit(&mut w) {
        w = vec![1.0 / (a as f64).sqrt(); a];
    }
    let mut previous: Option<f64> = None;
    for it in 0..hp.max_iterations {
        let q = table.diagonal_measurements(&w);
        let nw = table.neighbor_weights(&q, hp.sigma);
        let diag = table.diagonal_scatter(&nw, None);
        let scale = diag.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let mut next: Vec<f64> = diag
            .iter()
            .map(|&s| if s < -1e-12 * scale { -s } else { 0.0 })
            .collect();
        if !unit(&mut next) {
            log::debug!("diagonal W-step degenerate at iteration {it}");
            if it == 0 {
                w = vec![1.0 / (a as f64).sqrt(); a];
            }
            break;
        }
        w = next;
        let q = table.diagonal_measurements(&w);
        let cost = table.cost(&q, &nw, hp.sigma, None);
        if let Some(prev) = previous {
            if (cost - prev).abs() < hp.cost_tolerance * (1.0 + cost.abs()) {
                break;
            }
        }
        previous = Some(cost);
    }
    Ok(w)
}

/// Keeps features whose weight reaches `threshold`; falls back to the single largest.
pub fn prescreen(diag_weights: &[f64], threshold: f64) -> ScreenResult {
    prescreen_with(diag_weights, threshold, &[])
}

/// [`prescreen`] plus features that are always kept.
pub fn prescreen_with(diag_weights: &[f64], threshold: f64, include: &[usize]) -> ScreenResult {
    let mut kept: Vec<usize> = diag_weights
        .iter()
        .enumerate()
        .filter(|&(_, &w)| w >= threshold)
        .map(|(i, _)| i)
        .collect();
    if kept.is_empty() {
        let mut best = 0;
        for (i, &w) in diag_weights.iter().enumerate() {
            if w > diag_weights[best] {
                best = i;
            }
        }
        kept.push(best);
    }
    kept.extend(include.iter().copied().filter(|&i| i < diag_weights.len()));
    kept.sort_unstable();
    kept.dedup();
    ScreenResult {
        kept_features: kept,
        diag_weights: diag_weights.to_vec(),
    }
}

/// An IMMIGRATE model that sees only the screened columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenedModel {
    pub screen: ScreenResult,
    pub model: ImmigrateModel,
}

impl ScreenedModel {
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        self.model.predict(&self.screen.project(x)?)
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<usize>> {
        data.rows().map(|r| self.predict(r)).collect()
    }
}

fn screened_init(screen: &ScreenResult) -> Result<WeightMatrix> {
    let kept: Vec<f64> = screen
        .kept_features
        .iter()
        .map(|&c| screen.diag_weights[c])
        .collect();
    WeightMatrix::from_diagonal(&kept)
}

fn screen(data: &Dataset, hp: &Hyperparameters, threshold: f64, include: &[usize]) -> Result<(ScreenResult, Dataset)> {
    let diag = train_diagonal(data, hp)?;
    let screen = prescreen_with(&diag, threshold, include);
    let projected = data.select_features(&screen.kept_features)?;
    Ok((screen, projected))
}

pub fn train_im4e_immigrate(data: &Dataset, hp: &Hyperparameters, screen_threshold: f64) -> Result<ScreenedModel> {
    train_im4e_immigrate_with(data, hp, screen_threshold, &[])
}

/// Diagonal fit, screening (with `include` always kept), then the full
/// learner on the kept columns starting from the screened diagonal.
pub fn train_im4e_immigrate_with(
    data: &Dataset,
    hp: &Hyperparameters,
    screen_threshold: f64,
    include: &[usize],
) -> Result<ScreenedModel> {
    let (screen, projected) = screen(data, hp, screen_threshold, include)?;
    let init = screened_init(&screen)?;
    let table = PairTable::new(&projected)?;
    let opts = TrainOptions {
        init: Some(init),
        instance_weights: None,
    };
    let model = fit_on_table(&table, &projected, hp, opts, &mut |_| {})?;
    Ok(ScreenedModel { screen, model })
}

/// Screening once at σ_max, then boosting on the kept columns with weak
/// learners started from the screened diagonal.
pub fn train_b4g(data: &Dataset, cfg: &BimConfig, screen_threshold: f64) -> Result<BoostedModel> {
    cfg.validate()?;
    let hp = Hyperparameters {
        sigma: cfg.sigma_max,
        seed: cfg.seed,
        ..Hyperparameters::default()
    };
    let (screen, projected) = screen(data, &hp, screen_threshold, &[])?;
    let init = screened_init(&screen)?;
    let mut model = train_bim_with(&projected, cfg, Some(&init), &mut |_| {})?;
    model.feature_subset = Some(screen.kept_features);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn data(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Dataset {
        let a = rows[0].len();
        Dataset::new(rows, labels, (0..a).map(|i| format!("f{i}")).collect()).unwrap()
    }

    #[test]
    fn screening_cases() {
        let mut w = vec![0.9, 0.1, 0.05, 0.02];
        unit(&mut w);
        assert_eq!(prescreen(&w, 0.5).kept_features, vec![0]);
        assert_eq!(prescreen(&w, 0.0).kept_features, vec![0, 1, 2, 3]);
        assert_eq!(prescreen(&[0.3, 0.6, 0.2], 0.9).kept_features, vec![1]);
        assert_eq!(prescreen_with(&w, 0.5, &[3]).kept_features, vec![0, 3]);
    }

    #[test]
    fn single_feature_has_unit_weight() {
        let d = data(vec![vec![0.0], vec![0.2], vec![3.0], vec![3.1]], vec![0, 0, 1, 1]);
        let w = train_diagonal(&d, &Hyperparameters::default()).unwrap();
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn projection_ignores_dropped_columns() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let noise = ((i * 7) % 5) as f64 * 0.3;
            rows.push(vec![i as f64 * 0.05, noise]);
            labels.push(0);
            rows.push(vec![2.0 + i as f64 * 0.05, 1.2 - noise]);
            labels.push(1);
        }
        let d = data(rows, labels);
        let m = train_im4e_immigrate(&d, &Hyperparameters::default(), 0.9).unwrap();
        assert_eq!(m.screen.kept_features, vec![0]);
        for row in d.rows() {
            let mut perturbed = row.to_vec();
            perturbed[1] += 1e3;
            assert_eq!(m.predict(row).unwrap(), m.predict(&perturbed).unwrap());
        }
    }
}
