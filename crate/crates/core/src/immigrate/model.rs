use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{prune, quadratic_form, update_weight_matrix, WeightMatrix};
use super::pairs::{softmax_neg, NeighborWeights, PairTable};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Knobs of a single IMMIGRATE fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Entropy temperature.
    pub sigma: f64,
    pub max_iterations: usize,
    /// Relative stopping tolerance on the change of cost.
    pub cost_tolerance: f64,
    pub prune_enabled: bool,
    /// `None` means 1/A.
    pub prune_threshold: Option<f64>,
    pub seed: u64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            max_iterations: 10,
            cost_tolerance: 1e-4,
            prune_enabled: false,
            prune_threshold: None,
            seed: 42,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if !(self.cost_tolerance > 0.0) {
            return Err(Error::InvalidArgument("cost_tolerance must be positive".into()));
        }
        if let Some(t) = self.prune_threshold {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::InvalidArgument(format!(
                    "prune_threshold must lie in [0, 1), got {t}"
                )));
            }
        }
        Ok(())
    }

    pub fn prune_threshold_for(&self, n_features: usize) -> f64 {
        self.prune_threshold.unwrap_or(1.0 / n_features as f64)
    }
}

/// A fitted weight matrix together with the training instances it predicts from.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmigrateModel {
    pub weights: WeightMatrix,
    pub sigma: f64,
    pub training: Dataset,
    pub class_ids: Vec<usize>,
    /// Completed alternation steps.
    pub iterations: usize,
    pub final_cost: f64,
}

/// State handed to a training observer after each alternation step.
pub struct IterationRecord<'a> {
    pub iteration: usize,
    pub neighbor_weights: &'a NeighborWeights,
    pub weights: &'a WeightMatrix,
    pub cost: f64,
    /// The W-step found no negative direction; `weights` is the kept/fallback matrix.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Default)]
pub struct TrainOptions<'a> {
    /// Starting matrix; random when absent.
    pub init: Option<WeightMatrix>,
    /// Per-instance multipliers on the cost terms.
    pub instance_weights: Option<&'a [f64]>,
}

pub fn train(data: &Dataset, hp: &Hyperparameters) -> Result<ImmigrateModel> {
    train_with(data, hp, TrainOptions::default(), &mut |_| {})
}

pub fn train_with(
    data: &Dataset,
    hp: &Hyperparameters,
    opts: TrainOptions<'_>,
    observer: &mut dyn FnMut(&IterationRecord<'_>),
) -> Result<ImmigrateModel> {
    let table = PairTable::new(data)?;
    fit_on_table(&table, data, hp, opts, observer)
}

pub(crate) fn fit_on_table(
    table: &PairTable,
    data: &Dataset,
    hp: &Hyperparameters,
    opts: TrainOptions<'_>,
    observer: &mut dyn FnMut(&IterationRecord<'_>),
) -> Result<ImmigrateModel> {
    hp.validate()?;
    let a = data.n_features();
    if let Some(w) = opts.instance_weights {
        if w.len() != data.n_samples() {
            return Err(Error::DimensionMismatch {
                expected: data.n_samples(),
                actual: w.len(),
            });
        }
    }
    let mut weights = match opts.init {
        Some(w) if w.dim() != a => {
            return Err(Error::DimensionMismatch {
                expected: a,
                actual: w.dim(),
            })
        }
        Some(w) => w,
        None => WeightMatrix::random(a, &mut ChaCha8Rng::seed_from_u64(hp.seed)),
    };

    let mut previous_cost: Option<f64> = None;
    let mut cost = f64::NAN;
    let mut iterations = 0;
    let mut q = table.measurements(weights.matrix());
    for it in 0..hp.max_iterations {
        let nw = table.neighbor_weights(&q, hp.sigma);
        let scatter = table.scatter(&nw, opts.instance_weights);
        let degenerate = match update_weight_matrix(&scatter) {
            Ok(w) => {
                weights = w;
                false
            }
            Err(Error::Degenerate(reason)) => {
                log::debug!("W-step degenerate at iteration {it}: {reason}");
                if it == 0 {
                    weights = WeightMatrix::uniform_diagonal(a);
                }
                true
            }
            Err(e) => return Err(e),
        };
        q = table.measurements(weights.matrix());
        cost = table.cost(&q, &nw, hp.sigma, opts.instance_weights);
        iterations = it + 1;
        observer(&IterationRecord {
            iteration: it,
            neighbor_weights: &nw,
            weights: &weights,
            cost,
            degenerate,
        });
        if degenerate {
            break;
        }
        if let Some(prev) = previous_cost {
            if (cost - prev).abs() < hp.cost_tolerance * (1.0 + cost.abs()) {
                break;
            }
        }
        previous_cost = Some(cost);
    }

    if hp.prune_enabled {
        weights = prune(&weights, hp.prune_threshold_for(a))?;
    }
    Ok(ImmigrateModel {
        weights,
        sigma: hp.sigma,
        training: data.clone(),
        class_ids: data.class_ids(),
        iterations,
        final_cost: cost,
    })
}

impl ImmigrateModel {
    pub fn n_features(&self) -> usize {
        self.weights.dim()
    }

    /// Per-class softmax-weighted mean measurement from `x`, in `class_ids` order.
    /// Training instance `exclude` (if any) is left out.
    pub fn class_scores(&self, x: &[f64], exclude: Option<usize>) -> Result<Vec<f64>> {
        let a = self.n_features();
        if x.len() != a {
            return Err(Error::DimensionMismatch {
                expected: a,
                actual: x.len(),
            });
        }
        let w = self.weights.matrix();
        let labels = self.training.labels();
        let mut per_class: Vec<Vec<f64>> = vec![Vec::new(); self.class_ids.len()];
        let mut d = vec![0.0; a];
        for (n, row) in self.training.rows().enumerate() {
            if Some(n) == exclude {
                continue;
            }
            for k in 0..a {
                d[k] = (x[k] - row[k]).abs();
            }
            let q = quadratic_form(w, &d);
            let slot = self
                .class_ids
                .binary_search(&labels[n])
                .expect("training labels are among class_ids");
            per_class[slot].push(q);
        }
        self.scores_from(&per_class)
    }

    fn scores_from(&self, per_class: &[Vec<f64>]) -> Result<Vec<f64>> {
        per_class
            .iter()
            .zip(&self.class_ids)
            .map(|(qs, &c)| {
                if qs.is_empty() {
                    return Err(Error::InvalidDataset(format!("class {c} has no training instance")));
                }
                let alpha = softmax_neg(qs, self.sigma);
                Ok(alpha.iter().zip(qs).map(|(p, q)| p * q).sum())
            })
            .collect()
    }

    /// Class whose softmax-weighted measurement from `x` is smallest; ties go to the smaller id.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        self.predict_excluding(x, None)
    }

    pub fn predict_excluding(&self, x: &[f64], exclude: Option<usize>) -> Result<usize> {
        let scores = self.class_scores(x, exclude)?;
        Ok(self.best_class(&scores))
    }

    fn best_class(&self, scores: &[f64]) -> usize {
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate().skip(1) {
            if s < scores[best] {
                best = i;
            }
        }
        self.class_ids[best]
    }

    /// Same as `predict_training_loo`, reading measurements from a pair table
    /// built on the training set.
    pub(crate) fn predict_training_loo_on(&self, table: &PairTable) -> Result<Vec<usize>> {
        let q = table.measurements(self.weights.matrix());
        let labels = self.training.labels();
        let n = self.training.n_samples();
        (0..n)
            .map(|i| {
                let mut per_class: Vec<Vec<f64>> = vec![Vec::new(); self.class_ids.len()];
                for j in (0..n).filter(|&j| j != i) {
                    let slot = self
                        .class_ids
                        .binary_search(&labels[j])
                        .expect("training labels are among class_ids");
                    per_class[slot].push(q[table.pair(i, j)]);
                }
                Ok(self.best_class(&self.scores_from(&per_class)?))
            })
            .collect()
    }

    /// Leave-one-out predictions on the training instances themselves.
    pub fn predict_training_loo(&self) -> Result<Vec<usize>> {
        (0..self.training.n_samples())
            .map(|n| self.predict_excluding(self.training.row(n), Some(n)))
            .collect()
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<usize>> {
        data.rows().map(|r| self.predict(r)).collect()
    }
}
