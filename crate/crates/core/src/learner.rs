//! Learner descriptors shared by cross-validation and the command line, and
//! the fitted models they produce.

use serde::{Deserialize, Serialize};

use crate::boosting::{train_bim, BimConfig, BoostedModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::highdim::{train_b4g, train_im4e_immigrate, ScreenedModel};
use crate::immigrate::{train, tune_sigma, Hyperparameters, ImmigrateModel};
use crate::relief::ReliefClassifier;

/// Folds used by internal cross-validation when tuning σ.
pub const INNER_FOLDS: usize = 3;

/// What to train. `fit` expects standardized data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "kebab-case")]
pub enum LearnerSpec {
    /// Predicts the most frequent training class (smallest id on ties).
    Majority,
    Relief,
    Immigrate {
        hp: Hyperparameters,
        tune: bool,
    },
    Bim(BimConfig),
    Im4eImmigrate {
        hp: Hyperparameters,
        /// `None` means 2/A.
        screen_threshold: Option<f64>,
        tune: bool,
    },
    B4g {
        bim: BimConfig,
        screen_threshold: Option<f64>,
    },
}

impl LearnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Majority => "majority",
            LearnerSpec::Relief => "relief",
            LearnerSpec::Immigrate { .. } => "immigrate",
            LearnerSpec::Bim(_) => "bim",
            LearnerSpec::Im4eImmigrate { .. } => "im4e-immigrate",
            LearnerSpec::B4g { .. } => "b4g",
        }
    }

    pub fn fit(&self, data: &Dataset, seed: u64) -> Result<TrainedModel> {
        let threshold = |t: &Option<f64>| t.unwrap_or(2.0 / data.n_features() as f64);
        Ok(match self {
            LearnerSpec::Majority => {
                let counts = data.class_counts();
                let mut best = 0;
                for (c, &n) in counts.iter().enumerate() {
                    if n > counts[best] {
                        best = c;
                    }
                }
                TrainedModel::Majority { label: best }
            }
            LearnerSpec::Relief => TrainedModel::Relief(ReliefClassifier::fit(data)?),
            LearnerSpec::Immigrate { hp, tune } => {
                let hp = seeded_hp(data, hp, *tune, seed)?;
                TrainedModel::Immigrate(train(data, &hp)?)
            }
            LearnerSpec::Bim(cfg) => {
                let cfg = BimConfig { seed, ..cfg.clone() };
                TrainedModel::Boosted(train_bim(data, &cfg)?)
            }
            LearnerSpec::Im4eImmigrate {
                hp,
                screen_threshold,
                tune,
            } => {
                let hp = seeded_hp(data, hp, *tune, seed)?;
                TrainedModel::Screened(train_im4e_immigrate(data, &hp, threshold(screen_threshold))?)
            }
            LearnerSpec::B4g { bim, screen_threshold } => {
                let cfg = BimConfig { seed, ..bim.clone() };
                TrainedModel::Boosted(train_b4g(data, &cfg, threshold(screen_threshold))?)
            }
        })
    }
}

fn seeded_hp(data: &Dataset, hp: &Hyperparameters, tune: bool, seed: u64) -> Result<Hyperparameters> {
    let hp = Hyperparameters { seed, ..hp.clone() };
    if tune {
        tune_sigma(data, &hp, INNER_FOLDS)
    } else {
        Ok(hp)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Majority { label: usize },
    Relief(ReliefClassifier),
    Immigrate(ImmigrateModel),
    Screened(ScreenedModel),
    Boosted(BoostedModel),
}

impl TrainedModel {
    /// Predicts a standardized feature vector.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        match self {
            TrainedModel::Majority { label } => Ok(*label),
            TrainedModel::Relief(m) => m.predict(x),
            TrainedModel::Immigrate(m) => m.predict(x),
            TrainedModel::Screened(m) => m.predict(x),
            TrainedModel::Boosted(m) => m.predict(x),
        }
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<usize>> {
        data.rows().map(|r| self.predict(r)).collect()
    }

    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        let predictions = self.predict_dataset(data)?;
        let correct = predictions
            .iter()
            .zip(data.labels())
            .filter(|(p, y)| p == y)
            .count();
        Ok(correct as f64 / data.n_samples() as f64)
    }

    /// The learned interaction matrix, when the model has a single one.
    pub fn weight_matrix(&self) -> Result<&crate::immigrate::WeightMatrix> {
        match self {
            TrainedModel::Immigrate(m) => Ok(&m.weights),
            TrainedModel::Screened(m) => Ok(&m.model.weights),
            _ => Err(Error::InvalidArgument(
                "model has no single weight matrix".into(),
            )),
        }
    }
}
