//! JSON model files. A file bundles the fitted model with the standardization
//! fitted on its training data, so raw feature vectors can be scored directly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boosting::BoostedModel;
use crate::dataset::{Dataset, StandardizationParams};
use crate::error::{Error, Result};
use crate::highdim::{ScreenResult, ScreenedModel};
use crate::immigrate::{ImmigrateModel, WeightMatrix};
use crate::learner::TrainedModel;
use crate::relief::ReliefClassifier;

pub const FORMAT_VERSION: u32 = 1;

/// A trained model ready to score unstandardized rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub model: TrainedModel,
    pub standardization: StandardizationParams,
    /// Column names the model expects, in order.
    pub input_features: Vec<String>,
    pub class_names: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    input_features: Vec<String>,
    class_names: Vec<String>,
    standardization_params: StandardizationParams,
    #[serde(flatten)]
    body: Body,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum Body {
    Majority { label: usize },
    Relief {
        weights: Vec<f64>,
        #[serde(flatten)]
        training: TrainingSet,
    },
    Immigrate(StoredImmigrate),
    Im4eImmigrate {
        kept_features: Vec<usize>,
        diag_weights: Vec<f64>,
        model: StoredImmigrate,
    },
    Boosted {
        #[serde(flatten)]
        training: TrainingSet,
        learners: Vec<StoredLearner>,
        votes: Vec<f64>,
        class_ids: Vec<usize>,
        feature_subset: Option<Vec<usize>>,
    },
}

#[derive(Serialize, Deserialize)]
struct TrainingSet {
    feature_names: Vec<String>,
    training_features: Vec<Vec<f64>>,
    training_labels: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct StoredLearner {
    sigma: f64,
    #[serde(rename = "W")]
    w: WeightMatrix,
    iterations: usize,
    final_cost: f64,
}

#[derive(Serialize, Deserialize)]
struct StoredImmigrate {
    sigma: f64,
    #[serde(rename = "W")]
    w: WeightMatrix,
    #[serde(flatten)]
    training: TrainingSet,
    class_ids: Vec<usize>,
    iterations: usize,
    final_cost: f64,
}

impl TrainingSet {
    fn from_dataset(d: &Dataset) -> Self {
        Self {
            feature_names: d.feature_names().to_vec(),
            training_features: d.rows().map(<[f64]>::to_vec).collect(),
            training_labels: d.labels().to_vec(),
        }
    }

    fn into_dataset(self, class_names: &[String]) -> Result<Dataset> {
        let a = self.feature_names.len();
        if let Some(bad) = self.training_features.iter().find(|r| r.len() != a) {
            return Err(Error::DimensionMismatch {
                expected: a,
                actual: bad.len(),
            });
        }
        Dataset::from_parts(
            self.training_features.concat(),
            self.training_labels,
            self.feature_names,
            class_names.to_vec(),
        )
    }
}

impl StoredImmigrate {
    fn from_model(m: &ImmigrateModel) -> Self {
        Self {
            sigma: m.sigma,
            w: m.weights.clone(),
            training: TrainingSet::from_dataset(&m.training),
            class_ids: m.class_ids.clone(),
            iterations: m.iterations,
            final_cost: m.final_cost,
        }
    }

    fn into_model(self, class_names: &[String]) -> Result<ImmigrateModel> {
        let training = self.training.into_dataset(class_names)?;
        if self.w.dim() != training.n_features() {
            return Err(Error::DimensionMismatch {
                expected: training.n_features(),
                actual: self.w.dim(),
            });
        }
        Ok(ImmigrateModel {
            weights: self.w,
            sigma: self.sigma,
            training,
            class_ids: self.class_ids,
            iterations: self.iterations,
            final_cost: self.final_cost,
        })
    }
}

fn boosted_body(m: &BoostedModel) -> Result<Body> {
    let first = m
        .learners
        .first()
        .ok_or_else(|| Error::Format("boosted model without learners".into()))?;
    // every weak learner is fitted on the same (projected) training set
    Ok(Body::Boosted {
        training: TrainingSet::from_dataset(&first.training),
        learners: m
            .learners
            .iter()
            .map(|l| StoredLearner {
                sigma: l.sigma,
                w: l.weights.clone(),
                iterations: l.iterations,
                final_cost: l.final_cost,
            })
            .collect(),
        votes: m.votes.clone(),
        class_ids: m.class_ids.clone(),
        feature_subset: m.feature_subset.clone(),
    })
}

impl SavedModel {
    /// Bundles a model with the parameters that standardized `raw_training`.
    pub fn new(model: TrainedModel, standardization: StandardizationParams, raw_training: &Dataset) -> Self {
        Self {
            model,
            standardization,
            input_features: raw_training.feature_names().to_vec(),
            class_names: raw_training.class_names().to_vec(),
        }
    }

    /// Class id for a raw (unstandardized) feature vector.
    pub fn predict_raw(&self, x: &[f64]) -> Result<usize> {
        self.model.predict(&self.standardization.apply_row(x)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let body = match &self.model {
            TrainedModel::Majority { label } => Body::Majority { label: *label },
            TrainedModel::Relief(r) => Body::Relief {
                weights: r.weights.clone(),
                training: TrainingSet::from_dataset(&r.training),
            },
            TrainedModel::Immigrate(m) => Body::Immigrate(StoredImmigrate::from_model(m)),
            TrainedModel::Screened(s) => Body::Im4eImmigrate {
                kept_features: s.screen.kept_features.clone(),
                diag_weights: s.screen.diag_weights.clone(),
                model: StoredImmigrate::from_model(&s.model),
            },
            TrainedModel::Boosted(b) => boosted_body(b)?,
        };
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            input_features: self.input_features.clone(),
            class_names: self.class_names.clone(),
            standardization_params: self.standardization.clone(),
            body,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported model format version {}",
                file.format_version
            )));
        }
        if file.standardization_params.dim() != file.input_features.len() {
            return Err(Error::DimensionMismatch {
                expected: file.input_features.len(),
                actual: file.standardization_params.dim(),
            });
        }
        let names = &file.class_names;
        let model = match file.body {
            Body::Majority { label } => TrainedModel::Majority { label },
            Body::Relief { weights, training } => TrainedModel::Relief(ReliefClassifier {
                weights,
                training: training.into_dataset(names)?,
            }),
            Body::Immigrate(m) => TrainedModel::Immigrate(m.into_model(names)?),
            Body::Im4eImmigrate {
                kept_features,
                diag_weights,
                model,
            } => TrainedModel::Screened(ScreenedModel {
                screen: ScreenResult {
                    kept_features,
                    diag_weights,
                },
                model: model.into_model(names)?,
            }),
            Body::Boosted {
                training,
                learners,
                votes,
                class_ids,
                feature_subset,
            } => {
                if votes.len() != learners.len() {
                    return Err(Error::Format("one vote per learner expected".into()));
                }
                let training = training.into_dataset(names)?;
                let learners = learners
                    .into_iter()
                    .map(|l| ImmigrateModel {
                        weights: l.w,
                        sigma: l.sigma,
                        training: training.clone(),
                        class_ids: class_ids.clone(),
                        iterations: l.iterations,
                        final_cost: l.final_cost,
                    })
                    .collect();
                TrainedModel::Boosted(BoostedModel {
                    learners,
                    votes,
                    class_ids,
                    feature_subset,
                })
            }
        };
        Ok(Self {
            model,
            standardization: file.standardization_params,
            input_features: file.input_features,
            class_names: file.class_names,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}
