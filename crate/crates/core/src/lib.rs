//! Hypothesis-margin feature weighting with pairwise interactions.
//!
//! * [`relief`]: the classic Relief update and its closed-form solution.
//! * [`immigrate`]: the interaction-weight learner (quadratic-Manhattan
//!   measurement, entropy-regularized margin, alternating closed-form updates).
//! * [`boosting`]: AdaBoost over sample-weighted IMMIGRATE weak learners.
//! * [`highdim`]: diagonal pre-screening followed by interaction learning.
//! * [`eval`]: repeated stratified cross-validation and paired t-test verdicts.

pub mod boosting;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod highdim;
pub mod immigrate;
pub mod learner;
pub mod persist;
pub mod relief;

pub use dataset::{Dataset, LabelColumn, StandardizationParams};
pub use error::{Error, Result};
pub use immigrate::{Hyperparameters, ImmigrateModel, WeightMatrix};
