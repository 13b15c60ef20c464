//! Experiment harness: repeated stratified cross-validation, the two-stage
//! paired t-test verdict, and heat-map export.

mod cv;
mod heatmap;
mod ttest;

pub use cv::{cross_validate, cross_validate_with_folds, CvConfig, CvReport};
pub use heatmap::{export_heatmap, format_significant};
pub use ttest::{paired_t_test, t_statistic, ComparisonVerdict, Outcome, SIGNIFICANCE_LEVEL};
