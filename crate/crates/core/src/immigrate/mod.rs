//! The IMMIGRATE learner: a quadratic-Manhattan measurement whose weight
//! matrix is learned by alternating closed-form updates of the hit/miss
//! distributions (α, β) and of W, plus the softmax-margin prediction rule.

mod matrix;
mod model;
mod pairs;
mod tune;

use nalgebra::DMatrix;

pub use matrix::{
    closed_form_update, enforce_nonnegative, prune, quadratic_manhattan, update_weight_matrix,
    WeightMatrix,
};
pub use model::{
    train, train_with, Hyperparameters, ImmigrateModel, IterationRecord, TrainOptions,
};
pub use pairs::{entropy, hit_entropy, miss_entropy, NeighborWeights, PairTable};
pub use tune::{sigma_grid, tune_sigma, tune_sigma_on, TuningCandidate};

pub(crate) use model::fit_on_table;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// α/β for every instance under the current W.
pub fn update_neighbor_weights(data: &Dataset, w: &WeightMatrix, sigma: f64) -> Result<NeighborWeights> {
    check_dim(data, w)?;
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let table = PairTable::new(data)?;
    let q = table.measurements(w.matrix());
    Ok(table.neighbor_weights(&q, sigma))
}

/// Expected hit measurement minus expected miss measurement, summed over
/// instances, plus σ times the summed (miss entropy − hit entropy).
pub fn cost(data: &Dataset, w: &WeightMatrix, nw: &NeighborWeights, sigma: f64) -> Result<f64> {
    check_dim(data, w)?;
    let table = PairTable::new(data)?;
    check_neighbors(&table, nw)?;
    let q = table.measurements(w.matrix());
    Ok(table.cost(&q, nw, sigma, None))
}

/// Σ = Σₙ Dₙ (Σ_{n,H} − Σ_{n,M}), with Dₙ = 1 when no weights are given.
pub fn scatter_matrix(
    data: &Dataset,
    nw: &NeighborWeights,
    instance_weights: Option<&[f64]>,
) -> Result<DMatrix<f64>> {
    let table = PairTable::new(data)?;
    check_neighbors(&table, nw)?;
    if let Some(w) = instance_weights {
        if w.len() != data.n_samples() {
            return Err(Error::DimensionMismatch {
                expected: data.n_samples(),
                actual: w.len(),
            });
        }
    }
    Ok(table.scatter(nw, instance_weights))
}

fn check_dim(data: &Dataset, w: &WeightMatrix) -> Result<()> {
    if data.n_features() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: w.dim(),
            actual: data.n_features(),
        });
    }
    Ok(())
}

fn check_neighbors(table: &PairTable, nw: &NeighborWeights) -> Result<()> {
    if nw.n_instances() != table.n_instances() {
        return Err(Error::DimensionMismatch {
            expected: table.n_instances(),
            actual: nw.n_instances(),
        });
    }
    Ok(())
}
