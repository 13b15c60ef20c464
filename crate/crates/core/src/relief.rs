//! Baseline Relief feature weighting.
//!
//! Two routes are provided. [`relief_iterative`] is the sampling loop that
//! accumulates squared nearest-miss minus nearest-hit differences.
//! [`relief_closed_form`] solves min wᵀu subject to w ≥ 0, ‖w‖₂ = 1 where
//! u sums |x − NH(x)| − |x − NM(x)| over every instance; the minimizer is
//! (−u)⁺ rescaled to unit length.
//!
//! Nearest neighbors are taken under Euclidean distance, ties to the lowest index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureWeights {
    pub w: Vec<f64>,
    /// true for the closed form (non-negative, unit norm); false for the raw accumulator.
    pub normalized: bool,
}

fn require_binary(data: &Dataset) -> Result<()> {
    let classes = data.class_ids().len();
    if classes != 2 {
        return Err(Error::InvalidArgument(format!(
            "Relief needs exactly two classes, found {classes}"
        )));
    }
    Ok(())
}

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// (nearest hit, nearest miss) of instance `i`.
pub fn nearest_hit_miss(data: &Dataset, i: usize) -> Result<(usize, usize)> {
    let xi = data.row(i);
    let yi = data.label(i);
    let mut hit: Option<(usize, f64)> = None;
    let mut miss: Option<(usize, f64)> = None;
    for j in 0..data.n_samples() {
        if j == i {
            continue;
        }
        let d = squared_distance(xi, data.row(j));
        let slot = if data.label(j) == yi { &mut hit } else { &mut miss };
        if slot.map_or(true, |(_, best)| d < best) {
            *slot = Some((j, d));
        }
    }
    let hit = hit.ok_or(Error::EmptyNeighborSet {
        instance: i,
        class: yi,
        kind: "hit",
    })?;
    let miss = miss.ok_or(Error::EmptyNeighborSet {
        instance: i,
        class: yi,
        kind: "miss",
    })?;
    Ok((hit.0, miss.0))
}

/// `m` uniformly sampled (with replacement) updates
/// w ← w − (x − NH(x))²/m + (x − NM(x))²/m, starting from w = 0.
pub fn relief_iterative(data: &Dataset, m: usize, seed: u64) -> Result<FeatureWeights> {
    require_binary(data)?;
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![0.0; data.n_features()];
    let scale = 1.0 / m as f64;
    for _ in 0..m {
        let i = rng.gen_range(0..data.n_samples());
        let (h, mi) = nearest_hit_miss(data, i)?;
        let (x, xh, xm) = (data.row(i), data.row(h), data.row(mi));
        for k in 0..w.len() {
            w[k] += ((x[k] - xm[k]).powi(2) - (x[k] - xh[k]).powi(2)) * scale;
        }
    }
    Ok(FeatureWeights { w, normalized: false })
}

/// u = Σₙ (|xₙ − NH(xₙ)| − |xₙ − NM(xₙ)|) over all instances.
pub fn relief_margin_vector(data: &Dataset) -> Result<Vec<f64>> {
    require_binary(data)?;
    let mut u = vec![0.0; data.n_features()];
    for i in 0..data.n_samples() {
        let (h, m) = nearest_hit_miss(data, i)?;
        let (x, xh, xm) = (data.row(i), data.row(h), data.row(m));
        for k in 0..u.len() {
            u[k] += (x[k] - xh[k]).abs() - (x[k] - xm[k]).abs();
        }
    }
    Ok(u)
}

/// (−u)⁺ / ‖(−u)⁺‖₂.
pub fn closed_form_from_margin(u: &[f64]) -> Result<FeatureWeights> {
    let pos: Vec<f64> = u.iter().map(|&v| (-v).max(0.0)).collect();
    let norm = pos.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Degenerate(
            "no feature has misses farther than hits; (-u)+ is zero".into(),
        ));
    }
    Ok(FeatureWeights {
        w: pos.into_iter().map(|v| v / norm).collect(),
        normalized: true,
    })
}

pub fn relief_closed_form(data: &Dataset) -> Result<FeatureWeights> {
    closed_form_from_margin(&relief_margin_vector(data)?)
}

/// Closed-form Relief weights with a weighted-Manhattan 1-NN rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliefClassifier {
    pub weights: Vec<f64>,
    pub training: Dataset,
}

impl ReliefClassifier {
    pub fn fit(data: &Dataset) -> Result<Self> {
        let weights = relief_closed_form(data)?.w;
        Ok(Self {
            weights,
            training: data.clone(),
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                actual: x.len(),
            });
        }
        let mut best = (0, f64::INFINITY);
        for (n, row) in self.training.rows().enumerate() {
            let d: f64 = self
                .weights
                .iter()
                .zip(x.iter().zip(row))
                .map(|(w, (a, b))| w * (a - b).abs())
                .sum();
            if d < best.1 {
                best = (n, d);
            }
        }
        Ok(self.training.label(best.0))
    }
}
