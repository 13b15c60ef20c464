//! Boosted IMMIGRATE: AdaBoost over iteration-capped, sample-weighted
//! IMMIGRATE learners with σ annealed geometrically from σ_max to σ_min.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::immigrate::{
    fit_on_table, Hyperparameters, ImmigrateModel, PairTable, TrainOptions, WeightMatrix,
};

/// Rounds in a row that may be discarded before boosting gives up.
const MAX_CONSECUTIVE_DISCARDS: usize = 3;

/// A probability vector over training instances.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleWeights(Vec<f64>);

impl SampleWeights {
    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn new(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() || d.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument("sample weights must be finite and non-negative".into()));
        }
        let total: f64 = d.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("sample weights sum to {total}, not 1")));
        }
        Ok(Self(d))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Weighted share of `mistakes`.
    pub fn weighted_error(&self, mistakes: &[bool]) -> f64 {
        self.0
            .iter()
            .zip(mistakes)
            .filter(|(_, &m)| m)
            .map(|(d, _)| d)
            .sum()
    }

    /// Multiplies mistakes by e^{vote} and the rest by e^{−vote}, then renormalizes.
    fn reweight(&mut self, mistakes: &[bool], vote: f64) {
        let up = vote.exp();
        let down = (-vote).exp();
        for (d, &m) in self.0.iter_mut().zip(mistakes) {
            *d *= if m { up } else { down };
        }
        let total: f64 = self.0.iter().sum();
        self.0.iter_mut().for_each(|d| *d /= total);
    }
}

/// Weighted-vote ensemble of IMMIGRATE learners.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostedModel {
    pub learners: Vec<ImmigrateModel>,
    pub votes: Vec<f64>,
    pub class_ids: Vec<usize>,
    /// Columns of the full feature vector the learners see; `None` means all.
    pub feature_subset: Option<Vec<usize>>,
}

impl BoostedModel {
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let projected;
        let x = match &self.feature_subset {
            Some(cols) => {
                if let Some(&bad) = cols.iter().find(|&&c| c >= x.len()) {
                    return Err(Error::DimensionMismatch {
                        expected: bad + 1,
                        actual: x.len(),
                    });
                }
                projected = cols.iter().map(|&c| x[c]).collect::<Vec<_>>();
                &projected[..]
            }
            None => x,
        };
        let mut tally = vec![0.0; self.class_ids.len()];
        for (learner, &vote) in self.learners.iter().zip(&self.votes) {
            let y = learner.predict(x)?;
            let slot = self
                .class_ids
                .binary_search(&y)
                .map_err(|_| Error::Format(format!("learner predicted unknown class {y}")))?;
            tally[slot] += vote;
        }
        let mut best = 0;
        for (i, &t) in tally.iter().enumerate().skip(1) {
            if t > tally[best] {
                best = i;
            }
        }
        Ok(self.class_ids[best])
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<usize>> {
        data.rows().map(|r| self.predict(r)).collect()
    }
}

pub fn predict_bim(model: &BoostedModel, x: &[f64]) -> Result<usize> {
    model.predict(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimConfig {
    /// Maximum number of boosting rounds.
    pub rounds: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// Alternation cap for each weak learner.
    pub weak_max_iter: usize,
    pub seed: u64,
}

impl Default for BimConfig {
    fn default() -> Self {
        Self {
            rounds: 100,
            sigma_max: 4.0,
            sigma_min: 0.2,
            weak_max_iter: 3,
            seed: 42,
        }
    }
}

impl BimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidArgument("T must be at least 1".into()));
        }
        if !(self.sigma_min > 0.0 && self.sigma_min <= self.sigma_max && self.sigma_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < sigma_min <= sigma_max, got {} and {}",
                self.sigma_min, self.sigma_max
            )));
        }
        if self.weak_max_iter == 0 {
            return Err(Error::InvalidArgument("weak_max_iter must be at least 1".into()));
        }
        Ok(())
    }

    /// σ for 1-based round `t`: σ_max·(σ_min/σ_max)^{(t−1)/T}, floored at σ_min.
    pub fn sigma_at(&self, t: usize) -> f64 {
        let ratio = self.sigma_min / self.sigma_max;
        let s = self.sigma_max * ratio.powf((t - 1) as f64 / self.rounds as f64);
        s.max(self.sigma_min)
    }
}

/// One weak learner: the IMMIGRATE alternation with each instance's cost
/// term multiplied by its sample weight, capped at `weak_max_iter` steps.
pub fn train_weak(
    data: &Dataset,
    d: &SampleWeights,
    sigma: f64,
    weak_max_iter: usize,
    seed: u64,
) -> Result<ImmigrateModel> {
    let table = PairTable::new(data)?;
    train_weak_on(&table, data, d, sigma, weak_max_iter, seed, None)
}

pub(crate) fn train_weak_on(
    table: &PairTable,
    data: &Dataset,
    d: &SampleWeights,
    sigma: f64,
    weak_max_iter: usize,
    seed: u64,
    init: Option<WeightMatrix>,
) -> Result<ImmigrateModel> {
    if d.len() != data.n_samples() {
        return Err(Error::DimensionMismatch {
            expected: data.n_samples(),
            actual: d.len(),
        });
    }
    let hp = Hyperparameters {
        sigma,
        max_iterations: weak_max_iter,
        seed,
        ..Hyperparameters::default()
    };
    // rescaled to mean 1 so the relative stopping rule matches the unweighted fit
    let n = data.n_samples() as f64;
    let scaled: Vec<f64> = d.as_slice().iter().map(|v| v * n).collect();
    let opts = TrainOptions {
        init,
        instance_weights: Some(&scaled),
    };
    fit_on_table(table, data, &hp, opts, &mut |_| {})
}

/// What happened in one boosting round.
#[derive(Debug, Clone)]
pub struct RoundRecord<'a> {
    /// 1-based.
    pub round: usize,
    pub sigma: f64,
    pub error: f64,
    pub retained: bool,
    /// Leave-one-out mistakes of this round's learner on the training set.
    pub mistakes: &'a [bool],
    pub weights_before: &'a SampleWeights,
    /// Equal to `weights_before` for a discarded round.
    pub weights_after: &'a SampleWeights,
}

pub fn train_bim(data: &Dataset, cfg: &BimConfig) -> Result<BoostedModel> {
    train_bim_with(data, cfg, None, &mut |_| {})
}

/// Boosting loop. Each round's training error is measured leave-one-out:
/// a training instance is never scored against itself.
pub fn train_bim_with(
    data: &Dataset,
    cfg: &BimConfig,
    init: Option<&WeightMatrix>,
    observer: &mut dyn FnMut(&RoundRecord<'_>),
) -> Result<BoostedModel> {
    cfg.validate()?;
    let class_ids = data.class_ids();
    if class_ids.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "boosting is binary; found {} classes",
            class_ids.len()
        )));
    }
    let table = PairTable::new(data)?;
    let mut d = SampleWeights::uniform(data.n_samples());
    let mut learners = Vec::new();
    let mut votes = Vec::new();
    let mut discarded_in_a_row = 0;
    for t in 1..=cfg.rounds {
        let sigma = cfg.sigma_at(t);
        let seed = cfg.seed.wrapping_add(t as u64);
        let learner = train_weak_on(&table, data, &d, sigma, cfg.weak_max_iter, seed, init.cloned())?;
        let predictions = learner.predict_training_loo_on(&table)?;
        let mistakes: Vec<bool> = predictions
            .iter()
            .zip(data.labels())
            .map(|(p, y)| p != y)
            .collect();
        let error = d.weighted_error(&mistakes);
        if error >= 0.5 || error == 0.0 {
            observer(&RoundRecord {
                round: t,
                sigma,
                error,
                retained: false,
                mistakes: &mistakes,
                weights_before: &d,
                weights_after: &d,
            });
            discarded_in_a_row += 1;
            if discarded_in_a_row == MAX_CONSECUTIVE_DISCARDS {
                log::debug!("stopping after {t} rounds: {MAX_CONSECUTIVE_DISCARDS} discards in a row");
                break;
            }
            continue;
        }
        discarded_in_a_row = 0;
        let vote = 0.5 * ((1.0 - error) / error).ln();
        let before = d.clone();
        d.reweight(&mistakes, vote);
        observer(&RoundRecord {
            round: t,
            sigma,
            error,
            retained: true,
            mistakes: &mistakes,
            weights_before: &before,
            weights_after: &d,
        });
        learners.push(learner);
        votes.push(vote);
    }
    if learners.is_empty() {
        return Err(Error::NoLearnerRetained { rounds: cfg.rounds });
    }
    Ok(BoostedModel {
        learners,
        votes,
        class_ids,
        feature_subset: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_synthetic;
    use crate::immigrate::{scatter_matrix, update_neighbor_weights};
    use approx::assert_abs_diff_eq;

    fn tiny_model(x: f64, label: usize) -> ImmigrateModel {
        // a learner that always predicts `label` near x
        let d = Dataset::new(vec![vec![x], vec![x + 100.0]], vec![label, 1 - label], vec!["f".into()]).unwrap();
        ImmigrateModel {
            weights: WeightMatrix::uniform_diagonal(1),
            sigma: 1.0,
            class_ids: vec![0, 1],
            training: d,
            iterations: 0,
            final_cost: 0.0,
        }
    }

    fn ensemble(votes: Vec<f64>, labels: &[usize]) -> BoostedModel {
        BoostedModel {
            learners: labels.iter().map(|&l| tiny_model(0.0, l)).collect(),
            votes,
            class_ids: vec![0, 1],
            feature_subset: None,
        }
    }

    #[test]
    fn vote_cases() {
        assert_eq!(ensemble(vec![0.2, 0.9], &[1, 1]).predict(&[0.0]).unwrap(), 1);
        assert_eq!(ensemble(vec![0.7, 0.3], &[1, 0]).predict(&[0.0]).unwrap(), 1);
        assert_eq!(ensemble(vec![0.5, 0.5], &[1, 0]).predict(&[0.0]).unwrap(), 0);
    }

    #[test]
    fn vote_weight_for_quarter_error() {
        let vote: f64 = 0.5 * ((1.0 - 0.25) / 0.25f64).ln();
        assert_abs_diff_eq!(vote, 0.5 * 3f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(vote, 0.5493, epsilon = 1e-4);
    }

    #[test]
    fn reweighting_balances_the_last_learner() {
        let mut d = SampleWeights::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let mistakes = [true, false, false, true];
        let eps = d.weighted_error(&mistakes);
        d.reweight(&mistakes, 0.5 * ((1.0 - eps) / eps).ln());
        assert_abs_diff_eq!(d.weighted_error(&mistakes), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.as_slice().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sigma_schedule_is_monotone_and_bounded() {
        let cfg = BimConfig {
            rounds: 20,
            ..Default::default()
        };
        assert_eq!(cfg.sigma_at(1), 4.0);
        let mut prev = f64::INFINITY;
        for t in 1..=20 {
            let s = cfg.sigma_at(t);
            assert!(s <= prev && (0.2..=4.0).contains(&s));
            prev = s;
        }
    }

    #[test]
    fn uniform_weights_match_unweighted_training() {
        let data = generate_synthetic(15, 0.1, 3).unwrap();
        let weak = train_weak(&data, &SampleWeights::uniform(data.n_samples()), 1.0, 3, 5).unwrap();
        let hp = Hyperparameters {
            sigma: 1.0,
            max_iterations: 3,
            seed: 5,
            ..Default::default()
        };
        let plain = crate::immigrate::train(&data, &hp).unwrap();
        assert_eq!(weak.iterations, plain.iterations);
        assert_abs_diff_eq!(weak.weights.matrix(), plain.weights.matrix(), epsilon = 1e-10);
    }

    #[test]
    fn concentrated_weights_sum_only_the_support() {
        let data = generate_synthetic(3, 0.0, 8).unwrap();
        let w = WeightMatrix::uniform_diagonal(2);
        let nw = update_neighbor_weights(&data, &w, 1.0).unwrap();
        let support = [0usize, 4];
        let mut d = vec![0.0; 6];
        for &s in &support {
            d[s] = 0.5;
        }
        let sigma = scatter_matrix(&data, &nw, Some(&d)).unwrap();
        // direct sum of outer products for the supported instances only
        let mut oracle = nalgebra::DMatrix::zeros(2, 2);
        for &n in &support {
            let x = data.row(n);
            for (set, probs, sign) in [(&nw.hits[n], &nw.alpha[n], 1.0), (&nw.misses[n], &nw.beta[n], -1.0)] {
                for (&j, &p) in set.iter().zip(probs) {
                    let v = nalgebra::DVector::from_iterator(
                        2,
                        x.iter().zip(data.row(j)).map(|(a, b)| (a - b).abs()),
                    );
                    oracle += sign * 0.5 * p * &v * v.transpose();
                }
            }
        }
        assert_abs_diff_eq!(sigma, oracle, epsilon = 1e-12);

        let mut single = vec![0.0; 6];
        single[2] = 1.0;
        let one = scatter_matrix(&data, &nw, Some(&single)).unwrap();
        let mut oracle = nalgebra::DMatrix::zeros(2, 2);
        let x = data.row(2);
        for (set, probs, sign) in [(&nw.hits[2], &nw.alpha[2], 1.0), (&nw.misses[2], &nw.beta[2], -1.0)] {
            for (&j, &p) in set.iter().zip(probs) {
                let v = nalgebra::DVector::from_iterator(2, x.iter().zip(data.row(j)).map(|(a, b)| (a - b).abs()));
                oracle += sign * p * &v * v.transpose();
            }
        }
        assert_abs_diff_eq!(one, oracle, epsilon = 1e-12);
    }

    #[test]
    fn sample_weight_validation() {
        assert!(SampleWeights::new(vec![0.5, 0.6]).is_err());
        assert!(SampleWeights::new(vec![-0.5, 1.5]).is_err());
        assert!(SampleWeights::new(vec![0.25, 0.75]).is_ok());
    }

    #[test]
    fn multiclass_is_rejected() {
        let d = Dataset::new(
            vec![vec![0.0], vec![0.1], vec![1.0], vec![1.1], vec![2.0], vec![2.1]],
            vec![0, 0, 1, 1, 2, 2],
            vec!["f".into()],
        )
        .unwrap();
        assert!(train_bim(&d, &BimConfig::default()).is_err());
    }
}
