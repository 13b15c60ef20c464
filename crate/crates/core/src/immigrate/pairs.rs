//! Cached pairwise displacements and the per-instance neighbor distributions
//! built from them.
//!
//! Every quantity the learner needs (measurements, the α/β softmaxes, the
//! scatter matrix and the cost) is a sum over ordered (instance, neighbor)
//! pairs of terms in |xₙ − xⱼ|. The displacement is symmetric in the pair,
//! so it is stored once per unordered pair as a row of a P×A matrix and
//! the sums become dense matrix products.

use nalgebra::DMatrix;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Hit and miss probabilities for every instance.
///
/// `hits[n]` lists the other instances sharing n's label and `alpha[n]` the
/// matching probabilities; `misses[n]`/`beta[n]` likewise for other labels.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborWeights {
    pub hits: Vec<Vec<usize>>,
    pub alpha: Vec<Vec<f64>>,
    pub misses: Vec<Vec<usize>>,
    pub beta: Vec<Vec<f64>>,
}

impl NeighborWeights {
    pub fn n_instances(&self) -> usize {
        self.hits.len()
    }
}

/// Shannon entropy (natural log) with 0·log 0 = 0.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.ln())
        .sum::<f64>()
}

pub fn hit_entropy(nw: &NeighborWeights, n: usize) -> f64 {
    entropy(&nw.alpha[n])
}

pub fn miss_entropy(nw: &NeighborWeights, n: usize) -> f64 {
    entropy(&nw.beta[n])
}

/// Softmax of −values/σ, shifted by the minimum value.
pub(crate) fn softmax_neg(values: &[f64], sigma: f64) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out: Vec<f64> = values.iter().map(|&v| (-(v - min) / sigma).exp()).collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= total);
    out
}

#[derive(Debug, Clone)]
pub struct PairTable {
    n: usize,
    diffs: DMatrix<f64>,
    hits: Vec<Vec<usize>>,
    misses: Vec<Vec<usize>>,
}

impl PairTable {
    /// Fails if some instance has no hit (its class is a singleton) or no miss.
    pub fn new(data: &Dataset) -> Result<Self> {
        let n = data.n_samples();
        let a = data.n_features();
        let labels = data.labels();
        let mut hits = vec![Vec::new(); n];
        let mut misses = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if labels[i] == labels[j] {
                    hits[i].push(j);
                } else {
                    misses[i].push(j);
                }
            }
            if hits[i].is_empty() {
                return Err(Error::EmptyNeighborSet {
                    instance: i,
                    class: labels[i],
                    kind: "hit",
                });
            }
            if misses[i].is_empty() {
                return Err(Error::EmptyNeighborSet {
                    instance: i,
                    class: labels[i],
                    kind: "miss",
                });
            }
        }
        let p = n * (n - 1) / 2;
        let mut diffs = DMatrix::zeros(p, a);
        let mut row = 0;
        for i in 0..n {
            let xi = data.row(i);
            for j in (i + 1)..n {
                let xj = data.row(j);
                for k in 0..a {
                    diffs[(row, k)] = (xi[k] - xj[k]).abs();
                }
                row += 1;
            }
        }
        Ok(Self {
            n,
            diffs,
            hits,
            misses,
        })
    }

    pub fn n_instances(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.diffs.ncols()
    }

    #[inline]
    pub(crate) fn pair(&self, i: usize, j: usize) -> usize {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        lo * self.n - lo * (lo + 1) / 2 + (hi - lo - 1)
    }

    /// q for every unordered pair under a full weight matrix.
    pub fn measurements(&self, w: &DMatrix<f64>) -> Vec<f64> {
        let dw = &self.diffs * w;
        let mut q = vec![0.0; self.diffs.nrows()];
        for k in 0..self.diffs.ncols() {
            let dcol = self.diffs.column(k);
            let wcol = dw.column(k);
            for (p, qp) in q.iter_mut().enumerate() {
                *qp += dcol[p] * wcol[p];
            }
        }
        q
    }

    /// q for every unordered pair under W = diag(w).
    pub fn diagonal_measurements(&self, w: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.diffs.nrows()];
        for (k, &wk) in w.iter().enumerate() {
            if wk == 0.0 {
                continue;
            }
            for (p, qp) in q.iter_mut().enumerate() {
                let d = self.diffs[(p, k)];
                *qp += wk * d * d;
            }
        }
        q
    }

    /// Closed-form α/β: per-instance softmaxes of −q/σ over hits and misses.
    pub fn neighbor_weights(&self, q: &[f64], sigma: f64) -> NeighborWeights {
        let gather = |n: usize, set: &[usize]| -> Vec<f64> {
            let vals: Vec<f64> = set.iter().map(|&j| q[self.pair(n, j)]).collect();
            softmax_neg(&vals, sigma)
        };
        let alpha = (0..self.n).map(|n| gather(n, &self.hits[n])).collect();
        let beta = (0..self.n).map(|n| gather(n, &self.misses[n])).collect();
        NeighborWeights {
            hits: self.hits.clone(),
            alpha,
            misses: self.misses.clone(),
            beta,
        }
    }

    /// Net coefficient of each unordered pair's outer product in Σ.
    fn pair_coefficients(&self, nw: &NeighborWeights, instance_weights: Option<&[f64]>) -> Vec<f64> {
        let mut c = vec![0.0; self.diffs.nrows()];
        for n in 0..self.n {
            let dn = instance_weights.map_or(1.0, |w| w[n]);
            if dn == 0.0 {
                continue;
            }
            for (&h, &a) in nw.hits[n].iter().zip(&nw.alpha[n]) {
                c[self.pair(n, h)] += dn * a;
            }
            for (&m, &b) in nw.misses[n].iter().zip(&nw.beta[n]) {
                c[self.pair(n, m)] -= dn * b;
            }
        }
        c
    }

    /// Σ = Σₙ Dₙ (Σ_{n,H} − Σ_{n,M}).
    pub fn scatter(&self, nw: &NeighborWeights, instance_weights: Option<&[f64]>) -> DMatrix<f64> {
        let c = self.pair_coefficients(nw, instance_weights);
        let mut scaled = self.diffs.clone();
        for mut col in scaled.column_iter_mut() {
            for (v, cp) in col.iter_mut().zip(&c) {
                *v *= cp;
            }
        }
        let s = self.diffs.transpose() * scaled;
        (&s + s.transpose()) * 0.5
    }

    /// Diagonal of Σ only.
    pub fn diagonal_scatter(&self, nw: &NeighborWeights, instance_weights: Option<&[f64]>) -> Vec<f64> {
        let c = self.pair_coefficients(nw, instance_weights);
        self.diffs
            .column_iter()
            .map(|col| col.iter().zip(&c).map(|(d, cp)| cp * d * d).sum())
            .collect()
    }

    /// Margin-plus-entropy cost for pair measurements `q`.
    pub fn cost(
        &self,
        q: &[f64],
        nw: &NeighborWeights,
        sigma: f64,
        instance_weights: Option<&[f64]>,
    ) -> f64 {
        let mut total = 0.0;
        for n in 0..self.n {
            let dn = instance_weights.map_or(1.0, |w| w[n]);
            if dn == 0.0 {
                continue;
            }
            let hit: f64 = nw.hits[n]
                .iter()
                .zip(&nw.alpha[n])
                .map(|(&h, a)| a * q[self.pair(n, h)])
                .sum();
            let miss: f64 = nw.misses[n]
                .iter()
                .zip(&nw.beta[n])
                .map(|(&m, b)| b * q[self.pair(n, m)])
                .sum();
            let ent = entropy(&nw.beta[n]) - entropy(&nw.alpha[n]);
            total += dn * (hit - miss + sigma * ent);
        }
        total
    }
}
