use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Win,
    Tie,
    Loss,
}

/// Verdict of A against B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    pub outcome: Outcome,
    /// Two-sided p-value for mean(a − b) = 0.
    pub p_equal: f64,
    /// One-sided p-value against mean(a − b) > 0.
    pub p_one_sided: f64,
    pub t_statistic: f64,
}

fn check(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InvalidArgument("paired t-test needs at least two pairs".into()));
    }
    Ok(())
}

/// mean(d) / (sd(d) / √n) with d = a − b. Infinite when sd is zero and the mean is not.
pub fn t_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    check(a, b)?;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    if se == 0.0 {
        return Ok(if mean == 0.0 { 0.0 } else { mean.signum() * f64::INFINITY });
    }
    Ok(mean / se)
}

/// Two-stage comparison: tie unless the two-sided test rejects equality at
/// [`SIGNIFICANCE_LEVEL`]; otherwise win when the one-sided test rejects too,
/// loss when it does not.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<ComparisonVerdict> {
    let t = t_statistic(a, b)?;
    let all_zero = a.iter().zip(b).all(|(x, y)| x == y);
    if all_zero {
        return Ok(ComparisonVerdict {
            outcome: Outcome::Tie,
            p_equal: 1.0,
            p_one_sided: 0.5,
            t_statistic: 0.0,
        });
    }
    let (p_equal, p_one_sided) = if t.is_infinite() {
        (0.0, if t > 0.0 { 0.0 } else { 1.0 })
    } else {
        let dist = StudentsT::new(0.0, 1.0, (a.len() - 1) as f64)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        // sf(|t|) computed as cdf(−|t|) keeps precision in the tail
        (2.0 * dist.cdf(-t.abs()), dist.cdf(-t))
    };
    let outcome = if p_equal > SIGNIFICANCE_LEVEL {
        Outcome::Tie
    } else if p_one_sided < SIGNIFICANCE_LEVEL {
        Outcome::Win
    } else {
        Outcome::Loss
    };
    Ok(ComparisonVerdict {
        outcome,
        p_equal,
        p_one_sided,
        t_statistic: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Student t density integrated with composite Simpson on [−t_max, x],
    /// plus the far tail, which is negligible at the chosen bound.
    fn t_cdf_by_quadrature(x: f64, nu: f64) -> f64 {
        let ln_gamma = |z: f64| statrs::function::gamma::ln_gamma(z);
        let c = (ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0)).exp() / (nu * std::f64::consts::PI).sqrt();
        let pdf = |t: f64| c * (1.0 + t * t / nu).powf(-(nu + 1.0) / 2.0);
        // integrate symmetric mass from 0 to |x| instead of the heavy tail
        let hi = x.abs();
        let n = 200_000;
        let h = hi / n as f64;
        let mut s = pdf(0.0) + pdf(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * pdf(i as f64 * h);
        }
        let half = s * h / 3.0;
        if x >= 0.0 {
            0.5 + half
        } else {
            0.5 - half
        }
    }

    #[test]
    fn five_element_example() {
        let a = [0.90, 0.85, 0.88, 0.92, 0.87];
        let b = [0.86, 0.84, 0.85, 0.88, 0.86];
        // d = (0.04, 0.01, 0.03, 0.04, 0.01), mean 0.026
        let t = t_statistic(&a, &b).unwrap();
        let d = [0.04, 0.01, 0.03, 0.04, 0.01];
        let mean: f64 = d.iter().sum::<f64>() / 5.0;
        let sd = (d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0).sqrt();
        assert_abs_diff_eq!(t, mean / (sd / 5f64.sqrt()), epsilon = 1e-9);
        assert_abs_diff_eq!(t, 3.8334908, epsilon = 1e-6);
        let v = paired_t_test(&a, &b).unwrap();
        let oracle_one = 1.0 - t_cdf_by_quadrature(t, 4.0);
        assert_abs_diff_eq!(v.p_one_sided, oracle_one, epsilon = 1e-6);
        assert_abs_diff_eq!(v.p_equal, 2.0 * oracle_one, epsilon = 1e-6);
        assert_eq!(v.outcome, Outcome::Win);
    }

    #[test]
    fn equal_vectors_tie() {
        let a = [0.5, 0.6, 0.7];
        let v = paired_t_test(&a, &a).unwrap();
        assert_eq!(v.outcome, Outcome::Tie);
    }

    #[test]
    fn constant_shift_wins() {
        let b: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin() * 0.1 + 0.5).collect();
        let a: Vec<f64> = b.iter().map(|v| v + 0.1).collect();
        assert_eq!(paired_t_test(&a, &b).unwrap().outcome, Outcome::Win);
        assert_eq!(paired_t_test(&b, &a).unwrap().outcome, Outcome::Loss);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(paired_t_test(&[1.0], &[1.0]).is_err());
        assert!(paired_t_test(&[1.0, 2.0], &[1.0]).is_err());
    }
}
