//! Evaluation metrics over per-user average rates.
//!
//! A campaign pools the per-user frame averages of all drops into one sample
//! set and reports its ECDF, percentile rates, mean rate, and Jain fairness.
//! Fairness is computed two ways — the mean of per-drop indices (the
//! headline number) and the index of the pooled samples — since aggregation
//! order changes the value slightly.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("metric requires at least one sample")]
    Empty,
    #[error("rates must be non-negative and finite")]
    InvalidSample,
    #[error("Jain index is undefined when every rate is zero")]
    AllZero,
    #[error("percentile rank must lie strictly between 0 and 100")]
    InvalidRank,
}

/// Jain's fairness index: `(sum r)^2 / (n * sum r^2)`. Equals 1 when all
/// rates match and 1/n when a single user holds everything.
pub fn jain_index(rates: &[f64]) -> Result<f64, MetricsError> {
    if rates.is_empty() {
        return Err(MetricsError::Empty);
    }
    if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(MetricsError::InvalidSample);
    }
    let sum: f64 = rates.iter().sum();
    let sum_sq: f64 = rates.iter().map(|r| r * r).sum();
    if sum_sq == 0.0 {
        return Err(MetricsError::AllZero);
    }
    Ok(sum * sum / (rates.len() as f64 * sum_sq))
}

/// Linear-interpolation quantile on the sorted samples: rank `q` in (0, 100)
/// maps to position `(n-1) * q / 100` and interpolates between the two
/// nearest order statistics.
pub fn percentile(samples: &[f64], q: f64) -> Result<f64, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::Empty);
    }
    if !(q > 0.0 && q < 100.0) {
        return Err(MetricsError::InvalidRank);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let pos = (sorted.len() - 1) as f64 * q / 100.0;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 || lo + 1 == sorted.len() {
        Ok(sorted[lo])
    } else {
        Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
    }
}

/// Arithmetic mean.
pub fn mean(samples: &[f64]) -> Result<f64, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(samples.iter().sum::<f64>() / samples.len() as f64)
}

/// Step-function ECDF: sorted distinct values with cumulative probability
/// `i/n` at the last occurrence of each value. The final step is exactly 1.
pub fn ecdf(samples: &[f64]) -> Result<Vec<(f64, f64)>, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut steps: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (i, &v) in sorted.iter().enumerate() {
        let p = (i + 1) as f64 / n;
        match steps.last_mut() {
            Some(last) if last.0 == v => last.1 = p,
            _ => steps.push((v, p)),
        }
    }
    Ok(steps)
}

/// Aggregated metrics of one scenario point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    /// ECDF steps over the pooled per-user average rates.
    pub ecdf: Vec<(f64, f64)>,
    /// 1st-percentile rate of the pooled samples, bit/s.
    pub p1_rate_bps: f64,
    /// Mean of the pooled samples, bit/s.
    pub mean_rate_bps: f64,
    /// Mean of the per-drop Jain indices — the headline fairness number.
    pub jain_mean: f64,
    /// Jain index of the pooled samples.
    pub jain_pooled: f64,
    pub sample_count: usize,
}

impl MetricsReport {
    /// Builds the report from one rate vector per drop (one entry per user).
    pub fn from_per_drop_rates(per_drop: &[Vec<f64>]) -> Result<Self, MetricsError> {
        if per_drop.is_empty() {
            return Err(MetricsError::Empty);
        }
        let mut jain_sum = 0.0;
        for rates in per_drop {
            jain_sum += jain_index(rates)?;
        }
        let pooled: Vec<f64> = per_drop.iter().flatten().copied().collect();
        Ok(MetricsReport {
            ecdf: ecdf(&pooled)?,
            p1_rate_bps: percentile(&pooled, 1.0)?,
            mean_rate_bps: mean(&pooled)?,
            jain_mean: jain_sum / per_drop.len() as f64,
            jain_pooled: jain_index(&pooled)?,
            sample_count: pooled.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jain_reference_values() {
        assert_eq!(jain_index(&[3.0, 3.0, 3.0, 3.0]).unwrap(), 1.0);
        let mut one_hot = vec![0.0; 8];
        one_hot[3] = 5.0;
        assert_eq!(jain_index(&one_hot).unwrap(), 0.125);
        let j = jain_index(&[1.0, 2.0, 3.0]).unwrap();
        assert!((j - 6.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn jain_rejects_degenerate_input() {
        assert_eq!(jain_index(&[]), Err(MetricsError::Empty));
        assert_eq!(jain_index(&[0.0, 0.0]), Err(MetricsError::AllZero));
        assert_eq!(jain_index(&[1.0, -2.0]), Err(MetricsError::InvalidSample));
    }

    #[test]
    fn percentile_reference_values() {
        assert_eq!(percentile(&[7.0; 9], 1.0).unwrap(), 7.0);
        assert_eq!(percentile(&[7.0; 9], 99.0).unwrap(), 7.0);
        let ladder: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile(&ladder, 50.0).unwrap(), 50.5);
        assert!((percentile(&ladder, 1.0).unwrap() - 1.99).abs() < 1e-12);
    }

    #[test]
    fn percentile_rejects_bad_rank() {
        assert_eq!(percentile(&[1.0], 0.0), Err(MetricsError::InvalidRank));
        assert_eq!(percentile(&[1.0], 100.0), Err(MetricsError::InvalidRank));
        assert_eq!(percentile(&[], 1.0), Err(MetricsError::Empty));
    }

    #[test]
    fn mean_reference_values() {
        assert_eq!(mean(&[2.0, 4.0]).unwrap(), 3.0);
        assert_eq!(mean(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(mean(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
        assert_eq!(mean(&[]), Err(MetricsError::Empty));
    }

    #[test]
    fn ecdf_steps_and_dedup() {
        assert_eq!(ecdf(&[5.0]).unwrap(), vec![(5.0, 1.0)]);
        let steps = ecdf(&[1.0, 1.0, 2.0]).unwrap();
        assert_eq!(steps, vec![(1.0, 2.0 / 3.0), (2.0, 1.0)]);
        let many: Vec<f64> = (0..1600).map(|i| i as f64).collect();
        let steps = ecdf(&many).unwrap();
        assert_eq!(steps.len(), 1600);
        assert_eq!(steps.last().unwrap().1, 1.0);
        assert!(steps.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
    }

    #[test]
    fn report_aggregates_across_drops() {
        let per_drop = vec![vec![1.0, 2.0, 3.0], vec![3.0, 3.0, 3.0]];
        let report = MetricsReport::from_per_drop_rates(&per_drop).unwrap();
        assert_eq!(report.sample_count, 6);
        assert!((report.mean_rate_bps - 15.0 / 6.0).abs() < 1e-12);
        assert!((report.jain_mean - (6.0 / 7.0 + 1.0) / 2.0).abs() < 1e-12);
        assert!((report.jain_pooled - jain_index(&[1.0, 2.0, 3.0, 3.0, 3.0, 3.0]).unwrap()).abs() < 1e-12);
        assert_eq!(report.ecdf.last().unwrap().1, 1.0);
    }
}
