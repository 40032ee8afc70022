//! Summaries of simulation records for one method.

use crate::error::{Result, SpedError};
use crate::sim::SimRecord;

fn ratios(records: &[SimRecord]) -> Result<Vec<f64>> {
    let first = records
        .first()
        .ok_or_else(|| SpedError::domain("no records to summarise"))?;
    if records.iter().any(|r| r.method != first.method) {
        return Err(SpedError::domain("records mix several methods"));
    }
    Ok(records.iter().map(|r| r.loss_ratio).collect())
}

/// Fraction of replicates whose loss ratio exceeds `threshold`.
pub fn metric_catastrophic(records: &[SimRecord], threshold: f64) -> Result<f64> {
    let r = ratios(records)?;
    Ok(r.iter().filter(|&&x| x > threshold).count() as f64 / r.len() as f64)
}

/// Type-7 quantile: linear interpolation between order statistics at
/// position `(N - 1) q`.
pub fn quantile_type7(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(SpedError::domain("quantile of an empty set"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(SpedError::domain(format!(
            "quantile level must lie in [0, 1], got {q}"
        )));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    Ok(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

/// Quantile of the loss ratios.
pub fn metric_quantile(records: &[SimRecord], q: f64) -> Result<f64> {
    quantile_type7(&ratios(records)?, q)
}

/// Mean loss ratio and its standard error `sd / sqrt(N)`.
pub fn metric_mean_ratio(records: &[SimRecord]) -> Result<(f64, f64)> {
    let r = ratios(records)?;
    let n = r.len() as f64;
    let mean = r.iter().sum::<f64>() / n;
    if r.len() < 2 {
        return Ok((mean, 0.0));
    }
    let var = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// `mean(ise of a) / mean(ise of b)` over the same replicates.
pub fn metric_mise_ratio(records_a: &[SimRecord], records_b: &[SimRecord]) -> Result<f64> {
    ratios(records_a)?;
    ratios(records_b)?;
    let mut ids_a: Vec<u64> = records_a.iter().map(|r| r.replicate).collect();
    let mut ids_b: Vec<u64> = records_b.iter().map(|r| r.replicate).collect();
    ids_a.sort_unstable();
    ids_b.sort_unstable();
    if ids_a != ids_b {
        return Err(SpedError::domain("records cover different replicate sets"));
    }
    let mean = |rs: &[SimRecord]| rs.iter().map(|r| r.ise).sum::<f64>() / rs.len() as f64;
    Ok(mean(records_a) / mean(records_b))
}
