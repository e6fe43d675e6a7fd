//! Denoising quality metrics.
//!
//! For a polluted cloud `D₀ = D ∪ N` and a cleaned set `D₁`:
//!
//! - `TPR = |D₁ ∩ D| / |D|` — fraction of real points kept;
//! - `FPR = |D₁ ∩ N| / |N|` — fraction of noise retained (lower is better);
//! - `SNRG = (|D₁ ∩ D| / |D₁ ∩ N|) · (|N| / |D|) − 1` — relative growth of
//!   the signal-to-noise ratio, `+∞` when no noise survives.
//!
//! With these definitions `SNRG = TPR/FPR − 1` holds identically whenever
//! noise survives.

use serde::Serialize;

use super::BenchError;
use crate::cloud::PointLabel;

/// One metrics row: the three rates plus the raw counts they derive from.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricsRow {
    pub tpr: f64,
    pub fpr: f64,
    /// `+∞` (serialized as null in JSON) when `noise_kept = 0`; recompute
    /// from the counts when exactness matters.
    pub snrg: f64,
    pub real_total: usize,
    pub noise_total: usize,
    pub real_kept: usize,
    pub noise_kept: usize,
}

impl MetricsRow {
    /// Recomputes the rates from the stored raw counts.
    pub fn recompute(&self) -> (f64, f64, f64) {
        let tpr = self.real_kept as f64 / self.real_total as f64;
        let fpr = self.noise_kept as f64 / self.noise_total as f64;
        let snrg = if self.noise_kept == 0 {
            f64::INFINITY
        } else {
            (self.real_kept as f64 / self.noise_kept as f64)
                * (self.noise_total as f64 / self.real_total as f64)
                - 1.0
        };
        (tpr, fpr, snrg)
    }
}

/// Computes TPR/FPR/SNRG for a kept index set against ground-truth labels.
///
/// `kept` must be a subset of the cloud's indices (duplicates are
/// tolerated and counted once). Errors when either class is empty — the
/// ratios are undefined then.
pub fn compute_metrics(labels: &[PointLabel], kept: &[usize]) -> Result<MetricsRow, BenchError> {
    let real_total = labels.iter().filter(|l| **l == PointLabel::Real).count();
    let noise_total = labels.len() - real_total;
    if real_total == 0 {
        return Err(BenchError::UndefinedMetric("no real points (|D| = 0)".into()));
    }
    if noise_total == 0 {
        return Err(BenchError::UndefinedMetric("no noise points (|N| = 0)".into()));
    }
    let mut seen = vec![false; labels.len()];
    for &i in kept {
        if i >= labels.len() {
            return Err(BenchError::Parameter(format!(
                "kept index {i} out of bounds for {} labels",
                labels.len()
            )));
        }
        seen[i] = true;
    }
    let mut real_kept = 0;
    let mut noise_kept = 0;
    for (i, label) in labels.iter().enumerate() {
        if seen[i] {
            match label {
                PointLabel::Real => real_kept += 1,
                PointLabel::Noise => noise_kept += 1,
            }
        }
    }
    let mut row = MetricsRow {
        tpr: 0.0,
        fpr: 0.0,
        snrg: 0.0,
        real_total,
        noise_total,
        real_kept,
        noise_kept,
    };
    let (tpr, fpr, snrg) = row.recompute();
    row.tpr = tpr;
    row.fpr = fpr;
    row.snrg = snrg;
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use PointLabel::{Noise, Real};

    fn labels(real: usize, noise: usize) -> Vec<PointLabel> {
        let mut l = vec![Real; real];
        l.extend(vec![Noise; noise]);
        l
    }

    #[test]
    fn keeping_everything_changes_nothing() {
        let l = labels(40, 10);
        let kept: Vec<usize> = (0..50).collect();
        let row = compute_metrics(&l, &kept).unwrap();
        assert_eq!(row.tpr, 1.0);
        assert_eq!(row.fpr, 1.0);
        assert_eq!(row.snrg, 0.0);
    }

    #[test]
    fn published_rows_satisfy_the_identity() {
        // |D| = 10000, |N| = 1000; keep all real and 181 noise:
        // TPR 1.0000, FPR 0.1810, SNRG = 1/0.181 - 1 = 4.525 (452.5%).
        let l = labels(10_000, 1000);
        let mut kept: Vec<usize> = (0..10_000).collect();
        kept.extend(10_000..10_181);
        let row = compute_metrics(&l, &kept).unwrap();
        assert!((row.tpr - 1.0).abs() < 1e-12);
        assert!((row.fpr - 0.181).abs() < 1e-12);
        assert!((row.snrg - 4.525).abs() < 0.005 * 4.525);
        assert!((row.snrg - (row.tpr / row.fpr - 1.0)).abs() < 1e-12);

        // Keep 9928 real and 48 noise: TPR 0.9928, FPR 0.0480,
        // SNRG = 0.9928/0.048 - 1 = 19.683 (1968.3%).
        let mut kept: Vec<usize> = (0..9928).collect();
        kept.extend(10_000..10_048);
        let row = compute_metrics(&l, &kept).unwrap();
        assert!((row.tpr - 0.9928).abs() < 1e-12);
        assert!((row.fpr - 0.048).abs() < 1e-12);
        assert!((row.snrg - 19.683).abs() < 0.005 * 19.683);
        assert!((row.snrg - (row.tpr / row.fpr - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn all_noise_removed_is_infinite_growth() {
        let l = labels(10, 5);
        let kept: Vec<usize> = (0..10).collect();
        let row = compute_metrics(&l, &kept).unwrap();
        assert!(row.snrg.is_infinite());
        assert_eq!(row.fpr, 0.0);
    }

    #[test]
    fn empty_classes_are_undefined() {
        assert!(matches!(
            compute_metrics(&labels(5, 0), &[0]),
            Err(BenchError::UndefinedMetric(_))
        ));
        assert!(matches!(
            compute_metrics(&labels(0, 5), &[0]),
            Err(BenchError::UndefinedMetric(_))
        ));
    }

    #[test]
    fn counts_recompute_rates_exactly() {
        let l = labels(123, 77);
        let kept: Vec<usize> = (0..200).filter(|i| i % 3 == 0).collect();
        let row = compute_metrics(&l, &kept).unwrap();
        let (tpr, fpr, snrg) = row.recompute();
        assert_eq!(tpr, row.tpr);
        assert_eq!(fpr, row.fpr);
        assert_eq!(snrg, row.snrg);
    }

    #[test]
    fn out_of_bounds_kept_index_is_rejected() {
        assert!(matches!(
            compute_metrics(&labels(3, 3), &[7]),
            Err(BenchError::Parameter(_))
        ));
    }
}
