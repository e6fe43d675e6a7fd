//! Adaptive mark-curvature selection.
//!
//! Curvatures of structure and noise gather around two hills of the
//! histogram; the trough between them separates the classes. Raw counts
//! wobble, so peaks and the trough are located on counts smoothed with a
//! centered 5-bin moving average. When no second hill exists the threshold
//! falls back to Otsu's between-class variance split over the same
//! histogram.

use serde::Serialize;

use super::{CurvatureHistogram, DenoiseError};

const SMOOTH_WINDOW: usize = 5;
const MIN_PEAK_SEPARATION: usize = 2;

/// How a mark curvature was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarkMethod {
    /// Trough between the two dominant histogram hills.
    Trough,
    /// Otsu between-class fallback when bimodality is absent.
    OtsuFallback,
    /// Caller-supplied override.
    Manual,
}

/// Bin bookkeeping behind a trough (or fallback) decision.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TroughDiagnostics {
    pub peak_bins: (usize, usize),
    pub trough_bin: usize,
}

/// The adaptive threshold ρ₀ with its provenance.
#[derive(Debug, Clone, Serialize)]
pub struct MarkCurvature {
    pub value: f64,
    pub method: MarkMethod,
    pub diagnostics: Option<TroughDiagnostics>,
}

impl MarkCurvature {
    pub fn manual(value: f64) -> Self {
        Self {
            value,
            method: MarkMethod::Manual,
            diagnostics: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mark curvature serializes")
    }
}

/// Centered moving average; the window truncates at the boundaries.
fn smooth(counts: &[u64]) -> Vec<f64> {
    let half = SMOOTH_WINDOW / 2;
    let n = counts.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let sum: u64 = counts[lo..hi].iter().sum();
            sum as f64 / (hi - lo) as f64
        })
        .collect()
}

/// Strict local maxima of the smoothed counts; a missing neighbor at the
/// boundary counts as minus infinity.
fn peaks(smoothed: &[f64]) -> Vec<usize> {
    let n = smoothed.len();
    (0..n)
        .filter(|&i| {
            let left_ok = i == 0 || smoothed[i] > smoothed[i - 1];
            let right_ok = i == n - 1 || smoothed[i] > smoothed[i + 1];
            left_ok && right_ok
        })
        .collect()
}

/// Picks the mark curvature ρ₀ from a histogram.
///
/// The two highest smoothed local maxima at least
/// [`MIN_PEAK_SEPARATION`] bins apart define the hills; ρ₀ is the center
/// of the lowest smoothed bin strictly between them, ties resolving to the
/// lower curvature. Without a second hill, Otsu's threshold over the
/// histogram is used and flagged as the fallback.
pub fn mark_curvature(hist: &CurvatureHistogram) -> Result<MarkCurvature, DenoiseError> {
    if hist.total() == 0 || hist.bins() < 3 {
        return Err(DenoiseError::DegenerateHistogram(format!(
            "{} bins / {} samples are not enough to locate a trough",
            hist.bins(),
            hist.total()
        )));
    }
    let smoothed = smooth(hist.counts());
    let mut peak_ids = peaks(&smoothed);
    // Highest smoothed count first; ties toward the lower bin.
    peak_ids.sort_by(|&a, &b| smoothed[b].total_cmp(&smoothed[a]).then(a.cmp(&b)));

    if let Some(&first) = peak_ids.first() {
        let second = peak_ids[1..]
            .iter()
            .copied()
            .find(|&p| p.abs_diff(first) >= MIN_PEAK_SEPARATION);
        if let Some(second) = second {
            let (lo, hi) = (first.min(second), first.max(second));
            if hi - lo >= 2 {
                let trough = (lo + 1..hi)
                    .min_by(|&a, &b| smoothed[a].total_cmp(&smoothed[b]).then(a.cmp(&b)))
                    .expect("non-empty interior");
                return Ok(MarkCurvature {
                    value: hist.bin_center(trough),
                    method: MarkMethod::Trough,
                    diagnostics: Some(TroughDiagnostics {
                        peak_bins: (lo, hi),
                        trough_bin: trough,
                    }),
                });
            }
        }
    }

    let split = otsu_split(hist).ok_or_else(|| {
        DenoiseError::DegenerateHistogram("no usable class split in histogram".into())
    })?;
    Ok(MarkCurvature {
        value: hist.bin_hi(split),
        method: MarkMethod::OtsuFallback,
        diagnostics: Some(TroughDiagnostics {
            peak_bins: (split, split),
            trough_bin: split,
        }),
    })
}

/// Otsu's method over the histogram: the split bin maximizing the
/// between-class variance of bin centers weighted by counts. Classes are
/// `bins[0..=t]` versus `bins[t+1..]`.
fn otsu_split(hist: &CurvatureHistogram) -> Option<usize> {
    let total = hist.total() as f64;
    let weighted_sum: f64 = (0..hist.bins())
        .map(|i| hist.bin_center(i) * hist.counts()[i] as f64)
        .sum();

    let mut w_background = 0.0;
    let mut sum_background = 0.0;
    let mut best: Option<(f64, usize)> = None;
    for t in 0..hist.bins() - 1 {
        w_background += hist.counts()[t] as f64;
        sum_background += hist.bin_center(t) * hist.counts()[t] as f64;
        let w_foreground = total - w_background;
        if w_background == 0.0 || w_foreground == 0.0 {
            continue;
        }
        let mean_b = sum_background / w_background;
        let mean_f = (weighted_sum - sum_background) / w_foreground;
        let variance = w_background * w_foreground * (mean_b - mean_f) * (mean_b - mean_f);
        let better = match best {
            None => true,
            Some((v, _)) => variance > v,
        };
        if better {
            best = Some((variance, t));
        }
    }
    best.map(|(_, t)| t)
}
