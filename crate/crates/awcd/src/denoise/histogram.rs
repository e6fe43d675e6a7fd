//! Equal-width histograms over curvature fields.

use super::{CurvatureField, DenoiseError};

/// Binned counts of per-point curvatures.
#[derive(Debug, Clone)]
pub struct CurvatureHistogram {
    /// `bins + 1` strictly increasing edges spanning `[min, max]`.
    edges: Vec<f64>,
    counts: Vec<u64>,
    total: u64,
}

impl CurvatureHistogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn bin_lo(&self, i: usize) -> f64 {
        self.edges[i]
    }

    pub fn bin_hi(&self, i: usize) -> f64 {
        self.edges[i + 1]
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.edges[i] + self.edges[i + 1])
    }

    /// CSV with a `bin_lo,bin_hi,count` header, one row per bin.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count\n");
        for i in 0..self.bins() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.bin_lo(i),
                self.bin_hi(i),
                self.counts[i]
            ));
        }
        out
    }
}

/// Number of bins by the Freedman–Diaconis rule, clamped to `[32, 256]`.
fn freedman_diaconis_bins(sorted: &[f64]) -> usize {
    let n = sorted.len();
    let range = sorted[n - 1] - sorted[0];
    let q1 = quantile(sorted, 0.25);
    let q3 = quantile(sorted, 0.75);
    let width = 2.0 * (q3 - q1) / (n as f64).cbrt();
    let raw = if width > 0.0 && range > 0.0 {
        (range / width).ceil() as usize
    } else {
        // Degenerate interquartile range: fall back to the finest allowed
        // resolution so concentrated-but-unequal fields still separate.
        256
    };
    raw.clamp(32, 256)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Builds an equal-width histogram over `[min, max]` of the field.
///
/// Bin count defaults to Freedman–Diaconis clamped to `[32, 256]`. The last
/// bin is closed on the right so the maximum lands inside. An all-equal
/// field has no histogram (and no trough); that is the degenerate error.
pub fn build_histogram(
    field: &CurvatureField,
    bins: Option<usize>,
) -> Result<CurvatureHistogram, DenoiseError> {
    if field.is_empty() {
        return Err(DenoiseError::Parameter("empty curvature field".into()));
    }
    if field.values.iter().any(|v| !v.is_finite()) {
        return Err(DenoiseError::Parameter(
            "curvature field contains non-finite values".into(),
        ));
    }
    let mut sorted = field.values.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    if min == max {
        return Err(DenoiseError::DegenerateHistogram(format!(
            "all {} curvatures equal {min}",
            sorted.len()
        )));
    }
    let bins = match bins {
        Some(0) => {
            return Err(DenoiseError::Parameter("bin count must be >= 1".into()));
        }
        Some(b) => b,
        None => freedman_diaconis_bins(&sorted),
    };

    let width = (max - min) / bins as f64;
    let mut edges = Vec::with_capacity(bins + 1);
    for i in 0..=bins {
        edges.push(min + width * i as f64);
    }
    edges[bins] = max; // exact upper edge regardless of rounding

    let mut counts = vec![0u64; bins];
    for &v in &field.values {
        let slot = (((v - min) / width) as usize).min(bins - 1);
        counts[slot] += 1;
    }
    Ok(CurvatureHistogram {
        edges,
        counts,
        total: field.values.len() as u64,
    })
}
