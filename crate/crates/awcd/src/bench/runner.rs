//! The comparison-table runner.
//!
//! Every (dataset, SNR, seed) triple defines one polluted instance; every
//! method runs on that same instance so rows are comparable. Cells own RNG
//! streams derived from the seed and the cell key, so parallel and serial
//! runs emit identical reports.

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::metrics::{compute_metrics, MetricsRow};
use super::noise::{inject_noise, NoiseSpec};
use crate::cloud::{PointCloud, SpatialIndex};
use crate::denoise::{awcd, ror, sor};

/// A denoiser plus its parameters, as run by the harness.
#[derive(Debug, Clone)]
pub enum MethodSpec {
    Ror { radius: f64, min_count: usize },
    Sor { k: usize },
    Awcd { k: usize, rho0: Option<f64>, regular_term: bool },
}

impl MethodSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MethodSpec::Ror { .. } => "ror",
            MethodSpec::Sor { .. } => "sor",
            MethodSpec::Awcd { .. } => "awcd",
        }
    }

    /// Deterministic textual parameter summary for report rows.
    pub fn params_string(&self) -> String {
        match self {
            MethodSpec::Ror { radius, min_count } => {
                format!("d={radius};alpha={min_count}")
            }
            MethodSpec::Sor { k } => format!("k={k}"),
            MethodSpec::Awcd {
                k,
                rho0,
                regular_term,
            } => {
                let mut s = format!("k={k}");
                if let Some(r) = rho0 {
                    s.push_str(&format!(";rho0={r}"));
                }
                if *regular_term {
                    s.push_str(";regular");
                }
                s
            }
        }
    }
}

/// Run configuration: the benchmark cross product and execution knobs.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub methods: Vec<MethodSpec>,
    pub snrs: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Bounding-box expansion for noise injection.
    pub expansion: f64,
    /// Run cells on the rayon pool. Reports are identical either way.
    pub parallel: bool,
    /// Record wall-clock times. With this off, `wall_ms` is 0 and reports
    /// are byte-identical across runs.
    pub measure_time: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            methods: Vec::new(),
            snrs: Vec::new(),
            seeds: Vec::new(),
            expansion: 1.2,
            parallel: true,
            measure_time: true,
        }
    }
}

/// One report row; `metrics` is absent when the cell failed.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub dataset: String,
    /// Clean cloud size |D|.
    pub size: usize,
    pub snr: f64,
    pub method: String,
    pub params: String,
    #[serde(flatten)]
    pub metrics: Option<MetricsRow>,
    pub error: Option<String>,
    pub wall_ms: u64,
    pub seed: u64,
}

/// All rows of a benchmark run, in deterministic cross-product order.
#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }

    /// CSV with the fixed column set
    /// `dataset,size,snr,method,params,tpr,fpr,snrg,wall_ms,seed`.
    /// Failed cells leave the metric columns empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dataset,size,snr,method,params,tpr,fpr,snrg,wall_ms,seed\n");
        for r in &self.rows {
            let (tpr, fpr, snrg) = match &r.metrics {
                Some(m) => (
                    format!("{}", m.tpr),
                    format!("{}", m.fpr),
                    format!("{}", m.snrg),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.dataset, r.size, r.snr, r.method, r.params, tpr, fpr, snrg, r.wall_ms, r.seed
            ));
        }
        out
    }

    /// JSON mirror of the same rows (raw counts included, so failed or
    /// infinite-SNRG cells stay recomputable).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// ChaCha seed derived from the master seed and the cell key. Stable across
/// platforms and releases.
fn cell_seed(seed: u64, dataset: &str, snr: f64) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update([0u8]);
    hasher.update(dataset.as_bytes());
    hasher.update([0u8]);
    hasher.update(snr.to_bits().to_le_bytes());
    hasher.finalize().into()
}

/// Instance key: one polluted cloud shared by every method of the cell.
struct Instance {
    dataset: String,
    size: usize,
    snr: f64,
    seed: u64,
    polluted: Result<(PointCloud, SpatialIndex), String>,
}

fn build_instance(
    name: &str,
    cloud: &PointCloud,
    snr: f64,
    seed: u64,
    expansion: f64,
) -> Instance {
    let polluted = (|| {
        let spec = NoiseSpec {
            snr,
            expansion,
            seed: instance_seed(seed, name, snr),
        };
        let polluted = inject_noise(cloud, &spec).map_err(|e| e.to_string())?;
        let index = SpatialIndex::build(&polluted).map_err(|e| e.to_string())?;
        Ok((polluted, index))
    })();
    Instance {
        dataset: name.to_string(),
        size: cloud.len(),
        snr,
        seed,
        polluted,
    }
}

/// 64-bit instance seed folded out of the cell hash.
fn instance_seed(seed: u64, dataset: &str, snr: f64) -> u64 {
    let bytes = cell_seed(seed, dataset, snr);
    u64::from_le_bytes(bytes[..8].try_into().expect("hash is long enough"))
}

fn run_cell(instance: &Instance, method: &MethodSpec, measure_time: bool) -> BenchRow {
    let mut row = BenchRow {
        dataset: instance.dataset.clone(),
        size: instance.size,
        snr: instance.snr,
        method: method.name().to_string(),
        params: method.params_string(),
        metrics: None,
        error: None,
        wall_ms: 0,
        seed: instance.seed,
    };
    let (polluted, index) = match &instance.polluted {
        Ok(pair) => pair,
        Err(e) => {
            row.error = Some(e.clone());
            return row;
        }
    };
    let started = std::time::Instant::now();
    let outcome = match method {
        MethodSpec::Ror { radius, min_count } => {
            ror(polluted, index, *radius, *min_count).map(|r| r.kept)
        }
        MethodSpec::Sor { k } => sor(polluted, index, *k).map(|r| r.kept),
        MethodSpec::Awcd {
            k,
            rho0,
            regular_term,
        } => awcd(polluted, index, *k, *rho0, *regular_term).map(|r| r.kept),
    };
    if measure_time {
        row.wall_ms = started.elapsed().as_millis() as u64;
    }
    match outcome {
        Ok(kept) => {
            let labels = polluted.labels().expect("injected clouds are labelled");
            match compute_metrics(labels, &kept) {
                Ok(m) => row.metrics = Some(m),
                Err(e) => row.error = Some(e.to_string()),
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Runs the full (dataset × SNR × seed × method) cross product.
///
/// Per-cell failures are recorded in their rows; the run always completes.
/// Rows appear in deterministic nested order regardless of parallelism.
pub fn run_benchmark(datasets: &[(String, PointCloud)], config: &BenchConfig) -> BenchReport {
    let mut instances = Vec::new();
    for (name, cloud) in datasets {
        for &snr in &config.snrs {
            for &seed in &config.seeds {
                instances.push(build_instance(name, cloud, snr, seed, config.expansion));
            }
        }
    }

    let cells: Vec<(usize, &MethodSpec)> = instances
        .iter()
        .enumerate()
        .flat_map(|(i, _)| config.methods.iter().map(move |m| (i, m)))
        .collect();

    let rows: Vec<BenchRow> = if config.parallel {
        cells
            .par_iter()
            .map(|(i, m)| run_cell(&instances[*i], m, config.measure_time))
            .collect()
    } else {
        cells
            .iter()
            .map(|(i, m)| run_cell(&instances[*i], m, config.measure_time))
            .collect()
    };

    BenchReport { rows }
}
