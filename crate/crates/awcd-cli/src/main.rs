//! `awcd` — point-cloud denoising from the command line.
//!
//! Subcommands: `denoise` (clean a cloud with awcd/ror/sor), `curvature`
//! (per-point curvature CSV), `hist` (curvature histogram CSV plus the
//! selected mark curvature as JSON), and `bench` (seeded comparison
//! tables).
//!
//! Exit codes: 0 success, 1 benchmark cells failed, 2 file IO/parse
//! errors, 3 invalid parameters, 4 degenerate histogram without an
//! explicit mark curvature.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use awcd::bench::{run_benchmark, BenchConfig, BenchError, MethodSpec};
use awcd::cloud::{
    load_cloud_auto, write_classified_ply, write_ply_ascii, write_xyz, CloudError, PointCloud,
    PointLabel, SpatialIndex,
};
use awcd::denoise::{
    awcd as awcd_filter, build_histogram, curvature_field, mark_curvature, ror, sor,
    DenoiseError, DenoiseResult, MethodSummary,
};

#[derive(Parser)]
#[command(name = "awcd", version, about = "Point-cloud denoising via Wasserstein curvature")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Remove outliers and write the cleaned cloud.
    Denoise(DenoiseArgs),
    /// Write per-point scalar curvature as CSV (index,rho,degenerate).
    Curvature(CurvatureArgs),
    /// Write the curvature histogram (CSV) and mark curvature (JSON).
    Hist(HistArgs),
    /// Run the seeded denoising benchmark and write the report.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Awcd,
    Ror,
    Sor,
}

#[derive(Args)]
struct DenoiseArgs {
    /// Input cloud (.xyz or .ply).
    #[arg(long)]
    input: PathBuf,
    /// Output cloud (.xyz or .ply).
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "awcd")]
    method: MethodArg,
    /// Neighborhood size for awcd/sor.
    #[arg(short, long, default_value_t = 30)]
    k: usize,
    /// Neighborhood radius d (ror).
    #[arg(long)]
    radius: Option<f64>,
    /// Minimum neighbor count alpha (ror).
    #[arg(long)]
    min_count: Option<usize>,
    /// Explicit mark curvature; skips the adaptive histogram step.
    #[arg(long)]
    rho0: Option<f64>,
    /// Require the confidence test in addition to the curvature rule.
    #[arg(long)]
    regular_term: bool,
    /// Ground-truth labels file ("real"/"noise" per line).
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Write a classification-colored PLY (requires --truth for colors).
    #[arg(long)]
    classified: Option<PathBuf>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    output: PathBuf,
    #[arg(short, long, default_value_t = 30)]
    k: usize,
}

#[derive(Args)]
struct HistArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(short, long, default_value_t = 30)]
    k: usize,
    /// Bin count; defaults to the Freedman-Diaconis rule clamped to 32..256.
    #[arg(long)]
    bins: Option<usize>,
    /// Histogram CSV path.
    #[arg(long)]
    hist_output: PathBuf,
    /// Mark-curvature JSON path.
    #[arg(long)]
    mark_output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct BenchArgs {
    /// Dataset files; each becomes one benchmark dataset.
    #[arg(long)]
    input: Vec<PathBuf>,
    /// Add a synthetic sphere-surface dataset with this many points.
    #[arg(long)]
    synthetic: Option<usize>,
    /// Seed for the synthetic dataset.
    #[arg(long, default_value_t = 42)]
    synthetic_seed: u64,
    /// Comma-separated methods to compare.
    #[arg(long, value_delimiter = ',', default_value = "awcd")]
    methods: Vec<MethodArg>,
    /// Comma-separated SNR values (|D|/|N| count ratios).
    #[arg(long, value_delimiter = ',', required = true)]
    snr: Vec<f64>,
    /// Comma-separated master seeds.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    #[arg(short, long, default_value_t = 30)]
    k: usize,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    min_count: Option<usize>,
    #[arg(long)]
    rho0: Option<f64>,
    #[arg(long)]
    regular_term: bool,
    /// Bounding-box expansion for noise injection.
    #[arg(long, default_value_t = 1.2)]
    expansion: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: ReportFormat,
    /// Report output path.
    #[arg(long)]
    output: PathBuf,
    /// Leave wall_ms at 0 so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// Run cells on a single thread.
    #[arg(long)]
    serial: bool,
}

/// CLI failure with its exit code.
enum Failure {
    /// File IO or parsing (exit 2).
    Data(String),
    /// Invalid parameters (exit 3).
    Parameter(String),
    /// Degenerate histogram without an override (exit 4).
    Histogram(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Data(_) => 2,
            Failure::Parameter(_) => 3,
            Failure::Histogram(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Data(m) | Failure::Parameter(m) | Failure::Histogram(m) => m,
        }
    }
}

impl From<CloudError> for Failure {
    fn from(e: CloudError) -> Self {
        match e {
            CloudError::Parameter(m) => Failure::Parameter(m),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<DenoiseError> for Failure {
    fn from(e: DenoiseError) -> Self {
        match e {
            DenoiseError::Parameter(m) => Failure::Parameter(m),
            DenoiseError::DegenerateHistogram(_) => Failure::Histogram(e.to_string()),
            DenoiseError::Cloud(c) => c.into(),
            DenoiseError::Geometry(g) => Failure::Data(g.to_string()),
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Parameter(m) | BenchError::UndefinedMetric(m) => Failure::Parameter(m),
            BenchError::Cloud(c) => c.into(),
            BenchError::Denoise(d) => d.into(),
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Denoise(args) => cmd_denoise(args),
        Command::Curvature(args) => cmd_curvature(args),
        Command::Hist(args) => cmd_hist(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

/// Thread count from AWCD_THREADS; the default pool otherwise.
fn configure_threads() {
    if let Ok(value) = std::env::var("AWCD_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

/// Neighborhoods smaller than dim+1 make every covariance rank-deficient.
fn warn_small_k(cloud: &PointCloud, method: MethodArg, k: usize) {
    if method != MethodArg::Ror && k < cloud.dim() + 1 {
        eprintln!(
            "warning: k = {k} is below dim+1 = {}; every local covariance will be rank-deficient",
            cloud.dim() + 1
        );
    }
}

fn load_input(path: &Path) -> Result<PointCloud, Failure> {
    load_cloud_auto(path)
        .map_err(|e| Failure::from(e))
        .map_err(|f| match f {
            Failure::Data(m) => Failure::Data(format!("{}: {m}", path.display())),
            Failure::Parameter(m) => Failure::Parameter(format!("{}: {m}", path.display())),
            other => other,
        })
}

/// Writes through a temp file in the target directory plus rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    tmp.write_all(bytes)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| Failure::Data(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

fn render_cloud(cloud: &PointCloud, path: &Path) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("xyz") => write_xyz(cloud, &mut buf).map_err(Failure::from)?,
        Some("ply") => write_ply_ascii(cloud, &mut buf).map_err(Failure::from)?,
        other => {
            return Err(Failure::Parameter(format!(
                "unsupported output extension {other:?} (expected .xyz or .ply)"
            )))
        }
    }
    Ok(buf)
}

fn load_truth(path: &Path, expected: usize) -> Result<Vec<PointLabel>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        let label = match token {
            "real" | "0" => PointLabel::Real,
            "noise" | "1" => PointLabel::Noise,
            other => {
                return Err(Failure::Data(format!(
                    "{}: line {}: unknown label {other:?}",
                    path.display(),
                    lineno + 1
                )))
            }
        };
        labels.push(label);
    }
    if labels.len() != expected {
        return Err(Failure::Parameter(format!(
            "{}: {} labels for a cloud of {} points",
            path.display(),
            labels.len(),
            expected
        )));
    }
    Ok(labels)
}

fn cmd_denoise(args: DenoiseArgs) -> Result<ExitCode, Failure> {
    let cloud = load_input(&args.input)?;
    let truth = match &args.truth {
        Some(path) => Some(load_truth(path, cloud.len())?),
        None => None,
    };
    warn_small_k(&cloud, args.method, args.k);
    let index = SpatialIndex::build(&cloud).map_err(Failure::from)?;
    let result: DenoiseResult = match args.method {
        MethodArg::Ror => {
            let radius = args
                .radius
                .ok_or_else(|| Failure::Parameter("ror requires --radius".into()))?;
            let min_count = args
                .min_count
                .ok_or_else(|| Failure::Parameter("ror requires --min-count".into()))?;
            ror(&cloud, &index, radius, min_count)?
        }
        MethodArg::Sor => sor(&cloud, &index, args.k)?,
        MethodArg::Awcd => awcd_filter(&cloud, &index, args.k, args.rho0, args.regular_term)?,
    };

    let cleaned = cloud.subset(&result.kept).map_err(Failure::from)?;
    write_atomic(&args.output, &render_cloud(&cleaned, &args.output)?)?;

    if let Some(classified) = &args.classified {
        let mut buf = Vec::new();
        write_classified_ply(&cloud, &result.kept, truth.as_deref(), &mut buf)
            .map_err(Failure::from)?;
        write_atomic(classified, &buf)?;
    }

    match &result.method {
        MethodSummary::Awcd { mark, .. } => {
            let method = match mark.method {
                awcd::denoise::MarkMethod::Trough => "trough",
                awcd::denoise::MarkMethod::OtsuFallback => "otsu-fallback",
                awcd::denoise::MarkMethod::Manual => "manual",
            };
            println!(
                "kept {} / removed {} points (rho0 = {}, {method})",
                result.kept.len(),
                result.removed(cloud.len()),
                mark.value
            );
        }
        _ => println!(
            "kept {} / removed {} points",
            result.kept.len(),
            result.removed(cloud.len())
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_curvature(args: CurvatureArgs) -> Result<ExitCode, Failure> {
    let cloud = load_input(&args.input)?;
    warn_small_k(&cloud, MethodArg::Awcd, args.k);
    let index = SpatialIndex::build(&cloud).map_err(Failure::from)?;
    let field = curvature_field(&cloud, &index, args.k)?;
    let mut csv = String::from("index,rho,degenerate\n");
    for i in 0..field.len() {
        csv.push_str(&format!(
            "{},{},{}\n",
            i,
            field.values[i],
            if field.degenerate[i] { 1 } else { 0 }
        ));
    }
    write_atomic(&args.output, csv.as_bytes())?;
    println!("wrote {} curvature rows", field.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_hist(args: HistArgs) -> Result<ExitCode, Failure> {
    let cloud = load_input(&args.input)?;
    warn_small_k(&cloud, MethodArg::Awcd, args.k);
    let index = SpatialIndex::build(&cloud).map_err(Failure::from)?;
    let field = curvature_field(&cloud, &index, args.k)?;
    let hist = build_histogram(&field, args.bins)?;
    let mark = mark_curvature(&hist)?;
    write_atomic(&args.hist_output, hist.to_csv().as_bytes())?;
    write_atomic(&args.mark_output, mark.to_json().as_bytes())?;
    println!(
        "histogram: {} bins over {} points; mark curvature {} ({:?})",
        hist.bins(),
        hist.total(),
        mark.value,
        mark.method
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, Failure> {
    let mut methods = Vec::new();
    for m in &args.methods {
        methods.push(match m {
            MethodArg::Ror => {
                let radius = args
                    .radius
                    .ok_or_else(|| Failure::Parameter("ror requires --radius".into()))?;
                let min_count = args
                    .min_count
                    .ok_or_else(|| Failure::Parameter("ror requires --min-count".into()))?;
                MethodSpec::Ror { radius, min_count }
            }
            MethodArg::Sor => MethodSpec::Sor { k: args.k },
            MethodArg::Awcd => MethodSpec::Awcd {
                k: args.k,
                rho0: args.rho0,
                regular_term: args.regular_term,
            },
        });
    }
    if methods.is_empty() {
        return Err(Failure::Parameter("no methods selected".into()));
    }
    if args.snr.iter().any(|s| !(*s > 0.0)) {
        return Err(Failure::Parameter("snr values must be positive".into()));
    }

    let mut datasets: Vec<(String, PointCloud)> = Vec::new();
    for path in &args.input {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("dataset")
            .to_string();
        datasets.push((name, load_input(path)?));
    }
    if let Some(count) = args.synthetic {
        if count == 0 {
            return Err(Failure::Parameter("synthetic size must be positive".into()));
        }
        datasets.push((
            format!("sphere{count}"),
            awcd::bench::synthetic::sphere_surface(count, args.synthetic_seed),
        ));
    }
    if datasets.is_empty() {
        return Err(Failure::Parameter(
            "no datasets: pass --input files and/or --synthetic N".into(),
        ));
    }

    let config = BenchConfig {
        methods,
        snrs: args.snr.clone(),
        seeds: args.seeds.clone(),
        expansion: args.expansion,
        parallel: !args.serial,
        measure_time: !args.no_timing,
    };
    let report = run_benchmark(&datasets, &config);
    let body = match args.format {
        ReportFormat::Csv => report.to_csv().into_bytes(),
        ReportFormat::Json => report.to_json().into_bytes(),
    };
    write_atomic(&args.output, &body)?;

    let failed = report.rows.iter().filter(|r| r.error.is_some()).count();
    println!(
        "benchmark: {} rows written to {} ({} failed)",
        report.rows.len(),
        args.output.display(),
        failed
    );
    if failed > 0 {
        for row in report.rows.iter().filter(|r| r.error.is_some()) {
            eprintln!(
                "failed cell: {} snr={} method={} seed={}: {}",
                row.dataset,
                row.snr,
                row.method,
                row.seed,
                row.error.as_deref().unwrap_or("unknown")
            );
        }
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}
