//! The `antclust` command line.
//!
//! Settings come from flags, then from an optional `--config` file of flat
//! `key = value` lines whose keys are the flag names, then from defaults.
//! Exit codes: 0 success, 1 usage or configuration error, 2 data or
//! validation error. Output files are written to a temporary file in the
//! target directory and renamed into place, so a failed command leaves no
//! partial output behind.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::engine::Engine;
use crate::evaluation::{
    adjusted_rand_index, benchmark_grid, dbscan_precomputed, generate_float_dataset, DistanceMatrix,
    GridSpec, TaskKind, DBSCAN_DEFAULT_EPS, DBSCAN_DEFAULT_MIN_SAMPLES, NOISE,
};
use crate::model::Parameters;
use crate::rules::RuleSet;
use crate::similarity::{
    load_descriptor_sets, load_descriptor_sets_hex, load_scalar_csv, load_similarity_matrix,
    FeatureColumn, FeatureSet, SimilarityMatrix,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }

    fn data(context: impl Display, err: impl Display) -> Self {
        CliError::Data(format!("{context}: {err}"))
    }
}

const CONFIG_KEYS: &[&str] = &[
    "seed",
    "out",
    "jobs",
    "alpha",
    "beta",
    "update-alpha",
    "shrink-threshold",
    "eps",
    "min-samples",
    "clusters",
    "tuples",
    "reps",
    "matrix",
    "csv",
    "descriptors",
    "descriptors-hex",
    "rules",
    "truth",
    "task",
    "descriptors-per-item",
    "summary",
];

#[derive(Debug, Parser)]
#[command(name = "antclust", version, about = "Ant colony recognition clustering toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster a dataset and write an `item,label` CSV.
    Cluster(ClusterArgs),
    /// Generate a synthetic float dataset and its ground truth.
    GenData(GenDataArgs),
    /// Adjusted Rand Index between two label CSVs.
    Ari(AriArgs),
    /// DBSCAN on `1 - similarity` of a matrix file.
    BaselineDbscan(DbscanArgs),
    /// Run the cluster-count × tuples-per-cluster benchmark grid.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat `key = value` config file; keys are flag names.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EngineArgs {
    /// Meeting-phase coefficient.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "update-alpha")]
    update_alpha: Option<f64>,
    #[arg(long = "shrink-threshold")]
    shrink_threshold: Option<f64>,
    /// Rule set name.
    #[arg(long)]
    rules: Option<String>,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    engine: EngineArgs,
    /// Precomputed similarity matrix (text).
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Scalar features, one row per item.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Binary descriptor container.
    #[arg(long)]
    descriptors: Option<PathBuf>,
    /// Hex text descriptor file.
    #[arg(long = "descriptors-hex")]
    descriptors_hex: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenDataArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    clusters: Option<String>,
    #[arg(long)]
    tuples: Option<String>,
    /// Ground-truth label CSV (default: `<out stem>_truth.csv`).
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AriArgs {
    truth: PathBuf,
    predicted: PathBuf,
}

#[derive(Debug, Args)]
struct DbscanArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long = "min-samples")]
    min_samples: Option<usize>,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    engine: EngineArgs,
    /// `float` or `descriptor`.
    #[arg(long)]
    task: Option<String>,
    /// Cluster counts as `A..B` or `A..B:STEP` (inclusive).
    #[arg(long)]
    clusters: Option<String>,
    /// Tuples per cluster as `A..B` or `A..B:STEP` (inclusive).
    #[arg(long)]
    tuples: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long = "descriptors-per-item")]
    descriptors_per_item: Option<usize>,
    /// JSON summary path (default: the CSV path with a `.json` extension).
    #[arg(long)]
    summary: Option<PathBuf>,
}

/// Parsed `key = value` config file.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", idx + 1))
            })?;
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", idx + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    /// Flag value if given, else the config value parsed as `T`.
    fn pick<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Config(format!("`{key}` = {v:?}: {e}")))
            })
            .transpose()
    }
}

/// Parses `A`, `A..B` or `A..B:STEP` into an inclusive list.
pub fn parse_count_range(text: &str) -> Result<Vec<usize>, String> {
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid count {s:?} in range {text:?}"))
    };
    let (span, step) = match text.split_once(':') {
        Some((span, step)) => (span, num(step)?),
        None => (text, 1),
    };
    let (lo, hi) = match span.split_once("..") {
        Some((lo, hi)) => (num(lo)?, num(hi.trim_start_matches('='))?),
        None => {
            let v = num(span)?;
            (v, v)
        }
    };
    if lo == 0 || hi < lo || step == 0 {
        return Err(format!("empty or invalid range {text:?}"));
    }
    Ok((lo..=hi).step_by(step).collect())
}

fn engine_params(cfg: &ConfigFile, args: &EngineArgs, seed: Option<u64>) -> Result<Parameters, CliError> {
    let d = Parameters::default();
    let params = Parameters {
        iter_alpha: cfg.pick("alpha", args.alpha)?.unwrap_or(d.iter_alpha),
        beta: cfg.pick("beta", args.beta)?.unwrap_or(d.beta),
        update_alpha: cfg.pick("update-alpha", args.update_alpha)?.unwrap_or(d.update_alpha),
        shrink_threshold: cfg
            .pick("shrink-threshold", args.shrink_threshold)?
            .unwrap_or(d.shrink_threshold),
        seed: cfg.pick("seed", seed)?.unwrap_or(d.seed),
    };
    params
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(params)
}

fn rule_set(cfg: &ConfigFile, args: &EngineArgs) -> Result<RuleSet, CliError> {
    let name = cfg
        .pick("rules", args.rules.clone())?
        .unwrap_or_else(|| "labroche".into());
    RuleSet::builtin(&name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown rule set `{name}` (available: {})",
            RuleSet::BUILTIN_NAMES.join(", ")
        ))
    })
}

fn required<T>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required --{key}")))
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let ctx = || path.display().to_string();
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::data(ctx(), e))?;
    tmp.write_all(bytes).map_err(|e| CliError::data(ctx(), e))?;
    tmp.persist(path).map_err(|e| CliError::data(ctx(), e.error))?;
    Ok(())
}

pub fn format_labels<L: Display>(labels: &[L]) -> String {
    let mut out = String::from("item,label\n");
    for (item, label) in labels.iter().enumerate() {
        out.push_str(&format!("{item},{label}\n"));
    }
    out
}

/// Reads an `item,label` CSV; items must be `0..n` in order.
pub fn read_labels(path: &Path) -> Result<Vec<i64>, CliError> {
    let ctx = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::data(&ctx, e))?;
    let headers = reader.headers().map_err(|e| CliError::data(&ctx, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["item", "label"] {
        return Err(CliError::data(&ctx, "expected header `item,label`"));
    }
    let mut labels = Vec::new();
    for (row, record) in reader.deserialize::<(usize, i64)>().enumerate() {
        let (item, label) = record.map_err(|e| CliError::data(&ctx, e))?;
        if item != row {
            return Err(CliError::data(
                &ctx,
                format!("row {} has item {item}, expected {row}", row + 2),
            ));
        }
        labels.push(label);
    }
    Ok(labels)
}

fn cluster(args: ClusterArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let params = engine_params(&cfg, &args.engine, args.common.seed)?;
    let rules = rule_set(&cfg, &args.engine)?;
    let out: PathBuf = required(cfg.pick("out", args.common.out)?, "out")?;

    let matrix: Option<PathBuf> = cfg.pick("matrix", args.matrix)?;
    let csv_path: Option<PathBuf> = cfg.pick("csv", args.csv)?;
    let descriptors: Option<PathBuf> = cfg.pick("descriptors", args.descriptors)?;
    let descriptors_hex: Option<PathBuf> = cfg.pick("descriptors-hex", args.descriptors_hex)?;

    let mut columns = Vec::new();
    if let Some(p) = &csv_path {
        let raw = load_scalar_csv(p).map_err(|e| CliError::data(p.display(), e))?;
        columns.extend(raw.iter().map(|c| FeatureColumn::scalar_normalized(c)));
    }
    let mut has_descriptors = false;
    for (path, hex) in [(&descriptors, false), (&descriptors_hex, true)] {
        if let Some(p) = path {
            let sets = if hex {
                load_descriptor_sets_hex(p)
            } else {
                load_descriptor_sets(p)
            }
            .map_err(|e| CliError::data(p.display(), e))?;
            columns.push(FeatureColumn::Descriptor(sets));
            has_descriptors = true;
        }
    }
    if let Some(p) = &matrix {
        let m = load_similarity_matrix(p).map_err(|e| CliError::data(p.display(), e))?;
        columns.push(FeatureColumn::Matrix(Arc::new(m)));
    }
    if columns.is_empty() {
        return Err(CliError::Usage(
            "no feature source: give --matrix, --csv, --descriptors or --descriptors-hex".into(),
        ));
    }
    let features = FeatureSet::new(columns).map_err(|e| CliError::data("features", e))?;

    let run = |source: &dyn crate::similarity::SimilaritySource| {
        Engine::new(source, params, &rules)
            .and_then(Engine::run)
            .map_err(|e| CliError::data("clustering", e))
    };
    let (result, _) = if has_descriptors {
        run(&SimilarityMatrix::from_source(&features))?
    } else {
        run(&features)?
    };

    write_atomic(&out, format_labels(&result.labels).as_bytes())?;
    println!("{}", result.colony_count);
    Ok(())
}

fn gen_data(args: GenDataArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let seed = cfg.pick("seed", args.common.seed)?.unwrap_or(0);
    let single = |key: &str, flag: Option<String>| -> Result<usize, CliError> {
        let text: String = required(cfg.pick(key, flag)?, key)?;
        match parse_count_range(&text).map_err(CliError::Usage)?.as_slice() {
            [v] => Ok(*v),
            _ => Err(CliError::Usage(format!("--{key} takes a single count"))),
        }
    };
    let clusters = single("clusters", args.clusters)?;
    let tuples = single("tuples", args.tuples)?;
    let out: PathBuf = required(cfg.pick("out", args.common.out)?, "out")?;
    let truth_path = match cfg.pick("truth", args.truth)? {
        Some(p) => p,
        None => {
            let stem = out.file_stem().unwrap_or_default().to_string_lossy();
            out.with_file_name(format!("{stem}_truth.csv"))
        }
    };

    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let data = generate_float_dataset(clusters, tuples, &mut rng)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut csv = String::from("value\n");
    for v in &data.values {
        csv.push_str(&format!("{v}\n"));
    }
    write_atomic(&out, csv.as_bytes())?;
    write_atomic(&truth_path, format_labels(&data.truth).as_bytes())?;
    println!("{}", data.values.len());
    Ok(())
}

fn ari(args: AriArgs) -> Result<(), CliError> {
    let truth = read_labels(&args.truth)?;
    let predicted = read_labels(&args.predicted)?;
    let score = adjusted_rand_index(&truth, &predicted).map_err(|e| CliError::data("ari", e))?;
    println!("{score}");
    Ok(())
}

fn baseline_dbscan(args: DbscanArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let matrix: PathBuf = required(cfg.pick("matrix", args.matrix)?, "matrix")?;
    let eps = cfg.pick("eps", args.eps)?.unwrap_or(DBSCAN_DEFAULT_EPS);
    let min_samples = cfg
        .pick("min-samples", args.min_samples)?
        .unwrap_or(DBSCAN_DEFAULT_MIN_SAMPLES);
    let out: PathBuf = required(cfg.pick("out", args.common.out)?, "out")?;

    let sim = load_similarity_matrix(&matrix).map_err(|e| CliError::data(matrix.display(), e))?;
    let dist = DistanceMatrix::from_similarity(&sim);
    let labels = dbscan_precomputed(&dist, eps, min_samples).map_err(|e| CliError::Usage(e.to_string()))?;
    write_atomic(&out, format_labels(&labels).as_bytes())?;
    let clusters = labels.iter().filter(|&&l| l != NOISE).max().map_or(0, |&m| m + 1);
    let noise = labels.iter().filter(|&&l| l == NOISE).count();
    println!("{clusters} clusters, {noise} noise points");
    Ok(())
}

fn benchmark(args: BenchmarkArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.common.config.as_deref())?;
    let params = engine_params(&cfg, &args.engine, None)?;
    let rules = rule_set(&cfg, &args.engine)?;
    let base_seed = cfg.pick("seed", args.common.seed)?.unwrap_or(0);
    let per_item = cfg
        .pick("descriptors-per-item", args.descriptors_per_item)?
        .unwrap_or(20);
    let task = match cfg.pick("task", args.task)?.as_deref() {
        None | Some("float") => TaskKind::Float,
        Some("descriptor") => TaskKind::Descriptor {
            descriptors_per_item: per_item,
        },
        Some(other) => return Err(CliError::Usage(format!("unknown task `{other}`"))),
    };
    let range = |key: &str, flag: Option<String>, default: &str| -> Result<Vec<usize>, CliError> {
        let text = cfg.pick(key, flag)?.unwrap_or_else(|| default.to_string());
        parse_count_range(&text).map_err(CliError::Usage)
    };
    let mut spec = GridSpec::new(
        task,
        range("clusters", args.clusters, "2..30")?,
        range("tuples", args.tuples, "3..90")?,
    );
    spec.repetitions = cfg.pick("reps", args.reps)?.unwrap_or(1);
    spec.jobs = cfg.pick("jobs", args.jobs)?.unwrap_or(0);
    spec.base_seed = base_seed;
    spec.params = params;
    let out: PathBuf = required(cfg.pick("out", args.common.out)?, "out")?;
    let summary = cfg
        .pick("summary", args.summary)?
        .unwrap_or_else(|| out.with_extension("json"));

    let grid = benchmark_grid(&spec, &rules).map_err(|e| match e {
        crate::evaluation::EvaluationError::InvalidArgument(m) => CliError::Usage(m),
        e => CliError::data("benchmark", e),
    })?;
    let mut csv = Vec::new();
    grid.write_csv(&mut csv).map_err(|e| CliError::data("benchmark csv", e))?;
    write_atomic(&out, &csv)?;
    write_atomic(&summary, grid.summary_json().as_bytes())?;
    println!("{} runs written to {}", grid.runs.len(), out.display());
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Cluster(a) => cluster(a),
        Command::GenData(a) => gen_data(a),
        Command::Ari(a) => ari(a),
        Command::BaselineDbscan(a) => baseline_dbscan(a),
        Command::Benchmark(a) => benchmark(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("antclust: {e}");
            e.exit_code()
        }
    }
}
