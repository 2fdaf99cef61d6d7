//! Command-line front end: `synth`, `extract`, `correlate`, `select`, and
//! `benchmark`, each reading a flat key=value config file with flag
//! overrides and echoing the fully resolved configuration into every
//! artifact it writes.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};

use crate::classifiers::ClassifierSpec;
use crate::dataset::{
    correlation_to_csv, generate_synthetic_users, pearson_correlation_matrix, FeatureMatrix,
};
use crate::eval::{run_benchmark, series_csv, Protocol};
use crate::features::extract_dataset;
use crate::ga::{run_ga, trace_to_csv, GaConfig};
use crate::ingest::{parse_raw_events, segment_strokes, write_raw_events};

/// Failure classes mapped to distinct exit codes: usage errors exit 2 (via
/// clap), input errors 3, runtime errors 4.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Runtime(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "touchbench",
    version,
    about = "Touch-stroke biometrics benchmarking toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic raw touch-event CSV.
    Synth(SynthArgs),
    /// Segment raw events into strokes and extract the feature matrix.
    Extract(ExtractArgs),
    /// Write the Pearson correlation matrix of a feature CSV.
    Correlate(CorrelateArgs),
    /// Run genetic-algorithm wrapper feature selection.
    Select(SelectArgs),
    /// Benchmark the classifier suite on a feature CSV.
    Benchmark(BenchmarkArgs),
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of synthetic users (>= 2).
    #[arg(long)]
    users: Option<usize>,
    /// Strokes generated per user.
    #[arg(long)]
    strokes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ExtractArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Raw touch-event CSV to read.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CorrelateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Feature CSV to read.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SelectArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Feature CSV to read.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Mask file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-generation trace CSV to write.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    tournament: Option<usize>,
    #[arg(long)]
    crossover_rate: Option<f64>,
    /// Per-bit mutation probability; defaults to 1/d.
    #[arg(long)]
    mutation_rate: Option<f64>,
    #[arg(long)]
    elitism: Option<usize>,
    /// Wrapper classifier short name (lr, lda, knn, cart, nb, svm, dnn).
    #[arg(long)]
    wrapper: Option<String>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    subset_penalty: Option<f64>,
}

#[derive(clap::Args)]
struct BenchmarkArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Feature CSV to read.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated classifier short names.
    #[arg(long)]
    classifiers: Option<String>,
    /// Mask file from `select`; restricts the feature columns.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Report JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Aligned text table path.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Grouped accuracy series CSV path.
    #[arg(long)]
    series: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    test_fraction: Option<f64>,
    #[arg(long)]
    standardize: Option<bool>,
    /// Hidden layer widths for the dnn entry, comma-separated.
    #[arg(long)]
    dnn_hidden: Option<String>,
    #[arg(long)]
    dnn_epochs: Option<usize>,
}

/// Key=value config plus the record of every resolved setting, echoed
/// into artifacts as `# cfg key=value` lines.
struct Resolver {
    file: BTreeMap<String, String>,
    resolved: Vec<(String, String)>,
}

impl Resolver {
    fn load(path: Option<&Path>) -> Result<Resolver, CliError> {
        let mut file = BTreeMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Input(format!("cannot read config {}: {e}", path.display()))
            })?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::Input(format!(
                        "config {} line {}: expected key=value",
                        path.display(),
                        i + 1
                    ))
                })?;
                file.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Resolver {
            file,
            resolved: Vec::new(),
        })
    }

    fn parse_value<T: FromStr>(&self, key: &str, raw: &str) -> Result<T, CliError> {
        raw.parse()
            .map_err(|_| CliError::Input(format!("config key {key}: bad value {raw:?}")))
    }

    /// Flag beats config file beats default.
    fn resolve<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError> {
        let value = match (flag, self.file.remove(key)) {
            (Some(v), _) => v,
            (None, Some(raw)) => self.parse_value(key, &raw)?,
            (None, None) => default,
        };
        self.resolved.push((key.to_string(), value.to_string()));
        Ok(value)
    }

    /// Like `resolve`, but without a default; absence stays absent.
    fn resolve_opt<T: FromStr + Display>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>, CliError> {
        let value = match (flag, self.file.remove(key)) {
            (Some(v), _) => Some(v),
            (None, Some(raw)) => Some(self.parse_value(key, &raw)?),
            (None, None) => None,
        };
        if let Some(v) = &value {
            self.resolved.push((key.to_string(), v.to_string()));
        }
        Ok(value)
    }

    fn resolve_path(
        &mut self,
        key: &str,
        flag: Option<PathBuf>,
        default: &str,
    ) -> Result<PathBuf, CliError> {
        let value = match (flag, self.file.remove(key)) {
            (Some(v), _) => v,
            (None, Some(raw)) => PathBuf::from(raw),
            (None, None) => PathBuf::from(default),
        };
        self.resolved
            .push((key.to_string(), value.display().to_string()));
        Ok(value)
    }

    fn resolve_path_opt(
        &mut self,
        key: &str,
        flag: Option<PathBuf>,
    ) -> Result<Option<PathBuf>, CliError> {
        let value = match (flag, self.file.remove(key)) {
            (Some(v), _) => Some(v),
            (None, Some(raw)) => Some(PathBuf::from(raw)),
            (None, None) => None,
        };
        if let Some(v) = &value {
            self.resolved
                .push((key.to_string(), v.display().to_string()));
        }
        Ok(value)
    }

    fn resolve_path_required(
        &mut self,
        key: &str,
        flag: Option<PathBuf>,
    ) -> Result<PathBuf, CliError> {
        self.resolve_path_opt(key, flag)?
            .ok_or_else(|| CliError::Input(format!("missing required setting: {key}")))
    }

    /// Every file key must have been consumed by now.
    fn finish(mut self) -> Result<Vec<(String, String)>, CliError> {
        if let Some(key) = self.file.keys().next() {
            return Err(CliError::Input(format!("unknown config key: {key}")));
        }
        self.resolved.sort();
        Ok(std::mem::take(&mut self.resolved))
    }
}

fn config_comments(resolved: &[(String, String)]) -> Vec<String> {
    resolved
        .iter()
        .map(|(k, v)| format!("cfg {k}={v}"))
        .collect()
}

/// Write via a temp file in the same directory plus rename, so readers
/// never observe a partial artifact.
fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let err = |e: std::io::Error| {
        CliError::Runtime(format!("cannot write {}: {e}", path.display()))
    };
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    fs::write(&tmp, content).map_err(err)?;
    fs::rename(&tmp, path).map_err(err)
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_features(path: &Path) -> Result<FeatureMatrix, CliError> {
    FeatureMatrix::from_csv(&read_input(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let mut r = Resolver::load(args.config.as_deref())?;
    let users = r.resolve("users", args.users, 5)?;
    let strokes = r.resolve("strokes", args.strokes, 50)?;
    let seed = r.resolve("seed", args.seed, 42)?;
    let out = r.resolve_path("out", args.out, "raw.csv")?;
    let resolved = r.finish()?;
    if users < 2 {
        return Err(CliError::Input(format!("users must be >= 2, got {users}")));
    }
    if strokes < 1 {
        return Err(CliError::Input("strokes must be >= 1".to_string()));
    }
    let events = generate_synthetic_users(users, strokes, seed);
    let mut csv = String::new();
    for c in config_comments(&resolved) {
        csv.push_str("# ");
        csv.push_str(&c);
        csv.push('\n');
    }
    write_raw_events(&events, &mut csv);
    write_atomic(&out, &csv)?;
    println!("wrote {} events for {users} users to {}", events.len(), out.display());
    Ok(())
}

fn cmd_extract(args: ExtractArgs) -> Result<(), CliError> {
    let mut r = Resolver::load(args.config.as_deref())?;
    let input = r.resolve_path_required("input", args.input)?;
    let out = r.resolve_path("out", args.out, "features.csv")?;
    r.resolved.push(("schema".to_string(), "stroke32".to_string()));
    let resolved = r.finish()?;

    let events = parse_raw_events(&read_input(&input)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
    let (strokes, report) = segment_strokes(&events);
    let (matrix, skipped) = extract_dataset(&strokes);
    print!("{report}");
    if !skipped.is_empty() {
        println!("skipped {} strokes during feature extraction:", skipped.len());
        for s in &skipped {
            println!("  stroke {}: {}", s.index, s.reason);
        }
    }
    write_atomic(&out, &matrix.to_csv(&config_comments(&resolved)))?;
    println!("wrote {} x {} feature matrix to {}", matrix.n(), matrix.d(), out.display());
    Ok(())
}

fn cmd_correlate(args: CorrelateArgs) -> Result<(), CliError> {
    let mut r = Resolver::load(args.config.as_deref())?;
    let input = r.resolve_path_required("input", args.input)?;
    let out = r.resolve_path("out", args.out, "correlation.csv")?;
    let resolved = r.finish()?;

    let matrix = load_features(&input)?;
    let corr = pearson_correlation_matrix(&matrix)
        .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
    write_atomic(
        &out,
        &correlation_to_csv(&matrix.schema, &corr, &config_comments(&resolved)),
    )?;
    println!("wrote {0} x {0} correlation matrix to {1}", matrix.d(), out.display());
    Ok(())
}

fn cmd_select(args: SelectArgs) -> Result<(), CliError> {
    let mut r = Resolver::load(args.config.as_deref())?;
    let input = r.resolve_path_required("input", args.input)?;
    let out = r.resolve_path("out", args.out, "mask.txt")?;
    let trace_path = r.resolve_path("trace", args.trace, "ga_trace.csv")?;
    let defaults = GaConfig::default();
    let config = GaConfig {
        population_size: r.resolve("population", args.population, defaults.population_size)?,
        generations: r.resolve("generations", args.generations, defaults.generations)?,
        tournament_size: r.resolve("tournament", args.tournament, defaults.tournament_size)?,
        crossover_rate: r.resolve("crossover_rate", args.crossover_rate, defaults.crossover_rate)?,
        mutation_rate: r.resolve_opt("mutation_rate", args.mutation_rate)?,
        elitism_count: r.resolve("elitism", args.elitism, defaults.elitism_count)?,
        wrapper: {
            let name = r.resolve("wrapper", args.wrapper, "cart".to_string())?;
            ClassifierSpec::from_short_name(&name)
                .ok_or_else(|| CliError::Input(format!("unknown wrapper classifier: {name}")))?
        },
        folds: r.resolve("folds", args.folds, defaults.folds)?,
        seed: r.resolve("seed", args.seed, defaults.seed)?,
        subset_penalty: r.resolve("subset_penalty", args.subset_penalty, defaults.subset_penalty)?,
    };
    let resolved = r.finish()?;

    let matrix = load_features(&input)?;
    let result = run_ga(&matrix, &config)
        .map_err(|e| CliError::Runtime(format!("feature selection failed: {e}")))?;

    let comments = config_comments(&resolved);
    let mut mask_file = String::new();
    for c in &comments {
        mask_file.push_str("# ");
        mask_file.push_str(c);
        mask_file.push('\n');
    }
    let bits: String = result
        .best
        .mask
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    mask_file.push_str(&format!("fitness {}\n", result.best.fitness.unwrap()));
    mask_file.push_str(&format!("mask_hex {}\n", result.best.mask_hex()));
    mask_file.push_str(&format!("mask_bits {bits}\n"));
    for name in result.best.selected_names(&matrix.schema) {
        mask_file.push_str(&name);
        mask_file.push('\n');
    }
    write_atomic(&out, &mask_file)?;
    write_atomic(&trace_path, &trace_to_csv(&result.trace, &comments))?;
    println!(
        "selected {} of {} features (fitness {:.4}); mask in {}, trace in {}",
        result.best.bits_set(),
        matrix.d(),
        result.best.fitness.unwrap(),
        out.display(),
        trace_path.display()
    );
    Ok(())
}

/// Reads the `mask_bits` line of a mask file written by `select`.
fn load_mask(path: &Path, expected_d: usize) -> Result<Vec<bool>, CliError> {
    let text = read_input(path)?;
    let bits = text
        .lines()
        .find_map(|l| l.strip_prefix("mask_bits "))
        .ok_or_else(|| {
            CliError::Input(format!("{}: no mask_bits line found", path.display()))
        })?;
    if bits.len() != expected_d {
        return Err(CliError::Input(format!(
            "{}: mask has {} bits but the feature matrix has {} columns",
            path.display(),
            bits.len(),
            expected_d
        )));
    }
    bits.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(CliError::Input(format!(
                "{}: bad mask bit {other:?}",
                path.display()
            ))),
        })
        .collect()
}

fn parse_classifier_list(
    list: &str,
    dnn_hidden: Option<&str>,
    dnn_epochs: Option<usize>,
) -> Result<Vec<ClassifierSpec>, CliError> {
    let mut specs = Vec::new();
    for name in list.split(',') {
        let name = name.trim();
        let mut spec = ClassifierSpec::from_short_name(name)
            .ok_or_else(|| CliError::Input(format!("unknown classifier: {name}")))?;
        if let ClassifierSpec::Dnn(p) = &mut spec {
            if let Some(widths) = dnn_hidden {
                p.hidden = widths
                    .split(',')
                    .map(|w| {
                        w.trim().parse().map_err(|_| {
                            CliError::Input(format!("bad dnn_hidden width: {w:?}"))
                        })
                    })
                    .collect::<Result<Vec<usize>, CliError>>()?;
            }
            if let Some(epochs) = dnn_epochs {
                p.epochs = epochs;
            }
        }
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(CliError::Input("classifier list is empty".to_string()));
    }
    Ok(specs)
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<(), CliError> {
    let mut r = Resolver::load(args.config.as_deref())?;
    let input = r.resolve_path_required("input", args.input)?;
    let classifiers = r.resolve(
        "classifiers",
        args.classifiers,
        "lr,lda,knn,cart,nb,svm,dnn".to_string(),
    )?;
    let mask_path = r.resolve_path_opt("mask", args.mask)?;
    let out = r.resolve_path("out", args.out, "report.json")?;
    let table_path = r.resolve_path("table", args.table, "report.txt")?;
    let series_path = r.resolve_path("series", args.series, "report_series.csv")?;
    let protocol = Protocol {
        test_fraction: r.resolve("test_fraction", args.test_fraction, 0.2)?,
        seed: r.resolve("seed", args.seed, 42)?,
        standardize: r.resolve("standardize", args.standardize, true)?,
    };
    let dnn_hidden = r.resolve_opt("dnn_hidden", args.dnn_hidden)?;
    let dnn_epochs = r.resolve_opt("dnn_epochs", args.dnn_epochs)?;
    let resolved = r.finish()?;

    if !(protocol.test_fraction > 0.0 && protocol.test_fraction < 1.0) {
        return Err(CliError::Input(format!(
            "test_fraction must be in (0, 1), got {}",
            protocol.test_fraction
        )));
    }
    let specs = parse_classifier_list(&classifiers, dnn_hidden.as_deref(), dnn_epochs)?;
    let matrix = load_features(&input)?;
    let mask = match &mask_path {
        Some(p) => Some(load_mask(p, matrix.d())?),
        None => None,
    };
    let report = run_benchmark(&matrix, &specs, &protocol, mask.as_deref())
        .map_err(|e| CliError::Runtime(format!("benchmark failed: {e}")))?;

    let comments = config_comments(&resolved);
    let json = serde_json::json!({
        "config": resolved
            .iter()
            .cloned()
            .collect::<BTreeMap<String, String>>(),
        "report": &report,
    });
    let mut json_text =
        serde_json::to_string_pretty(&json).expect("report serializes");
    json_text.push('\n');
    write_atomic(&out, &json_text)?;

    let mut table = String::new();
    for c in &comments {
        table.push_str("# ");
        table.push_str(c);
        table.push('\n');
    }
    table.push_str(&report.to_table());
    write_atomic(&table_path, &table)?;

    let label = if mask.is_some() { "masked" } else { "all_features" };
    write_atomic(&series_path, &series_csv(&[(label, &report)], &comments))?;

    print!("{}", report.to_table());
    println!(
        "wrote {}, {}, {}",
        out.display(),
        table_path.display(),
        series_path.display()
    );
    Ok(())
}

/// Parses argv and runs the selected command; returns the process exit
/// code (clap itself exits with 2 on usage errors).
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Extract(args) => cmd_extract(args),
        Command::Correlate(args) => cmd_correlate(args),
        Command::Select(args) => cmd_select(args),
        Command::Benchmark(args) => cmd_benchmark(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
