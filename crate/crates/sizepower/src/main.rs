//! Command-line entry point. Subcommands wrap the library one-to-one:
//! `bound-map`, `verify`, `simulate`, `estimate-tv`, `audit`.
//!
//! Exit codes: 0 success, 1 input or usage errors, 2 findings (theorem
//! violations for `verify`, any restricted stratum for `audit`).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sizepower::audit::{self, AuditRunConfig, GateDecision, RecordFormat};
use sizepower::bounds;
use sizepower::error::Error;
use sizepower::provenance::Provenance;
use sizepower::scenario::Scenario;
use sizepower::tvest;
use sizepower::verify;

/// Seed used when neither `--seed` nor `SIZEPOWER_SEED` is set.
const DEFAULT_SEED: u64 = 0;
const SEED_ENV: &str = "SIZEPOWER_SEED";

#[derive(Parser)]
#[command(
    name = "sizepower",
    version,
    about = "Size-power trade-off bounds, verification, and stratified FPR audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the average-case FPR bound over a (pi, delta) grid as CSV
    BoundMap(BoundMapArgs),
    /// Check every trade-off inequality against a scenario file
    Verify(VerifyArgs),
    /// Monte Carlo an institution's worth of submissions against a scenario
    Simulate(SimulateArgs),
    /// Lower-bound TV distance from two outcome sample files
    EstimateTv(EstimateTvArgs),
    /// Run the stratified FPR audit over labeled detector scores
    Audit(AuditArgs),
}

#[derive(Args)]
struct BoundMapArgs {
    /// Detector power the grid is evaluated at
    #[arg(long, default_value_t = 0.80)]
    beta0: f64,
    /// Smallest overlap fraction on the pi axis
    #[arg(long, default_value_t = 0.0)]
    pi_min: f64,
    /// Largest overlap fraction on the pi axis
    #[arg(long, default_value_t = 0.5)]
    pi_max: f64,
    /// Step between pi-axis values
    #[arg(long, default_value_t = 0.005)]
    pi_step: f64,
    /// Smallest TV radius on the delta axis
    #[arg(long, default_value_t = 0.0)]
    delta_min: f64,
    /// Largest TV radius on the delta axis
    #[arg(long, default_value_t = 0.4)]
    delta_max: f64,
    /// Step between delta-axis values
    #[arg(long, default_value_t = 0.005)]
    delta_step: f64,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Scenario JSON file
    #[arg(long)]
    scenario: PathBuf,
    /// Random detector trials per theorem
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Base seed; defaults to SIZEPOWER_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario JSON file
    #[arg(long)]
    scenario: PathBuf,
    /// Named detector from the scenario; defaults to the first one
    #[arg(long)]
    detector: Option<String>,
    /// Students sampled from the population
    #[arg(long, default_value_t = 10_000)]
    n_students: u64,
    /// Documents drawn per sampled student
    #[arg(long, default_value_t = 1)]
    n_docs: u64,
    /// TV radius the average-case floor is computed at
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Base seed; defaults to SIZEPOWER_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON summary here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateTvArgs {
    /// Sample file for the writer class: one outcome per line, or a JSON array
    #[arg(long)]
    samples_p: PathBuf,
    /// Sample file for the AI class, same formats
    #[arg(long)]
    samples_q: PathBuf,
    /// Training fraction of each class
    #[arg(long, default_value_t = 0.5)]
    split: f64,
    /// Detector power the direction advisory is phrased against
    #[arg(long, default_value_t = 0.80)]
    beta: f64,
    /// Base seed; defaults to SIZEPOWER_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON estimate here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Records file: CSV with the documented header, or a JSON array
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the extension when omitted
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Scores at or above this value count as flagged
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Largest acceptable FPR upper confidence bound per stratum
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
    /// Confidence level for Wilson intervals
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,
    /// Strata with fewer human documents are insufficient data
    #[arg(long, default_value_t = 30)]
    min_stratum_size: u64,
    /// Optional JSON file of per-stratum TV values for bound cross-checks
    #[arg(long)]
    tv_values: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the text table here; printed to stdout when --out is set and
    /// this is not
    #[arg(long)]
    table: Option<PathBuf>,
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var(SEED_ENV)
            .ok()
            .and_then(|value| value.parse().ok())
    })
    .unwrap_or(DEFAULT_SEED)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            file.write_all(text.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{text}");
            std::io::stdout().flush()?;
            Ok(())
        }
    }
}

fn run_bound_map(args: &BoundMapArgs) -> Result<ExitCode, Error> {
    let pi_axis = bounds::axis(args.pi_min, args.pi_max, args.pi_step)?;
    let delta_axis = bounds::axis(args.delta_min, args.delta_max, args.delta_step)?;
    let grid = bounds::bound_map(args.beta0, &delta_axis, &pi_axis)?;
    let provenance = Provenance::new(None);
    let mut text = provenance.csv_comment_lines();
    text.push_str(&format!("# beta0={}\n", args.beta0));
    let mut body = Vec::new();
    grid.write_csv(&mut body)?;
    text.push_str(std::str::from_utf8(&body).expect("csv is utf-8"));
    write_output(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyOutput {
    provenance: Provenance,
    trials: u64,
    seed: u64,
    reports: Vec<verify::VerificationReport>,
    violations_total: u64,
    passed: bool,
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode, Error> {
    let seed = resolve_seed(args.seed);
    let scenario = Scenario::from_path(&args.scenario)?;
    let named: Vec<(String, sizepower::Detector)> = scenario
        .detectors
        .iter()
        .map(|d| (d.name.clone(), d.detector.clone()))
        .collect();
    let reports = verify::run_scenario_suite(
        &scenario.population,
        &scenario.ai_model,
        &named,
        args.trials,
        seed,
    )?;
    let violations_total = reports.iter().map(|r| r.violations).sum();
    let output = VerifyOutput {
        provenance: Provenance::new(Some(seed)).with_input(&args.scenario)?,
        trials: args.trials,
        seed,
        reports,
        violations_total,
        passed: violations_total == 0,
    };
    let mut text = serde_json::to_string_pretty(&output)?;
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    Ok(if violations_total == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

#[derive(Serialize)]
struct SimulateOutput {
    provenance: Provenance,
    detector: String,
    simulation: verify::SimulationOutcome,
    result1: bounds::ScenarioFloor,
    /// Floor scaled to the simulated head count of documents.
    floor_expected_accusations: f64,
}

fn run_simulate(args: &SimulateArgs) -> Result<ExitCode, Error> {
    let seed = resolve_seed(args.seed);
    let scenario = Scenario::from_path(&args.scenario)?;
    let named = scenario.detector(args.detector.as_deref())?;
    let simulation = verify::simulate_institution(
        &scenario.population,
        &scenario.ai_model,
        &named.detector,
        args.n_students,
        args.n_docs,
        seed,
    )?;
    let result1 = bounds::scenario_floor(
        &scenario.population,
        &scenario.ai_model,
        &named.detector,
        args.delta,
    )?;
    let floor_expected_accusations =
        bounds::expected_false_accusations(result1.floor, args.n_students * args.n_docs)?;
    let output = SimulateOutput {
        provenance: Provenance::new(Some(seed)).with_input(&args.scenario)?,
        detector: named.name.clone(),
        simulation,
        result1,
        floor_expected_accusations,
    };
    let mut text = serde_json::to_string_pretty(&output)?;
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

/// Reads one outcome token per line, or a JSON array of tokens/integers.
fn read_samples(path: &Path) -> Result<Vec<String>, Error> {
    let text = std::fs::read_to_string(path)?;
    if text.trim().is_empty() {
        return Err(Error::EmptyInput(path.display().to_string()));
    }
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        let values: Vec<serde_json::Value> = serde_json::from_str(&text)?;
        return values
            .into_iter()
            .map(|value| match value {
                serde_json::Value::String(token) => Ok(token),
                other => Ok(other.to_string()),
            })
            .collect();
    }
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty())
        .map(String::from)
        .collect())
}

/// Maps tokens from both files onto indices of one shared outcome set,
/// sorted for determinism.
fn index_samples(a: &[String], b: &[String]) -> (Vec<usize>, Vec<usize>) {
    let mut tokens: Vec<&str> = a.iter().chain(b.iter()).map(String::as_str).collect();
    tokens.sort_unstable();
    tokens.dedup();
    let index: BTreeMap<&str, usize> = tokens
        .iter()
        .enumerate()
        .map(|(position, &token)| (token, position))
        .collect();
    let map = |samples: &[String]| samples.iter().map(|token| index[token.as_str()]).collect();
    (map(a), map(b))
}

#[derive(Serialize)]
struct EstimateTvOutput {
    provenance: Provenance,
    estimate: tvest::TvEstimate,
    advisory: tvest::DirectionAdvisory,
}

fn run_estimate_tv(args: &EstimateTvArgs) -> Result<ExitCode, Error> {
    let seed = resolve_seed(args.seed);
    let raw_p = read_samples(&args.samples_p)?;
    let raw_q = read_samples(&args.samples_q)?;
    let (samples_p, samples_q) = index_samples(&raw_p, &raw_q);
    let estimate = tvest::plugin_classifier_accuracy(&samples_p, &samples_q, args.split, seed)?;
    let advisory = tvest::direction_guard(&estimate, args.beta)?;
    let output = EstimateTvOutput {
        provenance: Provenance::new(Some(seed))
            .with_input(&args.samples_p)?
            .with_input(&args.samples_q)?,
        estimate,
        advisory,
    };
    let mut text = serde_json::to_string_pretty(&output)?;
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct IngestSummary {
    accepted: u64,
    rejected: u64,
    dirty: bool,
    issues: Vec<audit::RowIssue>,
}

#[derive(Serialize)]
struct AuditOutput {
    provenance: Provenance,
    ingest: IngestSummary,
    report: audit::AuditReport,
}

#[derive(serde::Deserialize)]
struct TvValueEntry {
    subgroup: String,
    task: String,
    tv: f64,
}

fn run_audit(args: &AuditArgs) -> Result<ExitCode, Error> {
    let format = match args.format.as_deref() {
        Some("csv") => RecordFormat::Csv,
        Some("json") => RecordFormat::Json,
        Some(other) => {
            return Err(Error::Scenario(format!(
                "unknown format {other:?}, expected csv or json"
            )))
        }
        None => RecordFormat::from_path(&args.input),
    };
    let outcome = audit::ingest(&args.input, format)?;
    let config = AuditRunConfig {
        threshold: args.threshold,
        fpr_tolerance: args.tolerance,
        min_stratum_size: args.min_stratum_size,
        confidence_level: args.confidence,
    };
    let tv_values = match &args.tv_values {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let entries: Vec<TvValueEntry> = serde_json::from_str(&text)?;
            let mut map = BTreeMap::new();
            for entry in entries {
                map.insert((entry.subgroup, entry.task), entry.tv);
            }
            Some(map)
        }
        None => None,
    };
    let report = audit::audit_report(&outcome.records, &config, tv_values.as_ref())?;

    let mut provenance = Provenance::new(None).with_input(&args.input)?;
    if let Some(path) = &args.tv_values {
        provenance = provenance.with_input(path)?;
    }
    let dirty = outcome.dirty();
    let restricted = report
        .strata
        .iter()
        .any(|stratum| stratum.gate == GateDecision::Restrict);

    let table = report.render_table();
    let output = AuditOutput {
        provenance,
        ingest: IngestSummary {
            accepted: outcome.records.len() as u64,
            rejected: outcome.issues.len() as u64,
            dirty,
            issues: outcome.issues,
        },
        report,
    };
    let mut text = serde_json::to_string_pretty(&output)?;
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    match (&args.table, &args.out) {
        (Some(path), _) => write_output(Some(path), &table)?,
        (None, Some(_)) => write_output(None, &table)?,
        (None, None) => {}
    }

    if dirty {
        for issue in &output.ingest.issues {
            eprintln!("row {}: {}", issue.row, issue.message);
        }
        eprintln!("input contained rejected rows; run marked dirty");
        return Ok(ExitCode::from(1));
    }
    Ok(if restricted {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            use clap::error::ErrorKind;
            let kind = error.kind();
            let _ = error.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let result = match &cli.command {
        Command::BoundMap(args) => run_bound_map(args),
        Command::Verify(args) => run_verify(args),
        Command::Simulate(args) => run_simulate(args),
        Command::EstimateTv(args) => run_estimate_tv(args),
        Command::Audit(args) => run_audit(args),
    };
    match result {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(1)
        }
    }
}
