//! Stratified false-positive-rate auditing of detector score data.
//!
//! The pipeline implements a pre-deployment audit: ingest labeled detector
//! scores, stratify by (subgroup, task), estimate FPR and power per stratum
//! with Wilson score intervals, gate each stratum against a configured FPR
//! tolerance, and emit a versioned report. Decisions are per-stratum; there
//! is deliberately no institution-wide gate, and nothing here adjudicates
//! individual documents.
//!
//! Input records carry scores and labels only. Real detectors enter as
//! black boxes through their scores; their internals never matter to the
//! audit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};

/// Report JSON schema version, bumped on breaking field changes.
pub const SCHEMA_VERSION: &str = "1";

/// Required CSV header, in order.
pub const CSV_HEADER: [&str; 5] = ["doc_id", "subgroup", "task", "ground_truth", "score"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundTruth {
    Human,
    Ai,
}

/// One scored document with its stratum keys and label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub doc_id: String,
    pub subgroup: String,
    pub task: String,
    pub ground_truth: GroundTruth,
    pub score: f64,
}

/// A rejected row with its location and reason. Row numbers count data
/// rows from 1 for CSV (the header is row 0) and array positions from 0
/// for JSON.
#[derive(Debug, Clone, Serialize)]
pub struct RowIssue {
    pub row: usize,
    pub message: String,
}

/// Ingest keeps every valid record and reports the rest; any rejected row
/// marks the run dirty.
#[derive(Debug, Clone, Serialize)]
pub struct IngestOutcome {
    pub records: Vec<AuditRecord>,
    pub issues: Vec<RowIssue>,
}

impl IngestOutcome {
    pub fn dirty(&self) -> bool {
        !self.issues.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    Json,
}

impl RecordFormat {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::Json,
            _ => Self::Csv,
        }
    }
}

fn validate_record(
    record: AuditRecord,
    row: usize,
    seen: &mut BTreeMap<String, usize>,
    records: &mut Vec<AuditRecord>,
    issues: &mut Vec<RowIssue>,
) {
    if !record.score.is_finite() || !(0.0..=1.0).contains(&record.score) {
        issues.push(RowIssue {
            row,
            message: format!(
                "score {} for doc {:?} is outside [0, 1]",
                record.score, record.doc_id
            ),
        });
        return;
    }
    if let Some(&first) = seen.get(&record.doc_id) {
        issues.push(RowIssue {
            row,
            message: format!(
                "doc_id {:?} duplicates row {}",
                record.doc_id, first
            ),
        });
        return;
    }
    seen.insert(record.doc_id.clone(), row);
    records.push(record);
}

/// Reads audit records from a file, applying row-level validation.
pub fn ingest(path: &Path, format: RecordFormat) -> Result<IngestOutcome> {
    let mut text = String::new();
    std::fs::File::open(path)?.read_to_string(&mut text)?;
    if text.trim().is_empty() {
        return Err(Error::EmptyInput(path.display().to_string()));
    }
    match format {
        RecordFormat::Csv => ingest_csv(&text),
        RecordFormat::Json => ingest_json(&text),
    }
}

/// Parses CSV audit records. The header row is required and must contain
/// the five schema columns; extra columns are rejected per row to keep the
/// format bit-exact.
pub fn ingest_csv(text: &str) -> Result<IngestOutcome> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let header_fields: Vec<&str> = headers.iter().collect();
    if header_fields != CSV_HEADER {
        for required in CSV_HEADER {
            if !header_fields.contains(&required) {
                return Err(Error::MissingColumn(required));
            }
        }
        return Err(Error::Scenario(format!(
            "csv header must be exactly {:?}, got {:?}",
            CSV_HEADER.join(","),
            header_fields.join(",")
        )));
    }

    let mut records = Vec::new();
    let mut issues = Vec::new();
    let mut seen = BTreeMap::new();
    for (index, row) in reader.records().enumerate() {
        let row_number = index + 1;
        let row = match row {
            Ok(row) => row,
            Err(error) => {
                issues.push(RowIssue {
                    row: row_number,
                    message: format!("unreadable row: {error}"),
                });
                continue;
            }
        };
        if row.len() != CSV_HEADER.len() {
            issues.push(RowIssue {
                row: row_number,
                message: format!("expected {} fields, got {}", CSV_HEADER.len(), row.len()),
            });
            continue;
        }
        let ground_truth = match &row[3] {
            "human" => GroundTruth::Human,
            "ai" => GroundTruth::Ai,
            other => {
                issues.push(RowIssue {
                    row: row_number,
                    message: format!(
                        "ground_truth must be \"human\" or \"ai\", got {other:?}"
                    ),
                });
                continue;
            }
        };
        let score = match row[4].parse::<f64>() {
            Ok(score) => score,
            Err(_) => {
                issues.push(RowIssue {
                    row: row_number,
                    message: format!("score {:?} is not a number", &row[4]),
                });
                continue;
            }
        };
        let record = AuditRecord {
            doc_id: row[0].to_string(),
            subgroup: row[1].to_string(),
            task: row[2].to_string(),
            ground_truth,
            score,
        };
        validate_record(record, row_number, &mut seen, &mut records, &mut issues);
    }
    Ok(IngestOutcome { records, issues })
}

/// Parses a JSON array of audit records, validating each element.
pub fn ingest_json(text: &str) -> Result<IngestOutcome> {
    let raw: Vec<serde_json::Value> = serde_json::from_str(text)?;
    let mut records = Vec::new();
    let mut issues = Vec::new();
    let mut seen = BTreeMap::new();
    for (index, value) in raw.into_iter().enumerate() {
        match serde_json::from_value::<AuditRecord>(value) {
            Ok(record) => {
                validate_record(record, index, &mut seen, &mut records, &mut issues)
            }
            Err(error) => issues.push(RowIssue {
                row: index,
                message: format!("invalid record: {error}"),
            }),
        }
    }
    Ok(IngestOutcome { records, issues })
}

/// Writes records in the exact CSV schema.
pub fn write_records_csv<W: Write>(records: &[AuditRecord], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for record in records {
        let ground_truth = match record.ground_truth {
            GroundTruth::Human => "human",
            GroundTruth::Ai => "ai",
        };
        writer.write_record([
            record.doc_id.as_str(),
            record.subgroup.as_str(),
            record.task.as_str(),
            ground_truth,
            &format!("{}", record.score),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_records_json<W: Write>(records: &[AuditRecord], mut out: W) -> Result<()> {
    let text = serde_json::to_string_pretty(records)?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Groups records by (subgroup, task). Every record lands in exactly one
/// stratum; strata absent from the data are absent from the map.
pub fn stratify(records: &[AuditRecord]) -> BTreeMap<(String, String), Vec<&AuditRecord>> {
    let mut strata: BTreeMap<(String, String), Vec<&AuditRecord>> = BTreeMap::new();
    for record in records {
        strata
            .entry((record.subgroup.clone(), record.task.clone()))
            .or_default()
            .push(record);
    }
    strata
}

/// Audit thresholds and reporting parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AuditRunConfig {
    /// Scores at or above this value count as flagged.
    pub threshold: f64,
    /// A stratum deploys only if its FPR upper confidence bound is at or
    /// below this.
    pub fpr_tolerance: f64,
    /// Below this many human documents a stratum is insufficient data.
    pub min_stratum_size: u64,
    pub confidence_level: f64,
}

impl Default for AuditRunConfig {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            fpr_tolerance: 0.05,
            min_stratum_size: 30,
            confidence_level: 0.95,
        }
    }
}

impl AuditRunConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.threshold.is_finite() || !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::OutOfRange {
                name: "threshold",
                value: self.threshold,
                low: 0.0,
                high: 1.0,
            });
        }
        if !self.fpr_tolerance.is_finite()
            || self.fpr_tolerance <= 0.0
            || self.fpr_tolerance >= 1.0
        {
            return Err(Error::OutOfRange {
                name: "fpr_tolerance",
                value: self.fpr_tolerance,
                low: 0.0,
                high: 1.0,
            });
        }
        if !self.confidence_level.is_finite()
            || self.confidence_level <= 0.0
            || self.confidence_level >= 1.0
        {
            return Err(Error::OutOfRange {
                name: "confidence_level",
                value: self.confidence_level,
                low: 0.0,
                high: 1.0,
            });
        }
        Ok(())
    }
}

/// Standard normal quantile, Acklam's rational approximation. Absolute
/// error below 1.2e-9 over (0, 1), ample for interval endpoints.
fn probit(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Wilson score interval for a binomial proportion. Chosen over Wald
/// because strata can be small and FPRs sit near zero, where Wald
/// collapses to a zero-width interval.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            low: 1.0,
            high: f64::INFINITY,
        });
    }
    if successes > trials {
        return Err(Error::OutOfRange {
            name: "successes",
            value: successes as f64,
            low: 0.0,
            high: trials as f64,
        });
    }
    if !confidence.is_finite() || confidence <= 0.0 || confidence >= 1.0 {
        return Err(Error::OutOfRange {
            name: "confidence",
            value: confidence,
            low: 0.0,
            high: 1.0,
        });
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = probit(1.0 - (1.0 - confidence) / 2.0);
    let z2 = z * z;
    let denominator = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let halfwidth = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = ((center - halfwidth) / denominator).max(0.0);
    let high = ((center + halfwidth) / denominator).min(1.0);
    Ok((low, high))
}

/// A point estimate with its confidence interval.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateDecision {
    Deploy,
    Restrict,
    InsufficientData,
}

/// Subgroup-bound cross-check attached to a stratum when a TV value for it
/// is supplied.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    /// Supplied TV distance between the stratum mixture and the AI model.
    pub tv: f64,
    /// Clipped floor `max(0, power_hat - tv)`.
    pub floor: f64,
    /// Signed value `power_hat - tv`.
    pub floor_literal: f64,
    /// Direction caveat inherited from the TV estimation route.
    pub note: String,
}

/// Per-stratum audit result.
#[derive(Debug, Clone, Serialize)]
pub struct StratumReport {
    pub subgroup: String,
    pub task: String,
    pub n_human: u64,
    pub n_ai: u64,
    pub fpr: Option<Estimate>,
    pub power: Option<Estimate>,
    pub threshold: f64,
    pub gate: GateDecision,
    pub bound_check: Option<BoundCheck>,
}

/// Pure gate rule: insufficient data below the minimum stratum size or
/// without an FPR estimate; deploy only when the FPR upper confidence
/// bound is within tolerance.
pub fn gate(report: &StratumReport, config: &AuditRunConfig) -> GateDecision {
    if report.n_human < config.min_stratum_size {
        return GateDecision::InsufficientData;
    }
    match &report.fpr {
        None => GateDecision::InsufficientData,
        Some(estimate) => {
            if estimate.ci_high <= config.fpr_tolerance {
                GateDecision::Deploy
            } else {
                GateDecision::Restrict
            }
        }
    }
}

/// Computes one stratum's metrics. A stratum missing one class still gets
/// a partial report carrying the computable metric.
pub fn stratum_metrics(
    subgroup: &str,
    task: &str,
    records: &[&AuditRecord],
    config: &AuditRunConfig,
) -> Result<StratumReport> {
    config.validate()?;
    if records.is_empty() {
        return Err(Error::EmptyStratum {
            subgroup: subgroup.to_string(),
            task: task.to_string(),
        });
    }
    let flagged = |record: &AuditRecord| record.score >= config.threshold;
    let mut n_human = 0u64;
    let mut n_ai = 0u64;
    let mut flagged_human = 0u64;
    let mut flagged_ai = 0u64;
    for record in records {
        match record.ground_truth {
            GroundTruth::Human => {
                n_human += 1;
                if flagged(record) {
                    flagged_human += 1;
                }
            }
            GroundTruth::Ai => {
                n_ai += 1;
                if flagged(record) {
                    flagged_ai += 1;
                }
            }
        }
    }
    let estimate = |count: u64, total: u64| -> Result<Option<Estimate>> {
        if total == 0 {
            return Ok(None);
        }
        let (ci_low, ci_high) = wilson_interval(count, total, config.confidence_level)?;
        Ok(Some(Estimate {
            hat: count as f64 / total as f64,
            ci_low,
            ci_high,
        }))
    };
    let mut report = StratumReport {
        subgroup: subgroup.to_string(),
        task: task.to_string(),
        n_human,
        n_ai,
        fpr: estimate(flagged_human, n_human)?,
        power: estimate(flagged_ai, n_ai)?,
        threshold: config.threshold,
        gate: GateDecision::InsufficientData,
        bound_check: None,
    };
    report.gate = gate(&report, config);
    Ok(report)
}

/// Record counts and gate tallies across the whole run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AuditTotals {
    pub n_records: u64,
    pub n_human: u64,
    pub n_ai: u64,
    pub n_strata: u64,
    pub deployed: u64,
    pub restricted: u64,
    pub insufficient: u64,
}

/// Institution-wide aggregation of per-stratum floors, weighted by each
/// stratum's share of human documents and using each stratum's own power
/// estimate. Only strata with both metrics and a supplied TV contribute.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InstitutionBoundSummary {
    pub literal: f64,
    pub clipped: f64,
    pub strata_counted: u64,
}

/// The full machine-readable audit report.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub schema_version: String,
    pub config: AuditRunConfig,
    pub strata: Vec<StratumReport>,
    pub totals: AuditTotals,
    pub institution_bound: Option<InstitutionBoundSummary>,
}

const DIRECTION_CAVEAT: &str = "floor computed from a TV lower bound is not a valid FPR \
                                guarantee; certifying a floor requires a TV upper bound";

/// Builds the report: stratify, per-stratum metrics and gates, optional
/// subgroup-bound cross-checks from supplied TV values keyed by
/// (subgroup, task).
pub fn audit_report(
    records: &[AuditRecord],
    config: &AuditRunConfig,
    tv_values: Option<&BTreeMap<(String, String), f64>>,
) -> Result<AuditReport> {
    config.validate()?;
    let strata = stratify(records);
    let mut reports = Vec::with_capacity(strata.len());
    let mut totals = AuditTotals {
        n_records: records.len() as u64,
        n_human: 0,
        n_ai: 0,
        n_strata: strata.len() as u64,
        deployed: 0,
        restricted: 0,
        insufficient: 0,
    };
    let mut counted = Vec::new();

    for ((subgroup, task), members) in &strata {
        let mut report = stratum_metrics(subgroup, task, members, config)?;
        totals.n_human += report.n_human;
        totals.n_ai += report.n_ai;
        match report.gate {
            GateDecision::Deploy => totals.deployed += 1,
            GateDecision::Restrict => totals.restricted += 1,
            GateDecision::InsufficientData => totals.insufficient += 1,
        }
        if let Some(tv_map) = tv_values {
            if let Some(&tv) = tv_map.get(&(subgroup.clone(), task.clone())) {
                if let Some(power) = &report.power {
                    let floor = bounds::subgroup_fpr_lower_bound(power.hat, tv)?;
                    report.bound_check = Some(BoundCheck {
                        tv,
                        floor,
                        floor_literal: power.hat - tv,
                        note: DIRECTION_CAVEAT.to_string(),
                    });
                    if report.n_human > 0 {
                        counted.push((report.n_human, power.hat, tv));
                    }
                }
            }
        }
        reports.push(report);
    }

    let institution_bound = if counted.is_empty() {
        None
    } else {
        let counted_humans: u64 = counted.iter().map(|(n, _, _)| n).sum();
        let mut literal_sum = 0.0;
        let mut clipped_sum = 0.0;
        for (n, power, tv) in &counted {
            let weight = *n as f64 / counted_humans as f64;
            literal_sum += weight * (power - tv);
            clipped_sum += weight * (power - tv).max(0.0);
        }
        Some(InstitutionBoundSummary {
            literal: literal_sum,
            clipped: clipped_sum,
            strata_counted: counted.len() as u64,
        })
    };

    Ok(AuditReport {
        schema_version: SCHEMA_VERSION.to_string(),
        config: *config,
        strata: reports,
        totals,
        institution_bound,
    })
}

impl AuditReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Fixed-width text table, one row per stratum.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(
            "subgroup       task         n_human   n_ai      fpr            \
             fpr_ci    power          power_ci  gate\n",
        );
        let fmt_estimate = |estimate: &Option<Estimate>| match estimate {
            Some(e) => (
                format!("{:.4}", e.hat),
                format!("[{:.4}, {:.4}]", e.ci_low, e.ci_high),
            ),
            None => ("-".to_string(), "-".to_string()),
        };
        for stratum in &self.strata {
            let (fpr, fpr_ci) = fmt_estimate(&stratum.fpr);
            let (power, power_ci) = fmt_estimate(&stratum.power);
            let gate = match stratum.gate {
                GateDecision::Deploy => "deploy",
                GateDecision::Restrict => "restrict",
                GateDecision::InsufficientData => "insufficient-data",
            };
            let _ = writeln!(
                out,
                "{:<14} {:<12} {:>7} {:>6} {:>8} {:>17} {:>8} {:>17}  {}",
                stratum.subgroup,
                stratum.task,
                stratum.n_human,
                stratum.n_ai,
                fpr,
                fpr_ci,
                power,
                power_ci,
                gate
            );
        }
        let _ = writeln!(
            out,
            "strata: {} (deploy {}, restrict {}, insufficient {}), records: {}",
            self.totals.n_strata,
            self.totals.deployed,
            self.totals.restricted,
            self.totals.insufficient,
            self.totals.n_records
        );
        if let Some(bound) = &self.institution_bound {
            let _ = writeln!(
                out,
                "institution floor over {} strata: literal {:.4}, clipped {:.4} ({})",
                bound.strata_counted, bound.literal, bound.clipped, DIRECTION_CAVEAT
            );
        }
        out
    }
}
