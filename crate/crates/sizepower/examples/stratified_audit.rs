//! End-to-end stratified FPR audit over the shipped synthetic score file:
//! ingest, stratify by (subgroup, task), Wilson intervals, per-stratum
//! gates, and the printed report table.
//!
//! ```bash
//! cargo run -p sizepower --example stratified_audit
//! ```

use std::collections::BTreeMap;

use sizepower::audit::{audit_report, ingest_csv, AuditRunConfig};

fn main() -> sizepower::Result<()> {
    let outcome = ingest_csv(include_str!("data/audit_scores.csv"))?;
    println!(
        "ingested {} records, {} rejected rows (dirty: {})",
        outcome.records.len(),
        outcome.issues.len(),
        outcome.dirty()
    );

    let config = AuditRunConfig::default();
    let mut tv_values = BTreeMap::new();
    tv_values.insert(("l1".to_string(), "essay".to_string()), 0.85);
    tv_values.insert(("l2".to_string(), "essay".to_string()), 0.62);

    let report = audit_report(&outcome.records, &config, Some(&tv_values))?;
    print!("{}", report.render_table());

    for stratum in &report.strata {
        if let Some(check) = &stratum.bound_check {
            println!(
                "bound check ({}, {}): supplied tv {} -> floor {} [{}]",
                stratum.subgroup, stratum.task, check.tv, check.floor, check.note
            );
        }
    }
    Ok(())
}
