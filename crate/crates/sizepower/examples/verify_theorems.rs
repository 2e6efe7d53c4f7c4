//! Brute-force verification of every inequality on 1000 random instances:
//! random populations, AI models, detectors, radii, and ceilings. The
//! expected outcome is zero violations with slack statistics per theorem.
//!
//! ```bash
//! cargo run -p sizepower --example verify_theorems
//! ```

use sizepower::verify::{run_random_suite, SuiteConfig};

fn main() {
    let config = SuiteConfig {
        trials: 1000,
        seed: 42,
        ..SuiteConfig::default()
    };
    let reports = run_random_suite(&config);
    for report in &reports {
        println!(
            "{:<28} trials {:>5}  violations {:>2}  max slack {:.6}  max violation {:.3e}",
            report.theorem, report.trials, report.violations, report.max_slack,
            report.max_violation
        );
    }
    let clean = reports.iter().all(|report| report.passed());
    println!("all inequalities held: {clean}");
}
