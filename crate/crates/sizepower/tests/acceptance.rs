//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured numbers. Run with
//!
//! ```bash
//! cargo test -p sizepower --test acceptance -- --nocapture
//! ```

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sizepower::audit::{audit_report, AuditRecord, AuditRunConfig, GateDecision, GroundTruth};
use sizepower::bounds;
use sizepower::distributions::{tv_distance, Pmf, SampleSpace};
use sizepower::tvest::{bayes_accuracy, plugin_classifier_accuracy};
use sizepower::threshold_detector;
use sizepower::verify::{run_random_suite, tightness_search, tv_by_enumeration, SuiteConfig};

#[test]
fn acceptance_1_average_case_worked_example() {
    let started = Instant::now();
    let mut bound = 0.0;
    for _ in 0..1000 {
        bound = bounds::avg_case_fpr_lower_bound(0.10, 0.80, 0.05).unwrap();
    }
    let elapsed = started.elapsed();
    assert_eq!(bound, 0.075);
    let accusations = bounds::expected_false_accusations(bound, 10_000).unwrap();
    assert_eq!(accusations, 750.0);
    assert!(
        elapsed.as_millis() < 1000,
        "1000 evaluations took {elapsed:?}, so one is far above 1ms"
    );
    println!(
        "ACCEPTANCE 1 PASS - bound 0.075 exact, 750 accusations exact, {:?} per evaluation",
        elapsed / 1000
    );
}

#[test]
fn acceptance_2_worst_case_worked_example() {
    let cap = bounds::worst_case_power_cap(0.01, 0.05).unwrap();
    assert_eq!(cap, 0.06);
    println!("ACCEPTANCE 2 PASS - power cap 0.06 exact");
}

#[test]
fn acceptance_3_bound_map_reproduction() {
    let pi_axis = bounds::axis(0.0, 0.5, 0.005).unwrap();
    let delta_axis = bounds::axis(0.0, 0.4, 0.005).unwrap();
    assert!(pi_axis.len() >= 100 && delta_axis.len() >= 80);

    let started = Instant::now();
    let grid = bounds::bound_map(0.80, &delta_axis, &pi_axis).unwrap();
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "grid of {}x{} took {elapsed:?}",
        pi_axis.len(),
        delta_axis.len()
    );

    let mut csv = Vec::new();
    grid.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let marked: Vec<&str> = text
        .lines()
        .filter(|line| line.starts_with("0.1,0.05,"))
        .collect();
    assert_eq!(marked, ["0.1,0.05,0.075"]);

    for (j, &delta) in delta_axis.iter().enumerate() {
        if delta >= 0.80 {
            continue;
        }
        for i in 1..pi_axis.len() {
            assert!(grid.value(i, j) >= grid.value(i - 1, j));
        }
    }
    for i in 0..pi_axis.len() {
        for j in 1..delta_axis.len() {
            assert!(grid.value(i, j) <= grid.value(i, j - 1));
        }
    }
    println!(
        "ACCEPTANCE 3 PASS - cell (0.10, 0.05) = 0.075 in CSV, monotone grid, {}x{} in {:?}",
        pi_axis.len(),
        delta_axis.len(),
        elapsed
    );
}

#[test]
fn acceptance_4_theorem_suites() {
    let started = Instant::now();
    let config = SuiteConfig {
        trials: 1000,
        seed: 20_240_101,
        max_outcomes: 20,
        max_students: 10,
        max_subgroups: 4,
    };
    let reports = run_random_suite(&config);
    let elapsed = started.elapsed();
    assert_eq!(reports.len(), 4);
    for report in &reports {
        assert_eq!(report.trials, 1000, "{}", report.theorem);
        assert_eq!(
            report.violations, 0,
            "{} violated {} times",
            report.theorem, report.violations
        );
        assert!(
            report.max_violation <= 1e-12,
            "{} worst breach {}",
            report.theorem,
            report.max_violation
        );
    }
    assert!(elapsed.as_secs() < 30, "suite took {elapsed:?}");
    println!(
        "ACCEPTANCE 4 PASS - 4 theorem suites x 1000 instances, zero violations, {elapsed:?}"
    );
}

#[test]
fn acceptance_5_variational_tightness() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_gap_error = 0.0f64;
    for pair in 0..200 {
        let size = 2 + (pair % 11);
        let space = SampleSpace::new(size).unwrap();
        let p = Pmf::random(space.clone(), &mut rng);
        let q = Pmf::random(space, &mut rng);

        let outcome = tightness_search(&p, &q, 1000, 77 + pair as u64).unwrap();
        let gap_error = (outcome.max_gap - outcome.tv).abs();
        assert!(
            gap_error <= 1e-12,
            "pair {pair}: max gap {} vs tv {}",
            outcome.max_gap,
            outcome.tv
        );
        assert!(!outcome.random_exceeded_tv, "pair {pair}: a random detector beat TV");
        worst_gap_error = worst_gap_error.max(gap_error);

        let enumerated = tv_by_enumeration(&p, &q).unwrap();
        let half_l1 = tv_distance(&p, &q).unwrap();
        assert!(
            (enumerated - half_l1).abs() <= 1e-12,
            "pair {pair}: enumeration {} vs half-L1 {}",
            enumerated,
            half_l1
        );
    }
    println!(
        "ACCEPTANCE 5 PASS - 200 pairs x 1000 random detectors, optimal gap = TV (worst error {worst_gap_error:.3e}), enumeration agrees"
    );
}

#[test]
fn acceptance_6_classifier_accuracy_route() {
    // identity on random pairs
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for _ in 0..1000 {
        let size = 2 + (rng.next_u32() as usize % 14);
        let space = SampleSpace::new(size).unwrap();
        let p = Pmf::random(space.clone(), &mut rng);
        let q = Pmf::random(space, &mut rng);
        let accuracy = bayes_accuracy(&p, &q).unwrap();
        let identity = 0.5 * (1.0 + tv_distance(&p, &q).unwrap());
        assert!((accuracy - identity).abs() <= 1e-12);
    }

    // the empirical bound stays below true TV plus sampling noise
    let space = SampleSpace::new(2).unwrap();
    let p = Pmf::new(space.clone(), vec![0.5, 0.5]).unwrap();
    let q = Pmf::new(space, vec![0.9, 0.1]).unwrap();
    let true_tv = tv_distance(&p, &q).unwrap();
    let runs = 300;
    let mut within = 0;
    for seed in 0..runs {
        let mut draw_rng = ChaCha8Rng::seed_from_u64(40_000 + seed);
        let samples_p: Vec<usize> = (0..512).map(|_| p.sample(&mut draw_rng)).collect();
        let samples_q: Vec<usize> = (0..512).map(|_| q.sample(&mut draw_rng)).collect();
        let estimate = plugin_classifier_accuracy(&samples_p, &samples_q, 0.5, seed).unwrap();
        if estimate.tv_lower_bound <= true_tv + 4.0 / (estimate.n_test as f64).sqrt() {
            within += 1;
        }
    }
    let fraction = within as f64 / runs as f64;
    assert!(
        fraction >= 0.99,
        "bound exceeded TV + noise in {} of {} runs",
        runs - within,
        runs
    );

    // convergence: median absolute error does not rise when n doubles
    let median_error = |per_class: usize| {
        let mut errors: Vec<f64> = (0..120)
            .map(|replication| {
                let mut draw_rng = ChaCha8Rng::seed_from_u64(90_000 + replication);
                let samples_p: Vec<usize> =
                    (0..per_class).map(|_| p.sample(&mut draw_rng)).collect();
                let samples_q: Vec<usize> =
                    (0..per_class).map(|_| q.sample(&mut draw_rng)).collect();
                let estimate =
                    plugin_classifier_accuracy(&samples_p, &samples_q, 0.5, replication).unwrap();
                (estimate.tv_lower_bound - true_tv).abs()
            })
            .collect();
        errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
        errors[errors.len() / 2]
    };
    let errors = [median_error(128), median_error(256), median_error(512)];
    assert!(errors[1] <= errors[0], "median error rose: {errors:?}");
    assert!(errors[2] <= errors[1], "median error rose: {errors:?}");

    println!(
        "ACCEPTANCE 6 PASS - identity within 1e-12 on 1000 pairs, bound below TV + noise in {within}/{runs} runs, median errors {errors:?}"
    );
}

const SCORES: [f64; 10] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

struct SyntheticStratum {
    subgroup: &'static str,
    task: &'static str,
    pmf: Pmf,
    n_human: usize,
    n_ai: usize,
}

/// One synthetic audit run: human documents drawn from each stratum pmf,
/// AI documents from the ai model, scored by the outcome's score and
/// audited at threshold 0.5.
fn synthetic_audit(
    strata: &[SyntheticStratum],
    ai_model: &Pmf,
    config: &AuditRunConfig,
    seed: u64,
) -> sizepower::audit::AuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for stratum in strata {
        for index in 0..stratum.n_human {
            let outcome = stratum.pmf.sample(&mut rng);
            records.push(AuditRecord {
                doc_id: format!("{}-{}-h{index}", stratum.subgroup, stratum.task),
                subgroup: stratum.subgroup.to_string(),
                task: stratum.task.to_string(),
                ground_truth: GroundTruth::Human,
                score: SCORES[outcome],
            });
        }
        for index in 0..stratum.n_ai {
            let outcome = ai_model.sample(&mut rng);
            records.push(AuditRecord {
                doc_id: format!("{}-{}-a{index}", stratum.subgroup, stratum.task),
                subgroup: stratum.subgroup.to_string(),
                task: stratum.task.to_string(),
                ground_truth: GroundTruth::Ai,
                score: SCORES[outcome],
            });
        }
    }
    audit_report(&records, config, None).unwrap()
}

#[test]
fn acceptance_7_end_to_end_audit() {
    let started = Instant::now();
    let space = SampleSpace::new(10).unwrap();
    // near-AI cohort: 30% of its mass sits at flagged scores
    let l2_essay = Pmf::new(
        space.clone(),
        vec![0.35, 0.35, 0.0, 0.0, 0.0, 0.15, 0.15, 0.0, 0.0, 0.0],
    )
    .unwrap();
    // far cohort: no mass at or above the threshold
    let l1_essay = Pmf::new(
        space.clone(),
        vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    )
    .unwrap();
    let ai_model = Pmf::new(
        space.clone(),
        vec![0.10, 0.0, 0.10, 0.0, 0.0, 0.20, 0.0, 0.30, 0.30, 0.0],
    )
    .unwrap();
    let config = AuditRunConfig::default();

    // analytic rates through the same threshold detector the scores induce
    let phi = threshold_detector(space, &SCORES, config.threshold).unwrap();
    let analytic_fpr_l2 = phi.fpr(&l2_essay).unwrap();
    let analytic_fpr_l1 = phi.fpr(&l1_essay).unwrap();
    let analytic_power = phi.power(&ai_model).unwrap();
    assert!((analytic_fpr_l2 - 0.30).abs() < 1e-12);
    assert_eq!(analytic_fpr_l1, 0.0);
    assert!((analytic_power - 0.80).abs() < 1e-12);
    let mixture_tv = tv_distance(&l2_essay, &ai_model).unwrap();
    assert!((mixture_tv - 0.75).abs() < 1e-12);
    let floor = analytic_power - mixture_tv;

    let strata = [
        SyntheticStratum {
            subgroup: "l2",
            task: "essay",
            pmf: l2_essay.clone(),
            n_human: 150,
            n_ai: 110,
        },
        SyntheticStratum {
            subgroup: "l1",
            task: "essay",
            pmf: l1_essay.clone(),
            n_human: 200,
            n_ai: 110,
        },
        SyntheticStratum {
            subgroup: "l2",
            task: "report",
            pmf: l1_essay.clone(),
            n_human: 5,
            n_ai: 0,
        },
    ];

    let runs = 200u64;
    let mut covered_fpr_l2 = 0u64;
    let mut covered_power_l2 = 0u64;
    let mut covered_power_l1 = 0u64;
    for seed in 0..runs {
        let report = synthetic_audit(&strata, &ai_model, &config, 150_000 + seed);
        let by_key: BTreeMap<(String, String), &sizepower::audit::StratumReport> = report
            .strata
            .iter()
            .map(|s| ((s.subgroup.clone(), s.task.clone()), s))
            .collect();

        let l1 = by_key[&("l1".to_string(), "essay".to_string())];
        let l2 = by_key[&("l2".to_string(), "essay".to_string())];
        let small = by_key[&("l2".to_string(), "report".to_string())];

        // gate decisions are hand-computable for these margins
        assert_eq!(l1.gate, GateDecision::Deploy, "seed {seed}");
        assert_eq!(l2.gate, GateDecision::Restrict, "seed {seed}");
        assert_eq!(small.gate, GateDecision::InsufficientData, "seed {seed}");

        // the far cohort never crosses the threshold
        let l1_fpr = l1.fpr.as_ref().unwrap();
        assert_eq!(l1_fpr.hat, 0.0, "seed {seed}");
        assert!(l1_fpr.ci_low <= analytic_fpr_l1 && analytic_fpr_l1 <= l1_fpr.ci_high);

        // subgroup bound holds in every run with the analytic ingredients
        let l2_fpr = l2.fpr.as_ref().unwrap();
        assert!(
            l2_fpr.hat >= floor - 1e-12,
            "seed {seed}: observed fpr {} under floor {floor}",
            l2_fpr.hat
        );

        if l2_fpr.ci_low <= analytic_fpr_l2 && analytic_fpr_l2 <= l2_fpr.ci_high {
            covered_fpr_l2 += 1;
        }
        let l2_power = l2.power.as_ref().unwrap();
        if l2_power.ci_low <= analytic_power && analytic_power <= l2_power.ci_high {
            covered_power_l2 += 1;
        }
        let l1_power = l1.power.as_ref().unwrap();
        if l1_power.ci_low <= analytic_power && analytic_power <= l1_power.ci_high {
            covered_power_l1 += 1;
        }
    }
    let elapsed = started.elapsed();
    let threshold = (config.confidence_level * runs as f64).ceil() as u64;
    assert!(
        covered_fpr_l2 >= threshold,
        "fpr coverage {covered_fpr_l2}/{runs} below confidence"
    );
    assert!(
        covered_power_l2 >= threshold,
        "power coverage {covered_power_l2}/{runs} below confidence"
    );
    assert!(
        covered_power_l1 >= threshold,
        "power coverage {covered_power_l1}/{runs} below confidence"
    );
    assert!(elapsed.as_secs() < 10, "audit runs took {elapsed:?}");
    println!(
        "ACCEPTANCE 7 PASS - {runs} seeded audits: coverage {covered_fpr_l2}/{covered_power_l2}/{covered_power_l1} of {runs}, floor held every run, gates as expected, {elapsed:?}"
    );
}

// Criterion 8 (CLI determinism and golden files) lives in tests/cli.rs,
// which drives the built binary; this marker keeps the numbering visible
// in one place.
#[test]
fn acceptance_8_see_cli_suite() {
    println!("ACCEPTANCE 8 - exercised by tests/cli.rs (golden files, byte-identical reruns, exit codes)");
}

use rand::RngCore;
