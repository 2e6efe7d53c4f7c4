//! Brute-force and Monte Carlo verification of the trade-off inequalities.
//!
//! The three bounds and the mixture-convexity remark are theorems, so on a
//! finite sample space every instance can be checked by exact summation.
//! This module evaluates both sides of each inequality on concrete
//! (population, AI model, detector) triples, on randomly generated
//! instances, and reports any violation beyond float tolerance. A correct
//! implementation produces zero violations; a corrupted one is caught
//! within a handful of random trials.
//!
//! Verification is numerical on finite instances only; nothing here is a
//! symbolic proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::detectors::{average_fpr, optimal_detector, subgroup_average_fpr, Detector};
use crate::distributions::{tv_distance, Pmf, PopulationModel, SampleSpace, StudentType};
use crate::error::{Error, Result};

/// Slack below which an inequality counts as violated. Double-precision
/// sums over at most a few dozen outcomes stay orders of magnitude inside
/// this.
pub const CHECK_TOLERANCE: f64 = 1e-12;

/// Outcome of checking one inequality instance. `slack` is the amount by
/// which the required side exceeded the other; negative slack beyond
/// [`CHECK_TOLERANCE`] is a violation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CheckOutcome {
    pub holds: bool,
    pub slack: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl CheckOutcome {
    fn from_sides(lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        Self {
            holds: slack >= -CHECK_TOLERANCE,
            slack,
            lhs,
            rhs,
        }
    }

    /// Margin of violation; zero when the inequality held.
    pub fn violation(&self) -> f64 {
        (-self.slack).max(0.0)
    }
}

/// Average-case trade-off: the population-averaged FPR is at least
/// `overlap_mass(delta) * (power - delta)`.
pub fn check_theorem1(
    population: &PopulationModel,
    ai_model: &Pmf,
    detector: &Detector,
    delta: f64,
) -> Result<CheckOutcome> {
    let lhs = average_fpr(population, detector)?;
    let overlap = population.overlap_mass(ai_model, delta)?;
    let power = detector.power(ai_model)?;
    let rhs = overlap * (power - delta);
    Ok(CheckOutcome::from_sides(lhs, rhs))
}

/// Worst-case check: either the detector fails the per-student FPR
/// hypothesis, or its power respects the cap.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum Theorem2Outcome {
    /// The detector's max per-student FPR exceeds the ceiling, so the
    /// theorem's hypothesis does not apply.
    NotApplicable { max_fpr: f64 },
    Checked(CheckOutcome),
}

impl Theorem2Outcome {
    pub fn holds(&self) -> bool {
        match self {
            Self::NotApplicable { .. } => true,
            Self::Checked(outcome) => outcome.holds,
        }
    }
}

/// Worst-case size-power cap: if every student's FPR is at most
/// `fpr_ceiling`, power is at most `fpr_ceiling + delta_star`.
pub fn check_theorem2(
    population: &PopulationModel,
    ai_model: &Pmf,
    detector: &Detector,
    fpr_ceiling: f64,
) -> Result<Theorem2Outcome> {
    let mut max_fpr = 0.0f64;
    for student in population.students() {
        max_fpr = max_fpr.max(detector.fpr(&student.pmf)?);
    }
    if max_fpr > fpr_ceiling + CHECK_TOLERANCE {
        return Ok(Theorem2Outcome::NotApplicable { max_fpr });
    }
    let nearest = crate::bounds::delta_star(population, ai_model)?;
    let power = detector.power(ai_model)?;
    // power <= ceiling + delta_star, stated as lhs >= rhs
    Ok(Theorem2Outcome::Checked(CheckOutcome::from_sides(
        fpr_ceiling + nearest,
        power,
    )))
}

/// Outcome of the subgroup mixture check: the FPR inequality plus the
/// identity that the mixture's expected detector response equals the
/// weighted per-student FPR average.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Theorem3Outcome {
    pub inequality: CheckOutcome,
    pub identity_gap: f64,
    pub identity_holds: bool,
}

impl Theorem3Outcome {
    pub fn holds(&self) -> bool {
        self.inequality.holds && self.identity_holds
    }
}

/// Subgroup mixture bound: the subgroup-averaged FPR is at least
/// `power - TV(subgroup mixture, ai model)`.
pub fn check_theorem3(
    population: &PopulationModel,
    ai_model: &Pmf,
    detector: &Detector,
    subgroup: &str,
) -> Result<Theorem3Outcome> {
    let avg = subgroup_average_fpr(population, detector, subgroup)?;
    let mix = population.subgroup_mixture(subgroup)?;
    let mixture_response = detector.fpr(&mix)?;
    let tv = tv_distance(&mix, ai_model)?;
    let power = detector.power(ai_model)?;
    let identity_gap = (mixture_response - avg).abs();
    Ok(Theorem3Outcome {
        inequality: CheckOutcome::from_sides(avg, power - tv),
        identity_gap,
        identity_holds: identity_gap <= CHECK_TOLERANCE,
    })
}

/// Convexity of TV under mixing: the subgroup mixture's TV to the AI model
/// never exceeds the weighted average of member TVs.
pub fn check_convexity(
    population: &PopulationModel,
    ai_model: &Pmf,
    subgroup: &str,
) -> Result<CheckOutcome> {
    let members = population.subgroup_members(subgroup)?;
    let total: f64 = members.iter().map(|&i| population.weights()[i]).sum();
    if total <= 0.0 {
        return Err(Error::ZeroSubgroupMass(subgroup.to_string()));
    }
    let mut averaged_tv = 0.0;
    for &index in members {
        let conditional = population.weights()[index] / total;
        averaged_tv += conditional * tv_distance(&population.students()[index].pmf, ai_model)?;
    }
    let mix = population.subgroup_mixture(subgroup)?;
    let mixture_tv = tv_distance(&mix, ai_model)?;
    // mixture_tv <= averaged_tv, stated as lhs >= rhs
    Ok(CheckOutcome::from_sides(averaged_tv, mixture_tv))
}

/// Scales a detector down so that its max per-student FPR is at most
/// `fpr_ceiling`. FPR is affine in the acceptance vector, so uniform
/// scaling lands exactly on the ceiling when scaling is needed.
pub fn cap_detector_fpr(
    detector: &Detector,
    population: &PopulationModel,
    fpr_ceiling: f64,
) -> Result<Detector> {
    if !(0.0..=1.0).contains(&fpr_ceiling) {
        return Err(Error::OutOfRange {
            name: "fpr_ceiling",
            value: fpr_ceiling,
            low: 0.0,
            high: 1.0,
        });
    }
    let mut max_fpr = 0.0f64;
    for student in population.students() {
        max_fpr = max_fpr.max(detector.fpr(&student.pmf)?);
    }
    if max_fpr <= fpr_ceiling {
        return Ok(detector.clone());
    }
    let scale = fpr_ceiling / max_fpr;
    let accept = detector.accept().iter().map(|a| a * scale).collect();
    Detector::new(detector.space().clone(), accept)
}

/// Result of searching detector space for the largest power-minus-FPR gap
/// on one pmf pair. The optimal detector is always included, so `max_gap`
/// equals the TV distance; random detectors probe that no test exceeds it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TightnessOutcome {
    pub tv: f64,
    pub max_gap: f64,
    pub optimal_gap: f64,
    pub n_random: usize,
    pub random_exceeded_tv: bool,
}

pub fn tightness_search(
    student: &Pmf,
    ai_model: &Pmf,
    n_random: usize,
    seed: u64,
) -> Result<TightnessOutcome> {
    let tv = tv_distance(student, ai_model)?;
    let optimal = optimal_detector(student, ai_model)?;
    let optimal_gap = optimal.power(ai_model)? - optimal.fpr(student)?;
    let mut max_gap = optimal_gap;
    let mut random_exceeded_tv = false;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_random {
        let phi = Detector::random(student.space().clone(), &mut rng);
        let gap = phi.power(ai_model)? - phi.fpr(student)?;
        if gap > tv + CHECK_TOLERANCE {
            random_exceeded_tv = true;
        }
        if gap > max_gap {
            max_gap = gap;
        }
    }
    Ok(TightnessOutcome {
        tv,
        max_gap,
        optimal_gap,
        n_random,
        random_exceeded_tv,
    })
}

/// TV distance by exhaustive maximization of `|p(A) - q(A)|` over all
/// subsets of the sample space. Exponential in the space size; capped so a
/// typo cannot lock the process. Serves as the independent second route to
/// the half-L1 computation.
pub fn tv_by_enumeration(p: &Pmf, q: &Pmf) -> Result<f64> {
    if p.space().as_ref() != q.space().as_ref() {
        return Err(Error::SpaceMismatch);
    }
    let n = p.len();
    if n > 20 {
        return Err(Error::EnumerationTooLarge { max: 20, got: n });
    }
    let mut best = 0.0f64;
    for mask in 0u32..(1u32 << n) {
        let mut diff = 0.0;
        for index in 0..n {
            if mask & (1 << index) != 0 {
                diff += p.mass()[index] - q.mass()[index];
            }
        }
        best = best.max(diff.abs());
    }
    Ok(best)
}

/// Aggregated outcome of one theorem's trials.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub trials: u64,
    pub violations: u64,
    /// Largest margin by which the inequality held.
    pub max_slack: f64,
    /// Worst observed breach; expected to stay at zero.
    pub max_violation: f64,
    pub seed: u64,
}

impl VerificationReport {
    fn new(theorem: &str, seed: u64) -> Self {
        Self {
            theorem: theorem.to_string(),
            trials: 0,
            violations: 0,
            max_slack: f64::NEG_INFINITY,
            max_violation: 0.0,
            seed,
        }
    }

    fn record(&mut self, holds: bool, slack: f64, violation: f64) {
        self.trials += 1;
        if !holds {
            self.violations += 1;
        }
        if slack > self.max_slack {
            self.max_slack = slack;
        }
        if violation > self.max_violation {
            self.max_violation = violation;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Parameters for the random-instance suites.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub trials: u64,
    pub seed: u64,
    pub max_outcomes: usize,
    pub max_students: usize,
    pub max_subgroups: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            max_outcomes: 20,
            max_students: 10,
            max_subgroups: 4,
        }
    }
}

/// Draws a random population: sizes uniform up to the configured maxima,
/// pmfs and weights uniform on their simplices, subgroup labels assigned
/// uniformly.
pub fn random_population<R: Rng + ?Sized>(
    rng: &mut R,
    max_outcomes: usize,
    max_students: usize,
    max_subgroups: usize,
) -> PopulationModel {
    let n_outcomes = rng.random_range(2..=max_outcomes.max(2));
    let n_students = rng.random_range(1..=max_students.max(1));
    let n_subgroups = rng.random_range(1..=max_subgroups.min(n_students).max(1));
    let space = SampleSpace::new(n_outcomes).expect("non-empty space");
    let mut students = Vec::with_capacity(n_students);
    for index in 0..n_students {
        let subgroup = rng.random_range(0..n_subgroups);
        students.push(StudentType::new(
            format!("s{index}"),
            format!("g{subgroup}"),
            "t0",
            Pmf::random(space.clone(), rng),
        ));
    }
    let raw: Vec<f64> = Pmf::random(SampleSpace::new(n_students).expect("non-empty"), rng)
        .mass()
        .to_vec();
    PopulationModel::new(students, raw).expect("randomly generated population is valid")
}

fn pick_subgroup<'a, R: Rng + ?Sized>(
    population: &'a PopulationModel,
    rng: &mut R,
) -> &'a str {
    let keys: Vec<&str> = population.subgroup_keys().collect();
    keys[rng.random_range(0..keys.len())]
}

/// Runs every theorem check against freshly generated random instances.
/// Trial `t` draws its randomness from stream `t` of the base seed, so
/// trials are independent and the whole suite is replayable from one seed.
pub fn run_random_suite(config: &SuiteConfig) -> Vec<VerificationReport> {
    let mut theorem1 = VerificationReport::new("theorem_1_average_case", config.seed);
    let mut theorem2 = VerificationReport::new("theorem_2_worst_case", config.seed);
    let mut theorem3 = VerificationReport::new("theorem_3_subgroup_mixture", config.seed);
    let mut convexity = VerificationReport::new("convexity_remark", config.seed);

    for trial in 0..config.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trial);
        let population = random_population(
            &mut rng,
            config.max_outcomes,
            config.max_students,
            config.max_subgroups,
        );
        let ai_model = Pmf::random(population.space().clone(), &mut rng);
        let detector = Detector::random(population.space().clone(), &mut rng);
        let delta = rng.random::<f64>();
        let ceiling = rng.random::<f64>();
        let subgroup = pick_subgroup(&population, &mut rng).to_string();

        let outcome = check_theorem1(&population, &ai_model, &detector, delta)
            .expect("generated instance is consistent");
        theorem1.record(outcome.holds, outcome.slack, outcome.violation());

        let capped = cap_detector_fpr(&detector, &population, ceiling)
            .expect("scaling keeps the detector valid");
        match check_theorem2(&population, &ai_model, &capped, ceiling)
            .expect("generated instance is consistent")
        {
            Theorem2Outcome::Checked(outcome) => {
                theorem2.record(outcome.holds, outcome.slack, outcome.violation());
            }
            Theorem2Outcome::NotApplicable { .. } => {
                // scaling enforces the hypothesis, so this cannot happen
                theorem2.record(false, f64::NEG_INFINITY, f64::INFINITY);
            }
        }

        let outcome = check_theorem3(&population, &ai_model, &detector, &subgroup)
            .expect("generated instance is consistent");
        theorem3.record(
            outcome.holds(),
            outcome.inequality.slack,
            outcome
                .inequality
                .violation()
                .max((outcome.identity_gap - CHECK_TOLERANCE).max(0.0)),
        );

        let outcome = check_convexity(&population, &ai_model, &subgroup)
            .expect("generated instance is consistent");
        convexity.record(outcome.holds, outcome.slack, outcome.violation());
    }

    vec![theorem1, theorem2, theorem3, convexity]
}

/// Runs the theorem suite against a fixed scenario: random detectors and
/// thresholds per trial, plus any named detectors supplied by the caller,
/// all evaluated against the scenario's population and AI model.
pub fn run_scenario_suite(
    population: &PopulationModel,
    ai_model: &Pmf,
    named_detectors: &[(String, Detector)],
    trials: u64,
    seed: u64,
) -> Result<Vec<VerificationReport>> {
    let mut theorem1 = VerificationReport::new("theorem_1_average_case", seed);
    let mut theorem2 = VerificationReport::new("theorem_2_worst_case", seed);
    let mut theorem3 = VerificationReport::new("theorem_3_subgroup_mixture", seed);
    let mut convexity = VerificationReport::new("convexity_remark", seed);
    let mut tightness = VerificationReport::new("variational_tightness", seed);

    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        let random_phi = Detector::random(population.space().clone(), &mut rng);
        let delta = rng.random::<f64>();
        let ceiling = rng.random::<f64>();
        let subgroup = pick_subgroup(population, &mut rng).to_string();

        let mut detectors: Vec<&Detector> = vec![&random_phi];
        let named: Vec<&Detector> = if trial == 0 {
            named_detectors.iter().map(|(_, d)| d).collect()
        } else {
            Vec::new()
        };
        detectors.extend(named);

        for phi in detectors {
            let outcome = check_theorem1(population, ai_model, phi, delta)?;
            theorem1.record(outcome.holds, outcome.slack, outcome.violation());

            let capped = cap_detector_fpr(phi, population, ceiling)?;
            if let Theorem2Outcome::Checked(outcome) =
                check_theorem2(population, ai_model, &capped, ceiling)?
            {
                theorem2.record(outcome.holds, outcome.slack, outcome.violation());
            }

            let outcome = check_theorem3(population, ai_model, phi, &subgroup)?;
            theorem3.record(
                outcome.holds(),
                outcome.inequality.slack,
                outcome
                    .inequality
                    .violation()
                    .max((outcome.identity_gap - CHECK_TOLERANCE).max(0.0)),
            );

            let outcome = check_convexity(population, ai_model, &subgroup)?;
            convexity.record(outcome.holds, outcome.slack, outcome.violation());
        }
    }

    for (index, student) in population.students().iter().enumerate() {
        let outcome = tightness_search(&student.pmf, ai_model, 200, seed ^ index as u64)?;
        let gap_error = (outcome.max_gap - outcome.tv).abs();
        let holds = gap_error <= CHECK_TOLERANCE && !outcome.random_exceeded_tv;
        tightness.record(holds, -gap_error, if holds { 0.0 } else { gap_error });
    }

    Ok(vec![theorem1, theorem2, theorem3, convexity, tightness])
}

/// Monte Carlo draw of an institution's worth of human-written documents.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationOutcome {
    pub n_students: u64,
    pub n_docs_per_student: u64,
    pub accusations: u64,
    pub observed_avg_fpr: f64,
    /// Exact population-averaged FPR the observation converges to.
    pub exact_avg_fpr: f64,
    /// Exact expected accusation count at this head count.
    pub expected_accusations: f64,
    pub power: f64,
    pub seed: u64,
}

/// Samples `n_students` student types from the population weights, draws
/// `n_docs_per_student` documents from each sampled student's pmf, and
/// flags each document with the detector's acceptance probability. Every
/// flagged document is a false accusation, since all simulated documents
/// are human-written.
pub fn simulate_institution(
    population: &PopulationModel,
    ai_model: &Pmf,
    detector: &Detector,
    n_students: u64,
    n_docs_per_student: u64,
    seed: u64,
) -> Result<SimulationOutcome> {
    if n_students == 0 || n_docs_per_student == 0 {
        return Err(Error::EmptySimulation);
    }
    let exact_avg_fpr = average_fpr(population, detector)?;
    let power = detector.power(ai_model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accusations = 0u64;
    for _ in 0..n_students {
        let student = &population.students()[population.sample_student(&mut rng)];
        for _ in 0..n_docs_per_student {
            let outcome = student.pmf.sample(&mut rng);
            if detector.flags(outcome, &mut rng) {
                accusations += 1;
            }
        }
    }
    let total_docs = (n_students * n_docs_per_student) as f64;
    Ok(SimulationOutcome {
        n_students,
        n_docs_per_student,
        accusations,
        observed_avg_fpr: accusations as f64 / total_docs,
        exact_avg_fpr,
        expected_accusations: exact_avg_fpr * total_docs,
        power,
        seed,
    })
}
