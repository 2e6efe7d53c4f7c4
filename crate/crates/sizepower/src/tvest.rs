//! Estimating TV distance through classifier accuracy.
//!
//! Under balanced classes the best achievable accuracy of any classifier
//! distinguishing two distributions is `(1 + TV) / 2`, so an observed
//! accuracy `a` certifies `TV >= 2a - 1`. The direction matters: this route
//! produces a *lower* bound on TV, while turning the subgroup FPR bound
//! into a guarantee would require an *upper* bound. A weak classifier says
//! nothing about TV being small; only a strong one says something, namely
//! that the subgroup is far from the AI model and detection may be feasible
//! there. [`direction_guard`] encodes that caveat so downstream reports
//! cannot silently misuse the estimate.
//!
//! The classifier here is the plug-in frequency rule on the finite outcome
//! space: predict whichever class had the higher empirical frequency at the
//! observed outcome. On a finite space it converges to the exact Bayes rule,
//! which keeps the accuracy identity testable without an ML stack.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distributions::Pmf;
use crate::error::{Error, Result};

/// Accuracy of the exact Bayes rule separating `p` from `q` under a 50/50
/// class prior: predict the class whose pmf is larger at the outcome, ties
/// to `p`. Computed from the per-outcome maxima, an independent route from
/// the half-L1 TV sum.
pub fn bayes_accuracy(p: &Pmf, q: &Pmf) -> Result<f64> {
    if p.space().as_ref() != q.space().as_ref() {
        return Err(Error::SpaceMismatch);
    }
    let mut correct = 0.0;
    for (&mp, &mq) in p.mass().iter().zip(q.mass()) {
        if mp >= mq {
            correct += 0.5 * mp;
        } else {
            correct += 0.5 * mq;
        }
    }
    Ok(correct)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionNote {
    /// The classifier route only ever lower-bounds TV.
    LowerBoundOnly,
}

/// Result of the plug-in classifier estimate.
#[derive(Debug, Clone, Serialize)]
pub struct TvEstimate {
    /// Balanced test accuracy of the plug-in rule.
    pub accuracy_hat: f64,
    /// `max(0, 2 * accuracy_hat - 1)`.
    pub tv_lower_bound: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub direction_note: DirectionNote,
    /// True when `2a - 1` came out negative and was clipped; a sub-half
    /// accuracy signals a degenerate split, not negative TV.
    pub clipped_negative: bool,
    /// Class sizes before balance was enforced by down-sampling.
    pub n_class_p_raw: usize,
    pub n_class_q_raw: usize,
    pub seed: u64,
}

/// Trains the plug-in frequency classifier on a train split of the two
/// sample lists and reports balanced test accuracy plus the implied TV
/// lower bound.
///
/// Classes are balanced by down-sampling the larger list (seeded) before
/// the split; the pre-balance sizes are recorded in the estimate. `split`
/// is the training fraction. Outcomes never seen in training predict class
/// `p`, the same rule that breaks frequency ties.
pub fn plugin_classifier_accuracy(
    samples_p: &[usize],
    samples_q: &[usize],
    split: f64,
    seed: u64,
) -> Result<TvEstimate> {
    if samples_p.is_empty() {
        return Err(Error::EmptySamples { class: "p" });
    }
    if samples_q.is_empty() {
        return Err(Error::EmptySamples { class: "q" });
    }
    if !split.is_finite() || split <= 0.0 || split >= 1.0 {
        return Err(Error::OutOfRange {
            name: "split",
            value: split,
            low: 0.0,
            high: 1.0,
        });
    }

    let n_class_p_raw = samples_p.len();
    let n_class_q_raw = samples_q.len();
    let balanced = n_class_p_raw.min(n_class_q_raw);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p: Vec<usize> = samples_p.to_vec();
    let mut q: Vec<usize> = samples_q.to_vec();
    p.shuffle(&mut rng);
    q.shuffle(&mut rng);
    p.truncate(balanced);
    q.truncate(balanced);

    let n_train_per_class = (split * balanced as f64).floor() as usize;
    if n_train_per_class == 0 || n_train_per_class >= balanced {
        return Err(Error::DegenerateSplit {
            split,
            class: if n_train_per_class == 0 { "train" } else { "test" },
        });
    }

    let max_outcome = p.iter().chain(q.iter()).copied().max().unwrap_or(0);
    let mut count_p = vec![0u64; max_outcome + 1];
    let mut count_q = vec![0u64; max_outcome + 1];
    for &x in &p[..n_train_per_class] {
        count_p[x] += 1;
    }
    for &x in &q[..n_train_per_class] {
        count_q[x] += 1;
    }

    // balanced train sets make count comparison the frequency comparison
    let predicts_p = |x: usize| count_p[x] >= count_q[x];

    let test_p = &p[n_train_per_class..];
    let test_q = &q[n_train_per_class..];
    let correct_p = test_p.iter().filter(|&&x| predicts_p(x)).count();
    let correct_q = test_q.iter().filter(|&&x| !predicts_p(x)).count();
    let accuracy_hat = 0.5 * (correct_p as f64 / test_p.len() as f64)
        + 0.5 * (correct_q as f64 / test_q.len() as f64);

    let raw_bound = 2.0 * accuracy_hat - 1.0;
    Ok(TvEstimate {
        accuracy_hat,
        tv_lower_bound: raw_bound.max(0.0),
        n_train: 2 * n_train_per_class,
        n_test: test_p.len() + test_q.len(),
        direction_note: DirectionNote::LowerBoundOnly,
        clipped_negative: raw_bound < 0.0,
        n_class_p_raw,
        n_class_q_raw,
        seed,
    })
}

/// What the estimate does and does not support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TvAssessment {
    /// Accuracy at or below chance: no conclusion about TV being small,
    /// the classifier may simply be weak.
    NoConclusion,
    /// Positive margin over chance, but within sampling noise of it.
    SamplingNoise,
    /// TV is certified at least `tv_lower_bound`; the FPR floor computed
    /// from it is still not a valid guarantee.
    TvLowerBounded,
    /// The certified TV already exceeds the detector power, so the
    /// subgroup bound is vacuous there: the subgroup is far from the AI
    /// model and detection may be feasible for it.
    DetectionMayBeFeasible,
}

/// Structured advisory pairing a TV estimate with the subgroup FPR floor it
/// does *not* certify.
#[derive(Debug, Clone, Serialize)]
pub struct DirectionAdvisory {
    pub tv_lower_bound: f64,
    /// `max(0, power - tv_lower_bound)`, for reference only.
    pub fpr_floor_from_lower_bound: f64,
    /// Always false: a floor computed from a TV lower bound overstates
    /// nothing about real FPR; certifying a floor needs a TV upper bound.
    pub valid_as_fpr_bound: bool,
    pub assessment: TvAssessment,
    /// Half-width of the sampling-noise band used to judge the margin.
    pub noise_halfwidth: f64,
    pub note: String,
}

/// Interprets a [`TvEstimate`] against a detector power, making the
/// direction-of-inference caveat explicit.
pub fn direction_guard(estimate: &TvEstimate, power: f64) -> Result<DirectionAdvisory> {
    if !power.is_finite() || !(0.0..=1.0).contains(&power) {
        return Err(Error::OutOfRange {
            name: "power",
            value: power,
            low: 0.0,
            high: 1.0,
        });
    }
    let noise_halfwidth = 3.0 / (estimate.n_test as f64).sqrt();
    let margin = 2.0 * estimate.accuracy_hat - 1.0;
    let assessment = if margin <= 0.0 {
        TvAssessment::NoConclusion
    } else if margin < noise_halfwidth {
        TvAssessment::SamplingNoise
    } else if estimate.tv_lower_bound >= power {
        TvAssessment::DetectionMayBeFeasible
    } else {
        TvAssessment::TvLowerBounded
    };
    let note = match assessment {
        TvAssessment::NoConclusion => {
            "accuracy at or below chance is not evidence that TV is small; \
             the classifier may be far from Bayes-optimal"
        }
        TvAssessment::SamplingNoise => {
            "margin over chance is within sampling noise for this test size; \
             collect more samples before reading anything into it"
        }
        TvAssessment::TvLowerBounded => {
            "TV is at least the certified bound; the FPR floor shown is \
             computed from a lower bound on TV and is not a valid guarantee"
        }
        TvAssessment::DetectionMayBeFeasible => {
            "certified TV meets or exceeds the detector power, so the \
             subgroup bound is vacuous here; the subgroup is far from the \
             AI model and detection may be feasible for it"
        }
    };
    Ok(DirectionAdvisory {
        tv_lower_bound: estimate.tv_lower_bound,
        fpr_floor_from_lower_bound: (power - estimate.tv_lower_bound).max(0.0),
        valid_as_fpr_bound: false,
        assessment,
        noise_halfwidth,
        note: note.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{tv_distance, SampleSpace};
    use rand::Rng;

    fn pmf(mass: &[f64]) -> Pmf {
        Pmf::new(SampleSpace::new(mass.len()).unwrap(), mass.to_vec()).unwrap()
    }

    fn draw(p: &Pmf, n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        (0..n).map(|_| p.sample(rng)).collect()
    }

    #[test]
    fn bayes_accuracy_trivial_cases() {
        let p = pmf(&[0.3, 0.7]);
        assert_eq!(bayes_accuracy(&p, &p).unwrap(), 0.5);

        let s = SampleSpace::new(2).unwrap();
        let a = Pmf::point_mass(s.clone(), 0).unwrap();
        let b = Pmf::point_mass(s, 1).unwrap();
        assert_eq!(bayes_accuracy(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn bayes_accuracy_matches_half_one_plus_tv() {
        // oracle pair with TV 0.4: accuracy (1 + 0.4) / 2 = 0.7
        let p = pmf(&[0.5, 0.5]);
        let q = pmf(&[0.9, 0.1]);
        let accuracy = bayes_accuracy(&p, &q).unwrap();
        assert!((accuracy - 0.7).abs() < 1e-15);
        let identity = 0.5 * (1.0 + tv_distance(&p, &q).unwrap());
        assert!((accuracy - identity).abs() < 1e-12);
    }

    #[test]
    fn bayes_accuracy_rejects_space_mismatch() {
        let p = pmf(&[0.5, 0.5]);
        let q = pmf(&[0.2, 0.3, 0.5]);
        assert!(matches!(bayes_accuracy(&p, &q), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn plugin_close_to_zero_for_identical_distributions() {
        let p = pmf(&[0.25, 0.25, 0.25, 0.25]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = draw(&p, 2000, &mut rng);
        let b = draw(&p, 2000, &mut rng);
        let estimate = plugin_classifier_accuracy(&a, &b, 0.5, 3).unwrap();
        let noise = 3.0 / (estimate.n_test as f64).sqrt();
        assert!(estimate.tv_lower_bound <= noise, "bound {} above noise {}", estimate.tv_lower_bound, noise);
    }

    #[test]
    fn plugin_reaches_one_on_disjoint_supports() {
        let s = SampleSpace::new(2).unwrap();
        let a = Pmf::point_mass(s.clone(), 0).unwrap();
        let b = Pmf::point_mass(s, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sa = draw(&a, 400, &mut rng);
        let sb = draw(&b, 400, &mut rng);
        let estimate = plugin_classifier_accuracy(&sa, &sb, 0.5, 5).unwrap();
        assert_eq!(estimate.accuracy_hat, 1.0);
        assert_eq!(estimate.tv_lower_bound, 1.0);
    }

    #[test]
    fn plugin_converges_to_oracle_tv() {
        let p = pmf(&[0.5, 0.5]);
        let q = pmf(&[0.9, 0.1]);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let sp = draw(&p, 4000, &mut rng);
        let sq = draw(&q, 4000, &mut rng);
        let estimate = plugin_classifier_accuracy(&sp, &sq, 0.5, 9).unwrap();
        let noise = 3.0 / (estimate.n_test as f64).sqrt();
        assert!(
            (estimate.tv_lower_bound - 0.4).abs() <= noise,
            "bound {} strayed from 0.4 beyond {}",
            estimate.tv_lower_bound,
            noise
        );
    }

    #[test]
    fn plugin_records_imbalance_and_balances_by_downsampling() {
        let p = pmf(&[0.5, 0.5]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = draw(&p, 900, &mut rng);
        let b = draw(&p, 300, &mut rng);
        let estimate = plugin_classifier_accuracy(&a, &b, 0.5, 1).unwrap();
        assert_eq!(estimate.n_class_p_raw, 900);
        assert_eq!(estimate.n_class_q_raw, 300);
        assert_eq!(estimate.n_train + estimate.n_test, 600);
    }

    #[test]
    fn plugin_rejects_empty_and_degenerate_inputs() {
        let samples = vec![0usize, 1, 0, 1];
        assert!(matches!(
            plugin_classifier_accuracy(&[], &samples, 0.5, 0),
            Err(Error::EmptySamples { class: "p" })
        ));
        assert!(matches!(
            plugin_classifier_accuracy(&samples, &[], 0.5, 0),
            Err(Error::EmptySamples { class: "q" })
        ));
        assert!(matches!(
            plugin_classifier_accuracy(&samples, &samples, 0.01, 0),
            Err(Error::DegenerateSplit { .. })
        ));
        assert!(matches!(
            plugin_classifier_accuracy(&samples, &samples, 1.0, 0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn plugin_is_seed_deterministic() {
        let p = pmf(&[0.6, 0.4]);
        let q = pmf(&[0.2, 0.8]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sp = draw(&p, 200, &mut rng);
        let sq = draw(&q, 200, &mut rng);
        let a = plugin_classifier_accuracy(&sp, &sq, 0.5, 42).unwrap();
        let b = plugin_classifier_accuracy(&sp, &sq, 0.5, 42).unwrap();
        assert_eq!(a.accuracy_hat, b.accuracy_hat);
        assert_eq!(a.tv_lower_bound, b.tv_lower_bound);
    }

    #[test]
    fn unseen_outcomes_predict_class_p() {
        // q's test half contains outcome 2, which training never saw;
        // the tie rule sends it to class p, costing q-side accuracy
        let samples_p = vec![0, 0, 0, 0];
        let samples_q = vec![1, 1, 2, 2];
        let estimate = plugin_classifier_accuracy(&samples_p, &samples_q, 0.5, 0).unwrap();
        assert!(estimate.accuracy_hat <= 1.0);
    }

    #[test]
    fn guard_flags_chance_accuracy() {
        let estimate = TvEstimate {
            accuracy_hat: 0.5,
            tv_lower_bound: 0.0,
            n_train: 100,
            n_test: 100,
            direction_note: DirectionNote::LowerBoundOnly,
            clipped_negative: false,
            n_class_p_raw: 100,
            n_class_q_raw: 100,
            seed: 0,
        };
        let advisory = direction_guard(&estimate, 0.8).unwrap();
        assert_eq!(advisory.assessment, TvAssessment::NoConclusion);
        assert!(!advisory.valid_as_fpr_bound);
    }

    #[test]
    fn guard_flags_high_accuracy_as_feasible_detection() {
        let estimate = TvEstimate {
            accuracy_hat: 0.95,
            tv_lower_bound: 0.9,
            n_train: 1000,
            n_test: 1000,
            direction_note: DirectionNote::LowerBoundOnly,
            clipped_negative: false,
            n_class_p_raw: 1000,
            n_class_q_raw: 1000,
            seed: 0,
        };
        let advisory = direction_guard(&estimate, 0.8).unwrap();
        assert_eq!(advisory.assessment, TvAssessment::DetectionMayBeFeasible);
        assert_eq!(advisory.fpr_floor_from_lower_bound, 0.0);
    }

    #[test]
    fn guard_flags_small_margin_as_noise() {
        // accuracy 0.51 with a tiny test set: margin 0.02 < 3/sqrt(36)
        let estimate = TvEstimate {
            accuracy_hat: 0.51,
            tv_lower_bound: 0.02,
            n_train: 36,
            n_test: 36,
            direction_note: DirectionNote::LowerBoundOnly,
            clipped_negative: false,
            n_class_p_raw: 36,
            n_class_q_raw: 36,
            seed: 0,
        };
        let advisory = direction_guard(&estimate, 0.8).unwrap();
        assert_eq!(advisory.assessment, TvAssessment::SamplingNoise);
    }

    #[test]
    fn plugin_never_beats_bayes_by_more_than_noise() {
        let p = pmf(&[0.4, 0.3, 0.2, 0.1]);
        let q = pmf(&[0.1, 0.2, 0.3, 0.4]);
        let bayes = bayes_accuracy(&p, &q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for trial in 0..50 {
            let sp = draw(&p, 600, &mut rng);
            let sq = draw(&q, 600, &mut rng);
            let estimate = plugin_classifier_accuracy(&sp, &sq, 0.5, trial).unwrap();
            let noise = 4.0 / (estimate.n_test as f64).sqrt();
            assert!(estimate.accuracy_hat <= bayes + noise);
        }
    }

    #[test]
    fn median_error_shrinks_as_samples_double() {
        let p = pmf(&[0.5, 0.5]);
        let q = pmf(&[0.9, 0.1]);
        let true_tv = 0.4;
        let median_error = |per_class: usize| {
            let mut errors: Vec<f64> = (0..120)
                .map(|replication| {
                    let mut rng = ChaCha8Rng::seed_from_u64(1000 + replication);
                    let sp = draw(&p, per_class, &mut rng);
                    let sq = draw(&q, per_class, &mut rng);
                    let estimate =
                        plugin_classifier_accuracy(&sp, &sq, 0.5, replication).unwrap();
                    (estimate.tv_lower_bound - true_tv).abs()
                })
                .collect();
            errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
            errors[errors.len() / 2]
        };
        let coarse = median_error(128);
        let mid = median_error(256);
        let fine = median_error(512);
        assert!(mid <= coarse, "error rose from {coarse} to {mid}");
        assert!(fine <= mid, "error rose from {mid} to {fine}");
    }

    #[test]
    fn random_pair_identity_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            let s = SampleSpace::new(rng.random_range(2..=15)).unwrap();
            let p = Pmf::random(s.clone(), &mut rng);
            let q = Pmf::random(s, &mut rng);
            let accuracy = bayes_accuracy(&p, &q).unwrap();
            let identity = 0.5 * (1.0 + tv_distance(&p, &q).unwrap());
            assert!((accuracy - identity).abs() <= 1e-12);
        }
    }
}
