//! Detectors over finite sample spaces and their size/power functionals.
//!
//! A detector is represented extensionally: one acceptance probability per
//! outcome, the probability of declaring that outcome AI-generated.
//! Randomized detectors are supported throughout because the trade-off
//! results quantify over every measurable test. The extensional form keeps
//! false positive rate and power exact dot products, which is what makes
//! the brute-force verification in [`crate::verify`] possible.

use std::sync::Arc;

use rand::Rng;

use crate::distributions::{Pmf, PopulationModel, SampleSpace};
use crate::error::{Error, Result};

/// A (possibly randomized) detector: per-outcome acceptance probabilities.
#[derive(Debug, Clone)]
pub struct Detector {
    space: Arc<SampleSpace>,
    accept: Vec<f64>,
}

impl Detector {
    pub fn new(space: Arc<SampleSpace>, accept: Vec<f64>) -> Result<Self> {
        if accept.len() != space.size() {
            return Err(Error::MassLength {
                expected: space.size(),
                got: accept.len(),
            });
        }
        for (index, &value) in accept.iter().enumerate() {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidAcceptProbability { index, value });
            }
        }
        Ok(Self { space, accept })
    }

    /// Detector that never flags anything.
    pub fn never(space: Arc<SampleSpace>) -> Self {
        let accept = vec![0.0; space.size()];
        Self { space, accept }
    }

    /// Detector that flags every document.
    pub fn always(space: Arc<SampleSpace>) -> Self {
        let accept = vec![1.0; space.size()];
        Self { space, accept }
    }

    /// Detector with i.i.d. uniform acceptance probabilities.
    pub fn random<R: Rng + ?Sized>(space: Arc<SampleSpace>, rng: &mut R) -> Self {
        let accept = (0..space.size()).map(|_| rng.random::<f64>()).collect();
        Self { space, accept }
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn accept(&self) -> &[f64] {
        &self.accept
    }

    fn expectation(&self, p: &Pmf) -> Result<f64> {
        if !Arc::ptr_eq(&self.space, p.space()) && self.space.as_ref() != p.space().as_ref() {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .accept
            .iter()
            .zip(p.mass())
            .map(|(a, m)| a * m)
            .sum())
    }

    /// False positive rate against one student distribution: the expected
    /// acceptance probability under that student's pmf.
    pub fn fpr(&self, student: &Pmf) -> Result<f64> {
        self.expectation(student)
    }

    /// Power (true positive rate) against the AI model distribution.
    pub fn power(&self, ai_model: &Pmf) -> Result<f64> {
        self.expectation(ai_model)
    }

    /// Bernoulli flag decision for one sampled outcome.
    pub fn flags<R: Rng + ?Sized>(&self, outcome: usize, rng: &mut R) -> bool {
        rng.random::<f64>() < self.accept[outcome]
    }
}

/// Deterministic detector accepting exactly where `ai_model` strictly
/// outweighs `student`. Its power minus FPR equals the TV distance between
/// the pair, which makes it the tightness witness for the variational
/// inequality. Ties are excluded from the accept set; the gap does not
/// depend on how ties are assigned.
pub fn optimal_detector(student: &Pmf, ai_model: &Pmf) -> Result<Detector> {
    if student.space().as_ref() != ai_model.space().as_ref() {
        return Err(Error::SpaceMismatch);
    }
    let accept = student
        .mass()
        .iter()
        .zip(ai_model.mass())
        .map(|(p, q)| if q > p { 1.0 } else { 0.0 })
        .collect();
    Ok(Detector {
        space: student.space().clone(),
        accept,
    })
}

/// Deterministic detector flagging outcomes whose score is at least `t`.
/// Models score-threshold detectors: the audit pipeline sees only scores,
/// and this is the rule a score file plus a threshold induces.
pub fn threshold_detector(space: Arc<SampleSpace>, scores: &[f64], t: f64) -> Result<Detector> {
    if scores.len() != space.size() {
        return Err(Error::MassLength {
            expected: space.size(),
            got: scores.len(),
        });
    }
    for (index, &s) in scores.iter().enumerate() {
        if s.is_nan() {
            return Err(Error::InvalidScore { index });
        }
    }
    let accept = scores
        .iter()
        .map(|&s| if s >= t { 1.0 } else { 0.0 })
        .collect();
    Ok(Detector { space, accept })
}

/// Population-averaged false positive rate under the population weights.
pub fn average_fpr(population: &PopulationModel, detector: &Detector) -> Result<f64> {
    let mut total = 0.0;
    for (student, &weight) in population.students().iter().zip(population.weights()) {
        total += weight * detector.fpr(&student.pmf)?;
    }
    Ok(total)
}

/// Weighted-average false positive rate over one subgroup, under the
/// conditional weights within that subgroup.
pub fn subgroup_average_fpr(
    population: &PopulationModel,
    detector: &Detector,
    subgroup: &str,
) -> Result<f64> {
    let members = population.subgroup_members(subgroup)?;
    let total_weight: f64 = members.iter().map(|&i| population.weights()[i]).sum();
    if total_weight <= 0.0 {
        return Err(Error::ZeroSubgroupMass(subgroup.to_string()));
    }
    let mut total = 0.0;
    for &index in members {
        let conditional = population.weights()[index] / total_weight;
        total += conditional * detector.fpr(&population.students()[index].pmf)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::tv_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(n: usize) -> Arc<SampleSpace> {
        SampleSpace::new(n).unwrap()
    }

    fn pmf(mass: &[f64]) -> Pmf {
        Pmf::new(space(mass.len()), mass.to_vec()).unwrap()
    }

    #[test]
    fn never_and_always_bracket_fpr() {
        let p = pmf(&[0.3, 0.7]);
        let s = p.space().clone();
        assert_eq!(Detector::never(s.clone()).fpr(&p).unwrap(), 0.0);
        assert_eq!(Detector::always(s).fpr(&p).unwrap(), 1.0);
    }

    #[test]
    fn fpr_matches_hand_oracle() {
        // phi = [1, 0] against p = [0.3, 0.7] flags with probability 0.3
        let p = pmf(&[0.3, 0.7]);
        let phi = Detector::new(p.space().clone(), vec![1.0, 0.0]).unwrap();
        assert!((phi.fpr(&p).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn power_matches_hand_oracle() {
        let ai = pmf(&[0.1, 0.9]);
        let phi = Detector::new(ai.space().clone(), vec![0.0, 1.0]).unwrap();
        assert!((phi.power(&ai).unwrap() - 0.9).abs() < 1e-15);
        assert_eq!(Detector::always(ai.space().clone()).power(&ai).unwrap(), 1.0);
        assert_eq!(Detector::never(ai.space().clone()).power(&ai).unwrap(), 0.0);
    }

    #[test]
    fn detector_validates_entries() {
        let s = space(2);
        assert!(matches!(
            Detector::new(s.clone(), vec![1.5, 0.0]),
            Err(Error::InvalidAcceptProbability { .. })
        ));
        assert!(matches!(
            Detector::new(s, vec![0.5]),
            Err(Error::MassLength { .. })
        ));
    }

    #[test]
    fn fpr_rejects_space_mismatch() {
        let p = pmf(&[0.3, 0.7]);
        let phi = Detector::never(space(3));
        assert!(matches!(phi.fpr(&p), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn optimal_detector_gap_equals_tv_on_oracle_pair() {
        let p = pmf(&[0.5, 0.5]);
        let ai = pmf(&[0.9, 0.1]);
        let phi = optimal_detector(&p, &ai).unwrap();
        assert_eq!(phi.accept(), &[1.0, 0.0]);
        let gap = phi.power(&ai).unwrap() - phi.fpr(&p).unwrap();
        let tv = tv_distance(&p, &ai).unwrap();
        assert!((gap - tv).abs() < 1e-15);
        assert!((gap - 0.4).abs() < 1e-15);
    }

    #[test]
    fn optimal_detector_on_equal_pmfs_never_accepts() {
        let p = pmf(&[0.25, 0.75]);
        let phi = optimal_detector(&p, &p).unwrap();
        assert_eq!(phi.accept(), &[0.0, 0.0]);
        assert_eq!(phi.power(&p).unwrap() - phi.fpr(&p).unwrap(), 0.0);
    }

    #[test]
    fn optimal_detector_on_disjoint_supports_has_unit_gap() {
        let s = space(2);
        let p = Pmf::point_mass(s.clone(), 0).unwrap();
        let ai = Pmf::point_mass(s, 1).unwrap();
        let phi = optimal_detector(&p, &ai).unwrap();
        let gap = phi.power(&ai).unwrap() - phi.fpr(&p).unwrap();
        assert_eq!(gap, 1.0);
    }

    #[test]
    fn threshold_detector_covers_extremes() {
        let s = space(2);
        let scores = [0.2, 0.8];
        let all = threshold_detector(s.clone(), &scores, f64::NEG_INFINITY).unwrap();
        assert_eq!(all.accept(), &[1.0, 1.0]);
        let none = threshold_detector(s.clone(), &scores, f64::INFINITY).unwrap();
        assert_eq!(none.accept(), &[0.0, 0.0]);
        let mid = threshold_detector(s, &scores, 0.5).unwrap();
        assert_eq!(mid.accept(), &[0.0, 1.0]);
    }

    #[test]
    fn random_detector_is_seed_deterministic() {
        let s = space(5);
        let a = Detector::random(s.clone(), &mut ChaCha8Rng::seed_from_u64(1));
        let b = Detector::random(s.clone(), &mut ChaCha8Rng::seed_from_u64(1));
        let c = Detector::random(s, &mut ChaCha8Rng::seed_from_u64(2));
        assert_eq!(a.accept(), b.accept());
        assert_ne!(a.accept(), c.accept());
        assert!(a.accept().iter().all(|&x| (0.0..=1.0).contains(&x)));
    }
}
