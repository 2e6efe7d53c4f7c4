//! Finite sample spaces, probability mass functions, total variation
//! distance, mixtures, and weighted student populations.
//!
//! Document distributions are modeled extensionally: a [`SampleSpace`] is a
//! finite set of outcomes and a [`Pmf`] assigns one probability per outcome,
//! with the counting measure as reference. Every quantity downstream (TV
//! distance, detector response, the trade-off bounds) reduces to a finite
//! sum over outcomes, so everything can be evaluated and cross-checked
//! exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance for "sums to one" checks on pmfs and population weights.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A finite set of document outcomes, optionally labeled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSpace {
    size: usize,
    labels: Option<Vec<String>>,
}

impl SampleSpace {
    pub fn new(size: usize) -> Result<Arc<Self>> {
        if size == 0 {
            return Err(Error::EmptySampleSpace);
        }
        Ok(Arc::new(Self { size, labels: None }))
    }

    /// A space whose outcomes carry unique names.
    pub fn with_labels(labels: Vec<String>) -> Result<Arc<Self>> {
        if labels.is_empty() {
            return Err(Error::EmptySampleSpace);
        }
        let mut seen = std::collections::BTreeSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Arc::new(Self {
            size: labels.len(),
            labels: Some(labels),
        }))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.as_ref().and_then(|l| l.get(index)).map(|s| s.as_str())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels
            .as_ref()
            .and_then(|l| l.iter().position(|x| x == label))
    }
}

fn check_same_space(a: &Arc<SampleSpace>, b: &Arc<SampleSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// A probability mass function over a [`SampleSpace`].
///
/// Construction validates that every entry is non-negative and that the
/// entries sum to one within [`NORMALIZATION_TOLERANCE`]; a sum outside the
/// tolerance is an error rather than a silent renormalization. Within the
/// tolerance the mass is divided by its exact sum, so float dust from
/// callers does not accumulate downstream.
#[derive(Debug, Clone)]
pub struct Pmf {
    space: Arc<SampleSpace>,
    mass: Vec<f64>,
}

impl Pmf {
    pub fn new(space: Arc<SampleSpace>, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != space.size() {
            return Err(Error::MassLength {
                expected: space.size(),
                got: mass.len(),
            });
        }
        for (index, &value) in mass.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidMass { index, value });
            }
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::MassSum { sum });
        }
        let mass = mass.into_iter().map(|m| m / sum).collect();
        Ok(Self { space, mass })
    }

    /// Builds a pmf by explicitly normalizing non-negative weights.
    pub fn from_weights(space: Arc<SampleSpace>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.size() {
            return Err(Error::MassLength {
                expected: space.size(),
                got: weights.len(),
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidMass { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::WeightSum { sum });
        }
        let mass = weights.into_iter().map(|w| w / sum).collect();
        Ok(Self { space, mass })
    }

    pub fn uniform(space: Arc<SampleSpace>) -> Self {
        let n = space.size();
        Self {
            space,
            mass: vec![1.0 / n as f64; n],
        }
    }

    /// All mass on a single outcome.
    pub fn point_mass(space: Arc<SampleSpace>, index: usize) -> Result<Self> {
        if index >= space.size() {
            return Err(Error::OutcomeOutOfBounds {
                index,
                size: space.size(),
            });
        }
        let mut mass = vec![0.0; space.size()];
        mass[index] = 1.0;
        Ok(Self { space, mass })
    }

    /// Draws a pmf uniformly from the probability simplex using sorted
    /// uniform spacings: n-1 points split [0, 1] into n segment lengths.
    pub fn random<R: Rng + ?Sized>(space: Arc<SampleSpace>, rng: &mut R) -> Self {
        let n = space.size();
        if n == 1 {
            return Self {
                space,
                mass: vec![1.0],
            };
        }
        let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.random::<f64>()).collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut mass = Vec::with_capacity(n);
        let mut previous = 0.0;
        for &cut in &cuts {
            mass.push(cut - previous);
            previous = cut;
        }
        mass.push(1.0 - previous);
        let sum: f64 = mass.iter().sum();
        for m in &mut mass {
            *m /= sum;
        }
        Self { space, mass }
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Inverse-transform sampling of one outcome index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.mass, rng.random::<f64>())
    }
}

/// Maps a uniform draw in [0, 1) to an index via the cumulative sum of
/// `weights`. Falls back to the last positive-weight index when float dust
/// leaves the draw above the final cumulative value.
pub(crate) fn sample_index(weights: &[f64], draw: f64) -> usize {
    let mut cumulative = 0.0;
    for (index, &w) in weights.iter().enumerate() {
        cumulative += w;
        if draw < cumulative {
            return index;
        }
    }
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// Total variation distance between two pmfs on the same space, computed as
/// half the L1 distance. Ranges over [0, 1] and attains 1 exactly on
/// disjoint supports.
pub fn tv_distance(p: &Pmf, q: &Pmf) -> Result<f64> {
    check_same_space(p.space(), q.space())?;
    let sum: f64 = p
        .mass
        .iter()
        .zip(&q.mass)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(0.5 * sum)
}

/// Pointwise convex combination of pmfs sharing one space.
pub fn mixture(components: &[Pmf], weights: &[f64]) -> Result<Pmf> {
    if components.is_empty() {
        return Err(Error::EmptyComponents);
    }
    if weights.len() != components.len() {
        return Err(Error::WeightCount {
            expected: components.len(),
            got: weights.len(),
        });
    }
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidWeight { index, value });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::WeightSum { sum });
    }
    let space = components[0].space().clone();
    for component in &components[1..] {
        check_same_space(&space, component.space())?;
    }
    let mut mass = vec![0.0; space.size()];
    for (component, &weight) in components.iter().zip(weights) {
        for (slot, &m) in mass.iter_mut().zip(&component.mass) {
            *slot += weight * m;
        }
    }
    Pmf::new(space, mass)
}

/// One student type: an identifier, its writing distribution, and the
/// subgroup and task labels used for stratified analysis.
///
/// Bounds are per-task; this type only carries the task label, and callers
/// filter a population down to one task before computing task-specific
/// quantities.
#[derive(Debug, Clone)]
pub struct StudentType {
    pub id: String,
    pub subgroup: String,
    pub task: String,
    pub pmf: Pmf,
}

impl StudentType {
    pub fn new(
        id: impl Into<String>,
        subgroup: impl Into<String>,
        task: impl Into<String>,
        pmf: Pmf,
    ) -> Self {
        Self {
            id: id.into(),
            subgroup: subgroup.into(),
            task: task.into(),
            pmf,
        }
    }
}

/// A weighted family of student types partitioned into subgroups.
///
/// Weights are per-student atoms summing to one; the subgroup partition is
/// derived from each student's subgroup label.
#[derive(Debug, Clone)]
pub struct PopulationModel {
    students: Vec<StudentType>,
    weights: Vec<f64>,
    subgroups: BTreeMap<String, Vec<usize>>,
}

impl PopulationModel {
    pub fn new(students: Vec<StudentType>, weights: Vec<f64>) -> Result<Self> {
        if students.is_empty() {
            return Err(Error::EmptyPopulation);
        }
        if weights.len() != students.len() {
            return Err(Error::WeightCount {
                expected: students.len(),
                got: weights.len(),
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::WeightSum { sum });
        }
        let weights: Vec<f64> = weights.into_iter().map(|w| w / sum).collect();

        let space = students[0].pmf.space().clone();
        let mut ids = std::collections::BTreeSet::new();
        let mut subgroups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (index, student) in students.iter().enumerate() {
            check_same_space(&space, student.pmf.space())?;
            if !ids.insert(student.id.as_str()) {
                return Err(Error::DuplicateStudentId(student.id.clone()));
            }
            subgroups
                .entry(student.subgroup.clone())
                .or_default()
                .push(index);
        }
        Ok(Self {
            students,
            weights,
            subgroups,
        })
    }

    pub fn students(&self) -> &[StudentType] {
        &self.students
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        self.students[0].pmf.space()
    }

    /// Subgroup keys in sorted order.
    pub fn subgroup_keys(&self) -> impl Iterator<Item = &str> {
        self.subgroups.keys().map(|k| k.as_str())
    }

    pub fn subgroup_members(&self, subgroup: &str) -> Result<&[usize]> {
        self.subgroups
            .get(subgroup)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::UnknownSubgroup(subgroup.to_string()))
    }

    /// Total weight of one subgroup.
    pub fn subgroup_weight(&self, subgroup: &str) -> Result<f64> {
        let members = self.subgroup_members(subgroup)?;
        Ok(members.iter().map(|&i| self.weights[i]).sum())
    }

    /// Document distribution of a randomly chosen member of `subgroup`:
    /// the mixture of member pmfs under the conditional weights.
    pub fn subgroup_mixture(&self, subgroup: &str) -> Result<Pmf> {
        let members = self.subgroup_members(subgroup)?;
        let total: f64 = members.iter().map(|&i| self.weights[i]).sum();
        if total <= 0.0 {
            return Err(Error::ZeroSubgroupMass(subgroup.to_string()));
        }
        let space = self.space().clone();
        let mut mass = vec![0.0; space.size()];
        for &index in members {
            let conditional = self.weights[index] / total;
            for (slot, &m) in mass.iter_mut().zip(self.students[index].pmf.mass()) {
                *slot += conditional * m;
            }
        }
        Pmf::new(space, mass)
    }

    /// Ids of students whose writing distribution lies within TV distance
    /// `delta` of `ai_model`, in population order.
    pub fn overlap_set(&self, ai_model: &Pmf, delta: f64) -> Result<Vec<&str>> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::OutOfRange {
                name: "delta",
                value: delta,
                low: 0.0,
                high: f64::INFINITY,
            });
        }
        check_same_space(self.space(), ai_model.space())?;
        let mut ids = Vec::new();
        for student in &self.students {
            if tv_distance(&student.pmf, ai_model)? <= delta {
                ids.push(student.id.as_str());
            }
        }
        Ok(ids)
    }

    /// Population weight of the overlap set; non-decreasing in `delta`.
    pub fn overlap_mass(&self, ai_model: &Pmf, delta: f64) -> Result<f64> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::OutOfRange {
                name: "delta",
                value: delta,
                low: 0.0,
                high: f64::INFINITY,
            });
        }
        check_same_space(self.space(), ai_model.space())?;
        let mut mass = 0.0;
        for (student, &weight) in self.students.iter().zip(&self.weights) {
            if tv_distance(&student.pmf, ai_model)? <= delta {
                mass += weight;
            }
        }
        Ok(mass)
    }

    /// Draws one student index according to the population weights.
    pub fn sample_student<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.weights, rng.random::<f64>())
    }
}
