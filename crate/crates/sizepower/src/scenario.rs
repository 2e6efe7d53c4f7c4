//! On-disk scenario files: a sample space, a weighted student population,
//! an AI model distribution, and optional named detectors, as one JSON
//! document. Loading re-validates every invariant of the underlying types.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::detectors::Detector;
use crate::distributions::{Pmf, PopulationModel, SampleSpace, StudentType};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpaceFile {
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StudentFile {
    id: String,
    subgroup: String,
    task: String,
    pmf: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DetectorFile {
    name: String,
    accept: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioFile {
    space: SpaceFile,
    students: Vec<StudentFile>,
    weights: Vec<f64>,
    ai_model: Vec<f64>,
    #[serde(default)]
    detectors: Vec<DetectorFile>,
}

/// A detector with the name it carries in the scenario file.
#[derive(Debug, Clone)]
pub struct NamedDetector {
    pub name: String,
    pub detector: Detector,
}

/// Fully validated in-memory scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub space: Arc<SampleSpace>,
    pub population: PopulationModel,
    pub ai_model: Pmf,
    pub detectors: Vec<NamedDetector>,
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        let space = match file.space.labels {
            Some(labels) => {
                let space = SampleSpace::with_labels(labels)?;
                if space.size() != file.space.size {
                    return Err(Error::Scenario(format!(
                        "space.size is {} but {} labels were given",
                        file.space.size,
                        space.size()
                    )));
                }
                space
            }
            None => SampleSpace::new(file.space.size)?,
        };
        let mut students = Vec::with_capacity(file.students.len());
        for student in file.students {
            students.push(StudentType::new(
                student.id,
                student.subgroup,
                student.task,
                Pmf::new(space.clone(), student.pmf)?,
            ));
        }
        let population = PopulationModel::new(students, file.weights)?;
        let ai_model = Pmf::new(space.clone(), file.ai_model)?;
        let mut detectors = Vec::with_capacity(file.detectors.len());
        let mut seen = std::collections::BTreeSet::new();
        for detector in file.detectors {
            if !seen.insert(detector.name.clone()) {
                return Err(Error::Scenario(format!(
                    "detector name {:?} appears more than once",
                    detector.name
                )));
            }
            detectors.push(NamedDetector {
                name: detector.name,
                detector: Detector::new(space.clone(), detector.accept)?,
            });
        }
        Ok(Self {
            space,
            population,
            ai_model,
            detectors,
        })
    }

    pub fn to_json_pretty(&self) -> String {
        let file = ScenarioFile {
            space: SpaceFile {
                size: self.space.size(),
                labels: self.space.labels().map(|l| l.to_vec()),
            },
            students: self
                .population
                .students()
                .iter()
                .map(|s| StudentFile {
                    id: s.id.clone(),
                    subgroup: s.subgroup.clone(),
                    task: s.task.clone(),
                    pmf: s.pmf.mass().to_vec(),
                })
                .collect(),
            weights: self.population.weights().to_vec(),
            ai_model: self.ai_model.mass().to_vec(),
            detectors: self
                .detectors
                .iter()
                .map(|d| DetectorFile {
                    name: d.name.clone(),
                    accept: d.detector.accept().to_vec(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }

    /// Finds a detector by name, or returns the first one when no name is
    /// requested.
    pub fn detector(&self, name: Option<&str>) -> Result<&NamedDetector> {
        match name {
            Some(name) => self
                .detectors
                .iter()
                .find(|d| d.name == name)
                .ok_or_else(|| Error::Scenario(format!("no detector named {name:?}"))),
            None => self
                .detectors
                .first()
                .ok_or_else(|| Error::Scenario("scenario declares no detectors".to_string())),
        }
    }
}
