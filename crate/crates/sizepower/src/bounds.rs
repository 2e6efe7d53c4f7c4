//! Closed-form trade-off bounds and the bound-map grid.
//!
//! Three scalar bounds connect overlap structure to detector error rates:
//!
//! - average case: any detector with power `beta` incurs population-averaged
//!   FPR at least `overlap_mass * (beta - delta)`;
//! - worst case: capping every student's FPR at `fpr_ceiling` caps power at
//!   `fpr_ceiling + nearest_tv`;
//! - subgroup: a subgroup's average FPR is at least `power - mixture_tv`.
//!
//! The raw formulas can go negative, in which case they say nothing (an FPR
//! is trivially at least zero). The scalar functions return the clipped
//! value; [`institution_fpr_lower_bound`] additionally reports the literal
//! signed sum so the unclipped aggregation is reproducible verbatim.
//!
//! Results are quantized to 12 significant decimal digits so that bounds
//! computed from short decimal inputs print as the same short decimals
//! (`0.10 * (0.80 - 0.05)` yields `0.075`, not `0.07500000000000001`). The
//! quantization step is at most 5e-13, below every tolerance used in the
//! verification suites, and is monotone, so it preserves the grid's
//! ordering properties.

use std::io::Write;

use crate::detectors::Detector;
use crate::distributions::{tv_distance, Pmf, PopulationModel};
use crate::error::{Error, Result};

/// Rounds to 12 significant decimal digits.
fn quantize(value: f64) -> f64 {
    if value == 0.0 {
        return 0.0;
    }
    format!("{value:.11e}").parse().unwrap()
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            low: 0.0,
            high: 1.0,
        });
    }
    Ok(value)
}

/// Lower bound on the population-averaged FPR of any detector with power
/// `power`, when a fraction `overlap_mass` of students writes within TV
/// distance `delta` of the AI model: `max(0, overlap_mass * (power - delta))`.
pub fn avg_case_fpr_lower_bound(overlap_mass: f64, power: f64, delta: f64) -> Result<f64> {
    check_unit_interval("overlap_mass", overlap_mass)?;
    check_unit_interval("power", power)?;
    check_unit_interval("delta", delta)?;
    Ok(quantize((overlap_mass * (power - delta)).max(0.0)))
}

/// Scales a per-document FPR bound to a head count of students.
pub fn expected_false_accusations(bound: f64, n_students: u64) -> Result<f64> {
    check_unit_interval("bound", bound)?;
    Ok(quantize(bound * n_students as f64))
}

/// TV distance from the AI model to the nearest student in the population.
/// Finite populations make this a minimum rather than an infimum.
pub fn delta_star(population: &PopulationModel, ai_model: &Pmf) -> Result<f64> {
    let mut best = f64::INFINITY;
    for student in population.students() {
        let tv = tv_distance(&student.pmf, ai_model)?;
        if tv < best {
            best = tv;
        }
    }
    Ok(best)
}

/// Upper bound on the power of any detector whose per-student FPR never
/// exceeds `fpr_ceiling`: `min(1, fpr_ceiling + nearest_tv)`.
pub fn worst_case_power_cap(fpr_ceiling: f64, nearest_tv: f64) -> Result<f64> {
    check_unit_interval("fpr_ceiling", fpr_ceiling)?;
    check_unit_interval("nearest_tv", nearest_tv)?;
    Ok(quantize((fpr_ceiling + nearest_tv).min(1.0)))
}

/// Lower bound on one subgroup's average FPR: `max(0, power - mixture_tv)`.
pub fn subgroup_fpr_lower_bound(power: f64, mixture_tv: f64) -> Result<f64> {
    check_unit_interval("power", power)?;
    check_unit_interval("mixture_tv", mixture_tv)?;
    Ok(quantize((power - mixture_tv).max(0.0)))
}

/// Institution-wide aggregation of the subgroup bound.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct InstitutionBound {
    /// Signed sum over subgroups of `weight * (power - mixture_tv)`.
    pub literal: f64,
    /// Sum with each subgroup term clipped at zero; never below `literal`.
    pub clipped: f64,
}

/// Aggregates the subgroup bound over every subgroup in the population,
/// weighting by subgroup population share.
pub fn institution_fpr_lower_bound(
    population: &PopulationModel,
    ai_model: &Pmf,
    power: f64,
) -> Result<InstitutionBound> {
    check_unit_interval("power", power)?;
    let mut literal = 0.0;
    let mut clipped = 0.0;
    let keys: Vec<String> = population.subgroup_keys().map(String::from).collect();
    for key in &keys {
        let weight = population.subgroup_weight(key)?;
        let mixture = population.subgroup_mixture(key)?;
        let tv = tv_distance(&mixture, ai_model)?;
        let term = power - tv;
        literal += weight * term;
        clipped += weight * term.max(0.0);
    }
    Ok(InstitutionBound {
        literal: quantize(literal),
        clipped: quantize(clipped),
    })
}

/// The average-case bound evaluated over a grid of overlap parameters at a
/// fixed detector power, one value per `(overlap fraction, delta)` cell.
#[derive(Debug, Clone)]
pub struct BoundMapGrid {
    power: f64,
    delta_axis: Vec<f64>,
    pi_axis: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl BoundMapGrid {
    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn delta_axis(&self) -> &[f64] {
        &self.delta_axis
    }

    pub fn pi_axis(&self) -> &[f64] {
        &self.pi_axis
    }

    /// Bound value at (`pi_axis[pi_index]`, `delta_axis[delta_index]`).
    pub fn value(&self, pi_index: usize, delta_index: usize) -> f64 {
        self.values[pi_index][delta_index]
    }

    /// Index of the grid cell nearest to the requested coordinates.
    pub fn nearest_cell(&self, overlap_mass: f64, delta: f64) -> (usize, usize) {
        let nearest = |axis: &[f64], target: f64| {
            axis.iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    (*a - target)
                        .abs()
                        .partial_cmp(&(*b - target).abs())
                        .unwrap()
                })
                .map(|(i, _)| i)
                .unwrap()
        };
        (
            nearest(&self.pi_axis, overlap_mass),
            nearest(&self.delta_axis, delta),
        )
    }

    /// Writes `pi,delta,bound` rows in pi-major order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "pi,delta,bound")?;
        for (i, pi) in self.pi_axis.iter().enumerate() {
            for (j, delta) in self.delta_axis.iter().enumerate() {
                writeln!(out, "{},{},{}", pi, delta, self.values[i][j])?;
            }
        }
        Ok(())
    }
}

/// Evaluates [`avg_case_fpr_lower_bound`] at every cell of the supplied
/// axes.
pub fn bound_map(power: f64, delta_axis: &[f64], pi_axis: &[f64]) -> Result<BoundMapGrid> {
    check_unit_interval("power", power)?;
    for &d in delta_axis {
        check_unit_interval("delta", d)?;
    }
    for &p in pi_axis {
        check_unit_interval("overlap_mass", p)?;
    }
    let mut values = Vec::with_capacity(pi_axis.len());
    for &pi in pi_axis {
        let mut row = Vec::with_capacity(delta_axis.len());
        for &delta in delta_axis {
            row.push(avg_case_fpr_lower_bound(pi, power, delta)?);
        }
        values.push(row);
    }
    Ok(BoundMapGrid {
        power,
        delta_axis: delta_axis.to_vec(),
        pi_axis: pi_axis.to_vec(),
        values,
    })
}

/// Inclusive axis `start, start+step, ...` up to `end` (within half a step).
pub fn axis(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::OutOfRange {
            name: "step",
            value: step,
            low: f64::MIN_POSITIVE,
            high: f64::INFINITY,
        });
    }
    if !start.is_finite() || !end.is_finite() || end < start {
        return Err(Error::OutOfRange {
            name: "end",
            value: end,
            low: start,
            high: f64::INFINITY,
        });
    }
    let count = ((end - start) / step + 0.5).floor() as usize + 1;
    Ok((0..count).map(|i| quantize(start + i as f64 * step)).collect())
}

/// Overlay for a bound map: the `(overlap_mass(delta), delta)` curve traced
/// by one concrete population, evaluated on a delta axis. Non-decreasing in
/// delta by construction.
pub fn population_curve(
    population: &PopulationModel,
    ai_model: &Pmf,
    delta_axis: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let mut curve = Vec::with_capacity(delta_axis.len());
    for &delta in delta_axis {
        curve.push((delta, population.overlap_mass(ai_model, delta)?));
    }
    Ok(curve)
}

/// Convenience: the average-case floor a given detector faces against a
/// concrete population at radius `delta`, together with its ingredients.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ScenarioFloor {
    pub overlap_mass: f64,
    pub power: f64,
    pub delta: f64,
    pub floor: f64,
}

pub fn scenario_floor(
    population: &PopulationModel,
    ai_model: &Pmf,
    detector: &Detector,
    delta: f64,
) -> Result<ScenarioFloor> {
    let overlap_mass = population.overlap_mass(ai_model, delta)?;
    let power = detector.power(ai_model)?;
    let floor = avg_case_fpr_lower_bound(overlap_mass, power, delta)?;
    Ok(ScenarioFloor {
        overlap_mass,
        power,
        delta,
        floor,
    })
}
