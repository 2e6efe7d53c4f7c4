//! Monte Carlo of an institution-scale deployment: 10,000 students drawn
//! from the example scenario, one submission each, scored by the scenario's
//! power-0.80 detector. The observed accusation rate is compared against
//! the average-case floor for the same population and radius.
//!
//! ```bash
//! cargo run -p sizepower --example simulate_institution
//! ```

use sizepower::bounds;
use sizepower::verify::simulate_institution;
use sizepower::Scenario;

fn main() -> sizepower::Result<()> {
    let scenario = Scenario::from_json_str(include_str!("data/scenario_institution.json"))?;
    let detector = scenario.detector(Some("power80"))?;

    let outcome = simulate_institution(
        &scenario.population,
        &scenario.ai_model,
        &detector.detector,
        10_000,
        1,
        42,
    )?;
    let floor = bounds::scenario_floor(
        &scenario.population,
        &scenario.ai_model,
        &detector.detector,
        0.05,
    )?;

    println!("students: {}  documents each: {}", outcome.n_students, outcome.n_docs_per_student);
    println!("detector power:              {}", outcome.power);
    println!("exact average FPR:           {}", outcome.exact_avg_fpr);
    println!("observed average FPR:        {}", outcome.observed_avg_fpr);
    println!("false accusations observed:  {}", outcome.accusations);
    println!(
        "average-case floor:          {} (overlap {} at delta {})",
        floor.floor, floor.overlap_mass, floor.delta
    );
    println!(
        "floor in head count:         {} accusations",
        bounds::expected_false_accusations(floor.floor, 10_000)?
    );
    Ok(())
}
