//! Writes the average-case bound over the default (pi, delta) grid as CSV,
//! plus the overlap curve a concrete population traces through that space.
//!
//! ```bash
//! cargo run -p sizepower --example bound_map > bound_map.csv
//! ```

use sizepower::bounds;
use sizepower::Scenario;

fn main() -> sizepower::Result<()> {
    let pi_axis = bounds::axis(0.0, 0.5, 0.005)?;
    let delta_axis = bounds::axis(0.0, 0.4, 0.005)?;
    let grid = bounds::bound_map(0.80, &delta_axis, &pi_axis)?;
    grid.write_csv(std::io::stdout())?;

    // a population does not roam the grid freely: its overlap mass is a
    // non-decreasing function of delta, printed here as a curve overlay
    let scenario = Scenario::from_json_str(include_str!("data/scenario_institution.json"))?;
    let curve =
        bounds::population_curve(&scenario.population, &scenario.ai_model, &delta_axis)?;
    eprintln!("# population curve (delta -> overlap mass) for the example scenario:");
    for (delta, mass) in curve.iter().step_by(10) {
        eprintln!("#   {delta:.3} -> {mass:.2}");
    }
    Ok(())
}
