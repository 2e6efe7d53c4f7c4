//! The three trade-off bounds evaluated at interpretable operating points.
//!
//! ```bash
//! cargo run -p sizepower --example worked_bounds
//! ```

use sizepower::bounds;
use sizepower::distributions::{Pmf, PopulationModel, SampleSpace, StudentType};
use sizepower::tv_distance;

fn main() -> sizepower::Result<()> {
    // Average case: 10% of students within TV 0.05 of the AI model, and a
    // detector that catches 80% of AI submissions.
    let floor = bounds::avg_case_fpr_lower_bound(0.10, 0.80, 0.05)?;
    let accusations = bounds::expected_false_accusations(floor, 10_000)?;
    println!("average-case FPR floor:      {floor}");
    println!("expected false accusations:  {accusations} per 10,000 students");

    // Worst case: demanding at most 1% FPR for every student when the
    // nearest writer sits at TV 0.05 caps power at 6%.
    let cap = bounds::worst_case_power_cap(0.01, 0.05)?;
    println!("worst-case power cap:        {cap}");

    // Subgroup: a cohort whose pooled writing is close to the AI model.
    let space = SampleSpace::new(4)?;
    let students = vec![
        StudentType::new(
            "s1",
            "l2",
            "summary",
            Pmf::new(space.clone(), vec![0.52, 0.44, 0.04, 0.0])?,
        ),
        StudentType::new(
            "s2",
            "l2",
            "summary",
            Pmf::new(space.clone(), vec![0.46, 0.50, 0.0, 0.04])?,
        ),
        StudentType::new(
            "s3",
            "l1",
            "summary",
            Pmf::new(space.clone(), vec![0.05, 0.05, 0.45, 0.45])?,
        ),
    ];
    let population = PopulationModel::new(students, vec![0.2, 0.2, 0.6])?;
    let ai_model = Pmf::new(space, vec![0.5, 0.5, 0.0, 0.0])?;

    for subgroup in ["l2", "l1"] {
        let mix = population.subgroup_mixture(subgroup)?;
        let tv = tv_distance(&mix, &ai_model)?;
        let floor = bounds::subgroup_fpr_lower_bound(0.80, tv)?;
        println!("subgroup {subgroup}: mixture TV {tv:.4} -> FPR floor {floor:.4} at power 0.80");
    }

    let institution = bounds::institution_fpr_lower_bound(&population, &ai_model, 0.80)?;
    println!(
        "institution-wide floor:      literal {}, clipped {}",
        institution.literal, institution.clipped
    );

    let nearest = bounds::delta_star(&population, &ai_model)?;
    println!(
        "nearest-writer TV {:.4} -> power cap {} at 1% per-student FPR",
        nearest,
        bounds::worst_case_power_cap(0.01, nearest)?
    );
    Ok(())
}
