//! The variational inequality in action: no detector separates two
//! distributions by more than their TV distance, and the indicator of the
//! set where the AI model outweighs the writer attains it exactly.
//!
//! ```bash
//! cargo run -p sizepower --example optimal_detector
//! ```

use sizepower::distributions::{Pmf, SampleSpace};
use sizepower::verify::tightness_search;
use sizepower::{optimal_detector, tv_distance};

fn main() -> sizepower::Result<()> {
    let space = SampleSpace::new(2)?;
    let student = Pmf::new(space.clone(), vec![0.5, 0.5])?;
    let ai_model = Pmf::new(space, vec![0.9, 0.1])?;

    let tv = tv_distance(&student, &ai_model)?;
    println!("TV(student, ai) = {tv}");

    let phi = optimal_detector(&student, &ai_model)?;
    println!("optimal accept vector: {:?}", phi.accept());
    println!(
        "power {} - fpr {} = {}",
        phi.power(&ai_model)?,
        phi.fpr(&student)?,
        phi.power(&ai_model)? - phi.fpr(&student)?
    );

    // 2000 random detectors probe the inequality; none beats the optimum
    let search = tightness_search(&student, &ai_model, 2000, 7)?;
    println!(
        "max gap over {} random detectors + optimum: {} (tv {}, any random above tv: {})",
        search.n_random, search.max_gap, search.tv, search.random_exceeded_tv
    );
    Ok(())
}
