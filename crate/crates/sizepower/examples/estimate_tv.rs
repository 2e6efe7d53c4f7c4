//! The classifier-accuracy route to TV: train the plug-in rule to separate
//! writer samples from AI samples, read off `2a - 1` as a TV lower bound,
//! and let the direction guard say what that does and does not establish.
//!
//! ```bash
//! cargo run -p sizepower --example estimate_tv
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sizepower::distributions::{Pmf, SampleSpace};
use sizepower::tvest::{bayes_accuracy, direction_guard, plugin_classifier_accuracy};
use sizepower::tv_distance;

fn main() -> sizepower::Result<()> {
    let space = SampleSpace::new(2)?;
    let writer = Pmf::new(space.clone(), vec![0.5, 0.5])?;
    let ai_model = Pmf::new(space, vec![0.9, 0.1])?;

    println!("true TV:        {}", tv_distance(&writer, &ai_model)?);
    println!("bayes accuracy: {}", bayes_accuracy(&writer, &ai_model)?);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [200usize, 800, 3200] {
        let samples_p: Vec<usize> = (0..n).map(|_| writer.sample(&mut rng)).collect();
        let samples_q: Vec<usize> = (0..n).map(|_| ai_model.sample(&mut rng)).collect();
        let estimate = plugin_classifier_accuracy(&samples_p, &samples_q, 0.5, 11)?;
        println!(
            "n {:>5}: accuracy {:.4}  tv lower bound {:.4}  (test size {})",
            n, estimate.accuracy_hat, estimate.tv_lower_bound, estimate.n_test
        );
        let advisory = direction_guard(&estimate, 0.80)?;
        println!("         assessment: {:?} - {}", advisory.assessment, advisory.note);
    }
    Ok(())
}
