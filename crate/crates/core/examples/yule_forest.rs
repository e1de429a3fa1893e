//! Grows the Yule forest of a sweep, samples and marks a few leaves, prints
//! the sampled subtree and the genealogy after composing with Kingman.
//!
//!     cargo run --example yule_forest -- 6

use hitchhike::analytics::{gamma_from_rho, LevelSum, RhoScaling};
use hitchhike::rng::replicate_rng;
use hitchhike::yule::{compose_with_kingman, sample_and_mark, YuleSampler};

fn main() -> hitchhike::Result<()> {
    let n = std::env::args().nth(1).map_or(6, |a| a.parse().expect("sample size"));
    let (alpha, theta) = (50.0, 0.5);
    let gamma = gamma_from_rho(alpha, 20.0, RhoScaling::LogAlpha);
    let sampler = YuleSampler::new(alpha, theta, gamma, LevelSum::Exclusive)?;
    let mut rng = replicate_rng(5, 0, 0);

    let forest = sampler.grow(&mut rng)?;
    let sample = sample_and_mark(&forest, n, sampler.weights(), &mut rng)?;
    println!("{} lines in {} trees", forest.final_level(), forest.tree_count());
    println!("by tree:            {}", sample.partition_tilde);
    println!("by unmarked branch: {}", sample.partition);
    println!();
    forest.write_text(Some(&sample), std::io::stdout())?;
    println!();
    for step in compose_with_kingman(&sample, &mut rng) {
        println!("{:>8.4}  {}", step.time, step.partition);
    }
    Ok(())
}
