//! Formula columns for the heterozygosity comparison at alpha = 1000: the
//! Yule expansion under both level-sum conventions, the exact pair sum and
//! the star-like approximation.

use hitchhike::analytics::{
    gamma_from_rho, het_ratio_star, het_ratio_yule_with, pair_partition_prob_exact_with, LevelSum, LevelWeights,
    RhoScaling,
};

fn main() -> hitchhike::Result<()> {
    let alpha = 1000.0;
    println!("theta  rho   yule(excl)  exact(excl)  yule(incl)  star(duration)  star(log)");
    for theta in [0.0, 0.1, 1.0] {
        for rho in [2.0, 5.0, 10.0, 50.0] {
            let gamma = gamma_from_rho(alpha, rho, RhoScaling::LogAlpha);
            let excl = LevelWeights::for_sweep(alpha, theta, gamma, LevelSum::Exclusive)?;
            let incl = LevelWeights::for_sweep(alpha, theta, gamma, LevelSum::Inclusive)?;
            let star_long = het_ratio_star(theta, gamma_from_rho(alpha, rho, RhoScaling::SweepDuration))?;
            println!(
                "{theta:<5}  {rho:<4}  {:>10.4}  {:>11.4}  {:>10.4}  {:>14.4}  {:>9.4}",
                het_ratio_yule_with(&excl)?.value,
                1.0 - pair_partition_prob_exact_with(&excl)?,
                het_ratio_yule_with(&incl)?.value,
                star_long,
                het_ratio_star(theta, gamma)?,
            );
        }
    }
    Ok(())
}
