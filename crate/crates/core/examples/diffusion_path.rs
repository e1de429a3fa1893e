//! Euler-Maruyama paths of the sweep diffusion. Compares the mean conditioned
//! fixation time over a few hundred paths with `(2/alpha)(ln 2 alpha + gamma_e)`.
//!
//!     cargo run --release --example diffusion_path -- 500 1.0

use hitchhike::analytics::expected_tstar;
use hitchhike::path::{decompose_path, simulate_diffusion_path};
use hitchhike::rng::replicate_rng;
use hitchhike::stats::Estimate;
use hitchhike::SweepParams;

fn main() -> hitchhike::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let alpha = args.first().map_or(500.0, |a| a.parse().expect("alpha"));
    let theta = args.get(1).map_or(1.0, |a| a.parse().expect("theta"));
    let params = SweepParams::new(alpha, theta)?;

    let mut tstar = Vec::new();
    for i in 0..400 {
        let path = simulate_diffusion_path(&params, 0.01 / alpha, &mut replicate_rng(11, 0, i))?;
        tstar.push(decompose_path(&path)?.tstar);
    }
    let est = Estimate::mean_of(&tstar);
    println!("mean T* over {} paths: {:.5} +- {:.5}", est.n, est.mean, est.std_error);
    println!("expansion:              {:.5}", expected_tstar(alpha)?);
    Ok(())
}
