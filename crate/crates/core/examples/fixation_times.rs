//! Fixation-time moments from simulated Wright-Fisher paths next to the
//! analytic expansions, via the experiment harness.
//!
//!     cargo run --release --example fixation_times

use hitchhike::harness::{run_experiment, ExperimentConfig, Mode, OutputFormat};

fn main() -> hitchhike::Result<()> {
    let config = ExperimentConfig {
        alpha: 500.0,
        pop_size: 100_000,
        replicates: 300,
        theta_grid: Some(vec![0.0, 0.1, 1.0]),
        ..ExperimentConfig::new(Mode::FixationTimes)
    };
    let table = run_experiment(&config)?;
    print!("{}", table.render(OutputFormat::Csv)?);
    Ok(())
}
