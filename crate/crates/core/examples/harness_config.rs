//! Runs an experiment described by a TOML document and prints the result as
//! JSON; with a path argument, reads the document from that file instead.
//!
//!     cargo run --release --example harness_config -- run.toml

use hitchhike::harness::{run_experiment, ExperimentConfig, OutputFormat};

const DEFAULT: &str = r#"
mode = "yule-vs-coalescent"
alpha = 300.0
theta_grid = [0.1, 1.0]
rho_grid = [5.0]
replicates = 500
seed = 42
level_sum = "exclusive"
"#;

fn main() -> hitchhike::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::from_toml_file(path.as_ref())?,
        None => ExperimentConfig::from_toml_str(DEFAULT)?,
    };
    let table = run_experiment(&config)?;
    println!("{}", table.render(OutputFormat::Json)?);
    Ok(())
}
