//! Traces a sample back through one sweep with the structured coalescent and
//! writes the event log as CSV.
//!
//!     cargo run --example backward_coalescent -- 5 10 > events.csv

use hitchhike::coalescent::{run_backward, BackwardOptions, EventKind};
use hitchhike::path::simulate_wf_path;
use hitchhike::rng::replicate_rng;
use hitchhike::SweepParams;

fn main() -> hitchhike::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = args.first().map_or(5, |a| a.parse().expect("sample size"));
    let rho = args.get(1).map_or(10.0, |a| a.parse().expect("rho"));

    let params = SweepParams::new(1000.0, 0.5)?.with_rho(rho)?.with_sample_size(n)?;
    let mut rng = replicate_rng(3, 0, 0);
    let path = simulate_wf_path(&params, &mut rng)?;
    let options = BackwardOptions { validate_events: true, ..Default::default() };
    let run = run_backward(&path, &params, &options, &mut rng)?;

    for kind in EventKind::ALL {
        eprintln!("{:>18}: {}", kind.label(), run.log.count(kind));
    }
    eprintln!("beta0 = {:.5}, ancestors at beta0: {}", run.beta0, run.state.partition());
    run.log.write_csv(std::io::stdout())
}
