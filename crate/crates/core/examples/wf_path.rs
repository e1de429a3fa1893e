//! One Wright-Fisher sweep path: prints the time decomposition and writes a
//! thinned `time,frequency` trace to stdout.
//!
//!     cargo run --example wf_path -- 1000 0.5 7

use hitchhike::path::{decompose_path, simulate_wf_path};
use hitchhike::rng::replicate_rng;
use hitchhike::SweepParams;

fn main() -> hitchhike::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let alpha = args.first().map_or(1000.0, |a| a.parse().expect("alpha"));
    let theta = args.get(1).map_or(0.5, |a| a.parse().expect("theta"));
    let seed = args.get(2).map_or(7, |a| a.parse().expect("seed"));

    let params = SweepParams::new(alpha, theta)?;
    let path = simulate_wf_path(&params, &mut replicate_rng(seed, 0, 0))?;
    let times = decompose_path(&path)?;
    eprintln!(
        "N = {}  generations = {}  T0 = {:.5}  T* = {:.5}  T = {:.5}",
        params.pop_size(),
        path.times().len() - 1,
        times.t0,
        times.tstar,
        times.t
    );

    let every = (path.times().len() / 200).max(1);
    println!("time,frequency");
    for (i, (t, x)) in path.times().iter().zip(path.values()).enumerate() {
        if i % every == 0 || i == path.fixation_index() {
            println!("{t},{x}");
        }
    }
    Ok(())
}
