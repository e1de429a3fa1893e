//! Green functions of the sweep diffusion on a grid of frequencies, the
//! reversed one started from 1, and the mean times obtained by integrating
//! them.
//!
//!     cargo run --example green_functions -- 200 0.5

use hitchhike::analytics::{expected_t, expected_tstar, GreenFnContext, GreenKind, DEFAULT_SERIES_TERMS};

fn main() -> hitchhike::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let alpha = args.first().map_or(200.0, |a| a.parse().expect("alpha"));
    let theta = args.get(1).map_or(0.5, |a| a.parse().expect("theta"));
    let ctx = GreenFnContext::new(alpha, theta)?;

    println!("x,t,tstar,tstarstar");
    for k in 1..20 {
        let x = k as f64 / 20.0;
        println!(
            "{x},{},{},{}",
            ctx.density(GreenKind::T, x, 0.0)?,
            ctx.density(GreenKind::TStar, x, 0.0)?,
            ctx.density(GreenKind::TStarStar, x, 1.0)?
        );
    }
    eprintln!("int t*  = {:.8}   expansion {:.8}", ctx.integrated_tstar()?, expected_tstar(alpha)?);
    if theta > 0.0 {
        eprintln!(
            "int t   = {:.8}   expansion {:.8}",
            ctx.integrated_t()?,
            expected_t(alpha, theta, DEFAULT_SERIES_TERMS)?
        );
    }
    Ok(())
}
