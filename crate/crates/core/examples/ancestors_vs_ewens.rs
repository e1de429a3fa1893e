//! Without recombination, the number of distinct ancestors of a sample at
//! the start of the sweep against the Ewens block-count distribution.

use hitchhike::coalescent::BackwardOptions;
use hitchhike::harness::{run_cell, PathModel};
use hitchhike::SweepParams;

/// Ewens probability of `k` blocks in a sample of `n`: |s(n,k)| theta^k / theta^(n).
fn ewens_blocks(n: usize, theta: f64) -> Vec<f64> {
    // unsigned Stirling numbers of the first kind
    let mut s = vec![vec![0.0; n + 1]; n + 1];
    s[0][0] = 1.0;
    for m in 1..=n {
        for k in 1..=m {
            s[m][k] = s[m - 1][k - 1] + (m - 1) as f64 * s[m - 1][k];
        }
    }
    let rising: f64 = (0..n).map(|i| theta + i as f64).product();
    (1..=n).map(|k| s[n][k] * theta.powi(k as i32) / rising).collect()
}

fn main() -> hitchhike::Result<()> {
    let (n, theta, reps) = (4, 0.5, 1500);
    let params = SweepParams::new(1000.0, theta)?.with_pop_size(1_000_000)?.with_sample_size(n)?;
    let run = run_cell(&params, PathModel::Wf, 0, reps, Some(&BackwardOptions::default()));
    run.check()?;
    let mut counts = vec![0usize; n];
    for s in &run.summaries {
        counts[s.ancestors.expect("genealogy was traced") - 1] += 1;
    }
    println!("blocks  coalescent  ewens");
    for (k, p) in ewens_blocks(n, theta).into_iter().enumerate() {
        println!("{:>6}  {:>10.4}  {p:.4}", k + 1, counts[k] as f64 / run.summaries.len() as f64);
    }
    Ok(())
}
