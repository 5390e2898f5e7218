//! A single EM run step by step: responsibilities, weighted-moment updates,
//! the monotone log-likelihood trace, and the equal-variance variant on the
//! same data.
//!
//!     cargo run --release --example em_walkthrough

use mixcrit::em::{run_em, Constraint, EMOptions};
use mixcrit::mixture::{grad_loglik, MixtureParams, Sample};

fn main() -> mixcrit::Result<()> {
    let sample = Sample::new(vec![0.3, 0.5, 0.9, 4.1, 4.4, 4.8, 5.0])?;
    let start = MixtureParams::new(0.4, 0.0, 5.5, 1.0, 1.0)?;

    let trace = run_em(&start, &sample, &EMOptions::default())?;
    println!(
        "free fit: {:?} after {} iterations",
        trace.status,
        trace.iterations()
    );
    for (i, (p, ll)) in trace
        .iterates
        .iter()
        .zip(trace.logliks.iter())
        .enumerate()
        .take(6)
    {
        println!(
            "  it {i}: alpha={:.4} mu=({:.4}, {:.4}) sigma=({:.4}, {:.4}) loglik={ll:.8}",
            p.alpha, p.mu1, p.mu2, p.sigma1, p.sigma2
        );
    }
    let last = trace.final_params;
    let g = grad_loglik(&last, &sample)?;
    println!(
        "  limit loglik {:.10}, gradient max norm {:.2e}",
        trace.final_loglik(),
        g.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    );

    let opts = EMOptions {
        constraint: Constraint::EqualVariance,
        ..Default::default()
    };
    let pooled = run_em(&start, &sample, &opts)?;
    let p = pooled.final_params;
    println!(
        "equal-variance fit: {:?}, sigma = {:.6} (= {:.6}), loglik {:.10}",
        pooled.status,
        p.sigma1,
        p.sigma2,
        pooled.final_loglik()
    );
    Ok(())
}
