//! Demonstrates that the five-parameter log-likelihood is never bounded
//! above: pin one mean to a data point and shrink its standard deviation;
//! the value grows like -log(sigma1) without limit.
//!
//!     cargo run --release --example unbounded_likelihood

use mixcrit::mixture::Sample;
use mixcrit::toy::unboundedness_trace;

fn main() -> mixcrit::Result<()> {
    let sample = Sample::new(vec![0.0, 2.0])?;
    let sigmas: Vec<f64> = (1..=12).map(|k| 10f64.powi(-k)).collect();
    let trace = unboundedness_trace(&sample, &sigmas)?;

    println!(
        "{:>10} {:>18} {:>22}",
        "sigma1", "loglik", "loglik + ln(sigma1)"
    );
    for (sigma, ll) in &trace {
        println!("{sigma:>10.0e} {ll:>18.10} {:>22.10}", ll + sigma.ln());
    }
    let slope = trace[5].1 - trace[2].1;
    println!(
        "loglik(1e-6) - loglik(1e-3) = {slope:.6} (3 ln 10 = {:.6})",
        3.0 * 10f64.ln()
    );
    Ok(())
}
