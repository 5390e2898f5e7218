//! Solves the constrained two-parameter model on the data {0, 2} to 30
//! decimal digits: the maximizing (alpha, mu) of the toy likelihood, the
//! residual of the transcendental critical equation, and the interior-maximum
//! threshold in x.
//!
//!     cargo run --release --example toy_constants

use mixcrit::toy::{interior_threshold, solve_mu};

fn main() -> mixcrit::Result<()> {
    let result = solve_mu(2.0, 30)?;
    println!("x = {}", result.x);
    println!("mu_hat    = {}", result.mu_hat);
    println!("alpha_hat = {}", result.alpha_hat);
    println!("residual  = {}", result.residual);
    println!(
        "loglik at maximum (additive constant omitted) = {}",
        result.loglik_at_max
    );

    // precision scaling: the 50-digit solve agrees with the 30-digit one
    let finer = solve_mu(2.0, 50)?;
    println!("mu_hat at 50 digits = {}", finer.mu_hat);

    let threshold = interior_threshold(1e-4)?;
    println!("interior-maximum threshold x* = {threshold:.5}");
    Ok(())
}
