//! The exponent-spectrum probe: across all 2^N component assignments, the
//! quadratic exponent sums collapse to a single value exactly when the two
//! components coincide. Distinct components on generic data spread into many
//! values; the collapse is the algebraic fingerprint of trivial points.
//!
//!     cargo run --release --example exponent_spectrum

use mixcrit::mixture::{exponent_spectrum, MixtureParams, Sample};

fn main() -> mixcrit::Result<()> {
    let sample = Sample::new(vec![0.3, 1.7, 2.9])?;

    let distinct = MixtureParams::new(0.5, 0.0, 1.0, 1.0, 2.0)?;
    let (count, values) = exponent_spectrum(&distinct, &sample, 1e-9)?;
    println!("distinct components: {count} values");
    for v in &values {
        println!("  {v:.5}");
    }

    let coincident = MixtureParams::new(0.5, 1.6, 1.6, 1.2, 1.2)?;
    let (count, values) = exponent_spectrum(&coincident, &sample, 1e-9)?;
    println!("coincident components: {count} value(s): {values:?}");

    // alpha-rationality diagnostic on a certified census point
    let hills = mixcrit::hills::generate_sample(7)?;
    let report = mixcrit::census::census(&hills, &Default::default())?;
    for p in report.points.iter().take(3) {
        println!(
            "alpha = {:.7}: within 1e-6 of an m/N multiple? {}",
            p.params.alpha, p.alpha_near_multiple
        );
    }
    Ok(())
}
