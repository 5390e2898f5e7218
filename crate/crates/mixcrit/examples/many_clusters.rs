//! Scales the clustered construction: for K two-point clusters the
//! log-likelihood carries at least K distinct non-trivial critical points,
//! and every EM iterate stays inside the closed-form invariant boxes.
//!
//!     cargo run --release --example many_clusters -- 30

use mixcrit::em::EMOptions;
use mixcrit::hills::run_manyhills;

fn main() -> mixcrit::Result<()> {
    let k: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(30);
    let rows = run_manyhills(k, &EMOptions::default())?;

    let accepted = rows.iter().filter(|r| r.accepted).count();
    let violations: usize = rows.iter().map(|r| r.box_violations).sum();
    println!("K = {k}: {accepted}/{k} rows accepted, {violations} box violations");

    // distinctness: the accepted canonical points are pairwise separated
    let mut min_gap = f64::INFINITY;
    let pts: Vec<_> = rows.iter().filter_map(|r| r.point.as_ref()).collect();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            min_gap = min_gap.min(pts[i].params.max_norm_distance(&pts[j].params));
        }
    }
    println!("smallest pairwise max-norm separation: {min_gap:.4}");

    for r in rows.iter().take(3) {
        println!(
            "k={}: mu1 = {:.6} in ({}, {:.1}), loglik = {:.8}",
            r.k,
            r.mu1,
            r.k,
            r.k as f64 + 0.2,
            r.loglik
        );
    }
    Ok(())
}
