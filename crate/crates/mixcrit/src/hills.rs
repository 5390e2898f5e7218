//! The many-hills construction, end to end: the clustered sample, the
//! closed-form starting values, the per-iteration invariant boxes, and the
//! K-row experiment whose K=7 instance is the reference table of seven
//! critical points.

use serde::Serialize;

use crate::census::{polish, CriticalPoint};
use crate::em::{run_em, EMOptions, EMStatus};
use crate::error::{Error, Result};
use crate::mixture::{Classification, MixtureParams, Sample};

/// Absolute slack for box-membership checks. Several starting values sit
/// exactly on a box boundary in exact arithmetic, and double rounding moves
/// them out by up to ~2e-15; genuine excursions are larger than 1e-2.
pub const BOX_SLACK: f64 = 1e-9;

/// Per-parameter inequality boxes that every EM iterate of row `k` must
/// satisfy. All intervals are inclusive.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoxBounds {
    pub k_clusters: usize,
    pub k: usize,
    pub alpha: (f64, f64),
    pub mu1: (f64, f64),
    pub sigma1: (f64, f64),
    pub mu2: (f64, f64),
    pub sigma2: (f64, f64),
    /// Relaxed sigma2 interval; a valid superset of `sigma2` for K > 3.
    pub sigma2_simple: (f64, f64),
}

impl BoxBounds {
    /// Names of the coordinates of `params` that fall outside the box,
    /// allowing `slack` beyond each endpoint.
    pub fn violations(&self, params: &MixtureParams, slack: f64) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut check = |name, (lo, hi): (f64, f64), v: f64| {
            if v < lo - slack || v > hi + slack {
                out.push(name);
            }
        };
        check("alpha", self.alpha, params.alpha);
        check("mu1", self.mu1, params.mu1);
        check("sigma1", self.sigma1, params.sigma1);
        check("mu2", self.mu2, params.mu2);
        check("sigma2", self.sigma2, params.sigma2);
        out
    }

    pub fn contains(&self, params: &MixtureParams, slack: f64) -> bool {
        self.violations(params, slack).is_empty()
    }
}

/// One row of the experiment: the k-th cluster's critical point.
#[derive(Debug, Clone, Serialize)]
pub struct HillsRow {
    pub k: usize,
    /// Parameters in the experiment's orientation: component 1 tracks the
    /// k-th pair (this is the orientation the reference table prints).
    pub alpha: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub loglik: f64,
    /// Certified (canonical) form of the same point.
    pub point: Option<CriticalPoint>,
    /// EM iterates that left the invariant box.
    pub box_violations: usize,
    pub em_iterations: usize,
    pub accepted: bool,
    /// Present when the row failed, naming the reason.
    pub failure: Option<String>,
}

/// The ordered sample (1, 1.2, 2, 2.2, ..., K, K+0.2) of K two-point clusters.
pub fn generate_sample(k_clusters: usize) -> Result<Sample> {
    if k_clusters < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least 2 clusters, got {k_clusters}"
        )));
    }
    let mut pts = Vec::with_capacity(2 * k_clusters);
    for k in 1..=k_clusters {
        pts.push(k as f64);
        pts.push(k as f64 + 0.2);
    }
    Sample::new(pts)
}

/// Closed-form starting values steering EM toward the k-th cluster's
/// critical point: the pair is suggested as component 1, the complement as
/// component 2.
pub fn starting_point(k_clusters: usize, k: usize) -> Result<MixtureParams> {
    if k_clusters < 2 {
        return Err(Error::InvalidParams(format!(
            "starting point needs K >= 2, got {k_clusters}"
        )));
    }
    if k < 1 || k > k_clusters {
        return Err(Error::InvalidParams(format!(
            "cluster index {k} outside 1..={k_clusters}"
        )));
    }
    let kf = k_clusters as f64;
    let kk = k as f64;
    let alpha = 1.0 / kf;
    let mu1 = kk + 0.1;
    let mu2 = (kf * kf + 1.2 * kf - 2.0 * kk - 0.2) / (2.0 * (kf - 1.0));
    // quartic under the root, largest terms first to limit cancellation
    let rad = kf.powi(4) / 12.0 - kf.powi(3) / 3.0 + (kk - 43.0 / 75.0) * kf * kf
        - (kk * kk - kk + 14.0 / 75.0) * kf
        + 0.01;
    let sigma2 = rad.sqrt() / (kf - 1.0);
    MixtureParams::new(alpha, mu1, mu2, 0.1, sigma2)
}

/// The invariant box of row `k`.
pub fn box_bounds(k_clusters: usize, k: usize) -> Result<BoxBounds> {
    if k_clusters < 2 || k < 1 || k > k_clusters {
        return Err(Error::InvalidParams(format!(
            "box needs K >= 2 and 1 <= k <= K, got K={k_clusters}, k={k}"
        )));
    }
    let kf = k_clusters as f64;
    let kk = k as f64;
    Ok(BoxBounds {
        k_clusters,
        k,
        alpha: (1.0 / (4.0 * kf), 1.0 / kf),
        mu1: (kk + 0.09, kk + 0.11),
        sigma1: (0.099, 0.105),
        mu2: (kf / 2.0 + 0.1, kf / 2.0 + 1.1),
        sigma2: (
            (kf * kf / 12.0 - kf / 6.0 + 0.01).sqrt(),
            (kf * kf / 12.0 + kf / 12.0 + 0.01).sqrt(),
        ),
        sigma2_simple: (
            kf / 12f64.sqrt() - 3f64.sqrt() / 5.0,
            kf / 12f64.sqrt() + 3f64.sqrt() / 12.0,
        ),
    })
}

/// Runs the experiment for every k in 1..=K: EM from the closed-form start,
/// a box audit of every iterate (EM is never constrained to the box; leaving
/// it fails the row), polishing, and the window check k < mu1 < k + 0.2.
///
/// A failed row is reported with its reason; the experiment continues.
pub fn run_manyhills(k_clusters: usize, opts: &EMOptions) -> Result<Vec<HillsRow>> {
    let sample = generate_sample(k_clusters)?;
    let mut rows = Vec::with_capacity(k_clusters);
    for k in 1..=k_clusters {
        rows.push(run_row(k_clusters, k, &sample, opts));
    }
    Ok(rows)
}

fn run_row(k_clusters: usize, k: usize, sample: &Sample, opts: &EMOptions) -> HillsRow {
    let start = starting_point(k_clusters, k).expect("validated k");
    let bounds = box_bounds(k_clusters, k).expect("validated k");

    let trace = match run_em(&start, sample, opts) {
        Ok(t) => t,
        Err(e) => {
            return failed_row(k, &start, 0, 0, format!("EM error: {e}"));
        }
    };
    let box_violations = trace
        .iterates
        .iter()
        .filter(|p| !bounds.contains(p, BOX_SLACK))
        .count();
    let final_params = trace.final_params;
    let em_iterations = trace.iterations();

    let mut row = HillsRow {
        k,
        alpha: final_params.alpha,
        mu1: final_params.mu1,
        mu2: final_params.mu2,
        sigma1: final_params.sigma1,
        sigma2: final_params.sigma2,
        loglik: trace.final_loglik(),
        point: None,
        box_violations,
        em_iterations,
        accepted: false,
        failure: None,
    };

    if trace.status == EMStatus::Degenerate {
        row.failure = Some("EM degenerated".into());
        return row;
    }
    let point = match polish(&final_params, sample, crate::census::DEFAULT_POLISH_DIGITS) {
        Ok(p) => p,
        Err(e) => {
            row.failure = Some(format!("polish failed: {e}"));
            return row;
        }
    };
    // report in the experiment's orientation: component 1 is the pair cluster
    let oriented = if (point.params.mu1 - final_params.mu1).abs()
        <= (point.params.mu2 - final_params.mu1).abs()
    {
        point.params
    } else {
        point.params.swapped()
    };
    row.alpha = oriented.alpha;
    row.mu1 = oriented.mu1;
    row.mu2 = oriented.mu2;
    row.sigma1 = oriented.sigma1;
    row.sigma2 = oriented.sigma2;
    row.loglik = point.loglik;

    let in_window = k as f64 + 0.0 < row.mu1 && row.mu1 < k as f64 + 0.2;
    let nontrivial = point.classification == Classification::NonTrivial;
    row.point = Some(point);

    if box_violations > 0 {
        row.failure = Some(format!("{box_violations} iterates left the invariant box"));
    } else if !in_window {
        row.failure = Some(format!(
            "mu1 = {} outside ({}, {})",
            row.mu1,
            k,
            k as f64 + 0.2
        ));
    } else if !nontrivial {
        row.failure = Some("limit is not a non-trivial critical point".into());
    } else {
        row.accepted = true;
    }
    row
}

fn failed_row(
    k: usize,
    start: &MixtureParams,
    violations: usize,
    iters: usize,
    why: String,
) -> HillsRow {
    HillsRow {
        k,
        alpha: start.alpha,
        mu1: start.mu1,
        mu2: start.mu2,
        sigma1: start.sigma1,
        sigma2: start.sigma2,
        loglik: f64::NEG_INFINITY,
        point: None,
        box_violations: violations,
        em_iterations: iters,
        accepted: false,
        failure: Some(why),
    }
}

/// CSV of the experiment with exactly the reference table's columns.
pub fn rows_to_csv(rows: &[HillsRow]) -> String {
    let mut out = String::from("k,alpha,mu1,mu2,sigma1,sigma2,loglik\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k, r.alpha, r.mu1, r.mu2, r.sigma1, r.sigma2, r.loglik
        ));
    }
    out
}
