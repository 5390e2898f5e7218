//! Multi-start search for critical points of the log-likelihood on a given
//! sample: start generation, EM per start, canonical deduplication,
//! extended-precision polishing, and the alpha-rationality diagnostic.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::em::{run_em, EMOptions, EMStatus};
use crate::error::{Error, Result};
use crate::ingest::sample_digest;
use crate::mixture::{
    canonicalize, classify_with, grad_loglik, Classification, MixtureParams, Sample,
};
use crate::mp;

/// Default max-norm tolerance under which two canonical points merge.
pub const DEFAULT_DEDUP_TOL: f64 = 1e-4;
/// Default decimal digits for certification polishing.
pub const DEFAULT_POLISH_DIGITS: usize = 30;
/// Tolerance of the alpha-near-m/N diagnostic.
pub const ALPHA_MULTIPLE_TOL: f64 = 1e-6;
/// Polishing admits only starts whose gradient norm is already below this.
pub const POLISH_ADMISSION_NORM: f64 = 1e-3;

/// How starting points are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StartStrategy {
    /// Two distinct data points as means, local scatter as sigmas, alpha
    /// uniform in [0.1, 0.9].
    RandomPairs,
    /// Deterministic alpha levels crossed with sample-quantile mean pairs.
    GridAlphaMeans,
    /// One start per consecutive pair of the ordered sample: the pair's
    /// moments against the complement's moments, alpha = 2/N.
    ClusterSeeded,
    /// ClusterSeeded starts followed by `n` RandomPairs starts.
    Combined,
}

#[derive(Debug, Clone, Copy)]
pub struct CensusOptions {
    /// Number of random or grid starts (ClusterSeeded contributes its own).
    pub starts: usize,
    pub strategy: StartStrategy,
    pub seed: u64,
    pub em: EMOptions,
    pub dedup_tol: f64,
    pub classify_tol: f64,
    pub sigma_floor: f64,
    pub polish_digits: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            starts: 200,
            strategy: StartStrategy::Combined,
            seed: 0,
            em: EMOptions::default(),
            dedup_tol: DEFAULT_DEDUP_TOL,
            classify_tol: crate::mixture::DEFAULT_CLASSIFY_TOL,
            sigma_floor: crate::mixture::DEFAULT_SIGMA_FLOOR,
            polish_digits: DEFAULT_POLISH_DIGITS,
        }
    }
}

/// A certified stationary point.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    /// Canonicalized parameters, rounded to double precision. The
    /// certification ran on the extended-precision iterate they round from.
    pub params: MixtureParams,
    pub loglik: f64,
    /// Gradient max norm of the certified iterate at `polish_digits` digits.
    pub grad_norm: f64,
    pub classification: Classification,
    /// Whether alpha lies within 1e-6 of some m/N (the rationality
    /// diagnostic; a true value is merely a flag, not an algebraicity claim).
    pub alpha_near_multiple: bool,
    /// Decimal digits of working precision used for certification.
    pub polish_digits: usize,
}

impl Serialize for CriticalPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CriticalPoint", 10)?;
        s.serialize_field("alpha", &self.params.alpha)?;
        s.serialize_field("mu1", &self.params.mu1)?;
        s.serialize_field("mu2", &self.params.mu2)?;
        s.serialize_field("sigma1", &self.params.sigma1)?;
        s.serialize_field("sigma2", &self.params.sigma2)?;
        s.serialize_field("loglik", &self.loglik)?;
        s.serialize_field("grad_norm", &self.grad_norm)?;
        s.serialize_field("classification", &self.classification)?;
        s.serialize_field("alpha_near_multiple_of_1_over_N", &self.alpha_near_multiple)?;
        s.serialize_field("polish_digits", &self.polish_digits)?;
        s.end()
    }
}

/// Deduplicated census of the critical points found for one sample.
#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    /// SHA-256 of the ingested (sorted) sample values.
    pub sample_digest: String,
    pub seed: u64,
    pub starts_used: usize,
    /// Certified points, log-likelihood descending.
    pub points: Vec<CriticalPoint>,
    pub n_nontrivial: usize,
    pub n_trivial: usize,
    /// Runs that collapsed, emptied a component, or ended on the domain
    /// boundary; such outcomes are not critical points of the open domain.
    pub n_degenerate_runs: usize,
}

/// True when alpha lies within `tol` of an integer multiple of 1/N.
pub fn alpha_near_multiple_of_inv_n(alpha: f64, n: usize, tol: f64) -> bool {
    let m = (alpha * n as f64).round().clamp(0.0, n as f64);
    (alpha - m / n as f64).abs() < tol
}

fn local_scatter(sorted: &[f64], value: f64, floor: f64) -> f64 {
    let nearest = sorted
        .iter()
        .filter(|&&y| y != value)
        .map(|&y| (y - value).abs())
        .fold(f64::INFINITY, f64::min);
    if nearest.is_finite() {
        (0.5 * nearest).max(floor)
    } else {
        floor
    }
}

/// Deterministic starting points for the multi-start search.
///
/// `n` is the number of random or grid starts; ClusterSeeded ignores it and
/// returns one start per consecutive pair of the ordered sample.
pub fn generate_starts(
    sample: &Sample,
    strategy: StartStrategy,
    n: usize,
    seed: u64,
) -> Result<Vec<MixtureParams>> {
    if sample.len() < 2 {
        return Err(Error::InsufficientData {
            need: 2,
            got: sample.len(),
        });
    }
    if n == 0 && strategy != StartStrategy::ClusterSeeded {
        return Err(Error::InvalidParams("need at least one start".into()));
    }
    let pts = sample.points();
    let s = sample.std_pop();
    let scale = if s > 0.0 {
        s
    } else {
        sample.mean().abs().max(1.0)
    };
    let floor = 1e-3 * scale;

    let mut out = Vec::new();
    match strategy {
        StartStrategy::RandomPairs => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            while out.len() < n {
                let i = rng.random_range(0..pts.len());
                let mut j = rng.random_range(0..pts.len());
                while j == i {
                    j = rng.random_range(0..pts.len());
                }
                let (m1, m2) = (pts[i], pts[j]);
                let alpha = rng.random_range(0.1..=0.9);
                let s1 = local_scatter(pts, m1, floor);
                let s2 = local_scatter(pts, m2, floor);
                out.push(MixtureParams::new(alpha, m1, m2, s1, s2)?);
            }
        }
        StartStrategy::GridAlphaMeans => {
            let alphas = [0.2, 0.35, 0.5, 0.65, 0.8];
            let q = ((2 * n + 4) as f64 / alphas.len() as f64).sqrt().ceil() as usize;
            let q = q.clamp(2, pts.len().max(2));
            let quantile = |t: f64| {
                let pos = t * (pts.len() - 1) as f64;
                pts[pos.round() as usize]
            };
            let marks: Vec<f64> = (0..q)
                .map(|i| quantile(i as f64 / (q - 1) as f64))
                .collect();
            let sig = if s > 0.0 { s } else { floor };
            'grid: for &a in &alphas {
                for i in 0..marks.len() {
                    for j in i + 1..marks.len() {
                        out.push(MixtureParams::new(a, marks[i], marks[j], sig, sig)?);
                        if out.len() == n {
                            break 'grid;
                        }
                    }
                }
            }
            // if the quantile grid was too coarse, repeat it with jittered sigmas
            let mut widen = 2.0;
            while out.len() < n {
                let base = out[out.len() % alphas.len()];
                out.push(MixtureParams::new(
                    base.alpha,
                    base.mu1,
                    base.mu2,
                    base.sigma1 * widen,
                    base.sigma2 * widen,
                )?);
                widen += 1.0;
            }
        }
        StartStrategy::ClusterSeeded => {
            out.extend(cluster_seeded(sample, floor)?);
        }
        StartStrategy::Combined => {
            out.extend(cluster_seeded(sample, floor)?);
            out.extend(generate_starts(
                sample,
                StartStrategy::RandomPairs,
                n,
                seed,
            )?);
        }
    }
    Ok(out)
}

/// Pair-versus-rest moment starts, one per consecutive pair of the ordered
/// sample. On the many-hills sample these reproduce the closed-form starting
/// values of the construction.
fn cluster_seeded(sample: &Sample, floor: f64) -> Result<Vec<MixtureParams>> {
    let pts = sample.points();
    let n = pts.len();
    if n < 3 {
        return Err(Error::InsufficientData { need: 3, got: n });
    }
    let total: f64 = pts.iter().sum();
    let mut out = Vec::new();
    for k in 0..n / 2 {
        let (a, b) = (pts[2 * k], pts[2 * k + 1]);
        let mu1 = 0.5 * (a + b);
        let sigma1 = (0.5 * (b - a).abs()).max(floor);
        let rest_n = (n - 2) as f64;
        let mu2 = (total - a - b) / rest_n;
        let ss: f64 = pts
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 2 * k && *i != 2 * k + 1)
            .map(|(_, &x)| (x - mu2) * (x - mu2))
            .sum();
        let sigma2 = (ss / rest_n).sqrt().max(floor);
        out.push(MixtureParams::new(
            2.0 / n as f64,
            mu1,
            mu2,
            sigma1,
            sigma2,
        )?);
    }
    Ok(out)
}

/// Greedy clustering in descending log-likelihood order: points within `tol`
/// in max norm merge into the highest-likelihood member. Input order does not
/// affect the result.
pub fn dedup(points: &[CriticalPoint], tol: f64) -> Vec<CriticalPoint> {
    let mut sorted: Vec<&CriticalPoint> = points.iter().collect();
    sorted.sort_by(|a, b| {
        b.loglik.total_cmp(&a.loglik).then_with(|| {
            a.params
                .to_array()
                .iter()
                .map(|v| v.to_bits())
                .cmp(b.params.to_array().iter().map(|v| v.to_bits()))
        })
    });
    let mut reps: Vec<CriticalPoint> = Vec::new();
    for cand in sorted {
        if reps
            .iter()
            .all(|r| r.params.max_norm_distance(&cand.params) >= tol)
        {
            reps.push(cand.clone());
        }
    }
    reps
}

/// Polishes an approximate critical point by damped Newton iteration on the
/// gradient system at `digits` decimal digits of working precision.
///
/// Points on the trivial manifold are projected onto the exactly-known
/// critical point (alpha, mean, mean, std, std) instead of running Newton,
/// whose Jacobian is singular there.
pub fn polish(approx: &MixtureParams, sample: &Sample, digits: usize) -> Result<CriticalPoint> {
    polish_with(
        approx,
        sample,
        digits,
        crate::mixture::DEFAULT_CLASSIFY_TOL,
        crate::mixture::DEFAULT_SIGMA_FLOOR,
    )
}

fn polish_with(
    approx: &MixtureParams,
    sample: &Sample,
    digits: usize,
    classify_tol: f64,
    sigma_floor: f64,
) -> Result<CriticalPoint> {
    approx.validate()?;
    if digits < 17 {
        return Err(Error::InvalidParams(format!(
            "digits must be >= 17, got {digits}"
        )));
    }
    if approx.alpha <= 0.0 || approx.alpha >= 1.0 {
        return Err(Error::InvalidParams(format!(
            "polish needs an interior point, got alpha = {}",
            approx.alpha
        )));
    }
    let g = grad_loglik(approx, sample)?;
    let gnorm = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if gnorm >= POLISH_ADMISSION_NORM {
        return Err(Error::NotNearCritical {
            grad_norm: gnorm,
            limit: POLISH_ADMISSION_NORM,
        });
    }

    let kind = classify_with(approx, classify_tol, sigma_floor);
    let target = mp::pow10_f64(-((digits as i32) - 10));

    let (params, grad_norm, loglik) = if kind == Classification::Trivial {
        snap_to_trivial(approx, sample, digits)
    } else {
        // an input already at certification level is returned unchanged
        let (r0, ll0) = mp::residual_at(approx.to_array(), sample.points(), digits);
        if r0 <= target {
            (*approx, r0, ll0)
        } else {
            let out = mp::polish_newton(approx.to_array(), sample.points(), digits)?;
            (
                MixtureParams::from_array(out.params)?,
                out.grad_norm,
                out.loglik,
            )
        }
    };

    if grad_norm > target {
        return Err(Error::NoCertification {
            best_residual: grad_norm,
            steps: 0,
        });
    }
    let canonical = canonicalize(&params);
    Ok(CriticalPoint {
        params: canonical,
        loglik,
        grad_norm,
        classification: classify_with(&canonical, classify_tol, sigma_floor),
        alpha_near_multiple: alpha_near_multiple_of_inv_n(
            canonical.alpha,
            sample.len(),
            ALPHA_MULTIPLE_TOL,
        ),
        polish_digits: digits,
    })
}

/// Projects onto the exactly-critical trivial point, with moments taken at
/// working precision, and reports the residual there.
fn snap_to_trivial(
    approx: &MixtureParams,
    sample: &Sample,
    digits: usize,
) -> (MixtureParams, f64, f64) {
    let (point, grad_norm, loglik) =
        mp::trivial_point_residual(approx.alpha, sample.points(), digits);
    (
        MixtureParams {
            alpha: point[0],
            mu1: point[1],
            mu2: point[2],
            sigma1: point[3],
            sigma2: point[4],
        },
        grad_norm,
        loglik,
    )
}

/// Full census: starts, EM per start, classification, polishing of the
/// distinct interior limits, deduplication, and report assembly.
///
/// Boundary-classified and degenerate outcomes are counted in
/// `n_degenerate_runs` and excluded from the points list.
pub fn census(sample: &Sample, opts: &CensusOptions) -> Result<CensusReport> {
    if sample.len() < 3 {
        return Err(Error::InsufficientData {
            need: 3,
            got: sample.len(),
        });
    }
    let starts = generate_starts(sample, opts.strategy, opts.starts, opts.seed)?;
    let em_opts = EMOptions {
        sigma_floor: opts.sigma_floor,
        ..opts.em
    };

    let mut n_degenerate = 0usize;
    // (canonical limit, loglik) of runs worth polishing
    let mut limits: Vec<(MixtureParams, f64, Classification)> = Vec::new();
    for start in &starts {
        let trace = run_em(start, sample, &em_opts)?;
        if trace.status == EMStatus::Degenerate {
            n_degenerate += 1;
            continue;
        }
        let p = canonicalize(&trace.final_params);
        match classify_with(&p, opts.classify_tol, opts.sigma_floor) {
            Classification::Boundary | Classification::Degenerate => n_degenerate += 1,
            kind => limits.push((p, trace.final_loglik(), kind)),
        }
    }

    // polish one representative per dedup-tolerance cluster; EM limits of a
    // shared basin agree far below the tolerance, so the polished report is
    // the same as polishing every run
    limits.sort_by(|a, b| {
        b.1.total_cmp(&a.1).then_with(|| {
            a.0.to_array()
                .iter()
                .map(|v| v.to_bits())
                .cmp(b.0.to_array().iter().map(|v| v.to_bits()))
        })
    });
    let mut reps: Vec<(MixtureParams, Classification)> = Vec::new();
    for (p, _, kind) in &limits {
        if reps
            .iter()
            .all(|(r, _)| r.max_norm_distance(p) >= opts.dedup_tol)
        {
            reps.push((*p, *kind));
        }
    }

    let mut points: Vec<CriticalPoint> = Vec::new();
    for (p, _) in &reps {
        match polish_with(
            p,
            sample,
            opts.polish_digits,
            opts.classify_tol,
            opts.sigma_floor,
        ) {
            Ok(cp) => match cp.classification {
                Classification::Boundary | Classification::Degenerate => n_degenerate += 1,
                _ => points.push(cp),
            },
            Err(
                Error::NoCertification { .. }
                | Error::RegionExit { .. }
                | Error::NotNearCritical { .. },
            ) => n_degenerate += 1,
            Err(e) => return Err(e),
        }
    }

    let mut points = dedup(&points, opts.dedup_tol);
    points.sort_by(|a, b| {
        b.loglik.total_cmp(&a.loglik).then_with(|| {
            a.params
                .to_array()
                .iter()
                .map(|v| v.to_bits())
                .cmp(b.params.to_array().iter().map(|v| v.to_bits()))
        })
    });
    let n_nontrivial = points
        .iter()
        .filter(|p| p.classification == Classification::NonTrivial)
        .count();
    let n_trivial = points.len() - n_nontrivial;

    Ok(CensusReport {
        sample_digest: sample_digest(sample),
        seed: opts.seed,
        starts_used: starts.len(),
        points,
        n_nontrivial,
        n_trivial,
        n_degenerate_runs: n_degenerate,
    })
}
