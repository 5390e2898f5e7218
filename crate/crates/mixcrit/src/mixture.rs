//! Two-component univariate Gaussian mixture: density, log-likelihood,
//! gradient, responsibilities, label canonicalization, classification, and
//! the exponent-spectrum probe.
//!
//! All evaluation goes through log space (log-sum-exp of the two component
//! log-densities), so well-separated clusters with exponents near -70 do not
//! underflow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance separating EM fixed-point noise from genuine coincidence
/// of components.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-6;
/// Default standard-deviation floor below which a point counts as degenerate.
pub const DEFAULT_SIGMA_FLOOR: f64 = 1e-8;
/// Tie threshold of the canonical ordering chain (mu, then sigma, then alpha).
pub const CANONICAL_TIE_TOL: f64 = 1e-12;
/// Enumeration guard for [`exponent_spectrum`].
pub const SPECTRUM_MAX_N: usize = 24;

/// The five-parameter point (alpha, mu1, mu2, sigma1, sigma2) of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    /// Mixture weight of the first component, in [0, 1].
    pub alpha: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// Standard deviation of the first component, > 0.
    pub sigma1: f64,
    pub sigma2: f64,
}

impl MixtureParams {
    pub fn new(alpha: f64, mu1: f64, mu2: f64, sigma1: f64, sigma2: f64) -> Result<Self> {
        let p = MixtureParams {
            alpha,
            mu1,
            mu2,
            sigma1,
            sigma2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = self.to_array();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "non-finite coordinate in {vals:?}"
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParams(format!(
                "alpha = {} outside [0,1]",
                self.alpha
            )));
        }
        if self.sigma1 <= 0.0 || self.sigma2 <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "sigma must be positive, got ({}, {})",
                self.sigma1, self.sigma2
            )));
        }
        Ok(())
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.alpha, self.mu1, self.mu2, self.sigma1, self.sigma2]
    }

    pub fn from_array(a: [f64; 5]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    /// The label-swapped image (1-alpha, mu2, mu1, sigma2, sigma1), which
    /// defines the same density.
    pub fn swapped(&self) -> Self {
        MixtureParams {
            alpha: 1.0 - self.alpha,
            mu1: self.mu2,
            mu2: self.mu1,
            sigma1: self.sigma2,
            sigma2: self.sigma1,
        }
    }

    /// Max-norm distance between parameter vectors.
    pub fn max_norm_distance(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// An ordered sample of real observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    points: Vec<f64>,
}

impl Sample {
    /// Ingests a sample; rejects non-finite values and empty input, and stores
    /// the points in nondecreasing order.
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSample("empty sample".into()));
        }
        if let Some(bad) = points.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample value {bad}")));
        }
        points.sort_by(f64::total_cmp);
        Ok(Sample { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.points.iter().sum::<f64>() / self.len() as f64
    }

    /// Empirical standard deviation with the 1/N convention.
    pub fn std_pop(&self) -> f64 {
        let m = self.mean();
        (self.points.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / self.len() as f64).sqrt()
    }
}

/// Per-point membership probabilities of the first component.
#[derive(Debug, Clone)]
pub struct Responsibilities {
    /// gamma[i] = P(point i belongs to component 1), in [0, 1].
    pub gamma: Vec<f64>,
    /// Expected size of component 1 (sum of gamma).
    pub n1: f64,
    /// Expected size of component 2 (N - n1).
    pub n2: f64,
}

/// Nature of a parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// Components coincide: the mixture is a single Gaussian.
    Trivial,
    /// Honest mixture: interior weight and distinct components.
    NonTrivial,
    /// Mixture weight at (or within tolerance of) 0 or 1.
    Boundary,
    /// A standard deviation at or below the degeneracy floor.
    Degenerate,
}

fn log_sum_exp2(t1: f64, t2: f64) -> f64 {
    let m = t1.max(t2);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + ((t1 - m).exp() + (t2 - m).exp()).ln()
}

/// Log-densities of the two weighted component terms at `x`:
/// `log(alpha) - log(sigma1) - (x-mu1)^2/(2 sigma1^2)` and its mirror.
/// The common `-log sqrt(2 pi)` is not included.
fn weighted_component_logs(p: &MixtureParams, x: f64) -> (f64, f64) {
    let z1 = (x - p.mu1) / p.sigma1;
    let z2 = (x - p.mu2) / p.sigma2;
    let t1 = p.alpha.ln() - p.sigma1.ln() - 0.5 * z1 * z1;
    let t2 = (1.0 - p.alpha).ln() - p.sigma2.ln() - 0.5 * z2 * z2;
    (t1, t2)
}

/// Log of the mixture density at `x`; `-inf` when both weighted terms
/// underflow entirely.
pub fn log_density(p: &MixtureParams, x: f64) -> f64 {
    let (t1, t2) = weighted_component_logs(p, x);
    log_sum_exp2(t1, t2) - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Mixture density at `x`.
pub fn density(p: &MixtureParams, x: f64) -> Result<f64> {
    p.validate()?;
    if !x.is_finite() {
        return Err(Error::NonFinite(format!("evaluation point x = {x}")));
    }
    let d = log_density(p, x).exp();
    if d == 0.0 {
        return Err(Error::DegenerateEval { index: 0 });
    }
    Ok(d)
}

/// Log-likelihood: sum of log densities over the sample.
pub fn loglik(p: &MixtureParams, sample: &Sample) -> Result<f64> {
    p.validate()?;
    let mut total = 0.0;
    for (i, &x) in sample.points().iter().enumerate() {
        let ld = log_density(p, x);
        if ld == f64::NEG_INFINITY {
            return Err(Error::DegenerateEval { index: i });
        }
        total += ld;
    }
    Ok(total)
}

/// Conditional membership probabilities of component 1 at every data point.
pub fn responsibilities(p: &MixtureParams, sample: &Sample) -> Result<Responsibilities> {
    p.validate()?;
    let n = sample.len();
    let mut gamma = Vec::with_capacity(n);
    for (i, &x) in sample.points().iter().enumerate() {
        let (t1, t2) = weighted_component_logs(p, x);
        let lse = log_sum_exp2(t1, t2);
        if lse == f64::NEG_INFINITY {
            return Err(Error::DegenerateEval { index: i });
        }
        gamma.push((t1 - lse).exp());
    }
    let n1: f64 = gamma.iter().sum();
    Ok(Responsibilities {
        n1,
        n2: n as f64 - n1,
        gamma,
    })
}

/// Gradient of the log-likelihood in the order
/// (d/d alpha, d/d mu1, d/d mu2, d/d sigma1, d/d sigma2).
///
/// Only defined at interior mixture weights; alpha in {0, 1} yields
/// [`Error::BoundaryGradient`].
pub fn grad_loglik(p: &MixtureParams, sample: &Sample) -> Result<[f64; 5]> {
    p.validate()?;
    if p.alpha == 0.0 || p.alpha == 1.0 {
        return Err(Error::BoundaryGradient { alpha: p.alpha });
    }
    let resp = responsibilities(p, sample)?;
    let g_alpha = resp.n1 / p.alpha - resp.n2 / (1.0 - p.alpha);
    let (mut g_mu1, mut g_mu2, mut g_s1, mut g_s2) = (0.0, 0.0, 0.0, 0.0);
    for (&x, &g) in sample.points().iter().zip(resp.gamma.iter()) {
        let d1 = x - p.mu1;
        let d2 = x - p.mu2;
        g_mu1 += g * d1 / (p.sigma1 * p.sigma1);
        g_mu2 += (1.0 - g) * d2 / (p.sigma2 * p.sigma2);
        g_s1 += g * (d1 * d1 / (p.sigma1 * p.sigma1 * p.sigma1) - 1.0 / p.sigma1);
        g_s2 += (1.0 - g) * (d2 * d2 / (p.sigma2 * p.sigma2 * p.sigma2) - 1.0 / p.sigma2);
    }
    Ok([g_alpha, g_mu1, g_mu2, g_s1, g_s2])
}

/// Enumerates the 2^N quadratic exponent sums over all component assignments
/// and clusters them within `tol`. Returns the number of distinct values and
/// their representatives in increasing order.
///
/// The count collapses to 1 exactly when the two components coincide.
pub fn exponent_spectrum(
    p: &MixtureParams,
    sample: &Sample,
    tol: f64,
) -> Result<(usize, Vec<f64>)> {
    p.validate()?;
    if tol <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let n = sample.len();
    if n > SPECTRUM_MAX_N {
        return Err(Error::SizeLimit {
            n,
            max: SPECTRUM_MAX_N,
        });
    }
    // Per-point exponents for each of the two component choices.
    let e: Vec<(f64, f64)> = sample
        .points()
        .iter()
        .map(|&x| {
            let z1 = x - p.mu1;
            let z2 = x - p.mu2;
            (
                z1 * z1 / (2.0 * p.sigma1 * p.sigma1),
                z2 * z2 / (2.0 * p.sigma2 * p.sigma2),
            )
        })
        .collect();
    let mut sums = vec![0.0f64; 1usize << n];
    let mut len = 1usize;
    for &(e1, e2) in &e {
        for i in 0..len {
            sums[len + i] = sums[i] + e2;
            sums[i] += e1;
        }
        len *= 2;
    }
    sums.sort_by(f64::total_cmp);
    let mut reps: Vec<f64> = Vec::new();
    for v in sums {
        match reps.last() {
            Some(&r) if v - r <= tol => {}
            _ => reps.push(v),
        }
    }
    Ok((reps.len(), reps))
}

/// Resolves the label-switching symmetry, returning the representative with
/// mu1 < mu2, breaking ties by sigma1 <= sigma2, then alpha <= 0.5. The result
/// defines the same density function.
pub fn canonicalize(p: &MixtureParams) -> MixtureParams {
    let swap = if (p.mu1 - p.mu2).abs() <= CANONICAL_TIE_TOL {
        if (p.sigma1 - p.sigma2).abs() <= CANONICAL_TIE_TOL {
            p.alpha > 0.5
        } else {
            p.sigma1 > p.sigma2
        }
    } else {
        p.mu1 > p.mu2
    };
    if swap {
        p.swapped()
    } else {
        *p
    }
}

/// Classifies a parameter point with explicit tolerance and sigma floor.
pub fn classify_with(p: &MixtureParams, tol: f64, sigma_floor: f64) -> Classification {
    if (p.mu1 - p.mu2).abs() <= tol && (p.sigma1 - p.sigma2).abs() <= tol {
        Classification::Trivial
    } else if p.alpha <= tol || p.alpha >= 1.0 - tol {
        Classification::Boundary
    } else if p.sigma1.min(p.sigma2) <= sigma_floor {
        Classification::Degenerate
    } else {
        Classification::NonTrivial
    }
}

/// Classifies with the default sigma floor.
pub fn classify(p: &MixtureParams, tol: f64) -> Classification {
    classify_with(p, tol, DEFAULT_SIGMA_FLOOR)
}
