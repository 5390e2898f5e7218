//! EM fixed-point iteration with convergence control, monotonicity auditing,
//! degeneracy detection, and an equal-variance constrained variant.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mixture::{self, MixtureParams, Responsibilities, Sample};

/// Threshold below which an expected component size counts as empty.
pub const EMPTY_COMPONENT_TOL: f64 = 1e-12;

/// Variance structure of the fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Constraint {
    /// Both standard deviations free.
    Free,
    /// sigma1 = sigma2, updated with the pooled weighted variance.
    EqualVariance,
}

#[derive(Debug, Clone, Copy)]
pub struct EMOptions {
    pub max_iters: usize,
    /// Stop when the canonicalized parameter vector moves less than this in
    /// max norm...
    pub param_tol: f64,
    /// ...and the log-likelihood moves less than this.
    pub loglik_tol: f64,
    pub constraint: Constraint,
    /// Collapse detection: stop with Degenerate status when a computed sigma
    /// falls to or below this floor. Sigma is never clamped.
    pub sigma_floor: f64,
}

impl Default for EMOptions {
    fn default() -> Self {
        EMOptions {
            max_iters: 10_000,
            param_tol: 1e-10,
            loglik_tol: 1e-12,
            constraint: Constraint::Free,
            sigma_floor: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EMStatus {
    Converged,
    MaxIters,
    Degenerate,
}

/// Full record of one EM run: every iterate (starting point included), the
/// log-likelihood at each, and how the run ended.
#[derive(Debug, Clone)]
pub struct EMTrace {
    pub iterates: Vec<MixtureParams>,
    pub logliks: Vec<f64>,
    pub status: EMStatus,
    pub final_params: MixtureParams,
}

impl EMTrace {
    pub fn final_loglik(&self) -> f64 {
        *self.logliks.last().expect("trace never empty")
    }

    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }
}

// Serialized as arrays of 5-vectors plus the loglik array and status string.
impl Serialize for EMTrace {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("EMTrace", 4)?;
        let iterates: Vec<[f64; 5]> = self.iterates.iter().map(|p| p.to_array()).collect();
        s.serialize_field("iterates", &iterates)?;
        s.serialize_field("logliks", &self.logliks)?;
        s.serialize_field("status", &self.status)?;
        s.serialize_field("final", &self.final_params.to_array())?;
        s.end()
    }
}

/// M-step: weighted-moment parameter update from fixed responsibilities.
///
/// The variance update is stored as its square root, so the returned point
/// carries standard deviations. Under [`Constraint::EqualVariance`] both
/// components receive the pooled value.
pub fn m_step(
    resp: &Responsibilities,
    sample: &Sample,
    constraint: Constraint,
) -> Result<MixtureParams> {
    let p = m_step_raw(resp, sample, constraint)?;
    let smin = p.sigma1.min(p.sigma2);
    if smin <= crate::mixture::DEFAULT_SIGMA_FLOOR {
        return Err(Error::DegenerateSigma {
            sigma: smin,
            floor: crate::mixture::DEFAULT_SIGMA_FLOOR,
        });
    }
    Ok(p)
}

/// The weighted-moment update with no floor check; errors only when a
/// component empties or a variance vanishes entirely.
fn m_step_raw(
    resp: &Responsibilities,
    sample: &Sample,
    constraint: Constraint,
) -> Result<MixtureParams> {
    let n = sample.len() as f64;
    if resp.n1 <= EMPTY_COMPONENT_TOL || resp.n2 <= EMPTY_COMPONENT_TOL {
        return Err(Error::EmptyComponent {
            n1: resp.n1,
            n2: resp.n2,
        });
    }
    let pts = sample.points();
    let mut sum1 = 0.0;
    let mut sum2 = 0.0;
    for (&x, &g) in pts.iter().zip(resp.gamma.iter()) {
        sum1 += g * x;
        sum2 += (1.0 - g) * x;
    }
    let mu1 = sum1 / resp.n1;
    let mu2 = sum2 / resp.n2;
    let mut ss1 = 0.0;
    let mut ss2 = 0.0;
    for (&x, &g) in pts.iter().zip(resp.gamma.iter()) {
        ss1 += g * (x - mu1) * (x - mu1);
        ss2 += (1.0 - g) * (x - mu2) * (x - mu2);
    }
    let (sigma1, sigma2) = match constraint {
        Constraint::Free => ((ss1 / resp.n1).sqrt(), (ss2 / resp.n2).sqrt()),
        Constraint::EqualVariance => {
            let pooled = ((ss1 + ss2) / n).sqrt();
            (pooled, pooled)
        }
    };
    if sigma1 <= 0.0 || sigma2 <= 0.0 {
        return Err(Error::DegenerateSigma {
            sigma: sigma1.min(sigma2),
            floor: 0.0,
        });
    }
    MixtureParams::new(resp.n1 / n, mu1, mu2, sigma1, sigma2)
}

/// Runs EM from `start` until both the canonicalized parameter change and the
/// log-likelihood change fall under their tolerances, `max_iters` is reached,
/// or the run degenerates. Every iterate is recorded.
///
/// Degeneracy (empty component or sigma at the floor) ends the run with
/// status [`EMStatus::Degenerate`] and the trace up to that point; it is not
/// an error at this level.
pub fn run_em(start: &MixtureParams, sample: &Sample, opts: &EMOptions) -> Result<EMTrace> {
    start.validate()?;
    if sample.len() < 2 {
        return Err(Error::InsufficientData {
            need: 2,
            got: sample.len(),
        });
    }
    if opts.max_iters == 0 || opts.param_tol <= 0.0 || opts.loglik_tol <= 0.0 {
        return Err(Error::InvalidParams("EM options must be positive".into()));
    }
    let mut current = match opts.constraint {
        Constraint::Free => *start,
        Constraint::EqualVariance => {
            // project the start onto the constraint so every iterate satisfies it
            let pooled = (start.sigma1 * start.sigma1 * start.alpha
                + start.sigma2 * start.sigma2 * (1.0 - start.alpha))
                .sqrt();
            MixtureParams::new(start.alpha, start.mu1, start.mu2, pooled, pooled)?
        }
    };
    let mut iterates = vec![current];
    let mut logliks = vec![mixture::loglik(&current, sample)?];
    let mut status = EMStatus::MaxIters;

    for _ in 0..opts.max_iters {
        let resp = match mixture::responsibilities(&current, sample) {
            Ok(r) => r,
            Err(Error::DegenerateEval { .. }) => {
                status = EMStatus::Degenerate;
                break;
            }
            Err(e) => return Err(e),
        };
        let next = match m_step_raw(&resp, sample, opts.constraint) {
            Ok(p) => p,
            Err(Error::EmptyComponent { .. }) | Err(Error::DegenerateSigma { .. }) => {
                status = EMStatus::Degenerate;
                break;
            }
            Err(e) => return Err(e),
        };
        if next.sigma1.min(next.sigma2) <= opts.sigma_floor {
            // record the collapsing iterate, then stop: the trace shows the
            // sub-floor sigma rather than hiding it
            if let Ok(ll) = mixture::loglik(&next, sample) {
                iterates.push(next);
                logliks.push(ll);
                current = next;
            }
            status = EMStatus::Degenerate;
            break;
        }
        let ll = mixture::loglik(&next, sample)?;
        let dp = mixture::canonicalize(&next).max_norm_distance(&mixture::canonicalize(&current));
        let dl = (ll - logliks.last().unwrap()).abs();
        iterates.push(next);
        logliks.push(ll);
        current = next;
        if dp < opts.param_tol && dl < opts.loglik_tol {
            status = EMStatus::Converged;
            break;
        }
    }

    Ok(EMTrace {
        iterates,
        logliks,
        status,
        final_params: current,
    })
}
