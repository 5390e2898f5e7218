//! The constrained two-parameter model: second mean pinned at 0, both
//! standard deviations at 1/sqrt(2), data {0, x}. Its critical equation in mu
//! is transcendental; this module brackets and certifies its roots at
//! extended precision, recovers the matching mixture weight, locates the
//! interior-maximum threshold in x, demonstrates the likelihood's
//! unboundedness, and emits the likelihood surface for plotting.

use astro_float::BigFloat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mixture::{loglik, MixtureParams, Sample};
use crate::mp::{self, MpCtx};

/// Largest admissible x; beyond it exp(mu^2) outgrows what the solver is
/// prepared to resolve.
pub const MAX_X: f64 = 20.0;
/// Lower end of the root-bracketing interval.
pub const BRACKET_EPS: f64 = 1e-6;

/// A toy-model instance: data {0, x} solved at `digits` decimal digits.
#[derive(Debug, Clone, Copy)]
pub struct ToyProblem {
    pub x: f64,
    pub digits: usize,
}

impl ToyProblem {
    pub fn new(x: f64, digits: usize) -> Result<Self> {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::InvalidParams(format!("x must be positive, got {x}")));
        }
        if x > MAX_X {
            return Err(Error::RangeExceeded { x, max: MAX_X });
        }
        if digits < 17 {
            return Err(Error::InvalidParams(format!(
                "digits must be >= 17, got {digits}"
            )));
        }
        Ok(ToyProblem { x, digits })
    }

    pub fn solve(&self) -> Result<ToySolveResult> {
        solve_mu(self.x, self.digits)
    }
}

/// Certified interior maximum of the toy likelihood.
///
/// The extended-precision values are carried as decimal strings (at the
/// requested number of significant digits) so no digits are lost to binary
/// floats; `*_f64` fields are nearest-double conveniences.
#[derive(Debug, Clone, Serialize)]
pub struct ToySolveResult {
    pub x: f64,
    pub digits: usize,
    pub mu_hat: String,
    pub alpha_hat: String,
    /// Critical-equation residual at mu_hat, decimal string.
    pub residual: String,
    pub loglik_at_max: f64,
    #[serde(skip)]
    pub mu_hat_f64: f64,
    #[serde(skip)]
    pub alpha_hat_f64: f64,
    #[serde(skip)]
    pub residual_f64: f64,
}

fn log_sum_exp2(t1: f64, t2: f64) -> f64 {
    let m = t1.max(t2);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + ((t1 - m).exp() + (t2 - m).exp()).ln()
}

/// The toy log-likelihood
/// `log(alpha e^{-mu^2} + 1-alpha) + log(alpha e^{-(mu-x)^2} + (1-alpha) e^{-x^2})`
/// (additive constant omitted), evaluated in log space.
pub fn toy_loglik(alpha: f64, mu: f64, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParams(format!(
            "alpha = {alpha} outside [0,1]"
        )));
    }
    if !x.is_finite() || x <= 0.0 || !mu.is_finite() {
        return Err(Error::InvalidParams(format!("bad (mu, x) = ({mu}, {x})")));
    }
    let la = alpha.ln();
    let lb = (1.0 - alpha).ln();
    let term1 = log_sum_exp2(la - mu * mu, lb);
    let term2 = log_sum_exp2(la - (mu - x) * (mu - x), lb - x * x);
    if term1 == f64::NEG_INFINITY {
        return Err(Error::DegenerateEval { index: 0 });
    }
    if term2 == f64::NEG_INFINITY {
        return Err(Error::DegenerateEval { index: 1 });
    }
    Ok(term1 + term2)
}

/// Left-hand side of the critical equation
/// `(x - mu) e^{mu^2} - x + mu e^{-mu (2x - mu)}` in double precision.
pub fn critical_residual(mu: f64, x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 || !mu.is_finite() {
        return Err(Error::InvalidParams(format!("bad (mu, x) = ({mu}, {x})")));
    }
    let e1 = mu * mu;
    let e2 = -mu * (2.0 * x - mu);
    let overflow = 709.0;
    if e1 > overflow || e2 > overflow {
        return Err(Error::RangeExceeded {
            x: mu,
            max: overflow.sqrt(),
        });
    }
    Ok((x - mu) * e1.exp() - x + mu * e2.exp())
}

fn resid_mp(ctx: &mut MpCtx, mu: &BigFloat, x: &BigFloat) -> BigFloat {
    let mu2 = ctx.mul(mu, mu);
    let e1 = ctx.exp(&mu2);
    let two_x = ctx.add(x, x);
    let arg = ctx.mul(mu, &ctx.sub(&two_x, mu)).neg();
    let e2 = ctx.exp(&arg);
    let head = ctx.mul(&ctx.sub(x, mu), &e1);
    ctx.add(&ctx.sub(&head, x), &ctx.mul(mu, &e2))
}

// d/dmu of the residual: (2 mu (x - mu) - 1) (e^{mu^2} - e^{-mu(2x-mu)})
fn resid_prime_mp(ctx: &mut MpCtx, mu: &BigFloat, x: &BigFloat) -> BigFloat {
    let mu2 = ctx.mul(mu, mu);
    let e1 = ctx.exp(&mu2);
    let two_x = ctx.add(x, x);
    let arg = ctx.mul(mu, &ctx.sub(&two_x, mu)).neg();
    let e2 = ctx.exp(&arg);
    let one = ctx.big(1.0);
    let two = ctx.big(2.0);
    let fac = ctx.sub(&ctx.mul(&two, &ctx.mul(mu, &ctx.sub(x, mu))), &one);
    ctx.mul(&fac, &ctx.sub(&e1, &e2))
}

/// alpha from the stationarity condition of the toy likelihood, which is
/// linear in alpha: with A = e^{-mu^2}, B = e^{-(mu-x)^2}, C = e^{-x^2},
/// alpha = -((A-1) C + (B-C)) / (2 (A-1)(B-C)).
fn recover_alpha_mp(ctx: &mut MpCtx, mu: &BigFloat, x: &BigFloat) -> BigFloat {
    let a = ctx.exp(&ctx.mul(mu, mu).neg());
    let d = ctx.sub(mu, x);
    let b = ctx.exp(&ctx.mul(&d, &d).neg());
    let c = ctx.exp(&ctx.mul(x, x).neg());
    let one = ctx.big(1.0);
    let two = ctx.big(2.0);
    let am1 = ctx.sub(&a, &one);
    let bmc = ctx.sub(&b, &c);
    let num = ctx.add(&ctx.mul(&am1, &c), &bmc).neg();
    let den = ctx.mul(&two, &ctx.mul(&am1, &bmc));
    ctx.div(&num, &den)
}

fn toy_loglik_mp(ctx: &mut MpCtx, alpha: &BigFloat, mu: &BigFloat, x: &BigFloat) -> BigFloat {
    let one = ctx.big(1.0);
    let beta = ctx.sub(&one, alpha);
    let a = ctx.exp(&ctx.mul(mu, mu).neg());
    let d = ctx.sub(mu, x);
    let b = ctx.exp(&ctx.mul(&d, &d).neg());
    let c = ctx.exp(&ctx.mul(x, x).neg());
    let term1 = ctx.ln(&ctx.add(&ctx.mul(alpha, &a), &beta));
    let term2 = ctx.ln(&ctx.add(&ctx.mul(alpha, &b), &ctx.mul(&beta, &c)));
    ctx.add(&term1, &term2)
}

/// Recovers the mixture weight paired with a critical abscissa `mu_hat`.
/// The solution must land strictly inside (0,1); otherwise `mu_hat` was not a
/// valid interior critical point and [`Error::InconsistentAlpha`] is raised.
pub fn recover_alpha(mu_hat: f64, x: f64, digits: usize) -> Result<f64> {
    if mu_hat.is_nan() || mu_hat <= 0.0 || mu_hat > x {
        return Err(Error::InvalidParams(format!(
            "mu_hat = {mu_hat} outside (0, {x}]"
        )));
    }
    if digits < 17 {
        return Err(Error::InvalidParams(format!(
            "digits must be >= 17, got {digits}"
        )));
    }
    let mut ctx = MpCtx::with_digits(digits);
    let mu = ctx.big(mu_hat);
    let xb = ctx.big(x);
    let alpha = recover_alpha_mp(&mut ctx, &mu, &xb);
    let a = mp::to_f64(&alpha);
    if !(a > 0.0 && a < 1.0) || !a.is_finite() {
        return Err(Error::InconsistentAlpha { alpha: a });
    }
    Ok(a)
}

struct MpRoot {
    mu: BigFloat,
    alpha: BigFloat,
    loglik: f64,
    residual: BigFloat,
}

/// Brackets all sign changes of the critical residual on (BRACKET_EPS, x],
/// refines each by safeguarded Newton (bisection fallback) at working
/// precision, and keeps the roots whose recovered alpha is interior.
fn scan_roots(x: f64, digits: usize) -> Result<(usize, Vec<MpRoot>)> {
    // the residual steepens like e^{x^2}; resolving roots to 10^-digits of
    // residual needs correspondingly more working digits
    let steep = (x * x * std::f64::consts::LOG10_E).ceil() as usize;
    let mut ctx = MpCtx::with_digits(digits + steep);
    let xb = ctx.big(x);

    let n = 10 * (x * 100.0).ceil() as usize;
    let lo = BRACKET_EPS;
    let step = (x - lo) / n as f64;
    let mut grid_vals = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mu = if i == n { x } else { lo + step * i as f64 };
        grid_vals.push((mu, critical_residual(mu, x)?));
    }

    // far below the certification bound 10^-(digits-5), so every displayed
    // digit of the root is determined
    let ftol = ctx.pow10_neg(digits as i32 + 8);

    let mut candidates = 0usize;
    let mut roots: Vec<MpRoot> = Vec::new();
    for i in 0..n {
        let (a, fa) = grid_vals[i];
        let (b, fb) = grid_vals[i + 1];
        if (fa < 0.0) != (fb < 0.0) {
            candidates += 1;
            let mu = newton_safe(&mut ctx, &xb, a, b, fa < 0.0, &ftol);
            let residual = resid_mp(&mut ctx, &mu, &xb);
            let alpha = recover_alpha_mp(&mut ctx, &mu, &xb);
            let af = mp::to_f64(&alpha);
            if af > 0.0 && af < 1.0 {
                let ll = mp::to_f64(&toy_loglik_mp(&mut ctx, &alpha, &mu, &xb));
                roots.push(MpRoot {
                    mu,
                    alpha,
                    loglik: ll,
                    residual,
                });
            }
        }
    }
    Ok((candidates, roots))
}

/// Safeguarded Newton iteration inside the bracket [a, b]; `a_neg` tells
/// whether the residual is negative at `a`. Falls back to bisection whenever
/// the Newton step leaves the bracket or stalls.
fn newton_safe(
    ctx: &mut MpCtx,
    x: &BigFloat,
    a: f64,
    b: f64,
    a_neg: bool,
    ftol: &BigFloat,
) -> BigFloat {
    let (mut xl, mut xh) = if a_neg {
        (ctx.big(a), ctx.big(b))
    } else {
        (ctx.big(b), ctx.big(a))
    };
    let half = ctx.big(0.5);
    let mut rts = ctx.mul(&ctx.add(&xl, &xh), &half);
    let mut dxold = ctx.sub(&ctx.big(b), &ctx.big(a)).abs();
    let mut dx = dxold.clone();

    for _ in 0..(ctx.p + 60) {
        let f = resid_mp(ctx, &rts, x);
        let df = resid_prime_mp(ctx, &rts, x);
        if f.abs().cmp(ftol).is_some_and(|c| c < 0) || f.is_nan() {
            break;
        }
        // maintain f(xl) < 0 < f(xh)
        if f.is_negative() {
            xl = rts.clone();
        } else {
            xh = rts.clone();
        }
        let newton_in_bracket = {
            let t1 = ctx.sub(&ctx.mul(&ctx.sub(&rts, &xh), &df), &f);
            let t2 = ctx.sub(&ctx.mul(&ctx.sub(&rts, &xl), &df), &f);
            let prod = ctx.mul(&t1, &t2);
            prod.is_negative()
        };
        let decreasing_fast = {
            let lhs = ctx.mul(&ctx.big(2.0), &f).abs();
            let rhs = ctx.mul(&dxold, &df).abs();
            lhs.cmp(&rhs).is_some_and(|c| c < 0)
        };
        let next = if newton_in_bracket && decreasing_fast {
            ctx.sub(&rts, &ctx.div(&f, &df))
        } else {
            ctx.mul(&ctx.add(&xl, &xh), &half)
        };
        if next.cmp(&rts).is_some_and(|c| c == 0) {
            break;
        }
        dxold = dx.clone();
        dx = ctx.sub(&next, &rts).abs();
        rts = next;
    }
    rts
}

/// Solves the critical equation on (0, x] at `digits` decimal digits and
/// returns the root maximizing the toy log-likelihood, with its recovered
/// mixture weight and residual.
pub fn solve_mu(x: f64, digits: usize) -> Result<ToySolveResult> {
    let problem = ToyProblem::new(x, digits)?;
    let (_, mut roots) = scan_roots(problem.x, problem.digits)?;
    if roots.is_empty() {
        return Err(Error::NoInteriorRoot { x });
    }
    roots.sort_by(|p, q| p.loglik.total_cmp(&q.loglik));
    let best = roots.pop().expect("nonempty");

    let residual_f64 = mp::to_f64(&best.residual);
    let bound = mp::pow10_f64(-((digits as i32) - 5));
    if residual_f64.abs() >= bound {
        return Err(Error::NoCertification {
            best_residual: residual_f64.abs(),
            steps: 0,
        });
    }
    let mut ctx = MpCtx::with_digits(digits);
    Ok(ToySolveResult {
        x,
        digits,
        mu_hat: ctx.format_decimal(&best.mu, digits),
        alpha_hat: ctx.format_decimal(&best.alpha, digits),
        residual: ctx.format_decimal(&best.residual, 6),
        loglik_at_max: best.loglik,
        mu_hat_f64: mp::to_f64(&best.mu),
        alpha_hat_f64: mp::to_f64(&best.alpha),
        residual_f64,
    })
}

/// Suprema of the toy likelihood over the boundary candidates: alpha = 0
/// (value -x^2), alpha = 1 (single Gaussian, sup -x^2/2 at mu = x/2), and the
/// mu = 0 family (value -x^2 for every alpha).
pub fn boundary_suprema(x: f64) -> [f64; 3] {
    [-x * x, -x * x / 2.0, -x * x]
}

/// The bisection predicate of [`interior_threshold`]: the critical equation
/// has exactly one root in (0, x] with an interior recovered alpha, and the
/// likelihood there strictly exceeds every boundary candidate.
///
/// Requiring uniqueness reproduces the certified sufficiency threshold
/// 1.56125...; comparing values alone would flip earlier, near x = 1.51822,
/// where the interior maximum first overtakes the boundary.
pub fn interior_maximum_dominates(x: f64) -> Result<bool> {
    if !x.is_finite() || x <= 0.0 || x > MAX_X {
        return Err(Error::InvalidParams(format!("x = {x} out of range")));
    }
    let (_, _, ll, count) = match best_root_f64(x)? {
        Some(t) => t,
        None => return Ok(false),
    };
    if count != 1 {
        return Ok(false);
    }
    let bound = boundary_suprema(x)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ll > bound)
}

/// Double-precision twin of the root scan, enough for threshold bisection:
/// returns (mu, alpha, loglik, number of valid roots) of the best valid root.
fn best_root_f64(x: f64) -> Result<Option<(f64, f64, f64, usize)>> {
    let n = 10 * (x * 100.0).ceil() as usize;
    let lo = BRACKET_EPS;
    let step = (x - lo) / n as f64;
    let mut prev_mu = lo;
    let mut prev_v = critical_residual(lo, x)?;
    let mut best: Option<(f64, f64, f64)> = None;
    let mut valid = 0usize;
    for i in 1..=n {
        let mu = if i == n { x } else { lo + step * i as f64 };
        let v = critical_residual(mu, x)?;
        if (prev_v < 0.0) != (v < 0.0) {
            let (mut a, mut b) = (prev_mu, mu);
            let mut fa = prev_v;
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = critical_residual(m, x)?;
                if (fa < 0.0) != (fm < 0.0) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
                if b - a <= f64::EPSILON * b.abs() {
                    break;
                }
            }
            let root = 0.5 * (a + b);
            if let Some(alpha) = recover_alpha_f64(root, x) {
                if alpha > 0.0 && alpha < 1.0 {
                    valid += 1;
                    let ll = toy_loglik(alpha, root, x)?;
                    if best.is_none_or(|(_, _, b_ll)| ll > b_ll) {
                        best = Some((root, alpha, ll));
                    }
                }
            }
        }
        prev_mu = mu;
        prev_v = v;
    }
    Ok(best.map(|(m, a, l)| (m, a, l, valid)))
}

fn recover_alpha_f64(mu: f64, x: f64) -> Option<f64> {
    let a = (-mu * mu).exp();
    let b = (-(mu - x) * (mu - x)).exp();
    let c = (-x * x).exp();
    let den = 2.0 * (a - 1.0) * (b - c);
    if den == 0.0 {
        return None;
    }
    let alpha = -((a - 1.0) * c + (b - c)) / den;
    alpha.is_finite().then_some(alpha)
}

/// Minimal x* (within `tol`) past which the toy likelihood's global maximum
/// is certified interior with 0 < mu <= x, found by bisection of
/// [`interior_maximum_dominates`] on [1, 2].
pub fn interior_threshold(tol: f64) -> Result<f64> {
    if tol.is_nan() || tol < 1e-6 {
        return Err(Error::InvalidParams(format!(
            "tol must be >= 1e-6, got {tol}"
        )));
    }
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    if interior_maximum_dominates(lo)? || !interior_maximum_dominates(hi)? {
        return Err(Error::InvalidParams(
            "threshold not bracketed by [1, 2]".into(),
        ));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if interior_maximum_dominates(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Evaluates the full five-parameter log-likelihood along a shrinking sigma1
/// with the first mean pinned to the first data point (alpha = 1/2, second
/// component at the sample moments). The values grow without bound as
/// sigma1 -> 0; log-space evaluation keeps every step finite.
pub fn unboundedness_trace(sample: &Sample, sigma_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    if sample.len() < 2 {
        return Err(Error::InsufficientData {
            need: 2,
            got: sample.len(),
        });
    }
    let s = sample.std_pop();
    if s <= 0.0 {
        return Err(Error::InvalidSample(
            "unboundedness trace needs at least two distinct points".into(),
        ));
    }
    let x1 = sample.points()[0];
    let mut out = Vec::with_capacity(sigma_list.len());
    for &sigma1 in sigma_list {
        if !sigma1.is_finite() || sigma1 <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "sigma1 = {sigma1} must be positive"
            )));
        }
        let p = MixtureParams::new(0.5, x1, sample.mean(), sigma1, s)?;
        out.push((sigma1, loglik(&p, sample)?));
    }
    Ok(out)
}

/// Row-major grid of the toy log-likelihood for plotting: alpha sweeps
/// [0, 1] over the rows, mu sweeps `mu_range` over the columns.
pub fn surface_grid(
    x: f64,
    alpha_steps: usize,
    mu_range: (f64, f64),
    mu_steps: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    if alpha_steps < 2 || mu_steps < 2 {
        return Err(Error::InvalidParams(
            "grid needs at least 2 steps per axis".into(),
        ));
    }
    if mu_range.0.is_nan() || mu_range.1.is_nan() || mu_range.0 >= mu_range.1 {
        return Err(Error::InvalidParams(format!("empty mu range {mu_range:?}")));
    }
    let mut out = Vec::with_capacity(alpha_steps * mu_steps);
    for i in 0..alpha_steps {
        let alpha = i as f64 / (alpha_steps - 1) as f64;
        for j in 0..mu_steps {
            let mu = mu_range.0 + (mu_range.1 - mu_range.0) * j as f64 / (mu_steps - 1) as f64;
            out.push((alpha, mu, toy_loglik(alpha, mu, x)?));
        }
    }
    Ok(out)
}

/// CSV with header `alpha,mu,loglik`.
pub fn surface_to_csv(grid: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("alpha,mu,loglik\n");
    for (a, m, l) in grid {
        out.push_str(&format!("{a},{m},{l}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_loglik_boundary_cases() {
        // alpha = 0: both terms lose the first component
        assert!((toy_loglik(0.0, 0.7, 2.0).unwrap() - (-4.0)).abs() < 1e-12);
        // alpha = 1, mu = x: first term -4, second term 0
        assert!((toy_loglik(1.0, 2.0, 2.0).unwrap() - (-4.0)).abs() < 1e-12);
        // frozen from an independent 40-digit evaluation
        assert!((toy_loglik(0.5, 1.0, 2.0).unwrap() - (-2.0244453220279257)).abs() < 1e-14);
    }

    #[test]
    fn residual_trivial_root_and_spot_value() {
        for x in [0.5, 1.0, 2.0, 7.5] {
            assert!(critical_residual(0.0, x).unwrap().abs() < 1e-14);
        }
        // frozen: -2 + 2 e^{-4}
        let r = critical_residual(2.0, 2.0).unwrap();
        assert!((r - (-1.9633687222225316)).abs() < 1e-13, "r = {r}");
    }

    #[test]
    fn residual_range_guard() {
        assert!(matches!(
            critical_residual(27.0, 2.0),
            Err(Error::RangeExceeded { .. })
        ));
        assert!(matches!(
            ToyProblem::new(25.0, 25),
            Err(Error::RangeExceeded { .. })
        ));
    }

    #[test]
    fn printed_reference_mu_has_visible_residual() {
        // the resolution of the published 18-digit value: its residual in
        // the critical equation is ~4.8e-12, i.e. the printed tail past
        // digit 13 is numerical noise from the original maximization;
        // the true root's residual at double precision sits at rounding level
        let printed = critical_residual(1.9574249423030816, 2.0).unwrap();
        assert!(
            (printed - 4.8e-12).abs() < 1e-13,
            "printed-mu residual {printed:e}"
        );
        let true_root = critical_residual(1.9574249423032067, 2.0).unwrap();
        assert!(true_root.abs() < 1e-13, "true-root residual {true_root:e}");
    }

    #[test]
    fn reference_scale_constants_certify() {
        let r = solve_mu(2.0, 25).unwrap();
        // true continuation of the printed reference constants
        assert!(r.mu_hat.starts_with("1.957424942303206699"), "{}", r.mu_hat);
        assert!(
            r.alpha_hat.starts_with("0.501732629598270807"),
            "{}",
            r.alpha_hat
        );
        assert!(r.residual_f64.abs() < 1e-20, "residual {}", r.residual);
        assert!((r.loglik_at_max - (-1.3484681475311113)).abs() < 1e-12);
    }

    #[test]
    fn precision_tiers_agree() {
        let a = solve_mu(2.0, 25).unwrap();
        let b = solve_mu(2.0, 50).unwrap();
        // agreement of the decimal expansions to at least 23 digits
        let pa: String = a.mu_hat.chars().take(24).collect();
        let pb: String = b.mu_hat.chars().take(24).collect();
        assert_eq!(pa, pb);
        assert!(b.residual_f64.abs() <= a.residual_f64.abs());
    }

    #[test]
    fn well_separated_regime() {
        let r = solve_mu(10.0, 25).unwrap();
        assert!(
            r.mu_hat_f64 > 9.9 && r.mu_hat_f64 <= 10.0,
            "mu = {}",
            r.mu_hat
        );
        assert!((r.alpha_hat_f64 - 0.5).abs() < 1e-3);
        assert!(r.residual_f64.abs() < 1e-20);
    }

    #[test]
    fn below_threshold_no_interior_root() {
        assert!(matches!(
            solve_mu(1.0, 25),
            Err(Error::NoInteriorRoot { .. })
        ));
    }

    #[test]
    fn recover_alpha_matches_reference() {
        let a = recover_alpha(1.9574249423030816, 2.0, 25).unwrap();
        // the recovered weight at (approximately) the critical abscissa
        assert!((a - 0.5017326295980387).abs() < 1e-11, "alpha = {a}");
    }

    #[test]
    fn recover_alpha_small_mu_degenerates() {
        // alpha grows like 1/(2 mu^2) as mu -> 0, far outside (0,1)
        assert!(matches!(
            recover_alpha(1e-8, 2.0, 25),
            Err(Error::InconsistentAlpha { .. })
        ));
    }

    #[test]
    fn stationarity_of_recovered_pair() {
        let r = solve_mu(2.0, 30).unwrap();
        let (alpha, mu, x) = (r.alpha_hat_f64, r.mu_hat_f64, 2.0);
        // central differences of the toy likelihood at double precision
        let h = 1e-6;
        let dmu = (toy_loglik(alpha, mu + h, x).unwrap() - toy_loglik(alpha, mu - h, x).unwrap())
            / (2.0 * h);
        let da = (toy_loglik(alpha + h, mu, x).unwrap() - toy_loglik(alpha - h, mu, x).unwrap())
            / (2.0 * h);
        assert!(dmu.abs() < 1e-8, "d/dmu = {dmu}");
        assert!(da.abs() < 1e-8, "d/dalpha = {da}");
    }

    #[test]
    fn threshold_matches_certified_sufficiency_value() {
        let t = interior_threshold(1e-3).unwrap();
        assert!((t - 1.5612531677).abs() < 1e-3, "threshold = {t}");
        // consistency at +-10 tol
        assert!(!interior_maximum_dominates(t - 1e-2).unwrap());
        assert!(interior_maximum_dominates(t + 1e-2).unwrap());
    }

    #[test]
    fn unboundedness_slope_and_window() {
        let s = Sample::new(vec![0.0, 2.0]).unwrap();
        let trace = unboundedness_trace(&s, &[1e-3, 1e-6]).unwrap();
        let diff = trace[1].1 - trace[0].1;
        assert!((diff - 3.0 * 10f64.ln()).abs() < 1e-3, "diff = {diff}");

        // monotone increase as sigma shrinks below 1e-2
        let sigmas: Vec<f64> = (2..=12).map(|k| 10f64.powi(-k)).collect();
        let tr = unboundedness_trace(&s, &sigmas).unwrap();
        for w in tr.windows(2) {
            assert!(w[1].1 > w[0].1);
        }
        // ell + log sigma1 stays bounded
        for (sig, ll) in &tr {
            let shifted = ll + sig.ln();
            assert!(shifted.abs() < 10.0, "unexpected magnitude {shifted}");
        }
    }

    #[test]
    fn surface_grid_peak_and_boundary_column() {
        let grid = surface_grid(2.0, 101, (-1.0, 4.0), 101).unwrap();
        let (mut ba, mut bm, mut bl) = (0.0, 0.0, f64::NEG_INFINITY);
        for &(a, m, l) in &grid {
            if l > bl {
                ba = a;
                bm = m;
                bl = l;
            }
        }
        assert!((ba - 0.50173).abs() < 0.01, "alpha peak {ba}");
        assert!((bm - 1.95742).abs() < 0.05, "mu peak {bm}");
        // no grid value exceeds the certified maximum
        let solved = solve_mu(2.0, 25).unwrap();
        for &(_, _, l) in &grid {
            assert!(l <= solved.loglik_at_max + 1e-9);
        }
        // alpha = 0 column is constant -x^2
        for &(a, _, l) in grid.iter().filter(|(a, _, _)| *a == 0.0) {
            assert_eq!(a, 0.0);
            assert!((l - (-4.0)).abs() < 1e-12);
        }
    }
}
