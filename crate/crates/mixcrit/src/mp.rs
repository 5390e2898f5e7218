//! Extended-precision kernel: a thin context over astro-float plus the
//! big-float mixture gradient, finite-difference Jacobian, and the damped
//! Newton polisher used for certification.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;
/// Guard digits carried beyond the requested decimal precision.
const GUARD_DIGITS: usize = 20;

/// Working context: precision in bits plus the shared constants cache.
pub(crate) struct MpCtx {
    pub p: usize,
    cc: Consts,
}

impl MpCtx {
    /// Context with at least `digits` decimal digits of working precision.
    pub fn with_digits(digits: usize) -> Self {
        let bits = ((digits + GUARD_DIGITS) as f64 * std::f64::consts::LOG2_10).ceil() as usize + 2;
        MpCtx {
            p: bits,
            cc: Consts::new().expect("constants cache allocation"),
        }
    }

    pub fn big(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.p)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, RM)
    }

    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, RM, &mut self.cc)
    }

    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, RM, &mut self.cc)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(self.p, RM)
    }

    /// 10^(-k) at working precision.
    pub fn pow10_neg(&mut self, k: i32) -> BigFloat {
        let ten = self.big(10.0);
        ten.powi(k as usize, self.p, RM).reciprocal(self.p, RM)
    }

    pub fn format_decimal(&mut self, v: &BigFloat, sig_digits: usize) -> String {
        format_decimal(v, sig_digits, &mut self.cc)
    }
}

/// Nearest-f64 conversion through the raw mantissa words.
pub(crate) fn to_f64(b: &BigFloat) -> f64 {
    if b.is_nan() {
        return f64::NAN;
    }
    if b.is_inf_pos() {
        return f64::INFINITY;
    }
    if b.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if b.is_zero() {
        return 0.0;
    }
    let (words, _, sign, e, _) = b.as_raw_parts().expect("finite value has raw parts");
    let wbits = std::mem::size_of::<astro_float::Word>() * 8;
    let k = words.len();
    // value = 0.m * 2^e with the mantissa normalized; take the top 128 bits
    let (mant, used): (u128, i64) = if k >= 2 && wbits == 64 {
        (((words[k - 1] as u128) << 64) | words[k - 2] as u128, 128)
    } else {
        (words[k - 1] as u128, wbits as i64)
    };
    let v = (mant as f64) * ((e as i64 - used) as f64).exp2();
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Plain decimal rendering with `sig_digits` significant digits, e.g.
/// "1.9574249423032066991575797785" or "-4.81e-12". Extended-precision values
/// are serialized through this, never through binary floats.
pub(crate) fn format_decimal(v: &BigFloat, sig_digits: usize, cc: &mut Consts) -> String {
    if v.is_zero() {
        return "0".into();
    }
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_inf_pos() {
        return "Inf".into();
    }
    if v.is_inf_neg() {
        return "-Inf".into();
    }
    let (sign, digits, exp) = v
        .convert_to_radix(Radix::Dec, RoundingMode::None, cc)
        .expect("finite decimal conversion");
    let keep = sig_digits.max(1);
    let mut ds: Vec<u8> = digits.clone();
    let mut e = exp as i64; // value = 0.digits * 10^e
    if ds.len() > keep {
        // round half-up at the cut
        let carry = ds[keep] >= 5;
        ds.truncate(keep);
        if carry {
            let mut i = keep;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    ds.truncate(keep);
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
    }
    let mut ds: Vec<u8> = ds.iter().map(|d| d + b'0').collect();
    while ds.len() > 1 && ds.last() == Some(&b'0') {
        ds.pop();
    }
    let digits_str = String::from_utf8(ds).expect("ascii digits");
    let neg = if sign == Sign::Neg { "-" } else { "" };
    let n = digits_str.len() as i64;
    if e > 0 && e <= 21 {
        if n <= e {
            // integer with possible trailing zeros
            let zeros = "0".repeat((e - n) as usize);
            format!("{neg}{digits_str}{zeros}")
        } else {
            format!(
                "{neg}{}.{}",
                &digits_str[..e as usize],
                &digits_str[e as usize..]
            )
        }
    } else if e <= 0 && e > -5 {
        format!("{neg}0.{}{}", "0".repeat((-e) as usize), digits_str)
    } else {
        // scientific: d.ddd e(exp-1)
        let (head, tail) = digits_str.split_at(1);
        if tail.is_empty() {
            format!("{neg}{head}e{}", e - 1)
        } else {
            format!("{neg}{head}.{tail}e{}", e - 1)
        }
    }
}

/// Gradient of the mixture log-likelihood at big-float precision, in the
/// order (alpha, mu1, mu2, sigma1, sigma2). The 1/sqrt(2 pi) factor cancels
/// in every term.
pub(crate) fn grad_mp(ctx: &mut MpCtx, v: &[BigFloat; 5], xs: &[BigFloat]) -> [BigFloat; 5] {
    let one = ctx.big(1.0);
    let half = ctx.big(0.5);
    let (alpha, mu1, mu2, s1, s2) = (&v[0], &v[1], &v[2], &v[3], &v[4]);
    let beta = ctx.sub(&one, alpha);
    let s1s1 = ctx.mul(s1, s1);
    let s2s2 = ctx.mul(s2, s2);
    let s1c = ctx.mul(&s1s1, s1);
    let s2c = ctx.mul(&s2s2, s2);
    let inv_s1 = ctx.div(&one, s1);
    let inv_s2 = ctx.div(&one, s2);

    let mut g = [
        ctx.big(0.0),
        ctx.big(0.0),
        ctx.big(0.0),
        ctx.big(0.0),
        ctx.big(0.0),
    ];
    for x in xs {
        let d1 = ctx.sub(x, mu1);
        let d2 = ctx.sub(x, mu2);
        let d1d1 = ctx.mul(&d1, &d1);
        let d2d2 = ctx.mul(&d2, &d2);
        // unnormalized weighted component values
        let z1 = ctx.div(&ctx.mul(&half, &d1d1), &s1s1).neg();
        let x1 = ctx.exp(&z1);
        let e1 = ctx.mul(&x1, &inv_s1);
        let z2 = ctx.div(&ctx.mul(&half, &d2d2), &s2s2).neg();
        let x2 = ctx.exp(&z2);
        let e2 = ctx.mul(&x2, &inv_s2);
        let f = ctx.add(&ctx.mul(alpha, &e1), &ctx.mul(&beta, &e2));
        let gamma = ctx.div(&ctx.mul(alpha, &e1), &f);
        let gamma_c = ctx.sub(&one, &gamma);

        g[0] = ctx.add(&g[0], &ctx.div(&ctx.sub(&e1, &e2), &f));
        g[1] = ctx.add(&g[1], &ctx.div(&ctx.mul(&gamma, &d1), &s1s1));
        g[2] = ctx.add(&g[2], &ctx.div(&ctx.mul(&gamma_c, &d2), &s2s2));
        let t1 = ctx.sub(&ctx.div(&d1d1, &s1c), &inv_s1);
        g[3] = ctx.add(&g[3], &ctx.mul(&gamma, &t1));
        let t2 = ctx.sub(&ctx.div(&d2d2, &s2c), &inv_s2);
        g[4] = ctx.add(&g[4], &ctx.mul(&gamma_c, &t2));
    }
    g
}

/// Mixture log-likelihood at big-float precision.
pub(crate) fn loglik_mp(ctx: &mut MpCtx, v: &[BigFloat; 5], xs: &[BigFloat]) -> BigFloat {
    let one = ctx.big(1.0);
    let half = ctx.big(0.5);
    let (alpha, mu1, mu2, s1, s2) = (&v[0], &v[1], &v[2], &v[3], &v[4]);
    let beta = ctx.sub(&one, alpha);
    let s1s1 = ctx.mul(s1, s1);
    let s2s2 = ctx.mul(s2, s2);
    let inv_s1 = ctx.div(&one, s1);
    let inv_s2 = ctx.div(&one, s2);
    let mut total = ctx.big(0.0);
    for x in xs {
        let d1 = ctx.sub(x, mu1);
        let d2 = ctx.sub(x, mu2);
        let d1d1 = ctx.mul(&d1, &d1);
        let d2d2 = ctx.mul(&d2, &d2);
        let z1 = ctx.div(&ctx.mul(&half, &d1d1), &s1s1).neg();
        let z2 = ctx.div(&ctx.mul(&half, &d2d2), &s2s2).neg();
        let x1 = ctx.exp(&z1);
        let x2 = ctx.exp(&z2);
        let e1 = ctx.mul(&x1, &inv_s1);
        let e2 = ctx.mul(&x2, &inv_s2);
        let f = ctx.add(&ctx.mul(alpha, &e1), &ctx.mul(&beta, &e2));
        let lf = ctx.ln(&f);
        total = ctx.add(&total, &lf);
    }
    // subtract N/2 * ln(2 pi)
    let pi = ctx.pi();
    let two_pi = ctx.mul(&ctx.big(2.0), &pi);
    let l2pi = ctx.ln(&two_pi);
    let n_half = ctx.big(xs.len() as f64 * 0.5);
    ctx.sub(&total, &ctx.mul(&n_half, &l2pi))
}

fn abs_to_f64(b: &BigFloat) -> f64 {
    to_f64(b).abs()
}

pub(crate) fn max_norm(g: &[BigFloat; 5]) -> f64 {
    g.iter().map(abs_to_f64).fold(0.0, f64::max)
}

/// Solves the 5x5 system `a * x = rhs` by Gaussian elimination with partial
/// pivoting. Returns None when a pivot vanishes (singular system).
fn solve5(
    ctx: &MpCtx,
    a: &mut [[BigFloat; 5]; 5],
    rhs: &mut [BigFloat; 5],
) -> Option<[BigFloat; 5]> {
    let n = 5;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            // abs().cmp() rather than abs_cmp(): the latter compares signed
            // values in astro-float 0.9.6 and would promote zero pivots
            if a[row][col]
                .abs()
                .cmp(&a[pivot][col].abs())
                .is_some_and(|c| c > 0)
            {
                pivot = row;
            }
        }
        if a[pivot][col].is_zero() || a[pivot][col].is_nan() {
            return None;
        }
        if pivot != col {
            a.swap(pivot, col);
            rhs.swap(pivot, col);
        }
        let pivot_row = a[col].clone();
        for row in col + 1..n {
            let factor = ctx.div(&a[row][col], &pivot_row[col]);
            for (k, pv) in pivot_row.iter().enumerate().skip(col) {
                a[row][k] = ctx.sub(&a[row][k], &ctx.mul(&factor, pv));
            }
            rhs[row] = ctx.sub(&rhs[row], &ctx.mul(&factor, &rhs[col]));
        }
    }
    let mut x: [BigFloat; 5] = std::array::from_fn(|_| ctx.big(0.0));
    for col in (0..n).rev() {
        let mut acc = rhs[col].clone();
        for k in col + 1..n {
            acc = ctx.sub(&acc, &ctx.mul(&a[col][k], &x[k]));
        }
        x[col] = ctx.div(&acc, &a[col][col]);
    }
    if x.iter().any(|v| v.is_nan()) {
        return None;
    }
    Some(x)
}

fn in_region(v: &[BigFloat; 5]) -> bool {
    let a = to_f64(&v[0]);
    let s1 = to_f64(&v[3]);
    let s2 = to_f64(&v[4]);
    a > 0.0 && a < 1.0 && s1 > 0.0 && s2 > 0.0
}

pub(crate) struct PolishNewtonOutcome {
    pub params: [f64; 5],
    pub grad_norm: f64,
    pub loglik: f64,
}

const MAX_NEWTON_STEPS: usize = 100;
const MAX_HALVINGS: usize = 40;

/// Damped Newton iteration on the 5-dimensional gradient system at `digits`
/// decimal digits. The Jacobian comes from central finite differences at
/// matching precision. Succeeds when the gradient max norm falls under
/// 10^-(digits-10).
pub(crate) fn polish_newton(
    start: [f64; 5],
    xs_f: &[f64],
    digits: usize,
) -> Result<PolishNewtonOutcome> {
    let mut ctx = MpCtx::with_digits(digits);
    let xs: Vec<BigFloat> = xs_f.iter().map(|&x| ctx.big(x)).collect();
    let mut v: [BigFloat; 5] = std::array::from_fn(|i| ctx.big(start[i]));

    let target = pow10_f64(-((digits as i32) - 10));
    // keep iterating a little past the certification bound
    let fine = pow10_f64(-((digits as i32) - 6)) * 1e-2;
    let h_scale = pow10_f64(-((digits as i32) / 3));

    let mut g = grad_mp(&mut ctx, &v, &xs);
    let mut gnorm = max_norm(&g);
    let mut best = gnorm;
    let mut steps = 0;

    while gnorm > fine && steps < MAX_NEWTON_STEPS {
        steps += 1;
        // central-difference Jacobian of the gradient
        let mut jac: [[BigFloat; 5]; 5] =
            std::array::from_fn(|_| std::array::from_fn(|_| ctx.big(0.0)));
        for j in 0..5 {
            let scale = to_f64(&v[j]).abs().max(1.0);
            let h = ctx.big(h_scale * scale);
            let two_h = ctx.add(&h, &h);
            let mut vp = v.clone();
            vp[j] = ctx.add(&v[j], &h);
            let mut vm = v.clone();
            vm[j] = ctx.sub(&v[j], &h);
            let gp = grad_mp(&mut ctx, &vp, &xs);
            let gm = grad_mp(&mut ctx, &vm, &xs);
            for i in 0..5 {
                jac[i][j] = ctx.div(&ctx.sub(&gp[i], &gm[i]), &two_h);
            }
        }
        let mut rhs: [BigFloat; 5] = std::array::from_fn(|i| g[i].neg());
        let step = match solve5(&ctx, &mut jac, &mut rhs) {
            Some(s) => s,
            None => {
                return Err(Error::NoCertification {
                    best_residual: best,
                    steps,
                });
            }
        };
        // halve the step until the gradient norm decreases
        let mut lambda = ctx.big(1.0);
        let half = ctx.big(0.5);
        let mut accepted = false;
        let mut left_region = true;
        for _ in 0..=MAX_HALVINGS {
            let cand: [BigFloat; 5] =
                std::array::from_fn(|i| ctx.add(&v[i], &ctx.mul(&lambda, &step[i])));
            lambda = ctx.mul(&lambda, &half);
            if !in_region(&cand) {
                continue;
            }
            left_region = false;
            let gc = grad_mp(&mut ctx, &cand, &xs);
            let gcn = max_norm(&gc);
            if gcn < gnorm {
                v = cand;
                g = gc;
                gnorm = gcn;
                accepted = true;
                break;
            }
        }
        if !accepted {
            if left_region {
                return Err(Error::RegionExit { step: steps });
            }
            break;
        }
        best = best.min(gnorm);
    }

    if gnorm > target {
        return Err(Error::NoCertification {
            best_residual: best.min(gnorm),
            steps,
        });
    }
    let ll = to_f64(&loglik_mp(&mut ctx, &v, &xs));
    Ok(PolishNewtonOutcome {
        params: std::array::from_fn(|i| to_f64(&v[i])),
        grad_norm: gnorm,
        loglik: ll,
    })
}

/// Gradient max norm of a double-precision point re-evaluated at `digits`
/// decimal digits, plus the matching log-likelihood.
pub(crate) fn residual_at(point: [f64; 5], xs_f: &[f64], digits: usize) -> (f64, f64) {
    let mut ctx = MpCtx::with_digits(digits);
    let xs: Vec<BigFloat> = xs_f.iter().map(|&x| ctx.big(x)).collect();
    let v: [BigFloat; 5] = std::array::from_fn(|i| ctx.big(point[i]));
    let g = grad_mp(&mut ctx, &v, &xs);
    let ll = to_f64(&loglik_mp(&mut ctx, &v, &xs));
    (max_norm(&g), ll)
}

/// The trivial critical point (alpha, mean, mean, std, std) with the moments
/// taken at working precision, so its gradient sits at the precision floor
/// rather than at double-precision rounding level. Returns the rounded
/// parameters, the extended-precision gradient norm, and the log-likelihood.
pub(crate) fn trivial_point_residual(
    alpha: f64,
    xs_f: &[f64],
    digits: usize,
) -> ([f64; 5], f64, f64) {
    let mut ctx = MpCtx::with_digits(digits);
    let xs: Vec<BigFloat> = xs_f.iter().map(|&x| ctx.big(x)).collect();
    let n = ctx.big(xs_f.len() as f64);
    let mut sum = ctx.big(0.0);
    for x in &xs {
        sum = ctx.add(&sum, x);
    }
    let mean = ctx.div(&sum, &n);
    let mut ss = ctx.big(0.0);
    for x in &xs {
        let d = ctx.sub(x, &mean);
        ss = ctx.add(&ss, &ctx.mul(&d, &d));
    }
    let std = ctx.div(&ss, &n).sqrt(ctx.p, RM);
    let v: [BigFloat; 5] = [
        ctx.big(alpha),
        mean.clone(),
        mean.clone(),
        std.clone(),
        std.clone(),
    ];
    let g = grad_mp(&mut ctx, &v, &xs);
    let ll = to_f64(&loglik_mp(&mut ctx, &v, &xs));
    (
        [
            alpha,
            to_f64(&mean),
            to_f64(&mean),
            to_f64(&std),
            to_f64(&std),
        ],
        max_norm(&g),
        ll,
    )
}

/// 10^k in double precision without string parsing.
pub(crate) fn pow10_f64(k: i32) -> f64 {
    10f64.powi(k)
}
