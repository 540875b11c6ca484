//! Bessel functions of the first kind for real order and real argument.
//!
//! Small arguments (x² ≤ 4(v+1), where every series term shrinks) use the
//! ascending power series. Everything else uses Steed's method: a continued
//! fraction for J'/J at the requested order, downward recurrence to a
//! fractional order μ < 1 + x, and the complex continued fraction for
//! (J + iY) at μ, normalized with the Wronskian.

use super::gamma::{gamma, ln_gamma};
use crate::error::{domain, Error, Result};
use std::f64::consts::PI;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 100_000;

/// Non-negative, finite order v of J_v.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(v: f64) -> Result<Self> {
        if !v.is_finite() || v < 0.0 {
            return Err(domain(format!("Bessel order must be finite and non-negative, got {v}")));
        }
        Ok(Self(v))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for BesselOrder {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

fn check_arg(x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(domain(format!("Bessel argument must be finite and non-negative, got {x}")));
    }
    Ok(())
}

/// J_v(x) for x ≥ 0.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(j_unchecked(order.0, x))
}

/// dJ_v/dx.
///
/// At x = 0 only the orders with a finite, order-independent limit are
/// accepted: v = 0 (slope 0) and v = 1 (slope 1/2).
pub fn bessel_j_prime(order: BesselOrder, x: f64) -> Result<f64> {
    check_arg(x)?;
    let v = order.0;
    if x == 0.0 {
        return if v == 0.0 {
            Ok(0.0)
        } else if v == 1.0 {
            Ok(0.5)
        } else {
            Err(domain(format!("J'_{v}(0) is only defined here for v = 0 or v = 1")))
        };
    }
    Ok(jp_unchecked(v, x))
}

pub(crate) fn jp_unchecked(v: f64, x: f64) -> f64 {
    if v >= 1.0 {
        j_unchecked(v - 1.0, x) - v / x * j_unchecked(v, x)
    } else {
        // J_{v-1} would need a negative order; the companion recurrence is equivalent.
        v / x * j_unchecked(v, x) - j_unchecked(v + 1.0, x)
    }
}

pub(crate) fn j_unchecked(v: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if v == 0.0 { 1.0 } else { 0.0 };
    }
    if x * x <= 4.0 * (v + 1.0) {
        series(v, x)
    } else {
        steed(v, x)
    }
}

/// Ascending series Σ (-1)^k (x/2)^{2k+v} / (k! Γ(k+v+1)).
pub(crate) fn series(v: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term =
        if v + 1.0 < 140.0 { half.powf(v) / gamma(v + 1.0) } else { (v * half.ln() - ln_gamma(v + 1.0)).exp() };
    let q = half * half;
    let mut sum = term;
    for k in 1..500 {
        let kf = k as f64;
        term *= -q / (kf * (kf + v));
        sum += term;
        if term.abs() <= EPS * 0.25 * sum.abs() {
            break;
        }
    }
    sum
}

/// Steed's method for x ≥ 2 (NR `bessjy`, J branch only).
fn steed(v: f64, x: f64) -> f64 {
    let nl = (v - x + 1.5).floor().max(0.0) as usize;
    let mu = v - nl as f64;
    let xi = 1.0 / x;

    let (h, sign) = cf1(v, x);

    // Downward recurrence from v to mu on unnormalized values.
    let jl_top = sign;
    let mut jl = jl_top;
    let mut jpl = h * jl;
    let mut log_scale = 0.0_f64;
    let mut fact = v * xi;
    for _ in 0..nl {
        let tmp = fact * jl + jpl;
        fact -= xi;
        jpl = fact * tmp - jl;
        jl = tmp;
        if jl.abs() > 1e200 {
            jl *= 1e-200;
            jpl *= 1e-200;
            log_scale += 200.0 * std::f64::consts::LN_10;
        }
    }
    if jl == 0.0 {
        jl = EPS;
    }
    let jmu = cf2_normalization(mu, x, jpl / jl, jl);
    jl_top * (jmu / jl) * (-log_scale).exp()
}

/// J'_v/J_v by modified Lentz, with the sign of J_v relative to the
/// continued fraction's starting value.
fn cf1(v: f64, x: f64) -> (f64, f64) {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mut sign = 1.0;
    let mut h = (v * xi).max(FPMIN);
    let mut b = xi2 * v;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAX_ITER {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            sign = -sign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (h, sign)
}

/// CF2 for p + iq = (J' + iY')/(J + iY) at order mu, then the Wronskian
/// fixes |J_mu|; its sign follows the unnormalized recurrence value.
fn cf2_normalization(mu: f64, x: f64, f: f64, sign_ref: f64) -> f64 {
    let xi = 1.0 / x;
    let w = 2.0 * xi / PI;
    let mut a = 0.25 - mu * mu;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut tmp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = tmp;
    for i in 2..MAX_ITER {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di = -di / den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        tmp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = tmp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            break;
        }
    }
    let gam = (p - f) / q;
    let jmu = (w / ((p - f) * gam + q)).sqrt();
    jmu.copysign(sign_ref)
}
