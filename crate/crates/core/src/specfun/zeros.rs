//! Positive zeros of J_v.

use super::bessel::{j_unchecked, jp_unchecked, BesselOrder};
use crate::error::{domain, Error, Result};
use std::f64::consts::PI;

const ABS_TOL: f64 = 1e-10;
const SCAN_STEP: f64 = 1.0;
const MAX_REFINE: usize = 200;

/// The n-th positive zero X_vn of J_v (n ≥ 1).
///
/// Zeros are counted by a sign-change scan starting at x = v (J_v > 0 on
/// (0, X_v1) and X_v1 > v). Consecutive zeros are more than 2.9 apart for
/// every v ≥ 0, so a unit step never hides a pair. The bracketing interval is
/// then refined by Newton from the McMahon estimate, falling back to bisection
/// whenever a step leaves the bracket.
pub fn bessel_zero(order: BesselOrder, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(domain("Bessel zero index n must be at least 1"));
    }
    let v = order.value();
    let (lo, hi) = bracket(v, n)?;
    refine(v, n, lo, hi)
}

fn bracket(v: f64, n: u32) -> Result<(f64, f64)> {
    let mut found = 0;
    let mut a = v;
    let mut fa = j_unchecked(v, a);
    let budget = (v + (n as f64 + 2.0) * PI) / SCAN_STEP + 16.0;
    for _ in 0..budget as usize {
        let b = a + SCAN_STEP;
        let fb = j_unchecked(v, b);
        if fb == 0.0 {
            found += 1;
            if found == n {
                return Ok((b, b));
            }
        } else if fa != 0.0 && fa.signum() != fb.signum() {
            found += 1;
            if found == n {
                return Ok((a, b));
            }
        }
        a = b;
        fa = fb;
    }
    Err(Error::Convergence { what: "Bessel zero bracketing", iterations: budget as usize })
}

fn refine(v: f64, n: u32, mut lo: f64, mut hi: f64) -> Result<f64> {
    if lo == hi {
        return Ok(lo);
    }
    let mut f_lo = j_unchecked(v, lo);
    let mcmahon = (n as f64 + 0.5 * v - 0.25) * PI;
    let mut x = if mcmahon > lo && mcmahon < hi { mcmahon } else { 0.5 * (lo + hi) };
    for _ in 0..MAX_REFINE {
        let fx = j_unchecked(v, x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        let dfx = jp_unchecked(v, x);
        let newton = x - fx / dfx;
        let step_ok = dfx != 0.0 && newton > lo && newton < hi;
        let next = if step_ok { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() < 1e-3 * ABS_TOL || hi - lo < ABS_TOL * 1e-3 {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Convergence { what: "Bessel zero refinement", iterations: MAX_REFINE })
}
