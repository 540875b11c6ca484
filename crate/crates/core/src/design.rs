//! Parametric sweeps and radius inversion of the resonant-frequency model.

use crate::error::{domain, Error, Result};
use crate::modal::{azimuthal_order, resonant_frequency, Family, ModeSpec, SectorGeometry, VSource};
use serde::{Deserialize, Serialize};
use std::fmt;

const BISECTION_CAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// meters
    Radius,
    /// meters
    Height,
    EpsR,
    /// radians
    SectorAngle,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Radius => "radius",
            SweepParam::Height => "height",
            SweepParam::EpsR => "eps_r",
            SweepParam::SectorAngle => "sector_angle",
        }
    }

    fn apply(self, base: &SectorGeometry, value: f64) -> SectorGeometry {
        let mut g = *base;
        match self {
            SweepParam::Radius => g.a = value,
            SweepParam::Height => g.h = value,
            SweepParam::EpsR => g.eps_r = value,
            SweepParam::SectorAngle => g.phi0 = value,
        }
        g
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radius" => Ok(SweepParam::Radius),
            "height" => Ok(SweepParam::Height),
            "eps_r" | "eps-r" => Ok(SweepParam::EpsR),
            "sector_angle" | "sector-angle" | "sector" => Ok(SweepParam::SectorAngle),
            other => Err(domain(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

/// Sweep of one parameter over `steps` uniformly spaced values, endpoints
/// included, for each listed mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub modes: Vec<ModeSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param_name: SweepParam,
    pub param_value: f64,
    pub family: Family,
    pub v: f64,
    pub n: u32,
    pub p: u32,
    pub f_hz: f64,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        (0..self.steps)
            .map(
                |i| {
                    if i + 1 == self.steps {
                        self.stop
                    } else {
                        self.start + span * (i as f64 / (self.steps - 1) as f64)
                    }
                },
            )
            .collect()
    }
}

/// Rows ordered by step, then by the order of `spec.modes`. Modes derived
/// from m follow the swept sector angle.
pub fn sweep(base: &SectorGeometry, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    base.validate()?;
    if !(spec.start < spec.stop) || !spec.start.is_finite() || !spec.stop.is_finite() {
        return Err(domain(format!("sweep needs finite start < stop, got {} .. {}", spec.start, spec.stop)));
    }
    if spec.steps < 2 {
        return Err(domain(format!("sweep needs at least 2 steps, got {}", spec.steps)));
    }
    if spec.modes.is_empty() {
        return Err(domain("sweep needs at least one mode"));
    }
    let mut rows = Vec::with_capacity(spec.steps * spec.modes.len());
    for (step, value) in spec.values().into_iter().enumerate() {
        let geom = spec.param.apply(base, value);
        geom.validate().map_err(|e| Error::InvalidSweepStep {
            step,
            param: spec.param.name(),
            value,
            reason: e.to_string(),
        })?;
        for mode in &spec.modes {
            let mode = match mode.v_source {
                VSource::DerivedFromM(m) => ModeSpec { v: azimuthal_order(m, geom.phi0)?, ..*mode },
                VSource::Explicit => *mode,
            };
            rows.push(SweepRow {
                param_name: spec.param,
                param_value: value,
                family: mode.family,
                v: mode.v,
                n: mode.n,
                p: mode.p,
                f_hz: resonant_frequency(&geom, &mode)?,
            });
        }
    }
    Ok(rows)
}

pub const SWEEP_CSV_COLUMNS: [&str; 7] = ["param_name", "param_value", "family", "v", "n", "p", "f_hz"];

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fmt_err = |e: csv::Error| Error::Format(e.to_string());
    w.write_record(SWEEP_CSV_COLUMNS).map_err(fmt_err)?;
    for r in rows {
        w.write_record([
            r.param_name.name().to_string(),
            crate::fields::format_f64(r.param_value),
            r.family.to_string(),
            crate::fields::format_f64(r.v),
            r.n.to_string(),
            r.p.to_string(),
            crate::fields::format_f64(r.f_hz),
        ])
        .map_err(fmt_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// Radius in `[a_lo, a_hi]` at which `mode` resonates at `target_f`, by
/// bisection on the decreasing map a ↦ f(a). Height, angle and permittivity
/// come from `base`.
pub fn solve_radius(target_f: f64, base: &SectorGeometry, mode: &ModeSpec, bracket: (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(target_f > 0.0 && target_f.is_finite()) {
        return Err(domain(format!("target frequency must be positive, got {target_f}")));
    }
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(domain(format!("radius bracket must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
    }
    let f = |a: f64| resonant_frequency(&base.with_radius(a), mode);
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo < f_hi {
        return Err(Error::NonMonotone { lo, hi });
    }
    if target_f > f_lo || target_f < f_hi {
        return Err(Error::BracketNoStraddle { lo, hi, target: target_f });
    }
    if target_f == f_lo {
        return Ok(lo);
    }
    if target_f == f_hi {
        return Ok(hi);
    }
    for _ in 0..BISECTION_CAP {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid > f_lo || f_mid < f_hi {
            return Err(Error::NonMonotone { lo, hi });
        }
        if f_mid > target_f {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
