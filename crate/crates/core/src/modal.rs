//! Sector geometry, mode bookkeeping and the resonant-frequency model.

use crate::error::{domain, Error, Result};
use crate::specfun::{bessel_zero, BesselOrder};
use crate::SPEED_OF_LIGHT;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

/// Physical description of the dielectric sector, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorGeometry {
    /// Radius, m.
    pub a: f64,
    /// Height, m.
    pub h: f64,
    /// Sector opening angle, rad.
    pub phi0: f64,
    pub eps_r: f64,
}

impl SectorGeometry {
    pub fn new(a: f64, h: f64, phi0: f64, eps_r: f64) -> Result<Self> {
        let g = Self { a, h, phi0, eps_r };
        g.validate()?;
        Ok(g)
    }

    /// Quarter sector (metalized faces at φ = 0 and φ = π/2).
    pub fn quarter(a: f64, h: f64, eps_r: f64) -> Result<Self> {
        Self::new(a, h, PI / 2.0, eps_r)
    }

    /// The optimized quarter sector: a = 12 mm, h = 2.54 mm, ε_r = 12.85.
    pub fn reference() -> Self {
        Self { a: 12e-3, h: 2.54e-3, phi0: PI / 2.0, eps_r: 12.85 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.h, self.phi0, self.eps_r].iter().all(|x| x.is_finite());
        if !finite {
            return Err(domain("geometry parameters must be finite"));
        }
        if self.a <= 0.0 {
            return Err(domain(format!("radius must be positive, got {}", self.a)));
        }
        if self.h <= 0.0 {
            return Err(domain(format!("height must be positive, got {}", self.h)));
        }
        if !(self.phi0 > 0.0 && self.phi0 <= 2.0 * PI) {
            return Err(domain(format!("sector angle must lie in (0, 2π], got {}", self.phi0)));
        }
        if self.eps_r < 1.0 {
            return Err(domain(format!("relative permittivity must be ≥ 1, got {}", self.eps_r)));
        }
        Ok(())
    }

    pub fn with_radius(self, a: f64) -> Self {
        Self { a, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    TE,
    EH,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::TE => "TE",
            Family::EH => "EH",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TE" => Ok(Family::TE),
            "EH" => Ok(Family::EH),
            other => Err(domain(format!("unknown mode family {other:?} (expected TE or EH)"))),
        }
    }
}

/// Where a mode's azimuthal order came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VSource {
    /// v = m·π/φ0 from the metal face conditions.
    DerivedFromM(u32),
    /// v given verbatim, e.g. the odd-order hybrid mode of the quarter sector.
    Explicit,
}

/// Mode identity. TE and EH share the same numerics; the family is a label.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub family: Family,
    pub v: f64,
    pub n: u32,
    pub p: u32,
    pub v_source: VSource,
}

impl ModeSpec {
    /// Mode whose order follows from the face conditions of `geom`.
    pub fn from_m(family: Family, m: u32, n: u32, p: u32, geom: &SectorGeometry) -> Result<Self> {
        let v = azimuthal_order(m, geom.phi0)?;
        Self { family, v, n, p, v_source: VSource::DerivedFromM(m) }.validated()
    }

    /// Mode with an explicitly chosen azimuthal order.
    pub fn explicit(family: Family, v: f64, n: u32, p: u32) -> Result<Self> {
        Self { family, v, n, p, v_source: VSource::Explicit }.validated()
    }

    fn validated(self) -> Result<Self> {
        if !self.v.is_finite() || self.v < 0.0 {
            return Err(domain(format!("azimuthal order must be finite and ≥ 0, got {}", self.v)));
        }
        if self.n == 0 {
            return Err(domain("radial index n must be at least 1"));
        }
        Ok(self)
    }

    pub fn m(&self) -> Option<u32> {
        match self.v_source {
            VSource::DerivedFromM(m) => Some(m),
            VSource::Explicit => None,
        }
    }

    pub fn is_derived(&self) -> bool {
        matches!(self.v_source, VSource::DerivedFromM(_))
    }

    pub fn label(&self) -> String {
        format!("{}(v={},n={},p={})", self.family, self.v, self.n, self.p)
    }
}

/// Radial, azimuthal and axial wavenumbers (rad/m) and their composition
/// k² = k_r² + k_φ² + k_z².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavenumbers {
    pub k_r: f64,
    pub k_phi: f64,
    pub k_z: f64,
    pub k: f64,
}

impl Wavenumbers {
    fn compose(k_r: f64, k_phi: f64, k_z: f64) -> Self {
        let k = (k_r * k_r + k_phi * k_phi + k_z * k_z).sqrt();
        Self { k_r, k_phi, k_z, k }
    }
}

/// v = m·π/φ0.
pub fn azimuthal_order(m: u32, phi0: f64) -> Result<f64> {
    if !(phi0 > 0.0) || !phi0.is_finite() {
        return Err(domain(format!("sector angle must be positive, got {phi0}")));
    }
    Ok(m as f64 * (PI / phi0))
}

pub fn wavenumbers(geom: &SectorGeometry, mode: &ModeSpec) -> Result<Wavenumbers> {
    geom.validate()?;
    let x_vn = bessel_zero(BesselOrder::new(mode.v)?, mode.n)?;
    let k_r = x_vn / geom.a;
    let k_phi = mode.v / geom.a;
    let k_z = mode.p as f64 * PI / geom.h;
    Ok(Wavenumbers::compose(k_r, k_phi, k_z))
}

/// f = c/(2π√ε_r) · √((X_vn/a)² + (v/a)² + (pπ/h)²), in Hz.
pub fn resonant_frequency(geom: &SectorGeometry, mode: &ModeSpec) -> Result<f64> {
    let k = wavenumbers(geom, mode)?;
    Ok(frequency_from_k(k.k, geom.eps_r))
}

pub(crate) fn frequency_from_k(k: f64, eps_r: f64) -> f64 {
    SPEED_OF_LIGHT / (2.0 * PI * eps_r.sqrt()) * k
}

/// Inclusive index bounds for mode enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeBounds {
    pub m_max: u32,
    pub n_max: u32,
    pub p_max: u32,
}

/// A mode together with its resonant frequency in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeFrequency {
    pub mode: ModeSpec,
    pub f_hz: f64,
}

/// All modes m ∈ [0, m_max], n ∈ [1, n_max], p ∈ [0, p_max] with frequency
/// ≤ `f_max`, plus any `explicit` modes under the cutoff, ascending by
/// frequency. Ties fall back to (v, n, p), which orders derived modes by
/// (m, n, p). An explicit mode duplicating a derived (v, n, p) is dropped.
pub fn enumerate_modes(
    geom: &SectorGeometry,
    f_max: f64,
    bounds: ModeBounds,
    explicit: &[ModeSpec],
) -> Result<Vec<ModeFrequency>> {
    geom.validate()?;
    if !(f_max > 0.0) {
        return Err(domain(format!("frequency cutoff must be positive, got {f_max}")));
    }
    if bounds.m_max < 1 || bounds.n_max < 1 {
        return Err(domain("mode bounds require m_max ≥ 1 and n_max ≥ 1"));
    }

    let mut out = Vec::new();
    for m in 0..=bounds.m_max {
        for n in 1..=bounds.n_max {
            for p in 0..=bounds.p_max {
                let mode = ModeSpec::from_m(Family::TE, m, n, p, geom)?;
                let f_hz = resonant_frequency(geom, &mode)?;
                if f_hz <= f_max {
                    out.push(ModeFrequency { mode, f_hz });
                }
            }
        }
    }
    for mode in explicit {
        let duplicate =
            out.iter().any(|e| e.mode.v.to_bits() == mode.v.to_bits() && e.mode.n == mode.n && e.mode.p == mode.p);
        if duplicate {
            continue;
        }
        let f_hz = resonant_frequency(geom, mode)?;
        if f_hz <= f_max {
            out.push(ModeFrequency { mode: *mode, f_hz });
        }
    }
    out.sort_by(|x, y| {
        x.f_hz
            .total_cmp(&y.f_hz)
            .then(x.mode.v.total_cmp(&y.mode.v))
            .then(x.mode.n.cmp(&y.mode.n))
            .then(x.mode.p.cmp(&y.mode.p))
            .then_with(|| match (x.mode.is_derived(), y.mode.is_derived()) {
                (true, false) => Ordering::Less,
                (false, true) => Ordering::Greater,
                _ => Ordering::Equal,
            })
    });
    Ok(out)
}

/// Geometry document in presentation units. Unknown keys are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryDoc {
    pub radius_mm: f64,
    pub height_mm: f64,
    pub sector_deg: f64,
    pub eps_r: f64,
}

impl GeometryDoc {
    pub fn to_geometry(&self) -> Result<SectorGeometry> {
        SectorGeometry::new(self.radius_mm * 1e-3, self.height_mm * 1e-3, self.sector_deg.to_radians(), self.eps_r)
    }

    pub fn from_json(text: &str) -> Result<SectorGeometry> {
        let doc: GeometryDoc =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("geometry document: {e}")))?;
        doc.to_geometry()
    }
}

impl From<&SectorGeometry> for GeometryDoc {
    fn from(g: &SectorGeometry) -> Self {
        Self { radius_mm: g.a * 1e3, height_mm: g.h * 1e3, sector_deg: g.phi0.to_degrees(), eps_r: g.eps_r }
    }
}

/// Mode document: `{"family": "EH", "v": 1, "n": 1, "p": 0}` or with `m`
/// in place of `v`. When both are present `v` wins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeDoc {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    pub n: u32,
    pub p: u32,
}

impl ModeDoc {
    pub fn to_mode(&self, geom: &SectorGeometry) -> Result<ModeSpec> {
        match (self.v, self.m) {
            (Some(v), _) => ModeSpec::explicit(self.family, v, self.n, self.p),
            (None, Some(m)) => ModeSpec::from_m(self.family, m, self.n, self.p, geom),
            (None, None) => Err(domain("mode needs either m or v")),
        }
    }

    pub fn from_json(text: &str, geom: &SectorGeometry) -> Result<ModeSpec> {
        let doc: ModeDoc = serde_json::from_str(text).map_err(|e| Error::Format(format!("mode document: {e}")))?;
        doc.to_mode(geom)
    }
}

/// Parses `FAMILY:v=…|m=…,n=…,p=…`, e.g. `TE:m=1,n=1,p=0` or `EH:v=1,n=1,p=0`.
pub fn parse_mode(text: &str, geom: &SectorGeometry) -> Result<ModeSpec> {
    let bad = |why: &str| Error::Format(format!("mode {text:?}: {why}"));
    let (family, rest) = text.split_once(':').ok_or_else(|| bad("expected FAMILY:key=value,…"))?;
    let family: Family = family.trim().parse()?;
    let mut doc = ModeDoc { family, m: None, v: None, n: 0, p: 0 };
    let mut have_n = false;
    let mut have_p = false;
    for part in rest.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let value = value.trim();
        match key.trim() {
            "v" => doc.v = Some(value.parse().map_err(|_| bad("v is not a number"))?),
            "m" => doc.m = Some(value.parse().map_err(|_| bad("m is not a non-negative integer"))?),
            "n" => {
                doc.n = value.parse().map_err(|_| bad("n is not a positive integer"))?;
                have_n = true;
            }
            "p" => {
                doc.p = value.parse().map_err(|_| bad("p is not a non-negative integer"))?;
                have_p = true;
            }
            other => return Err(bad(&format!("unknown key {other:?}"))),
        }
    }
    if !have_n || !have_p {
        return Err(bad("both n and p are required"));
    }
    doc.to_mode(geom)
}
