//! Specific absorption rate: point values, cube-averaged peaks and the
//! regulatory power budget.

use crate::error::{domain, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// σ|E|²/ρ in W/kg.
pub fn point_sar(sigma: f64, e_mag: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(domain(format!("mass density must be positive, got {rho}")));
    }
    if !(sigma >= 0.0) || !(e_mag >= 0.0) {
        return Err(domain(format!(
            "conductivity and field magnitude must be non-negative, got σ={sigma}, |E|={e_mag}"
        )));
    }
    Ok(sigma * e_mag * e_mag / rho)
}

/// Voxelized tissue: conductivity (S/m), density (kg/m³) and field magnitude
/// (V/m) at input power `p_in_w`. Arrays are flattened x-major:
/// index = (ix·ny + iy)·nz + iz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TissueGrid {
    pub shape: [usize; 3],
    pub voxel_m: f64,
    pub p_in_w: f64,
    pub sigma: Vec<f64>,
    pub rho: Vec<f64>,
    pub e_mag: Vec<f64>,
}

/// Header of a CSV-backed grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TissueHeader {
    pub shape: [usize; 3],
    pub voxel_m: f64,
    pub p_in_w: f64,
}

impl TissueGrid {
    pub fn new(
        shape: [usize; 3],
        voxel_m: f64,
        p_in_w: f64,
        sigma: Vec<f64>,
        rho: Vec<f64>,
        e_mag: Vec<f64>,
    ) -> Result<Self> {
        let g = Self { shape, voxel_m, p_in_w, sigma, rho, e_mag };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let n: usize = self.shape.iter().product();
        if n == 0 {
            return Err(domain("tissue grid shape has a zero dimension"));
        }
        if self.sigma.len() != n || self.rho.len() != n || self.e_mag.len() != n {
            return Err(domain(format!(
                "tissue arrays must all hold {n} values (got σ {}, ρ {}, |E| {})",
                self.sigma.len(),
                self.rho.len(),
                self.e_mag.len()
            )));
        }
        if !(self.voxel_m > 0.0 && self.voxel_m.is_finite()) {
            return Err(domain(format!("voxel edge must be positive, got {}", self.voxel_m)));
        }
        if !(self.p_in_w > 0.0 && self.p_in_w.is_finite()) {
            return Err(domain(format!("reference input power must be positive, got {}", self.p_in_w)));
        }
        if let Some(i) = self.sigma.iter().position(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(domain(format!("conductivity at voxel {i} must be finite and ≥ 0")));
        }
        if let Some(i) = self.rho.iter().position(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(domain(format!("density at voxel {i} must be finite and > 0")));
        }
        if let Some(i) = self.e_mag.iter().position(|e| !(*e >= 0.0 && e.is_finite())) {
            return Err(domain(format!("field magnitude at voxel {i} must be finite and ≥ 0")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.shape[1] + iy) * self.shape[2] + iz
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let [_, ny, nz] = self.shape;
        [idx / (ny * nz), (idx / nz) % ny, idx % nz]
    }

    pub fn voxel_volume(&self) -> f64 {
        self.voxel_m.powi(3)
    }

    pub fn voxel_mass(&self, idx: usize) -> f64 {
        self.rho[idx] * self.voxel_volume()
    }

    pub fn point_sar(&self, idx: usize) -> f64 {
        self.sigma[idx] * self.e_mag[idx] * self.e_mag[idx] / self.rho[idx]
    }

    pub fn total_mass(&self) -> f64 {
        (0..self.len()).map(|i| self.voxel_mass(i)).sum()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: Self = serde_json::from_str(text).map_err(|e| Error::Format(format!("tissue grid: {e}")))?;
        g.validate()?;
        Ok(g)
    }

    /// CSV rows `sigma,rho,e_mag` (optionally preceded by a voxel `index`
    /// column, which must count up from 0) with a header row.
    pub fn from_csv(header: TissueHeader, csv_text: &str) -> Result<Self> {
        let fmt = |msg: String| Error::Format(format!("tissue CSV: {msg}"));
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(csv_text.as_bytes());
        let names: Vec<String> = reader.headers().map_err(|e| fmt(e.to_string()))?.iter().map(str::to_string).collect();
        let indexed = match names.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
            ["sigma", "rho", "e_mag"] => false,
            ["index", "sigma", "rho", "e_mag"] => true,
            other => return Err(fmt(format!("unexpected columns {other:?}"))),
        };
        let (mut sigma, mut rho, mut e_mag) = (Vec::new(), Vec::new(), Vec::new());
        for (row, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| fmt(e.to_string()))?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .unwrap_or("")
                    .parse::<f64>()
                    .map_err(|_| fmt(format!("row {}: column {} is not a number", row + 1, i + 1)))
            };
            let off = usize::from(indexed);
            if indexed {
                let idx: usize =
                    rec.get(0).unwrap_or("").parse().map_err(|_| fmt(format!("row {}: bad index", row + 1)))?;
                if idx != row {
                    return Err(fmt(format!("row {} carries index {idx}", row + 1)));
                }
            }
            sigma.push(num(off)?);
            rho.push(num(off + 1)?);
            e_mag.push(num(off + 2)?);
        }
        Self::new(header.shape, header.voxel_m, header.p_in_w, sigma, rho, e_mag)
    }

    /// Reads `path` as JSON, or as CSV when `header` names a sidecar JSON header.
    pub fn load(path: &Path, header: Option<&Path>) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|source| Error::Io { path: p.to_path_buf(), source });
        match header {
            None => Self::from_json(&read(path)?),
            Some(h) => {
                let header: TissueHeader =
                    serde_json::from_str(&read(h)?).map_err(|e| Error::Format(format!("tissue header: {e}")))?;
                Self::from_csv(header, &read(path)?)
            }
        }
    }
}

/// Result of cube averaging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedSar {
    /// Highest mass-averaged SAR over all cube centers, W/kg.
    pub peak_avg: f64,
    /// Linear index of the winning center voxel.
    pub center: usize,
    pub center_xyz: [usize; 3],
    /// Cube half-width in voxels (side 2w+1 before clipping at the grid edge).
    pub half_width: usize,
    /// Mass of the winning cube, kg.
    pub cube_mass: f64,
}

/// Clipped cube [c−w, c+w]³ ∩ grid.
fn cube_bounds(grid: &TissueGrid, c: [usize; 3], w: usize) -> [(usize, usize); 3] {
    let mut out = [(0, 0); 3];
    for d in 0..3 {
        out[d] = (c[d].saturating_sub(w), (c[d] + w).min(grid.shape[d] - 1));
    }
    out
}

/// Mass and mass-weighted SAR sum over a cube, summed in ascending (x, y, z).
fn cube_sums(grid: &TissueGrid, b: [(usize, usize); 3]) -> (f64, f64) {
    let (mut mass, mut weighted) = (0.0, 0.0);
    for ix in b[0].0..=b[0].1 {
        for iy in b[1].0..=b[1].1 {
            for iz in b[2].0..=b[2].1 {
                let i = grid.index(ix, iy, iz);
                let m = grid.voxel_mass(i);
                mass += m;
                weighted += m * grid.point_sar(i);
            }
        }
    }
    (mass, weighted)
}

/// 3-D inclusive prefix sums of voxel mass, used only to skip cube sizes that
/// are clearly too light.
struct MassPrefix {
    dims: [usize; 3],
    p: Vec<f64>,
}

impl MassPrefix {
    fn new(grid: &TissueGrid) -> Self {
        let [nx, ny, nz] = grid.shape;
        let dims = [nx + 1, ny + 1, nz + 1];
        let at = |x: usize, y: usize, z: usize| (x * dims[1] + y) * dims[2] + z;
        let mut p = vec![0.0; dims.iter().product()];
        for x in 1..=nx {
            for y in 1..=ny {
                for z in 1..=nz {
                    p[at(x, y, z)] = grid.voxel_mass(grid.index(x - 1, y - 1, z - 1))
                        + p[at(x - 1, y, z)]
                        + p[at(x, y - 1, z)]
                        + p[at(x, y, z - 1)]
                        - p[at(x - 1, y - 1, z)]
                        - p[at(x - 1, y, z - 1)]
                        - p[at(x, y - 1, z - 1)]
                        + p[at(x - 1, y - 1, z - 1)];
                }
            }
        }
        Self { dims, p }
    }

    fn cube_mass(&self, b: [(usize, usize); 3]) -> f64 {
        let at = |x: usize, y: usize, z: usize| self.p[(x * self.dims[1] + y) * self.dims[2] + z];
        let (x0, x1) = (b[0].0, b[0].1 + 1);
        let (y0, y1) = (b[1].0, b[1].1 + 1);
        let (z0, z1) = (b[2].0, b[2].1 + 1);
        at(x1, y1, z1) - at(x0, y1, z1) - at(x1, y0, z1) - at(x1, y1, z0)
            + at(x0, y0, z1)
            + at(x0, y1, z0)
            + at(x1, y0, z0)
            - at(x0, y0, z0)
    }
}

/// Peak mass-averaged SAR. For every voxel a centered cube grows one voxel
/// layer at a time (clipped at the grid boundary) until its mass reaches
/// `mass_target`; the cube's mass-weighted mean SAR is that center's value.
/// Ties between centers go to the lowest linear index.
pub fn averaged_sar(grid: &TissueGrid, mass_target: f64) -> Result<AveragedSar> {
    grid.validate()?;
    if !(mass_target > 0.0 && mass_target.is_finite()) {
        return Err(domain(format!("averaging mass must be positive, got {mass_target}")));
    }
    let total = grid.total_mass();
    if total < mass_target {
        return Err(Error::InsufficientMass { total_kg: total, target_kg: mass_target });
    }
    let prefix = MassPrefix::new(grid);
    let max_w = *grid.shape.iter().max().unwrap_or(&1);
    // prefix sums carry rounding of order ε·total; anything this far below the
    // target cannot pass the exact check
    let skip_below = mass_target * (1.0 - 1e-9);

    let per_center: Vec<(f64, usize, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let c = grid.coords(idx);
            let mut w = 0;
            while w < max_w && prefix.cube_mass(cube_bounds(grid, c, w)) < skip_below {
                w += 1;
            }
            loop {
                let (mass, weighted) = cube_sums(grid, cube_bounds(grid, c, w));
                if mass >= mass_target || w >= max_w {
                    return (weighted / mass, w, mass);
                }
                w += 1;
            }
        })
        .collect();

    let mut best = 0;
    for (i, entry) in per_center.iter().enumerate() {
        if entry.0 > per_center[best].0 {
            best = i;
        }
    }
    let (peak_avg, half_width, cube_mass) = per_center[best];
    Ok(AveragedSar { peak_avg, center: best, center_xyz: grid.coords(best), half_width, cube_mass })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Standard {
    #[serde(rename = "IEEE_C95_1")]
    IeeeC95_1,
    #[serde(rename = "ECC_CEPT")]
    EccCept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AveragingMass {
    #[serde(rename = "1g")]
    OneGram,
    #[serde(rename = "10g")]
    TenGrams,
}

impl AveragingMass {
    pub fn kg(self) -> f64 {
        match self {
            AveragingMass::OneGram => 1e-3,
            AveragingMass::TenGrams => 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitKind {
    Average,
    Peak,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SarLimit {
    pub standard: Standard,
    pub mass: AveragingMass,
    pub kind: LimitKind,
    /// W/kg
    pub value: f64,
}

impl fmt::Display for Standard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Standard::IeeeC95_1 => "IEEE C95.1",
            Standard::EccCept => "ECC/CEPT",
        })
    }
}

impl fmt::Display for AveragingMass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AveragingMass::OneGram => "1 g",
            AveragingMass::TenGrams => "10 g",
        })
    }
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::Average => "average",
            LimitKind::Peak => "peak",
        })
    }
}

/// The published limits. Nothing outside this table is guessed.
pub const LIMITS: [SarLimit; 5] = [
    SarLimit { standard: Standard::IeeeC95_1, mass: AveragingMass::OneGram, kind: LimitKind::Average, value: 1.6 },
    SarLimit { standard: Standard::IeeeC95_1, mass: AveragingMass::TenGrams, kind: LimitKind::Average, value: 2.0 },
    SarLimit { standard: Standard::IeeeC95_1, mass: AveragingMass::OneGram, kind: LimitKind::Peak, value: 4.0 },
    SarLimit { standard: Standard::EccCept, mass: AveragingMass::OneGram, kind: LimitKind::Average, value: 1.6 },
    SarLimit { standard: Standard::EccCept, mass: AveragingMass::TenGrams, kind: LimitKind::Average, value: 2.0 },
];

pub fn limit_lookup(standard: Standard, mass: AveragingMass, kind: LimitKind) -> Result<SarLimit> {
    LIMITS
        .iter()
        .find(|l| l.standard == standard && l.mass == mass && l.kind == kind)
        .copied()
        .ok_or_else(|| Error::UnknownLimit(format!("{standard} {kind} over {mass}")))
}

/// P_max = P_in · SAR_limit / SAR_achieved.
pub fn max_allowed_power(p_in: f64, sar_achieved: f64, limit: &SarLimit) -> Result<f64> {
    if !(p_in > 0.0 && p_in.is_finite()) {
        return Err(domain(format!("input power must be positive, got {p_in}")));
    }
    if !(sar_achieved > 0.0 && sar_achieved.is_finite()) {
        return Err(domain(format!("achieved SAR must be positive, got {sar_achieved}")));
    }
    Ok(p_in * (limit.value / sar_achieved))
}
