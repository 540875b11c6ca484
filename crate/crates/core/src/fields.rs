//! Field components of the cavity model and their grid sampling.
//!
//! With the bottom-face and φ = 0 conditions applied (F = B = 0) the
//! longitudinal magnetic field is
//!
//! ```text
//! H_z = A·E · J_v(k_r r) cos(vφ) cos(k_z z)
//! ```
//!
//! and the transverse components follow from it with E_z = 0. Phasors use
//! the e^{+jωt} convention, so the quadrature components carry a factor +j.

use crate::error::{domain, Error, Result};
use crate::modal::{resonant_frequency, wavenumbers, ModeSpec, SectorGeometry, Wavenumbers};
use crate::specfun::{j_unchecked, jp_unchecked};
use crate::MU_0;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylPoint {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
}

impl CylPoint {
    pub fn new(r: f64, phi: f64, z: f64) -> Self {
        Self { r, phi, z }
    }
}

/// Six complex field components at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub at: CylPoint,
    pub e_r: Complex64,
    pub e_phi: Complex64,
    pub e_z: Complex64,
    pub h_r: Complex64,
    pub h_phi: Complex64,
    pub h_z: Complex64,
}

impl FieldSample {
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            at: self.at,
            e_r: self.e_r * s,
            e_phi: self.e_phi * s,
            e_z: self.e_z * s,
            h_r: self.h_r * s,
            h_phi: self.h_phi * s,
            h_z: self.h_z * s,
        }
    }

    pub fn components(&self) -> [Complex64; 6] {
        [self.e_r, self.e_phi, self.e_z, self.h_r, self.h_phi, self.h_z]
    }

    pub fn e_magnitude(&self) -> f64 {
        (self.e_r.norm_sqr() + self.e_phi.norm_sqr() + self.e_z.norm_sqr()).sqrt()
    }
}

/// A mode's field solution, ready for repeated evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FieldModel {
    geom: SectorGeometry,
    mode: ModeSpec,
    k: Wavenumbers,
    omega: f64,
    amplitude: f64,
}

impl FieldModel {
    /// Unit amplitude (A·E = 1).
    pub fn new(geom: &SectorGeometry, mode: &ModeSpec) -> Result<Self> {
        let k = wavenumbers(geom, mode)?;
        let omega = 2.0 * PI * resonant_frequency(geom, mode)?;
        Ok(Self { geom: *geom, mode: *mode, k, omega, amplitude: 1.0 })
    }

    pub fn with_amplitude(self, amplitude: f64) -> Self {
        Self { amplitude, ..self }
    }

    pub fn wavenumbers(&self) -> Wavenumbers {
        self.k
    }

    pub fn contains(&self, p: &CylPoint) -> bool {
        let g = &self.geom;
        (0.0..=g.a).contains(&p.r) && (0.0..=g.phi0).contains(&p.phi) && (0.0..=g.h).contains(&p.z)
    }

    fn check(&self, p: &CylPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { r: p.r, phi: p.phi, z: p.z })
        }
    }

    /// v·J_v(x)/x with its axis limit.
    fn v_j_over_x(&self, x: f64) -> Result<f64> {
        let v = self.mode.v;
        if v == 0.0 {
            return Ok(0.0);
        }
        if x > 0.0 {
            return Ok(v * j_unchecked(v, x) / x);
        }
        if v == 1.0 {
            Ok(0.5)
        } else if v > 1.0 {
            Ok(0.0)
        } else {
            Err(Error::SingularAxis { v })
        }
    }

    /// x·J'_v(x), which vanishes on the axis for every v ≥ 0.
    fn x_j_prime(&self, x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            x * jp_unchecked(self.mode.v, x)
        }
    }

    pub fn at(&self, p: &CylPoint) -> Result<FieldSample> {
        self.check(p)?;
        let Wavenumbers { k_r, k_z, .. } = self.k;
        let v = self.mode.v;
        let x = k_r * p.r;
        let amp = self.amplitude;

        let jv = j_unchecked(v, x);
        let cos_vphi = (v * p.phi).cos();
        let sin_vphi = (v * p.phi).sin();
        let axial = (k_z * p.z).cos();
        let kr2 = k_r * k_r;
        let omega_mu = self.omega * MU_0;

        // (1/r)·J_v(k_r r)·v = k_r · v·J_v(x)/x
        let radial_over_r = k_r * self.v_j_over_x(x)?;
        let radial_slope = self.x_j_prime(x);

        let j = Complex64::new(0.0, 1.0);
        Ok(FieldSample {
            at: *p,
            e_r: j * (omega_mu / kr2 * radial_over_r * sin_vphi * axial * amp),
            e_phi: j * (omega_mu / kr2 * radial_slope * cos_vphi * axial * amp),
            e_z: Complex64::new(0.0, 0.0),
            h_r: -j * (k_z / kr2 * radial_slope * cos_vphi * axial * amp),
            h_phi: j * (k_z / kr2 * radial_over_r * sin_vphi * axial * amp),
            h_z: Complex64::new(jv * cos_vphi * axial * amp, 0.0),
        })
    }

    /// ∂H_z/∂z.
    pub fn dhz_dz(&self, p: &CylPoint) -> Result<f64> {
        self.check(p)?;
        let k_z = self.k.k_z;
        let v = self.mode.v;
        Ok(-self.amplitude * k_z * j_unchecked(v, self.k.k_r * p.r) * (v * p.phi).cos() * (k_z * p.z).sin())
    }
}

/// Field at a single point with unit amplitude.
pub fn field_at(geom: &SectorGeometry, mode: &ModeSpec, point: &CylPoint) -> Result<FieldSample> {
    FieldModel::new(geom, mode)?.at(point)
}

/// Uniform nodes on [0, len], both endpoints included exactly.
fn nodes(len: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    (0..count).map(|i| len * (i as f64 / (count - 1) as f64)).collect()
}

/// Samples on a uniform (r, φ, z) lattice, stored z-major, then φ, then r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub geometry: SectorGeometry,
    pub mode: ModeSpec,
    pub n_r: usize,
    pub n_phi: usize,
    pub n_z: usize,
    pub samples: Vec<FieldSample>,
}

impl FieldGrid {
    pub fn index(&self, ir: usize, iphi: usize, iz: usize) -> usize {
        (iz * self.n_phi + iphi) * self.n_r + ir
    }

    pub fn get(&self, ir: usize, iphi: usize, iz: usize) -> &FieldSample {
        &self.samples[self.index(ir, iphi, iz)]
    }

    pub fn max_abs_hz(&self) -> f64 {
        self.samples.iter().map(|s| s.h_z.norm()).fold(0.0, f64::max)
    }
}

/// Evaluates the mode on a uniform grid and rescales it so max |H_z| = 1.
pub fn sample_grid(geom: &SectorGeometry, mode: &ModeSpec, n_r: usize, n_phi: usize, n_z: usize) -> Result<FieldGrid> {
    if n_r < 2 || n_phi < 2 {
        return Err(domain(format!("grid needs at least 2 radial and azimuthal nodes, got {n_r}×{n_phi}")));
    }
    if n_z == 0 || (n_z == 1 && mode.p != 0) {
        return Err(domain(format!("grid needs at least 2 axial nodes for p = {}, got {n_z}", mode.p)));
    }
    let model = FieldModel::new(geom, mode)?;
    let rs = nodes(geom.a, n_r);
    let phis = nodes(geom.phi0, n_phi);
    let zs = nodes(geom.h, n_z);

    let raw: Vec<FieldSample> = (0..n_r * n_phi * n_z)
        .into_par_iter()
        .map(|idx| {
            let ir = idx % n_r;
            let iphi = (idx / n_r) % n_phi;
            let iz = idx / (n_r * n_phi);
            model.at(&CylPoint::new(rs[ir], phis[iphi], zs[iz]))
        })
        .collect::<Result<_>>()?;

    let peak = raw.iter().map(|s| s.h_z.norm()).fold(0.0, f64::max);
    // unit amplitude bounds |H_z| by 1; anything this small is rounding noise
    if !(peak > 1e-12) {
        return Err(domain("H_z vanishes at every grid node; refine the grid"));
    }
    let scale = 1.0 / peak;
    let samples = raw.into_par_iter().map(|s| s.scaled(scale)).collect();
    Ok(FieldGrid { geometry: *geom, mode: *mode, n_r, n_phi, n_z, samples })
}

/// Supremum norms of the boundary-condition violations on boundary nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResiduals {
    /// max(|E_r|, |E_z|) on the face φ = 0.
    pub face_start_e_tan: f64,
    /// max(|E_r|, |E_z|) on the face φ = φ0.
    pub face_end_e_tan: f64,
    /// max |H_φ| on the arc r = a.
    pub arc_h_phi: f64,
    /// max |∂H_z/∂z| on z = 0 and z = h.
    pub caps_dhz_dz: f64,
}

impl BoundaryResiduals {
    pub fn faces(&self) -> f64 {
        self.face_start_e_tan.max(self.face_end_e_tan)
    }

    pub fn max(&self) -> f64 {
        self.faces().max(self.arc_h_phi).max(self.caps_dhz_dz)
    }
}

/// Checks the metal-face, magnetic-wall arc and cap conditions with unit
/// amplitude on `resolution` nodes per boundary coordinate.
pub fn boundary_residuals(geom: &SectorGeometry, mode: &ModeSpec, resolution: usize) -> Result<BoundaryResiduals> {
    if resolution < 8 {
        return Err(domain(format!("boundary resolution must be at least 8, got {resolution}")));
    }
    let model = FieldModel::new(geom, mode)?;
    let rs = nodes(geom.a, resolution);
    let phis = nodes(geom.phi0, resolution);
    let zs = nodes(geom.h, resolution);
    // the axis is a genuine singularity for 0 < v < 1; measure off it
    let r_start = usize::from(mode.v > 0.0 && mode.v < 1.0);

    let face = |phi: f64| -> Result<f64> {
        let mut worst = 0.0_f64;
        for &r in &rs[r_start..] {
            for &z in &zs {
                let s = model.at(&CylPoint::new(r, phi, z))?;
                worst = worst.max(s.e_r.norm()).max(s.e_z.norm());
            }
        }
        Ok(worst)
    };
    let face_start_e_tan = face(0.0)?;
    let face_end_e_tan = face(geom.phi0)?;

    let mut arc_h_phi = 0.0_f64;
    for &phi in &phis {
        for &z in &zs {
            arc_h_phi = arc_h_phi.max(model.at(&CylPoint::new(geom.a, phi, z))?.h_phi.norm());
        }
    }

    let mut caps_dhz_dz = 0.0_f64;
    for &z in &[0.0, geom.h] {
        for &r in &rs[r_start..] {
            for &phi in &phis {
                caps_dhz_dz = caps_dhz_dz.max(model.dhz_dz(&CylPoint::new(r, phi, z))?.abs());
            }
        }
    }

    Ok(BoundaryResiduals { face_start_e_tan, face_end_e_tan, arc_h_phi, caps_dhz_dz })
}

/// Max over interior nodes of |∇²_h H_z + (k_r² + k_z²) H_z|, divided by
/// k_r² + k_z², where ∇²_h is the second-order central-difference cylindrical
/// Laplacian. A single axial layer (p = 0) drops the z term.
pub fn helmholtz_residual(grid: &FieldGrid) -> Result<f64> {
    let (n_r, n_phi, n_z) = (grid.n_r, grid.n_phi, grid.n_z);
    if n_r < 3 || n_phi < 3 || n_z == 2 {
        return Err(domain("Helmholtz residual needs ≥ 3 nodes on each sampled axis"));
    }
    let g = &grid.geometry;
    let k = wavenumbers(g, &grid.mode)?;
    let lambda = k.k_r * k.k_r + k.k_z * k.k_z;
    let dr = g.a / (n_r - 1) as f64;
    let dphi = g.phi0 / (n_phi - 1) as f64;
    let dz = if n_z > 1 { g.h / (n_z - 1) as f64 } else { 0.0 };
    let hz = |ir: usize, ip: usize, iz: usize| grid.get(ir, ip, iz).h_z.re;

    let z_range = if n_z == 1 { 0..1 } else { 1..n_z - 1 };
    let mut worst = 0.0_f64;
    for iz in z_range {
        for ip in 1..n_phi - 1 {
            for ir in 1..n_r - 1 {
                let r = grid.get(ir, ip, iz).at.r;
                let c = hz(ir, ip, iz);
                let d_rr = (hz(ir + 1, ip, iz) - 2.0 * c + hz(ir - 1, ip, iz)) / (dr * dr);
                let d_r = (hz(ir + 1, ip, iz) - hz(ir - 1, ip, iz)) / (2.0 * dr);
                let d_pp = (hz(ir, ip + 1, iz) - 2.0 * c + hz(ir, ip - 1, iz)) / (dphi * dphi);
                let d_zz = if n_z == 1 { 0.0 } else { (hz(ir, ip, iz + 1) - 2.0 * c + hz(ir, ip, iz - 1)) / (dz * dz) };
                let lap = d_rr + d_r / r + d_pp / (r * r) + d_zz;
                worst = worst.max((lap + lambda * c).abs());
            }
        }
    }
    Ok(worst / lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFormat {
    Csv,
    Json,
}

pub const CSV_COLUMNS: [&str; 15] = [
    "r_m", "phi_rad", "z_m", "Er_re", "Er_im", "Ephi_re", "Ephi_im", "Ez_re", "Ez_im", "Hr_re", "Hr_im", "Hphi_re",
    "Hphi_im", "Hz_re", "Hz_im",
];

/// Shortest round-trip text; exponent form outside the comfortable range.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn grid_csv(grid: &FieldGrid, out: impl Write) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for s in &grid.samples {
        let mut row = vec![format_f64(s.at.r), format_f64(s.at.phi), format_f64(s.at.z)];
        for c in s.components() {
            row.push(format_f64(c.re));
            row.push(format_f64(c.im));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Serializes a grid as CSV (one row per node) or JSON (the whole grid).
pub fn export_grid(grid: &FieldGrid, format: GridFormat) -> Result<String> {
    match format {
        GridFormat::Csv => {
            let mut buf = Vec::new();
            grid_csv(grid, &mut buf).map_err(|e| Error::Format(e.to_string()))?;
            String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
        }
        GridFormat::Json => serde_json::to_string(grid).map_err(|e| Error::Format(e.to_string())),
    }
}

pub fn write_grid(grid: &FieldGrid, format: GridFormat, path: &Path) -> Result<()> {
    let text = export_grid(grid, format)?;
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn grid_from_json(text: &str) -> Result<FieldGrid> {
    let grid: FieldGrid = serde_json::from_str(text).map_err(|e| Error::Format(format!("field grid: {e}")))?;
    if grid.samples.len() != grid.n_r * grid.n_phi * grid.n_z {
        return Err(Error::Format("field grid: sample count does not match node counts".into()));
    }
    Ok(grid)
}
