//! Command-line front end. Each subcommand is a thin adapter over the
//! `sector_dra` library; [`run`] returns the emitted document so the binary
//! only has to route it to a file or stdout.

pub mod svg;
pub mod table;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sector_dra::design::{self, SweepParam, SweepSpec};
use sector_dra::fields::{self, GridFormat};
use sector_dra::modal::{self, GeometryDoc, ModeBounds, ModeSpec, SectorGeometry};
use sector_dra::oracle;
use sector_dra::sar::{self, AveragingMass, LimitKind, Standard, TissueGrid};
use std::path::PathBuf;
use table::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "sector-dra", version, about = "Modal analysis of sectoral cylindrical dielectric resonator antennas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the document here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    /// Only for `sweep` and `field`.
    Svg,
}

/// Geometry from inline flags (mm, degrees) or a JSON document; not both.
#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    #[arg(long, conflicts_with_all = ["radius_mm", "height_mm", "sector_deg", "eps_r"])]
    pub geometry: Option<PathBuf>,
    #[arg(long)]
    pub radius_mm: Option<f64>,
    #[arg(long)]
    pub height_mm: Option<f64>,
    #[arg(long)]
    pub sector_deg: Option<f64>,
    #[arg(long)]
    pub eps_r: Option<f64>,
}

impl GeometryArgs {
    /// Unset inline flags fall back to the 12 mm / 2.54 mm / 90° / 12.85 design.
    pub fn resolve(&self) -> anyhow::Result<SectorGeometry> {
        if let Some(path) = &self.geometry {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(GeometryDoc::from_json(&text)?);
        }
        let base = GeometryDoc::from(&SectorGeometry::reference());
        let doc = GeometryDoc {
            radius_mm: self.radius_mm.unwrap_or(base.radius_mm),
            height_mm: self.height_mm.unwrap_or(base.height_mm),
            sector_deg: self.sector_deg.unwrap_or(base.sector_deg),
            eps_r: self.eps_r.unwrap_or(base.eps_r),
        };
        Ok(doc.to_geometry()?)
    }
}

/// Checks `FAMILY:v=…|m=…,n=…,p=…` syntax at parse time; `m` is resolved
/// against the real geometry later.
fn mode_syntax(text: &str) -> Result<String, String> {
    modal::parse_mode(text, &SectorGeometry::reference()).map(|_| text.to_string()).map_err(|e| e.to_string())
}

fn resolve_modes(texts: &[String], geom: &SectorGeometry) -> anyhow::Result<Vec<ModeSpec>> {
    Ok(texts.iter().map(|t| modal::parse_mode(t, geom)).collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StandardArg {
    Ieee,
    Ecc,
}

impl From<StandardArg> for Standard {
    fn from(s: StandardArg) -> Self {
        match s {
            StandardArg::Ieee => Standard::IeeeC95_1,
            StandardArg::Ecc => Standard::EccCept,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MassArg {
    #[value(name = "1g")]
    OneGram,
    #[value(name = "10g")]
    TenGrams,
}

impl From<MassArg> for AveragingMass {
    fn from(m: MassArg) -> Self {
        match m {
            MassArg::OneGram => AveragingMass::OneGram,
            MassArg::TenGrams => AveragingMass::TenGrams,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Average,
    Peak,
}

impl From<KindArg> for LimitKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Average => LimitKind::Average,
            KindArg::Peak => LimitKind::Peak,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParamArg {
    /// mm
    Radius,
    /// mm
    Height,
    EpsR,
    /// degrees
    Sector,
}

impl ParamArg {
    fn to_si(self, value: f64) -> (SweepParam, f64) {
        match self {
            ParamArg::Radius => (SweepParam::Radius, value * 1e-3),
            ParamArg::Height => (SweepParam::Height, value * 1e-3),
            ParamArg::EpsR => (SweepParam::EpsR, value),
            ParamArg::Sector => (SweepParam::SectorAngle, value.to_radians()),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resonant frequency of one or more modes.
    #[command(allow_negative_numbers = true)]
    Freq {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// FAMILY:v=…|m=…,n=…,p=… (repeatable)
        #[arg(long, required = true, value_parser = mode_syntax)]
        mode: Vec<String>,
    },
    /// All modes below a cutoff, ascending by frequency.
    #[command(allow_negative_numbers = true)]
    Modes {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long)]
        fmax_ghz: f64,
        #[arg(long, default_value_t = 3)]
        m_max: u32,
        #[arg(long, default_value_t = 3)]
        n_max: u32,
        #[arg(long, default_value_t = 1)]
        p_max: u32,
        /// Extra explicit-order modes to include (repeatable).
        #[arg(long, value_parser = mode_syntax)]
        mode: Vec<String>,
    },
    /// Sample the six field components on a uniform grid, peak |H_z| = 1.
    #[command(allow_negative_numbers = true)]
    Field {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, value_parser = mode_syntax)]
        mode: String,
        #[arg(long, default_value_t = 33)]
        n_r: usize,
        #[arg(long, default_value_t = 33)]
        n_phi: usize,
        #[arg(long, default_value_t = 1)]
        n_z: usize,
    },
    /// Finite-difference check of the analytic transverse wavenumbers.
    #[command(allow_negative_numbers = true)]
    Oracle {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Peak mass-averaged SAR of a voxel grid.
    Sar {
        /// Grid file: JSON, or CSV together with --header.
        #[arg(long)]
        grid: PathBuf,
        /// JSON header (shape, voxel_m, p_in_w) for a CSV grid.
        #[arg(long)]
        header: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MassArg::TenGrams)]
        mass: MassArg,
    },
    /// Largest input power that keeps SAR under a regulatory limit.
    #[command(allow_negative_numbers = true)]
    Power {
        #[arg(long)]
        pin_w: f64,
        /// Achieved averaged SAR at --pin-w, W/kg.
        #[arg(long)]
        sar: f64,
        #[arg(long, value_enum)]
        standard: StandardArg,
        #[arg(long, value_enum)]
        mass: MassArg,
        #[arg(long, value_enum, default_value_t = KindArg::Average)]
        kind: KindArg,
    },
    /// Resonant frequency over a range of one geometry parameter.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, value_enum)]
        param: ParamArg,
        /// In mm for radius/height, degrees for sector.
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, required = true, value_parser = mode_syntax)]
        mode: Vec<String>,
    },
    /// Radius that puts a mode at a target frequency.
    #[command(allow_negative_numbers = true)]
    Design {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long)]
        target_ghz: f64,
        #[arg(long, value_parser = mode_syntax)]
        mode: String,
        #[arg(long, default_value_t = 1.0)]
        lo_mm: f64,
        #[arg(long, default_value_t = 100.0)]
        hi_mm: f64,
    },
}

pub const MODE_COLUMNS: [&str; 7] = ["family", "m", "v", "n", "p", "f_hz", "f_ghz"];

fn mode_row(mode: &ModeSpec, f_hz: f64) -> Vec<Cell> {
    vec![
        mode.family.to_string().into(),
        mode.m().map(Cell::from).unwrap_or_else(|| "".into()),
        mode.v.into(),
        mode.n.into(),
        mode.p.into(),
        f_hz.into(),
        (f_hz / 1e9).into(),
    ]
}

fn emit(table: &Table, format: Format) -> anyhow::Result<String> {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
        Format::Svg => bail!("--format svg is only available for `sweep` and `field`"),
    }
}

impl Cli {
    /// Flag combinations clap cannot express on its own.
    pub fn check_usage(&self) -> Result<(), clap::Error> {
        let plots = matches!(self.command, Command::Sweep { .. } | Command::Field { .. });
        if self.format == Format::Svg && !plots {
            let mut cmd = <Cli as clap::CommandFactory>::command();
            return Err(cmd.error(
                clap::error::ErrorKind::ArgumentConflict,
                "--format svg is only available for `sweep` and `field`",
            ));
        }
        Ok(())
    }
}

/// Runs one invocation and returns the document for the output stream.
pub fn run(cli: &Cli) -> anyhow::Result<String> {
    let format = cli.format;
    match &cli.command {
        Command::Freq { geometry, mode } => {
            let geom = geometry.resolve()?;
            let mut table = Table::new(&MODE_COLUMNS);
            for m in resolve_modes(mode, &geom)? {
                table.push(mode_row(&m, modal::resonant_frequency(&geom, &m)?));
            }
            emit(&table, format)
        }
        Command::Modes { geometry, fmax_ghz, m_max, n_max, p_max, mode } => {
            let geom = geometry.resolve()?;
            let explicit = resolve_modes(mode, &geom)?;
            let bounds = ModeBounds { m_max: *m_max, n_max: *n_max, p_max: *p_max };
            let mut table = Table::new(&MODE_COLUMNS);
            for e in modal::enumerate_modes(&geom, fmax_ghz * 1e9, bounds, &explicit)? {
                table.push(mode_row(&e.mode, e.f_hz));
            }
            emit(&table, format)
        }
        Command::Field { geometry, mode, n_r, n_phi, n_z } => {
            let geom = geometry.resolve()?;
            let mode = modal::parse_mode(mode, &geom)?;
            let grid = fields::sample_grid(&geom, &mode, *n_r, *n_phi, *n_z)?;
            match format {
                Format::Csv => Ok(fields::export_grid(&grid, GridFormat::Csv)?),
                Format::Json => Ok(fields::export_grid(&grid, GridFormat::Json)?),
                Format::Svg => {
                    let hz: Vec<f64> = grid.samples[..n_r * n_phi].iter().map(|s| s.h_z.norm()).collect();
                    let title = format!("|Hz| of {} at z = 0", mode.label());
                    Ok(svg::polar_heatmap(&title, geom.a, geom.phi0, *n_r, *n_phi, &hz))
                }
            }
        }
        Command::Oracle { geometry, count, resolution } => {
            let geom = geometry.resolve()?;
            let mut table = Table::new(&["m", "v", "n", "analytic_k_r", "fd_k_t", "rel_error"]);
            for c in oracle::compare_modes(&geom, *count, *resolution)? {
                table.push(vec![
                    c.m.into(),
                    c.v.into(),
                    c.n.into(),
                    c.analytic_k_r.into(),
                    c.fd_k_t.into(),
                    c.rel_error.into(),
                ]);
            }
            emit(&table, format)
        }
        Command::Sar { grid, header, mass } => {
            let tissue = TissueGrid::load(grid, header.as_deref())?;
            let mass = AveragingMass::from(*mass);
            let r = sar::averaged_sar(&tissue, mass.kg())?;
            let mut table =
                Table::new(&["mass_kg", "peak_avg_w_per_kg", "center", "ix", "iy", "iz", "half_width", "cube_mass_kg"]);
            let [ix, iy, iz] = r.center_xyz;
            table.push(vec![
                mass.kg().into(),
                r.peak_avg.into(),
                r.center.into(),
                ix.into(),
                iy.into(),
                iz.into(),
                r.half_width.into(),
                r.cube_mass.into(),
            ]);
            emit(&table, format)
        }
        Command::Power { pin_w, sar: achieved, standard, mass, kind } => {
            let limit = sar::limit_lookup((*standard).into(), (*mass).into(), (*kind).into())?;
            let p_max = sar::max_allowed_power(*pin_w, *achieved, &limit)?;
            let mut table = Table::new(&["standard", "mass", "kind", "limit_w_per_kg", "p_max_w"]);
            table.push(vec![
                limit.standard.to_string().into(),
                limit.mass.to_string().into(),
                limit.kind.to_string().into(),
                limit.value.into(),
                p_max.into(),
            ]);
            emit(&table, format)
        }
        Command::Sweep { geometry, param, start, stop, steps, mode } => {
            let geom = geometry.resolve()?;
            let (p, start_si) = param.to_si(*start);
            let (_, stop_si) = param.to_si(*stop);
            let spec = SweepSpec {
                param: p,
                start: start_si,
                stop: stop_si,
                steps: *steps,
                modes: resolve_modes(mode, &geom)?,
            };
            let rows = design::sweep(&geom, &spec)?;
            match format {
                Format::Csv => Ok(design::sweep_csv(&rows)?),
                Format::Json => {
                    let mut table = Table::new(&design::SWEEP_CSV_COLUMNS);
                    for r in &rows {
                        table.push(vec![
                            r.param_name.name().into(),
                            r.param_value.into(),
                            r.family.to_string().into(),
                            r.v.into(),
                            r.n.into(),
                            r.p.into(),
                            r.f_hz.into(),
                        ]);
                    }
                    table.to_json()
                }
                Format::Svg => {
                    let per_mode = spec.modes.len();
                    let series: Vec<(String, Vec<(f64, f64)>)> = (0..per_mode)
                        .map(|k| {
                            let pts =
                                rows.iter().skip(k).step_by(per_mode).map(|r| (r.param_value, r.f_hz / 1e9)).collect();
                            (spec.modes[k].label(), pts)
                        })
                        .collect();
                    let x_label = format!("{} (SI units)", p.name());
                    Ok(svg::line_chart("Resonant frequency sweep", &x_label, "f (GHz)", &series))
                }
            }
        }
        Command::Design { geometry, target_ghz, mode, lo_mm, hi_mm } => {
            let geom = geometry.resolve()?;
            let mode = modal::parse_mode(mode, &geom)?;
            let a = design::solve_radius(target_ghz * 1e9, &geom, &mode, (lo_mm * 1e-3, hi_mm * 1e-3))?;
            let f = modal::resonant_frequency(&geom.with_radius(a), &mode)?;
            let mut table = Table::new(&["family", "v", "n", "p", "radius_m", "radius_mm", "f_hz"]);
            table.push(vec![
                mode.family.to_string().into(),
                mode.v.into(),
                mode.n.into(),
                mode.p.into(),
                a.into(),
                (a * 1e3).into(),
                f.into(),
            ]);
            emit(&table, format)
        }
    }
}
