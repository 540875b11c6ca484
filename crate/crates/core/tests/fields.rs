use sector_dra::fields::{
    boundary_residuals, export_grid, field_at, grid_from_json, helmholtz_residual, sample_grid, write_grid, CylPoint,
    FieldModel, GridFormat, CSV_COLUMNS,
};
use sector_dra::modal::{Family, ModeSpec, SectorGeometry};
use sector_dra::Error;
use std::f64::consts::PI;

fn reference() -> SectorGeometry {
    SectorGeometry::reference()
}

fn te210(g: &SectorGeometry) -> ModeSpec {
    ModeSpec::from_m(Family::TE, 1, 1, 0, g).unwrap()
}

#[test]
fn boundary_conditions_hold_for_derived_modes() {
    let g = reference();
    for m in 0..=3 {
        for n in 1..=3 {
            for p in 0..=1 {
                let mode = ModeSpec::from_m(Family::TE, m, n, p, &g).unwrap();
                let res = boundary_residuals(&g, &mode, 17).unwrap();
                assert!(res.max() < 1e-9, "m={m} n={n} p={p}: {res:?}");
                if p == 0 {
                    assert_eq!(res.caps_dhz_dz, 0.0);
                }
            }
        }
    }
}

#[test]
fn odd_order_violates_the_far_face() {
    let g = reference();
    let eh = ModeSpec::explicit(Family::EH, 1.0, 1, 0).unwrap();
    let res = boundary_residuals(&g, &eh, 16).unwrap();
    assert!(res.face_start_e_tan < 1e-9);
    // sin(v·π/2) = 1 on the second face
    assert!(res.face_end_e_tan > 1.0, "{res:?}");
    assert!(res.arc_h_phi < 1e-9);

    // the reported value is the peak of |ωμ v J_1(k_r r)/(k_r² r)| along the face
    let model = FieldModel::new(&g, &eh).unwrap();
    let mut peak = 0.0_f64;
    for i in 0..16 {
        let r = g.a * i as f64 / 15.0;
        peak = peak.max(model.at(&CylPoint::new(r, PI / 2.0, 0.0)).unwrap().e_r.norm());
    }
    assert_eq!(res.face_end_e_tan, peak);
}

#[test]
fn ez_vanishes_everywhere() {
    let g = reference();
    for mode in [te210(&g), ModeSpec::from_m(Family::TE, 2, 1, 1, &g).unwrap()] {
        let grid = sample_grid(&g, &mode, 9, 9, 5).unwrap();
        assert!(grid.samples.iter().all(|s| s.e_z.re == 0.0 && s.e_z.im == 0.0));
        assert!(grid.samples.iter().all(|s| s.components().iter().all(|c| c.re.is_finite() && c.im.is_finite())));
    }
}

#[test]
fn grid_normalization() {
    let g = reference();
    let grid = sample_grid(&g, &te210(&g), 21, 17, 1).unwrap();
    assert!((grid.max_abs_hz() - 1.0).abs() < 1e-9);
    let p1 = ModeSpec { p: 1, ..te210(&g) };
    let grid = sample_grid(&g, &p1, 9, 9, 9).unwrap();
    assert!((grid.max_abs_hz() - 1.0).abs() < 1e-9);
}

#[test]
fn linear_in_amplitude() {
    let g = reference();
    for mode in [te210(&g), ModeSpec::from_m(Family::TE, 1, 2, 1, &g).unwrap()] {
        let unit = FieldModel::new(&g, &mode).unwrap();
        let scaled = unit.with_amplitude(2.5);
        for &(r, phi, z) in &[(0.3, 0.2, 0.1), (0.9, 1.3, 0.7), (0.0, 0.5, 0.0), (1.0, 1.0, 1.0)] {
            let p = CylPoint::new(r * g.a, phi, z * g.h);
            let a = unit.at(&p).unwrap();
            let b = scaled.at(&p).unwrap();
            for (x, y) in a.components().iter().zip(b.components()) {
                assert!((x * 2.5 - y).norm() <= 1e-15 * (1.0 + y.norm()));
            }
        }
    }
}

#[test]
fn fields_satisfy_transverse_relations() {
    // E_φ ∝ x·J'_v(x): at the first extremum of J_v it vanishes
    let g = reference();
    let mode = te210(&g);
    let k_r = FieldModel::new(&g, &mode).unwrap().wavenumbers().k_r;
    // J_2' has its first zero at 3.0542; inside the sector since X21 = 5.1356
    let r = 3.054_236_928_227_14 / k_r;
    let s = field_at(&g, &mode, &CylPoint::new(r, 0.4, 0.0)).unwrap();
    assert!(
        s.e_phi.norm() < 1e-9 * field_at(&g, &mode, &CylPoint::new(0.5 * r, 0.4, 0.0)).unwrap().e_phi.norm().max(1.0)
    );
}

fn residual_ratio(mode: &ModeSpec, n_coarse: usize, n_z: usize) -> (f64, f64) {
    let g = reference();
    let coarse = sample_grid(&g, mode, n_coarse, n_coarse, n_z).unwrap();
    let nz_fine = if n_z == 1 { 1 } else { 2 * n_z - 1 };
    let fine = sample_grid(&g, mode, 2 * n_coarse - 1, 2 * n_coarse - 1, nz_fine).unwrap();
    (helmholtz_residual(&coarse).unwrap(), helmholtz_residual(&fine).unwrap())
}

#[test]
fn helmholtz_residual_is_second_order() {
    let g = reference();
    for mode in [te210(&g), ModeSpec::from_m(Family::TE, 0, 1, 0, &g).unwrap()] {
        let (coarse, fine) = residual_ratio(&mode, 17, 1);
        assert!(coarse / fine >= 3.5, "{}: {coarse} / {fine}", mode.label());
    }
    let p1 = ModeSpec::from_m(Family::TE, 1, 1, 1, &g).unwrap();
    let (coarse, fine) = residual_ratio(&p1, 17, 9);
    assert!(coarse / fine >= 3.5, "p=1: {coarse} / {fine}");
}

#[test]
fn csv_export_layout() {
    let g = reference();
    let grid = sample_grid(&g, &te210(&g), 9, 9, 1).unwrap();
    let text = export_grid(&grid, GridFormat::Csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 82);
    assert_eq!(lines[0], CSV_COLUMNS.join(","));
    assert_eq!(
        lines[0],
        "r_m,phi_rad,z_m,Er_re,Er_im,Ephi_re,Ephi_im,Ez_re,Ez_im,Hr_re,Hr_im,Hphi_re,Hphi_im,Hz_re,Hz_im"
    );
    // r varies fastest, then phi
    let row = |i: usize| -> Vec<f64> { lines[i + 1].split(',').map(|x| x.parse().unwrap()).collect() };
    assert_eq!(row(0)[0], 0.0);
    assert_eq!(row(8)[0], g.a);
    assert_eq!(row(9)[0], 0.0);
    assert!(row(9)[1] > 0.0);
    // values round-trip to the stored samples
    for (i, s) in grid.samples.iter().enumerate() {
        let r = row(i);
        assert_eq!(r[13], s.h_z.re);
        assert_eq!(r[4], s.e_r.im);
    }
}

#[test]
fn json_round_trip_is_bitwise() {
    let g = reference();
    let grid = sample_grid(&g, &ModeSpec::from_m(Family::TE, 2, 2, 1, &g).unwrap(), 7, 6, 5).unwrap();
    let text = export_grid(&grid, GridFormat::Json).unwrap();
    let back = grid_from_json(&text).unwrap();
    assert_eq!(back.samples.len(), grid.samples.len());
    for (a, b) in grid.samples.iter().zip(&back.samples) {
        for (x, y) in a.components().iter().zip(b.components()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        assert_eq!(a.at, b.at);
    }
    assert_eq!(back, grid);
}

#[test]
fn sampling_is_deterministic() {
    let g = reference();
    let mode = ModeSpec::from_m(Family::TE, 3, 2, 1, &g).unwrap();
    let a = sample_grid(&g, &mode, 15, 13, 7).unwrap();
    let b = sample_grid(&g, &mode, 15, 13, 7).unwrap();
    assert_eq!(export_grid(&a, GridFormat::Json).unwrap(), export_grid(&b, GridFormat::Json).unwrap());
}

#[test]
fn write_errors_carry_the_path() {
    let g = reference();
    let grid = sample_grid(&g, &te210(&g), 9, 9, 1).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let ok = dir.path().join("grid.csv");
    write_grid(&grid, GridFormat::Csv, &ok).unwrap();
    assert!(std::fs::read_to_string(&ok).unwrap().starts_with("r_m,"));
    let bad = dir.path().join("missing").join("grid.csv");
    match write_grid(&grid, GridFormat::Csv, &bad) {
        Err(e @ Error::Io { .. }) => assert!(e.to_string().contains("missing")),
        other => panic!("expected Io error, got {other:?}"),
    }
}
