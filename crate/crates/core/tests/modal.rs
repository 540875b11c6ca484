use proptest::prelude::*;
use sector_dra::modal::{
    enumerate_modes, resonant_frequency, wavenumbers, Family, ModeBounds, ModeSpec, SectorGeometry,
};
use sector_dra::SPEED_OF_LIGHT;
use std::f64::consts::PI;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn te210(g: &SectorGeometry) -> ModeSpec {
    ModeSpec::from_m(Family::TE, 1, 1, 0, g).unwrap()
}

fn eh110() -> ModeSpec {
    ModeSpec::explicit(Family::EH, 1.0, 1, 0).unwrap()
}

#[test]
fn published_mode_frequencies() {
    let g = SectorGeometry::reference();
    let f_te = resonant_frequency(&g, &te210(&g)).unwrap();
    let f_eh = resonant_frequency(&g, &eh110()).unwrap();
    assert!(rel(f_te, 6.12e9) < 5e-3, "{f_te}");
    assert!(rel(f_eh, 4.39e9) < 5e-3, "{f_eh}");
}

#[test]
fn frequency_matches_hand_evaluation() {
    // c/(2π√12.85)·√((5.1356/a)² + (2/a)²) with the four-digit root
    let g = SectorGeometry::reference();
    let hand =
        SPEED_OF_LIGHT / (2.0 * PI * 12.85f64.sqrt()) * ((5.1356f64 / 0.012).powi(2) + (2.0f64 / 0.012).powi(2)).sqrt();
    let f = resonant_frequency(&g, &te210(&g)).unwrap();
    assert!(rel(f, hand) < 1e-5);
}

#[test]
fn frequency_decreases_with_radius() {
    let base = SectorGeometry::reference();
    for mode in [te210(&base), eh110(), ModeSpec::from_m(Family::TE, 0, 2, 0, &base).unwrap()] {
        let mut prev = f64::INFINITY;
        for i in 0..=36 {
            let a = 6e-3 + 0.5e-3 * i as f64;
            let f = resonant_frequency(&base.with_radius(a), &mode).unwrap();
            assert!(f < prev, "a={a}");
            prev = f;
        }
    }
}

#[test]
fn permittivity_scaling() {
    let g = SectorGeometry::reference();
    let doubled = SectorGeometry { eps_r: 2.0 * g.eps_r, ..g };
    for mode in [te210(&g), eh110(), ModeSpec { p: 1, ..te210(&g) }] {
        let f1 = resonant_frequency(&g, &mode).unwrap();
        let f2 = resonant_frequency(&doubled, &mode).unwrap();
        assert!(rel(f2, f1 / 2f64.sqrt()) < 1e-12);
    }
}

#[test]
fn axial_index_raises_frequency() {
    let g = SectorGeometry::reference();
    for m in 0..4 {
        for n in 1..4 {
            let p0 = ModeSpec::from_m(Family::TE, m, n, 0, &g).unwrap();
            let p1 = ModeSpec { p: 1, ..p0 };
            assert!(resonant_frequency(&g, &p1).unwrap() > resonant_frequency(&g, &p0).unwrap());
        }
    }
}

#[test]
fn enumeration_contains_both_published_modes() {
    let g = SectorGeometry::reference();
    let bounds = ModeBounds { m_max: 3, n_max: 3, p_max: 1 };
    let list = enumerate_modes(&g, 7e9, bounds, &[eh110()]).unwrap();
    assert!(list.iter().any(|e| e.mode.v == 1.0 && rel(e.f_hz, 4.39e9) < 5e-3));
    assert!(list.iter().any(|e| e.mode.v == 2.0 && e.mode.n == 1 && rel(e.f_hz, 6.12e9) < 5e-3));
    for w in list.windows(2) {
        assert!(w[0].f_hz <= w[1].f_hz);
    }
    // lowest mode is TE_011 (v = 0): X01/a alone
    assert_eq!(list[0].mode.v, 0.0);
}

#[test]
fn enumeration_is_exhaustive_and_unique() {
    let g = SectorGeometry::reference();
    let bounds = ModeBounds { m_max: 4, n_max: 3, p_max: 1 };
    let f_max = 40e9;
    let list = enumerate_modes(&g, f_max, bounds, &[]).unwrap();
    let mut expected = 0;
    for m in 0..=4 {
        for n in 1..=3 {
            for p in 0..=1 {
                let mode = ModeSpec::from_m(Family::TE, m, n, p, &g).unwrap();
                let f = resonant_frequency(&g, &mode).unwrap();
                if f <= f_max {
                    expected += 1;
                    let hits = list.iter().filter(|e| e.mode.m() == Some(m) && e.mode.n == n && e.mode.p == p).count();
                    assert_eq!(hits, 1, "m={m} n={n} p={p}");
                }
            }
        }
    }
    assert_eq!(list.len(), expected);
}

#[test]
fn enumeration_ties_follow_index_order() {
    // full disk with m = 0 duplicated explicitly: identical (v, n, p) keeps one entry
    let g = SectorGeometry::reference();
    let dup = ModeSpec::explicit(Family::TE, 0.0, 1, 0).unwrap();
    let list = enumerate_modes(&g, 7e9, ModeBounds { m_max: 1, n_max: 1, p_max: 0 }, &[dup]).unwrap();
    assert_eq!(list.iter().filter(|e| e.mode.v == 0.0).count(), 1);
    assert!(list[0].mode.is_derived());
}

proptest! {
    #[test]
    fn composition_identity(
        a_mm in 3.0f64..40.0,
        h_mm in 0.5f64..20.0,
        sector_deg in 10.0f64..360.0,
        eps_r in 1.0f64..100.0,
        m in 0u32..5,
        n in 1u32..5,
        p in 0u32..3,
    ) {
        let g = SectorGeometry::new(a_mm * 1e-3, h_mm * 1e-3, sector_deg.to_radians(), eps_r).unwrap();
        let mode = ModeSpec::from_m(Family::TE, m, n, p, &g).unwrap();
        let k = wavenumbers(&g, &mode).unwrap();
        let f = resonant_frequency(&g, &mode).unwrap();
        prop_assert!(k.k_r >= 0.0 && k.k_phi >= 0.0 && k.k_z >= 0.0);
        prop_assert!(rel(k.k, 2.0 * PI * f * eps_r.sqrt() / SPEED_OF_LIGHT) < 1e-12);
        prop_assert!(rel(k.k * k.k, k.k_r * k.k_r + k.k_phi * k.k_phi + k.k_z * k.k_z) < 1e-14);
    }

    #[test]
    fn radius_homogeneity(a_mm in 3.0f64..40.0, scale in 1.1f64..5.0, m in 0u32..4, n in 1u32..4) {
        let g = SectorGeometry::quarter(a_mm * 1e-3, 2.54e-3, 12.85).unwrap();
        let mode = ModeSpec::from_m(Family::TE, m, n, 0, &g).unwrap();
        let f1 = resonant_frequency(&g, &mode).unwrap();
        let f2 = resonant_frequency(&g.with_radius(g.a * scale), &mode).unwrap();
        prop_assert!(rel(f2, f1 / scale) < 1e-13);
    }
}
