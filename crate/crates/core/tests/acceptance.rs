//! Release acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sector_dra::design::{solve_radius, sweep, SweepParam, SweepSpec};
use sector_dra::fields::{boundary_residuals, helmholtz_residual, sample_grid};
use sector_dra::modal::{resonant_frequency, Family, ModeSpec, SectorGeometry};
use sector_dra::oracle::{fd_transverse_eigs, FdProblem};
use sector_dra::sar::{averaged_sar, limit_lookup, max_allowed_power, AveragingMass, LimitKind, Standard, TissueGrid};
use sector_dra::specfun::{bessel_zero, BesselOrder};
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn te210(g: &SectorGeometry) -> ModeSpec {
    ModeSpec::from_m(Family::TE, 1, 1, 0, g).unwrap()
}

fn eh110() -> ModeSpec {
    ModeSpec::explicit(Family::EH, 1.0, 1, 0).unwrap()
}

fn anchor(mode: ModeSpec, expected: f64) -> Verdict {
    let g = SectorGeometry::reference();
    let (f, dt) = timed(|| resonant_frequency(&g, &mode).unwrap());
    let err = rel(f, expected);
    verdict(err < 5e-3 && dt < Duration::from_millis(1), format!("f = {:.4} GHz, rel err {err:.2e}, {dt:?}", f / 1e9))
}

// Power series with a term-product recursion and 1/Γ(v+1) from the integer
// factorial, so it is independent of the library's gamma and Steed paths.
fn series_j(v: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = (0.5 * x).powi(v as i32) / (1..=v).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= -q / (k as f64 * (k as f64 + v as f64));
        sum += term;
        if term.abs() < 1e-22 {
            break;
        }
    }
    sum
}

fn bisect_zero(v: u32, mut lo: f64, mut hi: f64) -> f64 {
    let s_lo = series_j(v, lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if series_j(v, mid).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn bessel_zeros() -> Verdict {
    let ((x11, x21), dt) = timed(|| {
        (
            bessel_zero(BesselOrder::new(1.0).unwrap(), 1).unwrap(),
            bessel_zero(BesselOrder::new(2.0).unwrap(), 1).unwrap(),
        )
    });
    let o11 = bisect_zero(1, 3.0, 4.5);
    let o21 = bisect_zero(2, 4.5, 6.0);
    let pass = (x11 - 3.8317).abs() < 1e-4
        && (x21 - 5.1356).abs() < 1e-4
        && (x11 - o11).abs() < 1e-9
        && (x21 - o21).abs() < 1e-9
        && dt < Duration::from_millis(10);
    verdict(
        pass,
        format!(
            "X11 = {x11:.10} (oracle Δ {:.1e}), X21 = {x21:.10} (oracle Δ {:.1e}), {dt:?}",
            (x11 - o11).abs(),
            (x21 - o21).abs()
        ),
    )
}

fn power_budget() -> Verdict {
    let limit = limit_lookup(Standard::IeeeC95_1, AveragingMass::TenGrams, LimitKind::Average).unwrap();
    let p = max_allowed_power(1.0, 53.3, &limit).unwrap();
    let err = rel(p, 0.0375);
    verdict(err < 2e-3, format!("P_max = {:.3} mW, rel err {err:.2e}", p * 1e3))
}

fn fd_convergence() -> Verdict {
    let exact = [
        bessel_zero(BesselOrder::new(0.0).unwrap(), 1).unwrap(),
        bessel_zero(BesselOrder::new(2.0).unwrap(), 1).unwrap(),
        bessel_zero(BesselOrder::new(0.0).unwrap(), 2).unwrap(),
    ];
    let mut errors = Vec::new();
    let mut last_time = Duration::ZERO;
    for res in [64, 128, 256] {
        let problem = FdProblem::new(1.0, PI / 2.0, res, res).unwrap();
        let (eigs, dt) = timed(|| fd_transverse_eigs(&problem, 3));
        let eigs = match eigs {
            Ok(e) => e,
            Err(e) => return verdict(false, format!("{res}²: {e}")),
        };
        errors.push(eigs.iter().zip(exact).map(|(k, x)| rel(*k, x)).collect::<Vec<_>>());
        last_time = dt;
    }
    let final_ok = errors[2].iter().all(|&e| e < 0.01);
    let ratios: Vec<f64> =
        (0..2).flat_map(|s| (0..3).map(move |i| (s, i))).map(|(s, i)| errors[s][i] / errors[s + 1][i]).collect();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    verdict(
        final_ok && min_ratio >= 3.5 && last_time < Duration::from_secs(60),
        format!(
            "256² errors {:.2e}/{:.2e}/{:.2e}, min ratio {min_ratio:.3}, 256² in {last_time:.2?}",
            errors[2][0], errors[2][1], errors[2][2]
        ),
    )
}

fn boundary_suite() -> Verdict {
    let g = SectorGeometry::reference();
    let (worst, dt) = timed(|| {
        let mut worst = 0.0_f64;
        for m in 0..=3 {
            for n in 1..=3 {
                for p in 0..=1 {
                    let mode = ModeSpec::from_m(Family::TE, m, n, p, &g).unwrap();
                    let res = boundary_residuals(&g, &mode, 33).unwrap();
                    worst = worst.max(res.faces()).max(res.arc_h_phi);
                    let grid = sample_grid(&g, &mode, 33, 33, 33).unwrap();
                    for s in &grid.samples {
                        worst = worst.max(s.e_z.norm());
                    }
                }
            }
        }
        worst
    });
    verdict(worst < 1e-9 && dt < Duration::from_secs(5), format!("worst residual {worst:.2e} over 32 modes, {dt:.2?}"))
}

fn helmholtz() -> Verdict {
    let g = SectorGeometry::reference();
    let mut parts = Vec::new();
    let mut pass = true;
    for mode in [te210(&g), ModeSpec::from_m(Family::TE, 0, 1, 0, &g).unwrap()] {
        let coarse = helmholtz_residual(&sample_grid(&g, &mode, 17, 17, 1).unwrap()).unwrap();
        let fine = helmholtz_residual(&sample_grid(&g, &mode, 33, 33, 1).unwrap()).unwrap();
        let ratio = coarse / fine;
        pass &= ratio >= 3.5;
        parts.push(format!("{} ratio {ratio:.3}", mode.label()));
    }
    verdict(pass, parts.join(", "))
}

fn radius_trend() -> Verdict {
    let g = SectorGeometry::reference();
    let spec =
        SweepSpec { param: SweepParam::Radius, start: 8e-3, stop: 16e-3, steps: 17, modes: vec![te210(&g), eh110()] };
    let rows = sweep(&g, &spec).unwrap();
    let mut pass = rows.len() == 34;
    for k in 0..2 {
        let f: Vec<f64> = rows.iter().skip(k).step_by(2).map(|r| r.f_hz).collect();
        pass &= f.windows(2).all(|w| w[1] < w[0]);
    }
    verdict(
        pass,
        format!(
            "TE {:.3}→{:.3} GHz, EH {:.3}→{:.3} GHz",
            rows[0].f_hz / 1e9,
            rows[32].f_hz / 1e9,
            rows[1].f_hz / 1e9,
            rows[33].f_hz / 1e9
        ),
    )
}

fn sar_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0808);
    let shape = [8, 8, 8];
    let n: usize = 512;
    let sigma: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
    let rho: Vec<f64> = (0..n).map(|_| rng.random_range(900.0..1100.0)).collect();
    let e_mag: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..80.0)).collect();
    let voxel = 1e-3;
    let grid = TissueGrid::new(shape, voxel, 1.0, sigma.clone(), rho.clone(), e_mag.clone()).unwrap();
    let target = 2e-4;
    let got = averaged_sar(&grid, target).unwrap();

    // exhaustive enumeration, summing each cube in ascending (x, y, z)
    let vol = voxel * voxel * voxel;
    let mut best = (f64::NEG_INFINITY, 0usize);
    for c in 0..n {
        let (cx, cy, cz) = (c / 64, (c / 8) % 8, c % 8);
        for w in 0..8usize {
            let (mut mass, mut weighted) = (0.0, 0.0);
            for x in cx.saturating_sub(w)..=(cx + w).min(7) {
                for y in cy.saturating_sub(w)..=(cy + w).min(7) {
                    for z in cz.saturating_sub(w)..=(cz + w).min(7) {
                        let i = x * 64 + y * 8 + z;
                        let m = rho[i] * vol;
                        mass += m;
                        weighted += m * (sigma[i] * e_mag[i] * e_mag[i] / rho[i]);
                    }
                }
            }
            if mass >= target || w == 7 {
                if weighted / mass > best.0 {
                    best = (weighted / mass, c);
                }
                break;
            }
        }
    }
    verdict(
        got.peak_avg.to_bits() == best.0.to_bits() && got.center == best.1,
        format!("peak {} W/kg at voxel {} (brute force {} at {})", got.peak_avg, got.center, best.0, best.1),
    )
}

fn inverse_design() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let a = rng.random_range(5e-3..30e-3);
        let g = SectorGeometry::new(
            a,
            rng.random_range(1e-3..10e-3),
            rng.random_range(20f64..360.0).to_radians(),
            rng.random_range(2.0..40.0),
        )
        .unwrap();
        let mode = ModeSpec::from_m(Family::TE, rng.random_range(0..4), rng.random_range(1..4), 0, &g).unwrap();
        let f = resonant_frequency(&g, &mode).unwrap();
        match solve_radius(f, &g, &mode, (2e-3, 60e-3)) {
            Ok(solved) => worst = worst.max(rel(solved, a)),
            Err(e) => return verdict(false, e.to_string()),
        }
    }
    verdict(worst < 1e-8, format!("worst relative radius error {worst:.2e}"))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("TE210 anchor 6.12 GHz", || anchor(te210(&SectorGeometry::reference()), 6.12e9)),
        ("EH110 anchor 4.39 GHz", || anchor(eh110(), 4.39e9)),
        ("Bessel zeros X11, X21", bessel_zeros),
        ("power budget 37.5 mW", power_budget),
        ("FD oracle convergence", fd_convergence),
        ("boundary invariants", boundary_suite),
        ("Helmholtz residual order", helmholtz),
        ("radius sweep trend", radius_trend),
        ("SAR brute-force equality", sar_equivalence),
        ("inverse design round trip", inverse_design),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("{} {:>2}. {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
