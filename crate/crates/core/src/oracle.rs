//! Finite-difference eigensolver for the transverse problem on the sector.
//!
//! Solves −∇²u = λu on the cross-section 0 < r < a, 0 < φ < φ0 with
//! ∂u/∂φ = 0 on both faces and u = 0 on the arc, using the 5-point polar
//! stencil on a cell-centred grid:
//!
//! ```text
//! r_i = (i + ½)Δr,  Δr = a/(N_r + ½)    (ghost node u = 0 sits exactly on r = a)
//! φ_j = (j + ½)Δφ,  Δφ = φ0/N_φ          (mirror ghosts give the Neumann faces)
//! ```
//!
//! The axis carries no node; the flux through r = 0 vanishes. Multiplying each
//! row by r_i makes the operator symmetric (K u = λ W u, W = diag r_i), and
//! S = W^{-½} K W^{-½} is symmetric positive definite. Its smallest eigenpairs
//! come from block inverse iteration with Rayleigh-Ritz on a banded Cholesky
//! factor of S. The solver never touches the Bessel routines; only
//! [`compare_modes`] brings in the analytic roots for pairing.

use crate::error::{domain, Error, Result};
use crate::modal::{azimuthal_order, SectorGeometry};
use crate::specfun::{bessel_zero, BesselOrder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const MAX_ITER: usize = 2000;
// Ritz values stall at a few 1e-12 relative from the factorization's rounding.
const REL_TOL: f64 = 1e-10;

/// Discretized transverse problem. Boundary conditions are fixed: Neumann on
/// the metal faces, Dirichlet on the arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdProblem {
    a: f64,
    phi0: f64,
    n_r: usize,
    n_phi: usize,
}

impl FdProblem {
    pub fn new(a: f64, phi0: f64, n_r: usize, n_phi: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(domain(format!("radius must be positive, got {a}")));
        }
        if !(phi0 > 0.0 && phi0 <= 2.0 * PI) {
            return Err(domain(format!("sector angle must lie in (0, 2π], got {phi0}")));
        }
        if n_r < 16 || n_phi < 16 {
            return Err(domain(format!("FD grid needs at least 16×16 nodes, got {n_r}×{n_phi}")));
        }
        Ok(Self { a, phi0, n_r, n_phi })
    }

    pub fn for_geometry(geom: &SectorGeometry, resolution: usize) -> Result<Self> {
        Self::new(geom.a, geom.phi0, resolution, resolution)
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn dr(&self) -> f64 {
        self.a / (self.n_r as f64 + 0.5)
    }

    pub fn dphi(&self) -> f64 {
        self.phi0 / self.n_phi as f64
    }

    pub fn r_node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr()
    }

    pub fn phi_node(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dphi()
    }

    fn len(&self) -> usize {
        self.n_r * self.n_phi
    }
}

/// One converged eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct FdMode {
    /// √λ, rad/m.
    pub k_t: f64,
    /// Nodal values u(r_i, φ_j), index `i * n_phi + j`, scaled to max |u| = 1.
    pub shape: Vec<f64>,
}

/// Sparse symmetric operator S with the unknown ordering chosen to minimize
/// the bandwidth.
struct Operator {
    n: usize,
    bw: usize,
    /// For each unknown: (neighbor index, coefficient) off-diagonal entries.
    offdiag: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
    /// sqrt(r_i) per unknown, to map eigenvectors of S back to nodal values.
    sqrt_w: Vec<f64>,
    /// unknown index → (i, j)
    node: Vec<(usize, usize)>,
}

impl Operator {
    fn build(p: &FdProblem) -> Self {
        let (n_r, n_phi) = (p.n_r, p.n_phi);
        let n = p.len();
        let phi_fast = n_phi <= n_r;
        let index = |i: usize, j: usize| if phi_fast { i * n_phi + j } else { j * n_r + i };
        let bw = if phi_fast { n_phi } else { n_r };
        let dr2 = p.dr() * p.dr();
        let dphi2 = p.dphi() * p.dphi();

        let mut offdiag = vec![Vec::with_capacity(4); n];
        let mut diag = vec![0.0; n];
        let mut sqrt_w = vec![0.0; n];
        let mut node = vec![(0, 0); n];
        for i in 0..n_r {
            let r = p.r_node(i);
            let r_in = i as f64 * p.dr();
            let r_out = (i + 1) as f64 * p.dr();
            for j in 0..n_phi {
                let k = index(i, j);
                node[k] = (i, j);
                sqrt_w[k] = r.sqrt();
                // K entries (already multiplied by r_i), symmetric by construction
                let mut d = (r_in + r_out) / dr2;
                let mut push = |other: usize, ri: f64, coef: f64, rj: f64| {
                    offdiag[k].push((other, -coef / (ri * rj).sqrt()));
                };
                if i > 0 {
                    push(index(i - 1, j), r, r_in / dr2, p.r_node(i - 1));
                }
                if i + 1 < n_r {
                    push(index(i + 1, j), r, r_out / dr2, p.r_node(i + 1));
                }
                let ang = 1.0 / (r * dphi2);
                if j > 0 {
                    push(index(i, j - 1), r, ang, r);
                    d += ang;
                }
                if j + 1 < n_phi {
                    push(index(i, j + 1), r, ang, r);
                    d += ang;
                }
                diag[k] = d / r;
            }
        }
        Self { n, bw, offdiag, diag, sqrt_w, node }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for k in 0..self.n {
            let mut s = self.diag[k] * x[k];
            for &(o, c) in &self.offdiag[k] {
                s += c * x[o];
            }
            y[k] = s;
        }
    }
}

/// Lower-triangular banded Cholesky factor; row i holds columns i−bw..=i.
struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    fn factor(op: &Operator) -> Result<Self> {
        let (n, bw) = (op.n, op.bw);
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        // slot of (i, j) for i - bw ≤ j ≤ i
        let at = |i: usize, j: usize| i * w + (j + bw - i);
        for k in 0..n {
            l[at(k, k)] = op.diag[k];
            for &(o, c) in &op.offdiag[k] {
                if o < k {
                    l[at(k, o)] = c;
                }
            }
        }
        for i in 0..n {
            let lo_i = i.saturating_sub(bw);
            for j in lo_i..=i {
                let lo = lo_i.max(j.saturating_sub(bw));
                let row_i = &l[at(i, lo)..at(i, j)];
                let row_j = &l[at(j, lo)..at(j, j)];
                let dot: f64 = row_i.iter().zip(row_j).map(|(a, b)| a * b).sum();
                let s = l[at(i, j)] - dot;
                if i == j {
                    if !(s > 0.0) {
                        return Err(domain("FD operator is not positive definite"));
                    }
                    l[at(i, i)] = s.sqrt();
                } else {
                    l[at(i, j)] = s / l[at(j, j)];
                }
            }
        }
        Ok(Self { n, bw, l })
    }

    fn solve(&self, b: &mut [f64]) {
        let w = self.bw + 1;
        let at = |i: usize, j: usize| i * w + (j + self.bw - i);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let row = &self.l[at(i, lo)..at(i, i)];
            let dot: f64 = row.iter().zip(&b[lo..i]).map(|(a, x)| a * x).sum();
            b[i] = (b[i] - dot) / self.l[at(i, i)];
        }
        for i in (0..self.n).rev() {
            b[i] /= self.l[at(i, i)];
            let lo = i.saturating_sub(self.bw);
            let xi = b[i];
            for (k, bk) in (lo..i).zip(b[lo..i].iter_mut()) {
                *bk -= self.l[at(i, k)] * xi;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Modified Gram-Schmidt, twice for stability.
fn orthonormalize(block: &mut [Vec<f64>]) {
    for _ in 0..2 {
        for k in 0..block.len() {
            let (done, rest) = block.split_at_mut(k);
            let v = &mut rest[0];
            for q in done.iter() {
                let c = dot(q, v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
            let norm = dot(v, v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
    }
}

/// Cyclic Jacobi for a small dense symmetric matrix. Returns eigenvalues
/// (ascending) and the matching column eigenvectors.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                // p < q, so row p lives in the head and row q in the tail
                let (head, tail) = a.split_at_mut(q);
                for (apk, aqk) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (x, y) = (*apk, *aqk);
                    *apk = c * x - s * y;
                    *aqk = s * x + c * y;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| v.iter().map(|row| row[i]).collect()).collect();
    (values, vectors)
}

/// The `count` smallest eigenpairs, ascending in k_t.
pub fn fd_transverse_modes(problem: &FdProblem, count: usize) -> Result<Vec<FdMode>> {
    if count == 0 {
        return Err(domain("eigenpair count must be at least 1"));
    }
    let op = Operator::build(problem);
    let n = op.n;
    if count > n {
        return Err(domain(format!("requested {count} eigenpairs from a {n}-unknown problem")));
    }
    let chol = BandCholesky::factor(&op)?;
    let block = (count + 4).max(2 * count).min(n);

    // Deterministic start block: separable radial × azimuthal cosines plus a
    // little hashed noise so no eigenvector is missed by symmetry.
    let mut basis: Vec<Vec<f64>> = (0..block)
        .map(|b| {
            let radial = (b / 3) as f64 + 0.5;
            let azimuthal = (b % 3) as f64;
            (0..n)
                .map(|k| {
                    let (i, j) = op.node[k];
                    let s = problem.r_node(i) / problem.a;
                    let t = problem.phi_node(j) / problem.phi0;
                    let hash = (k as u64 ^ ((b as u64) << 40)).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 11;
                    let noise = hash as f64 / (1u64 << 53) as f64 - 0.5;
                    (PI * s * radial).cos() * (PI * t * azimuthal).cos() + 1e-3 * noise
                })
                .collect()
        })
        .collect();
    orthonormalize(&mut basis);

    let mut prev = vec![f64::INFINITY; count];
    let mut sv = vec![0.0; n];
    for iteration in 1..=MAX_ITER {
        basis.par_iter_mut().for_each(|v| chol.solve(v));
        orthonormalize(&mut basis);

        // Rayleigh-Ritz on span(basis).
        let products: Vec<Vec<f64>> = basis
            .par_iter()
            .map(|v| {
                let mut out = vec![0.0; n];
                op.apply(v, &mut out);
                out
            })
            .collect();
        let t: Vec<Vec<f64>> = (0..block)
            .map(|i| (0..block).map(|j| 0.5 * (dot(&basis[i], &products[j]) + dot(&basis[j], &products[i]))).collect())
            .collect();
        let (theta, y) = jacobi_eigen(t);
        let rotated: Vec<Vec<f64>> = y
            .iter()
            .map(|coef| {
                let mut out = vec![0.0; n];
                for (c, v) in coef.iter().zip(&basis) {
                    out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
                }
                out
            })
            .collect();
        basis = rotated;

        let settled = (0..count).all(|i| (theta[i] - prev[i]).abs() <= REL_TOL * theta[i]);
        prev.copy_from_slice(&theta[..count]);
        if settled {
            let residual_ok = (0..count).all(|i| {
                op.apply(&basis[i], &mut sv);
                let r: f64 = sv.iter().zip(&basis[i]).map(|(s, x)| (s - theta[i] * x).powi(2)).sum::<f64>().sqrt();
                r <= 1e-6 * theta[i]
            });
            if !residual_ok {
                continue;
            }
            if theta[..count].iter().any(|&l| !(l > 0.0)) {
                return Err(domain("FD spectrum has a non-positive eigenvalue"));
            }
            return Ok((0..count).map(|i| to_mode(problem, &op, theta[i], &basis[i])).collect());
        }
        if iteration == MAX_ITER {
            break;
        }
    }
    Err(Error::Convergence { what: "FD block inverse iteration", iterations: MAX_ITER })
}

fn to_mode(problem: &FdProblem, op: &Operator, lambda: f64, x: &[f64]) -> FdMode {
    let mut shape = vec![0.0; op.n];
    for ((&(i, j), xk), w) in op.node.iter().zip(x).zip(&op.sqrt_w) {
        shape[i * problem.n_phi + j] = xk / w;
    }
    // fix sign and scale: largest-magnitude entry becomes +1
    let peak = shape.iter().copied().fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m });
    shape.iter_mut().for_each(|v| *v /= peak);
    FdMode { k_t: lambda.sqrt(), shape }
}

/// √λ for the `count` smallest eigenvalues, ascending.
pub fn fd_transverse_eigs(problem: &FdProblem, count: usize) -> Result<Vec<f64>> {
    Ok(fd_transverse_modes(problem, count)?.into_iter().map(|m| m.k_t).collect())
}

/// One analytic radial wavenumber matched to its nearest FD eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeComparison {
    pub m: u32,
    pub v: f64,
    pub n: u32,
    pub analytic_k_r: f64,
    pub fd_k_t: f64,
    pub rel_error: f64,
}

/// The `count` smallest analytic k_r = X_vn/a over face-derived orders,
/// ascending, tagged with (m, v, n).
pub fn analytic_transverse(geom: &SectorGeometry, count: usize) -> Result<Vec<(u32, f64, u32, f64)>> {
    let mut all = Vec::new();
    // m and n both ≤ count suffice: X_vn grows in both indices
    for m in 0..=count as u32 {
        let v = azimuthal_order(m, geom.phi0)?;
        for n in 1..=count as u32 {
            let x = bessel_zero(BesselOrder::new(v)?, n)?;
            all.push((m, v, n, x / geom.a));
        }
    }
    all.sort_by(|a, b| a.3.total_cmp(&b.3).then(a.0.cmp(&b.0)).then(a.2.cmp(&b.2)));
    all.truncate(count);
    Ok(all)
}

/// Pairs each of the `count` smallest analytic k_r with the closest FD
/// eigenvalue on a `resolution`² grid.
pub fn compare_modes(geom: &SectorGeometry, count: usize, resolution: usize) -> Result<Vec<ModeComparison>> {
    if count == 0 {
        return Err(domain("comparison count must be at least 1"));
    }
    let analytic = analytic_transverse(geom, count)?;
    let problem = FdProblem::for_geometry(geom, resolution)?;
    let fd = fd_transverse_eigs(&problem, count + 2)?;
    Ok(analytic
        .into_iter()
        .map(|(m, v, n, k_r)| {
            let fd_k_t =
                fd.iter().copied().min_by(|a, b| (a - k_r).abs().total_cmp(&(b - k_r).abs())).unwrap_or(f64::NAN);
            ModeComparison { m, v, n, analytic_k_r: k_r, fd_k_t, rel_error: ((fd_k_t - k_r) / k_r).abs() }
        })
        .collect())
}
