//! Finite-difference Sturm–Liouville eigensolver for the separated equations.
//!
//! Every problem is brought to the form `−(p u')' + q u = λ w u` on `(0, L)`
//! and discretized on a cell-centred grid (nodes at `(i − ½)h`, `h = L/N`).
//! The flux coefficient `p` vanishes at the singular left end, so no boundary
//! condition is imposed there; the right end is either natural or Dirichlet
//! through a half-cell ghost node. The symmetric-definite pencil is reduced
//! by `W^{−1/2}` to a symmetric tridiagonal matrix, whose lowest eigenvalues
//! come from Sturm-sequence bisection followed by inverse iteration.
//!
//! An optional similarity `u = g v` with `g = x^σ e^{−κx}` absorbs the
//! centrifugal term and the exponential tail.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{ModelParams, Sector};

pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    UniformR,
    UniformTheta,
    UniformXi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub kind: GridKind,
    pub points: usize,
    /// `R_max`, `π` or `ξ_max`.
    pub extent: f64,
}

impl Grid {
    fn checked(kind: GridKind, points: usize, extent: f64) -> Result<Self> {
        if points < MIN_POINTS {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least {MIN_POINTS} points, got {points}"
            )));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid cutoff must be positive, got {extent}"
            )));
        }
        Ok(Self {
            kind,
            points,
            extent,
        })
    }

    pub fn radial(points: usize, r_max: f64) -> Result<Self> {
        Self::checked(GridKind::UniformR, points, r_max)
    }

    pub fn angular(points: usize) -> Result<Self> {
        Self::checked(GridKind::UniformTheta, points, PI)
    }

    pub fn parabolic(points: usize, xi_max: f64) -> Result<Self> {
        Self::checked(GridKind::UniformXi, points, xi_max)
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.points as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }

    /// Cutoff `60/ε`, or 50 when no decay estimate is available.
    pub fn heuristic_cutoff(epsilon: Option<f64>) -> f64 {
        match epsilon {
            Some(e) if e > 0.0 => 60.0 / e,
            _ => 50.0,
        }
    }
}

/// Lowest eigenvalues of one discretized problem.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Vec<f64>,
    /// `‖(M − λ)y‖/‖y‖` of the polished eigenvector of the reduced matrix.
    pub residuals: Vec<f64>,
    pub grid: Grid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RightEnd {
    Natural,
    Dirichlet,
}

/// Coefficients of `−(p u')' + q u = λ w u` after the similarity `u = g v`.
struct Problem<P, L, Q, W> {
    p: P,
    ln_g: L,
    q: Q,
    w: W,
    right: RightEnd,
}

impl<P, L, Q, W> Problem<P, L, Q, W>
where
    P: Fn(f64) -> f64,
    L: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    /// Symmetric tridiagonal `W^{−1/2} K W^{−1/2}`; `ln g` enters only
    /// through differences so `g` itself never under- or overflows.
    fn assemble(&self, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = grid.points;
        let h = grid.spacing();
        let h2 = h * h;
        let nodes: Vec<f64> = (0..n).map(|i| grid.node(i)).collect();
        let w: Vec<f64> = nodes.iter().map(|&x| (self.w)(x)).collect();
        if let Some(bad) = w.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain(format!(
                "weight is not positive at grid node {}",
                nodes[bad]
            )));
        }
        let lg: Vec<f64> = nodes.iter().map(|&x| (self.ln_g)(x)).collect();
        // face j sits at j·h, between nodes j−1 and j
        let face_flux = |j: usize| -> f64 {
            let x = j as f64 * h;
            if j == 0 {
                return 0.0;
            }
            if j == n {
                return match self.right {
                    RightEnd::Natural => 0.0,
                    RightEnd::Dirichlet => 2.0 * (self.p)(x),
                };
            }
            (self.p)(x)
        };
        let face_lg = |j: usize| (self.ln_g)(j as f64 * h);

        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        for i in 0..n {
            let mut d = (self.q)(nodes[i]) / w[i];
            for j in [i, i + 1] {
                let pf = face_flux(j);
                if pf != 0.0 {
                    d += pf * (2.0 * (face_lg(j) - lg[i])).exp() / (h2 * w[i]);
                }
            }
            diag[i] = d;
            if i + 1 < n {
                let j = i + 1;
                let pf = face_flux(j);
                off[i] = -pf * (2.0 * face_lg(j) - lg[i] - lg[i + 1]).exp()
                    / (h2 * (w[i] * w[i + 1]).sqrt());
            }
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::Domain(
                "matrix entries overflow; refine the grid or shrink the cutoff".into(),
            ));
        }
        Ok((diag, off))
    }

    fn solve(&self, grid: &Grid, modes: usize) -> Result<EigenResult> {
        let (d, e) = self.assemble(grid)?;
        let pairs = lowest_eigenpairs(&d, &e, modes.min(grid.points));
        Ok(EigenResult {
            values: pairs.iter().map(|p| p.0).collect(),
            residuals: pairs.iter().map(|p| p.1).collect(),
            grid: *grid,
        })
    }
}

/// How the radial exponential factor `e^{−κr}` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    /// Only the `r^s` factor.
    Zero,
    Fixed(f64),
    /// Start from `κ = 0`, then set `κ = √(c4 + dν2² − 2bE₀)` from the lowest
    /// computed eigenvalue `E₀`, the given number of times.
    SelfConsistent(usize),
    /// As `SelfConsistent`, but iterating on the eigenvalue of `mode`.
    Tracking {
        mode: usize,
        iterations: usize,
    },
}

impl Default for Kappa {
    fn default() -> Self {
        Self::SelfConsistent(2)
    }
}

/// Lowest `modes` energies of the radial equation
/// `(r²R')' − [(dν2²+c4)r² + (c1ν2²+c0/2)r + k1]R = −E·2r(a+br)·R`
/// with `R(R_max) = 0`.
pub fn radial_eigen(
    p: &ModelParams,
    sector: &Sector,
    k1: f64,
    grid: &Grid,
    modes: usize,
    kappa: Kappa,
) -> Result<EigenResult> {
    if grid.kind != GridKind::UniformR {
        return Err(Error::InvalidArgument(
            "radial problem needs a radial grid".into(),
        ));
    }
    if !(k1 >= -0.25) {
        return Err(Error::InvalidArgument(format!("k1 = {k1} below -1/4")));
    }
    let s = 0.5 * (-1.0 + (1.0 + 4.0 * k1).sqrt());
    let nu2sq = sector.nu2 * sector.nu2;
    let big_a = p.d * nu2sq + p.c4;
    let big_b = p.c1 * nu2sq + 0.5 * p.c0;
    let solve_with = |kap: f64, modes: usize| {
        Problem {
            p: |r: f64| r * r,
            ln_g: move |r: f64| s * r.ln() - kap * r,
            q: move |r: f64| (big_a - kap * kap) * r * r + (big_b + 2.0 * kap * (s + 1.0)) * r,
            w: |r: f64| 2.0 * r * (p.a + p.b * r),
            right: RightEnd::Dirichlet,
        }
        .solve(grid, modes)
    };
    match kappa {
        Kappa::Zero => solve_with(0.0, modes),
        Kappa::Fixed(k) => solve_with(k, modes),
        Kappa::SelfConsistent(iterations) => {
            let mut kap = 0.0;
            for _ in 0..iterations {
                let e0 = solve_with(kap, 1)?.values[0];
                let t2 = big_a - 2.0 * p.b * e0;
                kap = if t2 > 0.0 { t2.sqrt() } else { 0.0 };
            }
            solve_with(kap, modes)
        }
        Kappa::Tracking { mode, iterations } => {
            let mut kap = 0.0;
            for _ in 0..iterations {
                let e = solve_with(kap, mode + 1)?.values[mode];
                let t2 = big_a - 2.0 * p.b * e;
                kap = if t2 > 0.0 { t2.sqrt() } else { 0.0 };
            }
            solve_with(kap, modes.max(mode + 1))
        }
    }
}

/// Lowest `modes` values of `k1` for the angular equation
/// `(sinθ Θ')' − [m1²/(2(1+cosθ)) + m2²/(2(1−cosθ))] sinθ Θ = −k1 sinθ Θ`.
pub fn angular_eigen(sector: &Sector, grid: &Grid, modes: usize) -> Result<EigenResult> {
    if grid.kind != GridKind::UniformTheta {
        return Err(Error::InvalidArgument(
            "angular problem needs an angular grid".into(),
        ));
    }
    let (s1, s2) = (sector.m1 * sector.m1, sector.m2 * sector.m2);
    Problem {
        p: |th: f64| th.sin(),
        ln_g: |_| 0.0,
        q: |th: f64| {
            // 1 ± cosθ through half angles keeps precision near the poles
            let one_plus = 2.0 * (0.5 * th).cos().powi(2);
            let one_minus = 2.0 * (0.5 * th).sin().powi(2);
            (s1 / (2.0 * one_plus) + s2 / (2.0 * one_minus)) * th.sin()
        },
        w: |th: f64| th.sin(),
        right: RightEnd::Natural,
    }
    .solve(grid, modes)
}

/// Which parabolic coordinate a spectrum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParabolicAxis {
    Xi,
    Eta,
}

/// Separation constants carried by the parabolic equation
/// `(ξΘ')' + (α/4)ξΘ + (β/4)Θ − m²/(4ξ)Θ = kΘ` at energy `E`, with `m = m1`
/// on the ξ axis and `m2` on the η axis (where the constant is `−k2`).
///
/// `values[n]` is the constant of the `n`-th mode, so the sequence is
/// decreasing; the η-axis values are negated to report `k2` directly.
pub fn parabolic_eigen_k2(
    p: &ModelParams,
    sector: &Sector,
    energy: f64,
    grid: &Grid,
    modes: usize,
    axis: ParabolicAxis,
) -> Result<EigenResult> {
    if grid.kind != GridKind::UniformXi {
        return Err(Error::InvalidArgument(
            "parabolic problem needs a parabolic grid".into(),
        ));
    }
    let (alpha, beta) = p.alpha_beta(energy, sector.nu2);
    if alpha >= 0.0 {
        return Err(Error::ContinuousSpectrum(format!(
            "alpha = {alpha} >= 0 at E = {energy}"
        )));
    }
    let eps = (-alpha).sqrt();
    let m = match axis {
        ParabolicAxis::Xi => sector.m1,
        ParabolicAxis::Eta => sector.m2,
    };
    let (sigma, kap) = (0.5 * m, 0.5 * eps);
    let shift = 0.5 * eps * (m + 1.0);
    let mut res = Problem {
        p: |x: f64| x,
        ln_g: move |x: f64| sigma * x.ln() - kap * x,
        q: move |_| shift,
        w: |_| 1.0,
        right: RightEnd::Dirichlet,
    }
    .solve(grid, modes)?;
    let sign = match axis {
        ParabolicAxis::Xi => 1.0,
        ParabolicAxis::Eta => -1.0,
    };
    for v in &mut res.values {
        *v = sign * (0.25 * beta - *v);
    }
    Ok(res)
}

/// First `(n1, n2)` with `|k_ξ[n1] − k2_η[n2]| ≤ tol`, scanning by `n1 + n2`.
pub fn find_k2_pairing(xi: &EigenResult, eta: &EigenResult, tol: f64) -> Option<(usize, usize)> {
    let max_total = xi.values.len() + eta.values.len();
    for total in 0..max_total {
        for n1 in 0..=total {
            let n2 = total - n1;
            if let (Some(a), Some(b)) = (xi.values.get(n1), eta.values.get(n2)) {
                if (a - b).abs() <= tol * a.abs().max(1.0) {
                    return Some((n1, n2));
                }
            }
        }
    }
    None
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut pivot = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 {
            0.0
        } else {
            off[i - 1] * off[i - 1] / pivot
        };
        pivot = diag[i] - x - coupling;
        if pivot == 0.0 {
            pivot = -tiny;
        }
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..diag.len() {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i < off.len() { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based) by Sturm bisection.
pub fn kth_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    lo -= 1e-12 * scale;
    hi += 1e-12 * scale;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All eigenvalues, ascending.
pub fn eigen_sym_tridiag(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    check_tridiag(diag, off)?;
    Ok((0..diag.len())
        .map(|k| kth_eigenvalue(diag, off, k))
        .collect())
}

fn check_tridiag(diag: &[f64], off: &[f64]) -> Result<()> {
    if diag.is_empty() || off.len() + 1 != diag.len() {
        return Err(Error::InvalidArgument(format!(
            "tridiagonal shapes {} and {} do not match",
            diag.len(),
            off.len()
        )));
    }
    if diag.iter().chain(off).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }
    Ok(())
}

/// Solves `(T − μ) x = b` by Gaussian elimination with partial pivoting.
fn tridiag_shifted_solve(diag: &[f64], off: &[f64], mu: f64, rhs: &mut [f64]) {
    let n = diag.len();
    // upper bands after pivoting: u0 (diagonal), u1, u2
    let mut u0: Vec<f64> = diag.iter().map(|d| d - mu).collect();
    let mut u1: Vec<f64> = off.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let tiny = f64::EPSILON * gershgorin(diag, off).1.abs().max(1.0);
    for i in 0..n.saturating_sub(1) {
        let sub = off[i];
        if sub.abs() > u0[i].abs() {
            // swap rows i and i+1
            let (a0, a1, a2) = (u0[i], u1[i], u2[i]);
            u0[i] = sub;
            u1[i] = u0[i + 1];
            u2[i] = u1[i + 1];
            rhs.swap(i, i + 1);
            let m = a0 / sub;
            u0[i + 1] = a1 - m * u1[i];
            u1[i + 1] = a2 - m * u2[i];
            rhs[i + 1] -= m * rhs[i];
        } else {
            if u0[i] == 0.0 {
                u0[i] = tiny;
            }
            let m = sub / u0[i];
            u0[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
            rhs[i + 1] -= m * rhs[i];
        }
    }
    if u0[n - 1] == 0.0 {
        u0[n - 1] = tiny;
    }
    for i in (0..n).rev() {
        let mut v = rhs[i];
        if i + 1 < n {
            v -= u1[i] * rhs[i + 1];
        }
        if i + 2 < n {
            v -= u2[i] * rhs[i + 2];
        }
        rhs[i] = v / u0[i];
    }
}

fn tridiag_apply(diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut v = diag[i] * x[i];
            if i > 0 {
                v += off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += off[i] * x[i + 1];
            }
            v
        })
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Lowest `k` eigenpairs: returns `(λ, relative residual)`; eigenvectors are
/// polished by inverse iteration and the residual is measured on them.
pub fn lowest_eigenpairs(diag: &[f64], off: &[f64], k: usize) -> Vec<(f64, f64)> {
    let n = diag.len();
    let scale = gershgorin(diag, off)
        .1
        .abs()
        .max(gershgorin(diag, off).0.abs())
        .max(1e-300);
    (0..k.min(n))
        .map(|j| {
            let lambda = kth_eigenvalue(diag, off, j);
            let (vec, _) = inverse_iteration(diag, off, lambda, scale);
            let av = tridiag_apply(diag, off, &vec);
            let r: Vec<f64> = av.iter().zip(&vec).map(|(a, v)| a - lambda * v).collect();
            (lambda, norm(&r) / norm(&vec))
        })
        .collect()
}

fn inverse_iteration(diag: &[f64], off: &[f64], lambda: f64, scale: f64) -> (Vec<f64>, f64) {
    let n = diag.len();
    let mu = lambda + 4.0 * f64::EPSILON * scale;
    // deterministic, non-degenerate start vector
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64)
        .collect();
    let mut growth = 0.0;
    for _ in 0..4 {
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        let mut y = x.clone();
        tridiag_shifted_solve(diag, off, mu, &mut y);
        growth = norm(&y);
        if !growth.is_finite() || growth == 0.0 {
            break;
        }
        x = y;
    }
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    (x, growth)
}

/// Convergence data from [`convergence_order`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub points: Vec<usize>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// One estimate per consecutive pair of error values.
    pub pair_orders: Vec<f64>,
    /// Estimate from the finest pair.
    pub order: f64,
}

/// Observed order of accuracy over nested grids.
///
/// With a reference value the errors are `|v_i − exact|`; without one they are
/// the successive differences `|v_{i+1} − v_i|` (Richardson).
pub fn convergence_order(
    solve: impl Fn(usize) -> Result<f64>,
    points: &[usize],
    exact: Option<f64>,
) -> Result<ConvergenceReport> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument("need at least three grids".into()));
    }
    if points.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid sizes must increase".into()));
    }
    let values = points
        .iter()
        .map(|&n| solve(n))
        .collect::<Result<Vec<_>>>()?;
    let (errors, sizes): (Vec<f64>, Vec<usize>) = match exact {
        Some(x) => (
            values.iter().map(|v| (v - x).abs()).collect(),
            points.to_vec(),
        ),
        None => (
            values.windows(2).map(|w| (w[1] - w[0]).abs()).collect(),
            points[..points.len() - 1].to_vec(),
        ),
    };
    if errors.windows(2).any(|w| !(w[1] < w[0])) || errors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::NonMonotone(format!("errors {errors:?}")));
    }
    let pair_orders: Vec<f64> = errors
        .windows(2)
        .zip(sizes.windows(2))
        .map(|(e, n)| (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln())
        .collect();
    Ok(ConvergenceReport {
        points: points.to_vec(),
        values,
        errors,
        order: *pair_orders.last().unwrap(),
        pair_orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;
    use crate::model::Preset;
    use num_rational::BigRational;
    use num_traits::{Signed, Zero};
    use proptest::prelude::*;

    #[test]
    fn small_tridiagonal_examples() {
        assert_eq!(
            eigen_sym_tridiag(&[1.0, 2.0], &[0.0]).unwrap(),
            vec![1.0, 2.0]
        );
        let v = eigen_sym_tridiag(&[0.0, 0.0], &[1.0]).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        assert!(eigen_sym_tridiag(&[1.0, 2.0], &[]).is_err());
    }

    #[test]
    fn toeplitz_spectrum() {
        for n in [5, 17, 64] {
            let v = eigen_sym_tridiag(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
            for (k, lam) in v.iter().enumerate() {
                let e = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
                assert!((lam - e).abs() < 1e-12 * 4.0, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn eigenpair_residuals_are_small() {
        let n = 300;
        let d: Vec<f64> = (0..n).map(|i| 2.0 + (i as f64).sin()).collect();
        let e = vec![-1.0; n - 1];
        for (_, r) in lowest_eigenpairs(&d, &e, 5) {
            assert!(r < 1e-8, "residual {r}");
        }
    }

    fn rational_count(diag: &[f64], off: &[f64], x: &Rational) -> usize {
        let d: Vec<Rational> = diag
            .iter()
            .map(|v| BigRational::from_float(*v).unwrap())
            .collect();
        let o: Vec<Rational> = off
            .iter()
            .map(|v| BigRational::from_float(*v).unwrap())
            .collect();
        // exact determinant ratios; a zero pivot means x is an eigenvalue
        let mut count = 0;
        let mut pivot = Rational::from_integer(1.into());
        for i in 0..d.len() {
            let coupling = if i == 0 {
                Rational::zero()
            } else {
                &o[i - 1] * &o[i - 1] / &pivot
            };
            pivot = &d[i] - x - coupling;
            assert!(!pivot.is_zero());
            if pivot.is_negative() {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn reduced_radial_matrix_matches_exact_sturm_counts() {
        let p = Preset::Micz.params().with("c0", -8.0).unwrap();
        let s = Sector::new(&p, 0.0, 0.5).unwrap();
        for n in [2usize, 5, 8] {
            let grid = Grid {
                kind: GridKind::UniformR,
                points: n,
                extent: 10.0,
            };
            let prob = Problem {
                p: |r: f64| r * r,
                ln_g: |_| 0.0,
                q: |r: f64| 0.25 * r * r - 4.5 * r + 0.75,
                w: |r: f64| 2.0 * r * r,
                right: RightEnd::Dirichlet,
            };
            let (d, e) = prob.assemble(&grid).unwrap();
            let vals = eigen_sym_tridiag(&d, &e).unwrap();
            let _ = s;
            let mut probes = vec![vals[0] - 1.0];
            probes.extend(vals.windows(2).map(|w| 0.5 * (w[0] + w[1])));
            probes.push(vals[n - 1] + 1.0);
            for (k, x) in probes.iter().enumerate() {
                let xr = BigRational::from_float(*x).unwrap();
                assert_eq!(rational_count(&d, &e, &xr), k, "n={n} probe {k}");
            }
        }
    }

    #[test]
    fn micz_ground_state() {
        let p = Preset::Micz.params().with("c0", -8.0).unwrap();
        let s = Sector::new(&p, 0.0, 0.5).unwrap();
        let g = Grid::radial(4000, 40.0).unwrap();
        let r = radial_eigen(&p, &s, 0.75, &g, 3, Kappa::default()).unwrap();
        assert!((r.values[0] + 1.0).abs() < 1e-5);
        assert!(r.residuals.iter().all(|&x| x < 1e-8), "{:?}", r.residuals);
        // N = 2.5 level with the same k1
        assert!((r.values[1] + 0.28).abs() < 1e-4, "{}", r.values[1]);
        let z = radial_eigen(&p, &s, 0.75, &g, 1, Kappa::Zero).unwrap();
        assert!((z.values[0] + 1.0).abs() < 1e-4);
    }

    #[test]
    fn free_particle_in_a_box() {
        let p = ModelParams::zero().with("b", 1.0).unwrap();
        let s = Sector::new(&p, 0.0, 0.0).unwrap();
        let rmax = 40.0;
        let g = Grid::radial(2000, rmax).unwrap();
        let r = radial_eigen(&p, &s, 0.0, &g, 2, Kappa::Zero).unwrap();
        let e1 = PI * PI / (2.0 * rmax * rmax);
        assert!((r.values[0] - e1).abs() < 1e-5 * e1);
        assert!((r.values[1] - 4.0 * e1).abs() < 1e-5 * 4.0 * e1);
    }

    #[test]
    fn angular_legendre_sector() {
        let s = Sector::new(&ModelParams::zero(), 0.0, 0.0).unwrap();
        let g = Grid::angular(2000).unwrap();
        let r = angular_eigen(&s, &g, 3).unwrap();
        for (l, v) in r.values.iter().enumerate() {
            let e = (l * (l + 1)) as f64;
            assert!((v - e).abs() < 1e-5 * e.max(1.0), "l={l}: {v}");
        }
    }

    #[test]
    fn angular_micz_sector() {
        let s = Sector::new(&ModelParams::zero(), 0.0, 0.5).unwrap();
        let r = angular_eigen(&s, &Grid::angular(2000).unwrap(), 1).unwrap();
        assert!((r.values[0] - 0.75).abs() < 1e-5);
    }

    #[test]
    fn parabolic_micz_fixture() {
        let p = Preset::Micz.params().with("c0", -8.0).unwrap();
        let s = Sector::new(&p, 0.0, 0.5).unwrap();
        let g = Grid::parabolic(4000, Grid::heuristic_cutoff(Some(1.5)) * 2.0).unwrap();
        let xi = parabolic_eigen_k2(&p, &s, -1.0, &g, 4, ParabolicAxis::Xi).unwrap();
        assert!((xi.values[0] + 0.375).abs() < 1e-5, "{:?}", xi.values);
        let eta = parabolic_eigen_k2(&p, &s, -1.0, &g, 4, ParabolicAxis::Eta).unwrap();
        assert_eq!(find_k2_pairing(&xi, &eta, 1e-5), Some((0, 0)));

        let xi = parabolic_eigen_k2(&p, &s, -1.01, &g, 4, ParabolicAxis::Xi).unwrap();
        let eta = parabolic_eigen_k2(&p, &s, -1.01, &g, 4, ParabolicAxis::Eta).unwrap();
        assert_eq!(find_k2_pairing(&xi, &eta, 1e-5), None);

        assert!(matches!(
            parabolic_eigen_k2(&p, &s, 1.0, &g, 1, ParabolicAxis::Xi),
            Err(Error::ContinuousSpectrum(_))
        ));
    }

    #[test]
    fn parabolic_axes_coincide_for_equal_exponents() {
        let p = ModelParams::new(1.0, 1.0, -6.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let s = Sector::new(&p, 1.0, 0.0).unwrap();
        assert_eq!(s.m1, s.m2);
        let g = Grid::parabolic(500, 60.0).unwrap();
        let xi = parabolic_eigen_k2(&p, &s, -0.5, &g, 3, ParabolicAxis::Xi).unwrap();
        let eta = parabolic_eigen_k2(&p, &s, -0.5, &g, 3, ParabolicAxis::Eta).unwrap();
        for (a, b) in xi.values.iter().zip(&eta.values) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn toeplitz_convergence_order() {
        // lowest Dirichlet eigenvalue of −u'' on (0, π) is 1
        let rep = convergence_order(
            |n| {
                let h = PI / (n + 1) as f64;
                let d = vec![2.0 / (h * h); n];
                let e = vec![-1.0 / (h * h); n - 1];
                Ok(kth_eigenvalue(&d, &e, 0))
            },
            &[50, 100, 200, 400],
            Some(1.0),
        )
        .unwrap();
        assert!((rep.order - 2.0).abs() < 0.05, "{rep:?}");
    }

    #[test]
    fn non_monotone_errors_are_reported() {
        let r = convergence_order(
            |n| Ok(if n % 3 == 0 { 1.1 } else { 1.001 }),
            &[10, 20, 30, 40],
            Some(1.0),
        );
        assert!(matches!(r, Err(Error::NonMonotone(_))));
    }

    #[test]
    fn micz_radial_order_two() {
        let p = Preset::Micz.params().with("c0", -8.0).unwrap();
        let s = Sector::new(&p, 0.0, 0.5).unwrap();
        let rep = convergence_order(
            |n| Ok(radial_eigen(&p, &s, 0.75, &Grid::radial(n, 40.0)?, 1, Kappa::Zero)?.values[0]),
            &[500, 1000, 2000, 4000],
            Some(-1.0),
        )
        .unwrap();
        assert!((rep.order - 2.0).abs() < 0.2, "{rep:?}");
    }

    #[test]
    fn tracking_kappa_excited_states() {
        let p = Preset::Micz.params().with("c0", -8.0).unwrap();
        let s = Sector::new(&p, 0.0, 0.5).unwrap();
        let g = Grid::radial(4000, 60.0).unwrap();
        for (mode, exact) in [(1, -0.28), (2, -0.081_632_653_061_224_5)] {
            let k = Kappa::Tracking {
                mode,
                iterations: 3,
            };
            let v = radial_eigen(&p, &s, 0.75, &g, mode + 1, k).unwrap().values[mode];
            assert!((v - exact).abs() < 1e-7, "mode {mode}: {v}");
        }
    }

    #[test]
    fn cutoff_doubling_is_harmless() {
        let p = Preset::Micz.params().with("c0", -8.0).unwrap();
        let s = Sector::new(&p, 0.0, 0.5).unwrap();
        // ε = 3 in the radial convention; εR = 30
        let a = radial_eigen(
            &p,
            &s,
            0.75,
            &Grid::radial(1000, 10.0).unwrap(),
            2,
            Kappa::Zero,
        )
        .unwrap();
        let b = radial_eigen(
            &p,
            &s,
            0.75,
            &Grid::radial(2000, 20.0).unwrap(),
            2,
            Kappa::Zero,
        )
        .unwrap();
        assert!((a.values[0] - b.values[0]).abs() < 1e-7 * a.values[0].abs());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bisection_matches_sturm_counts(d in proptest::collection::vec(-5.0..5.0f64, 2..12),
                                          seed in 0u64..1000) {
            let n = d.len();
            let e: Vec<f64> = (0..n - 1).map(|i| ((i as u64 * 31 + seed) % 17) as f64 / 4.0 - 2.0).collect();
            let vals = eigen_sym_tridiag(&d, &e).unwrap();
            prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            let trace: f64 = d.iter().sum();
            prop_assert!((vals.iter().sum::<f64>() - trace).abs() < 1e-9 * (1.0 + trace.abs()));
        }
    }
}
