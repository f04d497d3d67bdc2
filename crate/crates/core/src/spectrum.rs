//! Closed-form and bracketed solution of the quantization condition
//! `(2aE − c1ν2² − c0/2) / (2√(c4 − 2bE + dν2²)) = N`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{ModelParams, Sector};

/// Separation coordinates a level is labelled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Spherical,
    Parabolic,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Spherical => "spherical",
            Self::Parabolic => "parabolic",
        })
    }
}

/// Quantum numbers of one level; `ν1`, `ν2` travel in the [`Sector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LevelSpec {
    /// Principal `n ≥ 1` and orbital `ν1 ≤ l ≤ n − 1`.
    Spherical {
        n: u32,
        l: u32,
    },
    Parabolic {
        n1: u32,
        n2: u32,
    },
}

impl LevelSpec {
    pub fn mode(&self) -> Mode {
        match self {
            Self::Spherical { .. } => Mode::Spherical,
            Self::Parabolic { .. } => Mode::Parabolic,
        }
    }
}

/// A solved bound state.
///
/// `t = √(c4 − 2bE + dν2²)`. The decay constant `ε` is `2t` in spherical
/// and `t` in parabolic labelling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLevel {
    pub mode: Mode,
    pub level_number: f64,
    pub energy: f64,
    pub t: f64,
    pub epsilon: f64,
}

impl EnergyLevel {
    fn new(mode: Mode, level_number: f64, energy: f64, t: f64) -> Self {
        let epsilon = match mode {
            Mode::Spherical => 2.0 * t,
            Mode::Parabolic => t,
        };
        Self {
            mode,
            level_number,
            energy,
            t,
            epsilon,
        }
    }
}

/// Right-hand side `N` of the quantization condition.
pub fn level_number(sector: &Sector, spec: &LevelSpec) -> Result<f64> {
    match *spec {
        LevelSpec::Spherical { n, l } => {
            if n < 1 || l >= n {
                return Err(Error::InvalidArgument(format!(
                    "spherical level needs 0 <= l <= n-1, got n={n}, l={l}"
                )));
            }
            if (l as f64) < sector.nu1 - 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "spherical level needs l >= nu1, got l={l}, nu1={}",
                    sector.nu1
                )));
            }
            Ok(n as f64 + sector.half_delta_sum())
        }
        LevelSpec::Parabolic { n1, n2 } => {
            Ok((n1 + n2) as f64 + sector.half_delta_sum() + sector.nu1 + 1.0)
        }
    }
}

/// `S = c4 + dν2²` and `K = c1ν2² + c0/2`.
fn s_and_k(p: &ModelParams, nu2: f64) -> (f64, f64) {
    let q = nu2 * nu2;
    (p.c4 + p.d * q, p.c1 * q + 0.5 * p.c0)
}

/// Closed-form `(E, t)` for a given level number `N`.
pub fn solve_for_level_number(p: &ModelParams, nu2: f64, n: f64) -> Result<(f64, f64)> {
    if !(n > 0.0) {
        return Err(Error::NoBoundState(format!(
            "level number N = {n} is not positive"
        )));
    }
    let (s, k) = s_and_k(p, nu2);
    let no_bound = || {
        Error::NoBoundState(format!(
            "no admissible root for N = {n} (c4 + d nu2^2 = {s}, c1 nu2^2 + c0/2 = {k})"
        ))
    };
    if p.b == 0.0 {
        if p.a == 0.0 {
            return Err(Error::DegenerateHamiltonian);
        }
        if !(s > 0.0) {
            return Err(no_bound());
        }
        let t = s.sqrt();
        return Ok(((2.0 * n * t + k) / (2.0 * p.a), t));
    }
    let t = if p.a == 0.0 {
        -k / (2.0 * n)
    } else {
        // r t² + 2N t + c = 0
        let r = p.a / p.b;
        let c = k - r * s;
        let disc = n * n - r * c;
        if disc < 0.0 {
            return Err(no_bound());
        }
        let q = -(n + disc.sqrt());
        [q / r, c / q]
            .into_iter()
            .filter(|t| t.is_finite() && *t > 0.0)
            .fold(f64::NAN, f64::max)
    };
    if !(t > 0.0) || !t.is_finite() {
        return Err(no_bound());
    }
    Ok(((s - t * t) / (2.0 * p.b), t))
}

/// Closed-form energy of a level.
pub fn solve_energy(p: &ModelParams, sector: &Sector, spec: &LevelSpec) -> Result<EnergyLevel> {
    let n = level_number(sector, spec)?;
    let (e, t) = solve_for_level_number(p, sector.nu2, n)?;
    Ok(EnergyLevel::new(spec.mode(), n, e, t))
}

/// Bisection tolerance on the energy.
pub const BISECT_TOL: f64 = 1e-13;

/// Energy of a level by bisection on
/// `F(E) = (2aE − c1ν2² − c0/2) − 2N√(c4 − 2bE + dν2²)`; requires `b > 0`.
pub fn solve_energy_bisect(
    p: &ModelParams,
    sector: &Sector,
    spec: &LevelSpec,
) -> Result<EnergyLevel> {
    let n = level_number(sector, spec)?;
    if !(p.b > 0.0) {
        return Err(Error::InvalidArgument("bisection needs b > 0".into()));
    }
    let (s, k) = s_and_k(p, sector.nu2);
    let f = |e: f64| (2.0 * p.a * e - k) - 2.0 * n * (s - 2.0 * p.b * e).max(0.0).sqrt();
    let hi0 = s / (2.0 * p.b) - 1e-12;
    if !(f(hi0) > 0.0) {
        return Err(Error::NoBoundState(format!(
            "F(E) has no sign change below E = {hi0}"
        )));
    }
    let mut lo = None;
    let mut step = 1.0;
    for _ in 0..60 {
        if f(hi0 - step) < 0.0 {
            lo = Some(hi0 - step);
            break;
        }
        step *= 2.0;
    }
    let Some(mut lo) = lo else {
        return Err(Error::NoBoundState(
            "no sign change after 60 doublings".into(),
        ));
    };
    let mut hi = hi0;
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e = 0.5 * (lo + hi);
    let t = (s - 2.0 * p.b * e).sqrt();
    Ok(EnergyLevel::new(spec.mode(), n, e, t))
}

/// Spherical separation constant `k1 = (l + (δ1+δ2)/2)(l + (δ1+δ2)/2 + 1)`.
pub fn separation_constant_k1(sector: &Sector, l: u32) -> Result<f64> {
    if (l as f64) < sector.nu1 - 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "l = {l} below nu1 = {}",
            sector.nu1
        )));
    }
    let lam = l as f64 + sector.half_delta_sum();
    Ok(lam * (lam + 1.0))
}

/// Parabolic separation constants `(k_ξ, k_η = −k_ξ)` for a level, with
/// `k_ξ = ε[β/(4ε) − n1 − (δ1 + ν1 + 1)/2]` and `ε = t`.
pub fn separation_constant_k2(
    p: &ModelParams,
    sector: &Sector,
    level: &EnergyLevel,
    n1: u32,
) -> (f64, f64) {
    let (_, beta) = p.alpha_beta(level.energy, sector.nu2);
    let eps = level.t;
    let k = eps * (beta / (4.0 * eps) - n1 as f64 - 0.5 * (sector.delta1 + sector.nu1 + 1.0));
    (k, -k)
}

/// `n1 + n2 + ν1 = n − 1`.
pub fn check_quantum_relation(n: u32, n1: u32, n2: u32, nu1: u32) -> bool {
    n1 as u64 + n2 as u64 + nu1 as u64 + 1 == n as u64
}

/// One enumerated parabolic level; `level` is `None` when no bound state exists.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRow {
    pub n1: u32,
    pub n2: u32,
    pub nu1: u32,
    pub nu2: f64,
    pub level: Option<EnergyLevel>,
}

impl LevelRow {
    fn key(&self) -> (u32, u32, u32) {
        (self.n1, self.n2, self.nu1)
    }
}

/// All parabolic specs with integer `ν1 ≥ 0` and `n1 + n2 + ν1 ≤ n_max − 1`,
/// sorted by energy then `(n1, n2, ν1)`; absent levels sort last.
pub fn enumerate_levels(p: &ModelParams, nu2: f64, n_max: u32) -> Vec<LevelRow> {
    let mut rows = level_specs(n_max)
        .into_iter()
        .map(|(n1, n2, nu1)| solve_row(p, nu2, n1, n2, nu1))
        .collect::<Vec<_>>();
    sort_rows(&mut rows);
    rows
}

/// The `(n1, n2, ν1)` triples visited by [`enumerate_levels`], in generation order.
pub fn level_specs(n_max: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for total in 0..n_max {
        for nu1 in 0..=total {
            for n1 in 0..=(total - nu1) {
                out.push((n1, total - nu1 - n1, nu1));
            }
        }
    }
    out
}

/// Solves one enumeration row.
pub fn solve_row(p: &ModelParams, nu2: f64, n1: u32, n2: u32, nu1: u32) -> LevelRow {
    let level = Sector::new(p, nu1 as f64, nu2)
        .and_then(|s| solve_energy(p, &s, &LevelSpec::Parabolic { n1, n2 }))
        .ok();
    LevelRow {
        n1,
        n2,
        nu1,
        nu2,
        level,
    }
}

/// Deterministic ordering used by [`enumerate_levels`].
pub fn sort_rows(rows: &mut [LevelRow]) {
    rows.sort_by(|x, y| {
        let by_energy = match (&x.level, &y.level) {
            (Some(a), Some(b)) => a.energy.total_cmp(&b.energy),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        };
        by_energy.then(x.key().cmp(&y.key()))
    });
}
