//! Subcommand drivers. Each returns a [`Report`]; rows are computed on a
//! worker pool and collected in input order.

use monopole_core::algebra::{Rational, Scalar};
use monopole_core::qalgebra::{
    build_unirrep, compare_spectra, constraint_status, perturbed_unirrep, phi_factorized,
    random_admissible, solve_quantization, verify_phi_equivalence, verify_q3_relations,
    OffDiagonal, SolutionSet, Q3_TOL,
};
use monopole_core::spectrum::{
    enumerate_levels, separation_constant_k1, solve_energy, solve_energy_bisect, LevelSpec,
};
use monopole_core::sturm::{angular_eigen, convergence_order, radial_eigen, Grid, Kappa};
use monopole_core::wavefunctions::{ParabolicState, SphericalState};
use monopole_core::{ModelParams, Preset, Result as CoreResult, Sector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::fixtures;
use crate::report::{Cell, Report};

const DEFAULT_NU1: [f64; 3] = [0.0, 1.0, 2.0];

fn par_map<T: Sync, R: Send>(
    jobs: Option<usize>,
    items: &[T],
    f: impl Fn(&T) -> R + Sync + Send,
) -> Result<Vec<R>, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

fn sectors(cfg: &RunConfig, default_nu1: &[f64]) -> Vec<(f64, f64)> {
    let nu1 = cfg.nu1_or(default_nu1);
    cfg.nu2
        .iter()
        .flat_map(|&nu2| nu1.iter().map(move |&n1| (n1, nu2)))
        .collect()
}

fn integer_nu1(nu1: f64) -> Result<u32, CliError> {
    if nu1 >= 0.0 && nu1.fract() == 0.0 && nu1 <= f64::from(u32::MAX) {
        Ok(nu1 as u32)
    } else {
        Err(CliError::Usage(format!(
            "nu1 must be a nonnegative integer, got {nu1}"
        )))
    }
}

pub fn presets() -> Report {
    let mut columns = vec!["name"];
    columns.extend(monopole_core::model::PARAM_NAMES);
    let mut r = Report::new("presets", columns);
    for p in Preset::ALL {
        let mut row = vec![Cell::from(p.name())];
        row.extend(p.params().values().into_iter().map(Cell::from));
        r.push(row);
    }
    r
}

pub fn spectrum(cfg: &RunConfig) -> Result<Report, CliError> {
    let filter = cfg
        .nu1
        .as_ref()
        .map(|v| {
            v.iter()
                .map(|&x| integer_nu1(x))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let per_nu2 = par_map(cfg.jobs, &cfg.nu2, |&nu2| {
        enumerate_levels(&cfg.params, nu2, cfg.nmax)
    })?;
    let mut r = Report::new(
        "spectrum",
        vec![
            "nu1",
            "nu2",
            "n1",
            "n2",
            "n",
            "level_number",
            "energy",
            "t",
            "epsilon",
            "algebra",
        ],
    )
    .with_meta(cfg.echo());
    for row in per_nu2.into_iter().flatten() {
        if filter.as_ref().is_some_and(|f| !f.contains(&row.nu1)) {
            continue;
        }
        let lvl = row.level.as_ref();
        r.push(vec![
            row.nu1.into(),
            row.nu2.into(),
            row.n1.into(),
            row.n2.into(),
            (row.n1 + row.n2 + row.nu1 + 1).into(),
            Cell::real(lvl.map(|l| l.level_number)),
            Cell::real(lvl.map(|l| l.energy)),
            Cell::real(lvl.map(|l| l.t)),
            Cell::real(lvl.map(|l| l.epsilon)),
            lvl.map(|l| {
                Cell::text(
                    cfg.params
                        .classify_dynamical_algebra(l.energy, row.nu2)
                        .to_string(),
                )
            })
            .unwrap_or(Cell::Empty),
        ]);
    }
    Ok(r)
}

const SIGNS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

pub fn algebraic(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut items = Vec::new();
    for (nu1, nu2) in sectors(cfg, &DEFAULT_NU1) {
        for p in 0..=cfg.p {
            for set in [SolutionSet::Set1, SolutionSet::Set2] {
                for (e1, e2) in SIGNS {
                    items.push((nu1, nu2, p, set, e1, e2));
                }
            }
        }
    }
    let rows = par_map(cfg.jobs, &items, |&(nu1, nu2, p, set, e1, e2)| {
        let head = vec![
            nu1.into(),
            nu2.into(),
            p.into(),
            Cell::Int(set.id().into()),
            e1.into(),
            e2.into(),
        ];
        let solved = Sector::new(&cfg.params, nu1, nu2)
            .and_then(|s| solve_quantization(&cfg.params, &s, p, e1, e2, set))
            .and_then(|sol| constraint_status(&cfg.params, &sol).map(|c| (sol, c)));
        let tail = match solved {
            Ok((sol, status)) => vec![
                sol.u.into(),
                sol.energy.into(),
                sol.s1.into(),
                sol.eta1.into(),
                status.satisfied().into(),
                Cell::Empty,
            ],
            Err(e) => {
                let mut t = vec![Cell::Empty; 5];
                t.push(Cell::text(e.to_string()));
                t
            }
        };
        head.into_iter().chain(tail).collect::<Vec<_>>()
    })?;
    let mut r = Report::new(
        "algebraic",
        vec![
            "nu1",
            "nu2",
            "p",
            "set",
            "eps1",
            "eps2",
            "u",
            "energy",
            "s1",
            "eta1",
            "positivity",
            "error",
        ],
    )
    .with_meta(cfg.echo());
    rows.into_iter().for_each(|row| r.push(row));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Phi,
    Spectrum,
    Constraints,
    Unirrep,
    Angular,
    Wavefunctions,
    Quantum,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub trials: usize,
    pub perturb_u: Option<f64>,
}

type Row = Vec<Cell>;

fn check_row(suite: &str, case: String, value: Cell, threshold: Cell, pass: bool) -> Row {
    vec![
        Cell::from(suite),
        Cell::Text(case),
        value,
        threshold,
        pass.into(),
    ]
}

fn failed_row(suite: &str, case: String, err: impl std::fmt::Display) -> Row {
    check_row(
        suite,
        format!("{case}: {err}"),
        Cell::Empty,
        Cell::Empty,
        false,
    )
}

pub fn verify(cfg: &RunConfig, opts: &VerifyOptions) -> Result<Report, CliError> {
    let mut rows: Vec<Row> = Vec::new();
    let s = opts.suite;
    if s.includes(Suite::Phi) {
        rows.extend(verify_phi(cfg, opts));
    }
    if s.includes(Suite::Spectrum) {
        rows.extend(verify_spectrum(cfg, opts)?);
    }
    if s.includes(Suite::Constraints) {
        rows.extend(verify_constraints()?);
    }
    if s.includes(Suite::Unirrep) {
        rows.extend(verify_unirrep(cfg, opts)?);
    }
    if s.includes(Suite::Angular) {
        rows.extend(verify_angular(cfg)?);
    }
    if s.includes(Suite::Wavefunctions) {
        rows.extend(verify_wavefunctions(cfg)?);
    }
    if s.includes(Suite::Quantum) {
        rows.extend(verify_quantum(cfg)?);
    }
    let mut meta = cfg.echo();
    meta.push(("trials", opts.trials.to_string()));
    if let Some(du) = opts.perturb_u {
        meta.push(("perturb_u", du.to_string()));
    }
    let mut r = Report::new(
        "verify",
        vec!["suite", "case", "value", "threshold", "pass"],
    )
    .with_meta(meta);
    rows.into_iter().for_each(|row| r.push(row));
    Ok(r)
}

fn verify_phi(cfg: &RunConfig, opts: &VerifyOptions) -> Vec<Row> {
    verify_phi_equivalence(opts.trials, cfg.seed)
        .trials
        .into_iter()
        .map(|t| {
            let value = t.first_diff.map(Cell::from).unwrap_or(Cell::Empty);
            check_row(
                "phi",
                format!("trial {}", t.index),
                value,
                Cell::Empty,
                t.equal,
            )
        })
        .collect()
}

fn verify_spectrum(cfg: &RunConfig, opts: &VerifyOptions) -> Result<Vec<Row>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let draws: Vec<_> = (0..opts.trials)
        .map(|_| random_admissible(&mut rng, 6))
        .collect();
    par_map(cfg.jobs, &draws, |d| {
        let case = format!("nu1={} nu2={} p={}", d.nu1, d.nu2, d.p_level);
        match Sector::new(&d.params, d.nu1, d.nu2)
            .and_then(|s| compare_spectra(&d.params, &s, d.p_level))
        {
            Ok(c) => {
                let rel = c.max_diff / c.algebraic.abs().max(1.0);
                check_row("spectrum", case, rel.into(), 1e-10.into(), c.passed())
            }
            Err(e) => failed_row("spectrum", case, e),
        }
    })
}

fn verify_constraints() -> Result<Vec<Row>, CliError> {
    let rows = fixtures::rational_set1(10)?
        .into_iter()
        .map(|f| {
            let sol = &f.solution;
            match phi_factorized(&f.params, &sol.charges(), &sol.u, &sol.m1, &sol.m2) {
                Ok(phi) => {
                    let zero = Rational::from_int(0);
                    let end = Rational::from_int(i64::from(sol.p_level) + 1);
                    let mut violations = 0usize;
                    violations += usize::from(phi.eval(&zero) != zero);
                    violations += usize::from(phi.eval(&end) != zero);
                    violations += (1..=sol.p_level)
                        .filter(|&x| !(phi.eval(&Rational::from_int(i64::from(x))) > zero))
                        .count();
                    check_row(
                        "constraints",
                        f.name,
                        violations.into(),
                        0usize.into(),
                        violations == 0,
                    )
                }
                Err(e) => failed_row("constraints", f.name, e),
            }
        })
        .collect();
    Ok(rows)
}

pub const UNIRREP_LEVELS: [u32; 6] = [0, 1, 2, 3, 5, 10];

fn verify_unirrep(cfg: &RunConfig, opts: &VerifyOptions) -> Result<Vec<Row>, CliError> {
    let mut items = Vec::new();
    for (name, params) in [
        ("micz", fixtures::micz()),
        ("kaluza-klein", fixtures::kaluza_klein()),
    ] {
        for p in UNIRREP_LEVELS {
            items.push((name, params.clone(), p, opts.perturb_u, false));
        }
        if opts.perturb_u.is_none() {
            items.push((name, params.clone(), 2, Some(0.1), true));
        }
    }
    par_map(cfg.jobs, &items, |(name, params, p, du, control)| {
        let case = match (du, control) {
            (Some(d), true) => format!("{name} p={p} negative control u+{d}"),
            (Some(d), false) => format!("{name} p={p} u+{d}"),
            (None, _) => format!("{name} p={p}"),
        };
        let built = Sector::new(params, 0.0, 0.5)
            .and_then(|s| solve_quantization(params, &s, *p, 1, 1, SolutionSet::Set1))
            .and_then(|sol| {
                let u = match du {
                    Some(d) => perturbed_unirrep(params, &sol, *d)?,
                    None => build_unirrep(params, &sol, OffDiagonal::Corrected)?,
                };
                Ok(verify_q3_relations(&u, params, &sol.charges()))
            });
        match built {
            Ok(rep) => {
                let worst = rep.residual_ac.max(rep.residual_bc);
                if *control {
                    check_row("unirrep", case, worst.into(), 1e-3.into(), worst > 1e-3)
                } else {
                    check_row("unirrep", case, worst.into(), Q3_TOL.into(), rep.passed())
                }
            }
            Err(e) => failed_row("unirrep", case, e),
        }
    })
}

/// `(ν1, ν2)` sectors of the angular check, on the ring-shaped preset.
const ANGULAR_SECTORS: [(f64, f64); 3] = [(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)];

fn verify_angular(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let params = Preset::HartmannTaubNut.params();
    let n = cfg.grid;
    let mut items = Vec::new();
    for (nu1, nu2) in ANGULAR_SECTORS {
        for k in 0..3u32 {
            items.push((nu1, nu2, k));
        }
    }
    par_map(cfg.jobs, &items, |&(nu1, nu2, k)| {
        let l = nu1 as u32 + k;
        let case = format!("nu1={nu1} nu2={nu2} l={l}");
        let run = || -> CoreResult<(f64, f64)> {
            let s = Sector::new(&params, nu1, nu2)?;
            let exact = separation_constant_k1(&s, l)?;
            let solve = |pts: usize| {
                Ok(angular_eigen(&s, &Grid::angular(pts)?, k as usize + 1)?.values[k as usize])
            };
            let rel = (solve(n)? - exact).abs() / exact.abs().max(1.0);
            let order = convergence_order(solve, &[n / 8, n / 4, n / 2, n], Some(exact))?.order;
            Ok((rel, order))
        };
        match run() {
            Ok((rel, order)) => {
                let pass = rel <= cfg.tol && (order - 2.0).abs() <= 0.2;
                check_row(
                    "angular",
                    format!("{case} order={order:.3}"),
                    rel.into(),
                    cfg.tol.into(),
                    pass,
                )
            }
            Err(e) => failed_row("angular", case, e),
        }
    })
}

pub const ODE_TOL: f64 = 1e-8;

fn verify_wavefunctions(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    #[derive(Clone, Copy)]
    enum State {
        Spherical(u32, u32),
        Parabolic(u32, u32),
    }
    let mut items = Vec::new();
    for (name, params) in [
        ("micz", fixtures::micz()),
        ("ring-shaped", Preset::HartmannTaubNut.params()),
    ] {
        for nu1 in [0.0, 1.0] {
            for n in 1..=3u32 {
                for l in nu1 as u32..n {
                    items.push((name, params.clone(), nu1, State::Spherical(n, l)));
                }
            }
            for (n1, n2) in [(0, 0), (1, 0), (0, 2), (2, 1)] {
                items.push((name, params.clone(), nu1, State::Parabolic(n1, n2)));
            }
        }
    }
    par_map(cfg.jobs, &items, |(name, params, nu1, st)| {
        let (case, run): (String, CoreResult<(f64, bool)>) = match *st {
            State::Spherical(n, l) => (
                format!("{name} nu1={nu1} spherical n={n} l={l}"),
                Sector::new(params, *nu1, 0.5)
                    .and_then(|s| SphericalState::new(params, &s, n, l))
                    .and_then(|w| w.normalize(200))
                    .and_then(|w| {
                        let res = w.ode_residual_angular()?.max(w.ode_residual_radial()?);
                        Ok((res, w.radial_nodes()? == (n - l - 1) as usize))
                    }),
            ),
            State::Parabolic(n1, n2) => (
                format!("{name} nu1={nu1} parabolic n1={n1} n2={n2}"),
                Sector::new(params, *nu1, 0.5)
                    .and_then(|s| ParabolicState::new(params, &s, n1, n2))
                    .and_then(|w| w.normalize(200))
                    .and_then(|w| {
                        let res = w.ode_residual_parabolic()?;
                        Ok((res, w.parabolic_nodes()? == (n1 as usize, n2 as usize)))
                    }),
            ),
        };
        match run {
            Ok((res, nodes_ok)) => {
                let case = if nodes_ok {
                    case
                } else {
                    format!("{case} (node count mismatch)")
                };
                check_row(
                    "wavefunctions",
                    case,
                    res.into(),
                    ODE_TOL.into(),
                    res <= ODE_TOL && nodes_ok,
                )
            }
            Err(e) => failed_row("wavefunctions", case, e),
        }
    })
}

fn verify_quantum(cfg: &RunConfig) -> Result<Vec<Row>, CliError> {
    let mut items = Vec::new();
    for &nu2 in &cfg.nu2 {
        for n in 1..=5u32 {
            for nu1 in 0..n {
                items.push((nu2, n, nu1));
            }
        }
    }
    let rows = par_map(cfg.jobs, &items, |&(nu2, n, nu1)| {
        let case = format!("nu1={nu1} nu2={nu2} n={n}");
        let run = || -> CoreResult<Option<f64>> {
            let s = Sector::new(&cfg.params, f64::from(nu1), nu2)?;
            let mut energies = Vec::new();
            for l in nu1..n {
                match solve_energy(&cfg.params, &s, &LevelSpec::Spherical { n, l }) {
                    Ok(level) => energies.push(level.energy),
                    Err(monopole_core::Error::NoBoundState(_)) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
            let total = n - 1 - nu1;
            for n1 in 0..=total {
                let spec = LevelSpec::Parabolic { n1, n2: total - n1 };
                energies.push(solve_energy(&cfg.params, &s, &spec)?.energy);
            }
            let lo = energies.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(Some((hi - lo) / lo.abs().max(1.0)))
        };
        match run() {
            Ok(Some(spread)) => Some(check_row(
                "quantum",
                case,
                spread.into(),
                1e-12.into(),
                spread <= 1e-12,
            )),
            Ok(None) => None,
            Err(e) => Some(failed_row("quantum", case, e)),
        }
    })?;
    Ok(rows.into_iter().flatten().collect())
}

fn radial_cutoff(cfg: &RunConfig, epsilon: f64, nr: u32) -> f64 {
    cfg.rmax
        .unwrap_or_else(|| Grid::heuristic_cutoff(Some(epsilon)) + 8.0 * f64::from(nr) / epsilon)
}

/// FD value of the `index`-th radial mode for `l`.
fn radial_oracle(
    params: &ModelParams,
    s: &Sector,
    l: u32,
    index: u32,
    points: usize,
    rmax: f64,
    kappa: Kappa,
) -> CoreResult<f64> {
    let k1 = separation_constant_k1(s, l)?;
    let grid = Grid::radial(points, rmax)?;
    Ok(radial_eigen(params, s, k1, &grid, index as usize + 1, kappa)?.values[index as usize])
}

pub fn oracle(cfg: &RunConfig) -> Result<Report, CliError> {
    let points: Vec<usize> = [8, 4, 2, 1].iter().map(|d| cfg.grid / d).collect();
    let mut items = Vec::new();
    for (nu1, nu2) in sectors(cfg, &DEFAULT_NU1) {
        let l = integer_nu1(nu1)?;
        for kind in ["radial", "angular"] {
            for &n in &points {
                items.push((kind, nu1, nu2, l, n));
            }
        }
    }
    let computed = par_map(cfg.jobs, &items, |&(kind, nu1, nu2, l, n)| {
        let s = Sector::new(&cfg.params, nu1, nu2)?;
        if kind == "radial" {
            let exact = solve_energy(&cfg.params, &s, &LevelSpec::Spherical { n: l + 1, l })?;
            let rmax = radial_cutoff(cfg, exact.epsilon, 0);
            // ungauged, so the table shows the discretization order
            let value = radial_oracle(&cfg.params, &s, l, 0, n, rmax, Kappa::Zero)?;
            Ok((value, exact.energy, Some(rmax)))
        } else {
            let exact = separation_constant_k1(&s, l)?;
            Ok((
                angular_eigen(&s, &Grid::angular(n)?, 1)?.values[0],
                exact,
                None,
            ))
        }
    })?;
    let mut r = Report::new(
        "oracle",
        vec![
            "kind",
            "nu1",
            "nu2",
            "l",
            "points",
            "rmax",
            "value",
            "exact",
            "rel_error",
            "order",
            "error",
        ],
    )
    .with_meta(cfg.echo());
    let mut prev: Option<(&str, f64, f64, f64)> = None;
    for (&(kind, nu1, nu2, l, n), res) in items.iter().zip(computed) {
        let res: CoreResult<(f64, f64, Option<f64>)> = res;
        let head = vec![Cell::from(kind), nu1.into(), nu2.into(), l.into(), n.into()];
        let tail = match res {
            Ok((value, exact, rmax)) => {
                let err = (value - exact).abs();
                let order = match prev {
                    Some((k, a, b, e))
                        if k == kind && a == nu1 && b == nu2 && e > 0.0 && err > 0.0 =>
                    {
                        Cell::from((e / err).log2())
                    }
                    _ => Cell::Empty,
                };
                prev = Some((kind, nu1, nu2, err));
                vec![
                    Cell::real(rmax),
                    value.into(),
                    exact.into(),
                    (err / exact.abs().max(1.0)).into(),
                    order,
                    Cell::Empty,
                ]
            }
            Err(e) => {
                prev = None;
                let mut t = vec![Cell::Empty; 5];
                t.push(Cell::text(e.to_string()));
                t
            }
        };
        r.push(head.into_iter().chain(tail).collect());
    }
    Ok(r)
}

pub fn compare(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut items = Vec::new();
    for (nu1, nu2) in sectors(cfg, &DEFAULT_NU1) {
        let l = integer_nu1(nu1)?;
        for p in 0..=cfg.p {
            items.push((nu1, nu2, l, p));
        }
    }
    let rows = par_map(cfg.jobs, &items, |&(nu1, nu2, l, p)| {
        let head = vec![Cell::from(nu1), nu2.into(), p.into()];
        let params = &cfg.params;
        let run = || -> CoreResult<Row> {
            let s = Sector::new(params, nu1, nu2)?;
            let cmp = compare_spectra(params, &s, p)?;
            let e = cmp.algebraic;
            let scale = e.abs().max(1.0);
            let bisect = solve_energy_bisect(params, &s, &LevelSpec::Parabolic { n1: 0, n2: p })
                .ok()
                .map(|lvl| lvl.energy);
            let spherical = solve_energy(params, &s, &LevelSpec::Spherical { n: p + l + 1, l })?;
            let rmax = radial_cutoff(cfg, spherical.epsilon, p);
            let kappa = Kappa::Tracking {
                mode: p as usize,
                iterations: 3,
            };
            let fd = radial_oracle(params, &s, l, p, cfg.grid, rmax, kappa)?;
            let rel_fd = (fd - e).abs() / scale;
            let bisect_ok = bisect.is_none_or(|b| (b - e).abs() <= 1e-11 * scale);
            let pass = cmp.passed() && bisect_ok && rel_fd <= cfg.tol;
            Ok(vec![
                "ok".into(),
                cmp.analytic[0].into(),
                Cell::real(bisect),
                e.into(),
                fd.into(),
                cmp.max_diff.into(),
                rel_fd.into(),
                pass.into(),
            ])
        };
        let tail = match run() {
            Ok(t) => t,
            Err(monopole_core::Error::NoBoundState(_)) => {
                let mut t = vec![Cell::from("absent")];
                t.extend(vec![Cell::Empty; 7]);
                t
            }
            Err(e) => {
                let mut t = vec![Cell::text(format!("error: {e}"))];
                t.extend(vec![Cell::Empty; 6]);
                t.push(false.into());
                t
            }
        };
        head.into_iter().chain(tail).collect::<Row>()
    })?;
    let mut r = Report::new(
        "compare",
        vec![
            "nu1",
            "nu2",
            "p",
            "status",
            "e_analytic",
            "e_bisect",
            "e_algebraic",
            "e_oracle",
            "diff_algebraic",
            "rel_diff_oracle",
            "pass",
        ],
    )
    .with_meta(cfg.echo());
    rows.into_iter().for_each(|row| r.push(row));
    Ok(r)
}
