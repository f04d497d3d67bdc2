//! Acceptance suite: one line per criterion, then a single assertion.

use std::process::Command;
use std::time::Instant;

use monopole_core::algebra::rat;
use monopole_core::qalgebra::{
    build_unirrep, compare_spectra, perturbed_unirrep, phi_factorized, random_admissible,
    solve_quantization, verify_phi_equivalence, verify_q3_relations, OffDiagonal, SolutionSet,
};
use monopole_core::spectrum::{
    separation_constant_k1, solve_energy, solve_energy_bisect, LevelSpec,
};
use monopole_core::sturm::{angular_eigen, convergence_order, radial_eigen, Grid, Kappa};
use monopole_core::wavefunctions::{ParabolicState, SphericalState};
use monopole_core::{ModelParams, Preset, Result, Sector};
use monopole_spectra::fixtures;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn core<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn worked_fixture() -> Outcome {
    let p = fixtures::micz();
    let s = core(Sector::new(&p, 0.0, 0.5))?;
    let spec = LevelSpec::Parabolic { n1: 0, n2: 0 };
    let closed = core(solve_energy(&p, &s, &spec))?.energy;
    let bisect = core(solve_energy_bisect(&p, &s, &spec))?.energy;
    let grid = core(Grid::radial(4000, 40.0))?;
    let fd = core(radial_eigen(&p, &s, 0.75, &grid, 1, Kappa::default()))?.values[0];
    let alg = core(solve_quantization(&p, &s, 0, 1, 1, SolutionSet::Set1))?.energy;
    let errs = [
        (closed + 1.0).abs(),
        (bisect + 1.0).abs(),
        (fd + 1.0).abs(),
        (alg + 1.0).abs(),
    ];
    ensure(
        errs[0] <= 1e-12 && errs[1] <= 1e-11 && errs[2] <= 1e-5 && errs[3] <= 1e-12,
        format!(
            "|dE| closed {:.1e}, bisection {:.1e}, FD {:.1e}, algebraic {:.1e}",
            errs[0], errs[1], errs[2], errs[3]
        ),
    )
}

fn spectrum_coincidence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..100 {
        let d = random_admissible(&mut rng, 6);
        let s = core(Sector::new(&d.params, d.nu1, d.nu2))?;
        let c = core(compare_spectra(&d.params, &s, d.p_level))?;
        worst = worst.max(c.max_diff / c.algebraic.abs().max(1.0));
        failures += usize::from(!c.passed());
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        failures == 0 && secs < 1.0,
        format!("100 draws, worst relative diff {worst:.1e}, {failures} failures, {secs:.3} s"),
    )
}

fn structure_function_identity() -> Outcome {
    let report = verify_phi_equivalence(50, 7);
    let diffs: Vec<String> = report
        .trials
        .iter()
        .filter(|t| !t.equal)
        .map(|t| {
            format!(
                "trial {} differs at x^{}",
                t.index,
                t.first_diff.unwrap_or(0)
            )
        })
        .collect();
    ensure(
        diffs.is_empty(),
        if diffs.is_empty() {
            "50 seeded draws, exact rational equality".into()
        } else {
            diffs.join("; ")
        },
    )
}

fn constraint_exactness() -> Outcome {
    let fx = core(fixtures::rational_set1(10))?;
    let zero = rat(0, 1);
    let mut bad = Vec::new();
    for f in &fx {
        let sol = &f.solution;
        let phi = core(phi_factorized(
            &f.params,
            &sol.charges(),
            &sol.u,
            &sol.m1,
            &sol.m2,
        ))?;
        let p1 = i64::from(sol.p_level) + 1;
        let boundary = phi.eval(&zero) == zero && phi.eval(&rat(p1, 1)) == zero;
        let positive = (1..p1).all(|x| phi.eval(&rat(x, 1)) > zero);
        if !(boundary && positive) {
            bad.push(f.name.clone());
        }
    }
    ensure(
        bad.is_empty(),
        format!(
            "{} rational Set-1 fixtures (p <= 10); failing: {bad:?}",
            fx.len()
        ),
    )
}

fn unirrep_identities() -> Outcome {
    let mut worst = 0.0f64;
    let mut control_min = f64::INFINITY;
    for params in [fixtures::micz(), fixtures::kaluza_klein()] {
        let s = core(Sector::new(&params, 0.0, 0.5))?;
        for p in [0, 1, 2, 3, 5, 10] {
            let sol = core(solve_quantization(&params, &s, p, 1, 1, SolutionSet::Set1))?;
            let u = core(build_unirrep(&params, &sol, OffDiagonal::Corrected))?;
            let r = verify_q3_relations(&u, &params, &sol.charges());
            worst = worst.max(r.residual_ac).max(r.residual_bc);
            if p > 0 {
                let bad = core(perturbed_unirrep(&params, &sol, 0.1))?;
                let rb = verify_q3_relations(&bad, &params, &sol.charges());
                control_min = control_min.min(rb.residual_ac.max(rb.residual_bc));
            }
        }
    }
    ensure(
        worst <= 1e-9 && control_min > 1e-3,
        format!("worst residual {worst:.1e}; perturbed-u control min residual {control_min:.1e}"),
    )
}

fn angular_separation_constant() -> Outcome {
    let params = Preset::HartmannTaubNut.params();
    let mut worst_rel = 0.0f64;
    let mut orders = Vec::new();
    for (nu1, nu2) in [(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)] {
        let s = core(Sector::new(&params, nu1, nu2))?;
        for k in 0..3usize {
            let l = nu1 as u32 + k as u32;
            let exact = core(separation_constant_k1(&s, l))?;
            let solve = |n: usize| Ok(angular_eigen(&s, &Grid::angular(n)?, k + 1)?.values[k]);
            let rel = (core(solve(4000))? - exact).abs() / exact.abs().max(1.0);
            worst_rel = worst_rel.max(rel);
            orders.push(
                core(convergence_order(
                    solve,
                    &[500, 1000, 2000, 4000],
                    Some(exact),
                ))?
                .order,
            );
        }
    }
    let order_ok = orders.iter().all(|o| (o - 2.0).abs() <= 0.2);
    let (lo, hi) = orders
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &o| {
            (a.min(o), b.max(o))
        });
    ensure(
        worst_rel <= 1e-5 && order_ok,
        format!("worst relative error {worst_rel:.1e}; orders in [{lo:.3}, {hi:.3}]"),
    )
}

fn wavefunction_validity() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut problems = Vec::new();
    let families: [(&str, ModelParams); 2] = [
        ("micz", fixtures::micz()),
        ("ring-shaped", Preset::HartmannTaubNut.params()),
    ];
    for (name, params) in families {
        for nu1 in [0.0, 1.0] {
            let s = core(Sector::new(&params, nu1, 0.5))?;
            for n in 1..=4u32 {
                for l in nu1 as u32..n {
                    let w = core(
                        SphericalState::new(&params, &s, n, l).and_then(|w| w.normalize(200)),
                    )?;
                    let r = core(w.ode_residual_angular())?.max(core(w.ode_residual_radial())?);
                    worst = worst.max(r);
                    count += 1;
                    if core(w.radial_nodes())? != (n - l - 1) as usize {
                        problems.push(format!("{name} n={n} l={l} nodes"));
                    }
                }
            }
            for n1 in 0..=2u32 {
                for n2 in 0..=2u32 {
                    let w = core(
                        ParabolicState::new(&params, &s, n1, n2).and_then(|w| w.normalize(200)),
                    )?;
                    worst = worst.max(core(w.ode_residual_parabolic())?);
                    count += 1;
                    if core(w.parabolic_nodes())? != (n1 as usize, n2 as usize) {
                        problems.push(format!("{name} n1={n1} n2={n2} nodes"));
                    }
                }
            }
        }
    }
    ensure(
        worst <= 1e-8 && problems.is_empty(),
        format!(
            "{count} normalized states, worst ODE residual {worst:.1e}; node issues {problems:?}"
        ),
    )
}

fn quantum_number_relation() -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for params in [fixtures::micz(), Preset::HartmannTaubNut.params()] {
        for nu2 in [0.0, 0.5, 1.0] {
            for n in 1..=5u32 {
                for nu1 in 0..n {
                    let s = core(Sector::new(&params, f64::from(nu1), nu2))?;
                    let Ok(reference) =
                        solve_energy(&params, &s, &LevelSpec::Spherical { n, l: nu1 })
                    else {
                        continue;
                    };
                    let p = n - 1 - nu1;
                    let splits: Vec<_> = (0..=p).map(|n1| (n1, p - n1)).collect();
                    if splits.len() != p as usize + 1 {
                        return Err(format!("split count {} at p = {p}", splits.len()));
                    }
                    for (n1, n2) in splits {
                        let e = core(solve_energy(&params, &s, &LevelSpec::Parabolic { n1, n2 }))?
                            .energy;
                        worst = worst.max((e - reference.energy).abs());
                        checked += 1;
                    }
                }
            }
        }
    }
    ensure(
        worst <= 1e-12,
        format!("{checked} parabolic levels against spherical, worst |dE| {worst:.1e}"),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_monopole-spectra");
    let args = ["verify", "--suite", "all", "--seed", "11", "--trials", "20"];
    let once = || {
        Command::new(bin)
            .args(args)
            .env_remove("MONOPOLE_SPECTRA_CONFIG")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (once()?, once()?);
    ensure(
        a.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout,
        format!(
            "two runs, {} bytes each, identical: {}",
            a.stdout.len(),
            a.stdout == b.stdout
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        ("1 worked-fixture agreement", worked_fixture),
        ("2 spectrum coincidence", spectrum_coincidence),
        ("3 structure-function identity", structure_function_identity),
        ("4 constraint exactness", constraint_exactness),
        ("5 unirrep identities", unirrep_identities),
        ("6 angular separation constant", angular_separation_constant),
        ("7 wavefunction validity", wavefunction_validity),
        ("8 quantum-number relation", quantum_number_relation),
        ("9 determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  criterion {name}: {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
