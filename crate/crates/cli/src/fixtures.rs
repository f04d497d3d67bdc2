//! Built-in parameter sets used by `verify`.

use monopole_core::algebra::{rat, Rational};
use monopole_core::qalgebra::{set1_with_t, AlgebraicSolution};
use monopole_core::{ModelParams, Preset, Result};

/// MICZ couplings with the attractive Coulomb term `c0 = −8`.
pub fn micz() -> ModelParams {
    Preset::Micz
        .params()
        .with("c0", -8.0)
        .expect("c0 is a coupling")
}

/// Kaluza-Klein couplings with `c0 = −8`.
pub fn kaluza_klein() -> ModelParams {
    Preset::KaluzaKlein
        .params()
        .with("c0", -8.0)
        .expect("c0 is a coupling")
}

/// Named exact Set-1 solution.
pub struct RationalFixture {
    pub name: String,
    pub params: ModelParams<Rational>,
    pub solution: AlgebraicSolution<Rational>,
}

/// Exact Set-1 data for `p = 0..=max_p`.
///
/// MICZ has `a = 0`, so `t = 9/(2(2p+3))` solves its quantization relation
/// with rational energy. For the other families `t` is fixed and `c0` is
/// back-solved.
pub fn rational_set1(max_p: u32) -> Result<Vec<RationalFixture>> {
    let mut out = Vec::new();
    let half = rat(1, 2);
    for p in 0..=max_p {
        let t = rat(9, 2 * (2 * i64::from(p) + 3));
        let (params, solution) = set1_with_t(
            &micz().to_rational(),
            -half.clone(),
            half.clone(),
            rat(1, 1),
            rat(0, 1),
            p,
            1,
            1,
            t,
        )?;
        out.push(RationalFixture {
            name: format!("micz p={p}"),
            params,
            solution,
        });
    }
    for p in 0..=max_p {
        let (params, solution) = set1_with_t(
            &Preset::KaluzaKlein.params().to_rational(),
            -half.clone(),
            half.clone(),
            rat(1, 1),
            rat(0, 1),
            p,
            1,
            1,
            rat(1, 2),
        )?;
        out.push(RationalFixture {
            name: format!("kaluza-klein p={p}"),
            params,
            solution,
        });
    }
    for p in 0..=max_p {
        let (params, solution) = set1_with_t(
            &Preset::HartmannTaubNut.params().to_rational(),
            rat(1, 2),
            rat(1, 2),
            rat(3, 2),
            rat(5, 4),
            p,
            1,
            1,
            rat(2, 3),
        )?;
        out.push(RationalFixture {
            name: format!("ring-shaped p={p}"),
            params,
            solution,
        });
    }
    Ok(out)
}
