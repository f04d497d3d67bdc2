//! Quadratic algebra Q(3): structure relations, Casimir, structure function,
//! constraint solutions and finite-dimensional matrix realizations.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{DMat, Poly, Rational, Scalar};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Sector};
use crate::spectrum::{self, LevelSpec};

/// Eigenvalues of the central elements `H`, `L3` and `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralCharges<T = f64> {
    pub energy: T,
    pub q1: T,
    pub q2: T,
}

impl<T: Scalar> CentralCharges<T> {
    pub fn new(energy: T, q1: T, q2: T) -> Self {
        Self { energy, q1, q2 }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }
}

// Monomial tables over the variables a, b, c0, c1, c2, c3, c4, d, E, Q, L3.
const A: usize = 0;
const B: usize = 1;
const C0: usize = 2;
const C1: usize = 3;
const C2: usize = 4;
const C3: usize = 5;
const C4: usize = 6;
const D: usize = 7;
const E: usize = 8;
const Q: usize = 9;
const L: usize = 10;

type Monomial = (i64, i64, &'static [(usize, u32)]);

fn eval_monomials<T: Scalar>(table: &[Monomial], p: &ModelParams<T>, ch: &CentralCharges<T>) -> T {
    let vars = [
        &p.a, &p.b, &p.c0, &p.c1, &p.c2, &p.c3, &p.c4, &p.d, &ch.energy, &ch.q2, &ch.q1,
    ];
    table.iter().fold(T::zero(), |acc, (num, den, pows)| {
        let term = pows
            .iter()
            .fold(T::from_ratio(*num, *den), |t, &(v, k)| t * vars[v].powi(k));
        acc + term
    })
}

const CASIMIR: &[Monomial] = &[
    (4, 1, &[(A, 2), (E, 2), (L, 2)]),
    (4, 1, &[(A, 2), (E, 2), (Q, 2)]),
    (1, 1, &[(A, 2), (C2, 1), (E, 2)]),
    (1, 1, &[(A, 2), (C3, 1), (E, 2)]),
    (-4, 1, &[(A, 1), (C1, 1), (E, 1), (Q, 4)]),
    (-8, 1, &[(B, 1), (E, 1), (Q, 2), (L, 2)]),
    (-4, 1, &[(A, 1), (C1, 1), (E, 1), (Q, 2), (L, 2)]),
    (-2, 1, &[(A, 1), (C0, 1), (E, 1), (Q, 2)]),
    (2, 1, &[(B, 1), (C2, 1), (E, 1), (Q, 2)]),
    (-1, 1, &[(A, 1), (C1, 1), (C2, 1), (E, 1), (Q, 2)]),
    (2, 1, &[(B, 1), (C3, 1), (E, 1), (Q, 2)]),
    (-1, 1, &[(A, 1), (C1, 1), (C3, 1), (E, 1), (Q, 2)]),
    (-2, 1, &[(A, 1), (C0, 1), (E, 1), (L, 2)]),
    (2, 1, &[(B, 1), (C2, 1), (E, 1), (L, 2)]),
    (2, 1, &[(B, 1), (C3, 1), (E, 1), (L, 2)]),
    (-2, 1, &[(B, 1), (C2, 1), (E, 1)]),
    (-1, 2, &[(A, 1), (C0, 1), (C2, 1), (E, 1)]),
    (-2, 1, &[(B, 1), (C3, 1), (E, 1)]),
    (-1, 2, &[(A, 1), (C0, 1), (C3, 1), (E, 1)]),
    (2, 1, &[(B, 1), (C2, 1), (C3, 1), (E, 1)]),
    (4, 1, &[(B, 1), (C2, 1), (E, 1), (Q, 1), (L, 1)]),
    (-4, 1, &[(B, 1), (C3, 1), (E, 1), (Q, 1), (L, 1)]),
    (1, 1, &[(C1, 2), (Q, 6)]),
    (1, 1, &[(C1, 2), (Q, 4), (L, 2)]),
    (4, 1, &[(D, 1), (Q, 4), (L, 2)]),
    (1, 1, &[(C0, 1), (C1, 1), (Q, 4)]),
    (1, 4, &[(C1, 2), (C2, 1), (Q, 4)]),
    (1, 4, &[(C1, 2), (C3, 1), (Q, 4)]),
    (-1, 1, &[(C2, 1), (D, 1), (Q, 4)]),
    (-1, 1, &[(C3, 1), (D, 1), (Q, 4)]),
    (1, 1, &[(C0, 1), (C1, 1), (Q, 2), (L, 2)]),
    (4, 1, &[(C4, 1), (Q, 2), (L, 2)]),
    (-1, 1, &[(C2, 1), (D, 1), (Q, 2), (L, 2)]),
    (-1, 1, &[(C3, 1), (D, 1), (Q, 2), (L, 2)]),
    (-2, 1, &[(D, 1), (C2, 1), (L, 1), (Q, 3)]),
    (2, 1, &[(D, 1), (C3, 1), (L, 1), (Q, 3)]),
    (1, 4, &[(C0, 2), (Q, 2)]),
    (1, 4, &[(C0, 1), (C1, 1), (C2, 1), (Q, 2)]),
    (1, 4, &[(C0, 1), (C1, 1), (C3, 1), (Q, 2)]),
    (-1, 1, &[(C2, 1), (C4, 1), (Q, 2)]),
    (-1, 1, &[(C3, 1), (C4, 1), (Q, 2)]),
    (1, 1, &[(C2, 1), (D, 1), (Q, 2)]),
    (1, 1, &[(C3, 1), (D, 1), (Q, 2)]),
    (-1, 1, &[(C2, 1), (C3, 1), (D, 1), (Q, 2)]),
    (-2, 1, &[(C4, 1), (C2, 1), (Q, 1), (L, 1)]),
    (2, 1, &[(C4, 1), (C3, 1), (Q, 1), (L, 1)]),
    (1, 4, &[(C0, 2), (L, 2)]),
    (-1, 1, &[(C2, 1), (C4, 1), (L, 2)]),
    (-1, 1, &[(C3, 1), (C4, 1), (L, 2)]),
    (1, 16, &[(C0, 2), (C2, 1)]),
    (1, 16, &[(C0, 2), (C3, 1)]),
    (1, 1, &[(C2, 1), (C4, 1)]),
    (1, 1, &[(C3, 1), (C4, 1)]),
    (-1, 1, &[(C2, 1), (C3, 1), (C4, 1)]),
];

/// Scalar part of `[A, C]`; also minus the numerator of the diagonal of `B`.
const EPS1: &[Monomial] = &[
    (-4, 1, &[(A, 1), (E, 1), (Q, 1), (L, 1)]),
    (2, 1, &[(C1, 1), (Q, 3), (L, 1)]),
    (1, 1, &[(C0, 1), (Q, 1), (L, 1)]),
    (1, 1, &[(A, 1), (C2, 1), (E, 1)]),
    (-1, 1, &[(A, 1), (C3, 1), (E, 1)]),
    (-1, 2, &[(C1, 1), (C2, 1), (Q, 2)]),
    (1, 2, &[(C1, 1), (C3, 1), (Q, 2)]),
    (-1, 4, &[(C0, 1), (C2, 1)]),
    (1, 4, &[(C0, 1), (C3, 1)]),
];

/// Scalar part of `[B, C]`.
const ZETA: &[Monomial] = &[
    (2, 1, &[(A, 2), (E, 2)]),
    (-2, 1, &[(A, 1), (C1, 1), (E, 1), (Q, 2)]),
    (-4, 1, &[(B, 1), (E, 1), (Q, 2)]),
    (-4, 1, &[(B, 1), (E, 1), (L, 2)]),
    (1, 2, &[(C1, 2), (Q, 4)]),
    (2, 1, &[(D, 1), (Q, 4)]),
    (2, 1, &[(D, 1), (Q, 2), (L, 2)]),
    (4, 1, &[(B, 1), (E, 1)]),
    (-1, 1, &[(A, 1), (C0, 1), (E, 1)]),
    (1, 2, &[(C0, 1), (C1, 1), (Q, 2)]),
    (2, 1, &[(C4, 1), (Q, 2)]),
    (-2, 1, &[(D, 1), (Q, 2)]),
    (2, 1, &[(C4, 1), (L, 2)]),
    (1, 8, &[(C0, 2)]),
    (-2, 1, &[(C4, 1)]),
];

/// Value of the Casimir operator on the central charges.
pub fn casimir_value<T: Scalar>(p: &ModelParams<T>, ch: &CentralCharges<T>) -> T {
    eval_monomials(CASIMIR, p, ch)
}

/// Right-hand sides of `[A, C]` and `[B, C]` for given `A`, `B`.
pub fn q3_rhs<T: Scalar>(
    p: &ModelParams<T>,
    ch: &CentralCharges<T>,
    a: &DMat<T>,
    b: &DMat<T>,
) -> Result<(DMat<T>, DMat<T>)> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::InvalidArgument(format!(
            "shape mismatch: A is {n}x{n}, B is {0}x{0}",
            b.dim()
        )));
    }
    let two = T::from_int(2);
    let rhs1 = a
        .anticommutator(b)
        .scale(&two)
        .add(&b.scale(&(p.c2.clone() + p.c3.clone())))
        .add(&DMat::scalar(n, eval_monomials(EPS1, p, ch)));
    let e = ch.energy.clone();
    let q2 = ch.q2.clone() * ch.q2.clone();
    let a_coef = T::from_int(8) * p.b.clone() * e
        - T::from_int(4) * p.d.clone() * q2
        - T::from_int(4) * p.c4.clone();
    let rhs2 = b
        .mul(b)
        .scale(&-two)
        .add(&a.scale(&a_coef))
        .add(&DMat::scalar(n, eval_monomials(ZETA, p, ch)));
    Ok((rhs1, rhs2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    General,
    Factorized,
    Set1,
    Set2,
}

/// Structure function `Φ(x)` as an expanded polynomial with the factors it
/// was built from: `poly = scale · ∏ factors`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureFunction<T = f64> {
    pub poly: Poly<T>,
    pub scale: T,
    pub factors: Vec<Poly<T>>,
    pub provenance: Provenance,
}

impl<T: Scalar> StructureFunction<T> {
    fn from_factors(scale: T, factors: Vec<Poly<T>>, provenance: Provenance) -> Self {
        let poly = Poly::product(&factors).scale(&scale);
        Self {
            poly,
            scale,
            factors,
            provenance,
        }
    }

    pub fn eval(&self, x: &T) -> T {
        self.poly.eval(x)
    }

    pub fn coeffs(&self) -> &[T] {
        self.poly.coeffs()
    }

    /// Re-expands the factor list and compares with the stored polynomial.
    pub fn factors_consistent(&self, rel_tol: f64) -> bool {
        let re = Poly::product(&self.factors).scale(&self.scale);
        let n = re.coeffs().len().max(self.poly.coeffs().len());
        (0..n).all(|k| re.coeff(k).approx_eq(&self.poly.coeff(k), rel_tol))
    }
}

fn cst<T: Scalar>(v: T) -> Poly<T> {
    Poly::constant(v)
}

/// `x + u − r`
fn shifted_root<T: Scalar>(u: &T, r: T) -> Poly<T> {
    Poly::linear_root(r - u.clone())
}

/// `Φ` from the two-bracket expression, expanded in `x`.
pub fn phi_general<T: Scalar>(
    p: &ModelParams<T>,
    ch: &CentralCharges<T>,
    u: &T,
) -> StructureFunction<T> {
    let int = |n: i64| T::from_int(n);
    let (e, q, l) = (ch.energy.clone(), ch.q2.clone(), ch.q1.clone());
    let y = Poly::new(vec![u.clone(), T::one()]);
    let w = &cst(T::one()) - &y.scale(&int(2));
    let w2 = &w * &w;

    let bracket1_const = p.c0.powi(2) - int(8) * p.a.clone() * p.c0.clone() * e.clone()
        + int(4) * p.c0.clone() * p.c1.clone() * q.powi(2)
        + int(16) * p.a.powi(2) * e.powi(2)
        - int(16) * p.a.clone() * p.c1.clone() * e.clone() * q.powi(2)
        + int(4) * p.c1.powi(2) * q.powi(4);
    let bracket1_w2 =
        int(8) * p.b.clone() * e - int(4) * p.c4.clone() - int(4) * p.d.clone() * q.powi(2);
    let bracket1 = &cst(bracket1_const) + &w2.scale(&bracket1_w2);

    let y2 = y.scale(&int(2));
    let two_l = int(2) * l.clone();
    let two_q = int(2) * q.clone();
    let f1 = &y2 + &cst(two_l.clone() - T::one());
    let f2 = &y2 - &cst(T::one() + two_q.clone());
    let f3 = &cst(T::one() + two_l) - &y2;
    let f4 = &y2 + &cst(two_q - T::one());
    let left = &cst(p.c3.clone()) - &(&f1 * &f2);
    let right = &cst(p.c3.clone()) + &(&f3 * &f4);
    let inner = &(&cst(p.c3.clone()) + &w2) + &cst(int(4) * l * q);
    let bracket2 =
        &(&cst(p.c2.powi(2)) - &inner.scale(&(int(2) * p.c2.clone()))) + &(&left * &right);

    StructureFunction::from_factors(int(12288), vec![bracket1, bracket2], Provenance::General)
}

/// `m1² = c2 + (q1 − q2)²` and `m2² = c3 + (q1 + q2)²`.
fn check_m<T: Scalar>(p: &ModelParams<T>, ch: &CentralCharges<T>, m1: &T, m2: &T) -> Result<()> {
    let d = ch.q1.clone() - ch.q2.clone();
    let s = ch.q1.clone() + ch.q2.clone();
    let want1 = p.c2.clone() + d.clone() * d;
    let want2 = p.c3.clone() + s.clone() * s;
    let ok1 = (m1.clone() * m1.clone()).approx_eq(&want1, 1e-12);
    let ok2 = (m2.clone() * m2.clone()).approx_eq(&want2, 1e-12);
    if ok1 && ok2 {
        Ok(())
    } else {
        Err(Error::Inconsistent(format!(
            "m1 = {:?}, m2 = {:?} do not match c2 + (q1-q2)^2 = {:?}, c3 + (q1+q2)^2 = {:?}",
            m1.to_f64(),
            m2.to_f64(),
            want1.to_f64(),
            want2.to_f64()
        )))
    }
}

/// `Φ` in factorized form.
///
/// The last two linear factors `x + u − ½ ∓ K` with
/// `K = (c0 − 4aE + 2c1q2²)/(4√S')` are kept multiplied together with the
/// prefactor `S' = c4 − 2bE + dq2²` as `S'(x + u − ½)² − (4K√S')²/16`, which
/// stays rational.
pub fn phi_factorized<T: Scalar>(
    p: &ModelParams<T>,
    ch: &CentralCharges<T>,
    u: &T,
    m1: &T,
    m2: &T,
) -> Result<StructureFunction<T>> {
    check_m(p, ch, m1, m2)?;
    let half = T::from_ratio(1, 2);
    let int = |n: i64| T::from_int(n);
    let e = ch.energy.clone();
    let q2 = ch.q2.clone() * ch.q2.clone();
    let s_prime = p.c4.clone() - int(2) * p.b.clone() * e.clone() + p.d.clone() * q2.clone();
    let kappa = p.c0.clone() - int(4) * p.a.clone() * e + int(2) * p.c1.clone() * q2;
    let root =
        |s1: i64, s2: i64| half.clone() * (T::one() + int(s1) * m1.clone() + int(s2) * m2.clone());
    let y_half = shifted_root(u, half.clone());
    let quadratic = &(&y_half * &y_half).scale(&s_prime) - &cst(kappa.powi(2) / int(16));
    let factors = vec![
        shifted_root(u, root(-1, 1)),
        shifted_root(u, root(1, -1)),
        shifted_root(u, root(-1, -1)),
        shifted_root(u, root(1, 1)),
        quadratic,
    ];
    Ok(StructureFunction::from_factors(
        int(-3_145_728),
        factors,
        Provenance::Factorized,
    ))
}

/// Outcome of one exact identity trial.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiTrial {
    pub index: usize,
    pub equal: bool,
    /// Power of `x` of the first differing coefficient.
    pub first_diff: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiEquivalenceReport {
    pub seed: u64,
    pub trials: Vec<PhiTrial>,
}

impl PhiEquivalenceReport {
    pub fn all_equal(&self) -> bool {
        self.trials.iter().all(|t| t.equal)
    }
}

/// Random rational data with `c2`, `c3` back-solved so the factorized form
/// applies exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiDraw {
    pub params: ModelParams<Rational>,
    pub charges: CentralCharges<Rational>,
    pub u: Rational,
    pub m1: Rational,
    pub m2: Rational,
}

pub fn random_phi_draw(rng: &mut impl Rng) -> PhiDraw {
    let mut r = || Rational::from_ratio(rng.gen_range(-12..=12), rng.gen_range(1..=7));
    let mut params = ModelParams {
        a: r(),
        b: r(),
        c0: r(),
        c1: r(),
        c2: Rational::zero(),
        c3: Rational::zero(),
        c4: r(),
        d: r(),
    };
    let charges = CentralCharges::new(r(), r(), r());
    let (u, m1, m2) = (r(), r(), r());
    params.c2 = back_solve_c2(&charges, &m1);
    params.c3 = back_solve_c3(&charges, &m2);
    PhiDraw {
        params,
        charges,
        u,
        m1,
        m2,
    }
}

fn back_solve_c2<T: Scalar>(ch: &CentralCharges<T>, m1: &T) -> T {
    let d = ch.q1.clone() - ch.q2.clone();
    m1.clone() * m1.clone() - d.clone() * d
}

fn back_solve_c3<T: Scalar>(ch: &CentralCharges<T>, m2: &T) -> T {
    let s = ch.q1.clone() + ch.q2.clone();
    m2.clone() * m2.clone() - s.clone() * s
}

/// Exact comparison of both forms of `Φ` on one draw.
pub fn compare_phi_forms(draw: &PhiDraw) -> Result<Option<usize>> {
    let general = phi_general(&draw.params, &draw.charges, &draw.u);
    let factorized = phi_factorized(&draw.params, &draw.charges, &draw.u, &draw.m1, &draw.m2)?;
    Ok(general.poly.first_difference(&factorized.poly))
}

/// Polynomial identity test of the two forms of `Φ` on seeded random draws.
pub fn verify_phi_equivalence(trials: usize, seed: u64) -> PhiEquivalenceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = (0..trials)
        .map(|index| {
            let draw = random_phi_draw(&mut rng);
            // back-solved c2, c3 always satisfy the m-check
            let first_diff = compare_phi_forms(&draw).expect("consistent draw");
            PhiTrial {
                index,
                equal: first_diff.is_none(),
                first_diff,
            }
        })
        .collect();
    PhiEquivalenceReport { seed, trials }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionSet {
    Set1,
    Set2,
}

impl SolutionSet {
    pub fn id(self) -> u8 {
        match self {
            Self::Set1 => 1,
            Self::Set2 => 2,
        }
    }
}

impl std::fmt::Display for SolutionSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "set{}", self.id())
    }
}

/// Solution of the structure-function constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicSolution<T = f64> {
    pub set: SolutionSet,
    pub eps1: i8,
    pub eps2: i8,
    pub p_level: u32,
    pub u: T,
    pub energy: T,
    /// `√(c4 − 2bE + dq2²)`
    pub t: T,
    pub s1: T,
    pub eta1: T,
    pub m1: T,
    pub m2: T,
    pub q1: T,
    pub q2: T,
}

impl<T: Scalar> AlgebraicSolution<T> {
    pub fn charges(&self) -> CentralCharges<T> {
        CentralCharges::new(self.energy.clone(), self.q1.clone(), self.q2.clone())
    }
}

fn check_eps(eps1: i8, eps2: i8) -> Result<()> {
    if [eps1, eps2].iter().all(|e| *e == 1 || *e == -1) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "sign choices must be ±1, got ({eps1}, {eps2})"
        )))
    }
}

/// Energy and `u` satisfying the constraints `Φ(0) = Φ(p+1) = 0`.
pub fn solve_quantization(
    p: &ModelParams,
    sector: &Sector,
    p_level: u32,
    eps1: i8,
    eps2: i8,
    set: SolutionSet,
) -> Result<AlgebraicSolution> {
    check_eps(eps1, eps2)?;
    if set == SolutionSet::Set2 && p.a == 0.0 {
        return Err(Error::InvalidArgument("set 2 requires a != 0".into()));
    }
    let (m1, m2) = (sector.m1, sector.m2);
    let shift = f64::from(eps1) * m1 + f64::from(eps2) * m2;
    let eta1 = 2.0 * f64::from(p_level) + 2.0 + shift;
    let (energy, t) = spectrum::solve_for_level_number(p, sector.q2, 0.5 * eta1)?;
    let q2sq = sector.q2 * sector.q2;
    let (u, s1) = match set {
        SolutionSet::Set1 => (0.5 * (1.0 + shift), t),
        SolutionSet::Set2 => {
            let k = p.c0 + 2.0 * p.c1 * q2sq;
            let inner = eta1
                * eta1
                * (p.b * p.b * eta1 * eta1 - 2.0 * p.a * p.b * k
                    + 4.0 * p.a * p.a * (p.c4 + p.d * q2sq));
            let s1sq = p.c4 - 2.0 * p.b * energy
                + p.d * q2sq
                + p.b / (2.0 * p.a * p.a)
                    * (p.b * eta1 * eta1 - p.a * p.c0 - 2.0 * p.a * p.c1 * q2sq
                        + inner.max(0.0).sqrt());
            let u = 0.5 - (2.0 * p.a * energy - p.c1 * q2sq - 0.5 * p.c0) / (2.0 * t);
            (u, s1sq.max(0.0).sqrt())
        }
    };
    Ok(AlgebraicSolution {
        set,
        eps1,
        eps2,
        p_level,
        u,
        energy,
        t,
        s1,
        eta1,
        m1,
        m2,
        q1: sector.q1,
        q2: sector.q2,
    })
}

/// Exact Set-1 data around a prescribed rational `t`: `c2`, `c3` are
/// back-solved from `m1`, `m2`, `E = (S − t²)/(2b)` and `c0` is chosen so the
/// quantization relation holds with `η1 t`.
#[allow(clippy::too_many_arguments)]
pub fn set1_with_t<T: Scalar>(
    base: &ModelParams<T>,
    q1: T,
    q2: T,
    m1: T,
    m2: T,
    p_level: u32,
    eps1: i8,
    eps2: i8,
    t: T,
) -> Result<(ModelParams<T>, AlgebraicSolution<T>)> {
    check_eps(eps1, eps2)?;
    if base.b.is_zero() {
        return Err(Error::InvalidArgument(
            "rational Set-1 fixtures need b != 0".into(),
        ));
    }
    let int = |n: i64| T::from_int(n);
    let ch0 = CentralCharges::new(T::zero(), q1.clone(), q2.clone());
    let mut params = base.clone();
    params.c2 = back_solve_c2(&ch0, &m1);
    params.c3 = back_solve_c3(&ch0, &m2);
    let q2sq = q2.clone() * q2.clone();
    let s = params.c4.clone() + params.d.clone() * q2sq.clone();
    let energy = (s - t.clone() * t.clone()) / (int(2) * params.b.clone());
    let shift = int(eps1 as i64) * m1.clone() + int(eps2 as i64) * m2.clone();
    let eta1 = int(2 * p_level as i64 + 2) + shift.clone();
    params.c0 = int(2)
        * (int(2) * params.a.clone() * energy.clone()
            - params.c1.clone() * q2sq
            - eta1.clone() * t.clone());
    let u = T::from_ratio(1, 2) * (T::one() + shift);
    let sol = AlgebraicSolution {
        set: SolutionSet::Set1,
        eps1,
        eps2,
        p_level,
        u,
        energy,
        s1: t.clone(),
        t,
        eta1,
        m1,
        m2,
        q1,
        q2,
    };
    Ok((params, sol))
}

/// Set-1 display `3145728·x(x+ε1m1)(x+ε2m2)(x+ε1m1+ε2m2)(1+p−x)(1+p+x+ε1m1+ε2m2)·s1²`.
pub fn set1_display<T: Scalar>(sol: &AlgebraicSolution<T>) -> StructureFunction<T> {
    let int = |n: i64| T::from_int(n);
    let e1m1 = int(sol.eps1 as i64) * sol.m1.clone();
    let e2m2 = int(sol.eps2 as i64) * sol.m2.clone();
    let p1 = int(sol.p_level as i64 + 1);
    let x = Poly::x();
    let factors = vec![
        x.clone(),
        &x + &cst(e1m1.clone()),
        &x + &cst(e2m2.clone()),
        &x + &cst(e1m1.clone() + e2m2.clone()),
        &cst(p1.clone()) - &x,
        &x + &cst(p1 + e1m1 + e2m2),
    ];
    let s1sq = sol.s1.clone() * sol.s1.clone();
    StructureFunction::from_factors(int(3_145_728) * s1sq, factors, Provenance::Set1)
}

/// Set-2 display as printed, with `s1` from [`solve_quantization`].
pub fn set2_display(p: &ModelParams, sol: &AlgebraicSolution) -> Result<StructureFunction> {
    if p.a == 0.0 {
        return Err(Error::InvalidArgument("set 2 requires a != 0".into()));
    }
    let e1m1 = f64::from(sol.eps1) * sol.m1;
    let e2m2 = f64::from(sol.eps2) * sol.m2;
    let p1 = f64::from(sol.p_level) + 1.0;
    let q2sq = sol.q2 * sol.q2;
    let x = Poly::x();
    let tail = -2.0 * p.a * (p.c4 + p.d * q2sq)
        + p.b * (p.c0 + 2.0 * p.c1 * q2sq + 2.0 * sol.eta1 * sol.s1);
    let factors = vec![
        &x - &cst(p1),
        &cst(p1 + e1m1) - &x,
        &cst(p1 + e2m2) - &x,
        &cst(p1 + e1m1 + e2m2) - &x,
        &cst(2.0 * p1 + e1m1 + e2m2) - &x,
    ];
    Ok(StructureFunction::from_factors(
        1_572_864.0 * p1 / p.a * tail,
        factors,
        Provenance::Set2,
    ))
}

/// Off-diagonal element of `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OffDiagonal {
    /// `√(ρ(n)Φ(n+1))` with `ρ(n) = 1/(3·2²⁰ y(1+y)(1+2y)²)`.
    #[default]
    Corrected,
    /// `ρ(n)√Φ(n+1)` with `ρ(n) = 1/(3·2²⁰ y(1+y)(1+2y²))`.
    Printed,
}

/// `(p+1)`-dimensional matrix realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Unirrep {
    pub dim: usize,
    pub u: f64,
    /// `Φ(x)` for `x = 0..=p+1`.
    pub phi: Vec<f64>,
    pub aleph: DMat<f64>,
    pub creation: DMat<f64>,
    pub annihilation: DMat<f64>,
    pub a: DMat<f64>,
    pub b: DMat<f64>,
    pub c: DMat<f64>,
}

fn pole(what: &str, y: f64) -> Error {
    Error::Pole(format!("{what} is singular at n + u = {y}"))
}

/// `Φ` at the integers `0..=p+1` and the first violation of each
/// constraint: `Φ(0) = Φ(p+1) = 0` and `Φ(x) > 0` in between.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintStatus {
    pub phi: Vec<f64>,
    pub boundary_violation: Option<(usize, f64)>,
    pub positivity_violation: Option<(usize, f64)>,
}

impl ConstraintStatus {
    pub fn satisfied(&self) -> bool {
        self.boundary_violation.is_none() && self.positivity_violation.is_none()
    }
}

/// Boundary values count as zero below `1e-10·Σ|c_k|(p+1)^k`.
pub fn constraint_status(p: &ModelParams, sol: &AlgebraicSolution) -> Result<ConstraintStatus> {
    let sf = phi_factorized(p, &sol.charges(), &sol.u, &sol.m1, &sol.m2)?;
    let dim = sol.p_level as usize + 1;
    let phi: Vec<f64> = (0..=dim).map(|x| sf.eval(&(x as f64))).collect();
    let scale = sf
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.abs() * (dim as f64).powi(k as i32))
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    let boundary_violation = [0, dim]
        .into_iter()
        .map(|x| (x, phi[x]))
        .find(|(_, v)| !(v.abs() <= 1e-10 * scale));
    let positivity_violation = (1..dim).map(|x| (x, phi[x])).find(|(_, v)| !(*v > 0.0));
    Ok(ConstraintStatus {
        phi,
        boundary_violation,
        positivity_violation,
    })
}

/// Builds `ℵ, b, b†, A, B, C = AB − BA` from the factorized `Φ` at
/// `(sol.u, sol.E)`.
pub fn build_unirrep(
    p: &ModelParams,
    sol: &AlgebraicSolution,
    off_diagonal: OffDiagonal,
) -> Result<Unirrep> {
    let ch = sol.charges();
    let status = constraint_status(p, sol)?;
    if let Some((x, v)) = status.boundary_violation {
        return Err(Error::Inconsistent(format!(
            "Phi({x}) = {v:e} does not vanish"
        )));
    }
    if let Some((x, v)) = status.positivity_violation {
        return Err(Error::UnitarityViolation(format!(
            "Phi({x}) = {v:e} is not positive"
        )));
    }
    let (dim, phi) = (status.phi.len() - 1, status.phi);

    let nu = -eval_monomials(EPS1, p, &ch);
    let mut aleph = DMat::zeros(dim);
    let mut creation = DMat::zeros(dim);
    let mut a = DMat::zeros(dim);
    let mut b = DMat::zeros(dim);
    let c23 = 0.25 * (p.c2 + p.c3);
    for n in 0..dim {
        let y = n as f64 + sol.u;
        aleph.set(n, n, n as f64);
        a.set(n, n, y * y - 0.25 - c23);
        let den = 4.0 * y * y - 1.0;
        if den == 0.0 {
            return Err(pole("diagonal of B", y));
        }
        b.set(n, n, nu / den);
        if n + 1 < dim {
            let phi_next = phi[n + 1];
            creation.set(n + 1, n, phi_next.sqrt());
            let base = 3.0 * 1_048_576.0 * y * (1.0 + y);
            let off = match off_diagonal {
                OffDiagonal::Corrected => {
                    let rho_den = base * (1.0 + 2.0 * y).powi(2);
                    if rho_den == 0.0 {
                        return Err(pole("rho", y));
                    }
                    let v = phi_next / rho_den;
                    if v < 0.0 {
                        return Err(Error::UnitarityViolation(format!(
                            "rho({n}) Phi({}) = {v:e} is negative",
                            n + 1
                        )));
                    }
                    v.sqrt()
                }
                OffDiagonal::Printed => {
                    let rho_den = base * (1.0 + 2.0 * y * y);
                    if rho_den == 0.0 {
                        return Err(pole("rho", y));
                    }
                    phi_next.sqrt() / rho_den
                }
            };
            b.set(n + 1, n, off);
            b.set(n, n + 1, off);
        }
    }
    let c = a.commutator(&b);
    Ok(Unirrep {
        dim,
        u: sol.u,
        phi,
        annihilation: creation.transpose(),
        aleph,
        creation,
        a,
        b,
        c,
    })
}

/// Relative Frobenius residuals of the two commutation relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Q3Report {
    pub residual_ac: f64,
    pub residual_bc: f64,
}

pub const Q3_TOL: f64 = 1e-9;

impl Q3Report {
    pub fn passed(&self) -> bool {
        self.residual_ac <= Q3_TOL && self.residual_bc <= Q3_TOL
    }
}

pub fn verify_q3_relations(u: &Unirrep, p: &ModelParams, ch: &CentralCharges) -> Q3Report {
    let (rhs1, rhs2) = q3_rhs(p, ch, &u.a, &u.b).expect("A and B share the unirrep dimension");
    let rel = |lhs: DMat<f64>, rhs: &DMat<f64>| lhs.sub(rhs).frobenius() / rhs.frobenius().max(1.0);
    Q3Report {
        residual_ac: rel(u.a.commutator(&u.c), &rhs1),
        residual_bc: rel(u.b.commutator(&u.c), &rhs2),
    }
}

/// Unirrep with `u` replaced by `u + du`, keeping everything else.
pub fn perturbed_unirrep(p: &ModelParams, sol: &AlgebraicSolution, du: f64) -> Result<Unirrep> {
    let ch = sol.charges();
    let sf = phi_factorized(p, &ch, &(sol.u + du), &sol.m1, &sol.m2)?;
    let dim = sol.p_level as usize + 1;
    let mut shifted = sol.clone();
    shifted.u += du;
    let nu = -eval_monomials(EPS1, p, &ch);
    let c23 = 0.25 * (p.c2 + p.c3);
    let mut a = DMat::zeros(dim);
    let mut b = DMat::zeros(dim);
    for n in 0..dim {
        let y = n as f64 + shifted.u;
        a.set(n, n, y * y - 0.25 - c23);
        b.set(n, n, nu / (4.0 * y * y - 1.0));
        if n + 1 < dim {
            let rho_den = 3.0 * 1_048_576.0 * y * (1.0 + y) * (1.0 + 2.0 * y).powi(2);
            let off = (sf.eval(&(n as f64 + 1.0)) / rho_den).abs().sqrt();
            b.set(n + 1, n, off);
            b.set(n, n + 1, off);
        }
    }
    let c = a.commutator(&b);
    let phi = (0..=dim).map(|x| sf.eval(&(x as f64))).collect();
    Ok(Unirrep {
        dim,
        u: shifted.u,
        phi,
        aleph: DMat::zeros(dim),
        creation: DMat::zeros(dim),
        annihilation: DMat::zeros(dim),
        a,
        b,
        c,
    })
}

/// Algebraic versus closed-form energies for one `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumComparison {
    pub p_level: u32,
    pub algebraic: f64,
    /// Closed-form energies of the splits `n1 + n2 = p`, `n1 = 0..=p`.
    pub analytic: Vec<f64>,
    pub max_diff: f64,
}

impl SpectrumComparison {
    pub fn passed(&self) -> bool {
        self.max_diff <= 1e-10 * self.algebraic.abs().max(1.0)
    }
}

pub fn compare_spectra(
    p: &ModelParams,
    sector: &Sector,
    p_level: u32,
) -> Result<SpectrumComparison> {
    let sol = solve_quantization(p, sector, p_level, 1, 1, SolutionSet::Set1)?;
    let analytic = (0..=p_level)
        .map(|n1| {
            let spec = LevelSpec::Parabolic {
                n1,
                n2: p_level - n1,
            };
            spectrum::solve_energy(p, sector, &spec).map(|l| l.energy)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_diff = analytic
        .iter()
        .map(|e| (e - sol.energy).abs())
        .fold(0.0, f64::max);
    Ok(SpectrumComparison {
        p_level,
        algebraic: sol.energy,
        analytic,
        max_diff,
    })
}

/// A random parameter set, sector and `p` with a Set-1 bound state.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleDraw {
    pub params: ModelParams,
    pub nu1: f64,
    pub nu2: f64,
    pub p_level: u32,
}

/// Draws until the closed form and the Set-1 solution both admit a bound
/// state.
pub fn random_admissible(rng: &mut impl Rng, max_p: u32) -> AdmissibleDraw {
    loop {
        let params = ModelParams::new(
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.2..2.0),
            rng.gen_range(-20.0..-2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
        );
        let nu1 = f64::from(rng.gen_range(0u32..3));
        let nu2 = 0.5 * f64::from(rng.gen_range(0u32..4));
        let p_level = rng.gen_range(0..=max_p);
        let Ok(sector) = Sector::new(&params, nu1, nu2) else {
            continue;
        };
        if compare_spectra(&params, &sector, p_level).is_ok() {
            return AdmissibleDraw {
                params,
                nu1,
                nu2,
                p_level,
            };
        }
    }
}
