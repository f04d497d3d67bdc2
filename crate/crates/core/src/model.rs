//! Model couplings, metric functions, presets and quantum-sector data.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;

use crate::algebra::{Rational, Scalar};
use crate::error::{Error, Result};

/// Tolerance on `c1 q2²/2 − a E` below which the algebra is reported as contracted.
pub const CONTRACTION_TOL: f64 = 1e-14;

/// The eight couplings of metric and potential.
///
/// `f(r) = a/r + b`, `g(r) = r(a + b r)/(1 + c1 r + d r²)`; `c0, c2, c3, c4`
/// are the Coulomb, two ring-shaped and constant potential terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T = f64> {
    pub a: T,
    pub b: T,
    pub c0: T,
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub c4: T,
    pub d: T,
}

pub const PARAM_NAMES: [&str; 8] = ["a", "b", "c0", "c1", "c2", "c3", "c4", "d"];

impl<T: Scalar> ModelParams<T> {
    pub fn zero() -> Self {
        Self {
            a: T::zero(),
            b: T::zero(),
            c0: T::zero(),
            c1: T::zero(),
            c2: T::zero(),
            c3: T::zero(),
            c4: T::zero(),
            d: T::zero(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> ModelParams<U> {
        ModelParams {
            a: f(&self.a),
            b: f(&self.b),
            c0: f(&self.c0),
            c1: f(&self.c1),
            c2: f(&self.c2),
            c3: f(&self.c3),
            c4: f(&self.c4),
            d: f(&self.d),
        }
    }

    fn slot(&mut self, name: &str) -> Option<&mut T> {
        Some(match name {
            "a" => &mut self.a,
            "b" => &mut self.b,
            "c0" => &mut self.c0,
            "c1" => &mut self.c1,
            "c2" => &mut self.c2,
            "c3" => &mut self.c3,
            "c4" => &mut self.c4,
            "d" => &mut self.d,
            _ => return None,
        })
    }

    /// Overwrite one coupling by name.
    pub fn set(&mut self, name: &str, value: T) -> Result<()> {
        *self
            .slot(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown coupling `{name}`")))? = value;
        Ok(())
    }
}

impl ModelParams<f64> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(a: f64, b: f64, c0: f64, c1: f64, c2: f64, c3: f64, c4: f64, d: f64) -> Self {
        Self {
            a,
            b,
            c0,
            c1,
            c2,
            c3,
            c4,
            d,
        }
    }

    pub fn values(&self) -> [f64; 8] {
        [
            self.a, self.b, self.c0, self.c1, self.c2, self.c3, self.c4, self.d,
        ]
    }

    /// Builder-style override of one coupling.
    pub fn with(mut self, name: &str, value: f64) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    /// Exact rational image of the binary floating-point values.
    pub fn to_rational(&self) -> ModelParams<Rational> {
        self.map(|&v| BigRational::from_float(v).expect("finite coupling"))
    }

    pub fn validate(&self) -> ValidationReport {
        validate_params(self)
    }

    /// `f(r) = a/r + b`.
    pub fn metric_f(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(self.a / r + self.b)
    }

    /// `g(r) = r(a + b r)/(1 + c1 r + d r²)`.
    pub fn metric_g(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        let den = 1.0 + self.c1 * r + self.d * r * r;
        if den == 0.0 {
            return Err(Error::Domain(format!(
                "g(r) denominator 1 + c1 r + d r² vanishes at r = {r}"
            )));
        }
        Ok(r * (self.a + self.b * r) / den)
    }

    /// Energy-dependent constants of the separated equations:
    /// `α = 2bE − dν2² − c4`, `β = 2aE − c1ν2² − c0/2`.
    pub fn alpha_beta(&self, energy: f64, nu2: f64) -> (f64, f64) {
        let nu2sq = nu2 * nu2;
        (
            2.0 * self.b * energy - self.d * nu2sq - self.c4,
            2.0 * self.a * energy - self.c1 * nu2sq - self.c0 / 2.0,
        )
    }

    /// Sign of `c1 q2²/2 − a E` decides between o(4), o(3,1) and the contraction.
    pub fn classify_dynamical_algebra(&self, energy: f64, q2: f64) -> DynamicalAlgebra {
        let s = self.c1 * q2 * q2 / 2.0 - self.a * energy;
        if s.abs() <= CONTRACTION_TOL {
            DynamicalAlgebra::Contracted
        } else if s > 0.0 {
            DynamicalAlgebra::O4
        } else {
            DynamicalAlgebra::O31
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be positive, got {r}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicalAlgebra {
    O4,
    O31,
    Contracted,
}

impl fmt::Display for DynamicalAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::O4 => "o(4)",
            Self::O31 => "o(3,1)",
            Self::Contracted => "contracted",
        })
    }
}

/// Outcome of [`validate_params`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: &'static str,
    /// A radius where the offending function is nonpositive, when one exists.
    pub witness: Option<f64>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Physical-domain check: `a ≥ 0`, `b > 0`, `c2, c3 ≥ 0` and
/// `1 + c1 r + d r² ≥ 0` on `r > 0`.
///
/// The last condition is non-strict so that the MICZ preset, whose
/// denominator is `(1 − r)²`, is admissible; only `1/g` enters the
/// Hamiltonian.
pub fn validate_params(p: &ModelParams) -> ValidationReport {
    let mut violations = Vec::new();
    if p.values().iter().any(|v| !v.is_finite()) {
        violations.push(Violation {
            condition: "all couplings finite",
            witness: None,
        });
        return ValidationReport { violations };
    }
    if p.b <= 0.0 {
        // f(r) → b as r → ∞
        let witness = if p.a > 0.0 && p.b < 0.0 {
            2.0 * p.a / -p.b
        } else {
            1.0
        };
        violations.push(Violation {
            condition: "b > 0",
            witness: Some(witness),
        });
    }
    if p.a < 0.0 {
        // f(r) = a/r + b < 0 for small r
        let witness = if p.b > 0.0 { -p.a / (2.0 * p.b) } else { 1.0 };
        violations.push(Violation {
            condition: "a >= 0",
            witness: Some(witness),
        });
    }
    if p.c2 < 0.0 {
        violations.push(Violation {
            condition: "c2 >= 0",
            witness: None,
        });
    }
    if p.c3 < 0.0 {
        violations.push(Violation {
            condition: "c3 >= 0",
            witness: None,
        });
    }
    if let Some(r) = quadratic_negative_witness(p.c1, p.d) {
        violations.push(Violation {
            condition: "1 + c1 r + d r^2 >= 0 for r > 0",
            witness: Some(r),
        });
    }
    ValidationReport { violations }
}

/// A positive `r` with `1 + c1 r + d r² < 0`, if any exists.
fn quadratic_negative_witness(c1: f64, d: f64) -> Option<f64> {
    let q = |r: f64| 1.0 + c1 * r + d * r * r;
    if d > 0.0 {
        let r = -c1 / (2.0 * d);
        (r > 0.0 && q(r) < 0.0).then_some(r)
    } else if d == 0.0 {
        (c1 < 0.0).then(|| 2.0 / -c1)
    } else {
        // opens downward: beyond the positive root
        let disc = c1 * c1 - 4.0 * d;
        let root = (-c1 - disc.sqrt()) / (2.0 * d);
        Some(root.max(0.0) + 1.0)
    }
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    KaluzaKlein,
    Micz,
    HartmannTaubNut,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::KaluzaKlein, Preset::Micz, Preset::HartmannTaubNut];

    pub fn name(self) -> &'static str {
        match self {
            Self::KaluzaKlein => "kaluza-klein",
            Self::Micz => "micz",
            Self::HartmannTaubNut => "hartmann-taubnut",
        }
    }

    pub fn params(self) -> ModelParams {
        match self {
            Self::KaluzaKlein => ModelParams::new(1.0, 1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0),
            Self::Micz => ModelParams::new(0.0, 1.0, 0.0, -2.0, 0.0, 0.0, 0.0, 1.0),
            // Kaluza-Klein metric with an attractive Coulomb term and both ring terms on.
            Self::HartmannTaubNut => ModelParams::new(1.0, 1.0, -8.0, 2.0, 1.0, 1.0, 0.0, 1.0),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

pub fn preset(name: &str) -> Result<ModelParams> {
    Ok(name.parse::<Preset>()?.params())
}

/// Monopole vector potential `(−y, x, 0)/(r(r + z))`.
pub fn gauge_potential(x: f64, y: f64, z: f64) -> Result<[f64; 3]> {
    let r = (x * x + y * y + z * z).sqrt();
    if r == 0.0 {
        return Err(Error::Domain(
            "gauge potential undefined at the origin".into(),
        ));
    }
    let s = r + z;
    if s <= 0.0 {
        return Err(Error::DiracString);
    }
    Ok([-y / (r * s), x / (r * s), 0.0])
}

pub fn spherical_to_cartesian(r: f64, theta: f64, phi: f64) -> Result<[f64; 3]> {
    check_radius(r)?;
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::Domain(format!(
            "theta must lie in [0, π], got {theta}"
        )));
    }
    if !(0.0..=2.0 * std::f64::consts::PI).contains(&phi) {
        return Err(Error::Domain(format!("phi must lie in [0, 2π], got {phi}")));
    }
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Ok([r * st * cp, r * st * sp, r * ct])
}

/// Returns `(x, y, z, r)`.
pub fn parabolic_to_cartesian(xi: f64, eta: f64, phi: f64) -> Result<[f64; 4]> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::Domain(format!("xi must be positive, got {xi}")));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    if !(0.0..=2.0 * std::f64::consts::PI).contains(&phi) {
        return Err(Error::Domain(format!("phi must lie in [0, 2π], got {phi}")));
    }
    let rho = (xi * eta).sqrt();
    let (sp, cp) = phi.sin_cos();
    Ok([rho * cp, rho * sp, 0.5 * (xi - eta), 0.5 * (xi + eta)])
}

/// Separated quantum numbers and the quantities derived from them.
///
/// `ν1` is the azimuthal quantum number, `ν2` the `ψ`-momentum (monopole
/// charge). `q1 = ν1 − ν2` and `q2 = ν2` are the eigenvalues of `L3` and `Q`;
/// `m1² = c2 + (q1 − q2)²`, `m2² = c3 + (q1 + q2)²`, `δi = mi − ν1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub nu1: f64,
    pub nu2: f64,
    pub q1: f64,
    pub q2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub m1: f64,
    pub m2: f64,
}

impl Sector {
    pub fn new(p: &ModelParams, nu1: f64, nu2: f64) -> Result<Self> {
        let s1 = p.c2 + (nu1 - 2.0 * nu2).powi(2);
        let s2 = p.c3 + nu1 * nu1;
        if s1 < 0.0 || s2 < 0.0 || !s1.is_finite() || !s2.is_finite() {
            return Err(Error::Domain(format!(
                "sector (nu1={nu1}, nu2={nu2}) has negative centrifugal strength"
            )));
        }
        let (m1, m2) = (s1.sqrt(), s2.sqrt());
        Ok(Self {
            nu1,
            nu2,
            q1: nu1 - nu2,
            q2: nu2,
            delta1: m1 - nu1,
            delta2: m2 - nu1,
            m1,
            m2,
        })
    }

    /// `(δ1 + δ2)/2`
    pub fn half_delta_sum(&self) -> f64 {
        0.5 * (self.delta1 + self.delta2)
    }
}

pub fn derived_sector(p: &ModelParams, nu1: f64, nu2: f64) -> Result<Sector> {
    Sector::new(p, nu1, nu2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kk() -> ModelParams {
        Preset::KaluzaKlein.params()
    }

    #[test]
    fn validation_examples() {
        assert!(kk().validate().passed());
        assert!(Preset::Micz.params().validate().passed());
        let bad_b = ModelParams::new(1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let rep = bad_b.validate();
        assert!(!rep.passed());
        assert_eq!(rep.violations[0].condition, "b > 0");

        let bad_q = ModelParams::new(0.0, 1.0, 0.0, -3.0, 0.0, 0.0, 0.0, 1.0);
        let rep = bad_q.validate();
        assert_eq!(rep.violations.len(), 1);
        let r = rep.violations[0].witness.unwrap();
        assert!(1.0 - 3.0 * r + r * r < 0.0);
    }

    #[test]
    fn witnesses_for_other_quadratic_shapes() {
        for (c1, d) in [(-1.0, 0.0), (0.0, -0.5), (3.0, -1.0)] {
            let r = quadratic_negative_witness(c1, d).unwrap();
            assert!(r > 0.0 && 1.0 + c1 * r + d * r * r < 0.0, "c1={c1} d={d}");
        }
        assert!(quadratic_negative_witness(2.0, 1.0).is_none());
        assert!(quadratic_negative_witness(-2.0, 1.0).is_none());
    }

    #[test]
    fn metric_examples() {
        assert_eq!(kk().metric_f(1.0).unwrap(), 2.0);
        let flat = ModelParams::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(flat.metric_f(7.3).unwrap(), 1.0);
        let p = ModelParams::new(2.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(p.metric_f(4.0).unwrap(), 3.5);
        assert!(p.metric_f(0.0).is_err());

        assert!((kk().metric_g(1.0).unwrap() - 0.5).abs() < 1e-15);
        let m = ModelParams::new(0.0, 1.0, 0.0, -2.0, 0.0, 0.0, 0.0, 1.0);
        assert_eq!(m.metric_g(2.0).unwrap(), 4.0);
        assert!(m.metric_g(1.0).is_err());
        assert!(kk().metric_g(1e-12).unwrap() < 1e-11);
    }

    #[test]
    fn gauge_examples() {
        assert_eq!(gauge_potential(0.0, 0.0, 1.0).unwrap(), [0.0, 0.0, 0.0]);
        assert_eq!(gauge_potential(1.0, 0.0, 0.0).unwrap(), [0.0, 1.0, 0.0]);
        assert_eq!(gauge_potential(0.0, 0.0, -1.0), Err(Error::DiracString));
    }

    #[test]
    fn presets() {
        assert_eq!(
            preset("kaluza-klein").unwrap(),
            ModelParams::new(1.0, 1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0)
        );
        assert_eq!(
            preset("micz").unwrap(),
            ModelParams::new(0.0, 1.0, 0.0, -2.0, 0.0, 0.0, 0.0, 1.0)
        );
        let h = preset("hartmann-taubnut").unwrap();
        assert!(h.c0 != 0.0 && h.c2 != 0.0 && h.c3 != 0.0);
        assert!(h.validate().passed());
        assert_eq!(preset("foo"), Err(Error::UnknownPreset("foo".into())));
    }

    #[test]
    fn sector_examples() {
        let p = ModelParams::zero().with("c2", 3.0).unwrap();
        let s = Sector::new(&p, 1.0, 0.5).unwrap();
        assert!((s.delta1 - (3f64.sqrt() - 1.0)).abs() < 1e-15);

        let s = Sector::new(&ModelParams::zero(), 0.0, 0.5).unwrap();
        assert_eq!((s.delta1, s.delta2, s.m1, s.m2), (1.0, 0.0, 1.0, 0.0));
        assert_eq!((s.q1, s.q2), (-0.5, 0.5));

        let s = Sector::new(&ModelParams::zero(), 2.0, 0.0).unwrap();
        assert_eq!((s.delta1, s.delta2, s.m1, s.m2), (0.0, 0.0, 2.0, 2.0));
    }

    #[test]
    fn alpha_beta_examples() {
        let (al, be) = ModelParams::zero().alpha_beta(1.0, 0.3);
        assert_eq!((al, be), (0.0, 0.0));
        let micz = Preset::Micz.params().with("c0", -8.0).unwrap();
        let (al, be) = micz.alpha_beta(-1.0, 0.5);
        assert_eq!((al, be), (-2.25, 4.5));
        let p = ModelParams::zero().with("b", 1.0).unwrap();
        assert_eq!(p.alpha_beta(3.0, 0.7).0, 6.0);
    }

    #[test]
    fn classification_examples() {
        let p = ModelParams::zero().with("a", 1.0).unwrap();
        assert_eq!(
            p.classify_dynamical_algebra(-1.0, 0.0),
            DynamicalAlgebra::O4
        );
        assert_eq!(
            p.classify_dynamical_algebra(1.0, 0.0),
            DynamicalAlgebra::O31
        );
        assert_eq!(
            ModelParams::zero().classify_dynamical_algebra(5.0, 0.0),
            DynamicalAlgebra::Contracted
        );
    }

    #[test]
    fn coordinate_maps() {
        let v = spherical_to_cartesian(2.0, 0.0, 0.0).unwrap();
        assert_eq!(v, [0.0, 0.0, 2.0]);
        let v = parabolic_to_cartesian(1.0, 1.0, 0.0).unwrap();
        assert_eq!(v, [1.0, 0.0, 0.0, 1.0]);
        assert!(parabolic_to_cartesian(4.0, 0.0, 0.0).is_err());
        assert!(spherical_to_cartesian(1.0, 4.0, 0.0).is_err());
    }

    fn valid_params() -> impl Strategy<Value = ModelParams> {
        (
            0.0..3.0f64,
            0.1..3.0f64,
            -10.0..10.0f64,
            0.0..3.0f64,
            0.0..5.0f64,
            0.0..5.0f64,
            -2.0..2.0f64,
            0.0..2.0f64,
        )
            .prop_map(|(a, b, c0, c1, c2, c3, c4, d)| ModelParams::new(a, b, c0, c1, c2, c3, c4, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn f_times_r_is_linear(p in valid_params(), r in 1e-3..1e3f64) {
            let lhs = p.metric_f(r).unwrap() * r;
            let rhs = p.a + p.b * r;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }

        #[test]
        fn valid_params_have_positive_metric(p in valid_params(), r in 1e-3..1e3f64) {
            prop_assert!(p.validate().passed());
            prop_assert!(p.metric_f(r).unwrap() > 0.0);
            prop_assert!(p.metric_g(r).unwrap() > 0.0);
        }

        #[test]
        fn parabolic_round_trip(xi in 1e-3..1e3f64, eta in 1e-3..1e3f64, phi in 0.0..std::f64::consts::TAU) {
            let [x, y, z, r] = parabolic_to_cartesian(xi, eta, phi).unwrap();
            let rr = (x * x + y * y + z * z).sqrt();
            prop_assert!((rr - r).abs() <= 1e-14 * r * 4.0);
            prop_assert!((r - 0.5 * (xi + eta)).abs() <= 1e-14 * r);
        }

        #[test]
        fn sector_identities(p in valid_params(), nu1 in 0u32..6, twice_nu2 in -7i32..8) {
            let (nu1, nu2) = (nu1 as f64, twice_nu2 as f64 / 2.0);
            let s = Sector::new(&p, nu1, nu2).unwrap();
            let lhs1 = s.m1 * s.m1 - (nu1 - 2.0 * nu2).powi(2);
            let lhs2 = s.m2 * s.m2 - nu1 * nu1;
            prop_assert!((lhs1 - p.c2).abs() <= 1e-12 * (s.m1 * s.m1).max(1.0));
            prop_assert!((lhs2 - p.c3).abs() <= 1e-12 * (s.m2 * s.m2).max(1.0));
            let via_q1 = p.c2 + (s.q1 - s.q2).powi(2);
            let via_q2 = p.c3 + (s.q1 + s.q2).powi(2);
            prop_assert!((s.m1 * s.m1 - via_q1).abs() <= 1e-12 * via_q1.max(1.0));
            prop_assert!((s.m2 * s.m2 - via_q2).abs() <= 1e-12 * via_q2.max(1.0));
        }

        #[test]
        fn classification_depends_only_on_sign(a in 0.0..3.0f64, c1 in -3.0..3.0f64,
                                               e in -5.0..5.0f64, q2 in -2.0..2.0f64,
                                               lambda in 0.1..10.0f64) {
            let p = ModelParams::zero().with("a", a).unwrap().with("c1", c1).unwrap();
            let s = c1 * q2 * q2 / 2.0 - a * e;
            let out = p.classify_dynamical_algebra(e, q2);
            let expect = if s.abs() <= CONTRACTION_TOL { DynamicalAlgebra::Contracted }
                         else if s > 0.0 { DynamicalAlgebra::O4 } else { DynamicalAlgebra::O31 };
            prop_assert_eq!(out, expect);
            // joint positive scaling of (E, q2²) preserves the sign
            let scaled = p.classify_dynamical_algebra(lambda * e, lambda.sqrt() * q2);
            if (lambda * s).abs() > CONTRACTION_TOL && s.abs() > CONTRACTION_TOL {
                prop_assert_eq!(scaled, out);
            }
        }
    }
}
