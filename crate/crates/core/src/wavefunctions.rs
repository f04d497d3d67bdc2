//! Analytic eigenfunctions of the separated equations, their normalization,
//! node counts and ODE residuals.
//!
//! Residuals are reported as `max_x |Σ T_i(x)| / Σ |T_i(x)|` over a fixed
//! grid, where `T_i` are the individual terms of the ODE evaluated with exact
//! polynomial derivatives. The measure is invariant under rescaling of the
//! solution, so normalization constants do not enter.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{ModelParams, Sector};
use crate::quadrature::{integrate_clustered, integrate_half_line, with_order_doubling};
use crate::specfun::{hyp1f1, jacobi, jacobi_second_derivative, laguerre_eval, ln_gamma};
use crate::spectrum::{separation_constant_k1, separation_constant_k2, solve_energy, LevelSpec};

/// Points in every residual scan.
pub const RESIDUAL_POINTS: usize = 2000;
/// Relative agreement demanded between quadrature orders `n` and `2n`.
pub const NORMALIZATION_TOL: f64 = 1e-10;

fn jacobi_degree(l: u32, nu1: f64) -> Result<usize> {
    let j = l as f64 - nu1;
    if j < -1e-12 || (j - j.round()).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "l - nu1 = {j} must be a nonnegative integer"
        )));
    }
    Ok(j.round() as usize)
}

/// Unnormalized `(1+cosθ)^{m1/2}(1−cosθ)^{m2/2} P^{(m2,m1)}_{l−ν1}(cosθ)`.
pub fn angular_theta(theta: f64, l: u32, sector: &Sector) -> Result<f64> {
    let j = jacobi_degree(l, sector.nu1)?;
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("theta = {theta} outside [0, π]")));
    }
    angular_in_x(theta.cos(), j, sector)
}

fn angular_in_x(x: f64, j: usize, s: &Sector) -> Result<f64> {
    let p = jacobi(j, s.m2, s.m1, x)?.value;
    Ok((1.0 + x).powf(0.5 * s.m1) * (1.0 - x).powf(0.5 * s.m2) * p)
}

/// Unnormalized `(εr)^L e^{−εr/2} 1F1(−n+l+1, 2L+2; εr)` with `L = l + (δ1+δ2)/2`.
pub fn radial_r(r: f64, n: u32, l: u32, sector: &Sector, epsilon: f64) -> Result<f64> {
    if n < l + 1 {
        return Err(Error::InvalidArgument(format!(
            "need n >= l+1, got n={n}, l={l}"
        )));
    }
    if !(r > 0.0) || !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "need r > 0 and epsilon > 0, got {r}, {epsilon}"
        )));
    }
    let big_l = l as f64 + sector.half_delta_sum();
    let z = epsilon * r;
    let m = hyp1f1(-(n as f64) + l as f64 + 1.0, 2.0 * big_l + 2.0, z)?;
    Ok((big_l * z.ln() - 0.5 * z).exp() * m)
}

/// Parabolic factor
/// `√(Γ(n+m+1)/n!)/Γ(m+1) · z^{m/2} e^{−z/2} 1F1(−n, m+1; z)`, `z = εt`,
/// `m = ν1 + δ_i`; its square integrates to `1/ε`.
pub fn parabolic_f(t: f64, n: u32, m: f64, epsilon: f64) -> Result<f64> {
    if !(t > 0.0) || !(epsilon > 0.0) {
        return Err(Error::Domain(format!(
            "need t > 0 and epsilon > 0, got {t}, {epsilon}"
        )));
    }
    if !(m >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "exponent m = {m} must be nonnegative"
        )));
    }
    let nf = n as f64;
    let z = epsilon * t;
    let ln_c = 0.5 * (ln_gamma(nf + m + 1.0)? - ln_gamma(nf + 1.0)?) - ln_gamma(m + 1.0)?;
    let hyp = hyp1f1(-nf, m + 1.0, z)?;
    Ok((ln_c + 0.5 * m * z.ln() - 0.5 * z).exp() * hyp)
}

/// A spherical eigenstate `Θ_{lν1}(θ) R_{nl}(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalState {
    pub params: ModelParams,
    pub sector: Sector,
    pub n: u32,
    pub l: u32,
    pub energy: f64,
    /// Radial decay constant, `2√(c4 − 2bE + dν2²)`.
    pub epsilon: f64,
    pub k1: f64,
    /// `F_{lν1}`; 1 until [`SphericalState::normalize`] runs.
    pub angular_norm: f64,
    /// `F_{nl}`; 1 until [`SphericalState::normalize`] runs.
    pub radial_norm: f64,
}

impl SphericalState {
    /// The bound state `(n, l)`; energy and `k1` from the closed-form solutions.
    pub fn new(params: &ModelParams, sector: &Sector, n: u32, l: u32) -> Result<Self> {
        jacobi_degree(l, sector.nu1)?;
        let level = solve_energy(params, sector, &LevelSpec::Spherical { n, l })?;
        Ok(Self {
            params: params.clone(),
            sector: *sector,
            n,
            l,
            energy: level.energy,
            epsilon: level.epsilon,
            k1: separation_constant_k1(sector, l)?,
            angular_norm: 1.0,
            radial_norm: 1.0,
        })
    }

    /// The same eigenfunction with the ODE coefficients taken at `energy`;
    /// a sensitivity control for the residuals.
    pub fn with_ode_energy(&self, energy: f64) -> Self {
        Self {
            energy,
            ..self.clone()
        }
    }

    pub fn theta(&self, theta: f64) -> Result<f64> {
        Ok(self.angular_norm * angular_theta(theta, self.l, &self.sector)?)
    }

    pub fn radial(&self, r: f64) -> Result<f64> {
        Ok(self.radial_norm * radial_r(r, self.n, self.l, &self.sector, self.epsilon)?)
    }

    fn big_l(&self) -> f64 {
        self.l as f64 + self.sector.half_delta_sum()
    }

    /// Extent of the radial scans and of the half-line quadrature scale.
    fn radial_scale(&self) -> f64 {
        (self.n as f64 + self.big_l() + 1.0) / self.epsilon
    }

    /// Normalizes `∫Θ² sinθ dθ = 1` and `∫R² 2r(a+br) dr = 1`.
    pub fn normalize(&self, order: usize) -> Result<Self> {
        let j = jacobi_degree(self.l, self.sector.nu1)?;
        let sector = self.sector;
        let ang = with_order_doubling(order, NORMALIZATION_TOL, |n| {
            integrate_clustered(n, -1.0, 1.0, |x| {
                angular_in_x(x, j, &sector).unwrap_or(f64::NAN).powi(2)
            })
        })?;
        let (a, b) = (self.params.a, self.params.b);
        let rad = with_order_doubling(order, NORMALIZATION_TOL, |n| {
            integrate_half_line(n, self.radial_scale(), |r| {
                if r <= 0.0 {
                    return 0.0;
                }
                let v = radial_r(r, self.n, self.l, &sector, self.epsilon).unwrap_or(f64::NAN);
                v * v * 2.0 * r * (a + b * r)
            })
        })?;
        if !(ang > 0.0 && rad > 0.0) {
            return Err(Error::QuadratureNonConvergence(
                "nonpositive norm integral".into(),
            ));
        }
        Ok(Self {
            angular_norm: ang.sqrt().recip(),
            radial_norm: rad.sqrt().recip(),
            ..self.clone()
        })
    }

    /// Residual of
    /// `Θ'' + cotθ Θ' + [k1 − m1²/(2(1+cosθ)) − m2²/(2(1−cosθ))]Θ = 0`,
    /// written in `x = cosθ`.
    pub fn ode_residual_angular(&self) -> Result<f64> {
        let j = jacobi_degree(self.l, self.sector.nu1)?;
        let (m1, m2) = (self.sector.m1, self.sector.m2);
        let (ea, eb) = (0.5 * m1, 0.5 * m2);
        let mut worst: f64 = 0.0;
        for i in 0..RESIDUAL_POINTS {
            let th = PI * (i as f64 + 0.5) / RESIDUAL_POINTS as f64;
            let x = th.cos();
            let (xp, xm) = (1.0 + x, 1.0 - x);
            let pe = jacobi(j, m2, m1, x)?;
            let p2 = jacobi_second_derivative(j, m2, m1, x)?;
            // Θ = F·P with F = (1+x)^{m1/2}(1−x)^{m2/2}; everything below is divided by F
            let g = ea / xp - eb / xm;
            let dg = -ea / (xp * xp) - eb / (xm * xm);
            let th0 = pe.value;
            let th1 = g * pe.value + pe.derivative;
            let th2 = (g * g + dg) * pe.value + 2.0 * g * pe.derivative + p2;
            let terms = [
                (1.0 - x * x) * th2,
                -2.0 * x * th1,
                -(m1 * m1 / (2.0 * xp) + m2 * m2 / (2.0 * xm)) * th0,
                self.k1 * th0,
            ];
            worst = worst.max(relative_residual(&terms));
        }
        Ok(worst)
    }

    /// Residual of `r²R'' + 2rR' + (αr² + βr − k1)R = 0`.
    pub fn ode_residual_radial(&self) -> Result<f64> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Inconsistent("epsilon must be positive".into()));
        }
        let (alpha, beta) = self.params.alpha_beta(self.energy, self.sector.nu2);
        let big_l = self.big_l();
        let an = -(self.n as f64) + self.l as f64 + 1.0;
        let bn = 2.0 * big_l + 2.0;
        let eps = self.epsilon;
        let extent = 4.0 * self.radial_scale() + 20.0 / eps;
        let mut worst: f64 = 0.0;
        for i in 0..RESIDUAL_POINTS {
            let r = extent * (i as f64 + 0.5) / RESIDUAL_POINTS as f64;
            let z = eps * r;
            let m0 = hyp1f1(an, bn, z)?;
            let m1 = an / bn * hyp1f1(an + 1.0, bn + 1.0, z)?;
            let m2 = an * (an + 1.0) / (bn * (bn + 1.0)) * hyp1f1(an + 2.0, bn + 2.0, z)?;
            // R = G·M with G = z^L e^{−z/2}; divided by G
            let g = big_l / z - 0.5;
            let dg = -big_l / (z * z);
            let r0 = m0;
            let r1 = eps * (g * m0 + m1);
            let r2 = eps * eps * ((g * g + dg) * m0 + 2.0 * g * m1 + m2);
            let terms = [
                r * r * r2,
                2.0 * r * r1,
                alpha * r * r * r0,
                beta * r * r0,
                -self.k1 * r0,
            ];
            worst = worst.max(relative_residual(&terms));
        }
        Ok(worst)
    }

    /// Interior zeros of `R` on `(0, 4·scale + 20/ε)`.
    pub fn radial_nodes(&self) -> Result<usize> {
        let extent = 4.0 * self.radial_scale() + 20.0 / self.epsilon;
        count_sign_changes(extent, 10_000, |r| {
            radial_r(r, self.n, self.l, &self.sector, self.epsilon)
        })
    }
}

/// A parabolic eigenstate `f_{n1}(ξ) f_{n2}(η)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicState {
    pub params: ModelParams,
    pub sector: Sector,
    pub n1: u32,
    pub n2: u32,
    pub energy: f64,
    /// Decay constant `√(c4 − 2bE + dν2²)`.
    pub epsilon: f64,
    /// `k2` of the ξ equation; the η equation carries `−k2`.
    pub k2: f64,
    pub xi_norm: f64,
    pub eta_norm: f64,
}

impl ParabolicState {
    pub fn new(params: &ModelParams, sector: &Sector, n1: u32, n2: u32) -> Result<Self> {
        let level = solve_energy(params, sector, &LevelSpec::Parabolic { n1, n2 })?;
        let (k2, _) = separation_constant_k2(params, sector, &level, n1);
        Ok(Self {
            params: params.clone(),
            sector: *sector,
            n1,
            n2,
            energy: level.energy,
            epsilon: level.epsilon,
            k2,
            xi_norm: 1.0,
            eta_norm: 1.0,
        })
    }

    /// The same eigenfunctions with the ODE coefficients taken at `energy`;
    /// a sensitivity control for the residuals.
    pub fn with_ode_energy(&self, energy: f64) -> Self {
        Self {
            energy,
            ..self.clone()
        }
    }

    pub fn f_xi(&self, xi: f64) -> Result<f64> {
        Ok(self.xi_norm * parabolic_f(xi, self.n1, self.sector.m1, self.epsilon)?)
    }

    pub fn f_eta(&self, eta: f64) -> Result<f64> {
        Ok(self.eta_norm * parabolic_f(eta, self.n2, self.sector.m2, self.epsilon)?)
    }

    fn axis(&self, xi_axis: bool) -> (u32, f64, f64) {
        if xi_axis {
            (self.n1, self.sector.m1, self.k2)
        } else {
            (self.n2, self.sector.m2, -self.k2)
        }
    }

    fn scale(&self, n: u32, m: f64) -> f64 {
        (n as f64 + m + 1.0) / self.epsilon
    }

    /// Normalizes each factor to `∫ f² dt = 1`.
    pub fn normalize(&self, order: usize) -> Result<Self> {
        let mut norms = [0.0; 2];
        for (slot, xi_axis) in norms.iter_mut().zip([true, false]) {
            let (n, m, _) = self.axis(xi_axis);
            let v = with_order_doubling(order, NORMALIZATION_TOL, |q| {
                integrate_half_line(q, self.scale(n, m), |t| {
                    if t <= 0.0 {
                        0.0
                    } else {
                        parabolic_f(t, n, m, self.epsilon)
                            .unwrap_or(f64::NAN)
                            .powi(2)
                    }
                })
            })?;
            if !(v > 0.0) {
                return Err(Error::QuadratureNonConvergence(
                    "nonpositive norm integral".into(),
                ));
            }
            *slot = v.sqrt().recip();
        }
        Ok(Self {
            xi_norm: norms[0],
            eta_norm: norms[1],
            ..self.clone()
        })
    }

    /// Largest residual of the ξ and η equations
    /// `tΘ'' + Θ' + (α/4)tΘ + (β/4)Θ − m²/(4t)Θ ∓ k2Θ = 0`.
    pub fn ode_residual_parabolic(&self) -> Result<f64> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Inconsistent("epsilon must be positive".into()));
        }
        let (alpha, beta) = self.params.alpha_beta(self.energy, self.sector.nu2);
        let eps = self.epsilon;
        let mut worst: f64 = 0.0;
        for xi_axis in [true, false] {
            let (n, m, k) = self.axis(xi_axis);
            let extent = 4.0 * self.scale(n, m) + 20.0 / eps;
            let lam = m;
            for i in 0..RESIDUAL_POINTS {
                let t = extent * (i as f64 + 0.5) / RESIDUAL_POINTS as f64;
                let z = eps * t;
                let le = laguerre_eval(n as usize, lam, z)?;
                let l2 = if n >= 2 {
                    laguerre_eval(n as usize - 2, lam + 2.0, z)?.value
                } else {
                    0.0
                };
                // Θ = G·L with G = z^{m/2} e^{−z/2}; divided by G
                let g = 0.5 * m / z - 0.5;
                let dg = -0.5 * m / (z * z);
                let f0 = le.value;
                let f1 = eps * (g * le.value + le.derivative);
                let f2 = eps * eps * ((g * g + dg) * le.value + 2.0 * g * le.derivative + l2);
                let terms = [
                    t * f2,
                    f1,
                    0.25 * alpha * t * f0,
                    0.25 * beta * f0,
                    -m * m / (4.0 * t) * f0,
                    -k * f0,
                ];
                worst = worst.max(relative_residual(&terms));
            }
        }
        Ok(worst)
    }

    /// Interior zeros of the ξ and η factors.
    pub fn parabolic_nodes(&self) -> Result<(usize, usize)> {
        let count = |n: u32, m: f64| {
            let extent = 4.0 * self.scale(n, m) + 20.0 / self.epsilon;
            count_sign_changes(extent, 10_000, |t| parabolic_f(t, n, m, self.epsilon))
        };
        Ok((
            count(self.n1, self.sector.m1)?,
            count(self.n2, self.sector.m2)?,
        ))
    }
}

fn relative_residual(terms: &[f64]) -> f64 {
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    if scale == 0.0 {
        0.0
    } else {
        terms.iter().sum::<f64>().abs() / scale
    }
}

/// Sign changes of `f` on a uniform cell-centred grid over `(0, extent)`.
pub fn count_sign_changes(
    extent: f64,
    points: usize,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<usize> {
    let mut count = 0;
    let mut last = 0.0f64;
    for i in 0..points {
        let x = extent * (i as f64 + 0.5) / points as f64;
        let v = f(x)?;
        if v != 0.0 {
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Preset;

    fn micz() -> ModelParams {
        Preset::Micz.params().with("c0", -8.0).unwrap()
    }

    #[test]
    fn angular_examples() {
        let s = Sector::new(&ModelParams::zero(), 0.0, 0.0).unwrap();
        assert!((angular_theta(PI / 2.0, 0, &s).unwrap() - 1.0).abs() < 1e-15);
        let s = Sector::new(&ModelParams::zero(), 0.0, 0.5).unwrap();
        assert!((angular_theta(PI / 2.0, 0, &s).unwrap() - 1.0).abs() < 1e-15);
        let s = Sector::new(&ModelParams::zero(), 1.5, 0.0).unwrap();
        assert!(angular_theta(1.0, 2, &s).is_err());
    }

    #[test]
    fn radial_examples() {
        let s = Sector::new(&micz(), 0.0, 0.5).unwrap();
        let v = radial_r(2.0, 1, 0, &s, 3.0).unwrap();
        let expect = 6f64.powf(0.5) * (-3.0f64).exp();
        assert!((v - expect).abs() < 1e-15);
        assert!(radial_r(1e-12, 1, 0, &s, 3.0).unwrap() < 1e-5);
        assert!(radial_r(1.0, 1, 1, &s, 3.0).is_err());
    }

    #[test]
    fn parabolic_example() {
        let v = parabolic_f(0.7, 0, 0.0, 2.0).unwrap();
        assert!((v - (-0.7f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn micz_ground_state_residuals() {
        let p = micz();
        let s = Sector::new(&p, 0.0, 0.5).unwrap();
        let st = SphericalState::new(&p, &s, 1, 0).unwrap();
        assert_eq!(st.energy, -1.0);
        assert!(st.ode_residual_radial().unwrap() <= 1e-9);
        assert!(st.ode_residual_angular().unwrap() <= 1e-11);
        assert_eq!(st.radial_nodes().unwrap(), 0);
        let wrong = SphericalState {
            k1: st.k1 + 0.1,
            ..st.clone()
        };
        assert!(wrong.ode_residual_angular().unwrap() > 1e-2);
        assert!(st.with_ode_energy(-1.01).ode_residual_radial().unwrap() >= 1e-3);
    }

    #[test]
    fn normalization_constants() {
        let p = ModelParams::new(0.0, 1.0, -8.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let s = Sector::new(&p, 0.0, 0.0).unwrap();
        let st = SphericalState::new(&p, &s, 1, 0)
            .unwrap()
            .normalize(100)
            .unwrap();
        assert!((st.angular_norm - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(st.radial_norm > 0.0 && st.radial_norm.is_finite());

        let p = micz();
        let s = Sector::new(&p, 0.0, 0.5).unwrap();
        let ps = ParabolicState::new(&p, &s, 0, 0)
            .unwrap()
            .normalize(100)
            .unwrap();
        assert!((ps.xi_norm - ps.epsilon.sqrt()).abs() < 1e-10);
        assert!((ps.eta_norm - ps.epsilon.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn parabolic_residuals_and_sensitivity() {
        let p = micz();
        let s = Sector::new(&p, 1.0, 0.5).unwrap();
        let ps = ParabolicState::new(&p, &s, 2, 1).unwrap();
        assert!(ps.ode_residual_parabolic().unwrap() <= 1e-8);
        assert_eq!(ps.parabolic_nodes().unwrap(), (2, 1));
        let s = Sector::new(&p, 0.0, 0.5).unwrap();
        let ps = ParabolicState::new(&p, &s, 1, 0).unwrap();
        assert!((ps.energy + 0.28).abs() < 1e-15);
        assert!(ps.ode_residual_parabolic().unwrap() <= 1e-8);
        let off = ps.with_ode_energy(ps.energy * 1.01);
        assert!(off.ode_residual_parabolic().unwrap() >= 1e-3);
    }
}
