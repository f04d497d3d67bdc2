//! Gauss–Legendre rules, finite-interval and half-line integration.

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n
            let mut x = ((i as f64 + 0.75) / (nf + 0.5) * std::f64::consts::PI).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// `∫_a^b f`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Exponent of the endpoint-clustering maps below; integrands behaving like
/// `x^λ` at an endpoint become `u^{K(λ+1)−1}`.
pub const CLUSTER_POWER: i32 = 4;

/// `∫_a^b f` with nodes clustered at both endpoints via
/// `x = a + (b − a)·u^K/(u^K + (1 − u)^K)`.
pub fn integrate_clustered(n: usize, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let k = CLUSTER_POWER;
    let rule = GaussLegendre::new(n);
    rule.integrate(0.0, 1.0, |u| {
        let (p, q) = (u.powi(k), (1.0 - u).powi(k));
        let s = p + q;
        let phi = p / s;
        let dphi = k as f64 * (u * (1.0 - u)).powi(k - 1) / (s * s);
        (b - a) * dphi * f(a + (b - a) * phi)
    })
}

/// `∫_0^∞ f` by the map `x = scale·u^K/(1 − u)²`.
pub fn integrate_half_line(n: usize, scale: f64, f: impl Fn(f64) -> f64) -> f64 {
    let k = CLUSTER_POWER;
    let rule = GaussLegendre::new(n);
    rule.integrate(0.0, 1.0, |u| {
        let v = 1.0 - u;
        let x = scale * u.powi(k) / (v * v);
        let dx = scale * u.powi(k - 1) * (k as f64 * v + 2.0 * u) / (v * v * v);
        let y = f(x);
        if dx == 0.0 || !dx.is_finite() || y == 0.0 {
            0.0
        } else {
            y * dx
        }
    })
}

/// Runs `rule(n)` at `n` and `2n` and accepts when the results agree to `tol`
/// (relative to `max(1, |I|)`); returns the higher-order value.
pub fn with_order_doubling(n: usize, tol: f64, rule: impl Fn(usize) -> f64) -> Result<f64> {
    let coarse = rule(n);
    let fine = rule(2 * n);
    let diff = (fine - coarse).abs();
    if diff <= tol * fine.abs().max(1.0) && fine.is_finite() {
        Ok(fine)
    } else {
        Err(Error::QuadratureNonConvergence(format!(
            "orders {n} and {} differ by {diff:e} (value {fine:e})",
            2 * n
        )))
    }
}
