//! Log-gamma, Jacobi and Laguerre polynomials, and the confluent
//! hypergeometric function 1F1.

use crate::error::{Error, Result};

/// Cap on the number of terms of a non-terminating 1F1 series.
pub const HYP1F1_MAX_TERMS: usize = 10_000;

/// Value and first derivative evaluated together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEval {
    pub value: f64,
    pub derivative: f64,
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x keeps the Lanczos sum in its accurate range
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + sum.ln())
}

fn check_jacobi_params(alpha: f64, beta: f64) -> Result<()> {
    if alpha > -1.0 && beta > -1.0 && alpha.is_finite() && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "Jacobi parameters must exceed -1, got alpha={alpha}, beta={beta}"
        )))
    }
}

fn jacobi_value(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab = alpha + beta;
    let mut prev = 1.0;
    let mut cur = (alpha + 1.0) + 0.5 * (ab + 2.0) * (x - 1.0);
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let next = (a2 * cur - a3 * prev) / a1;
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_n^{(α,β)}(x)` and its derivative.
pub fn jacobi(n: usize, alpha: f64, beta: f64, x: f64) -> Result<PolyEval> {
    check_jacobi_params(alpha, beta)?;
    let value = jacobi_value(n, alpha, beta, x);
    let derivative = if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + alpha + beta + 1.0) * jacobi_value(n - 1, alpha + 1.0, beta + 1.0, x)
    };
    Ok(PolyEval { value, derivative })
}

/// Second derivative of `P_n^{(α,β)}`.
pub fn jacobi_second_derivative(n: usize, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    check_jacobi_params(alpha, beta)?;
    if n < 2 {
        return Ok(0.0);
    }
    let nf = n as f64;
    Ok(0.25
        * (nf + alpha + beta + 1.0)
        * (nf + alpha + beta + 2.0)
        * jacobi_value(n - 2, alpha + 2.0, beta + 2.0, x))
}

/// Degree of the terminating series when `a` is a nonpositive integer.
fn terminating_degree(a: f64) -> Option<usize> {
    (a <= 0.0 && a == a.round() && a > -1e9).then(|| (-a) as usize)
}

/// Confluent hypergeometric function `1F1(a; b; x)`.
///
/// Nonpositive integer `a = −n` gives the degree-`n` polynomial; otherwise
/// the power series is summed until a term drops below `1e-15` of the sum.
pub fn hyp1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && x.is_finite()) {
        return Err(Error::InvalidArgument(
            "1F1 arguments must be finite".into(),
        ));
    }
    let limit = terminating_degree(a);
    let b_pole = |k: usize| b + k as f64 == 0.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    match limit {
        Some(n) => {
            for k in 0..n {
                if b_pole(k) {
                    return Err(Error::Pole(format!("1F1 with b = {b} hits b + {k} = 0")));
                }
                term *= (a + k as f64) / (b + k as f64) * x / (k as f64 + 1.0);
                sum += term;
            }
            Ok(sum)
        }
        None => {
            if b <= 0.0 && b == b.round() {
                return Err(Error::Pole(format!(
                    "non-terminating 1F1 with nonpositive integer b = {b}"
                )));
            }
            for k in 0..HYP1F1_MAX_TERMS {
                let kf = k as f64;
                term *= (a + kf) / (b + kf) * x / (kf + 1.0);
                sum += term;
                // terms only shrink monotonically once k exceeds |x| and |a|, |b|
                let settled = kf > x.abs() + a.abs() + b.abs();
                if settled && term.abs() <= 1e-15 * sum.abs() {
                    return Ok(sum);
                }
                if !sum.is_finite() {
                    break;
                }
            }
            Err(Error::Divergence(format!(
                "1F1({a}; {b}; {x}) did not settle within {HYP1F1_MAX_TERMS} terms"
            )))
        }
    }
}

fn check_laguerre_params(lambda: f64) -> Result<()> {
    if lambda > -1.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "Laguerre parameter must exceed -1, got {lambda}"
        )))
    }
}

fn laguerre_value(n: usize, lambda: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + lambda - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + lambda - x) * cur - (k + lambda) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalized Laguerre polynomial `L_n^{(λ)}(x)`.
pub fn laguerre(n: usize, lambda: f64, x: f64) -> Result<f64> {
    check_laguerre_params(lambda)?;
    Ok(laguerre_value(n, lambda, x))
}

/// `L_n^{(λ)}(x)` together with its derivative `−L_{n−1}^{(λ+1)}(x)`.
pub fn laguerre_eval(n: usize, lambda: f64, x: f64) -> Result<PolyEval> {
    check_laguerre_params(lambda)?;
    let derivative = if n == 0 {
        0.0
    } else {
        -laguerre_value(n - 1, lambda + 1.0, x)
    };
    Ok(PolyEval {
        value: laguerre_value(n, lambda, x),
        derivative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn ln_gamma_examples() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(close(ln_gamma(5.0).unwrap(), 24f64.ln(), 1e-14));
        assert!(close(
            ln_gamma(0.5).unwrap(),
            0.572_364_942_924_700_1,
            1e-14
        ));
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0f64;
        for n in 1..60 {
            let lg = ln_gamma(n as f64 + 1.0).unwrap();
            fact *= n as f64;
            assert!(
                (lg - fact.ln()).abs() <= 1e-13 * fact.ln().max(1.0),
                "n={n}"
            );
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(0, 0.3, 2.0, 0.7).unwrap().value, 1.0);
        assert!(close(jacobi(1, 0.0, 0.0, 0.3).unwrap().value, 0.3, 1e-15));
        assert!(close(jacobi(2, 1.0, 1.0, 1.0).unwrap().value, 3.0, 1e-14));
        assert!(jacobi(2, -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn hyp1f1_examples() {
        assert_eq!(hyp1f1(0.0, 3.5, 2.0).unwrap(), 1.0);
        assert!(close(hyp1f1(-1.0, 2.0, 3.0).unwrap(), -0.5, 1e-15));
        // L_2^{(0)}(1) = 1 − 2 + 1/2
        assert!(close(
            hyp1f1(-2.0, 1.0, 1.0).unwrap(),
            laguerre(2, 0.0, 1.0).unwrap(),
            1e-15
        ));
        assert!(close(hyp1f1(1.0, 1.0, 1.5).unwrap(), 1.5f64.exp(), 1e-14));
        assert!(hyp1f1(0.5, -2.0, 1.0).is_err());
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre(0, 0.7, 3.0).unwrap(), 1.0);
        assert_eq!(laguerre(1, 0.0, 2.0).unwrap(), -1.0);
        assert!(laguerre(1, -1.0, 2.0).is_err());
    }

    /// Explicit series `Σ (−1)^k C(n+λ, n−k) x^k / k!`.
    fn laguerre_series(n: usize, lambda: f64, x: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..=n {
            let lc = ln_gamma(n as f64 + lambda + 1.0).unwrap()
                - ln_gamma((n - k) as f64 + 1.0).unwrap()
                - ln_gamma(k as f64 + lambda + 1.0).unwrap()
                - ln_gamma(k as f64 + 1.0).unwrap();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * lc.exp() * x.powi(k as i32);
        }
        sum
    }

    #[test]
    fn laguerre_recurrence_matches_series_and_1f1() {
        let rec = laguerre(3, 0.5, 1.7).unwrap();
        assert!(close(rec, laguerre_series(3, 0.5, 1.7), 1e-12));
        let poch = (ln_gamma(4.5).unwrap() - ln_gamma(1.5).unwrap() - ln_gamma(4.0).unwrap()).exp();
        assert!(close(rec, poch * hyp1f1(-3.0, 1.5, 1.7).unwrap(), 1e-12));
    }

    /// `P_n^{(α,β)}(x) = Σ C(n+α, n−s) C(n+β, s) ((x−1)/2)^s ((x+1)/2)^{n−s}`.
    fn jacobi_series(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
        let binom = |top: f64, k: usize| {
            (1..=k).fold(1.0, |acc, i| acc * (top - k as f64 + i as f64) / i as f64)
        };
        (0..=n)
            .map(|s| {
                binom(n as f64 + alpha, n - s) * binom(n as f64 + beta, s)
                    * (0.5 * (x - 1.0)).powi(s as i32)
                    * (0.5 * (x + 1.0)).powi((n - s) as i32)
            })
            .sum()
    }

    proptest! {
        #[test]
        fn jacobi_matches_series(n in 0usize..12, alpha in -0.9..6.0f64, beta in -0.9..6.0f64,
                                 x in -1.0..1.0f64) {
            let rec = jacobi(n, alpha, beta, x).unwrap().value;
            let ser = jacobi_series(n, alpha, beta, x);
            prop_assert!(close(rec, ser, 1e-10), "rec={rec} ser={ser}");
        }

        #[test]
        fn jacobi_three_term_recurrence(n in 2usize..30, alpha in -0.9..10.0f64,
                                        beta in -0.9..10.0f64, x in -1.0..1.0f64) {
            let p = |k| jacobi(k, alpha, beta, x).unwrap().value;
            let (nf, ab) = (n as f64, alpha + beta);
            let c = 2.0 * nf + ab;
            let lhs = 2.0 * nf * (nf + ab) * (c - 2.0) * p(n);
            let t1 = (c - 1.0) * (c * (c - 2.0) * x + alpha * alpha - beta * beta) * p(n - 1);
            let t2 = 2.0 * (nf + alpha - 1.0) * (nf + beta - 1.0) * c * p(n - 2);
            let scale = lhs.abs().max(t1.abs()).max(t2.abs()).max(1e-300);
            prop_assert!((lhs - t1 + t2).abs() <= 1e-12 * scale);
        }

        #[test]
        fn jacobi_ode_residual(n in 0usize..30, alpha in -0.9..10.0f64, beta in -0.9..10.0f64,
                               x in -0.99..0.99f64) {
            let e = jacobi(n, alpha, beta, x).unwrap();
            let d2 = jacobi_second_derivative(n, alpha, beta, x).unwrap();
            let nf = n as f64;
            let terms = [
                (1.0 - x * x) * d2,
                (beta - alpha - (alpha + beta + 2.0) * x) * e.derivative,
                nf * (nf + alpha + beta + 1.0) * e.value,
            ];
            let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(1.0);
            prop_assert!(terms.iter().sum::<f64>().abs() <= 1e-9 * scale);
        }

        #[test]
        fn jacobi_derivative_matches_finite_difference(n in 1usize..15, alpha in -0.5..4.0f64,
                                                      beta in -0.5..4.0f64, x in -0.9..0.9f64) {
            let h = 1e-5;
            let fd = (jacobi(n, alpha, beta, x + h).unwrap().value
                - jacobi(n, alpha, beta, x - h).unwrap().value) / (2.0 * h);
            let d = jacobi(n, alpha, beta, x).unwrap().derivative;
            prop_assert!((fd - d).abs() <= 1e-5 * d.abs().max(1.0));
        }

        #[test]
        fn laguerre_derivative_matches_finite_difference(n in 1usize..12, lambda in -0.5..4.0f64,
                                                        x in 0.1..20.0f64) {
            let h = 1e-5;
            let fd = (laguerre(n, lambda, x + h).unwrap() - laguerre(n, lambda, x - h).unwrap())
                / (2.0 * h);
            let d = laguerre_eval(n, lambda, x).unwrap().derivative;
            prop_assert!((fd - d).abs() <= 1e-5 * d.abs().max(1.0));
        }

        // x ≤ 0 keeps both sides free of alternating-sign cancellation
        #[test]
        fn kummer_transformation(n in 0usize..12, b in 0.5..8.0f64, x in -5.0..0.0f64) {
            let a = -(n as f64);
            let lhs = hyp1f1(a, b, x).unwrap();
            let rhs = x.exp() * hyp1f1(b - a, b, -x).unwrap();
            prop_assert!(close(lhs, rhs, 1e-11), "lhs={lhs} rhs={rhs}");
        }

        #[test]
        fn kummer_transformation_series_case(a in 0.1..4.0f64, b in 0.5..6.0f64, x in -4.0..4.0f64) {
            let lhs = hyp1f1(a, b, x).unwrap();
            let rhs = x.exp() * hyp1f1(b - a, b, -x).unwrap();
            prop_assert!(close(lhs, rhs, 1e-11), "lhs={lhs} rhs={rhs}");
        }
    }
}
