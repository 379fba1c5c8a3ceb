//! Reference integrals with closed forms, used to validate the quadrature kernels.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::quadrature::{adaptive_complex, Quadrature1D};
use crate::error::{Error, Result};

/// Closed form of `∫ exp(i(-A x² + B x)) dx` over the real line.
pub fn fresnel_closed_form(a: f64, b: f64) -> Complex64 {
    (PI / a).sqrt() * Complex64::from_polar(1.0, -PI / 4.0 + b * b / (4.0 * a))
}

/// `∫ exp(i(-A x² + B x)) dx` by adaptive quadrature on a finite core plus
/// integration-by-parts expansions of both tails.
pub fn fresnel_oracle(a: f64, b: f64) -> Result<Complex64> {
    if !(a > 0.0) {
        return Err(Error::InvalidInput(format!("A must be positive, got {a}")));
    }
    let phase = |x: f64| -a * x * x + b * x;
    let slope = |x: f64| -2.0 * a * x + b;
    let cutoff = 40.0;
    let l = (cutoff + b.abs()) / (2.0 * a);
    let f = |x: f64| Complex64::from_polar(1.0, phase(x));
    let scale = (PI / a).sqrt();
    let core = adaptive_complex(&f, -l, l, 1e-11 * scale, 60)?;

    let i = Complex64::i();
    let tail_series = |x: f64| -> Complex64 {
        let u = slope(x);
        let mut c = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..30 {
            let term = c * u.powi(-2 * k as i32) / (i * u);
            let signed = if k % 2 == 0 { term } else { -term };
            sum += signed;
            if term.norm() < 1e-18 * scale {
                break;
            }
            c = c * (2.0 * k as f64 + 1.0) * (2.0 * a) / i;
        }
        sum
    };
    let upper = -Complex64::from_polar(1.0, phase(l)) * tail_series(l);
    let lower = Complex64::from_polar(1.0, phase(-l)) * tail_series(-l);
    Ok(core.value + upper + lower)
}

/// Smooth test factors on `[0, 1]` for the covariance-smoothing oracle.
fn factor(axis: usize, x: f64) -> (f64, f64) {
    match axis {
        0 => (1.0 + x, x.cos()),
        1 => (x.exp(), 1.0 - 0.5 * x),
        _ => (1.0 / (1.0 + x), 1.0 + x * x),
    }
}

/// Covariance smoothing on the unit cube with `Σ(u) = exp(-|u|²/2)`.
///
/// Returns the pair `(∬ Σ((x - y)/ε) f(x) g(y) dx dy, ε³ ‖Σ‖₁ ∫ f g)` for fixed
/// separable test functions `f`, `g`. Both sides factor over the three axes, so the
/// six-dimensional integral is a product of three resolved two-dimensional ones.
pub fn covariance_smoothing(eps: f64) -> (f64, f64) {
    let panels = (8.0 / eps).ceil() as usize;
    let q = Quadrature1D::composite_gauss_legendre(12, panels, 0.0, 1.0);
    let mut lhs = 1.0;
    let mut rhs = eps.powi(3) * (2.0 * PI).powf(1.5);
    for axis in 0..3 {
        let fx: Vec<f64> = q.nodes.iter().map(|&x| factor(axis, x).0).collect();
        let gy: Vec<f64> = q.nodes.iter().map(|&y| factor(axis, y).1).collect();
        let mut j = 0.0;
        for (ix, &x) in q.nodes.iter().enumerate() {
            let mut inner = 0.0;
            for (iy, &y) in q.nodes.iter().enumerate() {
                let d = (x - y) / eps;
                inner += q.weights[iy] * gy[iy] * (-0.5 * d * d).exp();
            }
            j += q.weights[ix] * fx[ix] * inner;
        }
        lhs *= j;
        rhs *= q.integrate(|x| {
            let (f, g) = factor(axis, x);
            f * g
        });
    }
    (lhs, rhs)
}

/// Least-squares slope of `log|error|` against `log ε` for the smoothing oracle.
pub fn smoothing_convergence_order(eps: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .map(|&e| {
            let (l, r) = covariance_smoothing(e);
            (e.ln(), (l - r).abs().ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresnel_matches_closed_form() {
        for a in [0.5, 1.0, 2.0] {
            for b in [0.0, 1.0, -1.0] {
                let got = fresnel_oracle(a, b).unwrap();
                let want = fresnel_closed_form(a, b);
                assert!((got - want).norm() < 1e-6 * want.norm(), "A={a} B={b}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn fresnel_unit_case() {
        let want = PI.sqrt() * Complex64::from_polar(1.0, -PI / 4.0);
        assert!((fresnel_closed_form(1.0, 0.0) - want).norm() < 1e-15);
        let half = (PI / 2.0).sqrt() * Complex64::from_polar(1.0, -PI / 4.0);
        assert!((fresnel_oracle(2.0, 0.0).unwrap() - half).norm() < 1e-6);
    }

    #[test]
    fn smoothing_error_is_fourth_order() {
        let p = smoothing_convergence_order(&[0.2, 0.1, 0.05]);
        assert!(p >= 3.5, "observed order {p}");
    }
}
