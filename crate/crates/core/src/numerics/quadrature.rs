use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    GaussLegendre,
    CompositeGaussLegendre,
    Trapezoid,
}

/// One-dimensional quadrature rule on a finite interval.
#[derive(Debug, Clone)]
pub struct Quadrature1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: RuleKind,
}

impl Quadrature1D {
    /// Gauss-Legendre rule with `n` nodes on `[a, b]`, exact to degree `2n - 1`.
    pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Self {
        let (x, w) = legendre_reference(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        Self {
            nodes: x.iter().map(|t| mid + half * t).collect(),
            weights: w.iter().map(|v| v * half).collect(),
            kind: RuleKind::GaussLegendre,
        }
    }

    /// `panels` equal panels on `[a, b]`, each carrying an `n`-point Gauss-Legendre rule.
    pub fn composite_gauss_legendre(n: usize, panels: usize, a: f64, b: f64) -> Self {
        let (x, w) = legendre_reference(n);
        let panels = panels.max(1);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(n * panels);
        let mut weights = Vec::with_capacity(n * panels);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            for (t, v) in x.iter().zip(&w) {
                nodes.push(mid + 0.5 * width * t);
                weights.push(0.5 * width * v);
            }
        }
        Self { nodes, weights, kind: RuleKind::CompositeGaussLegendre }
    }

    /// Trapezoid rule on `n >= 2` equispaced nodes.
    pub fn trapezoid(n: usize, a: f64, b: f64) -> Self {
        assert!(n >= 2, "trapezoid rule needs at least two nodes");
        let h = (b - a) / (n - 1) as f64;
        let nodes = (0..n).map(|i| a + i as f64 * h).collect();
        let weights = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
            .collect();
        Self { nodes, weights, kind: RuleKind::Trapezoid }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_complex(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }
}

/// Nodes and weights on [-1, 1], via Newton iteration on the three-term recurrence.
pub fn legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_eval(n, z);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_eval(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

const PANEL_NODES: usize = 10;

/// Adaptive panel bisection for complex integrands.
///
/// Each panel is integrated with a 10-point Gauss-Legendre rule and with the same
/// rule on its two halves; the difference, reduced by the Richardson factor of the
/// rule's order, is the local error estimate. Panels are bisected until the local
/// estimate falls below their share of `tol`.
pub fn adaptive_complex(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> Result<Adaptive> {
    let (x, w) = legendre_reference(PANEL_NODES);
    let panel = |lo: f64, hi: f64| -> Complex64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        x.iter().zip(&w).map(|(t, v)| f(mid + half * t) * (v * half)).sum()
    };
    let total = (b - a).abs();
    let mut stack = vec![(a, b, panel(a, b), 0usize)];
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evaluations = PANEL_NODES;
    let mut worst = 0.0f64;
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(lo, mid);
        let right = panel(mid, hi);
        evaluations += 2 * PANEL_NODES;
        let fine = left + right;
        // Richardson: the fine error is the coarse-fine gap over (2^p - 1);
        // p is capped at 4 to stay conservative before the asymptotic range.
        let local = (fine - coarse).norm() / 15.0;
        let share = tol * (hi - lo).abs() / total;
        if local <= share || (hi - lo).abs() < 1e-14 * total.max(1.0) {
            value += fine;
            err += local;
        } else if depth >= max_depth {
            worst = worst.max(local);
            value += fine;
            err += local;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    if worst > 0.0 && err > tol {
        return Err(Error::NonConvergent { estimate: err });
    }
    Ok(Adaptive { value, error_estimate: err, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
        for n in [1usize, 2, 5, 10, 17, 32] {
            let q = Quadrature1D::gauss_legendre(n, -0.3, 1.7);
            for deg in 0..(2 * n) {
                let exact = (1.7f64.powi(deg as i32 + 1) - (-0.3f64).powi(deg as i32 + 1))
                    / (deg as f64 + 1.0);
                let got = q.integrate(|x| x.powi(deg as i32));
                assert!(
                    (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                    "n={n} deg={deg}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn trapezoid_weights_sum_to_length() {
        let q = Quadrature1D::trapezoid(11, 2.0, 7.0);
        let s: f64 = q.weights.iter().sum();
        assert!((s - 5.0).abs() < 1e-14);
        assert_eq!(q.kind, RuleKind::Trapezoid);
    }

    #[test]
    fn composite_rule_integrates_oscillation() {
        let q = Quadrature1D::composite_gauss_legendre(16, 20, 0.0, 10.0);
        let got = q.integrate_complex(|x| Complex64::new(0.0, 7.0 * x).exp());
        let exact = (Complex64::new(0.0, 70.0).exp() - 1.0) / Complex64::new(0.0, 7.0);
        assert!((got - exact).norm() < 1e-12);
    }

    #[test]
    fn adaptive_handles_chirp() {
        let f = |x: f64| Complex64::new(0.0, 3.0 * x * x).exp();
        let r = adaptive_complex(&f, -4.0, 4.0, 1e-11, 40).unwrap();
        let q = Quadrature1D::composite_gauss_legendre(20, 400, -4.0, 4.0);
        let reference = q.integrate_complex(f);
        assert!((r.value - reference).norm() < 1e-9, "{:?} {:?}", r.value, reference);
    }

    #[test]
    fn oscillatory_error_halves_until_resolved() {
        // Trapezoid error on a smooth oscillatory integrand drops by at least half
        // with every doubling of the node count once the phase is sampled.
        let omega = 12.0;
        let exact = (Complex64::new(0.0, omega).exp() - 1.0) / Complex64::new(0.0, omega);
        let mut last = f64::INFINITY;
        for n in [33usize, 65, 129, 257, 513] {
            let q = Quadrature1D::trapezoid(n, 0.0, 1.0);
            let e = (q.integrate_complex(|t| Complex64::new(0.0, omega * t).exp()) - exact).norm();
            assert!(e <= 0.5 * last, "n={n}: {e} vs {last}");
            last = e;
        }
    }
}
