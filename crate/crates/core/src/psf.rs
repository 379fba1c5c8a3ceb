//! Closed-form point-spread-function theory.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{tilt_cosines, ApertureShape, Vec3};
use crate::noise_medium::{band_limit, Envelope, Spectrum};
use crate::numerics::Quadrature1D;

const PANEL: usize = 16;
/// Phase change allowed per 16-node Gauss-Legendre panel.
const PANEL_PHASE: f64 = 6.0;

fn cis(x: f64) -> Complex64 {
    let (s, c) = x.sin_cos();
    Complex64::new(c, s)
}

/// `∫_{lo}^{hi} exp(−i(b u + c u²)) du` by composite Gauss-Legendre resolving the phase.
fn chirp_integral(b: f64, c: f64, lo: f64, hi: f64, n_min: usize) -> Complex64 {
    let m = lo.abs().max(hi.abs());
    let variation = (hi - lo) * (b.abs() + 2.0 * c.abs() * m);
    let panels = ((n_min + PANEL - 1) / PANEL).max((variation / PANEL_PHASE).ceil() as usize).max(1);
    Quadrature1D::composite_gauss_legendre(PANEL, panels, lo, hi).integrate_complex(|u| cis(-(b * u + c * u * u)))
}

/// Normalized aperture factor
/// `(1/|𝒜₀|) ∬_{𝒜₀} exp(−i(α_f u₁ξ₁ + u₂ξ₂) − i((α_r²u₁² + u₂²)/2)ξ₃ − i((u₁²+u₂²)/2)ξ₄) du`.
///
/// `n_quad` is the minimum number of nodes per axis; more are used when the phase
/// demands it.
pub fn g_func(alpha_r: f64, alpha_f: f64, xi: [f64; 4], shape: &ApertureShape, n_quad: usize) -> Complex64 {
    if xi == [0.0; 4] {
        return Complex64::new(1.0, 0.0);
    }
    let [x1, x2, x3, x4] = xi;
    match shape {
        ApertureShape::Square { half_width: h } => {
            let i1 = chirp_integral(alpha_f * x1, 0.5 * (alpha_r * alpha_r * x3 + x4), -h, *h, n_quad);
            let i2 = chirp_integral(x2, 0.5 * (x3 + x4), -h, *h, n_quad);
            i1 * i2 / (4.0 * h * h)
        }
        ApertureShape::Disk { radius } => {
            let r = *radius;
            let phase_scale = r * (alpha_f * x1.abs() + x2.abs()) + 0.5 * r * r * (x3.abs() + x4.abs());
            let n_theta = n_quad.max((2.0 * phase_scale).ceil() as usize + 32);
            let rho_panels = ((n_quad + PANEL - 1) / PANEL).max((phase_scale / PANEL_PHASE).ceil() as usize).max(1);
            let rho = Quadrature1D::composite_gauss_legendre(PANEL, rho_panels, 0.0, r);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n_theta {
                let (s, c) = (2.0 * PI * k as f64 / n_theta as f64).sin_cos();
                let line = rho.integrate_complex(|p| {
                    let (u1, u2) = (p * c, p * s);
                    let ph = alpha_f * u1 * x1
                        + u2 * x2
                        + 0.5 * (alpha_r * alpha_r * u1 * u1 + u2 * u2) * x3
                        + 0.5 * (u1 * u1 + u2 * u2) * x4;
                    cis(-ph) * p
                });
                acc += line;
            }
            acc * (2.0 * PI / n_theta as f64) / (PI * r * r)
        }
        ApertureShape::Explicit { points } => {
            let sum: Complex64 = points
                .iter()
                .map(|&[u1, u2]| {
                    let ph = alpha_f * u1 * x1
                        + u2 * x2
                        + 0.5 * (alpha_r * alpha_r * u1 * u1 + u2 * u2) * x3
                        + 0.5 * (u1 * u1 + u2 * u2) * x4;
                    cis(-ph)
                })
                .sum();
            sum / points.len() as f64
        }
    }
}

/// Geometry entering the reflector PSF.
#[derive(Debug, Clone, PartialEq)]
pub struct PsfGeometry {
    pub a0: f64,
    pub omega0: f64,
    pub c0: f64,
    pub z_r: Vec3,
    pub shape: ApertureShape,
    pub n_quad: usize,
}

impl PsfGeometry {
    fn range(&self) -> f64 {
        self.z_r.norm()
    }

    fn tilts(&self, cs: f64) -> Result<(f64, f64)> {
        let t = tilt_cosines(self.z_r, cs / self.c0)?;
        Ok((t.alpha_r, t.alpha_f))
    }

    /// Mismatch argument `−a₀²ω((c₀/c_s)² − 1)/(c₀|z_r|)`.
    pub fn xi4(&self, omega: f64, cs: f64) -> f64 {
        -self.a0 * self.a0 * omega * ((self.c0 / cs).powi(2) - 1.0) / (self.c0 * self.range())
    }

    /// Transverse argument `−a₀ω η/(c₀|z_r|)`.
    fn xi_t(&self, omega: f64, eta: f64) -> f64 {
        -self.a0 * omega * eta / (self.c0 * self.range())
    }

    /// Range argument `−a₀²ω η₃/(c₀|z_r|²)` of the narrowband forms.
    fn xi3(&self, omega: f64, eta3: f64) -> f64 {
        -self.a0 * self.a0 * omega * eta3 / (self.c0 * self.range().powi(2))
    }

    /// Travel-time combination `2η₃ + c_s²(η₁²+η₂²)/(c₀²|z_r|)`.
    fn lag(&self, eta: [f64; 3], cs: f64) -> f64 {
        2.0 * eta[2] + cs * cs * (eta[0] * eta[0] + eta[1] * eta[1]) / (self.c0 * self.c0 * self.range())
    }

    fn g(&self, alphas: (f64, f64), xi: [f64; 4]) -> Complex64 {
        g_func(alphas.0, alphas.1, xi, &self.shape, self.n_quad)
    }
}

fn omega_rule(w_max: f64, rate: f64) -> Quadrature1D {
    let panels = ((w_max * rate / PANEL_PHASE).ceil() as usize).max(8);
    Quadrature1D::composite_gauss_legendre(PANEL, panels, 0.0, w_max)
}

/// Broadband PSF `𝒫`, integrating over the band of `spectrum`.
pub fn psf_broadband(geom: &PsfGeometry, spectrum: &Spectrum, eta: [f64; 3], cs: f64) -> Result<f64> {
    let alphas = geom.tilts(cs)?;
    let lag = geom.lag(eta, cs);
    let w_max = band_limit(spectrum);
    let per_omega = geom.a0 / (geom.c0 * geom.range());
    let rate = lag.abs() / geom.c0
        + 2.0 * per_omega * (eta[0].abs() + eta[1].abs())
        + geom.a0 * per_omega * ((geom.c0 / cs).powi(2) - 1.0).abs();
    let q = omega_rule(w_max, rate);
    let v = q.integrate_complex(|w| {
        let xi = [geom.xi_t(w, eta[0]), geom.xi_t(w, eta[1]), 0.0, geom.xi4(w, cs)];
        let g = geom.g(alphas, xi);
        Complex64::new(0.0, -w * spectrum.eval(w)) * cis(-w * lag / geom.c0) * g * g
    });
    Ok(v.re)
}

/// Ratio above which the slowly-varying-envelope forms lose accuracy.
pub const ENVELOPE_BANDWIDTH_RATIO: f64 = 0.2;

/// Warning text when `B ≤ ω₀/5` fails.
pub fn bandwidth_warning(bandwidth: f64, omega0: f64) -> Option<String> {
    (bandwidth > ENVELOPE_BANDWIDTH_RATIO * omega0)
        .then(|| format!("bandwidth {bandwidth} exceeds omega0/5 = {}; envelope form is approximate", omega0 / 5.0))
}

/// Broadband envelope `𝒫_E = 2πω₀ |F₀(−(B_H/c₀)·lag)| |𝒢|²`.
pub fn psf_envelope_broadband(geom: &PsfGeometry, f0: &Envelope, b_h: f64, eta: [f64; 3], cs: f64) -> Result<f64> {
    let alphas = geom.tilts(cs)?;
    let w0 = geom.omega0;
    let xi = [geom.xi_t(w0, eta[0]), geom.xi_t(w0, eta[1]), 0.0, geom.xi4(w0, cs)];
    let f = f0.time(-(b_h / geom.c0) * geom.lag(eta, cs)).abs();
    Ok(2.0 * PI * w0 * f * geom.g(alphas, xi).norm_sqr())
}

/// `B_c = (ω₀/2) a₀²/|z_r|²`.
pub fn critical_bandwidth(geom: &PsfGeometry) -> f64 {
    0.5 * geom.omega0 * geom.a0 * geom.a0 / geom.z_r.norm().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NarrowBranch {
    /// Both the `F₀(−2B₀η₃/c₀)` factor and the `ξ₃` coupling are kept.
    General,
    AboveCritical,
    BelowCritical,
}

/// Branch selected by comparing `B₀` with `B_c`.
pub fn narrow_branch(geom: &PsfGeometry, b0: f64) -> NarrowBranch {
    if b0 > critical_bandwidth(geom) {
        NarrowBranch::AboveCritical
    } else {
        NarrowBranch::BelowCritical
    }
}

fn narrow_parts(
    geom: &PsfGeometry,
    f0: &Envelope,
    b0: f64,
    eta: [f64; 3],
    cs: f64,
    branch: NarrowBranch,
) -> Result<(f64, Complex64)> {
    let alphas = geom.tilts(cs)?;
    let w0 = geom.omega0;
    let xi3 = match branch {
        NarrowBranch::AboveCritical => 0.0,
        _ => geom.xi3(w0, eta[2]),
    };
    let f = match branch {
        NarrowBranch::BelowCritical => f0.time(0.0),
        _ => f0.time(-2.0 * b0 * eta[2] / geom.c0),
    };
    let g = geom.g(alphas, [geom.xi_t(w0, eta[0]), geom.xi_t(w0, eta[1]), xi3, geom.xi4(w0, cs)]);
    Ok((f, g))
}

/// Narrowband PSF `𝒫̃`; `eta[2]` is the unscaled range offset.
pub fn psf_narrowband(
    geom: &PsfGeometry,
    f0: &Envelope,
    b0: f64,
    epsilon: f64,
    eta: [f64; 3],
    cs: f64,
    branch: NarrowBranch,
) -> Result<f64> {
    let (f, g) = narrow_parts(geom, f0, b0, eta, cs, branch)?;
    let w0 = geom.omega0;
    let transverse = cs * cs * (eta[0] * eta[0] + eta[1] * eta[1]) / (geom.c0 * geom.c0 * geom.range());
    let phase = -(w0 / geom.c0) * (2.0 * eta[2] / epsilon + transverse);
    Ok(4.0 * PI * w0 * (Complex64::new(0.0, -1.0) * cis(phase) * f * g * g).re)
}

pub fn psf_envelope_narrowband(
    geom: &PsfGeometry,
    f0: &Envelope,
    b0: f64,
    eta: [f64; 3],
    cs: f64,
    branch: NarrowBranch,
) -> Result<f64> {
    let (f, g) = narrow_parts(geom, f0, b0, eta, cs, branch)?;
    Ok(2.0 * PI * geom.omega0 * f.abs() * g.norm_sqr())
}

/// `|𝒢(−a₀ω₀η₁/(c₀|z_r|), 0, −a₀²ω₀η₃/(c₀|z_r|²), ξ₄)|²`, the range/mismatch coupling profile.
pub fn mismatch_profile(geom: &PsfGeometry, eta1: f64, eta3: f64, cs: f64) -> Result<f64> {
    let alphas = geom.tilts(cs)?;
    let w0 = geom.omega0;
    Ok(geom.g(alphas, [geom.xi_t(w0, eta1), 0.0, geom.xi3(w0, eta3), geom.xi4(w0, cs)]).norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePeak {
    pub value: f64,
    pub eta1: f64,
    pub eta3: f64,
}

/// Maximum of `mismatch_profile` over `(η₁, η₃)`: coarse scan, then compass search.
pub fn mismatch_peak(geom: &PsfGeometry, cs: f64) -> Result<ProfilePeak> {
    geom.tilts(cs)?;
    let w0 = geom.omega0;
    let r = geom.range();
    // Scan in ξ units, where the profile varies on unit scales.
    let k1 = geom.a0 * w0 / (geom.c0 * r);
    let k3 = geom.a0 * geom.a0 * w0 / (geom.c0 * r * r);
    let x4 = geom.xi4(w0, cs).abs();
    let span3 = 2.0 * x4 + 20.0;
    let f = |x1: f64, x3: f64| mismatch_profile(geom, x1 / k1, x3 / k3, cs).unwrap_or(0.0);
    let (mut b1, mut b3, mut best) = (0.0, 0.0, f(0.0, 0.0));
    let n1 = 41;
    let n3 = (4.0 * span3).ceil() as usize + 1;
    for i in 0..n1 {
        let x1 = -10.0 + 20.0 * i as f64 / (n1 - 1) as f64;
        for j in 0..n3 {
            let x3 = -span3 + 2.0 * span3 * j as f64 / (n3 - 1) as f64;
            let v = f(x1, x3);
            if v > best {
                (b1, b3, best) = (x1, x3, v);
            }
        }
    }
    let mut step = 0.5;
    while step > 1e-9 {
        let mut moved = false;
        for (d1, d3) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = f(b1 + d1, b3 + d3);
            if v > best {
                (b1, b3, best) = (b1 + d1, b3 + d3, v);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(ProfilePeak { value: best, eta1: b1 / k1, eta3: b3 / k3 })
}

/// Theory curve `|∫₀^∞ (−iωF̂) 𝒢²(0,0,0,ξ₄(ω)) dω|` for the speed sweep.
pub fn speed_curve_theory(geom: &PsfGeometry, spectrum: &Spectrum, cs: f64) -> Result<f64> {
    let alphas = geom.tilts(cs)?;
    let w_max = band_limit(spectrum);
    let rate = geom.a0 * geom.a0 * ((geom.c0 / cs).powi(2) - 1.0).abs() / (geom.c0 * geom.range());
    let q = omega_rule(w_max, rate);
    let v = q.integrate_complex(|w| {
        let g = geom.g(alphas, [0.0, 0.0, 0.0, geom.xi4(w, cs)]);
        Complex64::new(0.0, -w * spectrum.eval(w)) * g * g
    });
    Ok(v.norm())
}

/// Geometry of the virtual guide star `z_g = (0, 0, c₀ t_g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomGeometry {
    pub a0: f64,
    pub omega0: f64,
    pub c0: f64,
    pub t_g: f64,
    pub shape: ApertureShape,
    pub n_quad: usize,
}

impl RandomGeometry {
    pub fn z_g(&self) -> f64 {
        self.c0 * self.t_g
    }

    fn xi4(&self, omega: f64, cs: f64) -> f64 {
        -self.a0 * self.a0 * omega * ((self.c0 / cs).powi(2) - 1.0) / (self.c0 * self.z_g())
    }

    fn check(&self, cs: f64) -> Result<()> {
        if !(self.t_g > 0.0 && cs > 0.0) {
            return Err(Error::InvalidInput("guide-star PSF needs t_g > 0 and c_s > 0".into()));
        }
        Ok(())
    }
}

/// Random-medium PSF `𝒫_μ(t_g, η, c_s)`.
pub fn random_psf(geom: &RandomGeometry, spectrum: &Spectrum, eta: [f64; 3], cs: f64) -> Result<f64> {
    geom.check(cs)?;
    let zg = geom.z_g();
    let lag = 2.0 * eta[2] + (eta[0] * eta[0] + eta[1] * eta[1]) / zg;
    let k = geom.a0 / (geom.c0 * zg);
    let w_max = band_limit(spectrum);
    let rate = lag.abs() / geom.c0 + 2.0 * k * (eta[0].abs() + eta[1].abs()) + geom.xi4(1.0, cs).abs();
    let q = omega_rule(w_max, rate);
    let v = q.integrate_complex(|w| {
        let xi = [k * w * eta[0], k * w * eta[1], 0.0, geom.xi4(w, cs)];
        let g = g_func(1.0, 1.0, xi, &geom.shape, geom.n_quad);
        Complex64::new(0.0, -w * spectrum.eval(w)) * cis(w * lag / geom.c0) * g * g
    });
    Ok(v.re)
}

/// Antiderivative of `|F₀|²` tabulated with cubic Hermite interpolation.
struct SquaredAntiderivative {
    start: f64,
    step: f64,
    values: Vec<f64>,
    f0: Envelope,
}

impl SquaredAntiderivative {
    fn new(f0: Envelope, half_width: f64) -> Self {
        let scale = match f0 {
            Envelope::Gaussian { sigma } => sigma,
            Envelope::GaussCos { sigma, nu0 } => sigma.min(1.0 / (4.0 * PI * nu0.max(1e-12))),
        };
        let step = scale / 40.0;
        let n = (2.0 * half_width / step).ceil() as usize + 1;
        let start = -half_width;
        let sq = |t: f64| f0.time(t).powi(2);
        let mut values = Vec::with_capacity(n);
        let mut acc = 0.0;
        values.push(0.0);
        for i in 1..n {
            let lo = start + (i - 1) as f64 * step;
            acc += Quadrature1D::gauss_legendre(8, lo, lo + step).integrate(sq);
            values.push(acc);
        }
        Self { start, step, values, f0 }
    }

    fn eval(&self, s: f64) -> f64 {
        let u = (s - self.start) / self.step;
        let last = self.values.len() - 1;
        if u <= 0.0 {
            return 0.0;
        }
        if u >= last as f64 {
            return self.values[last];
        }
        let i = (u.floor() as usize).min(last - 1);
        let t = u - i as f64;
        let (p0, p1) = (self.values[i], self.values[i + 1]);
        let x0 = self.start + i as f64 * self.step;
        let m0 = self.f0.time(x0).powi(2) * self.step;
        let m1 = self.f0.time(x0 + self.step).powi(2) * self.step;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * m1
    }
}

/// Truncation box of the second-moment integral: transverse and range half-widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentBox {
    pub transverse: f64,
    pub range: f64,
}

/// Largest relative contribution of the outer shell accepted as converged.
pub const SHELL_TOLERANCE: f64 = 0.005;
const MAX_DOUBLINGS: usize = 6;

fn moment_in_box(geom: &RandomGeometry, f0: &Envelope, b_h: f64, cs: f64, bx: MomentBox) -> f64 {
    let zg = geom.z_g();
    let w0 = geom.omega0;
    let k = geom.a0 * w0 / (geom.c0 * zg);
    let x4 = geom.xi4(w0, cs);
    let smax = (b_h / geom.c0) * (2.0 * bx.range + 2.0 * bx.transverse * bx.transverse / zg);
    let f0_extent = match *f0 {
        Envelope::Gaussian { sigma } | Envelope::GaussCos { sigma, .. } => 8.0 * sigma,
    };
    let anti = SquaredAntiderivative::new(*f0, smax.min(f0_extent).max(1e-9));
    let g_rate = k * (1.0 + x4.abs());
    let panels = ((2.0 * bx.transverse * g_rate / PANEL_PHASE).ceil() as usize).max(4);
    let q = Quadrature1D::composite_gauss_legendre(PANEL, panels, -bx.transverse, bx.transverse);
    let range_weight = |rho2: f64| {
        let shift = rho2 / zg;
        let hi = (b_h / geom.c0) * (2.0 * bx.range + shift);
        let lo = (b_h / geom.c0) * (-2.0 * bx.range + shift);
        geom.c0 / (2.0 * b_h) * (anti.eval(hi) - anti.eval(lo))
    };
    let mut acc = 0.0;
    match geom.shape {
        ApertureShape::Square { half_width } => {
            // 𝒢_{1,1} with ξ₃ = 0 factors into one chirp integral per axis.
            let g1: Vec<f64> = q
                .nodes
                .iter()
                .map(|&e| {
                    (chirp_integral(k * e, 0.5 * x4, -half_width, half_width, geom.n_quad) / (2.0 * half_width))
                        .norm_sqr()
                        .powi(2)
                })
                .collect();
            for (i, (&e1, &w1)) in q.nodes.iter().zip(&q.weights).enumerate() {
                for (j, (&e2, &w2)) in q.nodes.iter().zip(&q.weights).enumerate() {
                    acc += w1 * w2 * g1[i] * g1[j] * range_weight(e1 * e1 + e2 * e2);
                }
            }
        }
        _ => {
            for (&e1, &w1) in q.nodes.iter().zip(&q.weights) {
                for (&e2, &w2) in q.nodes.iter().zip(&q.weights) {
                    let g = g_func(1.0, 1.0, [k * e1, k * e2, 0.0, x4], &geom.shape, geom.n_quad);
                    acc += w1 * w2 * g.norm_sqr().powi(2) * range_weight(e1 * e1 + e2 * e2);
                }
            }
        }
    }
    acc
}

/// Smallest box (by doubling from the default) whose outer shell is negligible for `cs`.
pub fn converged_box(geom: &RandomGeometry, f0: &Envelope, b_h: f64, cs: f64) -> Result<MomentBox> {
    geom.check(cs)?;
    let mut bx = MomentBox {
        transverse: 5.0 * geom.c0 * geom.z_g() / (geom.a0 * geom.omega0),
        range: 5.0 * geom.c0 / b_h,
    };
    let mut inner = moment_in_box(geom, f0, b_h, cs, bx);
    for _ in 0..MAX_DOUBLINGS {
        let outer_box = MomentBox { transverse: 2.0 * bx.transverse, range: 2.0 * bx.range };
        let outer = moment_in_box(geom, f0, b_h, cs, outer_box);
        let shell = if outer > 0.0 { (outer - inner) / outer } else { 0.0 };
        if shell.abs() < SHELL_TOLERANCE {
            return Ok(bx);
        }
        bx = outer_box;
        inner = outer;
    }
    let outer = moment_in_box(geom, f0, b_h, cs, MomentBox { transverse: 2.0 * bx.transverse, range: 2.0 * bx.range });
    Err(Error::TruncationNotConverged { shell_fraction: (outer - inner) / outer })
}

/// Second moment `∭ |F₀((B_H/c₀)(2η₃ + |η⊥|²/|z_g|))|² |𝒢_{1,1}|⁴ dη` on its converged box.
pub fn random_second_moment(geom: &RandomGeometry, f0: &Envelope, b_h: f64, cs: f64) -> Result<f64> {
    let bx = converged_box(geom, f0, b_h, cs)?;
    Ok(moment_in_box(geom, f0, b_h, cs, bx))
}

/// Second moment over a speed sweep, all evaluated on one common converged box.
pub fn random_second_moment_profile(
    geom: &RandomGeometry,
    f0: &Envelope,
    b_h: f64,
    cs: &[f64],
) -> Result<(Vec<f64>, MomentBox)> {
    let mut common = MomentBox { transverse: 0.0, range: 0.0 };
    for &c in cs {
        let bx = converged_box(geom, f0, b_h, c)?;
        common.transverse = common.transverse.max(bx.transverse);
        common.range = common.range.max(bx.range);
    }
    Ok((cs.iter().map(|&c| moment_in_box(geom, f0, b_h, c, common)).collect(), common))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolutionRegime {
    Broadband { b_h: f64 },
    Narrowband,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionReport {
    pub wavelength: f64,
    pub cross_range_1: f64,
    pub cross_range_2: f64,
    pub range: f64,
    pub speed_relative: f64,
    pub fresnel: f64,
}

/// Resolution formulas with `λ = 2πc₀/ω₀` and physical radius `a = ε^{1/2} a₀`.
pub fn resolution_report(geom: &PsfGeometry, epsilon: f64, regime: ResolutionRegime) -> Result<ResolutionReport> {
    let r = geom.range();
    if r == 0.0 {
        return Err(Error::ZeroVector);
    }
    let lambda = 2.0 * PI * geom.c0 / geom.omega0;
    let a = epsilon.sqrt() * geom.a0;
    let alpha_r = geom.z_r.z() / r;
    Ok(ResolutionReport {
        wavelength: lambda,
        cross_range_1: lambda * r / (a * alpha_r),
        cross_range_2: lambda * r / a,
        range: match regime {
            ResolutionRegime::Broadband { b_h } => epsilon * geom.c0 / (2.0 * b_h),
            ResolutionRegime::Narrowband => lambda * r * r / (a * a),
        },
        speed_relative: lambda * r / (a * a),
        fresnel: a * a / (lambda * r),
    })
}
