//! Noise-source spectra and densities, and the two medium models.

use std::f64::consts::PI;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::numerics::random_field::gauss_field_3d;
use crate::numerics::Quadrature1D;

/// Baseband envelope `F₀` of a two-bump spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Gaussian { sigma: f64 },
    GaussCos { sigma: f64, nu0: f64 },
}

impl Envelope {
    /// Time-domain `F₀(t)`.
    pub fn time(&self, t: f64) -> f64 {
        match *self {
            Envelope::Gaussian { sigma } => (-t * t / (2.0 * sigma * sigma)).exp(),
            Envelope::GaussCos { sigma, nu0 } => {
                (-t * t / (2.0 * sigma * sigma)).exp() * (2.0 * PI * nu0 * t).cos()
            }
        }
    }

    /// `F̂₀(ω) = ∫ F₀(t) e^{iωt} dt`.
    pub fn spectrum(&self, w: f64) -> f64 {
        match *self {
            Envelope::Gaussian { sigma } => sigma * (2.0 * PI).sqrt() * (-0.5 * sigma * sigma * w * w).exp(),
            Envelope::GaussCos { sigma, nu0 } => {
                let k = 2.0 * PI * nu0;
                let g = |x: f64| (-0.5 * sigma * sigma * x * x).exp();
                0.5 * sigma * (2.0 * PI).sqrt() * (g(w - k) + g(w + k))
            }
        }
    }

    /// Frequency beyond which `F̂₀` is negligible.
    fn spectral_extent(&self) -> f64 {
        match *self {
            Envelope::Gaussian { sigma } => 8.0 / sigma,
            Envelope::GaussCos { sigma, nu0 } => 2.0 * PI * nu0 + 8.0 / sigma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Broad { b_h: f64 },
    Narrow { b0: f64, epsilon: f64 },
}

impl Bandwidth {
    /// Width `W` entering `F̂(ω) = (F̂₀((ω₀−ω)/W) + F̂₀((ω₀+ω)/W)) / W`.
    pub fn width(&self) -> f64 {
        match *self {
            Bandwidth::Broad { b_h } => b_h,
            Bandwidth::Narrow { b0, epsilon } => epsilon * b0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    Shaped { envelope: Envelope, omega0: f64, bandwidth: Bandwidth },
    /// `F̂(ω) = ω² e^{−ω²}`.
    Omega2Gauss,
    /// Piecewise-linear table in `|ω|` on increasing nodes, zero outside.
    Table { omega: Vec<f64>, values: Vec<f64> },
}

impl Spectrum {
    pub fn eval(&self, w: f64) -> f64 {
        match self {
            Spectrum::Shaped { envelope, omega0, bandwidth } => {
                let b = bandwidth.width();
                (envelope.spectrum((omega0 - w) / b) + envelope.spectrum((omega0 + w) / b)) / b
            }
            Spectrum::Omega2Gauss => w * w * (-w * w).exp(),
            Spectrum::Table { omega, values } => {
                let a = w.abs();
                if omega.is_empty() || a < omega[0] || a > omega[omega.len() - 1] {
                    return 0.0;
                }
                let i = omega.partition_point(|&o| o <= a).clamp(1, omega.len() - 1);
                let t = (a - omega[i - 1]) / (omega[i] - omega[i - 1]);
                values[i - 1] + t * (values[i] - values[i - 1])
            }
        }
    }

    fn extent(&self) -> f64 {
        match self {
            Spectrum::Shaped { envelope, omega0, bandwidth } => omega0 + bandwidth.width() * envelope.spectral_extent(),
            Spectrum::Omega2Gauss => 8.0,
            Spectrum::Table { omega, .. } => omega.last().copied().unwrap_or(0.0),
        }
    }
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub lower: Vec3,
    pub upper: Vec3,
}

impl Aabb {
    pub fn new(lower: Vec3, upper: Vec3) -> Result<Self> {
        if (0..3).any(|i| !(upper[i] >= lower[i])) {
            return Err(Error::InvalidInput("box upper corner must dominate the lower one".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|i| p[i] >= self.lower[i] && p[i] <= self.upper[i])
    }

    pub fn center(&self) -> Vec3 {
        (self.lower + self.upper) * 0.5
    }

    pub fn corners(&self) -> [Vec3; 8] {
        let mut out = [Vec3::ZERO; 8];
        for (k, c) in out.iter_mut().enumerate() {
            let pick = |i: usize| if k >> i & 1 == 0 { self.lower[i] } else { self.upper[i] };
            *c = Vec3::new(pick(0), pick(1), pick(2));
        }
        out
    }
}

/// Spatial density `K` of the noise sources, supported on a bounding box.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceDensity {
    /// `exp(−Σᵢ (yᵢ − cᵢ)² / sᵢ)` restricted to the box.
    Gaussian { center: Vec3, scales: [f64; 3], bbox: Aabb },
    Uniform { bbox: Aabb },
}

impl SourceDensity {
    pub fn bbox(&self) -> Aabb {
        match self {
            SourceDensity::Gaussian { bbox, .. } | SourceDensity::Uniform { bbox } => *bbox,
        }
    }

    pub fn eval(&self, y: Vec3) -> f64 {
        if !self.bbox().contains(y) {
            return 0.0;
        }
        match self {
            SourceDensity::Gaussian { center, scales, .. } => {
                let e: f64 = (0..3).map(|i| (y[i] - center[i]).powi(2) / scales[i]).sum();
                (-e).exp()
            }
            SourceDensity::Uniform { .. } => 1.0,
        }
    }

    /// Maximum of `K` over its box.
    pub fn max_on_box(&self) -> f64 {
        let b = self.bbox();
        match self {
            SourceDensity::Gaussian { center, .. } => {
                let p = Vec3::new(
                    center[0].clamp(b.lower[0], b.upper[0]),
                    center[1].clamp(b.lower[1], b.upper[1]),
                    center[2].clamp(b.lower[2], b.upper[2]),
                );
                self.eval(p)
            }
            SourceDensity::Uniform { .. } => {
                if (0..3).all(|i| b.upper[i] > b.lower[i]) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `∫ K` over the box.
    pub fn mass(&self) -> f64 {
        let b = self.bbox();
        match self {
            SourceDensity::Gaussian { center, scales, .. } => (0..3)
                .map(|i| {
                    let s = scales[i].sqrt();
                    0.5 * (PI.sqrt() * s) * (erf((b.upper[i] - center[i]) / s) - erf((b.lower[i] - center[i]) / s))
                })
                .product(),
            SourceDensity::Uniform { .. } => (0..3).map(|i| b.upper[i] - b.lower[i]).product(),
        }
    }
}

/// Source power spectrum, spatial density and quadrature band.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub spectrum: Spectrum,
    pub density: SourceDensity,
    /// Frequency interval `ℬ = [lo, hi]` on the positive axis.
    pub band: (f64, f64),
}

/// Relative level below which the spectrum counts as truncated.
pub const BAND_FLOOR: f64 = 1e-8;

impl NoiseModel {
    /// Builds a model whose band is the positive support of `F̂` down to `BAND_FLOOR`.
    pub fn new(spectrum: Spectrum, density: SourceDensity) -> Self {
        let hi = band_limit(&spectrum);
        Self { spectrum, density, band: (0.0, hi) }
    }

    pub fn f_hat(&self, w: f64) -> f64 {
        self.spectrum.eval(w)
    }

    /// Time-domain envelope `F₀`, when the spectrum has the two-bump form.
    pub fn f0(&self, t: f64) -> Option<f64> {
        match &self.spectrum {
            Spectrum::Shaped { envelope, .. } => Some(envelope.time(t)),
            _ => None,
        }
    }

    fn moments(&self) -> (f64, f64, f64) {
        let q = Quadrature1D::composite_gauss_legendre(16, 256, self.band.0, self.band.1);
        let m0 = q.integrate(|w| self.f_hat(w));
        let m1 = q.integrate(|w| w * self.f_hat(w));
        let m2 = q.integrate(|w| w * w * self.f_hat(w));
        (m0, m1, m2)
    }

    /// Spectral centroid on the positive band.
    pub fn central_frequency(&self) -> f64 {
        let (m0, m1, _) = self.moments();
        m1 / m0
    }

    /// RMS spectral width on the positive band.
    pub fn effective_bandwidth(&self) -> f64 {
        let (m0, m1, m2) = self.moments();
        let c = m1 / m0;
        (m2 / m0 - c * c).max(0.0).sqrt()
    }
}

/// Upper end of the positive support of `F̂` at relative level `BAND_FLOOR`.
pub fn band_limit(spectrum: &Spectrum) -> f64 {
    let upper = spectrum.extent().max(1e-12);
    let n = 8192;
    let h = upper / n as f64;
    let vals: Vec<f64> = (0..=n).map(|i| spectrum.eval(i as f64 * h)).collect();
    let max = vals.iter().cloned().fold(0.0, f64::max);
    let last = vals.iter().rposition(|&v| v >= BAND_FLOOR * max).unwrap_or(n);
    ((last + 1).min(n) as f64) * h
}

pub fn f_hat(model: &NoiseModel, w: f64) -> f64 {
    model.f_hat(w)
}

/// I.i.d. draws from the density `K` by rejection against a uniform box proposal.
pub fn sample_sources(model: &NoiseModel, n: usize, seed: u64) -> Result<Vec<Vec3>> {
    sample_density(&model.density, n, seed)
}

pub fn sample_density(density: &SourceDensity, n: usize, seed: u64) -> Result<Vec<Vec3>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let k_max = density.max_on_box();
    if !(k_max > 0.0) {
        return Err(Error::DegenerateDensity);
    }
    let b = density.bbox();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let budget = 10_000 * n + 1_000_000;
    for _ in 0..budget {
        let y = Vec3::new(
            rng.gen_range(b.lower[0]..=b.upper[0]),
            rng.gen_range(b.lower[1]..=b.upper[1]),
            rng.gen_range(b.lower[2]..=b.upper[2]),
        );
        if rng.gen::<f64>() * k_max <= density.eval(y) {
            out.push(y);
            if out.len() == n {
                return Ok(out);
            }
        }
    }
    Err(Error::DegenerateDensity)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Covariance {
    /// `σ² exp(−|x|²/(2ℓ²))`.
    Gaussian,
    /// Matérn 3/2: `σ² (1 + √3 r/ℓ) exp(−√3 r/ℓ)`.
    ExponentialSmooth,
}

/// Weak stationary Gaussian perturbation of the background on a box.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomMedium {
    pub domain: Aabb,
    pub ell_c: f64,
    pub sigma2: f64,
    pub covariance: Covariance,
    pub realization_seed: u64,
    /// Lattice spacing of realizations; at most `ℓ_c / 4`.
    pub spacing: f64,
}

impl RandomMedium {
    pub fn covariance_at(&self, lag: [f64; 3]) -> f64 {
        let r = (lag[0] * lag[0] + lag[1] * lag[1] + lag[2] * lag[2]).sqrt() / self.ell_c;
        match self.covariance {
            Covariance::Gaussian => self.sigma2 * (-0.5 * r * r).exp(),
            Covariance::ExponentialSmooth => {
                let s = 3f64.sqrt() * r;
                self.sigma2 * (1.0 + s) * (-s).exp()
            }
        }
    }

    /// True when the correlation length is not below the wavelength.
    pub fn exceeds_wavelength(&self, wavelength: f64) -> bool {
        self.ell_c >= wavelength
    }

    pub fn lattice(&self) -> Lattice3 {
        let dims = [0, 1, 2].map(|i| {
            ((self.domain.upper[i] - self.domain.lower[i]) / self.spacing + 1e-9).floor() as usize + 1
        });
        Lattice3 { origin: self.domain.lower, spacing: self.spacing, dims }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice3 {
    pub origin: Vec3,
    pub spacing: f64,
    pub dims: [usize; 3],
}

impl Lattice3 {
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin + Vec3::new(i as f64, j as f64, k as f64) * self.spacing
    }
}

/// A sampled realization of a random medium.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    pub lattice: Lattice3,
    pub values: Vec<f64>,
    pub seed: u64,
}

const FIELD_MAGIC: &[u8; 8] = b"DLFIELD1";

impl FieldRealization {
    /// Trilinear interpolation; exact at lattice nodes.
    pub fn value_at(&self, z: Vec3) -> Result<f64> {
        let l = &self.lattice;
        let mut idx = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let u = (z[a] - l.origin[a]) / l.spacing;
            let top = (l.dims[a] - 1) as f64;
            if !(u >= -1e-12 && u <= top + 1e-12) {
                return Err(Error::OutOfDomain);
            }
            let u = u.clamp(0.0, top);
            let i = (u.floor() as usize).min(l.dims[a].saturating_sub(2));
            idx[a] = i;
            frac[a] = if l.dims[a] == 1 { 0.0 } else { u - i as f64 };
        }
        let mut acc = 0.0;
        for c in 0..8usize {
            let mut w = 1.0;
            let mut p = [0usize; 3];
            for a in 0..3 {
                let up = c >> a & 1 == 1;
                if up && l.dims[a] == 1 {
                    w = 0.0;
                }
                p[a] = idx[a] + up as usize;
                w *= if up { frac[a] } else { 1.0 - frac[a] };
            }
            if w != 0.0 {
                acc += w * self.values[l.index(p[0], p[1], p[2])];
            }
        }
        Ok(acc)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(FIELD_MAGIC)?;
        for d in self.lattice.dims {
            w.write_all(&(d as u64).to_le_bytes())?;
        }
        w.write_all(&self.lattice.spacing.to_le_bytes())?;
        for c in self.lattice.origin.0 {
            w.write_all(&c.to_le_bytes())?;
        }
        w.write_all(&self.seed.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != FIELD_MAGIC {
            return Err(Error::Io("not a field realization file".into()));
        }
        let mut b8 = [0u8; 8];
        let mut next = |r: &mut dyn Read| -> Result<[u8; 8]> {
            r.read_exact(&mut b8)?;
            Ok(b8)
        };
        let mut dims = [0usize; 3];
        for d in &mut dims {
            *d = u64::from_le_bytes(next(&mut r)?) as usize;
        }
        let spacing = f64::from_le_bytes(next(&mut r)?);
        let mut origin = [0.0; 3];
        for c in &mut origin {
            *c = f64::from_le_bytes(next(&mut r)?);
        }
        let seed = u64::from_le_bytes(next(&mut r)?);
        let n = dims.iter().product();
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(f64::from_le_bytes(next(&mut r)?));
        }
        Ok(Self { lattice: Lattice3 { origin: Vec3(origin), spacing, dims }, values, seed })
    }
}

pub fn realize_field(medium: &RandomMedium, seed: u64) -> Result<FieldRealization> {
    if !(medium.spacing > 0.0 && medium.spacing <= medium.ell_c / 4.0 * (1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!(
            "lattice spacing {} must be positive and at most ell_c/4 = {}",
            medium.spacing,
            medium.ell_c / 4.0
        )));
    }
    let lattice = medium.lattice();
    let values = gauss_field_3d(&|lag| medium.covariance_at(lag), lattice.dims, lattice.spacing, seed)?;
    Ok(FieldRealization { lattice, values, seed })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Medium {
    PointReflector { z_r: Vec3, strength: f64 },
    Random { model: RandomMedium, field: FieldRealization },
}

/// Largest reflector strength accepted as a weak scatterer.
pub const MAX_STRENGTH: f64 = 0.1;

impl Medium {
    pub fn point_reflector(z_r: Vec3, strength: f64) -> Result<Self> {
        if !(0.0..=MAX_STRENGTH).contains(&strength) {
            return Err(Error::InvalidInput(format!(
                "reflector strength {strength} outside the weak-scattering range [0, {MAX_STRENGTH}]"
            )));
        }
        Ok(Medium::PointReflector { z_r, strength })
    }

    /// Realizes the field with the model's own seed.
    pub fn random(model: RandomMedium) -> Result<Self> {
        let field = realize_field(&model, model.realization_seed)?;
        Ok(Medium::Random { model, field })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoValue {
    PointMass { strength: f64, z_r: Vec3 },
    Density(f64),
}

pub fn rho_at(medium: &Medium, z: Vec3) -> Result<RhoValue> {
    match medium {
        Medium::PointReflector { z_r, strength } => Ok(RhoValue::PointMass { strength: *strength, z_r: *z_r }),
        Medium::Random { field, .. } => field.value_at(z).map(RhoValue::Density),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> Aabb {
        Aabb::new(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, 1.0, 1.0)).unwrap()
    }

    #[test]
    fn omega2_gauss_vanishes_at_zero() {
        let m = NoiseModel::new(Spectrum::Omega2Gauss, SourceDensity::Uniform { bbox: unit_box() });
        assert_eq!(m.f_hat(0.0), 0.0);
        assert!((m.f_hat(1.0) - (-1f64).exp()).abs() < 1e-16);
        assert!(m.band.1 > 4.0 && m.band.1 < 6.0);
    }

    #[test]
    fn gauss_cos_envelope_is_literal() {
        let e = Envelope::GaussCos { sigma: 0.3, nu0: 10.0 };
        for t in [-0.4f64, -0.1, 0.0, 0.05, 0.33] {
            let want = (-t * t / (2.0 * 0.09)).exp() * (2.0 * PI * 10.0 * t).cos();
            assert!((e.time(t) - want).abs() < 1e-15);
        }
        // Its spectrum is the Fourier transform of the time signal.
        let q = Quadrature1D::composite_gauss_legendre(16, 400, -3.0, 3.0);
        for w in [0.0, 20.0, 62.8, 70.0] {
            let ft = q.integrate(|t| e.time(t) * (w * t).cos());
            assert!((ft - e.spectrum(w)).abs() < 1e-10, "{w}: {ft} vs {}", e.spectrum(w));
        }
    }

    #[test]
    fn table_spectrum_interpolates() {
        let s = Spectrum::Table { omega: vec![1.0, 2.0, 4.0], values: vec![0.0, 2.0, 1.0] };
        assert_eq!(s.eval(1.5), 1.0);
        assert_eq!(s.eval(-3.0), 1.5);
        assert_eq!(s.eval(5.0), 0.0);
    }

    #[test]
    fn moments_of_omega2_gauss() {
        let m = NoiseModel::new(Spectrum::Omega2Gauss, SourceDensity::Uniform { bbox: unit_box() });
        let c = m.central_frequency();
        assert!((c - 1.0 / PI.sqrt() * 2.0).abs() < 1e-6, "{c}");
    }

    #[test]
    fn gaussian_mass_matches_quadrature() {
        let bbox = Aabb::new(Vec3::new(-3.0, 0.0, -2.0), Vec3::new(2.0, 4.0, 1.0)).unwrap();
        let d = SourceDensity::Gaussian { center: Vec3::new(0.5, 1.0, -0.5), scales: [2.0, 5.0, 0.5], bbox };
        let q = [
            Quadrature1D::gauss_legendre(40, -3.0, 2.0),
            Quadrature1D::gauss_legendre(40, 0.0, 4.0),
            Quadrature1D::gauss_legendre(40, -2.0, 1.0),
        ];
        let mut s = 0.0;
        for (x, wx) in q[0].nodes.iter().zip(&q[0].weights) {
            for (y, wy) in q[1].nodes.iter().zip(&q[1].weights) {
                for (z, wz) in q[2].nodes.iter().zip(&q[2].weights) {
                    s += wx * wy * wz * d.eval(Vec3::new(*x, *y, *z));
                }
            }
        }
        assert!((s - d.mass()).abs() < 1e-10 * s);
    }

    #[test]
    fn empty_and_degenerate_sampling() {
        let m = NoiseModel::new(Spectrum::Omega2Gauss, SourceDensity::Uniform { bbox: unit_box() });
        assert!(sample_sources(&m, 0, 1).unwrap().is_empty());
        let flat = Aabb::new(Vec3::ZERO, Vec3::new(1.0, 1.0, 0.0)).unwrap();
        assert_eq!(sample_density(&SourceDensity::Uniform { bbox: flat }, 3, 1), Err(Error::DegenerateDensity));
    }

    #[test]
    fn interpolation_identities() {
        let lattice = Lattice3 { origin: Vec3::new(1.0, 2.0, 3.0), spacing: 0.5, dims: [3, 2, 2] };
        let values: Vec<f64> = (0..12).map(|i| (i * i) as f64).collect();
        let f = FieldRealization { lattice, values, seed: 0 };
        let node = lattice.point(2, 1, 0);
        assert_eq!(f.value_at(node).unwrap(), f.values[lattice.index(2, 1, 0)]);
        let mid = (lattice.point(0, 1, 1) + lattice.point(1, 1, 1)) * 0.5;
        let want = 0.5 * (f.values[lattice.index(0, 1, 1)] + f.values[lattice.index(1, 1, 1)]);
        assert!((f.value_at(mid).unwrap() - want).abs() < 1e-12);
        assert_eq!(f.value_at(Vec3::new(0.0, 2.0, 3.0)), Err(Error::OutOfDomain));
        let pm = Medium::point_reflector(Vec3::new(0.0, 0.0, 5.0), 0.01).unwrap();
        assert_eq!(
            rho_at(&pm, Vec3::ZERO).unwrap(),
            RhoValue::PointMass { strength: 0.01, z_r: Vec3::new(0.0, 0.0, 5.0) }
        );
    }

    #[test]
    fn field_file_round_trip() {
        let model = RandomMedium {
            domain: Aabb::new(Vec3::ZERO, Vec3::new(4.0, 4.0, 3.0)).unwrap(),
            ell_c: 1.0,
            sigma2: 0.5,
            covariance: Covariance::Gaussian,
            realization_seed: 3,
            spacing: 0.25,
        };
        let f = realize_field(&model, 11).unwrap();
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 24 + 8 + 24 + 8 + 8 * f.values.len());
        assert_eq!(FieldRealization::read_from(&buf[..]).unwrap(), f);
        let zero = realize_field(&RandomMedium { sigma2: 0.0, ..model.clone() }, 11).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
        assert!(realize_field(&RandomMedium { spacing: 0.3, ..model }, 1).is_err());
    }
}
