//! Cross-correlation synthesis in the Born approximation.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{SensorArray, Vec3};
use crate::noise_medium::{FieldRealization, Medium, NoiseModel};
use crate::numerics::{phase_sum, phase_sum_direct, UniformGrid};

const REANCHOR: usize = 256;

fn cis(x: f64) -> Complex64 {
    let (s, c) = x.sin_cos();
    Complex64::new(c, s)
}

/// Outgoing free-space Helmholtz kernel `e^{iω|x−y|/c₀} / (4π|x−y|)`.
pub fn green0(omega: f64, x: Vec3, y: Vec3, c0: f64) -> Result<Complex64> {
    let r = x.dist(y);
    if r == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(cis(omega * r / c0) / (4.0 * PI * r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Theoretical,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMeta {
    pub c0: f64,
    pub epsilon: f64,
    pub window_applied: bool,
    pub mode: Mode,
}

/// `C(τ, x_j, x_l)` for every ordered sensor pair. Row `j·N + l` holds the lag series.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSet {
    pub tau: UniformGrid,
    pub sensors: Vec<Vec3>,
    pub values: Vec<f64>,
    pub meta: CorrelationMeta,
}

const CORR_MAGIC: &[u8; 8] = b"DLCORR01";

impl CorrelationSet {
    pub fn zeros(tau: UniformGrid, sensors: Vec<Vec3>, meta: CorrelationMeta) -> Self {
        let n = sensors.len();
        Self { values: vec![0.0; n * n * tau.len], tau, sensors, meta }
    }

    pub fn n_sensors(&self) -> usize {
        self.sensors.len()
    }

    pub fn row(&self, j: usize, l: usize) -> &[f64] {
        let n = self.n_sensors();
        let len = self.tau.len;
        let r = j * n + l;
        &self.values[r * len..(r + 1) * len]
    }

    pub fn row_mut(&mut self, j: usize, l: usize) -> &mut [f64] {
        let n = self.n_sensors();
        let len = self.tau.len;
        let r = j * n + l;
        &mut self.values[r * len..(r + 1) * len]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.tau != other.tau || self.sensors != other.sensors {
            return Err(Error::InvalidInput("correlation sets have different lags or sensors".into()));
        }
        Ok(())
    }

    /// Background subtraction `C − C_background`.
    pub fn subtract(&self, background: &Self) -> Result<Self> {
        self.check_compatible(background)?;
        let mut out = self.clone();
        out.values.iter_mut().zip(&background.values).for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a = alpha * *a + beta * b);
        Ok(out)
    }

    /// Zeros every lag whose mask entry is `false`.
    pub fn apply_mask(&mut self, mask: &[bool]) -> Result<()> {
        if mask.len() != self.tau.len {
            return Err(Error::InvalidInput("mask length differs from the lag grid".into()));
        }
        let len = self.tau.len;
        for row in self.values.chunks_mut(len) {
            for (v, &keep) in row.iter_mut().zip(mask) {
                if !keep {
                    *v = 0.0;
                }
            }
        }
        self.meta.window_applied = true;
        Ok(())
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(CORR_MAGIC)?;
        w.write_all(&(self.sensors.len() as u64).to_le_bytes())?;
        for s in &self.sensors {
            for c in s.0 {
                w.write_all(&c.to_le_bytes())?;
            }
        }
        w.write_all(&self.tau.start.to_le_bytes())?;
        w.write_all(&self.tau.step.to_le_bytes())?;
        w.write_all(&(self.tau.len as u64).to_le_bytes())?;
        let mode = match self.meta.mode {
            Mode::Theoretical => 0u8,
            Mode::Empirical => 1u8,
        };
        w.write_all(&[mode, self.meta.window_applied as u8])?;
        w.write_all(&self.meta.c0.to_le_bytes())?;
        w.write_all(&self.meta.epsilon.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CORR_MAGIC {
            return Err(Error::Io("not a correlation set file".into()));
        }
        let mut b = [0u8; 8];
        let mut f64_next = |r: &mut dyn Read| -> Result<f64> {
            r.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        };
        let mut u = [0u8; 8];
        r.read_exact(&mut u)?;
        let n = u64::from_le_bytes(u) as usize;
        let mut sensors = Vec::with_capacity(n);
        for _ in 0..n {
            sensors.push(Vec3::new(f64_next(&mut r)?, f64_next(&mut r)?, f64_next(&mut r)?));
        }
        let start = f64_next(&mut r)?;
        let step = f64_next(&mut r)?;
        r.read_exact(&mut u)?;
        let len = u64::from_le_bytes(u) as usize;
        let mut flags = [0u8; 2];
        r.read_exact(&mut flags)?;
        let mode = match flags[0] {
            0 => Mode::Theoretical,
            1 => Mode::Empirical,
            m => return Err(Error::Io(format!("unknown correlation mode tag {m}"))),
        };
        let c0 = f64_next(&mut r)?;
        let epsilon = f64_next(&mut r)?;
        let mut values = Vec::with_capacity(n * n * len);
        for _ in 0..n * n * len {
            values.push(f64_next(&mut r)?);
        }
        Ok(Self {
            tau: UniformGrid::new(start, step, len)?,
            sensors,
            values,
            meta: CorrelationMeta { c0, epsilon, window_applied: flags[1] == 1, mode },
        })
    }

    /// Long-format CSV with columns `tau,j,l,value`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "tau,j,l,value")?;
        let n = self.n_sensors();
        for j in 0..n {
            for l in 0..n {
                for (i, v) in self.row(j, l).iter().enumerate() {
                    writeln!(w, "{},{},{},{:e}", self.tau.at(i), j, l, v)?;
                }
            }
        }
        Ok(())
    }
}

/// Frequency nodes and source-region nodes with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub omega: UniformGrid,
    pub omega_weights: Vec<f64>,
    pub y_nodes: Vec<Vec3>,
    pub y_weights: Vec<f64>,
    pub method: OmegaRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaRule {
    Trapezoid,
    /// Composite Simpson on the same uniform nodes (odd node count).
    Simpson,
}

impl QuadratureSpec {
    pub fn new(omega: UniformGrid, method: OmegaRule, y_nodes: Vec<Vec3>, y_weights: Vec<f64>) -> Result<Self> {
        if y_nodes.len() != y_weights.len() || y_weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidInput("source nodes need one nonnegative weight each".into()));
        }
        let omega_weights = match method {
            OmegaRule::Trapezoid => omega.trapezoid_weights(),
            OmegaRule::Simpson => {
                if omega.len < 3 || omega.len % 2 == 0 {
                    return Err(Error::InvalidInput("Simpson rule needs an odd number of nodes >= 3".into()));
                }
                (0..omega.len)
                    .map(|i| {
                        let c = if i == 0 || i == omega.len - 1 {
                            1.0
                        } else if i % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        c * omega.step / 3.0
                    })
                    .collect()
            }
        };
        Ok(Self { omega, omega_weights, y_nodes, y_weights, method })
    }

    /// Tensor trapezoid lattice over the density's box, weights `K(y)·ΔV`.
    /// Nodes where `K` vanishes are dropped.
    pub fn with_density_lattice(omega: UniformGrid, noise: &NoiseModel, counts: [usize; 3]) -> Result<Self> {
        let b = noise.density.bbox();
        let axes: Vec<UniformGrid> = (0..3)
            .map(|a| {
                let n = counts[a].max(1);
                let step = if n == 1 { 1.0 } else { (b.upper[a] - b.lower[a]) / (n - 1) as f64 };
                UniformGrid::new(b.lower[a], step, n)
            })
            .collect::<Result<_>>()?;
        let tw: Vec<Vec<f64>> = axes
            .iter()
            .zip(counts)
            .map(|(g, n)| if n <= 1 { vec![1.0] } else { g.trapezoid_weights() })
            .collect();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for i in 0..axes[0].len {
            for j in 0..axes[1].len {
                for k in 0..axes[2].len {
                    let y = Vec3::new(axes[0].at(i), axes[1].at(j), axes[2].at(k));
                    let w = tw[0][i] * tw[1][j] * tw[2][k] * noise.density.eval(y);
                    if w > 0.0 {
                        nodes.push(y);
                        weights.push(w);
                    }
                }
            }
        }
        Self::new(omega, OmegaRule::Trapezoid, nodes, weights)
    }
}

/// Per-pair spectra `Ĉ_{jl}(ω)` on the quadrature nodes, already multiplied by the
/// frequency weights and all prefactors, so that `C(τ) = Re Σ_k Ĉ_k e^{−iω_k τ}`.
#[derive(Debug, Clone)]
pub struct PairSpectra {
    pub omega: UniformGrid,
    pub n: usize,
    pub values: Vec<Vec<Complex64>>,
}

impl PairSpectra {
    pub fn pair(&self, j: usize, l: usize) -> &[Complex64] {
        &self.values[j * self.n + l]
    }

    /// Real lag series on `tau`.
    pub fn synthesize(&self, tau: &UniformGrid, meta: CorrelationMeta, sensors: Vec<Vec3>) -> CorrelationSet {
        let rows: Vec<Vec<f64>> = self.values.par_iter().map(|c| synthesize_row(&self.omega, c, tau)).collect();
        CorrelationSet { tau: *tau, sensors, values: rows.concat(), meta }
    }
}

/// `Re Σ_k c_k e^{−iω_k τ_m}` on a uniform lag grid.
fn synthesize_row(omega: &UniformGrid, coeffs: &[Complex64], tau: &UniformGrid) -> Vec<f64> {
    let mut out = vec![0.0; tau.len];
    for (k, &c) in coeffs.iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let w = omega.at(k);
        let step = cis(-w * tau.step);
        let mut m = 0;
        while m < tau.len {
            let mut ph = c * cis(-w * tau.at(m));
            let stop = (m + REANCHOR).min(tau.len);
            for slot in &mut out[m..stop] {
                *slot += ph.re;
                ph *= step;
            }
            m = stop;
        }
    }
    out
}

/// Frequency weight `w_k ω_k² F̂(ω_k) / (π c₀²)` for the scattered terms.
fn scattered_weights(noise: &NoiseModel, omega: &UniformGrid, omega_weights: &[f64], c0: f64) -> Vec<f64> {
    (0..omega.len)
        .map(|k| {
            let w = omega.at(k);
            omega_weights[k] * w * w * noise.f_hat(w) / (PI * c0 * c0)
        })
        .collect()
}

fn check_alias(omega: &UniformGrid, support: f64, tau: &UniformGrid) -> Result<()> {
    let max_tau = tau.start.abs().max(tau.end().abs());
    let bound = 2.0 * PI / (support + max_tau);
    if omega.step >= bound {
        return Err(Error::QuadratureUnderresolved { step: omega.step, bound });
    }
    Ok(())
}

fn max_distance(xs: &[Vec3], zs: &[Vec3]) -> f64 {
    xs.iter().flat_map(|x| zs.iter().map(move |z| x.dist(*z))).fold(0.0, f64::max)
}

/// Sources sharing the quadrature nodes' frequency grid.
struct Sources<'a> {
    nodes: &'a [Vec3],
    weights: &'a [f64],
}

fn point_reflector_spectra(
    z: Vec3,
    strength: f64,
    src: &Sources,
    sensors: &[Vec3],
    omega: &UniformGrid,
    wk: &[f64],
    c0: f64,
) -> Result<PairSpectra> {
    let n = sensors.len();
    if src.nodes.iter().any(|y| y.dist(z) == 0.0) || sensors.iter().any(|x| x.dist(z) == 0.0) {
        return Err(Error::CoincidentPoints);
    }
    // A_j(ω) = Σ_y W_y Ĝ₀(z,y) conj Ĝ₀(x_j,y)
    let a: Vec<Vec<Complex64>> = sensors
        .par_iter()
        .map(|&x| {
            let mut times = Vec::with_capacity(src.nodes.len());
            let mut amps = Vec::with_capacity(src.nodes.len());
            for (&y, &w) in src.nodes.iter().zip(src.weights) {
                let rz = z.dist(y);
                let rx = x.dist(y);
                if rx == 0.0 {
                    return Err(Error::CoincidentPoints);
                }
                times.push((rz - rx) / c0);
                amps.push(Complex64::new(w / (16.0 * PI * PI * rz * rx), 0.0));
            }
            Ok(phase_sum(&times, &amps, omega))
        })
        .collect::<Result<_>>()?;
    let g: Vec<Vec<Complex64>> = sensors
        .iter()
        .map(|&x| {
            let r = x.dist(z);
            (0..omega.len).map(|k| cis(omega.at(k) * r / c0) / (4.0 * PI * r)).collect()
        })
        .collect();
    let mut values = vec![Vec::new(); n * n];
    for j in 0..n {
        for l in j..n {
            let v: Vec<Complex64> = (0..omega.len)
                .map(|k| strength * wk[k] * (g[l][k] * a[j][k] + (g[j][k] * a[l][k]).conj()))
                .collect();
            if l != j {
                values[l * n + j] = v.iter().map(|c| c.conj()).collect();
            }
            values[j * n + l] = v;
        }
    }
    Ok(PairSpectra { omega: *omega, n, values })
}

fn random_medium_spectra(
    field: &FieldRealization,
    src: &Sources,
    sensors: &[Vec3],
    omega: &UniformGrid,
    wk: &[f64],
    c0: f64,
) -> Result<PairSpectra> {
    let n = sensors.len();
    let l3 = &field.lattice;
    let dv = l3.spacing.powi(3);
    let mut zs = Vec::new();
    let mut rho = Vec::new();
    for i in 0..l3.dims[0] {
        for j in 0..l3.dims[1] {
            for k in 0..l3.dims[2] {
                let v = field.values[l3.index(i, j, k)];
                if v != 0.0 {
                    zs.push(l3.point(i, j, k));
                    rho.push(v * dv);
                }
            }
        }
    }
    let ny = src.nodes.len();
    // S_{x,y}(ω) = Σ_z h³ρ(z) Ĝ₀(x,z) Ĝ₀(z,y)
    let jobs: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..ny).map(move |s| (j, s))).collect();
    let s_vals: Vec<Vec<Complex64>> = jobs
        .par_iter()
        .map(|&(j, s)| {
            let x = sensors[j];
            let y = src.nodes[s];
            let mut times = Vec::with_capacity(zs.len());
            let mut amps = Vec::with_capacity(zs.len());
            for (&z, &r) in zs.iter().zip(&rho) {
                let a = x.dist(z);
                let b = z.dist(y);
                if a == 0.0 || b == 0.0 {
                    return Err(Error::CoincidentPoints);
                }
                times.push((a + b) / c0);
                amps.push(Complex64::new(r / (16.0 * PI * PI * a * b), 0.0));
            }
            Ok(phase_sum(&times, &amps, omega))
        })
        .collect::<Result<_>>()?;
    let g: Vec<Vec<Complex64>> = jobs
        .iter()
        .map(|&(j, s)| {
            let r = sensors[j].dist(src.nodes[s]);
            (0..omega.len).map(|k| cis(omega.at(k) * r / c0) / (4.0 * PI * r)).collect()
        })
        .collect();
    let mut values = vec![Vec::new(); n * n];
    for j in 0..n {
        for l in j..n {
            let mut v = vec![Complex64::new(0.0, 0.0); omega.len];
            for s in 0..ny {
                let w = src.weights[s];
                let (gj, gl) = (&g[j * ny + s], &g[l * ny + s]);
                let (sj, sl) = (&s_vals[j * ny + s], &s_vals[l * ny + s]);
                for k in 0..omega.len {
                    v[k] += w * (gj[k].conj() * sl[k] + sj[k].conj() * gl[k]);
                }
            }
            v.iter_mut().zip(wk).for_each(|(c, &w)| *c *= w);
            if l != j {
                values[l * n + j] = v.iter().map(|c| c.conj()).collect();
            }
            values[j * n + l] = v;
        }
    }
    Ok(PairSpectra { omega: *omega, n, values })
}

/// Scattered spectra for a medium and an arbitrary set of weighted sources.
pub fn scattered_spectra(
    medium: &Medium,
    noise: &NoiseModel,
    array: &SensorArray,
    omega: &UniformGrid,
    omega_weights: &[f64],
    y_nodes: &[Vec3],
    y_weights: &[f64],
    c0: f64,
) -> Result<PairSpectra> {
    let wk = scattered_weights(noise, omega, omega_weights, c0);
    let src = Sources { nodes: y_nodes, weights: y_weights };
    match medium {
        Medium::PointReflector { z_r, strength } => {
            point_reflector_spectra(*z_r, *strength, &src, array.centers(), omega, &wk, c0)
        }
        Medium::Random { field, .. } => random_medium_spectra(field, &src, array.centers(), omega, &wk, c0),
    }
}

/// Longest scattered arrival time, used by the aliasing guard.
pub fn scattered_support(medium: &Medium, array: &SensorArray, c0: f64) -> f64 {
    let zs: Vec<Vec3> = match medium {
        Medium::PointReflector { z_r, .. } => vec![*z_r],
        Medium::Random { model, .. } => model.domain.corners().to_vec(),
    };
    2.0 * max_distance(array.centers(), &zs) / c0
}

/// Theoretical scattered correlation `C⁽¹⁾ = C⁽¹⁾_I + C⁽¹⁾_II`.
pub fn correlation_scattered(
    medium: &Medium,
    noise: &NoiseModel,
    array: &SensorArray,
    quad: &QuadratureSpec,
    tau: &UniformGrid,
    c0: f64,
) -> Result<CorrelationSet> {
    check_alias(&quad.omega, scattered_support(medium, array, c0), tau)?;
    let spectra =
        scattered_spectra(medium, noise, array, &quad.omega, &quad.omega_weights, &quad.y_nodes, &quad.y_weights, c0)?;
    let meta = CorrelationMeta { c0, epsilon: array.epsilon, window_applied: false, mode: Mode::Theoretical };
    Ok(spectra.synthesize(tau, meta, array.centers().to_vec()))
}

/// Direct-wave term `C⁽¹⁾₀`.
pub fn correlation_direct(
    noise: &NoiseModel,
    array: &SensorArray,
    quad: &QuadratureSpec,
    tau: &UniformGrid,
    c0: f64,
) -> Result<CorrelationSet> {
    let sensors = array.centers();
    check_alias(&quad.omega, array.diameter() / c0, tau)?;
    let n = sensors.len();
    let wk: Vec<f64> =
        (0..quad.omega.len).map(|k| quad.omega_weights[k] * noise.f_hat(quad.omega.at(k)) / PI).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |l| (j, l))).collect();
    let spectra: Vec<Vec<Complex64>> = pairs
        .par_iter()
        .map(|&(j, l)| {
            let mut times = Vec::with_capacity(quad.y_nodes.len());
            let mut amps = Vec::with_capacity(quad.y_nodes.len());
            for (&y, &w) in quad.y_nodes.iter().zip(&quad.y_weights) {
                let r1 = sensors[j].dist(y);
                let r2 = sensors[l].dist(y);
                if r1 == 0.0 || r2 == 0.0 {
                    return Err(Error::CoincidentPoints);
                }
                times.push((r2 - r1) / c0);
                amps.push(Complex64::new(w / (16.0 * PI * PI * r1 * r2), 0.0));
            }
            let mut v = phase_sum(&times, &amps, &quad.omega);
            v.iter_mut().zip(&wk).for_each(|(c, &w)| *c *= w);
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let mut values = vec![Vec::new(); n * n];
    for ((j, l), v) in pairs.into_iter().zip(spectra) {
        if l != j {
            values[l * n + j] = v.iter().map(|c| c.conj()).collect();
        }
        values[j * n + l] = v;
    }
    let spectra = PairSpectra { omega: quad.omega, n, values };
    let meta = CorrelationMeta { c0, epsilon: array.epsilon, window_applied: false, mode: Mode::Theoretical };
    Ok(spectra.synthesize(tau, meta, sensors.to_vec()))
}

/// Keep-mask that removes `|τ| ≤ diam(𝒜)/c₀ + guard`.
pub fn direct_window(tau: &UniformGrid, array: &SensorArray, c0: f64, guard: f64) -> Result<Vec<bool>> {
    if !(guard >= 0.0) {
        return Err(Error::InvalidInput(format!("guard must be nonnegative, got {guard}")));
    }
    let cut = array.diameter() / c0 + guard;
    Ok((0..tau.len).map(|i| tau.at(i).abs() > cut).collect())
}

/// Monte-Carlo correlation: the source integral is replaced by an equal-weight sum
/// over the sampled sources, normalized by the total source mass `∫K`.
pub fn empirical_correlation(
    sources: &[Vec3],
    medium: &Medium,
    noise: &NoiseModel,
    array: &SensorArray,
    omega: &UniformGrid,
    tau: &UniformGrid,
    c0: f64,
) -> Result<CorrelationSet> {
    if sources.is_empty() {
        return Err(Error::InvalidInput("empirical correlation needs at least one source".into()));
    }
    check_alias(omega, scattered_support(medium, array, c0), tau)?;
    let w = noise.density.mass() / sources.len() as f64;
    let weights = vec![w; sources.len()];
    let spectra =
        scattered_spectra(medium, noise, array, omega, &omega.trapezoid_weights(), sources, &weights, c0)?;
    let meta = CorrelationMeta { c0, epsilon: array.epsilon, window_applied: false, mode: Mode::Empirical };
    Ok(spectra.synthesize(tau, meta, array.centers().to_vec()))
}

/// Reference evaluation of the point-reflector spectra by direct summation of
/// every source term; quadratic cost, for validation.
pub fn point_reflector_spectra_direct(
    z: Vec3,
    strength: f64,
    noise: &NoiseModel,
    array: &SensorArray,
    omega: &UniformGrid,
    y_nodes: &[Vec3],
    y_weights: &[f64],
    c0: f64,
) -> PairSpectra {
    let wk = scattered_weights(noise, omega, &omega.trapezoid_weights(), c0);
    let xs = array.centers();
    let n = xs.len();
    let mut values = Vec::with_capacity(n * n);
    for j in 0..n {
        for l in 0..n {
            let mut t = Vec::new();
            let mut a = Vec::new();
            for (&y, &w) in y_nodes.iter().zip(y_weights) {
                let (r2z, rzy, r1y) = (xs[l].dist(z), z.dist(y), xs[j].dist(y));
                let (r1z, r2y) = (xs[j].dist(z), xs[l].dist(y));
                let c = strength * w / (64.0 * PI.powi(3));
                t.push((r2z + rzy - r1y) / c0);
                a.push(Complex64::new(c / (r2z * rzy * r1y), 0.0));
                t.push((r2y - rzy - r1z) / c0);
                a.push(Complex64::new(c / (r1z * rzy * r2y), 0.0));
            }
            let mut v = phase_sum_direct(&t, &a, omega);
            v.iter_mut().zip(&wk).for_each(|(c, &w)| *c *= w);
            values.push(v);
        }
    }
    PairSpectra { omega: *omega, n, values }
}
