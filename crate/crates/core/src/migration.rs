//! Generalized daylight migration and envelope extraction.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::CorrelationSet;
use crate::geometry::{SensorArray, Vec3};
use crate::numerics::{AnalyticSignal, UniformGrid};

/// Generalized travel time `|z − x| / c`.
pub fn travel_time(z: Vec3, x: Vec3, c: f64) -> f64 {
    z.dist(x) / c
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridCoords {
    /// Points `origin + r·R_z(ψ)(sin θ cos φ, sin φ, cos θ cos φ)`, angles in radians.
    Spherical { r: UniformGrid, theta: Vec<f64>, phi: Vec<f64>, psi: f64, origin: Vec3 },
    Lattice { x: UniformGrid, y: UniformGrid, z: UniformGrid },
}

/// Search points and searching speeds. Points are ordered so that the fastest
/// axis is radial (spherical) or `z` (lattice).
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub coords: GridCoords,
    pub cs: Vec<f64>,
}

impl SearchGrid {
    pub fn spherical(
        r: UniformGrid,
        theta: Vec<f64>,
        phi: Vec<f64>,
        psi: f64,
        origin: Vec3,
        cs: Vec<f64>,
    ) -> Result<Self> {
        if r.len == 0 || !(r.step > 0.0) || theta.is_empty() || phi.is_empty() {
            return Err(Error::InvalidInput("spherical grid needs increasing radii and nonempty angles".into()));
        }
        Self::check_speeds(&cs)?;
        Ok(Self { coords: GridCoords::Spherical { r, theta, phi, psi, origin }, cs })
    }

    pub fn lattice(x: UniformGrid, y: UniformGrid, z: UniformGrid, cs: Vec<f64>) -> Result<Self> {
        if [x, y, z].iter().any(|g| g.len == 0) {
            return Err(Error::InvalidInput("lattice axes must be nonempty".into()));
        }
        Self::check_speeds(&cs)?;
        Ok(Self { coords: GridCoords::Lattice { x, y, z }, cs })
    }

    fn check_speeds(cs: &[f64]) -> Result<()> {
        if cs.is_empty() || cs.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::InvalidInput("searching speeds must be positive and nonempty".into()));
        }
        Ok(())
    }

    /// Axis lengths, slowest first.
    pub fn shape(&self) -> [usize; 3] {
        match &self.coords {
            GridCoords::Spherical { r, theta, phi, .. } => [theta.len(), phi.len(), r.len],
            GridCoords::Lattice { x, y, z } => [x.len, y.len, z.len],
        }
    }

    pub fn n_points(&self) -> usize {
        self.shape().iter().product()
    }

    fn split(&self, p: usize) -> [usize; 3] {
        let [_, b, c] = self.shape();
        [p / (b * c), (p / c) % b, p % c]
    }

    pub fn point(&self, p: usize) -> Vec3 {
        let [i, j, k] = self.split(p);
        match &self.coords {
            GridCoords::Spherical { r, theta, phi, psi, origin } => {
                let (st, ct) = theta[i].sin_cos();
                let (sp, cp) = phi[j].sin_cos();
                let d = Vec3::new(st * cp, sp, ct * cp);
                let (s, c) = psi.sin_cos();
                let rot = Vec3::new(c * d.x() - s * d.y(), s * d.x() + c * d.y(), d.z());
                *origin + rot * r.at(k)
            }
            GridCoords::Lattice { x, y, z } => Vec3::new(x.at(i), y.at(j), z.at(k)),
        }
    }

    /// Lexicographic key `(r, θ, φ)` (spherical) or `(x, y, z)` (lattice) used to break ties.
    fn key(&self, p: usize) -> [f64; 3] {
        let [i, j, k] = self.split(p);
        match &self.coords {
            GridCoords::Spherical { r, theta, phi, .. } => [r.at(k), theta[i], phi[j]],
            GridCoords::Lattice { x, y, z } => [x.at(i), y.at(j), z.at(k)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MigrationMode {
    /// Double sum over sensor pairs.
    Discrete,
    /// Area-weighted sum scaled by `N²/|𝒜|²`.
    Dense,
}

/// Image values for every (speed, point), stored speed-major: `c·P + p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    pub n_points: usize,
    pub n_speeds: usize,
    pub values: Vec<f64>,
    /// `true` where some required lag fell outside the correlation's lag grid.
    pub masked: Vec<bool>,
    pub envelope: Option<Vec<f64>>,
    /// `true` on envelope samples near the ends of a line.
    pub edge: Option<Vec<bool>>,
    pub mode: MigrationMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub point_index: usize,
    pub speed_index: usize,
    pub point: Vec3,
    pub cs: f64,
    pub value: f64,
}

impl ImageGrid {
    pub fn value(&self, p: usize, c: usize) -> f64 {
        self.values[c * self.n_points + p]
    }

    /// Maximum of the envelope (or of the values when no envelope exists), skipping
    /// masked and edge-flagged samples. Ties go to the smallest `(r, θ, φ, c_s)`.
    pub fn peak(&self, grid: &SearchGrid) -> Option<Peak> {
        self.peak_filtered(grid, |_, _| true)
    }

    /// As `peak`, restricted to speeds/points accepted by `keep(point, speed)`.
    pub fn peak_filtered(&self, grid: &SearchGrid, keep: impl Fn(usize, usize) -> bool) -> Option<Peak> {
        let data = self.envelope.as_ref().unwrap_or(&self.values);
        let mut best: Option<(f64, [f64; 4], usize, usize)> = None;
        for c in 0..self.n_speeds {
            for p in 0..self.n_points {
                let idx = c * self.n_points + p;
                if self.masked[idx] || self.edge.as_ref().is_some_and(|e| e[idx]) || !keep(p, c) {
                    continue;
                }
                let v = data[idx];
                let k = grid.key(p);
                let key = [k[0], k[1], k[2], grid.cs[c]];
                let better = match &best {
                    None => true,
                    Some((bv, bk, _, _)) => v > *bv || (v == *bv && key < *bk),
                };
                if better {
                    best = Some((v, key, p, c));
                }
            }
        }
        best.map(|(value, _, p, c)| Peak { point_index: p, speed_index: c, point: grid.point(p), cs: grid.cs[c], value })
    }

    pub fn write_csv(&self, grid: &SearchGrid, mut w: impl Write) -> Result<()> {
        writeln!(w, "x,y,z,cs,value,envelope,masked")?;
        for c in 0..self.n_speeds {
            for p in 0..self.n_points {
                let z = grid.point(p);
                let idx = c * self.n_points + p;
                let env = self.envelope.as_ref().map(|e| format!("{:e}", e[idx])).unwrap_or_default();
                writeln!(
                    w,
                    "{},{},{},{},{:e},{},{}",
                    z.x(),
                    z.y(),
                    z.z(),
                    grid.cs[c],
                    self.values[idx],
                    env,
                    self.masked[idx] as u8
                )?;
            }
        }
        Ok(())
    }

    /// Flat little-endian file: magic, point and speed counts, envelope flag, values,
    /// then the envelope when present.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(b"DLIMAGE1")?;
        w.write_all(&(self.n_points as u64).to_le_bytes())?;
        w.write_all(&(self.n_speeds as u64).to_le_bytes())?;
        w.write_all(&[self.envelope.is_some() as u8])?;
        for v in self.values.iter().chain(self.envelope.iter().flatten()) {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Cubic (4-point Lagrange) interpolation on a uniform grid; `None` outside it.
#[inline]
fn interp(row: &[f64], start: f64, inv_step: f64, t: f64) -> Option<f64> {
    let n = row.len();
    let u = (t - start) * inv_step;
    if !(u >= -1e-9 && u <= (n - 1) as f64 + 1e-9) {
        return None;
    }
    if n < 4 {
        let i = (u.floor().max(0.0) as usize).min(n.saturating_sub(2));
        if n == 1 {
            return Some(row[0]);
        }
        let f = u - i as f64;
        return Some(row[i] * (1.0 - f) + row[i + 1] * f);
    }
    let i = (u.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = u - (i + 1) as f64;
    let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    Some(w0 * row[i] + w1 * row[i + 1] + w2 * row[i + 2] + w3 * row[i + 3])
}

pub fn migrate(corr: &CorrelationSet, grid: &SearchGrid, array: &SensorArray) -> Result<ImageGrid> {
    migrate_with(corr, grid, array, MigrationMode::Discrete)
}

/// `ℐ(z, c_s) = Σ_{j,l} C((|z−x_j| + |z−x_l|)/c_s, x_j, x_l)`.
pub fn migrate_with(
    corr: &CorrelationSet,
    grid: &SearchGrid,
    array: &SensorArray,
    mode: MigrationMode,
) -> Result<ImageGrid> {
    let xs = array.centers();
    let n = xs.len();
    if corr.n_sensors() != n {
        return Err(Error::InvalidInput("correlation set and array have different sensor counts".into()));
    }
    let pair_w: Vec<f64> = match mode {
        MigrationMode::Discrete => vec![1.0; n * n],
        MigrationMode::Dense => {
            let w = array.weights();
            let s = (n as f64 / array.area()).powi(2);
            (0..n * n).map(|q| s * w[q / n] * w[q % n]).collect()
        }
    };
    let np = grid.n_points();
    let ns = grid.cs.len();
    let start = corr.tau.start;
    let inv = 1.0 / corr.tau.step;
    let rows: Vec<&[f64]> = (0..n * n).map(|q| corr.row(q / n, q % n)).collect();
    let results: Vec<(f64, bool)> = (0..ns * np)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |d, idx| {
                let (c, p) = (idx / np, idx % np);
                let z = grid.point(p);
                let inv_c = 1.0 / grid.cs[c];
                for (dj, x) in d.iter_mut().zip(xs) {
                    *dj = z.dist(*x) * inv_c;
                }
                let mut acc = 0.0;
                for j in 0..n {
                    for l in 0..n {
                        let q = j * n + l;
                        match interp(rows[q], start, inv, d[j] + d[l]) {
                            Some(v) => acc += pair_w[q] * v,
                            None => return (0.0, true),
                        }
                    }
                }
                (acc, false)
            },
        )
        .collect();
    if results.iter().all(|r| r.1) {
        return Err(Error::AllPointsMasked);
    }
    let (values, masked) = results.into_iter().unzip();
    Ok(ImageGrid { n_points: np, n_speeds: ns, values, masked, envelope: None, edge: None, mode })
}

/// Fraction of samples at each end of a line flagged as edge-contaminated.
pub const EDGE_FRACTION: f64 = 0.05;
/// Padding on each side, as a fraction of the line length.
pub const PAD_FRACTION: f64 = 0.25;
/// Order of the autoregressive model used to extend lines into the padding.
pub const AR_ORDER: usize = 8;

/// Analytic-signal modulus of a real line, plus edge flags. The line is extended on
/// both sides by Burg linear prediction, tapered to zero, before the FFT.
pub fn line_envelope(line: &[f64]) -> (Vec<f64>, Vec<bool>) {
    let plan = AnalyticSignal::new(padded_len(line.len()));
    line_envelope_with(&plan, line)
}

fn padded_len(n: usize) -> usize {
    n + 2 * pad_len(n)
}

fn pad_len(n: usize) -> usize {
    (PAD_FRACTION * n as f64).ceil() as usize
}

/// Burg estimate of the prediction-error filter `a` (`a[0] = 1`).
pub fn burg(x: &[f64], order: usize) -> Vec<f64> {
    let n = x.len();
    let mut f = x.to_vec();
    let mut b = x.to_vec();
    let mut a = vec![1.0];
    for m in 0..order.min(n.saturating_sub(1)) {
        let (mut num, mut den) = (0.0, 0.0);
        for i in m + 1..n {
            num += f[i] * b[i - 1];
            den += f[i] * f[i] + b[i - 1] * b[i - 1];
        }
        if !(den > 0.0) {
            break;
        }
        let k = -2.0 * num / den;
        a.push(0.0);
        let rev: Vec<f64> = a.iter().rev().copied().collect();
        a.iter_mut().zip(rev).for_each(|(ai, ri)| *ai += k * ri);
        for i in (m + 1..n).rev() {
            let (fi, bi) = (f[i], b[i - 1]);
            f[i] = fi + k * bi;
            b[i] = bi + k * fi;
        }
    }
    a
}

fn predict(x: &[f64], a: &[f64], count: usize) -> Vec<f64> {
    let q = a.len() - 1;
    let mut y = x.to_vec();
    for _ in 0..count {
        let len = y.len();
        let v: f64 = (1..=q.min(len)).map(|i| -a[i] * y[len - i]).sum();
        y.push(v);
    }
    y.split_off(x.len())
}

fn line_envelope_with(plan: &AnalyticSignal, line: &[f64]) -> (Vec<f64>, Vec<bool>) {
    let n = line.len();
    let pad = pad_len(n);
    let a = burg(line, AR_ORDER.min(n / 4));
    let right = predict(line, &a, pad);
    let rev: Vec<f64> = line.iter().rev().copied().collect();
    let left = predict(&rev, &a, pad);
    let taper = |i: usize| 0.5 * (1.0 + (std::f64::consts::PI * i as f64 / pad as f64).cos());
    let mut buf = Vec::with_capacity(n + 2 * pad);
    buf.extend((0..pad).rev().map(|i| left[i] * taper(i)));
    buf.extend_from_slice(line);
    buf.extend((0..pad).map(|i| right[i] * taper(i)));
    let sig = plan.process(&buf);
    let env = sig[pad..pad + n].iter().map(|c| c.norm()).collect();
    let e = (EDGE_FRACTION * n as f64).ceil() as usize;
    let edge = (0..n).map(|i| i < e || i + e >= n).collect();
    (env, edge)
}

/// Envelope along the radial variable of a spherical grid.
pub fn radial_envelope(img: &ImageGrid, grid: &SearchGrid) -> Result<ImageGrid> {
    match grid.coords {
        GridCoords::Spherical { .. } => axis_envelope(img, grid, 2),
        GridCoords::Lattice { .. } => Err(Error::GridNotRadial),
    }
}

/// Envelope along one grid axis (0, 1 or 2 in `shape` order).
pub fn axis_envelope(img: &ImageGrid, grid: &SearchGrid, axis: usize) -> Result<ImageGrid> {
    if axis > 2 {
        return Err(Error::InvalidInput(format!("axis {axis} out of range")));
    }
    let shape = grid.shape();
    let len = shape[axis];
    if len < 16 {
        return Err(Error::InvalidInput(format!("envelope needs at least 16 samples per line, got {len}")));
    }
    let np = img.n_points;
    let strides = [shape[1] * shape[2], shape[2], 1];
    let stride = strides[axis];
    let plan = AnalyticSignal::new(padded_len(len));
    let mut env = vec![0.0; img.values.len()];
    let mut edge = vec![false; img.values.len()];
    let others: Vec<usize> = (0..np).filter(|p| (p / stride) % len == 0).collect();
    let lines: Vec<(usize, Vec<f64>, Vec<bool>)> = (0..img.n_speeds)
        .flat_map(|c| others.iter().map(move |&p0| c * np + p0))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|base| {
            let line: Vec<f64> = (0..len).map(|i| img.values[base + i * stride]).collect();
            let (e, f) = line_envelope_with(&plan, &line);
            (base, e, f)
        })
        .collect();
    for (base, e, f) in lines {
        for i in 0..len {
            env[base + i * stride] = e[i];
            edge[base + i * stride] = f[i];
        }
    }
    Ok(ImageGrid { envelope: Some(env), edge: Some(edge), ..img.clone() })
}
