//! Sensor arrays, coordinate frames and the focusing-shift map.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);
    pub const E1: Vec3 = Vec3([1.0, 0.0, 0.0]);
    pub const E2: Vec3 = Vec3([0.0, 1.0, 0.0]);
    pub const E3: Vec3 = Vec3([0.0, 0.0, 1.0]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [d, e, f] = o.0;
        Vec3([b * f - c * e, c * d - a * f, a * e - b * d])
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn x(self) -> f64 {
        self.0[0]
    }
    pub fn y(self) -> f64 {
        self.0[1]
    }
    pub fn z(self) -> f64 {
        self.0[2]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self * -1.0
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Normalized aperture `𝒜₀`.
#[derive(Debug, Clone, PartialEq)]
pub enum ApertureShape {
    Square { half_width: f64 },
    Disk { radius: f64 },
    /// Normalized sensor offsets; integrals over the aperture become averages.
    Explicit { points: Vec<[f64; 2]> },
}

impl Default for ApertureShape {
    fn default() -> Self {
        ApertureShape::Square { half_width: 1.0 }
    }
}

/// Planar sensor array centered at the origin of the `ê₁, ê₂` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorArray {
    centers: Vec<Vec3>,
    weights: Vec<f64>,
    pub shape: ApertureShape,
    pub epsilon: f64,
    pub a0: f64,
}

impl SensorArray {
    /// Validates the planar, centered layout. `weights` are the area elements used
    /// by the dense-array form of migration.
    pub fn new(
        centers: Vec<Vec3>,
        weights: Vec<f64>,
        shape: ApertureShape,
        epsilon: f64,
        a0: f64,
    ) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidInput("sensor array is empty".into()));
        }
        if weights.len() != centers.len() || weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::InvalidInput("one positive area weight per sensor required".into()));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidInput(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        if !(a0 > 0.0) {
            return Err(Error::InvalidInput(format!("a0 must be positive, got {a0}")));
        }
        let a = epsilon.sqrt() * a0;
        if let Some(c) = centers.iter().find(|c| c.z().abs() > 1e-12) {
            return Err(Error::InvalidInput(format!("sensor {:?} is off the array plane", c.0)));
        }
        let n = centers.len() as f64;
        let centroid = centers.iter().fold(Vec3::ZERO, |s, &c| s + c) * (1.0 / n);
        if centroid.norm() > 1e-9 * a {
            return Err(Error::InvalidInput(format!("array centroid {:?} is not the origin", centroid.0)));
        }
        Ok(Self { centers, weights, shape, epsilon, a0 })
    }

    /// `n × n` square grid with the given pitch, `ε = 1`, and `a₀` the half width.
    /// The aperture is the explicit set of normalized sensor offsets and the area
    /// weights follow the two-dimensional trapezoid rule.
    pub fn square_grid(n: usize, pitch: f64) -> Result<Self> {
        if n < 2 || !(pitch > 0.0) {
            return Err(Error::InvalidInput("square grid needs n >= 2 and a positive pitch".into()));
        }
        let half = 0.5 * (n - 1) as f64 * pitch;
        let mut centers = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        let mut points = Vec::with_capacity(n * n);
        let edge = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        for i in 0..n {
            for j in 0..n {
                let x = -half + i as f64 * pitch;
                let y = -half + j as f64 * pitch;
                centers.push(Vec3::new(x, y, 0.0));
                weights.push(edge(i) * edge(j) * pitch * pitch);
                points.push([x / half, y / half]);
            }
        }
        Self::new(centers, weights, ApertureShape::Explicit { points }, 1.0, half)
    }

    pub fn centers(&self) -> &[Vec3] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Physical radius `a = ε^{1/2} a₀`.
    pub fn radius(&self) -> f64 {
        self.epsilon.sqrt() * self.a0
    }

    /// Total aperture area `|𝒜|` from the area weights.
    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.centers.iter().enumerate() {
            for b in &self.centers[i + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }
}

/// Relative guard on the radicand of the focusing map.
const RADICAND_GUARD: f64 = 1e-14;

/// Focusing point `φ_v(z)` of a reflector at `z` migrated with speed ratio `v`.
///
/// The range component keeps the sign of `z₃`, so `φ_1` is the identity on all of ℝ³.
pub fn phi_v(z: Vec3, v: f64) -> Result<Vec3> {
    if !(v > 0.0) {
        return Err(Error::InvalidInput(format!("speed ratio must be positive, got {v}")));
    }
    let norm2 = z.dot(z);
    if norm2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let perp2 = z.x() * z.x() + z.y() * z.y();
    let mut radicand = z.z() * z.z() + (1.0 - v * v) * perp2;
    if radicand < 0.0 {
        if radicand >= -RADICAND_GUARD * norm2 {
            radicand = 0.0;
        } else {
            return Err(Error::AdmissibilityViolated { v, radicand });
        }
    }
    let sign = if z.z() < 0.0 { -1.0 } else { 1.0 };
    Ok(Vec3::new(v * v * z.x(), v * v * z.y(), sign * v * radicand.sqrt()))
}

/// Preimage of `z_s` under `φ_v`.
pub fn phi_v_inverse(zs: Vec3, v: f64) -> Result<Vec3> {
    if !(v > 0.0) {
        return Err(Error::InvalidInput(format!("speed ratio must be positive, got {v}")));
    }
    let px = zs.x() / (v * v);
    let py = zs.y() / (v * v);
    let s = zs.z() / v;
    let q2 = s * s - (1.0 - v * v) * (px * px + py * py);
    let scale = s * s + px * px + py * py;
    if q2 < -RADICAND_GUARD * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotInvertible { v });
    }
    let sign = if zs.z() < 0.0 { -1.0 } else { 1.0 };
    Ok(Vec3::new(px, py, sign * q2.max(0.0).sqrt()))
}

/// The speed bound under which the image presents a well-defined peak. It is
/// vacuous on the array axis.
pub fn satisfies_speed_bound(z: Vec3, v: f64) -> bool {
    let perp = (z.x() * z.x() + z.y() * z.y()).sqrt();
    if perp == 0.0 {
        return true;
    }
    v >= 1.0 - (z.z() / perp).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltCosines {
    pub alpha_r: f64,
    pub alpha_f: f64,
}

pub fn tilt_cosines(z_r: Vec3, v: f64) -> Result<TiltCosines> {
    let z_f = phi_v(z_r, v)?;
    Ok(TiltCosines { alpha_r: z_r.z() / z_r.norm(), alpha_f: z_f.z() / z_f.norm() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTriple {
    pub f_hat: [Vec3; 3],
    pub g_hat: [Vec3; 3],
    /// Rotation about `ê₃` that brought `z_r` into the `ê₁`–`ê₃` plane.
    pub rotation: f64,
}

fn rotate_e3(p: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    Vec3::new(c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z())
}

fn planar_frame(z: Vec3) -> [Vec3; 3] {
    let n = z.norm();
    [
        Vec3::new(z.z() / n, 0.0, -z.x() / n),
        Vec3::E2,
        Vec3::new(z.x() / n, 0.0, z.z() / n),
    ]
}

/// Frames attached to the reflector (`f̂`) and to its focusing point (`ĝ`).
pub fn build_frames(z_r: Vec3, v: f64) -> Result<FrameTriple> {
    if z_r.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let rotation = if z_r.y() == 0.0 { 0.0 } else { z_r.y().atan2(z_r.x()) };
    let planar = if rotation == 0.0 {
        z_r
    } else {
        let p = rotate_e3(z_r, -rotation);
        Vec3::new(p.x(), 0.0, p.z())
    };
    let z_f = phi_v(planar, v)?;
    let mut f_hat = planar_frame(planar);
    let mut g_hat = planar_frame(z_f);
    if rotation != 0.0 {
        for e in f_hat.iter_mut().chain(g_hat.iter_mut()) {
            *e = rotate_e3(*e, rotation);
        }
    }
    Ok(FrameTriple { f_hat, g_hat, rotation })
}
