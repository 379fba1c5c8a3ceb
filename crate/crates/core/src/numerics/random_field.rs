//! Stationary Gaussian random fields on regular 3D lattices by circulant embedding.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Fft3;
use crate::error::{Error, Result};

/// Relative tolerance on negative embedding eigenvalues before the embedding is rejected.
const NEGATIVE_EIGEN_TOL: f64 = 1e-6;
const EMBEDDING_FACTORS: [usize; 4] = [2, 3, 4, 6];
const MAX_EMBEDDING_LEN: usize = 1 << 26;

/// Samples a zero-mean Gaussian field with covariance `cov(lag)` on a lattice of
/// `dims` points with isotropic `spacing`. Values are row-major, last axis fastest.
///
/// The covariance is embedded in a periodic box a few times the lattice size along
/// every axis using minimum-image lags; the box grows until the embedding spectrum is
/// nonnegative, so lattice covariances are reproduced exactly in expectation.
pub fn gauss_field_3d(
    cov: &dyn Fn([f64; 3]) -> f64,
    dims: [usize; 3],
    spacing: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if dims.iter().any(|&d| d == 0) || !(spacing > 0.0) {
        return Err(Error::InvalidInput("field lattice needs positive dims and spacing".into()));
    }
    let mut last_min = 0.0;
    for factor in EMBEDDING_FACTORS {
        let m = dims.map(|d| factor * d);
        let total = m[0] * m[1] * m[2];
        if total > MAX_EMBEDDING_LEN {
            break;
        }
        let spectrum = embedding_spectrum(cov, m, spacing);
        let max = spectrum.iter().map(|v| v.re).fold(0.0, f64::max);
        let min = spectrum.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        if max == 0.0 && min >= 0.0 {
            return Ok(vec![0.0; dims[0] * dims[1] * dims[2]]);
        }
        if min >= -NEGATIVE_EIGEN_TOL * max {
            return Ok(sample(&spectrum, dims, m, seed));
        }
        last_min = min;
    }
    Err(Error::EmbeddingFailure { min_eigenvalue: last_min })
}

fn embedding_spectrum(cov: &dyn Fn([f64; 3]) -> f64, m: [usize; 3], spacing: f64) -> Vec<Complex64> {
    let lag = |k: usize, n: usize| -> f64 {
        let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        signed * spacing
    };
    let mut spectrum = vec![Complex64::new(0.0, 0.0); m[0] * m[1] * m[2]];
    for i in 0..m[0] {
        for j in 0..m[1] {
            for k in 0..m[2] {
                let c = cov([lag(i, m[0]), lag(j, m[1]), lag(k, m[2])]);
                spectrum[(i * m[1] + j) * m[2] + k] = Complex64::new(c, 0.0);
            }
        }
    }
    Fft3::new(m, false).process(&mut spectrum);
    spectrum
}

fn sample(spectrum: &[Complex64], dims: [usize; 3], m: [usize; 3], seed: u64) -> Vec<f64> {
    let total = spectrum.len();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut noise: Vec<Complex64> = spectrum
        .iter()
        .map(|lambda| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im) * (lambda.re.max(0.0) / total as f64).sqrt()
        })
        .collect();
    Fft3::new(m, false).process(&mut noise);

    let mut out = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                out.push(noise[(i * m[1] + j) * m[2] + k].re);
            }
        }
    }
    out
}
