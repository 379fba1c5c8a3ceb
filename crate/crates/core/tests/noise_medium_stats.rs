use daylight_core::noise_medium::{
    realize_field, sample_density, Aabb, Covariance, NoiseModel, RandomMedium, SourceDensity, Spectrum,
};
use daylight_core::Vec3;
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erf;

fn printed_density() -> SourceDensity {
    // Gaussian bump with divisors 500, 500, 10 centered at (-50, -50, 42.5).
    let center = Vec3::new(-50.0, -50.0, 42.5);
    let bbox = Aabb::new(center - Vec3::new(50.0, 50.0, 7.5), center + Vec3::new(50.0, 50.0, 7.5)).unwrap();
    SourceDensity::Gaussian { center, scales: [500.0, 500.0, 10.0], bbox }
}

fn axis_cdf(x: f64, c: f64, s: f64) -> f64 {
    erf((x - c) / s.sqrt())
}

#[test]
fn uniform_sampler_mean_is_box_center() {
    let bbox = Aabb::new(Vec3::new(0.0, -2.0, 1.0), Vec3::new(4.0, 2.0, 2.0)).unwrap();
    let pts = sample_density(&SourceDensity::Uniform { bbox }, 100_000, 5).unwrap();
    let n = pts.len() as f64;
    for a in 0..3 {
        let w = bbox.upper[a] - bbox.lower[a];
        let se = w / 12f64.sqrt() / n.sqrt();
        let mean = pts.iter().map(|p| p[a]).sum::<f64>() / n;
        assert!((mean - bbox.center()[a]).abs() < 3.0 * se, "axis {a}: {mean}");
    }
}

#[test]
fn gaussian_sampler_means_match_center() {
    let d = printed_density();
    let pts = sample_density(&d, 20_000, 17).unwrap();
    let n = pts.len() as f64;
    // Truncation is symmetric about the center, so the mean is the center and the
    // variance is that of the truncated normal with std sqrt(s/2).
    let SourceDensity::Gaussian { center, scales, bbox } = d else { unreachable!() };
    for a in 0..3 {
        let sd = (scales[a] / 2.0).sqrt();
        let half = (bbox.upper[a] - center[a]) / sd;
        let phi = (-0.5 * half * half).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mass = erf(half / 2f64.sqrt());
        let var = sd * sd * (1.0 - 2.0 * half * phi / mass);
        let se = (var / n).sqrt();
        let mean = pts.iter().map(|p| p[a]).sum::<f64>() / n;
        assert!((mean - center[a]).abs() < 3.0 * se, "axis {a}: {mean} vs {}", center[a]);
    }
}

#[test]
fn sampler_chi_square_goodness_of_fit() {
    let d = printed_density();
    let SourceDensity::Gaussian { center, scales, bbox } = d.clone() else { unreachable!() };
    let bins = 4usize;
    let edges: Vec<Vec<f64>> = (0..3)
        .map(|a| (0..=bins).map(|k| bbox.lower[a] + (bbox.upper[a] - bbox.lower[a]) * k as f64 / bins as f64).collect())
        .collect();
    let probs: Vec<Vec<f64>> = (0..3)
        .map(|a| {
            let tot = axis_cdf(bbox.upper[a], center[a], scales[a]) - axis_cdf(bbox.lower[a], center[a], scales[a]);
            (0..bins)
                .map(|k| {
                    (axis_cdf(edges[a][k + 1], center[a], scales[a]) - axis_cdf(edges[a][k], center[a], scales[a]))
                        / tot
                })
                .collect()
        })
        .collect();
    let n = 20_000usize;
    let dof = (bins * bins * bins - 1) as f64;
    let chi = ChiSquared::new(dof).unwrap();
    for seed in 0..10u64 {
        let pts = sample_density(&d, n, seed).unwrap();
        let mut counts = vec![0usize; bins * bins * bins];
        for p in &pts {
            let idx = |a: usize| {
                let u = (p[a] - bbox.lower[a]) / (bbox.upper[a] - bbox.lower[a]);
                ((u * bins as f64) as usize).min(bins - 1)
            };
            counts[(idx(0) * bins + idx(1)) * bins + idx(2)] += 1;
        }
        let mut stat = 0.0;
        for i in 0..bins {
            for j in 0..bins {
                for k in 0..bins {
                    let e = n as f64 * probs[0][i] * probs[1][j] * probs[2][k];
                    let o = counts[(i * bins + j) * bins + k] as f64;
                    stat += (o - e).powi(2) / e;
                }
            }
        }
        let p = 1.0 - chi.cdf(stat);
        assert!(p > 1e-3, "seed {seed}: chi2 {stat}, p {p}");
    }
}

#[test]
fn sampler_is_deterministic() {
    let d = printed_density();
    assert_eq!(sample_density(&d, 50, 9).unwrap(), sample_density(&d, 50, 9).unwrap());
}

fn medium_64() -> RandomMedium {
    let h = 0.25;
    RandomMedium {
        domain: Aabb::new(Vec3::ZERO, Vec3::new(63.0 * h, 63.0 * h, 63.0 * h)).unwrap(),
        ell_c: 1.0,
        sigma2: 2.0,
        covariance: Covariance::Gaussian,
        realization_seed: 0,
        spacing: h,
    }
}

#[test]
fn field_covariance_matches_target_at_three_lags() {
    let m = medium_64();
    let lattice = m.lattice();
    assert_eq!(lattice.dims, [64, 64, 64]);
    let lags = [0usize, 4, 8];
    let mut acc = [0.0; 3];
    let seeds = 20;
    for seed in 0..seeds {
        let f = realize_field(&m, seed).unwrap();
        let [nx, ny, nz] = lattice.dims;
        for (slot, &lag) in lags.iter().enumerate() {
            let mut s = 0.0;
            let mut cnt = 0usize;
            for i in 0..nx - lag {
                for j in 0..ny {
                    for k in 0..nz {
                        s += f.values[lattice.index(i, j, k)] * f.values[lattice.index(i + lag, j, k)];
                        cnt += 1;
                    }
                }
            }
            acc[slot] += s / cnt as f64;
        }
    }
    for (slot, &lag) in lags.iter().enumerate() {
        let emp = acc[slot] / seeds as f64;
        let target = m.covariance_at([lag as f64 * m.spacing, 0.0, 0.0]);
        let tol = 0.1 * target.max(0.1 * m.sigma2 * (-0.5f64).exp());
        assert!((emp - target).abs() < tol, "lag {lag}: {emp} vs {target}");
    }
}

#[test]
fn field_realization_is_deterministic() {
    let m = RandomMedium { domain: Aabb::new(Vec3::ZERO, Vec3::new(4.0, 4.0, 4.0)).unwrap(), ..medium_64() };
    assert_eq!(realize_field(&m, 42).unwrap().values, realize_field(&m, 42).unwrap().values);
}

proptest! {
    #[test]
    fn spectra_are_even_and_nonnegative(w in -50.0f64..50.0, sigma in 0.1f64..2.0, omega0 in 0.5f64..5.0, b in 0.1f64..3.0) {
        use daylight_core::noise_medium::{Bandwidth, Envelope};
        let bbox = Aabb::new(Vec3::ZERO, Vec3::new(1.0, 1.0, 1.0)).unwrap();
        let density = SourceDensity::Uniform { bbox };
        for spectrum in [
            Spectrum::Omega2Gauss,
            Spectrum::Shaped { envelope: Envelope::Gaussian { sigma }, omega0, bandwidth: Bandwidth::Broad { b_h: b } },
            Spectrum::Shaped {
                envelope: Envelope::GaussCos { sigma, nu0: 1.0 },
                omega0,
                bandwidth: Bandwidth::Narrow { b0: b, epsilon: 0.5 },
            },
        ] {
            let m = NoiseModel::new(spectrum, density.clone());
            prop_assert!(m.f_hat(w) >= 0.0);
            prop_assert_eq!(m.f_hat(w), m.f_hat(-w));
        }
    }

    #[test]
    fn density_is_nonnegative(x in -120.0f64..20.0, y in -120.0f64..20.0, z in 20.0f64..60.0) {
        prop_assert!(printed_density().eval(Vec3::new(x, y, z)) >= 0.0);
    }
}
