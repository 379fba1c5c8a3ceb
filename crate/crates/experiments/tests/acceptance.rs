//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use daylight_core::estimators::{
    estimate_effective_speed, estimate_reflector_and_speed, virtual_guide_point, AveragingLattice,
};
use daylight_core::forward::{correlation_scattered, empirical_correlation, QuadratureSpec};
use daylight_core::geometry::{phi_v, phi_v_inverse, ApertureShape, SensorArray, Vec3};
use daylight_core::migration::{migrate, SearchGrid};
use daylight_core::noise_medium::{
    sample_sources, Aabb, Bandwidth, Covariance, Envelope, Medium, NoiseModel, RandomMedium, SourceDensity, Spectrum,
};
use daylight_core::numerics::oracles::{fresnel_closed_form, fresnel_oracle, smoothing_convergence_order};
use daylight_core::numerics::UniformGrid;
use daylight_core::psf::{
    critical_bandwidth, g_func, psf_envelope_broadband, psf_envelope_narrowband, NarrowBranch, PsfGeometry,
};
use daylight_experiments::config::{preset_params, Preset};
use daylight_experiments::pipelines;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

/// Writes straight to the process stdout so the line shows even when output is captured.
fn report(id: u32, name: &str, ok: bool, detail: &str, started: Instant) -> bool {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let line = format!("criterion {id} [{name}]: {verdict} ({detail}; {:.1} s)\n", started.elapsed().as_secs_f64());
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    ok
}

#[test]
fn criterion_1_normalization_and_mismatch_peaks() {
    let t = Instant::now();
    let p = preset_params(Preset::Fig4Mismatch).unwrap();
    let r = pipelines::fig4(&p).unwrap();
    let shapes = [
        ApertureShape::Square { half_width: 1.0 },
        ApertureShape::Disk { radius: 1.0 },
        SensorArray::square_grid(5, 5.0).unwrap().shape,
    ];
    let exact = shapes.iter().all(|s| {
        let g = g_func(0.93, 0.88, [0.0; 4], s, 32);
        g.re == 1.0 && g.im == 0.0
    }) && r.origin == [1.0, 0.0];
    let want = [0.87, 1.00, 0.96];
    let peaks_ok = r.peaks.iter().zip(want).all(|(p, w)| (p.value - w).abs() <= 0.01);
    let values: Vec<String> = r.peaks.iter().map(|p| format!("{:.4}", p.value)).collect();
    let ok = exact && peaks_ok && t.elapsed().as_secs() < 60;
    assert!(report(1, "G normalization and peaks", ok, &format!("G(0)=1: {exact}, peaks {}", values.join("/")), t));
}

#[test]
fn criterion_2_focusing_shift() {
    let t = Instant::now();
    let p = preset_params(Preset::Fig5Migration).unwrap();
    let r = pipelines::fig5(&p).unwrap();
    let ok = r.foci.len() == 3 && r.foci.iter().all(|f| f.within_resolution()) && t.elapsed().as_secs() < 600;
    let detail: Vec<String> = r
        .foci
        .iter()
        .map(|f| {
            format!(
                "cs {}: dx {:.2}/{:.2} dz {:.2}/{:.2}",
                f.cs, f.transverse_offset, f.cross_range_resolution, f.range_offset, f.range_resolution
            )
        })
        .collect();
    assert!(report(2, "focusing shift", ok, &detail.join(", "), t));
}

#[test]
fn criterion_3_speed_curve() {
    let t = Instant::now();
    let p = preset_params(Preset::Fig6SpeedCurve).unwrap();
    let r = pipelines::fig6(&p).unwrap();
    let step = 0.02 + 1e-9;
    let ok = (r.peak_phi1 - 1.0).abs() <= step
        && (r.peak_phi2 - 1.0).abs() <= step
        && r.pearson > 0.95
        && t.elapsed().as_secs() < 900;
    let detail = format!("phi1 peak {}, phi2 peak {}, pearson {:.4}", r.peak_phi1, r.peak_phi2, r.pearson);
    assert!(report(3, "wave-speed curve", ok, &detail, t));
}

#[test]
fn criterion_4_montecarlo_desk_scale() {
    let t = Instant::now();
    let p: daylight_experiments::config::Table1Params = preset_params(Preset::Table1Montecarlo).unwrap();
    assert_eq!((p.montecarlo.trials, p.montecarlo.sources), (10, 200));
    let s = pipelines::table1(&p, daylight_experiments::config::DEFAULT_SEED).unwrap();
    let c = s.row("c_hat").unwrap();
    let ec = s.row("E_c_true").unwrap();
    let ok = (0.95..=1.10).contains(&c.mean) && ec.mean < 1e-2 && t.elapsed().as_secs() < 1800;
    let detail = format!(
        "mean c {:.4}, var {:.3e}, rmse {:.4}, mean E_c,true {:.3e}",
        c.mean, c.variance, c.rmse, ec.mean
    );
    assert!(report(4, "Monte-Carlo statistics", ok, &detail, t));
}

#[test]
fn criterion_5_random_theory_profile() {
    let t = Instant::now();
    let p = preset_params(Preset::Fig8RandomTheory).unwrap();
    let r = pipelines::fig8(&p).unwrap();
    let ok = r.cs.len() == 21 && r.peak_cs == 1.0 && t.elapsed().as_secs() < 300;
    assert!(report(5, "random-medium profile", ok, &format!("peak at cs {}", r.peak_cs), t));
}

#[test]
fn criterion_6_ergodicity() {
    let t = Instant::now();
    let spectrum = Spectrum::Shaped {
        envelope: Envelope::Gaussian { sigma: 1.0 },
        omega0: PI,
        bandwidth: Bandwidth::Broad { b_h: 0.5 },
    };
    let sbox = Aabb::new(Vec3::new(-30.0, -30.0, -25.0), Vec3::new(30.0, 30.0, -15.0)).unwrap();
    let noise = NoiseModel::new(
        spectrum,
        SourceDensity::Gaussian { center: Vec3::new(0.0, 0.0, -20.0), scales: [200.0, 200.0, 4.0], bbox: sbox },
    );
    let sources = sample_sources(&noise, 20, 7).unwrap();
    let array = SensorArray::square_grid(5, 5.0).unwrap();
    let domain = Aabb::new(Vec3::new(-7.0, -7.0, 3.0), Vec3::new(7.0, 7.0, 17.0)).unwrap();
    let omega = UniformGrid::from_range(0.0, 0.05, noise.band.1).unwrap();
    let tau = UniformGrid::from_range(0.0, 0.05, 55.0).unwrap();
    let t_g = 10.0;
    let sides = [1.0, 2.0, 4.0];
    let zg = virtual_guide_point(t_g, 1.0);
    let single = |v: f64| UniformGrid::new(v, 1.0, 1).unwrap();
    let probe = SearchGrid::lattice(single(zg.x()), single(zg.y()), single(zg.z()), vec![1.0]).unwrap();

    let mut center = Vec::new();
    let mut averages = vec![Vec::new(); sides.len()];
    for seed in 0..20u64 {
        let model = RandomMedium {
            domain,
            ell_c: 1.2,
            sigma2: 1e-2,
            covariance: Covariance::ExponentialSmooth,
            realization_seed: seed,
            spacing: 0.3,
        };
        let medium = Medium::random(model).unwrap();
        let corr = empirical_correlation(&sources, &medium, &noise, &array, &omega, &tau, 1.0).unwrap();
        let v = migrate(&corr, &probe, &array).unwrap().values[0];
        center.push(v * v);
        for (k, &l) in sides.iter().enumerate() {
            let lattice = AveragingLattice::new(l, 2.0).unwrap();
            averages[k].push(estimate_effective_speed(&corr, t_g, &[1.0], &lattice, &array).unwrap().profile[0]);
        }
    }
    let n = center.len() as f64;
    let mean = center.iter().sum::<f64>() / n;
    let se = (center.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt();
    let dev: Vec<f64> =
        averages.iter().map(|a| a.iter().map(|x| (x - mean).abs()).sum::<f64>() / n).collect();
    let within = averages[2].iter().filter(|&&x| (x - mean).abs() <= 2.0 * se).count();
    let ok = within == center.len() && dev[2] <= dev[0] && t.elapsed().as_secs() < 1800;
    let detail = format!(
        "ensemble {mean:.3e} +- {se:.2e}; mean |avg - ensemble| for l=1,2,4: {:.2e}, {:.2e}, {:.2e}; {within}/20 within 2 SE at l=4",
        dev[0], dev[1], dev[2]
    );
    assert!(report(6, "ergodicity", ok, &detail, t));
}

#[test]
fn criterion_7_oracles() {
    let t = Instant::now();
    let pairs = [(0.5, 0.0), (1.0, 1.0), (2.0, -3.0), (0.3, 2.0), (5.0, 10.0), (1.5, -0.7)];
    let fresnel = pairs.iter().map(|&(a, b)| {
        let want = fresnel_closed_form(a, b);
        (fresnel_oracle(a, b).unwrap() - want).norm() / want.norm()
    });
    let worst = fresnel.fold(0.0, f64::max);
    let order = smoothing_convergence_order(&[0.2, 0.1, 0.05]);

    let geom = PsfGeometry {
        a0: 10.0,
        omega0: 2.0,
        c0: 1.0,
        z_r: Vec3::new(-5.0, 0.0, 50.0),
        shape: ApertureShape::Square { half_width: 1.0 },
        n_quad: 32,
    };
    let f0 = Envelope::Gaussian { sigma: 1.0 };
    let mut best = (f64::NEG_INFINITY, [1.0; 3], 0.0);
    for cs in [0.8, 0.9, 1.0, 1.1, 1.2] {
        for i in -2..=2 {
            for j in -2..=2 {
                for k in -2..=2 {
                    let eta = [2.0 * i as f64, 2.0 * j as f64, 0.5 * k as f64];
                    let v = psf_envelope_broadband(&geom, &f0, 0.3, eta, cs).unwrap();
                    if v > best.0 {
                        best = (v, eta, cs);
                    }
                }
            }
        }
    }
    let argmax_ok = best.1 == [0.0; 3] && best.2 == 1.0;

    let axis = PsfGeometry { a0: 20.0, omega0: 4.0, z_r: Vec3::new(0.0, 0.0, 30.0), ..geom };
    let b0 = 0.5 * critical_bandwidth(&axis);
    let top = psf_envelope_narrowband(&axis, &f0, b0, [0.0; 3], 1.0, NarrowBranch::BelowCritical).unwrap();
    let ridge = [0.85, 0.9, 0.95, 1.05, 1.1, 1.15]
        .iter()
        .map(|&cs| {
            let eta3 = -30.0 * ((1.0 / cs) * (1.0 / cs) - 1.0);
            let v = psf_envelope_narrowband(&axis, &f0, b0, [0.0, 0.0, eta3], cs, NarrowBranch::BelowCritical).unwrap();
            (v - top).abs() / top
        })
        .fold(0.0, f64::max);

    let ok = worst <= 1e-6 && order >= 3.5 && argmax_ok && ridge <= 1e-6 && t.elapsed().as_secs() < 300;
    let detail = format!(
        "fresnel rel err {worst:.1e}, smoothing order {order:.2}, envelope argmax at (0, {}) {argmax_ok}, ridge {ridge:.1e}",
        best.2
    );
    assert!(report(7, "oracle suite", ok, &detail, t));
}

fn small_scene(strength: f64) -> (NoiseModel, SensorArray, Medium, QuadratureSpec) {
    let bbox = Aabb::new(Vec3::new(-8.0, -8.0, -18.0), Vec3::new(8.0, 8.0, -12.0)).unwrap();
    let noise = NoiseModel::new(
        Spectrum::Omega2Gauss,
        SourceDensity::Gaussian { center: Vec3::new(0.0, 0.0, -15.0), scales: [30.0, 30.0, 4.0], bbox },
    );
    let array = SensorArray::square_grid(3, 1.0).unwrap();
    let medium = Medium::point_reflector(Vec3::new(-1.0, 0.5, 12.0), strength).unwrap();
    let omega = UniformGrid::from_range(0.0, 0.04, 4.5).unwrap();
    let quad = QuadratureSpec::with_density_lattice(omega, &noise, [9, 9, 4]).unwrap();
    (noise, array, medium, quad)
}

#[test]
fn criterion_8_structural_invariants() {
    let t = Instant::now();
    let mut runner = TestRunner::new(Config { cases: 16, failure_persistence: None, ..Config::default() });
    let mut failures = Vec::new();

    let tau = UniformGrid::new(-40.0, 0.1, 801).unwrap();
    let (noise, array, medium, quad) = small_scene(0.01);
    let base = correlation_scattered(&medium, &noise, &array, &quad, &tau, 1.0).unwrap();
    let n = base.n_sensors();
    let scale = base.max_abs();
    let antisym = (0..n).all(|j| {
        (0..n).all(|l| {
            let (a, b) = (base.row(j, l), base.row(l, j));
            (0..tau.len).all(|i| (a[i] - b[tau.len - 1 - i]).abs() <= 1e-8 * scale)
        })
    });
    if !antisym {
        failures.push("antisymmetry".to_string());
    }

    let born = runner.run(&(0.0f64..0.1), |s| {
        let (noise, array, medium, quad) = small_scene(s);
        let c = correlation_scattered(&medium, &noise, &array, &quad, &tau, 1.0).unwrap();
        let k = s / 0.01;
        for (a, b) in c.values.iter().zip(&base.values) {
            prop_assert!((a - k * b).abs() <= 1e-10 * scale * k.max(1.0));
        }
        Ok(())
    });
    if let Err(e) = born {
        failures.push(format!("Born linearity: {e}"));
    }

    let grid = SearchGrid::spherical(
        UniformGrid::from_range(8.0, 0.25, 16.0).unwrap(),
        vec![0.0, 0.1],
        vec![-0.05, 0.05],
        PI,
        Vec3::ZERO,
        vec![0.9, 1.0, 1.1],
    )
    .unwrap();
    let (_, array3, other, _) = small_scene(0.02);
    let other_medium = match other {
        Medium::PointReflector { strength, .. } => Medium::point_reflector(Vec3::new(1.0, -0.5, 10.0), strength).unwrap(),
        m => m,
    };
    let second = correlation_scattered(&other_medium, &noise, &array3, &quad, &tau, 1.0).unwrap();
    let img_a = migrate(&base, &grid, &array).unwrap();
    let img_b = migrate(&second, &grid, &array).unwrap();
    let linear = runner.run(&(-3.0f64..3.0, -3.0f64..3.0), |(a, b)| {
        let mixed = migrate(&base.combine(a, &second, b).unwrap(), &grid, &array).unwrap();
        for i in 0..mixed.values.len() {
            let want = a * img_a.values[i] + b * img_b.values[i];
            let tol = 1e-9 * (a.abs() * img_a.values[i].abs() + b.abs() * img_b.values[i].abs()).max(1e-300);
            prop_assert!((mixed.values[i] - want).abs() <= tol.max(1e-14 * scale));
        }
        Ok(())
    });
    if let Err(e) = linear {
        failures.push(format!("migration linearity: {e}"));
    }

    let reference = estimate_reflector_and_speed(&base, &grid, &array).unwrap();
    let invariant = runner.run(&(1e-3f64..1e3), |k| {
        let mut c = base.clone();
        c.scale(k);
        let e = estimate_reflector_and_speed(&c, &grid, &array).unwrap();
        prop_assert_eq!(e.c_hat, reference.c_hat);
        prop_assert_eq!(e.point_index, reference.point_index);
        Ok(())
    });
    if let Err(e) = invariant {
        failures.push(format!("argmax scale invariance: {e}"));
    }

    let point = (-30.0f64..30.0, -30.0f64..30.0, 5.0f64..80.0);
    let round_trip = runner.run(&(point, 0.7f64..1.3), |((x, y, z), v)| {
        let p = Vec3::new(x, y, z);
        prop_assume!(daylight_core::geometry::satisfies_speed_bound(p, v) && phi_v(p, v).is_ok());
        let back = phi_v_inverse(phi_v(p, v).unwrap(), v).unwrap();
        prop_assert!((back - p).norm() <= 1e-9 * p.norm());
        Ok(())
    });
    if let Err(e) = round_trip {
        failures.push(format!("focusing-map round trip: {e}"));
    }

    let ok = failures.is_empty() && t.elapsed().as_secs() < 300;
    let detail = if failures.is_empty() { "all five properties hold".to_string() } else { failures.join("; ") };
    assert!(report(8, "structural invariants", ok, &detail, t));
}
