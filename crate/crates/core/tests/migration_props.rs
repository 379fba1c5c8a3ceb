use std::f64::consts::PI;

use daylight_core::forward::{CorrelationMeta, CorrelationSet, Mode};
use daylight_core::geometry::SensorArray;
use daylight_core::migration::{
    axis_envelope, line_envelope, migrate, migrate_with, radial_envelope, MigrationMode, SearchGrid,
};
use daylight_core::numerics::UniformGrid;
use daylight_core::{Error, Vec3};
use proptest::prelude::*;

fn meta() -> CorrelationMeta {
    CorrelationMeta { c0: 1.0, epsilon: 1.0, window_applied: false, mode: Mode::Theoretical }
}

fn synthetic_set(array: &SensorArray, seed: f64) -> CorrelationSet {
    let tau = UniformGrid::from_range(0.0, 0.05, 60.0).unwrap();
    let mut c = CorrelationSet::zeros(tau, array.centers().to_vec(), meta());
    let n = array.len();
    for j in 0..n {
        for l in 0..n {
            let t0 = 40.0 + 0.1 * (j + l) as f64 + seed;
            let row = c.row_mut(j, l);
            for (i, v) in row.iter_mut().enumerate() {
                let t = tau.at(i) - t0;
                *v = (-t * t).exp() * (3.0 * t + seed).cos();
            }
        }
    }
    c
}

fn spherical_grid() -> SearchGrid {
    SearchGrid::spherical(
        UniformGrid::from_range(15.0, 0.1, 25.0).unwrap(),
        vec![0.0, 0.05, 0.1],
        vec![-0.02, 0.0, 0.02],
        0.0,
        Vec3::ZERO,
        vec![0.95, 1.0, 1.05],
    )
    .unwrap()
}

#[test]
fn cosine_envelope_is_unit_on_interior() {
    for &n in &[256usize, 512, 1000] {
        for i in 0..=18 {
            let k = 0.1 + 0.05 * i as f64;
            for ph in [0.0, 0.7, 1.9, 2.8] {
                let line: Vec<f64> = (0..n).map(|r| (k * r as f64 + ph).cos()).collect();
                let (env, edge) = line_envelope(&line);
                for r in 0..n {
                    if !edge[r] {
                        assert!((env[r] - 1.0).abs() < 0.02, "n {n} k {k} ph {ph} r {r}: {}", env[r]);
                    }
                }
            }
        }
    }
}

/// Discrete Hilbert transform of a finite sequence by direct summation of the kernel.
fn hilbert_direct(x: &[f64]) -> Vec<f64> {
    let n = x.len() as isize;
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|j| (i - j).rem_euclid(2) == 1)
                .map(|j| 2.0 / (PI * (i - j) as f64) * x[j as usize])
                .sum()
        })
        .collect()
}

#[test]
fn modulated_cosine_envelope_tracks_amplitude() {
    let n = 512;
    for k in [0.2, 0.5, 1.0] {
        let a: Vec<f64> = (0..n).map(|r| (-((r as f64 - 250.0) / 60.0).powi(2)).exp()).collect();
        let x: Vec<f64> = (0..n).map(|r| a[r] * (k * r as f64 + 0.4).cos()).collect();
        let h = hilbert_direct(&x);
        let (env, edge) = line_envelope(&x);
        for r in 0..n {
            if edge[r] {
                continue;
            }
            let oracle = (x[r] * x[r] + h[r] * h[r]).sqrt();
            assert!((env[r] - a[r]).abs() < 0.03, "k {k} r {r}");
            assert!((env[r] - oracle).abs() < 0.03, "k {k} r {r}");
        }
    }
}

#[test]
fn zero_line_has_zero_envelope() {
    let (env, _) = line_envelope(&vec![0.0; 64]);
    assert!(env.iter().all(|&e| e == 0.0));
}

#[test]
fn envelope_ignores_global_phase_rotation() {
    let n = 400;
    let a = |r: f64| (-((r - 200.0) / 40.0).powi(2)).exp();
    let (base, _) = line_envelope(&(0..n).map(|r| a(r as f64) * (0.6 * r as f64).cos()).collect::<Vec<_>>());
    let scale = base.iter().cloned().fold(0.0, f64::max);
    for alpha in [0.3, 1.1, 2.5, 4.0] {
        let line: Vec<f64> = (0..n).map(|r| a(r as f64) * (0.6 * r as f64 + alpha).cos()).collect();
        let (env, _) = line_envelope(&line);
        for (e, b) in env.iter().zip(&base) {
            assert!((e - b).abs() < 1e-9 * scale);
        }
    }
}

#[test]
fn zero_correlation_gives_zero_image() {
    let array = SensorArray::square_grid(3, 2.0).unwrap();
    let tau = UniformGrid::from_range(0.0, 0.05, 60.0).unwrap();
    let c = CorrelationSet::zeros(tau, array.centers().to_vec(), meta());
    let img = migrate(&c, &spherical_grid(), &array).unwrap();
    assert!(img.values.iter().all(|&v| v == 0.0));
}

#[test]
fn migration_is_linear() {
    let array = SensorArray::square_grid(3, 2.0).unwrap();
    let grid = spherical_grid();
    let c1 = synthetic_set(&array, 0.0);
    let c2 = synthetic_set(&array, 0.6);
    let (alpha, beta) = (1.7, -0.4);
    let combo = c1.combine(alpha, &c2, beta).unwrap();
    let i1 = migrate(&c1, &grid, &array).unwrap();
    let i2 = migrate(&c2, &grid, &array).unwrap();
    let ic = migrate(&combo, &grid, &array).unwrap();
    let scale = ic.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for k in 0..ic.values.len() {
        assert!((ic.values[k] - alpha * i1.values[k] - beta * i2.values[k]).abs() < 1e-12 * scale.max(1.0));
    }
}

#[test]
fn envelope_dominates_values_and_peak_is_scale_invariant() {
    let array = SensorArray::square_grid(3, 2.0).unwrap();
    let grid = spherical_grid();
    let c = synthetic_set(&array, 0.2);
    let img = radial_envelope(&migrate(&c, &grid, &array).unwrap(), &grid).unwrap();
    let env = img.envelope.as_ref().unwrap();
    let max = env.iter().cloned().fold(0.0, f64::max);
    for (e, v) in env.iter().zip(&img.values) {
        assert!(*e >= v.abs() - 1e-9 * max);
    }
    let p = img.peak(&grid).unwrap();
    let mut scaled = c.clone();
    scaled.scale(3.5);
    let img2 = radial_envelope(&migrate(&scaled, &grid, &array).unwrap(), &grid).unwrap();
    let p2 = img2.peak(&grid).unwrap();
    assert_eq!((p.point_index, p.speed_index), (p2.point_index, p2.speed_index));
}

#[test]
fn dense_mode_reduces_to_discrete_for_constant_data() {
    // A lag-independent correlation makes both forms equal N² times the constant.
    let array = SensorArray::square_grid(3, 2.0).unwrap();
    let grid = spherical_grid();
    let mut c = synthetic_set(&array, 0.1);
    c.values.iter_mut().for_each(|v| *v = 0.7);
    let a = migrate(&c, &grid, &array).unwrap();
    let b = migrate_with(&c, &grid, &array, MigrationMode::Dense).unwrap();
    let want = 0.7 * (array.len() * array.len()) as f64;
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - want).abs() < 1e-12 * want);
        assert!((y - want).abs() < 1e-12 * want);
    }
}

#[test]
fn out_of_range_lags_are_masked_and_lattices_are_not_radial() {
    let array = SensorArray::square_grid(3, 2.0).unwrap();
    let c = synthetic_set(&array, 0.0);
    let lattice = SearchGrid::lattice(
        UniformGrid::from_range(-1.0, 1.0, 1.0).unwrap(),
        UniformGrid::from_range(-1.0, 1.0, 1.0).unwrap(),
        UniformGrid::from_range(10.0, 1.0, 40.0).unwrap(),
        vec![1.0],
    )
    .unwrap();
    let img = migrate(&c, &lattice, &array).unwrap();
    assert!(img.masked.iter().any(|&m| m) && img.masked.iter().any(|&m| !m));
    assert_eq!(radial_envelope(&img, &lattice), Err(Error::GridNotRadial));
    assert!(axis_envelope(&img, &lattice, 2).is_ok());
    let far = SearchGrid::lattice(
        UniformGrid::new(0.0, 1.0, 1).unwrap(),
        UniformGrid::new(0.0, 1.0, 1).unwrap(),
        UniformGrid::from_range(100.0, 1.0, 110.0).unwrap(),
        vec![1.0],
    )
    .unwrap();
    assert_eq!(migrate(&c, &far, &array), Err(Error::AllPointsMasked));
}

proptest! {
    #[test]
    fn travel_time_is_homogeneous(x in -50.0f64..50.0, y in -50.0f64..50.0, z in 0.0f64..80.0, c in 0.2f64..5.0) {
        use daylight_core::migration::travel_time;
        let p = Vec3::new(x, y, z);
        let q = Vec3::new(1.0, -2.0, 0.0);
        prop_assert!((travel_time(p, q, 2.0 * c) - 0.5 * travel_time(p, q, c)).abs() < 1e-12 * travel_time(p, q, c).max(1.0));
    }

    #[test]
    fn shifted_cosine_envelope_is_flat(k in 0.1f64..1.0, ph in 0.0f64..6.28) {
        let n = 300;
        let line: Vec<f64> = (0..n).map(|r| (k * r as f64 + ph).cos()).collect();
        let (env, edge) = line_envelope(&line);
        for r in 0..n {
            if !edge[r] {
                prop_assert!((env[r] - 1.0).abs() < 0.02);
            }
        }
    }
}
