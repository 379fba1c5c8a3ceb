//! Reflector/speed estimation, effective-speed estimation and error statistics.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::{empirical_correlation, CorrelationSet};
use crate::geometry::{phi_v_inverse, SensorArray, Vec3};
use crate::migration::{migrate, migrate_with, radial_envelope, ImageGrid, MigrationMode, SearchGrid};
use crate::noise_medium::{sample_sources, Medium, NoiseModel};
use crate::numerics::UniformGrid;

/// Joint reflector/speed estimate from a spherical search.
#[derive(Debug, Clone, PartialEq)]
pub struct GuideStarEstimate {
    pub z_hat: Vec3,
    pub c_hat: f64,
    pub peak_value: f64,
    pub point_index: usize,
    pub speed_index: usize,
    /// Migrated image with its radial envelope attached.
    pub image: ImageGrid,
}

impl GuideStarEstimate {
    /// Largest non-edge envelope value for each searching speed.
    pub fn speed_curve(&self) -> Vec<f64> {
        let env = self.image.envelope.as_ref().expect("estimate carries an envelope");
        let edge = self.image.edge.as_ref().expect("estimate carries edge flags");
        let np = self.image.n_points;
        (0..self.image.n_speeds)
            .map(|c| {
                (c * np..(c + 1) * np)
                    .filter(|&i| !self.image.masked[i] && !edge[i])
                    .map(|i| env[i])
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Peak location restricted to the searching speed closest to `c`.
    pub fn location_at_speed(&self, grid: &SearchGrid, c: f64) -> Result<Vec3> {
        let target = nearest_index(&grid.cs, c);
        self.image
            .peak_filtered(grid, |_, s| s == target)
            .map(|p| p.point)
            .ok_or(Error::AllPointsMasked)
    }
}

fn nearest_index(values: &[f64], x: f64) -> usize {
    (0..values.len()).min_by(|&a, &b| (values[a] - x).abs().total_cmp(&(values[b] - x).abs())).unwrap_or(0)
}

/// Migrate, take radial envelopes for every speed, and return the joint argmax.
pub fn estimate_reflector_and_speed(
    corr: &CorrelationSet,
    grid: &SearchGrid,
    array: &SensorArray,
) -> Result<GuideStarEstimate> {
    estimate_reflector_and_speed_with(corr, grid, array, MigrationMode::Discrete)
}

pub fn estimate_reflector_and_speed_with(
    corr: &CorrelationSet,
    grid: &SearchGrid,
    array: &SensorArray,
    mode: MigrationMode,
) -> Result<GuideStarEstimate> {
    estimate_from_image(radial_envelope(&migrate_with(corr, grid, array, mode)?, grid)?, grid)
}

/// Joint argmax of an image that already carries its envelope.
pub fn estimate_from_image(image: ImageGrid, grid: &SearchGrid) -> Result<GuideStarEstimate> {
    if image.envelope.is_none() {
        return Err(Error::InvalidInput("image has no envelope".into()));
    }
    let peak = image.peak(grid).ok_or(Error::AllPointsMasked)?;
    Ok(GuideStarEstimate {
        z_hat: peak.point,
        c_hat: peak.cs,
        peak_value: peak.value,
        point_index: peak.point_index,
        speed_index: peak.speed_index,
        image,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPair {
    /// Signed relative range error `⟨ẑ − z_r, z_r⟩/|z_r|²`.
    pub e_r: f64,
    /// Relative cross-range error `√(|ẑ − z_r|² − (E_r|z_r|)²)/|z_r|`.
    pub e_c: f64,
    /// Range error as printed, `⟨ẑ, z_r⟩/|z_r|²`.
    pub e_r_printed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationErrors {
    pub estimated_speed: ErrorPair,
    pub true_speed: ErrorPair,
}

pub fn error_pair(z_hat: Vec3, z_r: Vec3) -> Result<ErrorPair> {
    let r2 = z_r.dot(z_r);
    if r2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let d = z_hat - z_r;
    let e_r = d.dot(z_r) / r2;
    let perp2 = (d.dot(d) - e_r * e_r * r2).max(0.0);
    Ok(ErrorPair { e_r, e_c: (perp2 / r2).sqrt(), e_r_printed: z_hat.dot(z_r) / r2 })
}

/// Errors of the location found with the estimated speed and with the true speed.
pub fn localization_errors(z_hat_est: Vec3, z_hat_true: Vec3, z_r: Vec3) -> Result<LocalizationErrors> {
    Ok(LocalizationErrors { estimated_speed: error_pair(z_hat_est, z_r)?, true_speed: error_pair(z_hat_true, z_r)? })
}

/// Searching point `(0, 0, c_s t_g)` for the virtual guide star.
pub fn virtual_guide_point(t_g: f64, cs: f64) -> Vec3 {
    Vec3::new(0.0, 0.0, cs * t_g)
}

/// Physical point probed by the searching point, `φ_v⁻¹(z_s)` with `v = c_s/c₀`.
pub fn guide_star_location(t_g: f64, cs: f64, c0: f64) -> Result<Vec3> {
    phi_v_inverse(virtual_guide_point(t_g, cs), cs / c0)
}

/// Regular cubic lattice `𝒮(l)` of offsets with spacing 1/2, scaled by `ε` when applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragingLattice {
    /// Side of the cube in units of `ε`.
    pub l: f64,
    /// Typical wavelength `ε`.
    pub epsilon: f64,
}

/// Minimum number of averaging points.
pub const MIN_AVERAGING: usize = 27;
/// Default cube side in wavelengths.
pub const DEFAULT_L: f64 = 20.0;

impl AveragingLattice {
    pub fn new(l: f64, epsilon: f64) -> Result<Self> {
        if !(l >= 0.0 && epsilon > 0.0) {
            return Err(Error::InvalidInput("averaging lattice needs l >= 0 and epsilon > 0".into()));
        }
        Ok(Self { l, epsilon })
    }

    pub fn per_side(&self) -> usize {
        (2.0 * self.l + 1e-9).floor() as usize + 1
    }

    pub fn count(&self) -> usize {
        self.per_side().pow(3)
    }

    /// Physical offset grid along one axis.
    pub fn axis(&self, center: f64) -> UniformGrid {
        let n = self.per_side();
        let h = 0.5 * self.epsilon;
        UniformGrid { start: center - h * (n - 1) as f64 / 2.0, step: h, len: n }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveSpeedEstimate {
    pub c_eff_hat: f64,
    pub cs: Vec<f64>,
    /// Spatial average of `|ℐ|²` at each searching speed.
    pub profile: Vec<f64>,
    pub l: f64,
    pub t_g: f64,
    pub n_avg: usize,
    /// Relative spread (standard deviation over mean) of the profile over the eight
    /// disjoint octant sub-lattices, per speed.
    pub octant_spread: Vec<f64>,
}

impl EffectiveSpeedEstimate {
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "cs,mean_sq_image,octant_spread")?;
        for ((c, v), s) in self.cs.iter().zip(&self.profile).zip(&self.octant_spread) {
            writeln!(w, "{c},{v:e},{s:e}")?;
        }
        Ok(())
    }
}

/// Averaged `|ℐ|²` and octant spread around the searching point for one speed.
fn averaged_power(
    corr: &CorrelationSet,
    array: &SensorArray,
    lattice: &AveragingLattice,
    center: Vec3,
    cs: f64,
) -> Result<(f64, f64)> {
    let grid = SearchGrid::lattice(lattice.axis(center.x()), lattice.axis(center.y()), lattice.axis(center.z()), vec![cs])?;
    let img = migrate(corr, &grid, array)?;
    let n = lattice.per_side();
    let half = n / 2;
    let mut total = (0.0, 0usize);
    let mut octants = [(0.0, 0usize); 8];
    for p in 0..img.n_points {
        if img.masked[p] {
            continue;
        }
        let v = img.values[p] * img.values[p];
        total.0 += v;
        total.1 += 1;
        let (i, j, k) = (p / (n * n), (p / n) % n, p % n);
        // Middle planes of odd lattices belong to no octant, keeping octants disjoint.
        if n % 2 == 1 && (i == half || j == half || k == half) {
            continue;
        }
        let o = (i >= half) as usize * 4 + (j >= half) as usize * 2 + (k >= half) as usize;
        octants[o].0 += v;
        octants[o].1 += 1;
    }
    if total.1 == 0 {
        return Err(Error::AllPointsMasked);
    }
    let mean = total.0 / total.1 as f64;
    let means: Vec<f64> = octants.iter().filter(|o| o.1 > 0).map(|o| o.0 / o.1 as f64).collect();
    let spread = if means.len() > 1 && mean > 0.0 {
        let m = means.iter().sum::<f64>() / means.len() as f64;
        let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
        var.sqrt() / m
    } else {
        0.0
    };
    Ok((mean, spread))
}

/// Effective speed as the argmax over `cs` of the spatially averaged `|ℐ|²` at the
/// virtual guide star.
pub fn estimate_effective_speed(
    corr: &CorrelationSet,
    t_g: f64,
    cs: &[f64],
    lattice: &AveragingLattice,
    array: &SensorArray,
) -> Result<EffectiveSpeedEstimate> {
    if !(t_g > 0.0) || cs.is_empty() || cs.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::InvalidInput("effective speed needs t_g > 0 and positive speeds".into()));
    }
    let n_avg = lattice.count();
    if n_avg < MIN_AVERAGING {
        return Err(Error::InsufficientAveraging { count: n_avg });
    }
    let per_speed: Vec<(f64, f64)> = cs
        .iter()
        .map(|&c| averaged_power(corr, array, lattice, virtual_guide_point(t_g, c), c))
        .collect::<Result<_>>()?;
    let (profile, octant_spread): (Vec<f64>, Vec<f64>) = per_speed.into_iter().unzip();
    if profile.iter().all(|&v| v == 0.0) {
        return Err(Error::InsufficientSignal);
    }
    let mut best = 0;
    for (i, &v) in profile.iter().enumerate() {
        if v > profile[best] {
            best = i;
        }
    }
    Ok(EffectiveSpeedEstimate {
        c_eff_hat: cs[best],
        cs: cs.to_vec(),
        profile,
        l: lattice.l,
        t_g,
        n_avg,
        octant_spread,
    })
}

/// Profiles for a sequence of cube sides, reported to judge whether `l` is large enough.
pub fn effective_speed_convergence(
    corr: &CorrelationSet,
    t_g: f64,
    cs: &[f64],
    sides: &[f64],
    epsilon: f64,
    array: &SensorArray,
) -> Result<Vec<EffectiveSpeedEstimate>> {
    sides
        .iter()
        .map(|&l| estimate_effective_speed(corr, t_g, cs, &AveragingLattice::new(l, epsilon)?, array))
        .collect()
}

/// Everything a Monte-Carlo trial needs besides its seed.
#[derive(Debug, Clone)]
pub struct MonteCarloConfig {
    pub noise: NoiseModel,
    pub medium: Medium,
    pub z_r: Vec3,
    pub array: SensorArray,
    pub omega: UniformGrid,
    pub tau: UniformGrid,
    pub grid: SearchGrid,
    pub c0: f64,
    pub n_sources: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub seed: u64,
    pub c_hat: f64,
    pub z_hat_est: Vec3,
    pub z_hat_true: Vec3,
    pub errors: LocalizationErrors,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Root mean square deviation from the true value.
    pub rmse: f64,
}

pub fn summarize(samples: &[f64], truth: f64) -> SummaryRow {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let variance =
        if samples.len() > 1 { samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    let rmse = (samples.iter().map(|x| (x - truth).powi(2)).sum::<f64>() / n).sqrt();
    SummaryRow { mean, variance, rmse }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloStats {
    pub trials: Vec<TrialResult>,
    /// `(quantity, summary)` in a fixed order.
    pub rows: Vec<(&'static str, SummaryRow)>,
}

impl MonteCarloStats {
    pub fn row(&self, name: &str) -> Option<SummaryRow> {
        self.rows.iter().find(|r| r.0 == name).map(|r| r.1)
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "quantity,mean,variance,rmse")?;
        for (name, r) in &self.rows {
            writeln!(w, "{name},{:e},{:e},{:e}", r.mean, r.variance, r.rmse)?;
        }
        Ok(())
    }

    pub fn write_trials_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "trial,seed,c_hat,z_est_x,z_est_y,z_est_z,z_true_x,z_true_y,z_true_z,E_r_est,E_c_est,E_r_true,E_c_true")?;
        for (i, t) in self.trials.iter().enumerate() {
            let (a, b) = (t.z_hat_est, t.z_hat_true);
            let (e, f) = (t.errors.estimated_speed, t.errors.true_speed);
            writeln!(
                w,
                "{i},{},{},{},{},{},{},{},{},{:e},{:e},{:e},{:e}",
                t.seed,
                t.c_hat,
                a.x(),
                a.y(),
                a.z(),
                b.x(),
                b.y(),
                b.z(),
                e.e_r,
                e.e_c,
                f.e_r,
                f.e_c
            )?;
        }
        Ok(())
    }
}

/// One trial: sample sources, correlate, estimate, score.
pub fn run_trial(config: &MonteCarloConfig, seed: u64) -> Result<TrialResult> {
    let sources = sample_sources(&config.noise, config.n_sources, seed)?;
    let corr = empirical_correlation(
        &sources,
        &config.medium,
        &config.noise,
        &config.array,
        &config.omega,
        &config.tau,
        config.c0,
    )?;
    let est = estimate_reflector_and_speed(&corr, &config.grid, &config.array)?;
    let z_true = est.location_at_speed(&config.grid, config.c0)?;
    Ok(TrialResult {
        seed,
        c_hat: est.c_hat,
        z_hat_est: est.z_hat,
        z_hat_true: z_true,
        errors: localization_errors(est.z_hat, z_true, config.z_r)?,
    })
}

/// Runs one trial per seed and summarizes speed and localization errors.
pub fn montecarlo_harness(config: &MonteCarloConfig, seeds: &[u64]) -> Result<MonteCarloStats> {
    if seeds.len() < 2 {
        return Err(Error::InvalidInput(format!("Monte-Carlo needs at least 2 trials, got {}", seeds.len())));
    }
    let trials: Vec<TrialResult> = seeds
        .par_iter()
        .enumerate()
        .map(|(index, &seed)| run_trial(config, seed).map_err(|e| Error::TrialFailed { index, source: Box::new(e) }))
        .collect::<Result<_>>()?;
    let col = |f: &dyn Fn(&TrialResult) -> f64| trials.iter().map(f).collect::<Vec<f64>>();
    let rows = vec![
        ("c_hat", summarize(&col(&|t| t.c_hat), config.c0)),
        ("E_r_est", summarize(&col(&|t| t.errors.estimated_speed.e_r), 0.0)),
        ("E_r_true", summarize(&col(&|t| t.errors.true_speed.e_r), 0.0)),
        ("E_c_est", summarize(&col(&|t| t.errors.estimated_speed.e_c), 0.0)),
        ("E_c_true", summarize(&col(&|t| t.errors.true_speed.e_c), 0.0)),
    ];
    Ok(MonteCarloStats { trials, rows })
}

/// Seeds `base, base+1, …` for `n` trials.
pub fn trial_seeds(base: u64, n: usize) -> Vec<u64> {
    (0..n as u64).map(|i| base.wrapping_add(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_estimate_has_zero_errors() {
        let z = Vec3::new(-5.0, 0.0, 50.0);
        let e = error_pair(z, z).unwrap();
        assert_eq!((e.e_r, e.e_c), (0.0, 0.0));
        assert!((e.e_r_printed - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_range_offset() {
        let z = Vec3::new(-5.0, 0.0, 50.0);
        let e = error_pair(z * 1.01, z).unwrap();
        assert!((e.e_r - 0.01).abs() < 1e-14);
        assert!(e.e_c < 1e-7);
    }

    #[test]
    fn cross_range_offset() {
        let z = Vec3::new(0.0, 0.0, 50.0);
        let e = error_pair(z + Vec3::new(0.5, 0.0, 0.0), z).unwrap();
        assert!(e.e_r.abs() < 1e-15);
        assert!((e.e_c - 0.01).abs() < 1e-15);
    }

    #[test]
    fn guide_point_example() {
        assert_eq!(virtual_guide_point(50.0, 1.2), Vec3::new(0.0, 0.0, 60.0));
        assert_eq!(virtual_guide_point(0.0, 1.2), Vec3::ZERO);
    }

    #[test]
    fn lattice_counts() {
        for (l, n) in [(1.0, 27), (2.0, 125), (4.0, 729), (20.0, 68921)] {
            assert_eq!(AveragingLattice::new(l, 1.0).unwrap().count(), n);
        }
        let g = AveragingLattice::new(1.0, 2.0).unwrap().axis(10.0);
        assert_eq!((g.start, g.step, g.len), (9.0, 1.0, 3));
    }

    #[test]
    fn summary_identity() {
        let x = [1.02, 0.98, 1.05, 1.01, 0.97];
        let s = summarize(&x, 1.0);
        let n = x.len() as f64;
        let bias = s.mean - 1.0;
        assert!((s.rmse.powi(2) - (s.variance * (n - 1.0) / n + bias * bias)).abs() < 1e-15);
        let same = summarize(&[1.1, 1.1], 1.0);
        assert_eq!(same.variance, 0.0);
    }
}
