//! Pipeline drivers. Each preset computes a typed result, then renders it to files.

use daylight_core::estimators::{
    effective_speed_convergence, estimate_from_image, montecarlo_harness, trial_seeds, EffectiveSpeedEstimate,
    GuideStarEstimate, MonteCarloConfig, MonteCarloStats,
};
use daylight_core::forward::{correlation_scattered, CorrelationSet, QuadratureSpec};
use daylight_core::geometry::{phi_v, tilt_cosines, ApertureShape, SensorArray, Vec3};
use daylight_core::migration::{axis_envelope, migrate_with, radial_envelope, ImageGrid, MigrationMode, SearchGrid};
use daylight_core::noise_medium::{
    Aabb, Bandwidth, Covariance, Envelope, Medium, NoiseModel, RandomMedium, SourceDensity, Spectrum,
};
use daylight_core::numerics::UniformGrid;
use daylight_core::psf::{
    bandwidth_warning, g_func, mismatch_peak, mismatch_profile, random_second_moment_profile, resolution_report,
    speed_curve_theory, MomentBox, ProfilePeak, PsfGeometry, RandomGeometry, ResolutionRegime,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::*;
use crate::error::{ExperimentError, Result, StageExt};

/// One output file held in memory until the run completes.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitted {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub files: Vec<Emitted>,
    /// Deterministic summary, also emitted as `summary.json`.
    pub summary: Value,
    pub warnings: Vec<String>,
}

impl RunOutput {
    fn push(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push(Emitted { name: name.into(), bytes });
    }
}

fn csv_bytes<R: Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let io = |e: csv::Error| ExperimentError::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| ExperimentError::Io(std::io::Error::other(e.to_string())))
}

fn core_bytes(f: impl FnOnce(&mut Vec<u8>) -> daylight_core::Result<()>, stage: &'static str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf).stage(stage)?;
    Ok(buf)
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

/// Inclusive `start:step:end` with values rounded to suppress accumulation noise.
pub fn range_values(r: Range3) -> Result<Vec<f64>> {
    let [start, step, end] = r;
    if !(step > 0.0 && end >= start) {
        return Err(ExperimentError::config("cs", format!("invalid range {start}:{step}:{end}")));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
}

fn linspace(lo: f64, hi: f64, n: usize, key: &str) -> Result<Vec<f64>> {
    match n {
        0 => Err(ExperimentError::config(key, "needs at least one sample")),
        1 => Ok(vec![lo]),
        _ => Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()),
    }
}

pub fn build_array(p: &ArrayParams) -> Result<SensorArray> {
    SensorArray::square_grid(p.n, p.pitch).stage("geometry")
}

fn require(v: Option<f64>, key: &str) -> Result<f64> {
    v.ok_or_else(|| ExperimentError::config(format!("spectrum.{key}"), "required for this spectrum kind"))
}

fn envelope_of(p: &SpectrumParams) -> Result<Envelope> {
    let sigma = require(p.sigma, "sigma")?;
    Ok(match p.kind {
        SpectrumKind::GaussCos => Envelope::GaussCos { sigma, nu0: require(p.nu0, "nu0")? },
        _ => Envelope::Gaussian { sigma },
    })
}

fn bandwidth_of(p: &SpectrumParams) -> Result<Bandwidth> {
    match (p.b_h, p.b0) {
        (Some(b_h), None) => Ok(Bandwidth::Broad { b_h }),
        (None, Some(b0)) => Ok(Bandwidth::Narrow { b0, epsilon: require(p.epsilon, "epsilon")? }),
        (None, None) => Err(ExperimentError::config("spectrum", "one of B_H or B0 is required")),
        (Some(_), Some(_)) => Err(ExperimentError::config("spectrum", "B_H and B0 are mutually exclusive")),
    }
}

pub fn build_spectrum(p: &SpectrumParams) -> Result<Spectrum> {
    match p.kind {
        SpectrumKind::Omega2Gauss => Ok(Spectrum::Omega2Gauss),
        _ => Ok(Spectrum::Shaped {
            envelope: envelope_of(p)?,
            omega0: require(p.omega0, "omega0")?,
            bandwidth: bandwidth_of(p)?,
        }),
    }
}

pub fn build_density(p: &SourceParams) -> Result<SourceDensity> {
    let bbox = Aabb::new(vec3(p.lower), vec3(p.upper)).stage("noise-medium")?;
    Ok(match p.kind {
        DensityKind::Uniform => SourceDensity::Uniform { bbox },
        DensityKind::Gaussian => SourceDensity::Gaussian {
            center: vec3(p.center.ok_or_else(|| ExperimentError::config("sources.center", "required"))?),
            scales: p.scales.ok_or_else(|| ExperimentError::config("sources.scales", "required"))?,
            bbox,
        },
    })
}

/// Everything needed to synthesize correlation data.
#[derive(Debug, Clone)]
pub struct Scene {
    pub array: SensorArray,
    pub noise: NoiseModel,
    pub medium: Medium,
    pub omega: UniformGrid,
    pub tau: UniformGrid,
    pub c0: f64,
    pub lattice: [usize; 3],
}

impl Scene {
    pub fn simulate(&self) -> Result<CorrelationSet> {
        let quad = QuadratureSpec::with_density_lattice(self.omega, &self.noise, self.lattice).stage("forward")?;
        correlation_scattered(&self.medium, &self.noise, &self.array, &quad, &self.tau, self.c0).stage("forward")
    }
}

fn grids(data: &DataParams, noise: &NoiseModel) -> Result<(UniformGrid, UniformGrid)> {
    let omega =
        UniformGrid::from_range(0.0, data.omega_step, data.omega_max.unwrap_or(noise.band.1)).stage("forward")?;
    let tau = UniformGrid::from_range(data.tau_start, data.tau_step, data.tau_end).stage("forward")?;
    Ok((omega, tau))
}

pub fn reflector_scene(
    array: &ArrayParams,
    spectrum: &SpectrumParams,
    sources: &SourceParams,
    reflector: &ReflectorParams,
    data: &DataParams,
) -> Result<Scene> {
    let noise = NoiseModel::new(build_spectrum(spectrum)?, build_density(sources)?);
    let (omega, tau) = grids(data, &noise)?;
    Ok(Scene {
        array: build_array(array)?,
        medium: Medium::point_reflector(vec3(reflector.position), reflector.strength).stage("noise-medium")?,
        noise,
        omega,
        tau,
        c0: data.c0,
        lattice: sources.lattice,
    })
}

pub fn random_scene(p: &RandomParams, seed: u64) -> Result<Scene> {
    let noise = NoiseModel::new(build_spectrum(&p.spectrum)?, build_density(&p.sources)?);
    let (omega, tau) = grids(&p.data, &noise)?;
    let m = &p.medium;
    let model = RandomMedium {
        domain: Aabb::new(vec3(m.lower), vec3(m.upper)).stage("noise-medium")?,
        ell_c: m.ell_c,
        sigma2: m.sigma2,
        covariance: match m.covariance {
            CovarianceKind::Gaussian => Covariance::Gaussian,
            CovarianceKind::ExponentialSmooth => Covariance::ExponentialSmooth,
        },
        realization_seed: seed,
        spacing: m.spacing,
    };
    Ok(Scene {
        array: build_array(&p.array)?,
        medium: Medium::random(model).stage("noise-medium")?,
        noise,
        omega,
        tau,
        c0: p.data.c0,
        lattice: p.sources.lattice,
    })
}

pub fn search_grid(p: &SearchParams) -> Result<SearchGrid> {
    let r = linspace(p.r[0], p.r[1], p.n_r, "search.n_r")?;
    let r = UniformGrid::new(r[0], if p.n_r > 1 { r[1] - r[0] } else { 1.0 }, p.n_r).stage("migration")?;
    let theta = linspace(p.theta_deg[0], p.theta_deg[1], p.n_theta, "search.n_theta")?;
    let phi = linspace(p.phi_deg[0], p.phi_deg[1], p.n_phi, "search.n_phi")?;
    SearchGrid::spherical(
        r,
        theta.into_iter().map(f64::to_radians).collect(),
        phi.into_iter().map(f64::to_radians).collect(),
        p.psi_deg.to_radians(),
        Vec3::ZERO,
        range_values(p.cs)?,
    )
    .stage("migration")
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let m = v.iter().cloned().fold(0.0, f64::max);
    v.iter().map(|x| if m > 0.0 { x / m } else { 0.0 }).collect()
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b })
}

// ---------------------------------------------------------------- fig3

#[derive(Debug, Clone)]
pub struct Fig3Result {
    pub alpha_r: f64,
    pub alpha_f: f64,
    pub xi1: Vec<f64>,
    pub xi3: Vec<f64>,
    /// `𝒢(ξ₁, 0, ξ₃, 0)` as `[re, im]`, `ξ₁` slowest.
    pub values: Vec<[f64; 2]>,
}

pub fn fig3(p: &Fig3Params) -> Result<Fig3Result> {
    let t = tilt_cosines(vec3(p.reflector), p.v).stage("psf-theory")?;
    let xi1 = linspace(p.xi1[0], p.xi1[1], p.n, "n")?;
    let xi3 = linspace(p.xi3[0], p.xi3[1], p.n, "n")?;
    let shape = ApertureShape::default();
    let values = xi1
        .iter()
        .flat_map(|&a| xi3.iter().map(move |&b| (a, b)))
        .map(|(a, b)| {
            let g = g_func(t.alpha_r, t.alpha_f, [a, 0.0, b, 0.0], &shape, p.n_quad);
            [g.re, g.im]
        })
        .collect();
    Ok(Fig3Result { alpha_r: t.alpha_r, alpha_f: t.alpha_f, xi1, xi3, values })
}

fn render_fig3(r: &Fig3Result) -> Result<RunOutput> {
    let rows = r
        .xi1
        .iter()
        .flat_map(|&a| r.xi3.iter().map(move |&b| (a, b)))
        .zip(&r.values)
        .map(|((a, b), v)| (a, b, v[0], v[1], v[0].hypot(v[1])));
    let mut out = RunOutput::default();
    out.push("gfunc.csv", csv_bytes(&["xi1", "xi3", "re", "im", "abs"], rows)?);
    out.summary = json!({ "alpha_r": r.alpha_r, "alpha_f": r.alpha_f, "n": r.xi1.len() });
    Ok(out)
}

// ---------------------------------------------------------------- fig4

#[derive(Debug, Clone)]
pub struct Fig4Result {
    pub cs: Vec<f64>,
    pub eta1: Vec<f64>,
    pub eta3: Vec<f64>,
    /// One profile per speed, `η₁` slowest.
    pub profiles: Vec<Vec<f64>>,
    pub peaks: Vec<ProfilePeak>,
    /// `𝒢(0, 0, 0, 0)`.
    pub origin: [f64; 2],
}

pub fn fig4_geometry(p: &Fig4Params) -> PsfGeometry {
    PsfGeometry {
        a0: p.a0,
        omega0: p.omega0,
        c0: p.c0,
        z_r: vec3(p.reflector),
        shape: ApertureShape::default(),
        n_quad: p.n_quad,
    }
}

pub fn fig4(p: &Fig4Params) -> Result<Fig4Result> {
    let geom = fig4_geometry(p);
    let eta1 = linspace(p.eta1[0], p.eta1[1], p.n_eta1, "n_eta1")?;
    let eta3 = linspace(p.eta3[0], p.eta3[1], p.n_eta3, "n_eta3")?;
    let mut profiles = Vec::new();
    let mut peaks = Vec::new();
    for &c in &p.cs {
        let mut prof = Vec::with_capacity(eta1.len() * eta3.len());
        for &a in &eta1 {
            for &b in &eta3 {
                prof.push(mismatch_profile(&geom, a, b, c).stage("psf-theory")?);
            }
        }
        profiles.push(prof);
        peaks.push(mismatch_peak(&geom, c).stage("psf-theory")?);
    }
    let g0 = g_func(1.0, 1.0, [0.0; 4], &geom.shape, p.n_quad);
    Ok(Fig4Result { cs: p.cs.clone(), eta1, eta3, profiles, peaks, origin: [g0.re, g0.im] })
}

fn render_fig4(r: &Fig4Result) -> Result<RunOutput> {
    let mut rows = Vec::new();
    for (c, prof) in r.cs.iter().zip(&r.profiles) {
        let pts = r.eta1.iter().flat_map(|&a| r.eta3.iter().map(move |&b| (a, b)));
        rows.extend(pts.zip(prof).map(|((a, b), v)| (*c, a, b, *v)));
    }
    let mut out = RunOutput::default();
    out.push("mismatch_profiles.csv", csv_bytes(&["cs", "eta1", "eta3", "value"], rows)?);
    let peaks = r.cs.iter().zip(&r.peaks).map(|(c, p)| (*c, p.value, p.eta1, p.eta3));
    out.push("mismatch_peaks.csv", csv_bytes(&["cs", "peak", "eta1", "eta3"], peaks)?);
    out.summary = json!({
        "origin": r.origin,
        "peaks": r.cs.iter().zip(&r.peaks).map(|(c, p)| json!({ "cs": c, "value": p.value })).collect::<Vec<_>>(),
    });
    Ok(out)
}

// ---------------------------------------------------------------- fig5

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FocusCheck {
    pub cs: f64,
    pub predicted: [f64; 3],
    pub peak: [f64; 3],
    pub peak_value: f64,
    /// Offsets of the envelope peak from the predicted focus.
    pub transverse_offset: f64,
    pub range_offset: f64,
    pub cross_range_resolution: f64,
    pub range_resolution: f64,
}

impl FocusCheck {
    pub fn within_resolution(&self) -> bool {
        self.transverse_offset <= self.cross_range_resolution && self.range_offset <= self.range_resolution
    }
}

#[derive(Debug, Clone)]
pub struct Fig5Result {
    pub grid: SearchGrid,
    pub image: ImageGrid,
    pub foci: Vec<FocusCheck>,
}

pub fn fig5(p: &Fig5Params) -> Result<Fig5Result> {
    let scene = reflector_scene(&p.array, &p.spectrum, &p.sources, &p.reflector, &p.data)?;
    let corr = scene.simulate()?;
    fig5_from_data(p, &scene, &corr)
}

/// Migration on the `y = 0` window around the reflector, with focus checks.
pub fn fig5_from_data(p: &Fig5Params, scene: &Scene, corr: &CorrelationSet) -> Result<Fig5Result> {
    let z_r = vec3(p.reflector.position);
    let w = &p.window;
    if !(w.step > 0.0 && w.half_width > 0.0) || w.cs.is_empty() {
        return Err(ExperimentError::config("window", "needs positive step and half_width and at least one speed"));
    }
    let n = (2.0 * w.half_width / w.step + 1e-9).floor() as usize + 1;
    let axis = |c: f64| UniformGrid::new(c - w.half_width, w.step, n).stage("migration");
    let grid = SearchGrid::lattice(axis(z_r.x())?, UniformGrid::new(0.0, 1.0, 1).stage("migration")?, axis(z_r.z())?, w.cs.clone())
        .stage("migration")?;
    let image = migrate_with(corr, &grid, &scene.array, MigrationMode::Discrete).stage("migration")?;
    let image = axis_envelope(&image, &grid, 2).stage("migration")?;
    let geom = PsfGeometry {
        a0: scene.array.a0,
        omega0: scene.noise.central_frequency(),
        c0: scene.c0,
        z_r,
        shape: scene.array.shape.clone(),
        n_quad: 32,
    };
    let res = resolution_report(
        &geom,
        scene.array.epsilon,
        ResolutionRegime::Broadband { b_h: scene.noise.effective_bandwidth() },
    )
    .stage("psf-theory")?;
    let mut foci = Vec::new();
    for (c, &cs) in w.cs.iter().enumerate() {
        let predicted = phi_v(z_r, cs / scene.c0).stage("geometry")?;
        let peak = image.peak_filtered(&grid, |_, k| k == c).ok_or(ExperimentError::Stage {
            stage: "migration",
            source: daylight_core::Error::AllPointsMasked,
        })?;
        let d = peak.point - predicted;
        foci.push(FocusCheck {
            cs,
            predicted: predicted.0,
            peak: peak.point.0,
            peak_value: peak.value,
            transverse_offset: d.x().hypot(d.y()),
            range_offset: d.z().abs(),
            cross_range_resolution: res.cross_range_2,
            range_resolution: res.range,
        });
    }
    Ok(Fig5Result { grid, image, foci })
}

fn render_fig5(r: &Fig5Result) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let env = r.image.envelope.as_ref().expect("envelope computed");
    for (c, &cs) in r.grid.cs.iter().enumerate() {
        let rows = (0..r.image.n_points).map(|p| {
            let z = r.grid.point(p);
            let i = c * r.image.n_points + p;
            (z.x(), z.z(), r.image.values[i], env[i], r.image.masked[i] as u8)
        });
        out.push(format!("image_cs{cs}.csv"), csv_bytes(&["x", "z", "value", "envelope", "masked"], rows)?);
    }
    out.push("image.bin", core_bytes(|b| r.image.write_binary(b), "migration")?);
    let rows = r.foci.iter().map(|f| {
        (
            f.cs,
            f.predicted[0],
            f.predicted[2],
            f.peak[0],
            f.peak[2],
            f.transverse_offset,
            f.range_offset,
            f.cross_range_resolution,
            f.range_resolution,
        )
    });
    let header = [
        "cs",
        "predicted_x",
        "predicted_z",
        "peak_x",
        "peak_z",
        "transverse_offset",
        "range_offset",
        "cross_range_resolution",
        "range_resolution",
    ];
    out.push("foci.csv", csv_bytes(&header, rows)?);
    out.summary = json!({ "foci": r.foci });
    Ok(out)
}

// ---------------------------------------------------------------- fig6 and custom

#[derive(Debug, Clone)]
pub struct Fig6Result {
    pub cs: Vec<f64>,
    /// Peak-normalized numerical curve.
    pub phi1: Vec<f64>,
    /// Peak-normalized theory curve.
    pub phi2: Vec<f64>,
    pub peak_phi1: f64,
    pub peak_phi2: f64,
    pub pearson: f64,
    pub estimate: GuideStarEstimate,
}

/// Algorithm 1 on dense-mode migration over the spherical search grid.
pub fn guide_star_estimate(corr: &CorrelationSet, grid: &SearchGrid, array: &SensorArray) -> Result<GuideStarEstimate> {
    let image = migrate_with(corr, grid, array, MigrationMode::Dense).stage("migration")?;
    let image = radial_envelope(&image, grid).stage("migration")?;
    estimate_from_image(image, grid).stage("estimators")
}

pub fn fig6(p: &Fig6Params) -> Result<Fig6Result> {
    let scene = reflector_scene(&p.array, &p.spectrum, &p.sources, &p.reflector, &p.data)?;
    let corr = scene.simulate()?;
    fig6_from_data(p, &scene, &corr)
}

pub fn fig6_from_data(p: &Fig6Params, scene: &Scene, corr: &CorrelationSet) -> Result<Fig6Result> {
    let grid = search_grid(&p.search)?;
    let estimate = guide_star_estimate(corr, &grid, &scene.array)?;
    let phi1 = normalized(&estimate.speed_curve());
    let geom = PsfGeometry {
        a0: scene.array.a0,
        omega0: 1.0,
        c0: scene.c0,
        z_r: vec3(p.reflector.position),
        shape: scene.array.shape.clone(),
        n_quad: p.n_quad,
    };
    let phi2: Vec<f64> = grid
        .cs
        .iter()
        .map(|&c| speed_curve_theory(&geom, &scene.noise.spectrum, c))
        .collect::<daylight_core::Result<_>>()
        .stage("psf-theory")?;
    let phi2 = normalized(&phi2);
    Ok(Fig6Result {
        peak_phi1: grid.cs[argmax(&phi1)],
        peak_phi2: grid.cs[argmax(&phi2)],
        pearson: pearson(&phi1, &phi2),
        cs: grid.cs.clone(),
        phi1,
        phi2,
        estimate,
    })
}

fn estimate_json(e: &GuideStarEstimate) -> Value {
    json!({ "c_hat": e.c_hat, "z_hat": e.z_hat.0, "peak_value": e.peak_value })
}

fn render_fig6(r: &Fig6Result) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let rows = r.cs.iter().zip(&r.phi1).zip(&r.phi2).map(|((c, a), b)| (*c, *a, *b));
    out.push("speed_curve.csv", csv_bytes(&["cs", "phi1", "phi2"], rows)?);
    out.summary = json!({
        "peak_phi1": r.peak_phi1,
        "peak_phi2": r.peak_phi2,
        "pearson": r.pearson,
        "estimate": estimate_json(&r.estimate),
    });
    Ok(out)
}

fn render_estimate(e: &GuideStarEstimate, grid: &SearchGrid) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let curve = e.speed_curve();
    out.push("speed_curve.csv", csv_bytes(&["cs", "envelope_max"], grid.cs.iter().zip(&curve).map(|(c, v)| (*c, *v)))?);
    out.push("image.bin", core_bytes(|b| e.image.write_binary(b), "migration")?);
    out.summary = estimate_json(e);
    Ok(out)
}

// ---------------------------------------------------------------- table1

pub fn montecarlo_config(p: &Table1Params) -> Result<MonteCarloConfig> {
    let scene = reflector_scene(&p.array, &p.spectrum, &p.sources, &p.reflector, &p.data)?;
    Ok(MonteCarloConfig {
        noise: scene.noise,
        medium: scene.medium,
        z_r: vec3(p.reflector.position),
        array: scene.array,
        omega: scene.omega,
        tau: scene.tau,
        grid: search_grid(&p.search)?,
        c0: scene.c0,
        n_sources: p.montecarlo.sources,
    })
}

pub fn table1(p: &Table1Params, seed: u64) -> Result<MonteCarloStats> {
    let cfg = montecarlo_config(p)?;
    montecarlo_harness(&cfg, &trial_seeds(seed, p.montecarlo.trials)).stage("estimators")
}

fn render_table1(s: &MonteCarloStats) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    out.push("table1.csv", core_bytes(|b| s.write_csv(b), "estimators")?);
    out.push("trials.csv", core_bytes(|b| s.write_trials_csv(b), "estimators")?);
    let rows: serde_json::Map<String, Value> = s
        .rows
        .iter()
        .map(|(k, r)| (k.to_string(), json!({ "mean": r.mean, "variance": r.variance, "rmse": r.rmse })))
        .collect();
    out.summary = json!({ "trials": s.trials.len(), "rows": rows });
    Ok(out)
}

// ---------------------------------------------------------------- fig8

#[derive(Debug, Clone)]
pub struct Fig8Result {
    pub cs: Vec<f64>,
    pub moment: Vec<f64>,
    pub bounds: MomentBox,
    pub peak_cs: f64,
}

pub fn fig8(p: &Fig8Params) -> Result<Fig8Result> {
    let geom = RandomGeometry {
        a0: p.a0,
        omega0: require(p.spectrum.omega0, "omega0")?,
        c0: p.c0,
        t_g: p.t_g,
        shape: ApertureShape::default(),
        n_quad: p.n_quad,
    };
    let b_h = p.spectrum.b_h.ok_or_else(|| ExperimentError::config("spectrum.B_H", "required"))?;
    let cs = range_values(p.cs)?;
    let (moment, bounds) =
        random_second_moment_profile(&geom, &envelope_of(&p.spectrum)?, b_h, &cs).stage("psf-theory")?;
    Ok(Fig8Result { peak_cs: cs[argmax(&moment)], cs, moment, bounds })
}

fn render_fig8(r: &Fig8Result) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let norm = normalized(&r.moment);
    let rows = r.cs.iter().zip(&r.moment).zip(&norm).map(|((c, m), n)| (*c, *m, *n));
    out.push("second_moment.csv", csv_bytes(&["cs", "second_moment", "normalized"], rows)?);
    out.summary = json!({
        "peak_cs": r.peak_cs,
        "box": { "transverse": r.bounds.transverse, "range": r.bounds.range },
    });
    Ok(out)
}

// ---------------------------------------------------------------- random effective speed

#[derive(Debug, Clone)]
pub struct RandomResult {
    /// One estimate per cube side, increasing.
    pub estimates: Vec<EffectiveSpeedEstimate>,
}

impl RandomResult {
    pub fn final_estimate(&self) -> &EffectiveSpeedEstimate {
        self.estimates.last().expect("at least one cube side")
    }
}

fn cube_sides(a: &AveragingParams) -> Vec<f64> {
    if a.convergence {
        vec![a.l / 4.0, a.l / 2.0, a.l]
    } else {
        vec![a.l]
    }
}

pub fn random_effective_speed(p: &RandomParams, seed: u64) -> Result<RandomResult> {
    let scene = random_scene(p, seed)?;
    let corr = scene.simulate()?;
    random_from_data(p, &scene, &corr)
}

pub fn random_from_data(p: &RandomParams, scene: &Scene, corr: &CorrelationSet) -> Result<RandomResult> {
    let a = &p.averaging;
    let cs = range_values(a.cs)?;
    let estimates = effective_speed_convergence(corr, a.t_g, &cs, &cube_sides(a), a.epsilon, &scene.array)
        .stage("estimators")?;
    Ok(RandomResult { estimates })
}

fn render_random(r: &RandomResult) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    for e in &r.estimates {
        out.push(format!("effective_speed_l{}.csv", e.l), core_bytes(|b| e.write_csv(b), "estimators")?);
    }
    let per_l: Vec<Value> = r
        .estimates
        .iter()
        .map(|e| json!({ "l": e.l, "n_avg": e.n_avg, "c_eff_hat": e.c_eff_hat }))
        .collect();
    out.summary = json!({ "c_eff_hat": r.final_estimate().c_eff_hat, "convergence": per_l });
    Ok(out)
}

// ---------------------------------------------------------------- dispatch

fn spectrum_warnings(p: &SpectrumParams) -> Vec<String> {
    match (p.b_h, p.omega0) {
        (Some(b), Some(w0)) => bandwidth_warning(b, w0).into_iter().collect(),
        _ => Vec::new(),
    }
}

/// Runs the configured preset.
pub fn run(cfg: &NormalizedConfig) -> Result<RunOutput> {
    let out = match cfg.preset {
        Preset::Fig3Gfunc => render_fig3(&fig3(&cfg.typed()?)?)?,
        Preset::Fig4Mismatch => render_fig4(&fig4(&cfg.typed()?)?)?,
        Preset::Fig5Migration => render_fig5(&fig5(&cfg.typed()?)?)?,
        Preset::Fig6SpeedCurve => render_fig6(&fig6(&cfg.typed()?)?)?,
        Preset::Table1Montecarlo => render_table1(&table1(&cfg.typed()?, cfg.seed)?)?,
        Preset::Fig8RandomTheory => {
            let p: Fig8Params = cfg.typed()?;
            let mut out = render_fig8(&fig8(&p)?)?;
            out.warnings.extend(spectrum_warnings(&p.spectrum));
            out
        }
        Preset::RandomEffectiveSpeed => {
            let p: RandomParams = cfg.typed()?;
            let mut out = render_random(&random_effective_speed(&p, cfg.seed)?)?;
            out.warnings.extend(spectrum_warnings(&p.spectrum));
            out
        }
        Preset::Custom => {
            let p: Fig6Params = cfg.typed()?;
            let (_, corr, grid, array) = custom_inputs(&p)?;
            render_estimate(&guide_star_estimate(&corr, &grid, &array)?, &grid)?
        }
    };
    Ok(out)
}

fn custom_inputs(p: &Fig6Params) -> Result<(Scene, CorrelationSet, SearchGrid, SensorArray)> {
    let scene = reflector_scene(&p.array, &p.spectrum, &p.sources, &p.reflector, &p.data)?;
    let corr = scene.simulate()?;
    let grid = search_grid(&p.search)?;
    let array = scene.array.clone();
    Ok((scene, corr, grid, array))
}

pub fn full_scale_warning(preset: Preset) -> String {
    format!("full-scale grids requested for {preset}; expect runtimes of hours rather than minutes")
}

/// Forward data for any preset with a data model.
pub fn simulate(cfg: &NormalizedConfig) -> Result<(Scene, CorrelationSet)> {
    let scene = match cfg.preset {
        Preset::Fig5Migration => {
            let p: Fig5Params = cfg.typed()?;
            reflector_scene(&p.array, &p.spectrum, &p.sources, &p.reflector, &p.data)?
        }
        Preset::Fig6SpeedCurve | Preset::Custom => {
            let p: Fig6Params = cfg.typed()?;
            reflector_scene(&p.array, &p.spectrum, &p.sources, &p.reflector, &p.data)?
        }
        Preset::Table1Montecarlo => {
            let p: Table1Params = cfg.typed()?;
            reflector_scene(&p.array, &p.spectrum, &p.sources, &p.reflector, &p.data)?
        }
        Preset::RandomEffectiveSpeed => random_scene(&cfg.typed()?, cfg.seed)?,
        other => return Err(ExperimentError::config("preset", format!("{other} has no forward data model"))),
    };
    let corr = scene.simulate()?;
    Ok((scene, corr))
}

pub fn render_correlations(corr: &CorrelationSet) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    out.push("correlations.bin", core_bytes(|b| corr.write_to(b), "forward")?);
    out.summary = json!({
        "sensors": corr.n_sensors(),
        "lags": corr.tau.len,
        "tau_start": corr.tau.start,
        "tau_step": corr.tau.step,
        "max_abs": corr.max_abs(),
    });
    Ok(out)
}

fn search_params(cfg: &NormalizedConfig) -> Result<(SearchParams, ArrayParams)> {
    match cfg.preset {
        Preset::Fig6SpeedCurve | Preset::Custom => {
            let p: Fig6Params = cfg.typed()?;
            Ok((p.search, p.array))
        }
        Preset::Table1Montecarlo => {
            let p: Table1Params = cfg.typed()?;
            Ok((p.search, p.array))
        }
        other => Err(ExperimentError::config("preset", format!("{other} has no spherical search grid"))),
    }
}

/// Migration of given correlation data over the preset's search grid.
pub fn migrate_data(cfg: &NormalizedConfig, corr: &CorrelationSet) -> Result<RunOutput> {
    let (search, array) = search_params(cfg)?;
    let grid = search_grid(&search)?;
    let array = build_array(&array)?;
    let image = migrate_with(corr, &grid, &array, MigrationMode::Dense).stage("migration")?;
    let image = radial_envelope(&image, &grid).stage("migration")?;
    let mut out = RunOutput::default();
    out.push("image.bin", core_bytes(|b| image.write_binary(b), "migration")?);
    let peak = image.peak(&grid);
    out.summary = json!({
        "points": image.n_points,
        "speeds": image.n_speeds,
        "peak": peak.map(|p| json!({ "point": p.point.0, "cs": p.cs, "value": p.value })),
    });
    Ok(out)
}

/// Algorithm 1 on given (or freshly simulated) data.
pub fn estimate(cfg: &NormalizedConfig, corr: Option<&CorrelationSet>) -> Result<RunOutput> {
    let (search, array) = search_params(cfg)?;
    let grid = search_grid(&search)?;
    let array = build_array(&array)?;
    let owned;
    let corr = match corr {
        Some(c) => c,
        None => {
            owned = simulate(cfg)?.1;
            &owned
        }
    };
    render_estimate(&guide_star_estimate(corr, &grid, &array)?, &grid)
}

/// Algorithm 2 on given (or freshly simulated) data.
pub fn estimate_effective(cfg: &NormalizedConfig, corr: Option<&CorrelationSet>) -> Result<RunOutput> {
    if cfg.preset != Preset::RandomEffectiveSpeed {
        return Err(ExperimentError::config("preset", "estimate-effective needs the random_effective_speed preset"));
    }
    let p: RandomParams = cfg.typed()?;
    let result = match corr {
        Some(c) => {
            let a = &p.averaging;
            let estimates = effective_speed_convergence(
                c,
                a.t_g,
                &range_values(a.cs)?,
                &cube_sides(a),
                a.epsilon,
                &build_array(&p.array)?,
            )
            .stage("estimators")?;
            RandomResult { estimates }
        }
        None => random_effective_speed(&p, cfg.seed)?,
    };
    render_random(&result)
}

/// Theory curves of the closed-form presets.
pub fn psf(cfg: &NormalizedConfig) -> Result<RunOutput> {
    if !cfg.preset.is_theory() {
        return Err(ExperimentError::config("preset", format!("{} is not a theory preset", cfg.preset)));
    }
    run(cfg)
}
