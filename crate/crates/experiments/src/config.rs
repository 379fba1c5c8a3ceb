//! Experiment configuration: preset defaults, user overrides and validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{ExperimentError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Fig3Gfunc,
    Fig4Mismatch,
    Fig5Migration,
    Fig6SpeedCurve,
    Table1Montecarlo,
    Fig8RandomTheory,
    RandomEffectiveSpeed,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig3Gfunc,
        Preset::Fig4Mismatch,
        Preset::Fig5Migration,
        Preset::Fig6SpeedCurve,
        Preset::Table1Montecarlo,
        Preset::Fig8RandomTheory,
        Preset::RandomEffectiveSpeed,
        Preset::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3Gfunc => "fig3_gfunc",
            Preset::Fig4Mismatch => "fig4_mismatch",
            Preset::Fig5Migration => "fig5_migration",
            Preset::Fig6SpeedCurve => "fig6_speed_curve",
            Preset::Table1Montecarlo => "table1_montecarlo",
            Preset::Fig8RandomTheory => "fig8_random_theory",
            Preset::RandomEffectiveSpeed => "random_effective_speed",
            Preset::Custom => "custom",
        }
    }

    /// True for presets that only evaluate closed-form theory.
    pub fn is_theory(self) -> bool {
        matches!(self, Preset::Fig3Gfunc | Preset::Fig4Mismatch | Preset::Fig8RandomTheory)
    }

    /// True for presets built on the point-reflector scene.
    pub fn is_reflector_scene(self) -> bool {
        matches!(self, Preset::Fig5Migration | Preset::Fig6SpeedCurve | Preset::Table1Montecarlo | Preset::Custom)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
            ExperimentError::config("preset", format!("unknown preset `{s}`; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Omega2Gauss,
    Gaussian,
    GaussCos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub kind: SpectrumKind,
    pub omega0: Option<f64>,
    #[serde(rename = "B_H")]
    pub b_h: Option<f64>,
    #[serde(rename = "B0")]
    pub b0: Option<f64>,
    pub epsilon: Option<f64>,
    pub sigma: Option<f64>,
    pub nu0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Gaussian,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceParams {
    pub kind: DensityKind,
    pub center: Option<[f64; 3]>,
    pub scales: Option<[f64; 3]>,
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    /// Quadrature lattice counts over the source box.
    pub lattice: [usize; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayParams {
    pub n: usize,
    pub pitch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectorParams {
    pub position: [f64; 3],
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataParams {
    pub c0: f64,
    pub omega_step: f64,
    /// Upper end of the frequency grid; the spectrum's band limit when absent.
    pub omega_max: Option<f64>,
    pub tau_start: f64,
    pub tau_step: f64,
    pub tau_end: f64,
}

/// `[start, step, end]` with inclusive end.
pub type Range3 = [f64; 3];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchParams {
    pub r: [f64; 2],
    pub n_r: usize,
    pub theta_deg: [f64; 2],
    pub n_theta: usize,
    pub phi_deg: [f64; 2],
    pub n_phi: usize,
    pub psi_deg: f64,
    pub cs: Range3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowParams {
    pub half_width: f64,
    pub step: f64,
    pub cs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloParams {
    pub trials: usize,
    pub sources: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig3Params {
    pub reflector: [f64; 3],
    pub v: f64,
    pub xi1: [f64; 2],
    pub xi3: [f64; 2],
    pub n: usize,
    pub n_quad: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig4Params {
    pub a0: f64,
    pub omega0: f64,
    pub c0: f64,
    pub reflector: [f64; 3],
    pub cs: Vec<f64>,
    pub eta1: [f64; 2],
    pub n_eta1: usize,
    pub eta3: [f64; 2],
    pub n_eta3: usize,
    pub n_quad: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig5Params {
    pub array: ArrayParams,
    pub spectrum: SpectrumParams,
    pub sources: SourceParams,
    pub reflector: ReflectorParams,
    pub data: DataParams,
    pub window: WindowParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig6Params {
    pub array: ArrayParams,
    pub spectrum: SpectrumParams,
    pub sources: SourceParams,
    pub reflector: ReflectorParams,
    pub data: DataParams,
    pub search: SearchParams,
    pub n_quad: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Params {
    pub array: ArrayParams,
    pub spectrum: SpectrumParams,
    pub sources: SourceParams,
    pub reflector: ReflectorParams,
    pub data: DataParams,
    pub search: SearchParams,
    pub montecarlo: MonteCarloParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig8Params {
    pub a0: f64,
    pub c0: f64,
    pub t_g: f64,
    pub spectrum: SpectrumParams,
    pub cs: Range3,
    pub n_quad: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceKind {
    Gaussian,
    ExponentialSmooth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumParams {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub ell_c: f64,
    pub sigma2: f64,
    pub covariance: CovarianceKind,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AveragingParams {
    pub t_g: f64,
    /// Cube side in units of `epsilon`.
    pub l: f64,
    pub epsilon: f64,
    pub cs: Range3,
    /// Also report profiles for `l/4` and `l/2`.
    pub convergence: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomParams {
    pub array: ArrayParams,
    pub spectrum: SpectrumParams,
    pub sources: SourceParams,
    pub medium: MediumParams,
    pub data: DataParams,
    pub averaging: AveragingParams,
}

/// Default parameter tree of a preset. `null` marks an unset optional key.
pub fn preset_defaults(preset: Preset) -> Value {
    let array = json!({ "n": 5, "pitch": 5.0 });
    let omega2 = json!({ "kind": "omega2_gauss", "omega0": null, "B_H": null, "B0": null,
                         "epsilon": null, "sigma": null, "nu0": null });
    let sources = json!({ "kind": "gaussian", "center": [0.0, 0.0, -42.5], "scales": [500.0, 500.0, 10.0],
                          "lower": [-50.0, -50.0, -50.0], "upper": [50.0, 50.0, -35.0], "lattice": [101, 101, 16] });
    let reflector = json!({ "position": [-5.0, 0.0, 50.0], "strength": 0.01 });
    let data = json!({ "c0": 1.0, "omega_step": 0.02, "omega_max": 4.0,
                       "tau_start": 40.0, "tau_step": 0.05, "tau_end": 205.0 });
    match preset {
        Preset::Fig3Gfunc => json!({
            "reflector": [-5.0, 0.0, 50.0], "v": 1.1,
            "xi1": [-20.0, 20.0], "xi3": [-20.0, 20.0], "n": 161, "n_quad": 32
        }),
        Preset::Fig4Mismatch => json!({
            "a0": 20.0, "omega0": 4.0, "c0": 1.0, "reflector": [10.0, 0.0, 20.0 * 2f64.sqrt()],
            "cs": [0.8, 1.0, 1.2], "eta1": [-5.0, 5.0], "n_eta1": 101, "eta3": [-50.0, 50.0], "n_eta3": 201,
            "n_quad": 32
        }),
        Preset::Fig5Migration => json!({
            "array": array, "spectrum": omega2, "sources": sources, "reflector": reflector, "data": data,
            "window": { "half_width": 15.0, "step": 0.5, "cs": [0.8, 1.0, 1.2] }
        }),
        Preset::Fig6SpeedCurve => json!({
            "array": array, "spectrum": omega2, "sources": sources, "reflector": reflector, "data": data,
            "search": { "r": [30.0, 70.0], "n_r": 401, "theta_deg": [0.0, 12.0], "n_theta": 25,
                        "phi_deg": [-8.0, 8.0], "n_phi": 33, "psi_deg": 180.0, "cs": [0.7, 0.02, 1.3] },
            "n_quad": 32
        }),
        Preset::Table1Montecarlo => json!({
            "array": array, "spectrum": omega2, "sources": sources, "reflector": reflector, "data": data,
            "search": { "r": [40.0, 60.0], "n_r": 201, "theta_deg": [0.0, 12.0], "n_theta": 13,
                        "phi_deg": [-8.0, 8.0], "n_phi": 9, "psi_deg": 180.0, "cs": [0.9, 0.005, 1.1] },
            "montecarlo": { "trials": 10, "sources": 200 }
        }),
        Preset::Fig8RandomTheory => json!({
            "a0": 10.0, "c0": 1.0, "t_g": 50.0,
            "spectrum": { "kind": "gauss_cos", "omega0": 2.0, "B_H": 1.0, "B0": null,
                          "epsilon": null, "sigma": 0.3, "nu0": 10.0 },
            "cs": [0.9, 0.01, 1.1], "n_quad": 32
        }),
        Preset::RandomEffectiveSpeed => json!({
            "array": array,
            "spectrum": { "kind": "gaussian", "omega0": std::f64::consts::PI, "B_H": 0.5, "B0": null,
                          "epsilon": null, "sigma": 1.0, "nu0": null },
            "sources": { "kind": "uniform", "center": null, "scales": null,
                         "lower": [-40.0, -40.0, -20.5], "upper": [40.0, 40.0, -19.5], "lattice": [16, 16, 1] },
            "medium": { "lower": [-7.0, -7.0, 3.0], "upper": [7.0, 7.0, 17.0], "ell_c": 1.2, "sigma2": 0.01,
                        "covariance": "exponential_smooth", "spacing": 0.3 },
            "data": { "c0": 1.0, "omega_step": 0.05, "omega_max": null,
                      "tau_start": 0.0, "tau_step": 0.05, "tau_end": 55.0 },
            "averaging": { "t_g": 10.0, "l": 4.0, "epsilon": 2.0, "cs": [0.6, 0.1, 1.4], "convergence": true }
        }),
        Preset::Custom => {
            let mut tree = preset_defaults(Preset::Fig6SpeedCurve);
            nullify(&mut tree);
            tree
        }
    }
}

fn nullify(v: &mut Value) {
    match v {
        Value::Object(m) => m.values_mut().for_each(nullify),
        other => *other = Value::Null,
    }
}

/// Extra overrides applied by `--full`, restoring the paper's grids.
pub fn full_scale_overrides(preset: Preset) -> Value {
    let data = json!({ "omega_step": 0.005, "tau_step": 0.01, "tau_end": 300.0 });
    match preset {
        Preset::Fig5Migration => json!({ "data": data }),
        Preset::Fig6SpeedCurve => json!({ "data": data, "search": { "n_r": 300, "n_theta": 80, "n_phi": 80 } }),
        Preset::Table1Montecarlo => json!({
            "data": data,
            "search": { "n_r": 500, "n_theta": 100, "n_phi": 100 },
            "montecarlo": { "trials": 100, "sources": 500 }
        }),
        _ => json!({}),
    }
}

/// Keys that may stay `null` after merging.
const OPTIONAL_KEYS: [&str; 9] = ["omega0", "B_H", "B0", "epsilon", "sigma", "nu0", "omega_max", "center", "scales"];

/// Raw configuration as read from a file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Preset,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub full: bool,
    #[serde(default = "empty_object")]
    pub overrides: Value,
}

fn empty_object() -> Value {
    Value::Object(Map::new())
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        Self { preset, seed: None, output_dir: None, full: false, overrides: empty_object() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ExperimentError::config("<root>", e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::config("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn with_override(mut self, key: &str, value: Value) -> Self {
        if let Value::Object(m) = &mut self.overrides {
            m.insert(key.to_string(), value);
        }
        self
    }
}

/// Validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedConfig {
    pub preset: Preset,
    pub seed: u64,
    pub full: bool,
    pub output_dir: Option<PathBuf>,
    pub params: Value,
}

pub const DEFAULT_SEED: u64 = 1;

impl NormalizedConfig {
    /// Pretty JSON echo of the effective parameters.
    pub fn echo(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn typed<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.params.clone()).map_err(|e| ExperimentError::config(self.preset.name(), e.to_string()))
    }

    /// Value at a dotted key path.
    pub fn get(&self, path: &str) -> Option<&Value> {
        path.split('.').try_fold(&self.params, |v, k| v.get(k))
    }
}

/// Expands `{"a.b": 1}` into `{"a": {"b": 1}}`, recursively.
fn expand_dotted(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut out = Map::new();
            for (k, val) in m {
                let val = expand_dotted(val);
                let mut parts = k.split('.').rev();
                let last = parts.next().unwrap_or_default();
                let nested = parts.fold(json!({ last: val }), |acc, p| json!({ p: acc }));
                merge_into(&mut out, nested.as_object().cloned().unwrap_or_default());
            }
            Value::Object(out)
        }
        other => other.clone(),
    }
}

fn merge_into(dst: &mut Map<String, Value>, src: Map<String, Value>) {
    for (k, v) in src {
        match (dst.get_mut(&k), v) {
            (Some(Value::Object(d)), Value::Object(s)) => merge_into(d, s),
            (_, v) => {
                dst.insert(k, v);
            }
        }
    }
}

/// Merges `over` into `base`, rejecting keys absent from `base`.
fn merge_checked(base: &mut Value, over: &Value, path: &str) -> Result<()> {
    let Value::Object(over) = over else {
        return Err(ExperimentError::config(path_or_root(path), "overrides must be an object"));
    };
    let Value::Object(base) = base else {
        return Err(ExperimentError::config(path_or_root(path), "not a section"));
    };
    for (k, v) in over {
        let key_path = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
        match base.get_mut(k) {
            None => return Err(ExperimentError::config(key_path, "unknown key")),
            Some(slot @ Value::Object(_)) => {
                if v.is_object() {
                    merge_checked(slot, v, &key_path)?;
                } else {
                    return Err(ExperimentError::config(key_path, "expected a section object"));
                }
            }
            Some(slot) => {
                if v.is_object() {
                    return Err(ExperimentError::config(key_path, "expected a value, found a section"));
                }
                *slot = v.clone();
            }
        }
    }
    Ok(())
}

fn path_or_root(path: &str) -> String {
    if path.is_empty() {
        "<root>".into()
    } else {
        path.into()
    }
}

fn check_regime(v: &Value, path: &str) -> Result<()> {
    if let Value::Object(m) = v {
        let set = |k: &str| m.get(k).is_some_and(|x| !x.is_null());
        if set("B_H") && set("B0") {
            return Err(ExperimentError::config(
                path_or_root(path),
                "B_H (broadband) and B0 (narrowband) are mutually exclusive",
            ));
        }
        for (k, x) in m {
            let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
            check_regime(x, &p)?;
        }
    }
    Ok(())
}

fn missing_required(v: &Value, path: &str, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                missing_required(x, &p, out);
            }
        }
        Value::Null => {
            let leaf = path.rsplit('.').next().unwrap_or(path);
            if !OPTIONAL_KEYS.contains(&leaf) {
                out.push(path.to_string());
            }
        }
        _ => {}
    }
}

/// Fills defaults from the preset, applies `--full` and user overrides, and checks
/// keys, regimes and types.
pub fn validate_config(config: &ExperimentConfig) -> Result<NormalizedConfig> {
    let mut params = preset_defaults(config.preset);
    if config.full {
        merge_checked(&mut params, &full_scale_overrides(config.preset), "")?;
    }
    merge_checked(&mut params, &expand_dotted(&config.overrides), "")?;
    let mut missing = Vec::new();
    missing_required(&params, "", &mut missing);
    if !missing.is_empty() {
        return Err(ExperimentError::config(
            config.preset.name(),
            format!("missing required keys: {}", missing.join(", ")),
        ));
    }
    check_regime(&params, "")?;
    let normalized = NormalizedConfig {
        preset: config.preset,
        seed: config.seed.unwrap_or(DEFAULT_SEED),
        full: config.full,
        output_dir: config.output_dir.clone(),
        params,
    };
    check_types(&normalized)?;
    Ok(normalized)
}

fn check_types(cfg: &NormalizedConfig) -> Result<()> {
    match cfg.preset {
        Preset::Fig3Gfunc => cfg.typed::<Fig3Params>().map(drop),
        Preset::Fig4Mismatch => cfg.typed::<Fig4Params>().map(drop),
        Preset::Fig5Migration => cfg.typed::<Fig5Params>().map(drop),
        Preset::Fig6SpeedCurve | Preset::Custom => cfg.typed::<Fig6Params>().map(drop),
        Preset::Table1Montecarlo => cfg.typed::<Table1Params>().map(drop),
        Preset::Fig8RandomTheory => cfg.typed::<Fig8Params>().map(drop),
        Preset::RandomEffectiveSpeed => cfg.typed::<RandomParams>().map(drop),
    }
}

/// Typed parameters of a preset at its defaults.
pub fn preset_params<T: DeserializeOwned>(preset: Preset) -> Result<T> {
    validate_config(&ExperimentConfig::preset(preset))?.typed()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_named_preset_validates() {
        for p in Preset::ALL.into_iter().filter(|&p| p != Preset::Custom) {
            validate_config(&ExperimentConfig::preset(p)).unwrap();
            let full = ExperimentConfig { full: true, ..ExperimentConfig::preset(p) };
            validate_config(&full).unwrap();
        }
    }

    #[test]
    fn dotted_and_nested_overrides_agree() {
        let a = ExperimentConfig::preset(Preset::Fig5Migration).with_override("window.step", json!(0.25));
        let b = ExperimentConfig::preset(Preset::Fig5Migration).with_override("window", json!({ "step": 0.25 }));
        let (a, b) = (validate_config(&a).unwrap(), validate_config(&b).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.get("window.step"), Some(&json!(0.25)));
        assert_eq!(a.get("window.half_width"), Some(&json!(15.0)));
    }

    #[test]
    fn unknown_key_reports_path() {
        let cfg = ExperimentConfig::preset(Preset::Fig6SpeedCurve).with_override("search.n_rr", json!(3));
        match validate_config(&cfg) {
            Err(ExperimentError::ConfigInvalid { path, .. }) => assert_eq!(path, "search.n_rr"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_type_is_rejected() {
        let cfg = ExperimentConfig::preset(Preset::Fig5Migration).with_override("window.step", json!("fine"));
        assert!(matches!(validate_config(&cfg), Err(ExperimentError::ConfigInvalid { .. })));
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
            assert_eq!(serde_json::to_value(p).unwrap(), json!(p.name()));
        }
        assert!("fig9".parse::<Preset>().is_err());
    }
}
