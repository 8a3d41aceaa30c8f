use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use tracelab::capacity::CapacitySpec;
use tracelab::wavelet::ScheduleSearch;
use tracelab::wavelet::{WaveletSpec, DEFAULT_RESOLUTION};
use tracelab::CapacityModel;

use crate::error::CliError;

/// `q` as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QValue(pub f64);

impl Default for QValue {
    fn default() -> Self {
        Self(f64::INFINITY)
    }
}

impl Serialize for QValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for QValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Self(v)),
            Raw::Str(s) if s.eq_ignore_ascii_case("inf") => Ok(Self(f64::INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("q must be a number or \"inf\", got {s:?}"))),
        }
    }
}

/// Which experiment `tracelab experiment` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Scaling additivity of a product capacity.
    Additivity,
    /// Exponents of traces of the saturating function.
    SaturatingShift,
    /// Lower bound on exponents of traces of generic members.
    UpperBound,
    /// Spectrum of traces of a perturbed generic member.
    PrevalentSpectrum,
}

impl ExperimentKind {
    /// Claim tag written to the manifest.
    pub fn claim(self) -> &'static str {
        match self {
            Self::Additivity => "prop-2.13",
            Self::SaturatingShift => "prop-5.5",
            Self::UpperBound => "thm-1.8",
            Self::PrevalentSpectrum => "thm-1.11",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    #[default]
    Saturating,
    Random,
    /// A random member plus a random combination of the probe fields.
    Perturbed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    pub kind: FieldKind,
    /// Integrability index of the probe construction.
    pub p: usize,
    /// Explicit probe weights; drawn uniformly from `[-beta_range, beta_range]` when absent.
    pub betas: Option<Vec<f64>>,
    pub beta_range: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { kind: FieldKind::Saturating, p: 1, betas: None, beta_range: 1.0 }
    }
}

/// Offset-schedule search knobs; unset values keep the library defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub window_max: Option<usize>,
    pub grid_log2: Option<u32>,
    pub coarse_log2: Option<u32>,
    pub alpha_min: Option<f64>,
    pub budget: Option<usize>,
    pub finalists: Option<usize>,
    /// Resolution of the independent re-check.
    pub recertify_log2: Option<u32>,
    /// Load a schedule from this file instead of searching.
    pub file: Option<PathBuf>,
}

impl ScheduleConfig {
    pub fn search(&self, seed: u64) -> ScheduleSearch {
        let d = ScheduleSearch::default();
        ScheduleSearch {
            window_max: self.window_max.unwrap_or(d.window_max),
            grid_log2: self.grid_log2.unwrap_or(d.grid_log2),
            coarse_log2: self.coarse_log2.unwrap_or(d.coarse_log2),
            alpha_min: self.alpha_min.unwrap_or(d.alpha_min),
            budget: self.budget.unwrap_or(d.budget),
            finalists: self.finalists.unwrap_or(d.finalists),
            seed,
        }
    }
}

/// Pass/fail thresholds. Defaults match the acceptance targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest `|τ_ξ − τ_μ − τ_ν|`.
    pub additivity: f64,
    /// Largest `|ĥ − (h_μ(x) + h_ν^r)|` for a pair to count as a hit.
    pub exponent: f64,
    /// Required share of hits.
    pub hit_fraction: f64,
    /// Allowed undershoot of `ĥ_μ(x) + h_ν^min`.
    pub lower_bound: f64,
    /// Largest spectrum deviation.
    pub spectrum: f64,
    /// Share of the predicted support, centred, on which spectra are compared.
    pub support_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            additivity: 1e-10,
            exponent: 0.15,
            hit_fraction: 0.8,
            lower_bound: 0.15,
            spectrum: 0.2,
            support_fraction: 0.8,
        }
    }
}

fn default_max_level() -> u32 {
    16
}

fn default_wavelet() -> String {
    "db4".into()
}

fn default_resolution() -> u32 {
    DEFAULT_RESOLUTION
}

fn default_mu() -> String {
    "mu".into()
}

fn default_nu() -> String {
    "nu".into()
}

fn default_samples() -> usize {
    20
}

/// One JSON file drives every subcommand; each reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<ExperimentKind>,
    /// Named capacity definitions.
    #[serde(default)]
    pub capacities: BTreeMap<String, CapacitySpec>,
    /// Names of the `x`-side and `a`-side capacities.
    #[serde(default = "default_mu")]
    pub mu: String,
    #[serde(default = "default_nu")]
    pub nu: String,
    #[serde(default = "default_wavelet")]
    pub wavelet: String,
    #[serde(default = "default_resolution")]
    pub resolution: u32,
    #[serde(default)]
    pub q: QValue,
    #[serde(default = "default_max_level")]
    pub max_level: u32,
    #[serde(default)]
    pub r_list: Vec<f64>,
    /// Trace points per `r`, or members, or replicates, depending on the command.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Regression levels `[j_min, j_max]`; `[6, J − 2]` when absent.
    #[serde(default)]
    pub fit_window: Option<(u32, u32)>,
    /// Explicit evaluation points `x`.
    #[serde(default)]
    pub points: Option<Vec<f64>>,
    /// Explicit trace heights `a`; sampled from `ν_r` when absent.
    #[serde(default)]
    pub trace_points: Option<Vec<f64>>,
    /// Level of the `q` grid for scaling tables; default depends on the model.
    #[serde(default)]
    pub level: Option<u32>,
    #[serde(default)]
    pub q_grid: Option<(f64, f64, f64)>,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Trace or field files read by `leaders` and `spectrum`.
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("every field has a default")
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for name in self.capacities.keys() {
            self.capacity(name)?;
        }
        if let Some((lo, hi)) = self.fit_window {
            if lo >= hi || hi > self.max_level {
                return Err(CliError::Config(format!("fit window [{lo}, {hi}] not inside [0, {}]", self.max_level)));
            }
        }
        if !(self.q.0 >= 1.0) {
            return Err(CliError::Config(format!("q = {} must be at least 1", self.q.0)));
        }
        if self.samples == 0 {
            return Err(CliError::Config("samples must be positive".into()));
        }
        let t = &self.tolerances;
        if [t.additivity, t.exponent, t.lower_bound, t.spectrum].iter().any(|v| !(*v >= 0.0)) {
            return Err(CliError::Config("tolerances must be nonnegative".into()));
        }
        if !(t.hit_fraction >= 0.0 && t.hit_fraction <= 1.0 && t.support_fraction > 0.0 && t.support_fraction <= 1.0) {
            return Err(CliError::Config("fractions must lie in [0, 1]".into()));
        }
        if let Some((lo, hi, step)) = self.q_grid {
            if !(lo < hi && step > 0.0) {
                return Err(CliError::Config(format!("bad q grid ({lo}, {hi}, {step})")));
            }
        }
        Ok(())
    }

    pub fn capacity(&self, name: &str) -> Result<CapacityModel, CliError> {
        let spec = self
            .capacities
            .get(name)
            .ok_or_else(|| CliError::Config(format!("capacity {name:?} is not defined")))?;
        spec.build(&self.capacities).map_err(|e| CliError::Config(format!("capacity {name:?}: {e}")))
    }

    pub fn mu(&self) -> Result<CapacityModel, CliError> {
        self.capacity(&self.mu)
    }

    pub fn nu(&self) -> Result<CapacityModel, CliError> {
        self.capacity(&self.nu)
    }

    /// `ξ = μ ⊗ ν`.
    pub fn xi(&self) -> Result<CapacityModel, CliError> {
        Ok(CapacityModel::product(self.mu()?, self.nu()?))
    }

    pub fn wavelet(&self) -> Result<WaveletSpec, CliError> {
        WaveletSpec::daubechies(&self.wavelet, self.resolution).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn window(&self) -> (u32, u32) {
        self.fit_window.unwrap_or_else(|| tracelab::analysis::default_window(self.max_level))
    }

    pub fn q_grid(&self) -> Vec<f64> {
        match self.q_grid {
            Some((lo, hi, step)) => tracelab::numeric::arange(lo, hi, step),
            None => tracelab::capacity::default_q_grid(),
        }
    }

    pub fn r_list(&self) -> Vec<f64> {
        if self.r_list.is_empty() {
            vec![0.0]
        } else {
            self.r_list.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_accepts_inf_and_numbers() {
        let c = ExperimentConfig::from_json(r#"{"q": "inf"}"#).unwrap();
        assert!(c.q.0.is_infinite());
        let c = ExperimentConfig::from_json(r#"{"q": 2.5}"#).unwrap();
        assert_eq!(c.q.0, 2.5);
        assert!(ExperimentConfig::from_json(r#"{"q": "big"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"q": 0.5}"#).is_err());
        assert_eq!(serde_json::to_string(&QValue(f64::INFINITY)).unwrap(), "\"inf\"");
    }

    #[test]
    fn capacities_resolve_by_name() {
        let c = ExperimentConfig::from_json(
            r#"{"capacities": {"mu": {"kind": "binomial", "p0": 0.25},
                                "nu": {"kind": "auxiliary", "base": {"kind": "ref", "name": "mu"}, "r": 0}}}"#,
        )
        .unwrap();
        assert_eq!(c.xi().unwrap().dim(), 2);
        assert_eq!(c.window(), (6, 14));
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad_weights = r#"{"capacities": {"mu": {"kind": "cascade", "weights": [0.2, 0.2]}}}"#;
        assert!(matches!(ExperimentConfig::from_json(bad_weights), Err(CliError::Config(_))));
        assert!(ExperimentConfig::from_json(r#"{"fit_window": [10, 4]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"unknown": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"tolerances": {"hit_fraction": 2}}"#).is_err());
    }
}
