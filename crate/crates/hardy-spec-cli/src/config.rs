//! Run configuration (TOML). Unknown keys are rejected so typos surface as config errors.

use anyhow::{bail, Context, Result};
use hardy_spec::symbol::{ContinuityClass, SymbolDomain};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

/// Raised for anything wrong with the configuration itself; mapped to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub const BUNDLED: [(&str, &str); 5] = [
    ("constants", include_str!("../configs/constants.toml")),
    ("constants-shifted", include_str!("../configs/constants_shifted.toml")),
    ("quarter-cayley", include_str!("../configs/quarter_cayley.toml")),
    ("dilated", include_str!("../configs/dilated.toml")),
    ("disc-corner", include_str!("../configs/disc_corner.toml")),
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    #[default]
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    #[default]
    Sampled,
    Modal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    #[default]
    Uniform,
    GaussLaguerre,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Expected verdict; only the demo runner compares against it.
    #[serde(default)]
    pub expect: Expect,
    pub map: MapConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub plan: PlanConfig,
    #[serde(default)]
    pub predict: PredictConfig,
    #[serde(default)]
    pub spectra: Option<SpectraConfig>,
    #[serde(default)]
    pub crosscheck: CrossCheckConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub psi1: String,
    pub psi2: String,
    #[serde(default = "half")]
    pub eps: f64,
    #[serde(default = "one")]
    pub p1: f64,
    #[serde(default = "one")]
    pub p2: f64,
    #[serde(default)]
    pub domain: SymbolDomain,
    /// Inferred from the expression when absent.
    #[serde(default)]
    pub class1: Option<ContinuityClass>,
    #[serde(default)]
    pub class2: Option<ContinuityClass>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub model: Model,
    #[serde(default)]
    pub layout: Layout,
    #[serde(default = "ten")]
    pub extent: f64,
    #[serde(default = "one")]
    pub scale: f64,
    /// Nodes (sampled) or modes (modal) per axis.
    #[serde(default = "default_nodes")]
    pub nodes: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { model: Model::Sampled, layout: Layout::Uniform, extent: 10.0, scale: 1.0, nodes: default_nodes() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub target_delta: Option<f64>,
    #[serde(default)]
    pub orders: Option<[usize; 2]>,
    #[serde(default = "default_max_order")]
    pub max_order: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for PlanConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            target_delta: None,
            orders: None,
            max_order: default_max_order(),
            tol: default_tol(),
            samples: default_samples(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictConfig {
    /// Defaults to `8 / min Im` over the cluster points.
    #[serde(default)]
    pub t_max: Option<f64>,
    #[serde(default = "default_t_count")]
    pub t_count: usize,
    #[serde(default = "default_shell_samples")]
    pub samples_per_shell: usize,
}

impl Default for PredictConfig {
    fn default() -> Self {
        Self { t_max: None, t_count: default_t_count(), samples_per_shell: default_shell_samples() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectraConfig {
    pub re: [f64; 2],
    pub im: [f64; 2],
    #[serde(default = "default_resolution")]
    pub resolution: [usize; 2],
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    /// Nodes per axis for each surrogate size.
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    /// Negative control: added to every predicted point before the verdict.
    #[serde(default)]
    pub control_shift: [f64; 2],
    #[serde(default)]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossCheckConfig {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "default_cayley")]
    pub cayley_nodes: usize,
    #[serde(default = "default_modes")]
    pub modes: usize,
}

impl Default for CrossCheckConfig {
    fn default() -> Self {
        Self { enabled: true, cayley_nodes: default_cayley(), modes: default_modes() }
    }
}

fn default_seed() -> u64 {
    17
}
fn half() -> f64 {
    0.5
}
fn one() -> f64 {
    1.0
}
fn ten() -> f64 {
    10.0
}
fn yes() -> bool {
    true
}
fn default_nodes() -> usize {
    32
}
fn default_max_order() -> usize {
    60
}
fn default_tol() -> f64 {
    1e-6
}
fn default_samples() -> usize {
    4000
}
fn default_t_count() -> usize {
    64
}
fn default_shell_samples() -> usize {
    512
}
fn default_resolution() -> [usize; 2] {
    [65, 65]
}
fn default_eps() -> Vec<f64> {
    vec![1e-2]
}
fn default_sizes() -> Vec<usize> {
    vec![32, 48, 64]
}
fn default_cayley() -> usize {
    64
}
fn default_modes() -> usize {
    10
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!(ConfigError(format!("{name} must be positive (got {v})")));
    }
    Ok(())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// `builtin:NAME` selects a bundled config.
    pub fn load(path: &Path) -> Result<Self> {
        let s = path.to_string_lossy();
        if let Some(name) = s.strip_prefix("builtin:") {
            let Some((_, text)) = BUNDLED.iter().find(|(n, _)| *n == name) else {
                bail!(ConfigError(format!("no bundled config named '{name}'")));
            };
            return Self::parse(text);
        }
        let text =
            std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            bail!(ConfigError(format!("name '{}' must be a non-empty identifier", self.name)));
        }
        positive("map.eps", self.map.eps)?;
        positive("map.p1", self.map.p1)?;
        positive("map.p2", self.map.p2)?;
        positive("grid.extent", self.grid.extent)?;
        positive("grid.scale", self.grid.scale)?;
        positive("plan.tol", self.plan.tol)?;
        if self.grid.nodes < 2 {
            bail!(ConfigError("grid.nodes must be at least 2".into()));
        }
        if let Some(a) = self.plan.alpha {
            positive("plan.alpha", a)?;
        }
        if let Some(t) = self.predict.t_max {
            positive("predict.t_max", t)?;
        }
        if self.predict.t_count < 2 {
            bail!(ConfigError("predict.t_count must be at least 2".into()));
        }
        if let Some(s) = &self.spectra {
            if !(s.re[0] < s.re[1] && s.im[0] < s.im[1]) {
                bail!(ConfigError("spectra region bounds must be increasing".into()));
            }
            if s.eps.is_empty() {
                bail!(ConfigError("spectra.eps must list at least one level".into()));
            }
            for &e in &s.eps {
                positive("spectra.eps", e)?;
            }
            if let Some(t) = s.tol {
                positive("spectra.tol", t)?;
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of the effective configuration.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canon.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn class_of(expr: &str, given: Option<ContinuityClass>) -> ContinuityClass {
        given.unwrap_or(if expr.contains('z') {
            ContinuityClass::ContinuousOnClosure
        } else {
            ContinuityClass::Constant
        })
    }
}
