//! Run configuration: a sectioned TOML file plus `--set section.key=value`
//! overrides (overrides win). Unknown keys are rejected everywhere so a typo
//! cannot silently fall back to a default.

use serde::Deserialize;
use std::path::Path;

/// Physical parameters of the resonator, in the units selected on the
/// command line.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonatorConfig {
    pub omega0: f64,
    pub gamma: f64,
    #[serde(default)]
    pub gamma3: f64,
    #[serde(default)]
    pub kerr: f64,
    pub mass: f64,
    #[serde(default)]
    pub temperature: f64,
}

/// Pump drive shared by every command that needs one.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub omega_p: f64,
    pub p: f64,
    #[serde(default)]
    pub phi_p: f64,
}

/// Frequency sweep for the steady-state command.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadyConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    /// Number of sweep points; 0 emits a header-only file.
    pub n_omega: usize,
}

/// Boundary tracing range for the bifurcation command.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BifurcationConfig {
    pub p_max: f64,
    #[serde(default = "default_boundary_n")]
    pub n: usize,
}

fn default_boundary_n() -> usize {
    200
}

/// Grid and integrator settings for the basin command.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasinsConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    #[serde(default = "default_basin_n")]
    pub n_re: usize,
    #[serde(default = "default_basin_n")]
    pub n_im: usize,
    #[serde(default = "default_basin_dt")]
    pub dt: f64,
    #[serde(default = "default_basin_t_max")]
    pub t_max: f64,
}

fn default_basin_n() -> usize {
    200
}
fn default_basin_dt() -> f64 {
    0.2
}
fn default_basin_t_max() -> f64 {
    2000.0
}

/// Which steady branch an operation works on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchName {
    Low,
    High,
    Saddle,
}

/// Analytic spectrum output, optionally with a Monte Carlo estimate.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default = "default_branch_low")]
    pub branch: BranchName,
    #[serde(default)]
    pub phi_lo: f64,
    /// Upper edge of the emitted frequency axis; 0 selects an automatic
    /// range covering the resonance structure.
    #[serde(default)]
    pub omega_max: f64,
    #[serde(default = "default_spectrum_n")]
    pub n_omega: usize,
    /// Adds Monte Carlo estimate and error-bar columns (requires --seed).
    #[serde(default)]
    pub mc: bool,
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
    #[serde(default = "default_segment_len")]
    pub segment_len: usize,
    #[serde(default = "default_discard")]
    pub discard: usize,
    #[serde(default = "default_segments_per_traj")]
    pub segments_per_traj: usize,
    /// Simulation step; 0 selects the automatic `0.01 / max |lambda|`.
    #[serde(default)]
    pub dt: f64,
}

fn default_branch_low() -> BranchName {
    BranchName::Low
}
fn default_spectrum_n() -> usize {
    401
}
fn default_n_traj() -> usize {
    256
}
fn default_segment_len() -> usize {
    1024
}
fn default_discard() -> usize {
    2048
}
fn default_segments_per_traj() -> usize {
    1
}

/// Detection-phase policy for the sensitivity sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiPolicyConfig {
    /// Minimize the spectral gain factor (best mass resolution).
    OptimalG,
    /// Sit on the squeezing axis (minimal output noise).
    OptimalPmin,
    /// A fixed detection phase in radians.
    Fixed(f64),
}

impl<'de> Deserialize<'de> for PhiPolicyConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(PhiPolicyConfig::Fixed(x)),
            Raw::Word(w) => match w.as_str() {
                "optimal-g" => Ok(PhiPolicyConfig::OptimalG),
                "optimal-pmin" => Ok(PhiPolicyConfig::OptimalPmin),
                other => Err(serde::de::Error::custom(format!(
                    "phi_policy must be \"optimal-g\", \"optimal-pmin\" or a number, got {other:?}"
                ))),
            },
        }
    }
}

/// Mass-resolution sweep over pump frequency.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_omega: usize,
    #[serde(default = "default_branch_low")]
    pub branch: BranchName,
    #[serde(default = "default_phi_policy")]
    pub phi_policy: PhiPolicyConfig,
    /// Measurement window.
    pub tau: f64,
}

fn default_phi_policy() -> PhiPolicyConfig {
    PhiPolicyConfig::OptimalG
}

/// Initial condition of a stochastic run: a named branch or an explicit
/// point in the complex-amplitude plane.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum InitConfig {
    Branch(BranchName),
    Point([f64; 2]),
}

/// Langevin simulation settings.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default = "default_one")]
    pub n_traj: usize,
    /// Simulation step; 0 selects the automatic `0.01 / max |lambda|`.
    #[serde(default)]
    pub dt: f64,
    pub t_max: f64,
    #[serde(default = "default_one")]
    pub record_every: usize,
    #[serde(default = "default_init")]
    pub init: InitConfig,
    /// Detection phases for the summary statistics; defaults to four phases
    /// anchored at the squeezing axis.
    #[serde(default)]
    pub phi_lo: Option<Vec<f64>>,
    /// How many trajectories to write into the CSV dump.
    #[serde(default = "default_one")]
    pub dump_trajectories: usize,
}

fn default_mode() -> String {
    "linearized".into()
}
fn default_one() -> usize {
    1
}
fn default_init() -> InitConfig {
    InitConfig::Branch(BranchName::Low)
}

/// The whole configuration file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub resonator: ResonatorConfig,
    pub drive: Option<DriveConfig>,
    pub steady: Option<SteadyConfig>,
    pub bifurcation: Option<BifurcationConfig>,
    pub basins: Option<BasinsConfig>,
    pub spectrum: Option<SpectrumConfig>,
    pub sensitivity: Option<SensitivityConfig>,
    pub simulate: Option<SimulateConfig>,
}

/// Loads a config file and applies `section.key=value` overrides on top.
pub fn load(path: &Path, overrides: &[String]) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut table: toml::Table =
        text.parse().map_err(|e| format!("config {}: {e}", path.display()))?;
    for ov in overrides {
        apply_override(&mut table, ov)?;
    }
    RunConfig::deserialize(table).map_err(|e| format!("config {}: {e}", path.display()))
}

/// Applies one `section.key=value` assignment; the value is parsed as TOML
/// and falls back to a bare string.
fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), String> {
    let (path, value) = assignment
        .split_once('=')
        .ok_or_else(|| format!("--set needs section.key=value, got {assignment:?}"))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| format!("--set key must be section.key, got {path:?}"))?;
    let parsed: toml::Value = match format!("v = {value}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(value.trim().to_string()),
    };
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let sub = entry
        .as_table_mut()
        .ok_or_else(|| format!("--set target {section:?} is not a table"))?;
    sub.insert(key.trim().to_string(), parsed);
    Ok(())
}
