//! JSON run configuration. Unknown keys are rejected; the only
//! environment override is `SQG_OUTPUT_DIR`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sqg_core::init::InitialCondition;
use sqg_core::solver::{Scheme, SolverConfig};
use sqg_core::GridSpec;

use crate::error::CliError;

pub const CONFIG_VERSION: u32 = 1;
pub const OUTPUT_DIR_ENV: &str = "SQG_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "two")]
    pub dim: usize,
    pub n: usize,
    #[serde(default = "two_pi")]
    pub length: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    RandomHk { k_min: f64, k_max: f64, #[serde(default)] slope: f64, amplitude: f64 },
    GaussianVortices { count: usize, width: f64, amplitude: f64 },
    Shear { k: i64, amplitude: f64 },
}

impl From<&InitialConfig> for InitialCondition {
    fn from(c: &InitialConfig) -> Self {
        match *c {
            InitialConfig::RandomHk { k_min, k_max, slope, amplitude } => Self::RandomHk { k_min, k_max, slope, amplitude },
            InitialConfig::GaussianVortices { count, width, amplitude } => Self::GaussianVortices { count, width, amplitude },
            InitialConfig::Shear { k, amplitude } => Self::Shear { k, amplitude },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    #[default]
    Euler,
    Rk2,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    /// Defaults to the midpoint of the admissible window.
    pub c0: Option<f64>,
    /// Defaults to `0.99 · 4 / 2^{1/α}`.
    pub a: Option<f64>,
    /// Defaults to the library ladder.
    pub z_levels: Option<Vec<f64>>,
    /// Defaults to `c₀² a / 128`.
    pub shrink: Option<f64>,
    /// Levels `λ` for the truncated-energy check, as fractions of `sup|θ₀|`.
    #[serde(default)]
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "dot")]
    pub dir: PathBuf,
    #[serde(default = "run_prefix")]
    pub prefix: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: dot(), prefix: run_prefix() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub grid: GridConfig,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    #[serde(default = "one")]
    pub flow_scale: f64,
    #[serde(default)]
    pub scheme: SchemeName,
    #[serde(default = "one_usize")]
    pub snapshot_every: usize,
    pub initial: InitialConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn two() -> usize {
    2
}
fn two_pi() -> f64 {
    2.0 * PI
}
fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn dot() -> PathBuf {
    PathBuf::from(".")
}
fn run_prefix() -> String {
    "run".into()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config schema: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path` and applies the `SQG_OUTPUT_DIR` override.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("config schema: cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
            cfg.output.dir = PathBuf::from(dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != CONFIG_VERSION {
            return Err(CliError::Validation(format!("config schema: unsupported version {}", self.version)));
        }
        if self.diagnostics.levels.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(CliError::Validation("config schema: levels must lie in [0, 1]".into()));
        }
        if self.output.prefix.is_empty() || self.output.prefix.contains(['/', '\\']) {
            return Err(CliError::Validation("config schema: bad output prefix".into()));
        }
        self.solver_config()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        Ok(GridSpec::new(self.grid.dim, self.grid.n, self.grid.length, self.grid.alpha)?)
    }

    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let scheme = match self.scheme {
            SchemeName::Euler => Scheme::Euler,
            SchemeName::Rk2 => Scheme::Rk2,
        };
        Ok(SolverConfig::new(self.grid()?, self.dt, self.t_end, (&self.initial).into(), self.seed)?
            .with_flow_scale(self.flow_scale)?
            .with_scheme(scheme)
            .with_snapshot_every(self.snapshot_every))
    }

    pub fn output_path(&self, suffix: &str) -> PathBuf {
        self.output.dir.join(format!("{}_{suffix}", self.output.prefix))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "version": 1,
        "grid": {"n": 32, "alpha": 0.75},
        "dt": 0.01, "t_end": 0.1, "seed": 3,
        "initial": {"kind": "random_hk", "k_min": 1, "k_max": 4, "amplitude": 1}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.grid.dim, 2);
        assert_eq!(c.flow_scale, 1.0);
        assert_eq!(c.scheme, SchemeName::Euler);
        assert_eq!(c.output_path("norms.csv"), PathBuf::from("./run_norms.csv"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replace("\"seed\": 3", "\"seed\": 3, \"colour\": 1");
        assert!(matches!(RunConfig::parse(&bad), Err(CliError::Validation(_))));
        let bad = MINIMAL.replace("\"amplitude\": 1}", "\"amplitude\": 1, \"phase\": 0}");
        assert!(RunConfig::parse(&bad).is_err());
    }

    #[test]
    fn ranges_are_checked() {
        assert!(RunConfig::parse(&MINIMAL.replace("\"dt\": 0.01", "\"dt\": -1")).is_err());
        assert!(RunConfig::parse(&MINIMAL.replace("\"version\": 1", "\"version\": 2")).is_err());
        assert!(RunConfig::parse(&MINIMAL.replace("\"n\": 32", "\"n\": 30")).is_err());
    }
}
