//! JSON experiment configuration with defaults and parse-time validation.

use serde::{Deserialize, Serialize};

use crate::ansatz::VortexParams;
use crate::moyal::MoyalParams;
use crate::pde::{EvolutionConfig, StarBackend};
use crate::reduced::LatticeVariant;
use crate::spectral::GridSpec;

/// Failure to obtain a usable configuration. Every variant maps to exit code 2.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(String),
    #[error("malformed config: {0}")]
    Json(String),
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
}

fn bad(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 128, half_width: 8.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnsatzConfig {
    pub a: f64,
    pub omega: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "V")]
    pub velocity: f64,
    pub sigma: f64,
    pub m: u32,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        Self { a: 1.0, omega: 0.5, radius: 2.4, velocity: 0.0, sigma: 0.0, m: 1 }
    }
}

/// `"quadrature"` or `{"landau": M}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendConfig {
    Quadrature,
    Landau(usize),
}

impl From<BackendConfig> for StarBackend {
    fn from(b: BackendConfig) -> Self {
        match b {
            BackendConfig::Quadrature => StarBackend::Quadrature,
            BackendConfig::Landau(cutoff) => StarBackend::Landau { cutoff },
        }
    }
}

/// Initial datum of `evolve-pde`: `"ansatz"` or `{"phi": n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialConfig {
    Ansatz,
    Phi(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionSection {
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: usize,
    pub star_backend: BackendConfig,
    pub initial: InitialConfig,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        Self {
            dt: 0.005,
            t_end: 1.0,
            snapshot_every: 20,
            star_backend: BackendConfig::Quadrature,
            initial: InitialConfig::Ansatz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    #[serde(rename = "R_min")]
    pub r_min: f64,
    #[serde(rename = "R_max")]
    pub r_max: f64,
    pub steps: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { r_min: 1.0, r_max: 10.0, steps: 181 }
    }
}

/// Parameters of the `L⋆` pair tabulated by `pn-landscape`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PnConfig {
    pub a: f64,
    pub omega: f64,
    #[serde(rename = "V")]
    pub velocity: f64,
}

impl Default for PnConfig {
    fn default() -> Self {
        Self { a: 1.0, omega: 0.1, velocity: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FixedPointsConfig {
    pub n_max: usize,
}

impl Default for FixedPointsConfig {
    fn default() -> Self {
        Self { n_max: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReducedConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Write every `sample_every`-th step.
    pub sample_every: usize,
}

impl Default for ReducedConfig {
    fn default() -> Self {
        Self { dt: 0.01, t_end: 50.0, sample_every: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StationaryConfig {
    /// States `φ₀ … φ_{n_max}`, plus `P_{n_max}` and `W_{n_max}`.
    pub n_max: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub sigma_steps: usize,
}

impl Default for StationaryConfig {
    fn default() -> Self {
        Self { n_max: 4, sigma_min: -8.0, sigma_max: 8.0, sigma_steps: 161 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub theta: f64,
    pub variant: LatticeVariant,
    pub ansatz: AnsatzConfig,
    pub evolution: EvolutionSection,
    pub sweep: SweepConfig,
    pub pn: PnConfig,
    pub fixed_points: FixedPointsConfig,
    pub reduced: ReducedConfig,
    pub stationary: StationaryConfig,
    pub output_dir: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            theta: 1.0,
            variant: LatticeVariant::Charge1Quadratic,
            ansatz: AnsatzConfig::default(),
            evolution: EvolutionSection::default(),
            sweep: SweepConfig::default(),
            pn: PnConfig::default(),
            fixed_points: FixedPointsConfig::default(),
            reduced: ReducedConfig::default(),
            stationary: StationaryConfig::default(),
            output_dir: "output".to_string(),
        }
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(field, "must be positive and finite"))
    }
}

fn finite(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, "must be finite"))
    }
}

/// Parses and validates a JSON configuration; absent keys take their defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    /// Re-checks every numeric constraint, naming the offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.grid.n.is_multiple_of(2) {
            return Err(bad("grid.n", "n must be even"));
        }
        if self.grid.n < 8 {
            return Err(bad("grid.n", "must be at least 8"));
        }
        positive("grid.L", self.grid.half_width)?;
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(bad("theta", "must be positive and finite"));
        }

        let an = &self.ansatz;
        positive("ansatz.a", an.a)?;
        positive("ansatz.omega", an.omega)?;
        positive("ansatz.R", an.radius)?;
        finite("ansatz.V", an.velocity)?;
        finite("ansatz.sigma", an.sigma)?;
        if an.m == 0 {
            return Err(bad("ansatz.m", "charge must be at least 1"));
        }
        if self.grid.half_width < an.radius + 5.0 * an.omega {
            return Err(bad("ansatz.R", "grid.L must be at least R + 5 omega"));
        }

        let ev = &self.evolution;
        positive("evolution.dt", ev.dt)?;
        if !(ev.t_end.is_finite() && ev.t_end >= ev.dt) {
            return Err(bad("evolution.t_end", "must be finite and at least evolution.dt"));
        }
        if ev.snapshot_every == 0 {
            return Err(bad("evolution.snapshot_every", "must be at least 1"));
        }
        if ev.star_backend == BackendConfig::Landau(0) {
            return Err(bad("evolution.star_backend", "landau cutoff must be at least 1"));
        }

        let sw = &self.sweep;
        positive("sweep.R_min", sw.r_min)?;
        if !(sw.r_max.is_finite() && sw.r_max > sw.r_min) {
            return Err(bad("sweep.R_max", "must exceed sweep.R_min"));
        }
        if sw.steps < 2 {
            return Err(bad("sweep.steps", "must be at least 2"));
        }

        finite("pn.a", self.pn.a)?;
        positive("pn.omega", self.pn.omega)?;
        finite("pn.V", self.pn.velocity)?;

        if self.fixed_points.n_max == 0 {
            return Err(bad("fixed_points.n_max", "must be at least 1"));
        }

        positive("reduced.dt", self.reduced.dt)?;
        if !(self.reduced.t_end.is_finite() && self.reduced.t_end >= self.reduced.dt) {
            return Err(bad("reduced.t_end", "must be finite and at least reduced.dt"));
        }
        if self.reduced.sample_every == 0 {
            return Err(bad("reduced.sample_every", "must be at least 1"));
        }

        let st = &self.stationary;
        finite("stationary.sigma_min", st.sigma_min)?;
        if !(st.sigma_max.is_finite() && st.sigma_max > st.sigma_min) {
            return Err(bad("stationary.sigma_max", "must exceed stationary.sigma_min"));
        }
        if st.sigma_steps < 2 {
            return Err(bad("stationary.sigma_steps", "must be at least 2"));
        }
        if st.n_max == 0 {
            return Err(bad("stationary.n_max", "must be at least 1"));
        }
        if self.output_dir.is_empty() {
            return Err(bad("output_dir", "must not be empty"));
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec::new(self.grid.n, self.grid.half_width).expect("validated grid")
    }

    pub fn moyal(&self) -> MoyalParams {
        MoyalParams::new(self.theta).expect("validated theta")
    }

    pub fn vortex(&self) -> VortexParams {
        let a = &self.ansatz;
        VortexParams::new(a.a, a.omega, a.radius, a.velocity, a.sigma, a.m).expect("validated ansatz")
    }

    pub fn evolution_config(&self) -> EvolutionConfig {
        let e = &self.evolution;
        EvolutionConfig::new(e.dt, e.t_end, e.snapshot_every, self.moyal(), e.star_backend.into())
            .expect("validated evolution")
    }
}

/// Defaults as shown by `--help`.
pub const DEFAULTS_HELP: &str = "\
Config defaults (JSON keys; unknown keys are rejected):
  grid.n = 128, grid.L = 8
  theta = 1
  variant = \"charge1_quadratic\" | \"chargem_equispaced\"
  ansatz = {a: 1, omega: 0.5, R: 2.4, V: 0, sigma: 0, m: 1}
  evolution = {dt: 0.005, t_end: 1, snapshot_every: 20,
               star_backend: \"quadrature\" | {\"landau\": M}, initial: \"ansatz\" | {\"phi\": n}}
  sweep = {R_min: 1, R_max: 10, steps: 181}
  pn = {a: 1, omega: 0.1, V: 0}
  fixed_points = {n_max: 20}
  reduced = {dt: 0.01, t_end: 50, sample_every: 10}
  stationary = {n_max: 4, sigma_min: -8, sigma_max: 8, sigma_steps: 161}
  output_dir = \"output\"";
