//! Scenario files: the full set of inputs for a run, with unit conversion
//! from the dB/dBm/fraction form used at the boundary to the internal
//! SI/linear form.
//!
//! Scenarios are TOML documents with key-value sections; every key has a
//! built-in default, so the empty document is the default scenario.
//! Overrides of the form `section.key=value` patch individual keys on top
//! of a file (or on top of the defaults).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{
    build_config_set, ApPosition, LinkBudget, PhaseConfigSet, RisGeometry,
};
use crate::error::ModelError;
use crate::power::{DeviceEnergyProfile, FrameTiming};
use crate::sweep::ServiceAreaGrid;
use crate::units::{db_to_linear, dbm_to_watts};

/// Errors from loading or overriding a scenario.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario parse error: {0}")]
    Parse(#[from] toml::de::Error),

    #[error(transparent)]
    Invalid(#[from] ModelError),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("override '{0}' is not of the form section.key=value")]
    BadOverride(String),
}

/// Reflecting-surface setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RisSection {
    /// Elements along the x axis.
    pub n_x: usize,
    /// Elements along the z axis.
    pub n_z: usize,
    /// Number of reflecting-angle configurations.
    pub c_count: usize,
}

impl Default for RisSection {
    fn default() -> Self {
        Self {
            n_x: 10,
            n_z: 10,
            c_count: 2,
        }
    }
}

/// Link-budget constants, in the logarithmic units used at the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    /// Path loss at the reference distance, dB.
    pub beta0_db: f64,
    /// Noise power, dBm.
    pub sigma_w2_dbm: f64,
    /// Target SNR, dB.
    pub gamma_target_db: f64,
    /// Maximum transmit power, dBm.
    pub rho_max_dbm: f64,
    /// AP distance from the origin, meters.
    pub d_ap_m: f64,
    /// AP angle from the boresight, radians.
    pub theta_ap_rad: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            beta0_db: -52.0,
            sigma_w2_dbm: -94.0,
            gamma_target_db: 10.0,
            rho_max_dbm: 24.0,
            d_ap_m: 20.0,
            theta_ap_rad: FRAC_PI_4,
        }
    }
}

/// TDMA frame timing: block lengths as fractions of the coherence time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSection {
    /// Channel coherence time, seconds.
    pub t_c_s: f64,
    /// Training block, fraction of t_c.
    pub frac_t_t: f64,
    /// Access (data) block, fraction of t_c.
    pub frac_t_a: f64,
    /// Acknowledgement block, fraction of t_c.
    pub frac_t_ack: f64,
}

impl Default for FrameSection {
    fn default() -> Self {
        Self {
            t_c_s: 0.05,
            frac_t_t: 0.10,
            frac_t_a: 0.85,
            frac_t_ack: 0.05,
        }
    }
}

/// Device battery and power-draw constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergySection {
    /// Battery capacity, joules.
    pub e0_j: f64,
    /// Expected reporting period, seconds.
    pub t_r_s: f64,
    /// Static energy per frame, joules.
    pub e_s_j: f64,
    /// Circuit power in transmit mode, watts.
    pub p_c_w: f64,
    /// Receive-mode power, watts.
    pub p_rx_w: f64,
    /// Inverse PA efficiency, dimensionless, > 1.
    pub xi: f64,
}

impl Default for EnergySection {
    fn default() -> Self {
        Self {
            e0_j: 2500.0,
            t_r_s: 300.0,
            e_s_j: 1e-5,
            p_c_w: 1e-3,
            p_rx_w: 0.1,
            xi: 1.33,
        }
    }
}

/// Service-area extent and grid resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub d_min_m: f64,
    pub d_max_m: f64,
    pub theta_min_rad: f64,
    pub theta_max_rad: f64,
    pub n_d: usize,
    pub n_theta: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            d_min_m: 20.0,
            d_max_m: 100.0,
            theta_min_rad: 0.0,
            theta_max_rad: FRAC_PI_2,
            n_d: 256,
            n_theta: 256,
        }
    }
}

/// Value lists for the (N, C) sweep; the surface is square (N_x = N_z).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub n_x_values: Vec<usize>,
    pub c_values: Vec<usize>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            n_x_values: (2..=10).collect(),
            c_values: vec![2, 4, 8, 16],
        }
    }
}

/// Every input a run needs. The default value reproduces the reference
/// parameter set exactly.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub ris: RisSection,
    pub link: LinkSection,
    pub frame: FrameSection,
    pub energy: EnergySection,
    pub grid: GridSection,
    pub sweep: SweepSection,
}

impl Scenario {
    /// Load from TOML text and validate every downstream invariant.
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario = toml::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Load from an optional TOML file plus `section.key=value` overrides.
    /// Missing file text means "defaults"; overrides apply on top.
    pub fn from_sources(text: Option<&str>, overrides: &[String]) -> Result<Self, ScenarioError> {
        let mut table: toml::Table = match text {
            Some(t) => t.parse()?,
            None => toml::Table::new(),
        };
        for assignment in overrides {
            apply_override(&mut table, assignment)?;
        }
        let scenario: Scenario = toml::Value::Table(table).try_into()?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    /// Check that the converted scenario satisfies every model invariant.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.ris_geometry()?;
        self.config_set()?;
        self.link_budget()?;
        self.frame_timing()?;
        self.energy_profile()?;
        self.service_grid()?;
        if self.sweep.n_x_values.is_empty() {
            return Err(ModelError::EmptyList {
                name: "sweep.n_x_values",
            });
        }
        if self.sweep.c_values.is_empty() {
            return Err(ModelError::EmptyList {
                name: "sweep.c_values",
            });
        }
        for &n_x in &self.sweep.n_x_values {
            RisGeometry::new(n_x, n_x)?;
        }
        for &c in &self.sweep.c_values {
            build_config_set(c)?;
        }
        Ok(())
    }

    pub fn ris_geometry(&self) -> Result<RisGeometry, ModelError> {
        RisGeometry::new(self.ris.n_x, self.ris.n_z)
    }

    pub fn config_set(&self) -> Result<PhaseConfigSet, ModelError> {
        build_config_set(self.ris.c_count)
    }

    /// Convert the dB/dBm link fields to linear ratios and watts.
    pub fn link_budget(&self) -> Result<LinkBudget, ModelError> {
        let ap = ApPosition::new(self.link.d_ap_m, self.link.theta_ap_rad)?;
        LinkBudget::new(
            db_to_linear(self.link.beta0_db),
            dbm_to_watts(self.link.sigma_w2_dbm),
            ap,
            db_to_linear(self.link.gamma_target_db),
            dbm_to_watts(self.link.rho_max_dbm),
        )
    }

    /// Resolve the per-block lengths from the coherence-time fractions.
    pub fn frame_timing(&self) -> Result<FrameTiming, ModelError> {
        FrameTiming::new(
            self.frame.t_c_s,
            self.frame.frac_t_t * self.frame.t_c_s,
            self.frame.frac_t_a * self.frame.t_c_s,
            self.frame.frac_t_ack * self.frame.t_c_s,
        )
    }

    pub fn energy_profile(&self) -> Result<DeviceEnergyProfile, ModelError> {
        DeviceEnergyProfile::new(
            self.energy.e0_j,
            self.energy.t_r_s,
            self.energy.e_s_j,
            self.energy.p_c_w,
            self.energy.p_rx_w,
            self.energy.xi,
        )
    }

    pub fn service_grid(&self) -> Result<ServiceAreaGrid, ModelError> {
        ServiceAreaGrid::new(
            self.grid.d_min_m,
            self.grid.d_max_m,
            self.grid.theta_min_rad,
            self.grid.theta_max_rad,
            self.grid.n_d,
            self.grid.n_theta,
        )
    }
}

/// Load a scenario from TOML text.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    Scenario::from_toml(text)
}

/// Load a scenario from a file path.
pub fn load_scenario_file(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_toml(&text)
}

/// Patch one `section.key=value` override into a TOML table.
fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), ScenarioError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ScenarioError::BadOverride(assignment.to_string()))?;
    let segments: Vec<&str> = path.split('.').map(str::trim).collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(ScenarioError::BadOverride(assignment.to_string()));
    }
    let value = parse_value(raw.trim());

    let mut current = table;
    for segment in &segments[..segments.len() - 1] {
        current = current
            .entry(segment.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| ScenarioError::BadOverride(assignment.to_string()))?;
    }
    current.insert(segments[segments.len() - 1].to_string(), value);
    Ok(())
}

/// Parse the right-hand side of an override as a TOML value; anything that
/// does not parse is kept as a string and rejected later by the schema.
fn parse_value(raw: &str) -> toml::Value {
    let probe = format!("v = {raw}");
    match probe.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("probe table carries v"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}
