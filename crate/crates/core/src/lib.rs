//! Deterministic coverage and energy simulator for an IoT uplink served
//! through a reconfigurable reflecting surface.
//!
//! The surface steers its reflection to one of a small quantized set of
//! angles. For every position of a polar service-area grid this crate
//! computes the transmit power a device needs to hit a target SNR under the
//! best available reflecting angle, flags positions whose required power
//! exceeds the device cap as outage, and converts the power into an
//! expected battery lifetime. Sweeps over the surface's element count and
//! configuration count aggregate area-weighted statistics.
//!
//! Modules:
//! - [`channel`]: quantized angle set, path loss, array factor, SNR
//! - [`power`]: required power, best-configuration selection, energy model
//! - [`sweep`]: service-area grid, map evaluation, (N, C) sweeps
//! - [`scenario`], [`units`], [`output`]: configuration files, dB/dBm
//!   conversion, CSV/JSON emission
//!
//! The `parallel` feature (on by default) evaluates grid cells with rayon.
//! Output is bit-identical with or without it, at any thread count.

pub mod channel;
pub mod error;
pub mod output;
pub mod power;
pub mod scenario;
pub mod sweep;
pub mod units;

pub use channel::{
    angular_resolution, array_factor, array_gain_closed_form, build_config_set, path_loss, snr,
    ApPosition, DevicePosition, LinkBudget, PhaseConfigSet, RisGeometry,
};
pub use error::ModelError;
pub use output::{emit_grid_csv, emit_summary, SummaryFormat};
pub use power::{
    best_config_power, energy_consumption, expected_battery_lifetime, required_power,
    DeviceEnergyProfile, FrameTiming, PowerResult,
};
pub use scenario::{load_scenario, load_scenario_file, Scenario, ScenarioError};
pub use sweep::{
    aggregate, evaluate_map, evaluate_map_sequential, sweep_n_c, CellResult, GridMap,
    ServiceAreaGrid, SweepSummary,
};
