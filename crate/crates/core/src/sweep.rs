//! Polar service-area grid, per-cell map evaluation, and (N, C) sweeps.
//!
//! The service area is discretized into an n_d × n_theta grid of annular
//! sector cells sampled at their centers; sampling cell centers keeps the
//! evaluation away from θ = π/2 where the required power is infinite. Each
//! cell records the best-configuration transmit power, the outage flag, and
//! the battery lifetime for covered cells. Aggregation weights cells by
//! their physical polar area.
//!
//! With the `parallel` feature (on by default) cells are evaluated with
//! rayon; results land in pre-assigned slots, so the output is bit-identical
//! to the sequential fallback for any thread count.

use crate::channel::{build_config_set, DevicePosition, LinkBudget, PhaseConfigSet, RisGeometry};
use crate::error::{require_nonnegative, ModelError};
use crate::power::{
    best_config_power, expected_battery_lifetime, DeviceEnergyProfile, FrameTiming,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use std::f64::consts::FRAC_PI_2;

/// Uniform polar discretization of the service area.
///
/// Cell centers sit at the midpoints of the uniform subdivisions:
/// d_i = d_min + (i + ½)·Δd and θ_j = θ_min + (j + ½)·Δθ, with the radial
/// index outer and the angular index inner in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceAreaGrid {
    /// Inner radius, meters.
    pub d_min_m: f64,
    /// Outer radius, meters.
    pub d_max_m: f64,
    /// Lower angle, radians.
    pub theta_min_rad: f64,
    /// Upper angle, radians.
    pub theta_max_rad: f64,
    /// Radial sample count.
    pub n_d: usize,
    /// Angular sample count.
    pub n_theta: usize,
}

impl ServiceAreaGrid {
    /// Build a grid over `[d_min, d_max] × [theta_min, theta_max]`. The
    /// ranges must be non-empty and lie inside the model's domain
    /// (nonnegative distances, angles within [0, π/2]).
    pub fn new(
        d_min_m: f64,
        d_max_m: f64,
        theta_min_rad: f64,
        theta_max_rad: f64,
        n_d: usize,
        n_theta: usize,
    ) -> Result<Self, ModelError> {
        require_nonnegative("d_min_m", d_min_m)?;
        if d_max_m <= d_min_m || d_max_m.is_nan() {
            return Err(ModelError::InvalidParameter {
                name: "d_max_m",
                constraint: "> d_min_m",
                value: d_max_m,
            });
        }
        require_nonnegative("theta_min_rad", theta_min_rad)?;
        if theta_max_rad <= theta_min_rad || theta_max_rad > FRAC_PI_2 || theta_max_rad.is_nan() {
            return Err(ModelError::InvalidParameter {
                name: "theta_max_rad",
                constraint: "> theta_min_rad and <= pi/2",
                value: theta_max_rad,
            });
        }
        if n_d < 1 {
            return Err(ModelError::InvalidCount {
                name: "n_d",
                constraint: ">= 1",
                value: n_d,
            });
        }
        if n_theta < 1 {
            return Err(ModelError::InvalidCount {
                name: "n_theta",
                constraint: ">= 1",
                value: n_theta,
            });
        }
        Ok(Self {
            d_min_m,
            d_max_m,
            theta_min_rad,
            theta_max_rad,
            n_d,
            n_theta,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.n_d * self.n_theta
    }

    fn radial_step(&self) -> f64 {
        (self.d_max_m - self.d_min_m) / self.n_d as f64
    }

    fn angular_step(&self) -> f64 {
        (self.theta_max_rad - self.theta_min_rad) / self.n_theta as f64
    }

    /// Center of cell (i, j) as (distance, angle).
    pub fn center(&self, radial: usize, angular: usize) -> (f64, f64) {
        (
            self.d_min_m + (radial as f64 + 0.5) * self.radial_step(),
            self.theta_min_rad + (angular as f64 + 0.5) * self.angular_step(),
        )
    }

    /// Physical area of cell (i, j): the polar element integrates to
    /// Δθ · (d_hi² − d_lo²) / 2 over an annular sector.
    pub fn cell_area(&self, radial: usize, angular: usize) -> Result<f64, ModelError> {
        if radial >= self.n_d || angular >= self.n_theta {
            return Err(ModelError::CellIndexOutOfRange {
                radial,
                angular,
                n_d: self.n_d,
                n_theta: self.n_theta,
            });
        }
        Ok(self.cell_area_unchecked(radial))
    }

    fn cell_area_unchecked(&self, radial: usize) -> f64 {
        let d_lo = self.d_min_m + radial as f64 * self.radial_step();
        let d_hi = self.d_min_m + (radial + 1) as f64 * self.radial_step();
        sector_area(d_lo, d_hi, self.angular_step())
    }

    /// Total physical area in closed form.
    pub fn total_area(&self) -> f64 {
        sector_area(
            self.d_min_m,
            self.d_max_m,
            self.theta_max_rad - self.theta_min_rad,
        )
    }
}

/// Area of an annular sector between radii `d_lo` and `d_hi` spanning
/// `delta_theta` radians.
fn sector_area(d_lo: f64, d_hi: f64, delta_theta: f64) -> f64 {
    delta_theta * (d_hi * d_hi - d_lo * d_lo) / 2.0
}

/// Per-cell outcome of a map evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellResult {
    /// Best-configuration transmit power, watts; infinite when no
    /// configuration can serve the cell.
    pub tx_power_w: f64,
    /// Expected battery lifetime, seconds; present iff the cell is covered.
    pub lifetime_s: Option<f64>,
    /// Zero-based index of the minimizing reflecting angle.
    pub best_angle_index: Option<usize>,
    /// True when the required power exceeds the transmit cap.
    pub outage: bool,
}

/// Dense map of per-cell results over a service-area grid, row-major with
/// the radial index outer.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMap {
    grid: ServiceAreaGrid,
    cells: Vec<CellResult>,
}

impl GridMap {
    pub fn grid(&self) -> &ServiceAreaGrid {
        &self.grid
    }

    /// All cells, row-major (radial outer, angular inner).
    pub fn cells(&self) -> &[CellResult] {
        &self.cells
    }

    pub fn cell(&self, radial: usize, angular: usize) -> &CellResult {
        &self.cells[radial * self.grid.n_theta + angular]
    }
}

/// Area-weighted aggregate of one map, keyed by the surface setup that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    /// Total element count N of the surface.
    pub n_total: usize,
    /// Number of reflecting-angle configurations C.
    pub config_count: usize,
    /// Area-weighted mean transmit power over covered cells, watts; absent
    /// when every cell is in outage.
    pub avg_tx_power_w: Option<f64>,
    /// Area-weighted mean battery lifetime over covered cells, seconds.
    pub avg_lifetime_s: Option<f64>,
    /// Percentage of the service-area physical area in outage.
    pub outage_area_pct: f64,
}

/// Evaluate the best-configuration power, outage flag, and battery lifetime
/// for every cell of the grid.
///
/// The output is deterministic: identical across runs, thread counts, and
/// the sequential fallback.
#[cfg(feature = "parallel")]
pub fn evaluate_map(
    grid: &ServiceAreaGrid,
    geom: &RisGeometry,
    cfg: &PhaseConfigSet,
    link: &LinkBudget,
    frame: &FrameTiming,
    profile: &DeviceEnergyProfile,
) -> GridMap {
    let cells = (0..grid.cell_count())
        .into_par_iter()
        .map(|index| evaluate_cell(index, grid, geom, cfg, link, frame, profile))
        .collect();
    GridMap {
        grid: grid.clone(),
        cells,
    }
}

/// Sequential build of [`evaluate_map`], used when the `parallel` feature is
/// disabled.
#[cfg(not(feature = "parallel"))]
pub fn evaluate_map(
    grid: &ServiceAreaGrid,
    geom: &RisGeometry,
    cfg: &PhaseConfigSet,
    link: &LinkBudget,
    frame: &FrameTiming,
    profile: &DeviceEnergyProfile,
) -> GridMap {
    evaluate_map_sequential(grid, geom, cfg, link, frame, profile)
}

/// Single-threaded map evaluation. Always available; produces output
/// bit-identical to [`evaluate_map`].
pub fn evaluate_map_sequential(
    grid: &ServiceAreaGrid,
    geom: &RisGeometry,
    cfg: &PhaseConfigSet,
    link: &LinkBudget,
    frame: &FrameTiming,
    profile: &DeviceEnergyProfile,
) -> GridMap {
    let cells = (0..grid.cell_count())
        .map(|index| evaluate_cell(index, grid, geom, cfg, link, frame, profile))
        .collect();
    GridMap {
        grid: grid.clone(),
        cells,
    }
}

fn evaluate_cell(
    index: usize,
    grid: &ServiceAreaGrid,
    geom: &RisGeometry,
    cfg: &PhaseConfigSet,
    link: &LinkBudget,
    frame: &FrameTiming,
    profile: &DeviceEnergyProfile,
) -> CellResult {
    let (d, theta) = grid.center(index / grid.n_theta, index % grid.n_theta);
    let pos = DevicePosition::new(d, theta).expect("grid centers lie in the model domain");
    let power = best_config_power(&pos, geom, cfg, link);
    let lifetime_s = if power.outage {
        None
    } else {
        Some(
            expected_battery_lifetime(power.tx_power_w, frame, profile)
                .expect("covered cells have finite power"),
        )
    };
    CellResult {
        tx_power_w: power.tx_power_w,
        lifetime_s,
        best_angle_index: power.best_angle_index,
        outage: power.outage,
    }
}

/// Collapse a map into area-weighted statistics. Averages run over covered
/// cells only; the outage fraction is reported separately as a percentage
/// of the physical area.
pub fn aggregate(map: &GridMap, n_total: usize, config_count: usize) -> SweepSummary {
    let grid = map.grid();
    let mut covered_area = 0.0;
    let mut outage_area = 0.0;
    let mut power_sum = 0.0;
    let mut lifetime_sum = 0.0;
    for radial in 0..grid.n_d {
        let area = grid.cell_area_unchecked(radial);
        for angular in 0..grid.n_theta {
            let cell = map.cell(radial, angular);
            if cell.outage {
                outage_area += area;
            } else {
                covered_area += area;
                power_sum += area * cell.tx_power_w;
                lifetime_sum += area * cell.lifetime_s.expect("covered cells carry a lifetime");
            }
        }
    }
    let total_area = covered_area + outage_area;
    let (avg_tx_power_w, avg_lifetime_s) = if covered_area > 0.0 {
        (
            Some(power_sum / covered_area),
            Some(lifetime_sum / covered_area),
        )
    } else {
        (None, None)
    };
    SweepSummary {
        n_total,
        config_count,
        avg_tx_power_w,
        avg_lifetime_s,
        outage_area_pct: 100.0 * outage_area / total_area,
    }
}

/// Evaluate one map per (N, C) pair over a square surface (N_x = N_z) and
/// aggregate each. Input lists are sorted and deduplicated; the output is
/// ordered by (C, N).
pub fn sweep_n_c(
    n_x_values: &[usize],
    c_values: &[usize],
    grid: &ServiceAreaGrid,
    link: &LinkBudget,
    frame: &FrameTiming,
    profile: &DeviceEnergyProfile,
) -> Result<Vec<SweepSummary>, ModelError> {
    let mut n_x_values = n_x_values.to_vec();
    n_x_values.sort_unstable();
    n_x_values.dedup();
    let mut c_values = c_values.to_vec();
    c_values.sort_unstable();
    c_values.dedup();

    let mut summaries = Vec::with_capacity(n_x_values.len() * c_values.len());
    for &config_count in &c_values {
        let cfg = build_config_set(config_count)?;
        for &n_x in &n_x_values {
            let geom = RisGeometry::new(n_x, n_x)?;
            let map = evaluate_map(grid, &geom, &cfg, link, frame, profile);
            summaries.push(aggregate(&map, geom.total(), config_count));
        }
    }
    Ok(summaries)
}
