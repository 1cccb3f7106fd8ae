//! Geometry and channel-gain model of the reflected uplink path.
//!
//! Devices and the access point live in polar coordinates around the center
//! of the reflecting surface: a distance from the origin and an angle from
//! the surface boresight. The channel gain towards the AP factors into a
//! total path loss (the two-hop distance attenuation with a cos²θ aperture
//! term) and the array factor of the surface's discrete elements. The
//! surface steers its reflection to one of a small set of quantized
//! reflecting angles.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{require_positive, ModelError};

/// Below this magnitude of sin(πΩ) the closed-form array gain switches to
/// its limit value; see [`array_gain_closed_form`].
const SIN_NULL_EPS: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Polar position of a device in the service area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevicePosition {
    /// Distance from the origin, meters. Strictly positive.
    pub distance_m: f64,
    /// Angle from the surface boresight, radians, in [0, π/2].
    pub angle_rad: f64,
}

impl DevicePosition {
    pub fn new(distance_m: f64, angle_rad: f64) -> Result<Self, ModelError> {
        require_positive("distance_m", distance_m)?;
        if !(0.0..=FRAC_PI_2).contains(&angle_rad) {
            return Err(ModelError::InvalidParameter {
                name: "angle_rad",
                constraint: "within [0, pi/2]",
                value: angle_rad,
            });
        }
        Ok(Self {
            distance_m,
            angle_rad,
        })
    }
}

/// Polar position of the access point.
///
/// The angle is recorded for scenario completeness; the link equations use
/// only the distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApPosition {
    /// Distance from the origin, meters. Strictly positive.
    pub distance_m: f64,
    /// Angle from the surface boresight, radians, in [0, π/2].
    pub angle_rad: f64,
}

impl ApPosition {
    pub fn new(distance_m: f64, angle_rad: f64) -> Result<Self, ModelError> {
        require_positive("ap distance_m", distance_m)?;
        if !(0.0..=FRAC_PI_2).contains(&angle_rad) {
            return Err(ModelError::InvalidParameter {
                name: "ap angle_rad",
                constraint: "within [0, pi/2]",
                value: angle_rad,
            });
        }
        Ok(Self {
            distance_m,
            angle_rad,
        })
    }
}

/// Element counts of the reflecting surface along its two axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RisGeometry {
    /// Elements along the x axis.
    pub n_x: usize,
    /// Elements along the z axis.
    pub n_z: usize,
}

impl RisGeometry {
    pub fn new(n_x: usize, n_z: usize) -> Result<Self, ModelError> {
        if n_x < 1 {
            return Err(ModelError::InvalidCount {
                name: "n_x",
                constraint: ">= 1",
                value: n_x,
            });
        }
        if n_z < 1 {
            return Err(ModelError::InvalidCount {
                name: "n_z",
                constraint: ">= 1",
                value: n_z,
            });
        }
        Ok(Self { n_x, n_z })
    }

    /// Total element count.
    pub fn total(&self) -> usize {
        self.n_x * self.n_z
    }
}

/// The quantized set of reflecting angles the surface can realize.
///
/// With `C` configurations the angular resolution is δ = π/(2(C+1)) and
/// the realizable angles are {δ, 2δ, …, Cδ}, all strictly inside (0, π/2).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfigSet {
    resolution_rad: f64,
    angles_rad: Vec<f64>,
}

impl PhaseConfigSet {
    /// Angular resolution δ, radians.
    pub fn resolution(&self) -> f64 {
        self.resolution_rad
    }

    /// Realizable reflecting angles, radians, ascending.
    pub fn angles(&self) -> &[f64] {
        &self.angles_rad
    }

    /// Number of configurations.
    pub fn config_count(&self) -> usize {
        self.angles_rad.len()
    }
}

/// Link-budget constants shared by every position in the service area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Path loss at the reference distance, linear power ratio.
    pub ref_path_loss: f64,
    /// Noise power at the receiver, watts.
    pub noise_power_w: f64,
    /// Access-point placement.
    pub ap: ApPosition,
    /// Target SNR for reliable decoding, linear ratio.
    pub target_snr: f64,
    /// Transmit power cap of a device, watts.
    pub max_tx_power_w: f64,
}

impl LinkBudget {
    pub fn new(
        ref_path_loss: f64,
        noise_power_w: f64,
        ap: ApPosition,
        target_snr: f64,
        max_tx_power_w: f64,
    ) -> Result<Self, ModelError> {
        for (name, value) in [
            ("ref_path_loss", ref_path_loss),
            ("noise_power_w", noise_power_w),
            ("target_snr", target_snr),
            ("max_tx_power_w", max_tx_power_w),
        ] {
            require_positive(name, value)?;
        }
        Ok(Self {
            ref_path_loss,
            noise_power_w,
            ap,
            target_snr,
            max_tx_power_w,
        })
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Angular resolution δ = π/(2(C+1)) of a surface with `config_count`
/// reflecting-angle configurations. Strictly decreasing in the count.
pub fn angular_resolution(config_count: usize) -> Result<f64, ModelError> {
    if config_count == 0 {
        return Err(ModelError::EmptyConfigSet);
    }
    Ok(PI / (2.0 * (config_count as f64 + 1.0)))
}

/// Build the quantized reflecting-angle set {cδ : c = 1, …, C}.
pub fn build_config_set(config_count: usize) -> Result<PhaseConfigSet, ModelError> {
    let resolution_rad = angular_resolution(config_count)?;
    let angles_rad = (1..=config_count)
        .map(|c| c as f64 * resolution_rad)
        .collect();
    Ok(PhaseConfigSet {
        resolution_rad,
        angles_rad,
    })
}

/// Total path loss β = β₀ · cos²θ / (d_ap² · d²).
///
/// Vanishes exactly at θ = π/2, where the device lies in the surface plane.
pub fn path_loss(pos: &DevicePosition, link: &LinkBudget) -> f64 {
    let c = boresight_cos(pos.angle_rad);
    link.ref_path_loss * c * c
        / (link.ap.distance_m * link.ap.distance_m * pos.distance_m * pos.distance_m)
}

/// Array factor of the discretized surface,
/// A = N_z · Σ_{n=1..N_x} exp(j·2π·(sin θ_k − sin θ_r)·n),
/// by direct summation over the element index.
///
/// |A| ≤ N_x·N_z, with equality when sin θ_k = sin θ_r.
pub fn array_factor(geom: &RisGeometry, theta_k_rad: f64, theta_r_rad: f64) -> Complex64 {
    let omega = theta_k_rad.sin() - theta_r_rad.sin();
    geom.n_z as f64 * element_sum(geom.n_x, omega)
}

/// Squared magnitude of the x-axis element sum in closed form,
/// |Σ|² = sin²(π·N_x·Ω) / sin²(π·Ω), with the limit value N_x² substituted
/// when |sin(πΩ)| falls below 1e−12.
///
/// Serves as an independent check of (and fast path for) the direct
/// summation in [`array_factor`].
pub fn array_gain_closed_form(geom: &RisGeometry, omega: f64) -> f64 {
    let n_x = geom.n_x as f64;
    let den = (PI * omega).sin();
    if den.abs() < SIN_NULL_EPS {
        return n_x * n_x;
    }
    let num = (PI * n_x * omega).sin();
    (num * num) / (den * den)
}

/// Instantaneous SNR at the AP for a device transmitting at `tx_power_w`
/// with the surface steered to `theta_r_rad`:
///
/// γ = ρ · β₀ · N_z² · |Σ|² · cos²θ / (σ² · d_ap² · d²)
///
/// Linear in the transmit power.
pub fn snr(
    tx_power_w: f64,
    pos: &DevicePosition,
    geom: &RisGeometry,
    theta_r_rad: f64,
    link: &LinkBudget,
) -> f64 {
    let omega = pos.angle_rad.sin() - theta_r_rad.sin();
    let gain = element_sum(geom.n_x, omega).norm_sqr();
    let c = boresight_cos(pos.angle_rad);
    let n_z = geom.n_z as f64;
    tx_power_w * link.ref_path_loss * n_z * n_z * gain * c * c
        / (link.noise_power_w
            * link.ap.distance_m
            * link.ap.distance_m
            * pos.distance_m
            * pos.distance_m)
}

/// Sum of the per-element phasors along the x axis.
pub(crate) fn element_sum(n_x: usize, omega: f64) -> Complex64 {
    (1..=n_x)
        .map(|n| Complex64::from_polar(1.0, TAU * omega * n as f64))
        .sum()
}

/// cos θ with the in-plane null made exact: cos(π/2) rounds to ~6.1e-17 in
/// f64, but the model's gain must vanish identically at θ = π/2.
pub(crate) fn boresight_cos(angle_rad: f64) -> f64 {
    if angle_rad >= FRAC_PI_2 {
        0.0
    } else {
        angle_rad.cos()
    }
}
