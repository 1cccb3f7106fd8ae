//! Required transmit power, best-configuration selection, and the device
//! energy / battery-lifetime model.
//!
//! Inverting the SNR expression gives the transmit power a device needs to
//! hit the target SNR from its position; the surface configuration that
//! minimizes that power is selected per position. A position whose minimal
//! power still exceeds the cap is in outage. For covered positions the
//! per-report energy draw and the expected battery lifetime follow from the
//! TDMA frame structure and the device power profile.

use crate::channel::{
    boresight_cos, element_sum, DevicePosition, LinkBudget, PhaseConfigSet, RisGeometry,
};
use crate::error::{require_positive, ModelError};

/// TDMA frame block lengths within one channel coherence time.
///
/// The device receives during the training and acknowledgement blocks and
/// transmits during the access block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTiming {
    /// Channel coherence time, seconds.
    pub coherence_s: f64,
    /// Training block length, seconds.
    pub training_s: f64,
    /// Access (data) block length, seconds.
    pub access_s: f64,
    /// Acknowledgement block length, seconds.
    pub ack_s: f64,
}

impl FrameTiming {
    pub fn new(
        coherence_s: f64,
        training_s: f64,
        access_s: f64,
        ack_s: f64,
    ) -> Result<Self, ModelError> {
        for (name, value) in [
            ("coherence_s", coherence_s),
            ("training_s", training_s),
            ("access_s", access_s),
            ("ack_s", ack_s),
        ] {
            require_positive(name, value)?;
        }
        let total = training_s + access_s + ack_s;
        // The blocks may fill the coherence time exactly; leave rounding headroom.
        if total > coherence_s * (1.0 + 1e-9) {
            return Err(ModelError::InvalidParameter {
                name: "training_s + access_s + ack_s",
                constraint: "<= coherence_s",
                value: total,
            });
        }
        Ok(Self {
            coherence_s,
            training_s,
            access_s,
            ack_s,
        })
    }
}

/// Battery, reporting, and power-draw constants of a device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceEnergyProfile {
    /// Battery capacity, joules.
    pub battery_j: f64,
    /// Expected length between consecutive reports, seconds.
    pub report_period_s: f64,
    /// Static energy consumption per frame, joules.
    pub static_energy_j: f64,
    /// Circuit power draw while transmitting, watts.
    pub circuit_power_w: f64,
    /// Power draw in receive mode, watts.
    pub rx_power_w: f64,
    /// Inverse efficiency of the RF power amplifier, > 1.
    pub pa_inverse_efficiency: f64,
}

impl DeviceEnergyProfile {
    pub fn new(
        battery_j: f64,
        report_period_s: f64,
        static_energy_j: f64,
        circuit_power_w: f64,
        rx_power_w: f64,
        pa_inverse_efficiency: f64,
    ) -> Result<Self, ModelError> {
        for (name, value) in [
            ("battery_j", battery_j),
            ("report_period_s", report_period_s),
            ("static_energy_j", static_energy_j),
            ("circuit_power_w", circuit_power_w),
            ("rx_power_w", rx_power_w),
        ] {
            require_positive(name, value)?;
        }
        if pa_inverse_efficiency <= 1.0 || pa_inverse_efficiency.is_nan() {
            return Err(ModelError::InvalidParameter {
                name: "pa_inverse_efficiency (xi)",
                constraint: "> 1",
                value: pa_inverse_efficiency,
            });
        }
        Ok(Self {
            battery_j,
            report_period_s,
            static_energy_j,
            circuit_power_w,
            rx_power_w,
            pa_inverse_efficiency,
        })
    }
}

/// Outcome of the per-position configuration selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerResult {
    /// Smallest required transmit power over the configuration set, watts.
    /// Infinite when no configuration can serve the position at any power.
    pub tx_power_w: f64,
    /// Index of the minimizing angle in the configuration set; `None` when
    /// every configuration needs infinite power. Present even for positions
    /// in outage whenever some finite power exists.
    pub best_angle_index: Option<usize>,
    /// True when the required power exceeds the transmit cap.
    pub outage: bool,
}

/// Transmit power required to reach the target SNR from `pos` with the
/// surface steered to `theta_r_rad`:
///
/// ρ = γ̄ · σ² · d_ap² · d² / (β₀ · N_z² · |Σ|² · cos²θ)
///
/// Returns `f64::INFINITY` when the channel gain vanishes (array-factor
/// null or θ = π/2); degenerate geometry is not an error. Whenever the
/// result is finite, feeding it back through the SNR expression reproduces
/// the target exactly.
pub fn required_power(
    pos: &DevicePosition,
    geom: &RisGeometry,
    theta_r_rad: f64,
    link: &LinkBudget,
) -> f64 {
    let omega = pos.angle_rad.sin() - theta_r_rad.sin();
    let gain = element_sum(geom.n_x, omega).norm_sqr();
    let c = boresight_cos(pos.angle_rad);
    let n_z = geom.n_z as f64;
    let numerator = link.target_snr
        * link.noise_power_w
        * link.ap.distance_m
        * link.ap.distance_m
        * pos.distance_m
        * pos.distance_m;
    // IEEE division yields the +inf sentinel when the gain is exactly zero.
    numerator / (link.ref_path_loss * n_z * n_z * gain * c * c)
}

/// Evaluate [`required_power`] for every angle in the configuration set and
/// keep the minimizer. Ties break toward the smaller angle index. The
/// outage flag compares the winning power against the transmit cap.
pub fn best_config_power(
    pos: &DevicePosition,
    geom: &RisGeometry,
    cfg: &PhaseConfigSet,
    link: &LinkBudget,
) -> PowerResult {
    let mut tx_power_w = f64::INFINITY;
    let mut best_angle_index = None;
    for (index, &angle) in cfg.angles().iter().enumerate() {
        let p = required_power(pos, geom, angle, link);
        if p < tx_power_w {
            tx_power_w = p;
            best_angle_index = Some(index);
        }
    }
    PowerResult {
        tx_power_w,
        best_angle_index,
        outage: tx_power_w > link.max_tx_power_w,
    }
}

/// Energy drawn by a device over one reporting frame,
/// E = E_s + T_t·P_rx + T_a·(P_c + ξ·ρ) + T_ack·P_rx.
///
/// Strictly increasing in the transmit power. Infinite power (a position in
/// outage) has no defined energy and is rejected.
pub fn energy_consumption(
    tx_power_w: f64,
    frame: &FrameTiming,
    profile: &DeviceEnergyProfile,
) -> Result<f64, ModelError> {
    ensure_finite_power(tx_power_w)?;
    Ok(profile.static_energy_j
        + frame.training_s * profile.rx_power_w
        + frame.access_s * (profile.circuit_power_w + profile.pa_inverse_efficiency * tx_power_w)
        + frame.ack_s * profile.rx_power_w)
}

/// Expected battery lifetime in seconds,
/// L = E₀·T_r / (E_s + T_a·(P_c + ξ·ρ) + (T_t + T_ack)·P_rx).
///
/// Strictly decreasing in the transmit power. The denominator regroups the
/// same terms as [`energy_consumption`].
pub fn expected_battery_lifetime(
    tx_power_w: f64,
    frame: &FrameTiming,
    profile: &DeviceEnergyProfile,
) -> Result<f64, ModelError> {
    ensure_finite_power(tx_power_w)?;
    let per_report = profile.static_energy_j
        + frame.access_s * (profile.circuit_power_w + profile.pa_inverse_efficiency * tx_power_w)
        + (frame.training_s + frame.ack_s) * profile.rx_power_w;
    Ok(profile.battery_j * profile.report_period_s / per_report)
}

fn ensure_finite_power(tx_power_w: f64) -> Result<(), ModelError> {
    if !tx_power_w.is_finite() || tx_power_w < 0.0 {
        return Err(ModelError::NonFinitePower { value: tx_power_w });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_config_set, snr, ApPosition};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};

    fn rel_err(actual: f64, expected: f64) -> f64 {
        (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE)
    }

    fn reference_link() -> LinkBudget {
        LinkBudget::new(
            10f64.powf(-5.2),
            10f64.powf(-9.4) * 1e-3,
            ApPosition::new(20.0, FRAC_PI_4).unwrap(),
            10.0,
            10f64.powf(2.4) * 1e-3,
        )
        .unwrap()
    }

    fn reference_frame() -> FrameTiming {
        FrameTiming::new(0.05, 0.10 * 0.05, 0.85 * 0.05, 0.05 * 0.05).unwrap()
    }

    fn reference_profile() -> DeviceEnergyProfile {
        DeviceEnergyProfile::new(2500.0, 300.0, 1e-5, 1e-3, 0.1, 1.33).unwrap()
    }

    #[test]
    fn required_power_matches_the_hand_evaluated_fixture() {
        // Oracle: hand evaluation with the reference parameter values at the aligned
        // position (d = 20, θ_k = θ_r = π/6, 10x10 elements): the element
        // sum is exactly N_x² and cos²(π/6) = 3/4.
        let link = reference_link();
        let geom = RisGeometry::new(10, 10).unwrap();
        let pos = DevicePosition::new(20.0, FRAC_PI_6).unwrap();
        let sigma = 10f64.powf(-9.4) * 1e-3;
        let beta0 = 10f64.powf(-5.2);
        let oracle = 10.0 * sigma * 400.0 * 400.0 / (beta0 * 100.0 * 100.0 * 0.75);
        let got = required_power(&pos, &geom, FRAC_PI_6, &link);
        assert!(rel_err(got, oracle) < 1e-10, "got {got}, oracle {oracle}");
        assert!(rel_err(got, 1.34604e-5) < 1e-5);
        // ≈ −18.7 dBm
        assert!((10.0 * (got / 1e-3).log10() + 18.7).abs() < 0.05);
    }

    #[test]
    fn required_power_is_infinite_in_the_surface_plane() {
        let link = reference_link();
        let geom = RisGeometry::new(10, 10).unwrap();
        let pos = DevicePosition::new(20.0, FRAC_PI_2).unwrap();
        assert!(required_power(&pos, &geom, FRAC_PI_6, &link).is_infinite());
    }

    #[test]
    fn required_power_blows_up_at_an_array_null() {
        // sin θ_k − sin θ_r = 0.1 with N_x = 10. The ten phasors cancel; in
        // floating point the residual is ~1e-16, so the required power comes
        // out astronomically large rather than exactly infinite.
        let link = reference_link();
        let geom = RisGeometry::new(10, 10).unwrap();
        let pos = DevicePosition::new(20.0, 0.6f64.asin()).unwrap();
        let p = required_power(&pos, &geom, 0.5f64.asin(), &link);
        assert!(p.is_infinite() || p > 1e20, "got {p}");
    }

    #[test]
    fn best_config_prefers_the_aligned_angle() {
        let link = reference_link();
        let geom = RisGeometry::new(10, 10).unwrap();
        let cfg = build_config_set(2).unwrap();
        let pos = DevicePosition::new(20.0, FRAC_PI_6).unwrap();
        let result = best_config_power(&pos, &geom, &cfg, &link);
        assert_eq!(result.best_angle_index, Some(0));
        assert!(!result.outage);
    }

    #[test]
    fn best_config_at_the_midpoint_picks_the_upper_beam() {
        // At θ_k = π/4 the |Σ|² gains are ≈ 4.03 for θ_r = π/3 and ≈ 0.133
        // for θ_r = π/6 (direct summation of both), so π/3 wins.
        let link = reference_link();
        let geom = RisGeometry::new(10, 10).unwrap();
        let cfg = build_config_set(2).unwrap();
        let pos = DevicePosition::new(20.0, FRAC_PI_4).unwrap();

        let g_low = element_sum(10, FRAC_PI_4.sin() - cfg.angles()[0].sin()).norm_sqr();
        let g_high = element_sum(10, FRAC_PI_4.sin() - cfg.angles()[1].sin()).norm_sqr();
        assert!((g_low - 0.133).abs() < 5e-3);
        assert!((g_high - 4.03).abs() < 5e-3);

        let result = best_config_power(&pos, &geom, &cfg, &link);
        assert_eq!(result.best_angle_index, Some(1));
    }

    #[test]
    fn best_config_in_the_surface_plane_is_outage_with_no_index() {
        let link = reference_link();
        let geom = RisGeometry::new(10, 10).unwrap();
        let cfg = build_config_set(4).unwrap();
        let pos = DevicePosition::new(20.0, FRAC_PI_2).unwrap();
        let result = best_config_power(&pos, &geom, &cfg, &link);
        assert!(result.outage);
        assert!(result.tx_power_w.is_infinite());
        assert_eq!(result.best_angle_index, None);
    }

    #[test]
    fn energy_fixtures_from_the_reference_profile() {
        let frame = reference_frame();
        let profile = reference_profile();

        // Hand evaluation with T_t = 5 ms, T_a = 42.5 ms, T_ack = 2.5 ms.
        let idle = 1e-5 + 0.005 * 0.1 + 0.0425 * 1e-3 + 0.0025 * 0.1;
        let got = energy_consumption(0.0, &frame, &profile).unwrap();
        assert!(rel_err(got, idle) < 1e-12);
        assert!(rel_err(got, 8.025e-4) < 1e-9);

        // At the 24 dBm cap the access-block PA term dominates.
        let rho_max = 10f64.powf(2.4) * 1e-3;
        let at_cap = idle + 0.0425 * 1.33 * rho_max;
        let got = energy_consumption(rho_max, &frame, &profile).unwrap();
        assert!(rel_err(got, at_cap) < 1e-12);
        assert!(rel_err(got, 1.5001e-2) < 1e-4);
    }

    #[test]
    fn energy_reduces_to_the_static_term() {
        // Zero-length blocks isolate E_s; built directly since the frame
        // constructor requires positive blocks.
        let frame = FrameTiming {
            coherence_s: 1.0,
            training_s: 0.0,
            access_s: 0.0,
            ack_s: 0.0,
        };
        let profile = DeviceEnergyProfile {
            battery_j: 1.0,
            report_period_s: 1.0,
            static_energy_j: 1.0,
            circuit_power_w: 1.0,
            rx_power_w: 1.0,
            pa_inverse_efficiency: 2.0,
        };
        assert_eq!(energy_consumption(0.5, &frame, &profile).unwrap(), 1.0);
        assert_eq!(
            expected_battery_lifetime(0.5, &frame, &profile).unwrap(),
            1.0
        );
    }

    #[test]
    fn lifetime_fixtures_from_the_reference_profile() {
        let frame = reference_frame();
        let profile = reference_profile();

        // Hand evaluation: E0·Tr / denominator at ρ = 0 and ρ = ρ_max.
        let idle_denom = 1e-5 + 0.0425 * 1e-3 + 0.0075 * 0.1;
        let idle = 2500.0 * 300.0 / idle_denom;
        let got = expected_battery_lifetime(0.0, &frame, &profile).unwrap();
        assert!(rel_err(got, idle) < 1e-12);
        assert!(rel_err(got, 9.3458e8) < 1e-4);
        // ≈ 29.6 years
        assert!((got / 3.1536e7 - 29.6).abs() < 0.1);

        let rho_max = 10f64.powf(2.4) * 1e-3;
        let cap_denom = idle_denom + 0.0425 * 1.33 * rho_max;
        let at_cap = 2500.0 * 300.0 / cap_denom;
        let got = expected_battery_lifetime(rho_max, &frame, &profile).unwrap();
        assert!(rel_err(got, at_cap) < 1e-12);
        assert!(rel_err(got, 4.9997e7) < 1e-4);
        // ≈ 1.59 years
        assert!((got / 3.1536e7 - 1.59).abs() < 0.01);
    }

    #[test]
    fn energy_and_lifetime_reject_outage_power() {
        let frame = reference_frame();
        let profile = reference_profile();
        for bad in [f64::INFINITY, f64::NAN, -1.0] {
            assert!(matches!(
                energy_consumption(bad, &frame, &profile),
                Err(ModelError::NonFinitePower { .. })
            ));
            assert!(matches!(
                expected_battery_lifetime(bad, &frame, &profile),
                Err(ModelError::NonFinitePower { .. })
            ));
        }
    }

    #[test]
    fn energy_increases_and_lifetime_decreases_with_power() {
        let frame = reference_frame();
        let profile = reference_profile();
        let rho_max = 10f64.powf(2.4) * 1e-3;
        let mut last_energy = 0.0;
        let mut last_life = f64::INFINITY;
        for step in 0..=20 {
            let rho = rho_max * step as f64 / 20.0;
            let e = energy_consumption(rho, &frame, &profile).unwrap();
            let l = expected_battery_lifetime(rho, &frame, &profile).unwrap();
            if step > 0 {
                assert!(e > last_energy);
                assert!(l < last_life);
            }
            last_energy = e;
            last_life = l;
        }
    }

    #[test]
    fn frame_constructor_enforces_the_coherence_budget() {
        assert!(FrameTiming::new(0.05, 0.02, 0.03, 0.01).is_err());
        assert!(FrameTiming::new(0.05, 0.0, 0.04, 0.01).is_err());
        // Exactly filling the coherence time is allowed.
        assert!(FrameTiming::new(0.05, 0.005, 0.0425, 0.0025).is_ok());
    }

    #[test]
    fn profile_constructor_rejects_sub_unity_pa_efficiency_factor() {
        let err = DeviceEnergyProfile::new(1.0, 1.0, 1.0, 1.0, 1.0, 0.5).unwrap_err();
        assert!(err.to_string().contains("xi"));
    }

    proptest! {
        #[test]
        fn finite_required_power_round_trips_to_the_target_snr(
            d in 1.0..200.0f64,
            theta_k in 0.0..FRAC_PI_2,
            config in 0usize..4,
            n in 1usize..16,
        ) {
            let link = reference_link();
            let geom = RisGeometry::new(n, n).unwrap();
            let cfg = build_config_set(4).unwrap();
            let theta_r = cfg.angles()[config];
            let pos = DevicePosition::new(d, theta_k).unwrap();
            let rho = required_power(&pos, &geom, theta_r, &link);
            if rho.is_finite() {
                let gamma = snr(rho, &pos, &geom, theta_r, &link);
                prop_assert!((gamma / link.target_snr - 1.0).abs() <= 1e-9);
            }
        }

        #[test]
        fn best_config_dominates_every_individual_angle(
            d in 1.0..200.0f64,
            theta_k in 0.0..FRAC_PI_2,
            c in 1usize..12,
        ) {
            let link = reference_link();
            let geom = RisGeometry::new(8, 8).unwrap();
            let cfg = build_config_set(c).unwrap();
            let pos = DevicePosition::new(d, theta_k).unwrap();
            let best = best_config_power(&pos, &geom, &cfg, &link);
            for &angle in cfg.angles() {
                prop_assert!(best.tx_power_w <= required_power(&pos, &geom, angle, &link));
            }
            prop_assert_eq!(best.outage, best.tx_power_w > link.max_tx_power_w);
        }

        #[test]
        fn energy_equals_the_lifetime_denominator(
            rho in 0.0..0.3f64,
        ) {
            let frame = reference_frame();
            let profile = reference_profile();
            let energy = energy_consumption(rho, &frame, &profile).unwrap();
            let life = expected_battery_lifetime(rho, &frame, &profile).unwrap();
            let denom = profile.battery_j * profile.report_period_s / life;
            prop_assert!((energy - denom).abs() / energy <= 1e-12);
        }

        #[test]
        fn required_power_scales_with_the_squared_distance(
            d in 1.0..80.0f64,
            theta_k in 0.0..(FRAC_PI_2 - 1e-3),
        ) {
            let link = reference_link();
            let geom = RisGeometry::new(10, 10).unwrap();
            let near = DevicePosition::new(d, theta_k).unwrap();
            let far = DevicePosition::new(2.0 * d, theta_k).unwrap();
            let p_near = required_power(&near, &geom, FRAC_PI_6, &link);
            let p_far = required_power(&far, &geom, FRAC_PI_6, &link);
            if p_near.is_finite() {
                prop_assert!((p_far / p_near - 4.0).abs() <= 1e-12 * 4.0);
            }
        }
    }
}
