//! CSV and JSON emission for grid maps and sweep summaries.
//!
//! Power is rendered in dBm and lifetime in 365-day years; outage cells
//! leave those fields empty so plotting tools skip them. Floating-point
//! fields carry 9 significant digits, making output byte-deterministic.

use std::io::{self, Write};

use serde::Serialize;

use crate::sweep::{GridMap, SweepSummary};
use crate::units::{seconds_to_years, watts_to_dbm};

/// Output format for sweep summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SummaryFormat {
    #[default]
    Csv,
    Json,
}

/// Write one CSV row per cell, row-major (radial outer), after a header.
/// Returns the number of data rows.
pub fn emit_grid_csv<W: Write + ?Sized>(map: &GridMap, sink: &mut W) -> io::Result<usize> {
    writeln!(sink, "d_m,theta_rad,rho_dbm,outage,ebl_years,best_config")?;
    let grid = map.grid();
    let mut rows = 0;
    for radial in 0..grid.n_d {
        for angular in 0..grid.n_theta {
            let (d, theta) = grid.center(radial, angular);
            let cell = map.cell(radial, angular);
            if cell.outage {
                writeln!(sink, "{},{},,1,,", sig9(d), sig9(theta))?;
            } else {
                let best = cell
                    .best_angle_index
                    .expect("covered cells have a best configuration");
                writeln!(
                    sink,
                    "{},{},{},0,{},{}",
                    sig9(d),
                    sig9(theta),
                    sig9(watts_to_dbm(cell.tx_power_w)),
                    sig9(seconds_to_years(
                        cell.lifetime_s.expect("covered cells carry a lifetime")
                    )),
                    best + 1,
                )?;
            }
            rows += 1;
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct SummaryRow {
    n: usize,
    c: usize,
    avg_rho_dbm: Option<f64>,
    avg_ebl_years: Option<f64>,
    outage_area_pct: f64,
}

impl From<&SweepSummary> for SummaryRow {
    fn from(summary: &SweepSummary) -> Self {
        Self {
            n: summary.n_total,
            c: summary.config_count,
            avg_rho_dbm: summary.avg_tx_power_w.map(watts_to_dbm),
            avg_ebl_years: summary.avg_lifetime_s.map(seconds_to_years),
            outage_area_pct: summary.outage_area_pct,
        }
    }
}

/// Write sweep summaries in the order given (the sweep orders by (C, N)).
/// Returns the number of rows.
pub fn emit_summary<W: Write + ?Sized>(
    summaries: &[SweepSummary],
    sink: &mut W,
    format: SummaryFormat,
) -> io::Result<usize> {
    match format {
        SummaryFormat::Csv => {
            writeln!(sink, "n,c,avg_rho_dbm,avg_ebl_years,outage_area_pct")?;
            for summary in summaries {
                let row = SummaryRow::from(summary);
                writeln!(
                    sink,
                    "{},{},{},{},{}",
                    row.n,
                    row.c,
                    row.avg_rho_dbm.map(sig9).unwrap_or_default(),
                    row.avg_ebl_years.map(sig9).unwrap_or_default(),
                    sig9(row.outage_area_pct),
                )?;
            }
        }
        SummaryFormat::Json => {
            let rows: Vec<SummaryRow> = summaries.iter().map(SummaryRow::from).collect();
            serde_json::to_writer_pretty(&mut *sink, &rows)?;
            writeln!(sink)?;
        }
    }
    Ok(summaries.len())
}

/// 9 significant digits.
fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_config_set, ApPosition, LinkBudget, RisGeometry};
    use crate::power::{DeviceEnergyProfile, FrameTiming};
    use crate::sweep::{evaluate_map, ServiceAreaGrid};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn reference_pieces() -> (LinkBudget, FrameTiming, DeviceEnergyProfile) {
        (
            LinkBudget::new(
                10f64.powf(-5.2),
                10f64.powf(-9.4) * 1e-3,
                ApPosition::new(20.0, FRAC_PI_4).unwrap(),
                10.0,
                10f64.powf(2.4) * 1e-3,
            )
            .unwrap(),
            FrameTiming::new(0.05, 0.005, 0.0425, 0.0025).unwrap(),
            DeviceEnergyProfile::new(2500.0, 300.0, 1e-5, 1e-3, 0.1, 1.33).unwrap(),
        )
    }

    fn small_map(n_d: usize, n_theta: usize) -> GridMap {
        let (link, frame, profile) = reference_pieces();
        let grid = ServiceAreaGrid::new(19.0, 21.0, 0.0, FRAC_PI_3, n_d, n_theta).unwrap();
        let geom = RisGeometry::new(10, 10).unwrap();
        let cfg = build_config_set(2).unwrap();
        evaluate_map(&grid, &geom, &cfg, &link, &frame, &profile)
    }

    #[test]
    fn one_cell_map_is_a_header_and_one_row() {
        let map = small_map(1, 1);
        let mut out = Vec::new();
        let rows = emit_grid_csv(&map, &mut out).unwrap();
        assert_eq!(rows, 1);
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "d_m,theta_rad,rho_dbm,outage,ebl_years,best_config");
        assert!(lines[1].starts_with("2.00000000e1,"));
        assert!(lines[1].ends_with(",1"));
    }

    #[test]
    fn rows_come_out_radial_major() {
        let map = small_map(2, 2);
        let mut out = Vec::new();
        let rows = emit_grid_csv(&map, &mut out).unwrap();
        assert_eq!(rows, 4);
        let text = String::from_utf8(out).unwrap();
        let d_values: Vec<&str> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap())
            .collect();
        // Two angular cells at the inner radius, then two at the outer.
        assert_eq!(d_values[0], d_values[1]);
        assert_eq!(d_values[2], d_values[3]);
        assert_ne!(d_values[0], d_values[2]);
    }

    #[test]
    fn outage_rows_leave_power_lifetime_and_config_empty() {
        let (link, frame, profile) = reference_pieces();
        let grid =
            ServiceAreaGrid::new(20.0, 100.0, FRAC_PI_2 - 1e-4, FRAC_PI_2, 1, 1).unwrap();
        let geom = RisGeometry::new(10, 10).unwrap();
        let cfg = build_config_set(2).unwrap();
        let map = evaluate_map(&grid, &geom, &cfg, &link, &frame, &profile);
        let mut out = Vec::new();
        emit_grid_csv(&map, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let row = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 6);
        assert_eq!(fields[2], "");
        assert_eq!(fields[3], "1");
        assert_eq!(fields[4], "");
        assert_eq!(fields[5], "");
    }

    #[test]
    fn identical_maps_emit_identical_bytes() {
        let a = small_map(3, 3);
        let b = small_map(3, 3);
        let mut out_a = Vec::new();
        let mut out_b = Vec::new();
        emit_grid_csv(&a, &mut out_a).unwrap();
        emit_grid_csv(&b, &mut out_b).unwrap();
        assert_eq!(out_a, out_b);
    }

    #[test]
    fn summary_csv_renders_missing_averages_as_empty() {
        let all_out = SweepSummary {
            n_total: 4,
            config_count: 2,
            avg_tx_power_w: None,
            avg_lifetime_s: None,
            outage_area_pct: 100.0,
        };
        let mut out = Vec::new();
        let rows = emit_summary(&[all_out], &mut out, SummaryFormat::Csv).unwrap();
        assert_eq!(rows, 1);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "4,2,,,1.00000000e2"
        );
    }

    #[test]
    fn full_sweep_table_writes_one_row_per_pair() {
        let summaries: Vec<SweepSummary> = [2usize, 4, 8, 16]
            .iter()
            .flat_map(|&c| {
                (2usize..=10).map(move |n_x| SweepSummary {
                    n_total: n_x * n_x,
                    config_count: c,
                    avg_tx_power_w: Some(1e-3),
                    avg_lifetime_s: Some(1e8),
                    outage_area_pct: 1.0,
                })
            })
            .collect();
        let mut out = Vec::new();
        let rows = emit_summary(&summaries, &mut out, SummaryFormat::Csv).unwrap();
        assert_eq!(rows, 36);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 37);
        assert!(text.lines().nth(1).unwrap().starts_with("4,2,"));
        assert!(text.lines().last().unwrap().starts_with("100,16,"));
    }

    #[test]
    fn summary_csv_and_json_carry_the_same_fields() {
        let summary = SweepSummary {
            n_total: 81,
            config_count: 8,
            avg_tx_power_w: Some(1e-3),
            avg_lifetime_s: Some(3.1536e7),
            outage_area_pct: 2.0,
        };
        let mut csv = Vec::new();
        emit_summary(&[summary], &mut csv, SummaryFormat::Csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "n,c,avg_rho_dbm,avg_ebl_years,outage_area_pct"
        );
        // 1 mW is 0 dBm and 3.1536e7 s is one year.
        assert_eq!(
            text.lines().nth(1).unwrap(),
            "81,8,0.00000000e0,1.00000000e0,2.00000000e0"
        );

        let mut json = Vec::new();
        emit_summary(&[summary], &mut json, SummaryFormat::Json).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(parsed[0]["n"], 81);
        assert_eq!(parsed[0]["c"], 8);
        assert_eq!(parsed[0]["outage_area_pct"], 2.0);
        assert!((parsed[0]["avg_rho_dbm"].as_f64().unwrap()).abs() < 1e-12);
    }
}
