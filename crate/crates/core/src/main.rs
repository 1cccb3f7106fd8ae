use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use riscell::scenario::{Scenario, ScenarioError};
use riscell::units::{seconds_to_years, watts_to_dbm};
use riscell::{emit_grid_csv, emit_summary, evaluate_map, expected_battery_lifetime, sweep_n_c, SummaryFormat};

#[derive(Parser)]
#[command(
    name = "riscell",
    version,
    about = "Transmit-power, battery-lifetime, and coverage maps for an IoT uplink \
             served through a reconfigurable reflecting surface"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-cell required transmit power over the service area (CSV).
    PowerMap(MapArgs),
    /// Per-cell expected battery lifetime over the service area (CSV).
    EblMap(MapArgs),
    /// Sweep the surface's (N, C) setups and emit aggregate statistics.
    Sweep(SweepArgs),
    /// Load a scenario, check every constraint, and report resolved values.
    Validate(ScenarioArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML); built-in defaults when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,

    /// Override a scenario key, e.g. --set ris.n_x=9 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Grid resolution shortcut: RADIALxANGULAR, e.g. 256x256.
    #[arg(long, value_name = "NxM")]
    grid: Option<String>,
}

#[derive(Args)]
struct MapArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,

    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,

    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t)]
    format: FormatArg,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum FormatArg {
    #[default]
    Csv,
    Json,
}

impl From<FormatArg> for SummaryFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => SummaryFormat::Csv,
            FormatArg::Json => SummaryFormat::Json,
        }
    }
}

enum AppError {
    Scenario(ScenarioError),
    Io(io::Error),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Scenario(ScenarioError::Io { .. }) | AppError::Io(_) => 2,
            AppError::Scenario(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            AppError::Scenario(e) => e.to_string(),
            AppError::Io(e) => format!("i/o error: {e}"),
        }
    }
}

impl From<ScenarioError> for AppError {
    fn from(e: ScenarioError) -> Self {
        AppError::Scenario(e)
    }
}

impl From<io::Error> for AppError {
    fn from(e: io::Error) -> Self {
        AppError::Io(e)
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::PowerMap(args) | Command::EblMap(args) => {
            let scenario = resolve_scenario(&args.scenario)?;
            let map = evaluate_map(
                &scenario.service_grid().map_err(ScenarioError::from)?,
                &scenario.ris_geometry().map_err(ScenarioError::from)?,
                &scenario.config_set().map_err(ScenarioError::from)?,
                &scenario.link_budget().map_err(ScenarioError::from)?,
                &scenario.frame_timing().map_err(ScenarioError::from)?,
                &scenario.energy_profile().map_err(ScenarioError::from)?,
            );
            let rows = with_sink(args.out.as_deref(), |sink| emit_grid_csv(&map, sink))?;
            eprintln!("{rows} cells written");
            Ok(())
        }
        Command::Sweep(args) => {
            let scenario = resolve_scenario(&args.scenario)?;
            let summaries = sweep_n_c(
                &scenario.sweep.n_x_values,
                &scenario.sweep.c_values,
                &scenario.service_grid().map_err(ScenarioError::from)?,
                &scenario.link_budget().map_err(ScenarioError::from)?,
                &scenario.frame_timing().map_err(ScenarioError::from)?,
                &scenario.energy_profile().map_err(ScenarioError::from)?,
            )
            .map_err(ScenarioError::from)?;
            let rows = with_sink(args.out.as_deref(), |sink| {
                emit_summary(&summaries, sink, args.format.into())
            })?;
            eprintln!("{rows} setups written");
            Ok(())
        }
        Command::Validate(args) => {
            let scenario = resolve_scenario(&args)?;
            print_report(&scenario).map_err(AppError::Io)
        }
    }
}

fn resolve_scenario(args: &ScenarioArgs) -> Result<Scenario, ScenarioError> {
    let text = match &args.scenario {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|source| {
            ScenarioError::Io {
                path: path.clone(),
                source,
            }
        })?),
        None => None,
    };
    let mut overrides = args.set.clone();
    if let Some(grid) = &args.grid {
        let (n_d, n_theta) = grid
            .split_once(['x', 'X'])
            .ok_or_else(|| ScenarioError::BadOverride(format!("--grid {grid}")))?;
        overrides.push(format!("grid.n_d={}", n_d.trim()));
        overrides.push(format!("grid.n_theta={}", n_theta.trim()));
    }
    Scenario::from_sources(text.as_deref(), &overrides)
}

fn with_sink<F>(out: Option<&std::path::Path>, write: F) -> Result<usize, AppError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<usize>,
{
    match out {
        Some(path) => {
            let file = File::create(path)?;
            let mut sink = BufWriter::new(file);
            let rows = write(&mut sink)?;
            sink.flush()?;
            Ok(rows)
        }
        None => {
            let stdout = io::stdout();
            let mut sink = BufWriter::new(stdout.lock());
            let rows = write(&mut sink)?;
            sink.flush()?;
            Ok(rows)
        }
    }
}

fn print_report(scenario: &Scenario) -> io::Result<()> {
    let geom = scenario.ris_geometry().expect("validated");
    let cfg = scenario.config_set().expect("validated");
    let link = scenario.link_budget().expect("validated");
    let frame = scenario.frame_timing().expect("validated");
    let profile = scenario.energy_profile().expect("validated");
    let grid = scenario.service_grid().expect("validated");

    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "scenario ok")?;
    writeln!(
        out,
        "  surface: {}x{} elements (N = {}), {} configurations, resolution {:.4} rad ({:.2} deg)",
        geom.n_x,
        geom.n_z,
        geom.total(),
        cfg.config_count(),
        cfg.resolution(),
        cfg.resolution().to_degrees(),
    )?;
    let degrees: Vec<String> = cfg
        .angles()
        .iter()
        .map(|a| format!("{:.2}", a.to_degrees()))
        .collect();
    writeln!(out, "  reflecting angles (deg): {}", degrees.join(", "))?;
    writeln!(
        out,
        "  link: ref path loss {:.4e}, noise {:.4e} W, target snr {:.2}, cap {:.4} W ({:.1} dBm), ap at ({} m, {:.4} rad)",
        link.ref_path_loss,
        link.noise_power_w,
        link.target_snr,
        link.max_tx_power_w,
        watts_to_dbm(link.max_tx_power_w),
        link.ap.distance_m,
        link.ap.angle_rad,
    )?;
    writeln!(
        out,
        "  frame: coherence {:.1} ms, training {:.2} ms, access {:.2} ms, ack {:.2} ms",
        frame.coherence_s * 1e3,
        frame.training_s * 1e3,
        frame.access_s * 1e3,
        frame.ack_s * 1e3,
    )?;
    let life_idle = expected_battery_lifetime(0.0, &frame, &profile).expect("zero power");
    let life_cap =
        expected_battery_lifetime(link.max_tx_power_w, &frame, &profile).expect("cap power");
    writeln!(
        out,
        "  battery: {:.0} J, report every {:.0} s, lifetime {:.2}..{:.2} years across the power range",
        profile.battery_j,
        profile.report_period_s,
        seconds_to_years(life_cap),
        seconds_to_years(life_idle),
    )?;
    writeln!(
        out,
        "  grid: {}x{} cells over d [{}, {}] m, theta [{:.4}, {:.4}] rad",
        grid.n_d, grid.n_theta, grid.d_min_m, grid.d_max_m, grid.theta_min_rad, grid.theta_max_rad,
    )?;
    writeln!(
        out,
        "  sweep: n_x {:?}, c {:?}",
        scenario.sweep.n_x_values, scenario.sweep.c_values,
    )?;
    Ok(())
}
