use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use shipsim::config::{Scenario, ShipConfig};
use shipsim::csv_io::{read_columns_file, time_series, write_trajectory_file};
use shipsim::identification::{fit_ar, fit_kt, KtFitOptions};
use shipsim::maneuver::{summarize, ManeuverSummary};
use shipsim::requirements::{check_requirements, ProbeSettings};
use shipsim::simulation::simulate;

#[derive(Parser)]
#[command(name = "shipsim", about = "Three-degree-of-freedom ship maneuvering simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario file and write its trajectory as CSV
    Run {
        scenario: PathBuf,
        /// directory for `<scenario>.csv`
        #[arg(long, env = "SHIPSIM_OUT_DIR", default_value = ".")]
        out: PathBuf,
    },
    /// Run the berthing requirement probes on a ship file
    Check {
        ship: PathBuf,
        /// write the report as JSON
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Fit a first-order steering model to a trajectory CSV
    FitKt {
        csv: PathBuf,
        /// moving-average window applied before differentiation
        #[arg(long, default_value_t = 1)]
        smoothing: usize,
    },
    /// Fit an autoregressive model to one column, order chosen by AIC
    FitAr {
        csv: PathBuf,
        #[arg(long, default_value = "r")]
        channel: String,
        #[arg(long, default_value_t = 10)]
        max_order: usize,
    },
    /// Print the version
    Version,
}

/// `Ok(false)` is a completed run whose checks did not pass.
fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Run { scenario, out } => run(&scenario, &out),
        Command::Check { ship, report } => check(&ship, report.as_deref()),
        Command::FitKt { csv, smoothing } => {
            let series = time_series(&read_columns_file(&csv)?)?;
            let fit = fit_kt(
                &series,
                &KtFitOptions {
                    smoothing_window: smoothing,
                },
            )?;
            println!("K = {:.6} 1/s", fit.model.K);
            println!("T = {:.6} s", fit.model.T);
            println!(
                "residual rms = {:.3e} rad/s over {} samples",
                fit.residual_rms, fit.samples
            );
            Ok(true)
        }
        Command::FitAr {
            csv,
            channel,
            max_order,
        } => {
            let cols = read_columns_file(&csv)?;
            let x = cols
                .get(&channel)
                .ok_or_else(|| anyhow!("{}: no column `{channel}`", csv.display()))?;
            let fit = fit_ar(x, max_order)?;
            println!("order  AIC");
            for c in &fit.candidates {
                let mark = if c.order == fit.selected.order() { " *" } else { "" };
                println!("{:>5}  {:.4}{mark}", c.order, c.aic);
            }
            println!("coefficients = {:?}", fit.selected.coefficients);
            println!("innovation variance = {:.6e}", fit.selected.sigma2);
            Ok(true)
        }
        Command::Version => {
            println!("shipsim {}", env!("CARGO_PKG_VERSION"));
            Ok(true)
        }
    }
}

fn run(path: &Path, out: &Path) -> Result<bool> {
    let scenario = Scenario::load(path)?;
    let model = scenario.build_model()?;
    let initial = scenario.setup.initial_state;
    let mut controller = scenario.maneuver.controller(&initial, scenario.simulation.t_end)?;
    let traj = simulate(model.as_ref(), &mut controller, &scenario.setup, &scenario.simulation)
        .with_context(|| format!("simulating {}", path.display()))?;

    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let stem = path.file_stem().map_or("trajectory".into(), |s| s.to_string_lossy());
    let csv = out.join(format!("{stem}.csv"));
    write_trajectory_file(&traj, &csv)?;

    println!("scenario: {}", scenario.name);
    println!("model: {}", traj.model);
    println!("trajectory: {} ({} rows)", csv.display(), traj.samples.len());
    match summarize(&scenario.maneuver, &traj) {
        ManeuverSummary::Turning(s) => {
            println!("advance: {}", metres(s.advance));
            println!("transfer: {}", metres(s.transfer));
            println!("tactical diameter: {}", metres(s.tactical_diameter));
        }
        ManeuverSummary::Zigzag(s) => {
            for (i, o) in s.overshoots.iter().enumerate() {
                println!("overshoot {}: {:.3} deg", i + 1, o.to_degrees());
            }
        }
        ManeuverSummary::Stopping(s) => {
            println!("stopping time: {}", opt(s.stopping_time, "s"));
            println!("stopping distance: {}", metres(s.stopping_distance));
            println!("lateral deviation: {}", metres(s.lateral_deviation));
        }
        ManeuverSummary::Final { x0, y0, psi, u, v_m, r } => {
            println!(
                "final position: x0 = {x0:.3} m, y0 = {y0:.3} m, psi = {:.2} deg",
                psi.to_degrees()
            );
            println!(
                "final velocity: u = {u:.4} m/s, v_m = {v_m:.4} m/s, r = {:.4} deg/s",
                r.to_degrees()
            );
        }
    }
    let st = &traj.stats;
    println!(
        "steps: {} accepted, {} rejected, {:.3e}..{:.3e} s",
        st.steps.accepted,
        st.steps.rejected,
        st.steps.smallest_step(),
        st.steps.max_step
    );
    println!(
        "wall time: {:.3} s (real-time ratio {:.2e})",
        st.wall_time_s, st.real_time_ratio
    );
    if scenario.simulation.realtime_check && st.real_time_ratio >= 1.0 {
        eprintln!("real-time check failed: ratio {:.3}", st.real_time_ratio);
        return Ok(false);
    }
    Ok(true)
}

fn opt(x: Option<f64>, unit: &str) -> String {
    x.map_or("not reached".into(), |v| format!("{v:.3} {unit}"))
}

fn metres(x: Option<f64>) -> String {
    opt(x, "m")
}

fn check(path: &Path, report_path: Option<&Path>) -> Result<bool> {
    let ship = ShipConfig::load_unchecked(path)?;
    let params = ship.mmg_params()?;
    let report = check_requirements(&ship.name, &params, ProbeSettings::default())?;
    for it in &report.items {
        println!(
            "{} {:<38} measured {:<12.5} {}",
            if it.passed { "PASS" } else { "FAIL" },
            it.id,
            it.measured,
            it.detail
        );
    }
    for n in &report.not_applicable {
        println!("n/a  {n}");
    }
    println!("{}/{} requirements met", report.passed_count(), report.items.len());
    if let Some(p) = report_path {
        std::fs::write(p, report.to_json()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
