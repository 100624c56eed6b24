//! Scenario files, mission runs, Monte Carlo batches and plot data for the
//! `hydromission-core` planners.

pub mod config;
pub mod error;
pub mod map;
pub mod montecarlo;
pub mod output;
pub mod plotdata;
pub mod scenario;

use std::path::{Path, PathBuf};

use hydromission_core::executive::MissionTrace;

pub use config::ScenarioConfig;
pub use error::{Error, Result};
pub use montecarlo::{run_batch, Batch, BatchStats};
pub use scenario::Scenario;

use output::{create_dir, current_raster, leg_rows, write_csv, write_text, write_trace, SummaryRow};
use plotdata::{PlotOptions, CONVERGENCE_HEADER, CPUTIME_HEADER, PATH3D_HEADER, TIMEBUDGET_HEADER};

pub const OUT_ENV: &str = "HYDROMISSION_OUT";
pub const RESOLVED_CONFIG: &str = "scenario.resolved.json";

/// `--out`, then `$HYDROMISSION_OUT`, then the scenario's `output`, then
/// `hydromission-out/<name>`.
pub fn output_dir(flag: Option<&Path>, cfg: &ScenarioConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| Path::new("hydromission-out").join(&cfg.name))
}

/// One mission: trace, summary row, legs, plot data and the resolved config.
pub fn cmd_run(scenario: &Scenario, seed: u64, out: &Path) -> Result<MissionTrace> {
    create_dir(out)?;
    write_text(&out.join(RESOLVED_CONFIG), &scenario.config.resolved_json())?;
    let trace = scenario.run(seed)?;
    write_trace(&out.join("trace.jsonl"), &trace)?;
    write_csv(
        &out.join("summary.csv"),
        output::SUMMARY_HEADER,
        &[SummaryRow::new(0, seed, &trace.summary)],
    )?;
    write_csv(&out.join("legs.csv"), output::LEGS_HEADER, &leg_rows(0, &trace))?;
    let conv = plotdata::convergence(&trace.events, PlotOptions::default()).unwrap_or_default();
    write_csv(&out.join("convergence.csv"), CONVERGENCE_HEADER, &conv)?;
    write_csv(&out.join("path3d.csv"), PATH3D_HEADER, &plotdata::path3d(&trace.events))?;
    write_csv(
        &out.join("current.csv"),
        output::CURRENT_HEADER,
        &current_raster(&scenario.world(), 40),
    )?;
    Ok(trace)
}

/// `runs` missions from `seed_base`. With `traces` set, each run's trace is
/// also written under `traces/`.
pub fn cmd_montecarlo(scenario: &Scenario, runs: usize, seed_base: u64, out: &Path, traces: bool) -> Result<Batch> {
    create_dir(out)?;
    write_text(&out.join(RESOLVED_CONFIG), &scenario.config.resolved_json())?;
    let trace_dir = out.join("traces");
    if traces {
        create_dir(&trace_dir)?;
    }
    let batch = run_batch(scenario, runs, seed_base, |run, trace| {
        if traces {
            write_trace(&trace_dir.join(format!("run_{run:04}.jsonl")), trace)?;
        }
        Ok(())
    })?;
    write_csv(&out.join("summary.csv"), output::SUMMARY_HEADER, &batch.summaries)?;
    write_csv(&out.join("legs.csv"), output::LEGS_HEADER, &batch.legs)?;
    write_csv(
        &out.join("timebudget.csv"),
        TIMEBUDGET_HEADER,
        &plotdata::timebudget_from_summary(&batch.summaries),
    )?;
    write_csv(
        &out.join("cputime.csv"),
        CPUTIME_HEADER,
        &plotdata::cputime_from_summary(&batch.summaries),
    )?;
    Ok(batch)
}
