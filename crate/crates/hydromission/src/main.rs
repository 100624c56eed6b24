use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hydromission::config::CONFIG_KEYS;
use hydromission::plotdata::{self, Planner, PlotKind, PlotOptions};
use hydromission::{cmd_montecarlo, cmd_run, output_dir, BatchStats, Scenario};

/// Hierarchical AUV mission planning: task sequencing over a waypoint graph,
/// B-spline paths through vortex currents and moving obstacles, and reactive
/// replanning against a time budget.
#[derive(Parser)]
#[command(version, after_long_help = CONFIG_KEYS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one mission and write its trace, summary and plot data.
    #[command(after_long_help = CONFIG_KEYS)]
    Run {
        /// Scenario JSON file.
        scenario: PathBuf,
        /// Run seed; defaults to the scenario's `seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory [default: $HYDROMISSION_OUT, the scenario's
        /// `output`, or hydromission-out/<name>].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run independent missions with seeds seed-base, seed-base+1, ...
    #[command(after_long_help = CONFIG_KEYS)]
    Montecarlo {
        scenario: PathBuf,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write every run's trace under <out>/traces.
        #[arg(long)]
        traces: bool,
    },
    /// Export a CSV series from a trace (.jsonl) or a summary table (.csv).
    Plotdata {
        input: PathBuf,
        /// convergence, path3d, timebudget or cputime.
        #[arg(long)]
        kind: String,
        /// Planner whose iteration history `convergence` reads.
        #[arg(long, value_enum, default_value_t = PlannerArg::Path)]
        planner: PlannerArg,
        /// Zero-based planner call for `convergence`.
        #[arg(long, default_value_t = 0)]
        call: usize,
        /// Output file [default: <kind>.csv next to the input].
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlannerArg {
    Path,
    Mission,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> hydromission::Result<()> {
    match cli.command {
        Command::Run { scenario, seed, out } => {
            let sc = Scenario::load(&scenario)?;
            let out = output_dir(out.as_deref(), &sc.config);
            let seed = seed.unwrap_or(sc.config.seed);
            let t = cmd_run(&sc, seed, &out)?;
            let s = &t.summary;
            println!(
                "{}: {} | T_Mission {:.1} s, T_Residual {:.1} s, {} legs, {} mission replans, {} path calls",
                sc.config.name, s.outcome, s.t_mission, s.t_residual, s.legs, s.mission_replans, s.path_calls
            );
            println!("wrote {}", out.display());
        }
        Command::Montecarlo {
            scenario,
            runs,
            seed_base,
            out,
            traces,
        } => {
            let sc = Scenario::load(&scenario)?;
            let out = output_dir(out.as_deref(), &sc.config);
            let batch = cmd_montecarlo(&sc, runs as usize, seed_base, &out, traces)?;
            let st = BatchStats::of(&batch);
            println!(
                "{}: {}/{} success ({} within budget), median leg gap {:.3}, path planner CPU share {:.3}",
                sc.config.name, st.successes, st.runs, st.successes_within_budget, st.median_leg_gap, st.path_cpu_share
            );
            println!("wrote {}", out.display());
        }
        Command::Plotdata {
            input,
            kind,
            planner,
            call,
            out,
        } => {
            let kind: PlotKind = kind.parse()?;
            let out = out.unwrap_or_else(|| sibling(&input, &format!("{kind}.csv")));
            let opts = PlotOptions {
                planner: match planner {
                    PlannerArg::Path => Planner::Path,
                    PlannerArg::Mission => Planner::Mission,
                },
                call,
            };
            let n = plotdata::export(&input, kind, opts, &out)?;
            println!("wrote {} rows to {}", n, out.display());
        }
    }
    Ok(())
}

fn sibling(input: &Path, name: &str) -> PathBuf {
    input.parent().unwrap_or(Path::new(".")).join(name)
}
