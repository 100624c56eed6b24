//! Batches of independent missions.

use std::panic::{self, AssertUnwindSafe};

use hydromission_core::executive::{MissionTrace, Outcome};

use crate::error::{Error, Result};
use crate::output::{leg_rows, LegRow, SummaryRow};
use crate::scenario::Scenario;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Batch {
    pub summaries: Vec<SummaryRow>,
    pub legs: Vec<LegRow>,
}

/// Runs `runs` missions with seeds `seed_base + i`, each on its own graph.
/// `each` sees every trace as it completes, in run order. A run that errors
/// or panics stops the batch and names its seed.
pub fn run_batch(
    scenario: &Scenario,
    runs: usize,
    seed_base: u64,
    mut each: impl FnMut(usize, &MissionTrace) -> Result<()>,
) -> Result<Batch> {
    let mut batch = Batch::default();
    for run in 0..runs {
        let seed = seed_base.wrapping_add(run as u64);
        let trace = match panic::catch_unwind(AssertUnwindSafe(|| scenario.run(seed))) {
            Ok(Ok(t)) => t,
            Ok(Err(e)) => {
                return Err(Error::RunFailed {
                    run,
                    seed,
                    message: e.to_string(),
                })
            }
            Err(p) => {
                let message = p
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| p.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panicked".into());
                return Err(Error::RunFailed { run, seed, message });
            }
        };
        each(run, &trace)?;
        batch.summaries.push(SummaryRow::new(run, seed, &trace.summary));
        batch.legs.extend(leg_rows(run, &trace));
    }
    Ok(batch)
}

/// Headline numbers of a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchStats {
    pub runs: usize,
    pub successes: usize,
    /// Successes with `0 < T_Residual` and `T_Mission < T_Available`.
    pub successes_within_budget: usize,
    /// Median of `|realized - expected| / expected` over completed legs.
    pub median_leg_gap: f64,
    /// Legs marked `continue` whose realized time exceeded the expected one.
    pub continue_violations: usize,
    pub path_cpu_share: f64,
}

impl BatchStats {
    pub fn of(batch: &Batch) -> Self {
        let successes: Vec<_> = batch
            .summaries
            .iter()
            .filter(|s| s.outcome == Outcome::Success.label())
            .collect();
        let within = successes
            .iter()
            .filter(|s| s.t_residual > 0.0 && s.t_mission < s.t_available)
            .count();
        let mut gaps: Vec<f64> = batch
            .legs
            .iter()
            .filter(|l| l.decision != "exhausted")
            .map(|l| (l.realized - l.expected).abs() / l.expected)
            .collect();
        gaps.sort_by(f64::total_cmp);
        let continue_violations = batch
            .legs
            .iter()
            .filter(|l| l.decision == "continue" && !(l.realized <= l.expected))
            .count();
        let (path, mission) = batch
            .summaries
            .iter()
            .fold((0.0, 0.0), |(p, m), s| (p + s.path_cpu, m + s.mission_cpu));
        Self {
            runs: batch.summaries.len(),
            successes: successes.len(),
            successes_within_budget: within,
            median_leg_gap: median(&gaps),
            continue_violations,
            path_cpu_share: if path + mission > 0.0 { path / (path + mission) } else { 0.0 },
        }
    }
}

/// Median of sorted data; NaN when empty.
pub fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => sorted[n / 2],
        _ => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    }
}
