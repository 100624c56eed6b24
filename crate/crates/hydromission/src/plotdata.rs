//! Plot-ready CSV series derived from traces and summary tables.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use hydromission_core::executive::{to_seconds, EventKind, TraceEvent};
use hydromission_core::pathplan::orientations;
use hydromission_core::Vec3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::output::{read_csv, read_trace, write_csv, SummaryRow};

pub const CONVERGENCE_HEADER: &str = "iteration,best_cost,mean_cost,mean_violation";
pub const PATH3D_HEADER: &str = "s,X,Y,Z,psi,theta";
pub const TIMEBUDGET_HEADER: &str = "run,T_Mission,T_Residual";
pub const CPUTIME_HEADER: &str = "run,path_cpu,mission_cpu,compute_total,path_share,mission_share";
pub const CPUCALLS_HEADER: &str = "seq,planner,compute_s";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Convergence,
    Path3d,
    TimeBudget,
    CpuTime,
}

impl PlotKind {
    pub const ALL: [PlotKind; 4] = [PlotKind::Convergence, PlotKind::Path3d, PlotKind::TimeBudget, PlotKind::CpuTime];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Convergence => "convergence",
            PlotKind::Path3d => "path3d",
            PlotKind::TimeBudget => "timebudget",
            PlotKind::CpuTime => "cputime",
        }
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// Which planner's iteration history `convergence` reads.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Planner {
    #[default]
    Path,
    Mission,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PlotOptions {
    pub planner: Planner,
    /// Zero-based index among that planner's calls.
    pub call: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub iteration: usize,
    pub best_cost: f64,
    pub mean_cost: f64,
    pub mean_violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path3dRow {
    pub s: f64,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub psi: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeBudgetRow {
    pub run: usize,
    #[serde(rename = "T_Mission")]
    pub t_mission: f64,
    #[serde(rename = "T_Residual")]
    pub t_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpuTimeRow {
    pub run: usize,
    pub path_cpu: f64,
    pub mission_cpu: f64,
    pub compute_total: f64,
    pub path_share: f64,
    pub mission_share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpuCallRow {
    pub seq: usize,
    pub planner: String,
    pub compute_s: f64,
}

pub fn convergence(events: &[TraceEvent], opts: PlotOptions) -> Result<Vec<ConvergenceRow>> {
    let histories: Vec<_> = events
        .iter()
        .filter_map(|e| match (&e.kind, opts.planner) {
            (EventKind::PathPlanned { history, .. }, Planner::Path) => Some(history),
            (EventKind::MissionPlanned { history, .. }, Planner::Mission) => Some(history),
            _ => None,
        })
        .collect();
    let history = histories.get(opts.call).ok_or_else(|| {
        Error::Plot(format!(
            "trace has {} {} planner calls; --call {} is out of range",
            histories.len(),
            match opts.planner {
                Planner::Path => "path",
                Planner::Mission => "mission",
            },
            opts.call
        ))
    })?;
    Ok(history
        .iter()
        .enumerate()
        .map(|(i, g)| ConvergenceRow {
            iteration: i,
            best_cost: g.best_cost,
            mean_cost: g.mean_cost,
            mean_violation: g.mean_violation,
        })
        .collect())
}

/// Executed polyline of the whole mission, legs joined end to end.
pub fn path3d(events: &[TraceEvent]) -> Vec<Path3dRow> {
    let mut pts: Vec<Vec3> = Vec::new();
    for e in events {
        if let EventKind::LegCompleted { record } = &e.kind {
            for &p in &record.executed {
                if pts.last() != Some(&p) {
                    pts.push(p);
                }
            }
        }
    }
    let orient = orientations(&pts);
    let mut s = 0.0;
    pts.iter()
        .enumerate()
        .map(|(i, &p)| {
            if i > 0 {
                s += p.distance(pts[i - 1]);
            }
            // The last point keeps the heading of the segment into it.
            let (psi, theta) = orient.get(i).or(orient.last()).copied().unwrap_or((0.0, 0.0));
            Path3dRow {
                s,
                x: p.x,
                y: p.y,
                z: p.z,
                psi,
                theta,
            }
        })
        .collect()
}

pub fn timebudget_from_summary(rows: &[SummaryRow]) -> Vec<TimeBudgetRow> {
    rows.iter()
        .map(|r| TimeBudgetRow {
            run: r.run,
            t_mission: r.t_mission,
            t_residual: r.t_residual,
        })
        .collect()
}

pub fn timebudget_from_trace(events: &[TraceEvent]) -> Vec<TimeBudgetRow> {
    events
        .last()
        .map(|e| TimeBudgetRow {
            run: 0,
            t_mission: to_seconds(e.ledger.accrued_us),
            t_residual: to_seconds(e.ledger.residual_us),
        })
        .into_iter()
        .collect()
}

pub fn cputime_from_summary(rows: &[SummaryRow]) -> Vec<CpuTimeRow> {
    rows.iter()
        .map(|r| {
            let total = r.path_cpu + r.mission_cpu;
            let share = |x: f64| if total > 0.0 { x / total } else { 0.0 };
            CpuTimeRow {
                run: r.run,
                path_cpu: r.path_cpu,
                mission_cpu: r.mission_cpu,
                compute_total: r.compute_total,
                path_share: share(r.path_cpu),
                mission_share: share(r.mission_cpu),
            }
        })
        .collect()
}

pub fn cputime_from_trace(events: &[TraceEvent]) -> Vec<CpuCallRow> {
    events
        .iter()
        .filter_map(|e| match &e.kind {
            EventKind::PathPlanned { compute_us, .. } => Some(("path", *compute_us)),
            EventKind::MissionPlanned { compute_us, .. } => Some(("mission", *compute_us)),
            _ => None,
        }
        .map(|(planner, us)| CpuCallRow {
            seq: e.seq,
            planner: planner.into(),
            compute_s: to_seconds(us),
        }))
        .collect()
}

/// Writes `kind` derived from `input` to `out`; returns the row count.
///
/// A `.csv` input is read as a summary table (timebudget and cputime only);
/// anything else as a JSONL trace. From a trace, cputime lists every planner
/// call instead of per-run totals.
pub fn export(input: &Path, kind: PlotKind, opts: PlotOptions, out: &Path) -> Result<usize> {
    if !input.exists() {
        return Err(Error::io(input, std::io::ErrorKind::NotFound.into()));
    }
    let is_summary = input.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_summary {
        let rows: Vec<SummaryRow> = read_csv(input)?;
        return match kind {
            PlotKind::TimeBudget => write(out, TIMEBUDGET_HEADER, &timebudget_from_summary(&rows)),
            PlotKind::CpuTime => write(out, CPUTIME_HEADER, &cputime_from_summary(&rows)),
            _ => Err(Error::Plot(format!("{kind} needs a trace, not a summary table"))),
        };
    }
    let events = read_trace(input)?;
    match kind {
        PlotKind::Convergence => write(out, CONVERGENCE_HEADER, &convergence(&events, opts)?),
        PlotKind::Path3d => write(out, PATH3D_HEADER, &path3d(&events)),
        PlotKind::TimeBudget => write(out, TIMEBUDGET_HEADER, &timebudget_from_trace(&events)),
        PlotKind::CpuTime => write(out, CPUCALLS_HEADER, &cputime_from_trace(&events)),
    }
}

fn write<T: Serialize>(out: &Path, header: &str, rows: &[T]) -> Result<usize> {
    write_csv(out, header, rows)?;
    Ok(rows.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header_of<T: Serialize>(row: &T) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(row).unwrap();
        String::from_utf8(w.into_inner().unwrap()).unwrap().lines().next().unwrap().into()
    }

    #[test]
    fn headers_match_row_fields() {
        assert_eq!(
            header_of(&ConvergenceRow {
                iteration: 0,
                best_cost: 0.0,
                mean_cost: 0.0,
                mean_violation: 0.0
            }),
            CONVERGENCE_HEADER
        );
        assert_eq!(
            header_of(&Path3dRow {
                s: 0.0,
                x: 0.0,
                y: 0.0,
                z: 0.0,
                psi: 0.0,
                theta: 0.0
            }),
            PATH3D_HEADER
        );
        assert_eq!(
            header_of(&TimeBudgetRow {
                run: 0,
                t_mission: 0.0,
                t_residual: 0.0
            }),
            TIMEBUDGET_HEADER
        );
        assert_eq!(
            header_of(&CpuTimeRow {
                run: 0,
                path_cpu: 0.0,
                mission_cpu: 0.0,
                compute_total: 0.0,
                path_share: 0.0,
                mission_share: 0.0
            }),
            CPUTIME_HEADER
        );
        assert_eq!(
            header_of(&CpuCallRow {
                seq: 0,
                planner: "path".into(),
                compute_s: 0.0
            }),
            CPUCALLS_HEADER
        );
    }

    #[test]
    fn kinds_parse_and_unknown_lists_all() {
        for k in PlotKind::ALL {
            assert_eq!(k.name().parse::<PlotKind>().unwrap(), k);
        }
        let msg = "heatmap".parse::<PlotKind>().unwrap_err().to_string();
        for k in PlotKind::ALL {
            assert!(msg.contains(k.name()), "{msg}");
        }
    }

    #[test]
    fn cpu_shares_sum_to_one() {
        let row = SummaryRow {
            run: 3,
            seed: 3,
            outcome: "success".into(),
            t_available: 1.0,
            t_mission: 0.5,
            t_residual: 0.5,
            mission_replans: 0,
            path_calls: 1,
            path_replans: 0,
            legs: 1,
            initial_tasks: 1,
            initial_priority: 1.0,
            initial_expected: 1.0,
            cost_mission: 1.0,
            cost_total: 1.0,
            compute_total: 4.0,
            path_cpu: 3.0,
            mission_cpu: 1.0,
            collision_samples: 0,
        };
        let c = &cputime_from_summary(&[row])[0];
        assert_eq!((c.path_share, c.mission_share), (0.75, 0.25));
    }
}
