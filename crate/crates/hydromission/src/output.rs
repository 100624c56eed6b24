//! Traces, tables and the files a run leaves behind.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use hydromission_core::executive::{EventKind, MissionSummary, MissionTrace, TraceEvent, TriggerDecision};
use hydromission_core::Vec3;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SUMMARY_HEADER: &str = "run,seed,outcome,t_available,t_mission,t_residual,mission_replans,path_calls,\
path_replans,legs,initial_tasks,initial_priority,initial_expected,cost_mission,cost_total,compute_total,path_cpu,\
mission_cpu,collision_samples";

pub const LEGS_HEADER: &str =
    "run,leg,from,to,expected,realized,travel,nominal,length,decision,path_calls,path_replans,collision_samples";

pub const CURRENT_HEADER: &str = "layer,x,y,z,u,v,w";

/// One mission per row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub run: usize,
    pub seed: u64,
    pub outcome: String,
    pub t_available: f64,
    pub t_mission: f64,
    pub t_residual: f64,
    pub mission_replans: usize,
    pub path_calls: usize,
    pub path_replans: usize,
    pub legs: usize,
    pub initial_tasks: usize,
    pub initial_priority: f64,
    pub initial_expected: f64,
    pub cost_mission: f64,
    pub cost_total: f64,
    pub compute_total: f64,
    pub path_cpu: f64,
    pub mission_cpu: f64,
    pub collision_samples: usize,
}

impl SummaryRow {
    pub fn new(run: usize, seed: u64, s: &MissionSummary) -> Self {
        Self {
            run,
            seed,
            outcome: s.outcome.clone(),
            t_available: s.t_available,
            t_mission: s.t_mission,
            t_residual: s.t_residual,
            mission_replans: s.mission_replans,
            path_calls: s.path_calls,
            path_replans: s.path_replans,
            legs: s.legs,
            initial_tasks: s.initial_tasks,
            initial_priority: s.initial_priority,
            initial_expected: s.initial_expected,
            cost_mission: s.cost_mission,
            cost_total: s.cost_total,
            compute_total: s.compute_total,
            path_cpu: s.path_cpu,
            mission_cpu: s.mission_cpu,
            collision_samples: s.collision_samples,
        }
    }
}

/// One flown leg per row: the paired expected and realized times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegRow {
    pub run: usize,
    pub leg: usize,
    pub from: usize,
    pub to: usize,
    pub expected: f64,
    pub realized: f64,
    pub travel: f64,
    pub nominal: f64,
    pub length: f64,
    /// `continue`, `replan_mission`, `arrival` (no check at the
    /// destination) or `exhausted` (budget ran out mid-leg).
    pub decision: String,
    pub path_calls: usize,
    pub path_replans: usize,
    pub collision_samples: usize,
}

pub fn leg_rows(run: usize, trace: &MissionTrace) -> Vec<LegRow> {
    let decision_of = |leg: usize| {
        trace.events.iter().find_map(|e| match &e.kind {
            EventKind::TriggerChecked { leg: l, decision, .. } if *l == leg => Some(*decision),
            _ => None,
        })
    };
    trace
        .ledger
        .legs
        .iter()
        .map(|l| LegRow {
            run,
            leg: l.index,
            from: l.from,
            to: l.to,
            expected: l.expected,
            realized: l.realized,
            travel: l.travel,
            nominal: l.nominal,
            length: l.length,
            decision: match (l.completed, decision_of(l.index)) {
                (false, _) => "exhausted",
                (true, Some(TriggerDecision::Continue)) => "continue",
                (true, Some(TriggerDecision::ReplanMission)) => "replan_mission",
                (true, None) => "arrival",
            }
            .into(),
            path_calls: l.path_calls,
            path_replans: l.path_replans,
            collision_samples: l.collision_samples,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurrentRow {
    pub layer: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

/// Current on a `cells` x `cells` grid at the mid-depth of every layer.
pub fn current_raster(world: &hydromission_core::env::WorldSnapshot, cells: usize) -> Vec<CurrentRow> {
    let ext = world.extent();
    let field = &world.field;
    let mut rows = Vec::with_capacity(field.layers.len() * cells * cells);
    for layer in 0..field.layers.len() {
        let z = (layer as f64 + 0.5) * field.layer_thickness;
        for j in 0..cells {
            for i in 0..cells {
                let x = ext.min.x + (i as f64 + 0.5) / cells as f64 * (ext.max.x - ext.min.x);
                let y = ext.min.y + (j as f64 + 0.5) / cells as f64 * (ext.max.y - ext.min.y);
                let c = field.velocity(Vec3::new(x, y, z));
                rows.push(CurrentRow {
                    layer,
                    x,
                    y,
                    z,
                    u: c.x,
                    v: c.y,
                    w: c.z,
                });
            }
        }
    }
    rows
}

/// Writes `header` then one record per row. The header is written even when
/// there are no rows.
pub fn write_csv<T: Serialize>(path: &Path, header: &str, rows: &[T]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{header}").map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<T>, _>>()?)
}

/// One event per line.
pub fn write_trace(path: &Path, trace: &MissionTrace) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for e in &trace.events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceEvent>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut events = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let e = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        events.push(e);
    }
    Ok(events)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}
