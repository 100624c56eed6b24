//! A loaded scenario: config plus clustered terrain, ready to run.

use std::path::Path;
use std::sync::Arc;

use hydromission_core::env::{TerrainGrid, WorldSnapshot};
use hydromission_core::executive::{run_mission_with, MissionScenario, MissionTrace, NoHook, VirtualClock};
use hydromission_core::mission::TaskGraph;
use hydromission_core::rng::{self, stream};
use hydromission_core::Vec3;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::map::load_terrain;

/// Explicit waypoint roster, as referenced by `graph.file`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub waypoints: Vec<[f64; 3]>,
    pub edges: Vec<EdgeSpec>,
    pub start: usize,
    pub destination: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub a: usize,
    pub b: usize,
    pub duration: f64,
    pub priority: f64,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub terrain: Arc<TerrainGrid>,
    roster: Option<TaskGraph>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_config(ScenarioConfig::load(path)?)
    }

    pub fn from_config(config: ScenarioConfig) -> Result<Self> {
        let terrain = Arc::new(load_terrain(&config.map)?);
        let roster = match &config.graph.file {
            Some(p) => Some(read_graph(p)?),
            None => None,
        };
        Ok(Self {
            config,
            terrain,
            roster,
        })
    }

    /// Initial world: field and obstacles as configured, time zero.
    pub fn world(&self) -> WorldSnapshot {
        let mut w = WorldSnapshot::new(self.terrain.clone(), self.config.current_field());
        w.obstacles = self.config.obstacles();
        w.growth_rate = self.config.obstacles.growth_rate;
        w
    }

    /// Task graph for a run: the explicit roster if given, otherwise drawn
    /// from the run seed's graph stream with waypoints kept clear of every
    /// obstacle's boundary as grown over the whole budget.
    pub fn graph(&self, seed: u64) -> Result<TaskGraph> {
        if let Some(g) = &self.roster {
            return Ok(g.clone());
        }
        let c = &self.config;
        let keep_out: Vec<(Vec3, f64)> = self
            .world()
            .obstacles
            .iter()
            .map(|o| {
                let r = o.radius + c.obstacles.growth_rate * o.uncertainty * c.t_available + c.graph.clearance;
                (o.position, r)
            })
            .collect();
        let accept = |p: Vec3| keep_out.iter().all(|&(q, r)| (p - q).norm() > r);
        Ok(TaskGraph::generate_with(
            &c.graph.spec(),
            &self.terrain,
            &mut rng::derive(seed, stream::GRAPH),
            accept,
        )?)
    }

    pub fn mission(&self, seed: u64) -> Result<MissionScenario> {
        Ok(MissionScenario {
            world: self.world(),
            graph: self.graph(seed)?,
            t_available: self.config.t_available,
        })
    }

    pub fn run(&self, seed: u64) -> Result<MissionTrace> {
        let scenario = self.mission(seed)?;
        let mut clock = VirtualClock {
            nanos_per_unit: self.config.executive.nanos_per_unit,
        };
        Ok(run_mission_with(
            &scenario,
            &self.config.executive_config(),
            seed,
            &mut clock,
            &mut NoHook,
        ))
    }
}

fn read_graph(path: &Path) -> Result<TaskGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let g: GraphFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let wp = g.waypoints.iter().map(|&[x, y, z]| Vec3::new(x, y, z)).collect();
    let edges: Vec<_> = g.edges.iter().map(|e| (e.a, e.b, e.duration, e.priority)).collect();
    Ok(TaskGraph::from_edges(wp, &edges, g.start, g.destination)?)
}
