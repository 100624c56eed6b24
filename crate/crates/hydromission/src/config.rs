//! Scenario files.
//!
//! A scenario is one JSON object. Every key is optional and unknown keys are
//! rejected. Relative file paths resolve against the scenario file's
//! directory. [`ScenarioConfig::resolved_json`] gives the config with every
//! default filled in and paths made absolute; feeding it back reproduces the
//! same runs.

use std::path::{Path, PathBuf};

use hydromission_core::bbo::BboConfig;
use hydromission_core::env::{CurrentField, CurrentLayer, Obstacle, ObstacleKind, VortexNoise, VortexParams, DEFAULT_GROWTH_RATE};
use hydromission_core::executive::ExecutiveConfig;
use hydromission_core::mission::{GraphSpec, MissionCostParams, MissionPlannerConfig};
use hydromission_core::pathplan::{PathPlannerConfig, PenaltyWeights, SplineConfig, VehicleModel};
use hydromission_core::Vec3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference text for `--help`: every key with its default.
pub const CONFIG_KEYS: &str = "\
SCENARIO KEYS (JSON; all optional, unknown keys rejected)
  name                        scenario label                            \"scenario\"
  seed                        run seed used by `run` without --seed    0
  t_available                 mission time budget, s                    14400
  output                      output directory                          none
  map.file                    binary PGM chart, or raw 8-bit grid with
                              a `<file>.json` sidecar {width, height,
                              cell_size}; absent means open water       none
  map.width, map.height       open-water grid size, cells               1000, 1000
  map.cell_size               cell edge, m                              10
  map.depth                   depth extent, m                           1000
  field.layers                depth bands                               4
  field.layer_thickness       band thickness, m                         250
  field.singular_radius       no-flow radius at vortex centres, m       1
  field.min_radius            floor on evolving vortex radii, m         10
  field.vortices[]            {layer, center [x, y], strength, radius,
                              vertical_scale 0.1, update_rate 0,
                              noise {center_x, center_y, radius,
                              strength}}
  obstacles.growth_rate       boundary growth per unit uncertainty, 1/s 0.01
  obstacles.roster[]          {kind static|afloat|self_motivated,
                              position [x, y, z], radius, uncertainty 1,
                              velocity [0, 0, 0]}
  graph.nodes                 waypoints                                 40
  graph.neighbors             links per waypoint                        5
  graph.priority_range        task priority interval                    [1, 10]
  graph.duration_range        task duration interval, s                 [60, 600]
  graph.depth_range           waypoint depth interval, m                [0, 1000]
  graph.max_attempts          redraws until start and end connect       50
  graph.clearance             waypoint stand-off from obstacle
                              boundaries grown over t_available, m      100
  graph.file                  explicit roster {waypoints [[x, y, z]],
                              edges [{a, b, duration, priority}], start,
                              destination}; replaces generation         none
  vehicle.speed               water-referenced speed, m/s               2
  vehicle.u_max               surge limit, m/s                          3.5
  vehicle.v_min, v_max        sway limits, m/s                          -3.5, 3.5
  vehicle.psi_min, psi_max    heading change per sample, rad            -0.35, 0.35
  bbo.path, bbo.mission       {pop_size, iterations, max_immigration,
                              max_emigration, max_mutation, max_species,
                              elites, rate_model {kind rank_linear |
                              constant, immigration, emigration},
                              survivor truncation|generational}
                              path: 100/100 rank_linear
                              mission: 150/200 constant 0.8/0.2
  path.spline                 {control_points 6, order 3,
                              samples_per_span 20, bounds_margin 0.25}
  path.weights                {surge 50, sway 50, heading 50,
                              collision 10000}
  path.warm_fraction          replan population share seeded warm       0.3
  path.warm_jitter            warm copy jitter, share of bound range    0.02
  path.mutation_scale         mutation std, share of bound range        0.1
  mission.cost                {phi1 1, phi2 100, overrun_penalty 1e6}
  mission.mutation_sigma      priority mutation std                     30
  executive.reserve_fraction  budget share held back when planning      0.03
  executive.sensor_range      obstacle sensing range, m                 2000
  executive.sensing_noise     position noise per uncertainty unit       1
  executive.obstacle_margin   planning inflation, uncertainty units     4
  executive.checkpoints       sensing checkpoints per leg               4
  executive.path_attempts     plans per leg before accepting a hit      3
  executive.t_series          field update steps per leg                1
  executive.nanos_per_unit    virtual compute clock rate                20
";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: u64,
    pub t_available: f64,
    pub output: Option<PathBuf>,
    pub map: MapConfig,
    pub field: FieldConfig,
    pub obstacles: ObstacleConfig,
    pub graph: GraphConfig,
    pub vehicle: VehicleModel,
    pub bbo: BboSection,
    pub path: PathSection,
    pub mission: MissionSection,
    pub executive: ExecutiveSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "scenario".into(),
            seed: 0,
            t_available: 14_400.0,
            output: None,
            map: MapConfig::default(),
            field: FieldConfig::default(),
            obstacles: ObstacleConfig::default(),
            graph: GraphConfig::default(),
            vehicle: VehicleModel::default(),
            bbo: BboSection::default(),
            path: PathSection::default(),
            mission: MissionSection::default(),
            executive: ExecutiveSection::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MapConfig {
    pub file: Option<PathBuf>,
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
    pub depth: f64,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            file: None,
            width: 1000,
            height: 1000,
            cell_size: 10.0,
            depth: 1000.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldConfig {
    pub layers: usize,
    pub layer_thickness: f64,
    pub singular_radius: f64,
    pub min_radius: f64,
    pub vortices: Vec<VortexConfig>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        let calm = CurrentField::default();
        Self {
            layers: calm.layers.len(),
            layer_thickness: calm.layer_thickness,
            singular_radius: calm.singular_radius,
            min_radius: calm.min_radius,
            vortices: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VortexConfig {
    pub layer: usize,
    pub center: [f64; 2],
    pub strength: f64,
    pub radius: f64,
    pub vertical_scale: f64,
    pub update_rate: f64,
    pub noise: NoiseConfig,
}

impl Default for VortexConfig {
    fn default() -> Self {
        let v = VortexParams::new([5000.0, 5000.0], 2500.0, 1000.0);
        Self {
            layer: 0,
            center: v.center,
            strength: v.strength,
            radius: v.radius,
            vertical_scale: v.vertical_scale,
            update_rate: v.update_rate,
            noise: NoiseConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub center_x: f64,
    pub center_y: f64,
    pub radius: f64,
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObstacleConfig {
    pub growth_rate: f64,
    pub roster: Vec<ObstacleSpec>,
}

impl Default for ObstacleConfig {
    fn default() -> Self {
        Self {
            growth_rate: DEFAULT_GROWTH_RATE,
            roster: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindConfig {
    Static,
    Afloat,
    SelfMotivated,
}

impl From<KindConfig> for ObstacleKind {
    fn from(k: KindConfig) -> Self {
        match k {
            KindConfig::Static => ObstacleKind::Static,
            KindConfig::Afloat => ObstacleKind::Afloat,
            KindConfig::SelfMotivated => ObstacleKind::SelfMotivated,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObstacleSpec {
    pub kind: KindConfig,
    pub position: [f64; 3],
    pub radius: f64,
    pub uncertainty: f64,
    pub velocity: [f64; 3],
}

impl Default for ObstacleSpec {
    fn default() -> Self {
        Self {
            kind: KindConfig::Static,
            position: [5000.0, 5000.0, 500.0],
            radius: 100.0,
            uncertainty: 1.0,
            velocity: [0.0; 3],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphConfig {
    pub nodes: usize,
    pub neighbors: usize,
    pub priority_range: [f64; 2],
    pub duration_range: [f64; 2],
    pub depth_range: [f64; 2],
    pub max_attempts: usize,
    pub clearance: f64,
    pub file: Option<PathBuf>,
}

impl Default for GraphConfig {
    fn default() -> Self {
        let s = GraphSpec::default();
        Self {
            nodes: s.nodes,
            neighbors: s.neighbors,
            priority_range: s.priority_range,
            duration_range: s.duration_range,
            depth_range: s.depth_range,
            max_attempts: s.max_attempts,
            clearance: 100.0,
            file: None,
        }
    }
}

impl GraphConfig {
    pub fn spec(&self) -> GraphSpec {
        GraphSpec {
            nodes: self.nodes,
            neighbors: self.neighbors,
            priority_range: self.priority_range,
            duration_range: self.duration_range,
            depth_range: self.depth_range,
            max_attempts: self.max_attempts,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BboSection {
    pub path: BboConfig,
    pub mission: BboConfig,
}

impl Default for BboSection {
    fn default() -> Self {
        Self {
            path: BboConfig::path_default(),
            mission: BboConfig::mission_default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathSection {
    pub spline: SplineConfig,
    pub weights: PenaltyWeights,
    pub warm_fraction: f64,
    pub warm_jitter: f64,
    pub mutation_scale: f64,
}

impl Default for PathSection {
    fn default() -> Self {
        let p = PathPlannerConfig::default();
        Self {
            spline: p.spline,
            weights: p.weights,
            warm_fraction: p.warm_fraction,
            warm_jitter: p.warm_jitter,
            mutation_scale: p.mutation_scale,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MissionSection {
    pub cost: MissionCostParams,
    pub mutation_sigma: f64,
}

impl Default for MissionSection {
    fn default() -> Self {
        let m = MissionPlannerConfig::default();
        Self {
            cost: m.cost,
            mutation_sigma: m.mutation_sigma,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExecutiveSection {
    pub reserve_fraction: f64,
    pub sensor_range: f64,
    pub sensing_noise: f64,
    pub obstacle_margin: f64,
    pub checkpoints: usize,
    pub path_attempts: usize,
    pub t_series: usize,
    pub nanos_per_unit: u64,
}

impl Default for ExecutiveSection {
    fn default() -> Self {
        let e = ExecutiveConfig::default();
        Self {
            reserve_fraction: e.reserve_fraction,
            sensor_range: e.sensor_range,
            sensing_noise: e.sensing_noise,
            obstacle_margin: e.obstacle_margin,
            checkpoints: e.checkpoints,
            path_attempts: e.path_attempts,
            t_series: e.field_steps,
            nanos_per_unit: 20,
        }
    }
}

impl ScenarioConfig {
    /// Reads, parses, resolves paths against the file's directory and
    /// validates.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text, path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base).map_err(|e| Error::io(base, e))?;
        cfg.validate().map_err(|message| Error::Invalid {
            path: path.to_path_buf(),
            message,
        })?;
        Ok(cfg)
    }

    /// Parses JSON text; `origin` only labels diagnostics.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })
    }

    /// Makes `map.file` and `graph.file` absolute.
    pub fn resolve_paths(&mut self, base: &Path) -> std::io::Result<()> {
        let base = std::path::absolute(base)?;
        for p in [&mut self.map.file, &mut self.graph.file].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be positive, got {v}"))
            }
        };
        positive("t_available", self.t_available)?;
        positive("map.cell_size", self.map.cell_size)?;
        positive("map.depth", self.map.depth)?;
        positive("field.layer_thickness", self.field.layer_thickness)?;
        if self.map.file.is_none() && (self.map.width == 0 || self.map.height == 0) {
            return Err("map.width and map.height must be at least 1".into());
        }
        if self.field.layers == 0 {
            return Err("field.layers must be at least 1".into());
        }
        for (i, v) in self.field.vortices.iter().enumerate() {
            if v.layer >= self.field.layers {
                return Err(format!(
                    "field.vortices[{i}].layer is {}, but there are {} layers",
                    v.layer, self.field.layers
                ));
            }
            positive(&format!("field.vortices[{i}].radius"), v.radius)?;
        }
        for (i, o) in self.obstacles.roster.iter().enumerate() {
            positive(&format!("obstacles.roster[{i}].radius"), o.radius)?;
            if o.uncertainty < 0.0 {
                return Err(format!("obstacles.roster[{i}].uncertainty must not be negative"));
            }
        }
        if self.graph.file.is_none() && self.graph.nodes < 2 {
            return Err("graph.nodes must be at least 2".into());
        }
        for (name, r) in [
            ("graph.priority_range", self.graph.priority_range),
            ("graph.duration_range", self.graph.duration_range),
            ("graph.depth_range", self.graph.depth_range),
        ] {
            if !(r[0] <= r[1]) {
                return Err(format!("{name} must be ordered low to high"));
            }
        }
        self.vehicle.validate().map_err(str::to_string)?;
        self.bbo.path.validate().map_err(|e| format!("bbo.path: {e}"))?;
        self.bbo.mission.validate().map_err(|e| format!("bbo.mission: {e}"))?;
        let s = &self.path.spline;
        if s.order < 2 || s.control_points < s.order || s.samples_per_span == 0 {
            return Err("path.spline needs order >= 2, control_points >= order and samples_per_span >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.path.warm_fraction) {
            return Err("path.warm_fraction must lie in [0, 1]".into());
        }
        if !(0.0..1.0).contains(&self.executive.reserve_fraction) {
            return Err("executive.reserve_fraction must lie in [0, 1)".into());
        }
        if self.executive.checkpoints == 0 || self.executive.path_attempts == 0 {
            return Err("executive.checkpoints and executive.path_attempts must be at least 1".into());
        }
        Ok(())
    }

    pub fn current_field(&self) -> CurrentField {
        let f = &self.field;
        let mut field = CurrentField::calm(f.layers, f.layer_thickness);
        field.singular_radius = f.singular_radius;
        field.min_radius = f.min_radius;
        for v in &f.vortices {
            let mut p = VortexParams::new(v.center, v.strength, v.radius);
            p.vertical_scale = v.vertical_scale;
            p.update_rate = v.update_rate;
            p.noise = VortexNoise {
                center_x: v.noise.center_x,
                center_y: v.noise.center_y,
                radius: v.noise.radius,
                strength: v.noise.strength,
            };
            let layer: &mut CurrentLayer = &mut field.layers[v.layer];
            layer.vortices.push(p);
        }
        field
    }

    pub fn obstacles(&self) -> Vec<Obstacle> {
        self.obstacles
            .roster
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let [x, y, z] = o.position;
                let mut ob = Obstacle::new(i as u32, o.kind.into(), Vec3::new(x, y, z), o.radius, o.uncertainty);
                let [vx, vy, vz] = o.velocity;
                ob.velocity = Vec3::new(vx, vy, vz);
                ob
            })
            .collect()
    }

    pub fn executive_config(&self) -> ExecutiveConfig {
        let e = &self.executive;
        ExecutiveConfig {
            vehicle: self.vehicle,
            path: PathPlannerConfig {
                bbo: self.bbo.path.clone(),
                spline: self.path.spline,
                weights: self.path.weights,
                warm_fraction: self.path.warm_fraction,
                warm_jitter: self.path.warm_jitter,
                mutation_scale: self.path.mutation_scale,
            },
            mission: MissionPlannerConfig {
                bbo: self.bbo.mission.clone(),
                cost: self.mission.cost,
                mutation_sigma: self.mission.mutation_sigma,
                reserve: 0.0,
            },
            reserve_fraction: e.reserve_fraction,
            sensor_range: e.sensor_range,
            sensing_noise: e.sensing_noise,
            obstacle_margin: e.obstacle_margin,
            checkpoints: e.checkpoints,
            path_attempts: e.path_attempts,
            field_steps: e.t_series,
        }
    }

    /// Pretty JSON of the resolved config, newline-terminated.
    pub fn resolved_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}

/// serde_json appends " at line L column C"; the position is reported
/// separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_all_defaults() {
        let c = ScenarioConfig::parse("{}", Path::new("x.json")).unwrap();
        assert_eq!(c, ScenarioConfig::default());
        assert_eq!(c.executive_config(), ExecutiveConfig::default());
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let text = "{\n  \"seed\": 3,\n  \"graph\": {\n    \"nodez\": 4\n  }\n}";
        match ScenarioConfig::parse(text, Path::new("bad.json")) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 4);
                assert!(message.contains("nodez"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn resolved_json_round_trips() {
        let mut c = ScenarioConfig::default();
        c.field.vortices.push(VortexConfig::default());
        c.obstacles.roster.push(ObstacleSpec::default());
        let back = ScenarioConfig::parse(&c.resolved_json(), Path::new("echo.json")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn vortex_layer_must_exist() {
        let mut c = ScenarioConfig::default();
        c.field.vortices.push(VortexConfig {
            layer: 7,
            ..VortexConfig::default()
        });
        assert!(c.validate().unwrap_err().contains("layer"));
    }

    #[test]
    fn help_lists_every_top_level_key() {
        let v = serde_json::to_value(ScenarioConfig::default()).unwrap();
        for (k, sub) in v.as_object().unwrap() {
            assert!(CONFIG_KEYS.contains(k.as_str()), "{k}");
            if let Some(obj) = sub.as_object() {
                for kk in obj.keys() {
                    assert!(CONFIG_KEYS.contains(kk.as_str()), "{k}.{kk}");
                }
            }
        }
    }
}
