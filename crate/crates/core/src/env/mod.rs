//! The operating world: terrain, currents, obstacles.

pub mod current;
pub mod obstacle;
pub mod terrain;

use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use current::{CurrentField, CurrentLayer, CurrentSample, VortexNoise, VortexParams};
pub use obstacle::{sense_obstacles, step_obstacles, Obstacle, ObstacleKind};
pub use terrain::{
    cluster_map, synthetic_archipelago, CellClass, ClusteredMap, GrayImage, SyntheticMap,
    TerrainError, TerrainGrid,
};

use crate::geom::{Aabb, Vec3};

/// Default growth of obstacle boundaries per unit uncertainty, 1/s.
pub const DEFAULT_GROWTH_RATE: f64 = 0.01;

/// Frozen view of the world that planners evaluate against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldSnapshot {
    pub time: f64,
    pub terrain: Arc<TerrainGrid>,
    pub field: CurrentField,
    pub obstacles: Vec<Obstacle>,
    pub growth_rate: f64,
}

impl WorldSnapshot {
    pub fn new(terrain: Arc<TerrainGrid>, field: CurrentField) -> Self {
        Self {
            time: 0.0,
            terrain,
            field,
            obstacles: Vec::new(),
            growth_rate: DEFAULT_GROWTH_RATE,
        }
    }

    /// Open water of the given extent with no current and no obstacles.
    pub fn empty(extent_m: f64, depth: f64) -> Self {
        let cells = (extent_m / 10.0) as usize;
        Self::new(
            Arc::new(TerrainGrid::open_water(cells, cells, 10.0, depth)),
            CurrentField::calm(4, depth / 4.0),
        )
    }

    pub fn extent(&self) -> Aabb {
        self.terrain.extent()
    }

    pub fn current(&self, p: Vec3) -> CurrentSample {
        self.field.sample(p)
    }

    /// True when `p` is inside any in-bounds obstacle's effective radius.
    #[inline]
    pub fn in_obstacle(&self, p: Vec3) -> bool {
        self.obstacles.iter().any(|o| o.contains(p, self.growth_rate))
    }

    /// Point collision test used for soundness checks: coast or obstacle.
    pub fn collides(&self, p: Vec3) -> bool {
        self.terrain.class_at(p) == CellClass::Coast || self.in_obstacle(p)
    }
}
