//! Local path planning: B-spline paths between two waypoints, optimized with
//! BBO for travel time under vehicle limits, terrain and obstacles.

mod cost;
mod kinematics;
mod planner;
pub mod spline;

use thiserror::Error;

use crate::bbo::BboError;
use crate::geom::Vec3;

pub use cost::{
    collision_samples, segment_bounds, CostBreakdown, PathCandidate, PathProblem, PathSample, PenaltyWeights,
    SplineConfig,
};
pub use kinematics::{compose_velocity, orientations, VehicleModel};
pub use planner::{plan_path, replan_path, warm_control_points, PathPlannerConfig, PlannedPath};
pub use spline::{evaluate_spline, SplineBasis};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("start and goal coincide")]
    StartIsGoal,
    #[error("{which} {point:?} lies in a coast cell")]
    InCoast { which: &'static str, point: Vec3 },
    #[error("{which} {point:?} lies outside the terrain")]
    OutOfBounds { which: &'static str, point: Vec3 },
    #[error("a spline of order {order} needs at least {order} control points (and order >= 2), got {n}")]
    Spline { n: usize, order: usize },
    #[error("samples per span must be positive")]
    Sampling,
    #[error("invalid vehicle model: {0}")]
    Vehicle(&'static str),
    #[error(transparent)]
    Bbo(#[from] BboError),
}

#[cfg(test)]
mod tests;
