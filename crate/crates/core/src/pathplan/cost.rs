//! Travel time and penalty terms of a sampled path.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::kinematics::{compose_velocity, orientations, VehicleModel};
use super::spline::SplineBasis;
use super::PathError;
use crate::env::{CellClass, WorldSnapshot};
use crate::geom::{Aabb, Vec3};
use crate::math;

/// Penalty weight per unit of violation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PenaltyWeights {
    pub surge: f64,
    pub sway: f64,
    pub heading: f64,
    /// Per sample in coast or inside an obstacle.
    pub collision: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self {
            surge: 50.0,
            sway: 50.0,
            heading: 50.0,
            collision: 1e4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplineConfig {
    pub control_points: usize,
    pub order: usize,
    pub samples_per_span: usize,
    /// Bounds box grows by this fraction of the start–goal distance on every
    /// side.
    pub bounds_margin: f64,
}

impl Default for SplineConfig {
    fn default() -> Self {
        Self {
            control_points: 6,
            order: 3,
            samples_per_span: 20,
            bounds_margin: 0.25,
        }
    }
}

/// Itemized cost of one path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub length: f64,
    /// `length / |v|`.
    pub nominal_time: f64,
    /// Time along the path at the tangential ground speed.
    pub ground_time: f64,
    /// Weighted surge, sway and heading terms.
    pub surge: f64,
    pub sway: f64,
    pub heading: f64,
    /// Weighted collision term (coast, obstacles, uncertain-cell risk).
    pub collision: f64,
    /// Samples in coast cells or inside an obstacle.
    pub collision_samples: usize,
    pub cost: f64,
}

impl CostBreakdown {
    pub fn violation(&self) -> f64 {
        self.surge + self.sway + self.heading + self.collision
    }
}

/// One sample of a path: position, orientation and composed velocity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    /// Arc length from the first sample, m.
    pub s: f64,
    pub position: Vec3,
    pub psi: f64,
    pub theta: f64,
    /// `(u, v, w)`, `w` positive up.
    pub velocity: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathCandidate {
    pub control_points: Vec<Vec3>,
    pub samples: Vec<PathSample>,
    pub breakdown: CostBreakdown,
}

impl PathCandidate {
    pub fn positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.samples.iter().map(|s| s.position)
    }
}

/// A start–goal pair to connect through a fixed world.
#[derive(Clone, Debug)]
pub struct PathProblem<'w> {
    pub start: Vec3,
    pub goal: Vec3,
    pub world: &'w WorldSnapshot,
    pub vehicle: VehicleModel,
    pub spline: SplineConfig,
    pub weights: PenaltyWeights,
    pub bounds: Aabb,
    pub(crate) basis: SplineBasis,
}

/// Box around the start–goal segment, padded by `margin` times its length and
/// clipped to `extent`.
pub fn segment_bounds(start: Vec3, goal: Vec3, margin: f64, extent: &Aabb) -> Aabb {
    let pad = margin * start.distance(goal);
    let pad = Vec3::new(pad, pad, pad);
    let b = Aabb::new(start.component_min(goal) - pad, start.component_max(goal) + pad);
    b.intersect(extent)
}

impl<'w> PathProblem<'w> {
    pub fn new(
        start: Vec3,
        goal: Vec3,
        world: &'w WorldSnapshot,
        vehicle: VehicleModel,
        spline: SplineConfig,
        weights: PenaltyWeights,
    ) -> Result<Self, PathError> {
        vehicle.validate().map_err(PathError::Vehicle)?;
        if start.distance(goal) == 0.0 {
            return Err(PathError::StartIsGoal);
        }
        let extent = world.extent();
        for (which, p) in [("start", start), ("goal", goal)] {
            if !extent.contains(p) {
                return Err(PathError::OutOfBounds { which, point: p });
            }
            if world.terrain.class_at(p) == CellClass::Coast {
                return Err(PathError::InCoast { which, point: p });
            }
        }
        let basis = SplineBasis::new(spline.control_points, spline.order, spline.samples_per_span)?;
        let bounds = segment_bounds(start, goal, spline.bounds_margin, &extent);
        Ok(Self {
            start,
            goal,
            world,
            vehicle,
            spline,
            weights,
            bounds,
            basis,
        })
    }

    /// Number of free (unpinned) control points.
    pub fn free_points(&self) -> usize {
        self.spline.control_points - 2
    }

    /// Control polygon from the free coordinates `[x1, y1, z1, x2, ...]`.
    pub fn control_points(&self, free: &[f64]) -> Vec<Vec3> {
        let mut ctrl = Vec::with_capacity(self.spline.control_points);
        ctrl.push(self.start);
        ctrl.extend(free.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])));
        ctrl.push(self.goal);
        ctrl
    }

    pub fn sample_positions(&self, ctrl: &[Vec3]) -> Vec<Vec3> {
        self.basis.evaluate(ctrl)
    }

    /// Penalty for one position: 1 in coast or an obstacle, the risk scalar
    /// in uncertain cells, else 0. Second value flags a hard hit.
    #[inline]
    fn collision_at(&self, p: Vec3) -> (f64, bool) {
        match self.world.terrain.class_at(p) {
            CellClass::Coast => (1.0, true),
            _ if self.world.in_obstacle(p) => (1.0, true),
            CellClass::Uncertain => (self.world.terrain.risk_at(p), false),
            CellClass::Water => (0.0, false),
        }
    }

    fn surge_sway(&self, vel: Vec3) -> (f64, f64) {
        let v = &self.vehicle;
        let surge = (vel.x - v.u_max).max(0.0);
        let sway = (vel.y - v.v_max).max(0.0) + (v.v_min - vel.y).max(0.0);
        (surge, sway)
    }

    fn heading_excess(&self, dpsi: f64) -> f64 {
        (dpsi - self.vehicle.psi_max).max(0.0) + (self.vehicle.psi_min - dpsi).max(0.0)
    }

    fn finish(&self, mut b: CostBreakdown, surge: f64, sway: f64, heading: f64, collision: f64) -> CostBreakdown {
        b.nominal_time = b.length / self.vehicle.speed;
        b.surge = self.weights.surge * surge;
        b.sway = self.weights.sway * sway;
        b.heading = self.weights.heading * heading;
        b.collision = self.weights.collision * collision;
        b.cost = b.nominal_time + b.violation();
        b
    }

    /// Cost of a sampled path, written directly from the orientation and
    /// velocity composition formulas; also returns the per-sample states.
    pub fn assess(&self, positions: &[Vec3]) -> (CostBreakdown, Vec<PathSample>) {
        let speed = self.vehicle.speed;
        let orient = orientations(positions);
        let last_seg = orient.len().saturating_sub(1);
        let mut b = CostBreakdown::default();
        let (mut surge, mut sway, mut heading, mut collision) = (0.0, 0.0, 0.0, 0.0);
        let mut samples = Vec::with_capacity(positions.len());
        let mut s = 0.0;
        for (j, &p) in positions.iter().enumerate() {
            if j > 0 {
                s += positions[j - 1].distance(p);
            }
            let (psi, theta) = orient.get(j.min(last_seg)).copied().unwrap_or((0.0, 0.0));
            let current = self.world.current(p);
            let vel = compose_velocity(speed, psi, theta, &current);
            let (su, sw) = self.surge_sway(vel);
            surge += su;
            sway += sw;
            if j > 0 && j <= last_seg {
                heading += self.heading_excess(math::wrap_angle(psi - orient[j - 1].0));
            }
            let (c, hard) = self.collision_at(p);
            collision += c;
            b.collision_samples += hard as usize;
            if j < orient.len() {
                let d = positions[j + 1] - p;
                let len = d.norm();
                if len > 0.0 {
                    let ground = Vec3::new(vel.x, vel.y, -vel.z);
                    let along = (ground.dot(d) / len).max(0.1 * speed);
                    b.ground_time += len / along;
                }
                b.length += len;
            }
            samples.push(PathSample {
                s,
                position: p,
                psi,
                theta,
                velocity: vel,
            });
        }
        (self.finish(b, surge, sway, heading, collision), samples)
    }

    /// Same result as [`assess`](Self::assess) without per-sample storage,
    /// using the unit tangent in place of the orientation angles.
    pub fn quick_cost(&self, positions: &[Vec3]) -> CostBreakdown {
        let speed = self.vehicle.speed;
        let (cos_hi, cos_lo) = (
            math::cos(self.vehicle.psi_max.min(core::f64::consts::PI)),
            math::cos(self.vehicle.psi_min.max(-core::f64::consts::PI)),
        );
        let symmetric = self.vehicle.psi_min == -self.vehicle.psi_max && self.vehicle.psi_max >= 0.0;
        let mut b = CostBreakdown::default();
        let (mut surge, mut sway, mut heading, mut collision) = (0.0, 0.0, 0.0, 0.0);
        let m = positions.len();
        // Unit tangent of the current segment (carried over zero-length ones).
        let mut tangent = Vec3::new(1.0, 0.0, 0.0);
        let mut horiz = (1.0, 0.0);
        let mut prev_horiz: Option<(f64, f64)> = None;
        for j in 0..m {
            let p = positions[j];
            if j + 1 < m {
                let d = positions[j + 1] - p;
                let len = d.norm();
                b.length += len;
                if len > 0.0 {
                    tangent = d * (1.0 / len);
                    let h = math::sqrt(d.x * d.x + d.y * d.y);
                    if h > 0.0 {
                        horiz = (d.x / h, d.y / h);
                    } else {
                        // Vertical segment: heading is the (zero) carried angle
                        // of atan2(0, 0) unless an earlier segment set one.
                        horiz = prev_horiz.unwrap_or((1.0, 0.0));
                    }
                }
                if let Some(ph) = prev_horiz {
                    let dot = ph.0 * horiz.0 + ph.1 * horiz.1;
                    let needs = if symmetric { dot < cos_hi } else { dot < cos_hi.max(cos_lo) };
                    if needs {
                        let cross = ph.0 * horiz.1 - ph.1 * horiz.0;
                        heading += self.heading_excess(math::atan2(cross, dot));
                    }
                }
                prev_horiz = Some(horiz);
            }
            let current = self.world.field.velocity(p);
            // Vehicle part along the tangent, expressed as (u, v, w-up).
            let vel = Vec3::new(
                speed * tangent.x + current.x,
                speed * tangent.y + current.y,
                -speed * tangent.z + current.z,
            );
            let (su, sw) = self.surge_sway(vel);
            surge += su;
            sway += sw;
            let (c, hard) = self.collision_at(p);
            collision += c;
            b.collision_samples += hard as usize;
            if j + 1 < m {
                let d = positions[j + 1] - p;
                let len = d.norm();
                if len > 0.0 {
                    let ground = Vec3::new(vel.x, vel.y, -vel.z);
                    let along = (ground.dot(d) / len).max(0.1 * speed);
                    b.ground_time += len / along;
                }
            }
        }
        self.finish(b, surge, sway, heading, collision)
    }

    /// Full candidate for a control polygon.
    pub fn candidate(&self, ctrl: Vec<Vec3>) -> PathCandidate {
        let positions = self.sample_positions(&ctrl);
        let (breakdown, samples) = self.assess(&positions);
        PathCandidate {
            control_points: ctrl,
            samples,
            breakdown,
        }
    }

    /// Straight control polygon from start to goal.
    pub fn straight_line(&self) -> Vec<Vec3> {
        let n = self.spline.control_points;
        (0..n)
            .map(|i| self.start.lerp(self.goal, i as f64 / (n - 1) as f64))
            .collect()
    }
}

/// Counts samples of `path` in coast cells or inside obstacles of `world`.
pub fn collision_samples(world: &WorldSnapshot, path: impl IntoIterator<Item = Vec3>) -> usize {
    path.into_iter().filter(|&p| world.collides(p)).count()
}
