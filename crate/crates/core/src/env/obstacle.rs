use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::current::CurrentField;
use crate::geom::{Aabb, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObstacleKind {
    /// Fixed in place.
    Static,
    /// Drifts with the current.
    Afloat,
    /// Drifts with the current and moves under its own velocity.
    SelfMotivated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub id: u32,
    pub kind: ObstacleKind,
    pub position: Vec3,
    /// Nominal radius (half the diameter), m.
    pub radius: f64,
    /// Sensing uncertainty; also drives boundary growth.
    pub uncertainty: f64,
    /// Own velocity for self-motivated obstacles, zero otherwise.
    pub velocity: Vec3,
    /// Seconds since the obstacle was introduced.
    pub age: f64,
    /// Set once the obstacle drifts out of the terrain extent.
    pub out_of_bounds: bool,
}

impl Obstacle {
    pub fn new(id: u32, kind: ObstacleKind, position: Vec3, radius: f64, uncertainty: f64) -> Self {
        Self {
            id,
            kind,
            position,
            radius,
            uncertainty,
            velocity: Vec3::ZERO,
            age: 0.0,
            out_of_bounds: false,
        }
    }

    /// Collision boundary: `radius + growth * uncertainty * age`.
    pub fn effective_radius(&self, growth_rate: f64) -> f64 {
        self.radius + growth_rate * self.uncertainty * self.age
    }

    #[inline]
    pub fn contains(&self, p: Vec3, growth_rate: f64) -> bool {
        if self.out_of_bounds {
            return false;
        }
        let r = self.effective_radius(growth_rate);
        (p - self.position).norm_sq() < r * r
    }
}

/// Moves every obstacle forward by `dt` seconds. Vertical current is positive
/// upward, so it decreases depth.
pub fn step_obstacles(obstacles: &mut [Obstacle], field: &CurrentField, extent: &Aabb, dt: f64) {
    debug_assert!(dt > 0.0);
    for o in obstacles.iter_mut() {
        let drift = match o.kind {
            ObstacleKind::Static => Vec3::ZERO,
            ObstacleKind::Afloat => advection(field, o.position),
            ObstacleKind::SelfMotivated => advection(field, o.position) + o.velocity,
        };
        o.position += drift * dt;
        o.age += dt;
        if !extent.contains(o.position) {
            o.out_of_bounds = true;
        }
    }
}

fn advection(field: &CurrentField, p: Vec3) -> Vec3 {
    let c = field.velocity(p);
    Vec3::new(c.x, c.y, -c.z)
}

/// What the sonar reports: in-range, in-bounds obstacles with each position
/// axis perturbed by `N(0, noise_scale * uncertainty)`.
pub fn sense_obstacles<R: Rng + ?Sized>(
    obstacles: &[Obstacle],
    vehicle: Vec3,
    sensor_range: f64,
    noise_scale: f64,
    rng: &mut R,
) -> Vec<Obstacle> {
    debug_assert!(sensor_range > 0.0);
    let mut seen = Vec::new();
    for o in obstacles {
        if o.out_of_bounds || (o.position - vehicle).norm() > sensor_range {
            continue;
        }
        let sigma = noise_scale * o.uncertainty;
        let mut observed = o.clone();
        if sigma > 0.0 {
            let n = Normal::new(0.0, sigma).expect("finite sigma");
            observed.position += Vec3::new(n.sample(rng), n.sample(rng), n.sample(rng));
        }
        seen.push(observed);
    }
    seen
}
