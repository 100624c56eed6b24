//! Layered vortex current field.
//!
//! Each depth band owns a set of Lamb–Oseen vortices. Horizontal velocity of
//! one vortex centred at `S0` with strength `k` and core radius `l`:
//!
//! ```text
//! r^2 = |S - S0|^2
//! u_c = -k (y - y0) (1 - exp(-r^2 / l^2)) / (2 pi r^2)
//! v_c =  k (x - x0) (1 - exp(-r^2 / l^2)) / (2 pi r^2)
//! ```
//!
//! The vertical component is a Gaussian bump with covariance `diag(l, l)`:
//!
//! ```text
//! w_c = g k exp(-r^2 / (2 l)) / (2 pi l)
//! ```
//!
//! `w_c` is positive upward (towards decreasing depth). Vortices in a band
//! superpose additively. Inside the singular radius the horizontal part is
//! taken as its limit value, zero.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::geom::Vec3;
use crate::math;

/// Standard deviations of the per-step parameter noise.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VortexNoise {
    pub center_x: f64,
    pub center_y: f64,
    pub radius: f64,
    pub strength: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexParams {
    /// Horizontal centre `(x0, y0)` in meters.
    pub center: [f64; 2],
    /// Circulation strength, m^2/s.
    pub strength: f64,
    /// Core radius, m. Always positive.
    pub radius: f64,
    /// Scale of the vertical component relative to the horizontal one.
    pub vertical_scale: f64,
    /// Update rate applied to the noise terms at each evolution step.
    pub update_rate: f64,
    pub noise: VortexNoise,
}

impl VortexParams {
    pub fn new(center: [f64; 2], strength: f64, radius: f64) -> Self {
        Self {
            center,
            strength,
            radius,
            vertical_scale: 0.1,
            update_rate: 0.0,
            noise: VortexNoise::default(),
        }
    }

    /// Covariance of the vertical bump, `diag(l, l)`.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        [[self.radius, 0.0], [0.0, self.radius]]
    }

    /// Velocity `(u_c, v_c, w_c)` induced by this vortex alone.
    #[inline]
    pub fn velocity(&self, x: f64, y: f64, singular_radius: f64) -> Vec3 {
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        let r2 = dx * dx + dy * dy;
        let l = self.radius;
        let w = self.vertical_scale * self.strength * math::exp(-r2 / (2.0 * l)) / (2.0 * PI * l);
        if r2 <= singular_radius * singular_radius {
            return Vec3::new(0.0, 0.0, w);
        }
        let swirl = self.strength * (1.0 - math::exp(-r2 / (l * l))) / (2.0 * PI * r2);
        Vec3::new(-dy * swirl, dx * swirl, w)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CurrentLayer {
    pub vortices: Vec<VortexParams>,
}

/// Current at one point, with the magnitude and direction angles used by the
/// vehicle kinematics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurrentSample {
    /// `(u_c, v_c, w_c)`, m/s; `w_c` positive upward.
    pub velocity: Vec3,
    pub magnitude: f64,
    /// `atan2(v_c, u_c)`.
    pub horizontal_dir: f64,
    /// `asin(w_c / |V_c|)`.
    pub vertical_dir: f64,
}

impl CurrentSample {
    pub fn from_velocity(velocity: Vec3) -> Self {
        let magnitude = velocity.norm();
        if magnitude > 0.0 {
            Self {
                velocity,
                magnitude,
                horizontal_dir: math::atan2(velocity.y, velocity.x),
                vertical_dir: math::asin((velocity.z / magnitude).clamp(-1.0, 1.0)),
            }
        } else {
            Self {
                velocity,
                magnitude: 0.0,
                horizontal_dir: 0.0,
                vertical_dir: 0.0,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurrentField {
    /// Ordered shallow to deep; layer `i` covers `z in [i, i+1) * thickness`.
    pub layers: Vec<CurrentLayer>,
    pub layer_thickness: f64,
    /// Radius around a vortex centre inside which horizontal flow is zero.
    pub singular_radius: f64,
    /// Floor applied to vortex radii during evolution.
    pub min_radius: f64,
}

impl Default for CurrentField {
    fn default() -> Self {
        Self::calm(4, 250.0)
    }
}

impl CurrentField {
    /// Field with `layers` empty bands: zero current everywhere.
    pub fn calm(layers: usize, layer_thickness: f64) -> Self {
        Self {
            layers: (0..layers).map(|_| CurrentLayer::default()).collect(),
            layer_thickness,
            singular_radius: 1.0,
            min_radius: 10.0,
        }
    }

    pub fn layer_index(&self, z: f64) -> Option<usize> {
        if self.layers.is_empty() {
            return None;
        }
        let i = if z <= 0.0 { 0 } else { (z / self.layer_thickness) as usize };
        Some(i.min(self.layers.len() - 1))
    }

    /// Velocity at `p`; cheaper than [`sample`](Self::sample) when the
    /// direction angles are not needed.
    #[inline]
    pub fn velocity(&self, p: Vec3) -> Vec3 {
        let Some(i) = self.layer_index(p.z) else {
            return Vec3::ZERO;
        };
        let mut v = Vec3::ZERO;
        for vortex in &self.layers[i].vortices {
            v += vortex.velocity(p.x, p.y, self.singular_radius);
        }
        v
    }

    pub fn sample(&self, p: Vec3) -> CurrentSample {
        CurrentSample::from_velocity(self.velocity(p))
    }

    /// Advances every vortex one step of the recursive noise model:
    /// centre, radius and strength each receive `rate * N(0, sigma)`.
    pub fn evolve<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let min_radius = self.min_radius;
        for layer in &mut self.layers {
            for v in &mut layer.vortices {
                let rate = v.update_rate;
                let dx = gaussian(rng, v.noise.center_x);
                let dy = gaussian(rng, v.noise.center_y);
                let dl = gaussian(rng, v.noise.radius);
                let ds = gaussian(rng, v.noise.strength);
                v.center[0] += rate * dx;
                v.center[1] += rate * dy;
                v.radius = (v.radius + rate * dl).max(min_radius);
                v.strength += rate * ds;
            }
        }
    }

    pub fn max_speed_hint(&self) -> f64 {
        // Peak tangential speed of a Lamb–Oseen vortex is ~0.1016 k / l.
        self.layers
            .iter()
            .map(|l| l.vortices.iter().map(|v| 0.1016 * v.strength.abs() / v.radius).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    if sigma > 0.0 {
        Normal::new(0.0, sigma).map(|n| n.sample(rng)).unwrap_or(0.0)
    } else {
        // Keep the stream aligned whether or not a parameter is noisy.
        let _: f64 = rng.random();
        0.0
    }
}
