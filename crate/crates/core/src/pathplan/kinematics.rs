use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::env::CurrentSample;
use crate::geom::Vec3;
use crate::math;

/// Kinematic limits of the vehicle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleModel {
    /// Constant water-referenced speed |v|, m/s.
    pub speed: f64,
    /// Upper bound on the surge component `u`, m/s.
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// Heading-change bounds per sample step, rad.
    pub psi_min: f64,
    pub psi_max: f64,
}

impl Default for VehicleModel {
    fn default() -> Self {
        Self {
            speed: 2.0,
            u_max: 3.5,
            v_min: -3.5,
            v_max: 3.5,
            psi_min: -0.35,
            psi_max: 0.35,
        }
    }
}

impl VehicleModel {
    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.speed > 0.0) {
            return Err("vehicle speed must be positive");
        }
        if !(self.v_min <= self.v_max) || !(self.psi_min <= self.psi_max) {
            return Err("vehicle limit intervals must be nonempty");
        }
        Ok(())
    }
}

/// Heading `psi` and pitch `theta` of each segment between consecutive
/// positions. Depth is positive down, so climbing gives positive pitch. A
/// zero-length segment repeats the previous orientation; a purely vertical
/// one keeps the previous heading.
pub fn orientations(positions: &[Vec3]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(positions.len().saturating_sub(1));
    let mut prev = (0.0, 0.0);
    for w in positions.windows(2) {
        let d = w[1] - w[0];
        if d.norm_sq() == 0.0 {
            out.push(prev);
            continue;
        }
        let horiz = math::sqrt(d.x * d.x + d.y * d.y);
        let psi = if horiz > 0.0 { math::atan2(d.y, d.x) } else { prev.0 };
        prev = (psi, math::atan2(-d.z, horiz));
        out.push(prev);
    }
    out
}

/// Vehicle velocity along `(psi, theta)` plus the current, as
/// `(u, v, w)` with `w` positive up.
#[inline]
pub fn compose_velocity(speed: f64, psi: f64, theta: f64, c: &CurrentSample) -> Vec3 {
    let (sp, cp) = (math::sin(psi), math::cos(psi));
    let (st, ct) = (math::sin(theta), math::cos(theta));
    let (spc, cpc) = (math::sin(c.horizontal_dir), math::cos(c.horizontal_dir));
    let (stc, ctc) = (math::sin(c.vertical_dir), math::cos(c.vertical_dir));
    Vec3::new(
        speed * ct * cp + c.magnitude * ctc * cpc,
        speed * ct * sp + c.magnitude * ctc * spc,
        speed * st + c.magnitude * stc,
    )
}
