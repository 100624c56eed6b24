use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Time in whole microseconds. The ledger keeps every quantity in this unit
/// so its conservation and accounting identities hold exactly.
pub type Micros = i64;

pub fn to_micros(seconds: f64) -> Micros {
    libm::round(seconds * 1e6) as Micros
}

pub fn to_seconds(us: Micros) -> f64 {
    us as f64 * 1e-6
}

/// One traversed leg.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegRecord {
    pub index: usize,
    pub edge: usize,
    pub from: usize,
    pub to: usize,
    /// `d / |v| + delta`, s.
    pub expected: f64,
    /// Executed length over `|v|`, s.
    pub nominal: f64,
    /// Time spent travelling at ground speed, s.
    pub travel: f64,
    /// Task duration, s.
    pub duration: f64,
    /// `travel + duration`, s.
    pub realized: f64,
    pub length: f64,
    /// Path planner calls for this leg, including in-leg replans.
    pub path_calls: usize,
    pub path_replans: usize,
    /// Executed samples in coast or inside a true obstacle, each judged
    /// against the world as it stands while its checkpoint segment is flown.
    pub collision_samples: usize,
    /// True when the leg triggered a mission replan.
    pub replan: bool,
    pub completed: bool,
    /// Executed positions.
    pub executed: Vec<crate::geom::Vec3>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionLedger {
    pub t_available_us: Micros,
    /// Accrued mission time (travel plus task durations).
    pub accrued_us: Micros,
    pub residual_us: Micros,
    /// One entry per replan check, including any mission replan it ran.
    pub compute_us: Vec<Micros>,
    /// Mission cost of the executed walk with realized leg times, in
    /// millionths.
    pub cost_mission_us: Micros,
    pub replans: usize,
    pub legs: Vec<LegRecord>,
}

/// Ledger state attached to each trace event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub accrued_us: Micros,
    pub residual_us: Micros,
    pub compute_total_us: Micros,
    pub replans: usize,
}

impl MissionLedger {
    pub fn new(t_available: f64) -> Self {
        let t = to_micros(t_available);
        Self {
            t_available_us: t,
            accrued_us: 0,
            residual_us: t,
            compute_us: Vec::new(),
            cost_mission_us: 0,
            replans: 0,
            legs: Vec::new(),
        }
    }

    /// Books `seconds` of mission time; returns the amount booked in µs.
    pub fn accrue(&mut self, seconds: f64) -> Micros {
        let us = to_micros(seconds);
        self.accrued_us += us;
        self.residual_us -= us;
        us
    }

    pub fn record_compute(&mut self, us: Micros) {
        self.compute_us.push(us);
    }

    pub fn compute_total_us(&self) -> Micros {
        self.compute_us.iter().sum()
    }

    /// Mission cost plus all logged compute time.
    pub fn cost_total_us(&self) -> Micros {
        self.cost_mission_us + self.compute_total_us()
    }

    pub fn t_available(&self) -> f64 {
        to_seconds(self.t_available_us)
    }

    pub fn t_mission(&self) -> f64 {
        to_seconds(self.accrued_us)
    }

    pub fn t_residual(&self) -> f64 {
        to_seconds(self.residual_us)
    }

    pub fn cost_mission(&self) -> f64 {
        to_seconds(self.cost_mission_us)
    }

    pub fn cost_total(&self) -> f64 {
        to_seconds(self.cost_total_us())
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            accrued_us: self.accrued_us,
            residual_us: self.residual_us,
            compute_total_us: self.compute_total_us(),
            replans: self.replans,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conservation_is_exact() {
        let mut l = MissionLedger::new(14_400.0);
        for s in [923.2, 0.1 + 0.2, 1e-7, 3.3333333] {
            l.accrue(s);
            assert_eq!(l.accrued_us + l.residual_us, l.t_available_us);
        }
    }

    #[test]
    fn total_cost_adds_compute_exactly() {
        let mut l = MissionLedger::new(100.0);
        l.cost_mission_us = to_micros(1234.5678);
        l.record_compute(17);
        l.record_compute(250_003);
        assert_eq!(l.cost_total_us() - l.cost_mission_us, 250_020);
    }
}
