use super::Micros;

/// Measures planner compute time. `work` is a deterministic operation count
/// supplied by the caller; wall clocks may ignore it.
pub trait ComputeClock {
    fn begin(&mut self);
    fn end(&mut self, work: u64) -> Micros;
}

/// Charges a fixed cost per unit of work, so traces are reproducible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VirtualClock {
    pub nanos_per_unit: u64,
}

impl Default for VirtualClock {
    fn default() -> Self {
        Self { nanos_per_unit: 20 }
    }
}

impl ComputeClock for VirtualClock {
    fn begin(&mut self) {}

    fn end(&mut self, work: u64) -> Micros {
        work.saturating_mul(self.nanos_per_unit).div_ceil(1000) as Micros
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn virtual_clock_rounds_up() {
        let mut c = VirtualClock::default();
        c.begin();
        assert_eq!(c.end(1), 1);
        assert_eq!(c.end(50), 1);
        assert_eq!(c.end(51), 2);
        assert_eq!(c.end(0), 0);
    }
}
