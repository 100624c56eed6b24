//! Seeded random streams.
//!
//! Every stochastic component draws from a [`SimRng`] derived from a master
//! seed plus a stream label, so adding draws in one subsystem never shifts the
//! sequence seen by another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream labels used by the executive and planners.
pub mod stream {
    pub const GRAPH: u64 = 1;
    pub const FIELD: u64 = 2;
    pub const OBSTACLES: u64 = 3;
    pub const SENSING: u64 = 4;
    pub const MISSION_PLANNER: u64 = 5;
    pub const PATH_PLANNER: u64 = 6;
    pub const SCENARIO: u64 = 7;
}

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator keyed by `seed`.
pub fn derive(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream for a (generation, index) pair under a master seed.
pub fn indexed(seed: u64, major: u64, minor: u64) -> SimRng {
    derive(seed, (major << 32) ^ (minor & 0xffff_ffff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: u64 = derive(7, 1).random();
        let b: u64 = derive(7, 2).random();
        let a2: u64 = derive(7, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, a2);
        let c: u64 = indexed(7, 3, 4).random();
        let d: u64 = indexed(7, 4, 3).random();
        assert_ne!(c, d);
    }
}
