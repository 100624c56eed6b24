//! Planning core for a two-level AUV autonomy stack.
//!
//! The crate is `no_std` (with `alloc`) so the numerical pieces can be
//! embedded; everything that touches files, clocks or the command line lives
//! in the `hydromission` companion crate.
//!
//! Layout:
//!
//! - [`env`]: clustered terrain, layered vortex current field, obstacles.
//! - [`bbo`]: biogeography-based optimization engine.
//! - [`pathplan`]: B-spline local path planner with warm-start replanning.
//! - [`mission`]: task graph, priority-vector decoding, mission planner.
//! - [`executive`]: the hierarchical mission loop and its time ledger.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bbo;
pub mod env;
pub mod executive;
pub mod geom;
pub mod mission;
pub mod pathplan;
pub mod rng;

pub(crate) mod math;

pub use geom::Vec3;
