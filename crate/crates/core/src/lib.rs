//! Activated random walk in one dimension: seeded instruction tapes, exact
//! stabilization with sinks, experiment drivers for the density profile and
//! critical-density estimators, and extended-odometer / layer-percolation
//! machinery with brute-force oracles.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod layerperc;
pub mod seed;
pub mod snapshot;
pub mod svg;
pub mod tape;

pub use engine::{
    check_stable, least_action_compare, stabilize, Boundary, Configuration, Odometer, Policy,
    StabilizationResult, Stabilizer,
};
pub use error::{ArwError, Result};
pub use seed::Seed;
pub use tape::{Instruction, InstructionTape, PrefixCounts, SiteStack};
