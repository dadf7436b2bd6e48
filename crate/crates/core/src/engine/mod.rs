//! Exact stabilization of activated random walk with instruction stacks.
//!
//! Executing an instruction at a site holding an active particle:
//! `left`/`right` moves one particle to the neighbor (waking a sleeper
//! there, or dropping it into a sink), `sleep` puts the particle to sleep
//! if it is alone and otherwise does nothing. The odometer counts every
//! executed instruction, ineffective sleeps included.

mod config;
mod stability;
mod stabilize;

pub use config::Configuration;
pub use stability::{check_stable, least_action_compare, StabilityReport, Violation, ViolationKind};
pub use stabilize::{
    default_budget, stabilize, Boundary, Odometer, Policy, StabilizationResult, Stabilizer,
};
