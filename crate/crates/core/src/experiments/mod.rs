//! Experiment drivers: the density profile, critical-density estimators,
//! the point-source variant and parameter sweeps.

mod critical;
mod hockey;
mod point_source;
mod sweep;

pub use critical::{
    estimate_zeta_dd, estimate_zeta_fe, fe_trial_threshold, CriticalEstimate, DdParams, FeParams,
    Method,
};
pub use hockey::{hockey_curve, particles_for, rho_grid, HockeyCurve, HockeyMode, HockeyParams, HockeyRow};
pub use point_source::{default_window, point_source_run, PointSourceResult};
pub use sweep::{plateau_estimate, replica_seed, sweep, SweepParams, SweepRow, SweepTable};

use crate::engine::Configuration;
use crate::seed::uniform_below;

/// Counter-based stream of uniform sites in `1..=n`. The `t`-th particle
/// always lands on the same site, so runs with different particle counts
/// share their first placements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    seed: u64,
    n: usize,
}

impl Placement {
    pub fn new(seed: u64, n: usize) -> Self {
        Self { seed, n }
    }

    pub fn site(&self, t: u64) -> usize {
        1 + uniform_below(self.seed, t, self.n as u64) as usize
    }

    /// Active configuration holding the first `k` placements.
    pub fn configuration(&self, k: u64) -> Configuration {
        let mut counts = vec![0u32; self.n];
        for t in 0..k {
            counts[self.site(t) - 1] += 1;
        }
        Configuration::from_active(counts)
    }
}
