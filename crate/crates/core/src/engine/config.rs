use crate::error::{ArwError, Result};

/// Particle state on the sites `1..=n` of an interval, plus the particles
/// trapped in the sinks at `0` and `n + 1`.
///
/// A sleeping particle is always alone on its site.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub(crate) active: Vec<u32>,
    pub(crate) asleep: Vec<bool>,
    pub(crate) sink_left: u64,
    pub(crate) sink_right: u64,
}

impl Configuration {
    pub fn empty(n: usize) -> Self {
        Self { active: vec![0; n], asleep: vec![false; n], sink_left: 0, sink_right: 0 }
    }

    /// All-active configuration from per-site counts (`counts[0]` is site 1).
    pub fn from_active(counts: Vec<u32>) -> Self {
        let n = counts.len();
        Self { active: counts, asleep: vec![false; n], sink_left: 0, sink_right: 0 }
    }

    /// Builds a configuration, checking the one-sleeper-alone invariant.
    pub fn from_parts(
        active: Vec<u32>,
        asleep: Vec<bool>,
        sink_left: u64,
        sink_right: u64,
    ) -> Result<Self> {
        if active.len() != asleep.len() {
            return Err(ArwError::InvalidParameter(
                "active and asleep arrays differ in length".into(),
            ));
        }
        if let Some(i) = (0..active.len()).find(|&i| asleep[i] && active[i] > 0) {
            return Err(ArwError::InvalidParameter(format!(
                "site {} holds a sleeper together with active particles",
                i + 1
            )));
        }
        Ok(Self { active, asleep, sink_left, sink_right })
    }

    pub fn n(&self) -> usize {
        self.active.len()
    }

    /// Active particles at `site` (1-based).
    pub fn active_at(&self, site: usize) -> u32 {
        self.active[site - 1]
    }

    pub fn is_asleep(&self, site: usize) -> bool {
        self.asleep[site - 1]
    }

    pub fn active(&self) -> &[u32] {
        &self.active
    }

    pub fn asleep(&self) -> &[bool] {
        &self.asleep
    }

    pub fn sink_left(&self) -> u64 {
        self.sink_left
    }

    pub fn sink_right(&self) -> u64 {
        self.sink_right
    }

    pub fn sleeping_count(&self) -> u64 {
        self.asleep.iter().filter(|&&s| s).count() as u64
    }

    pub fn active_count(&self) -> u64 {
        self.active.iter().map(|&a| a as u64).sum()
    }

    /// Particles on the interval or in the sinks.
    pub fn total_particles(&self) -> u64 {
        self.active_count() + self.sleeping_count() + self.sink_left + self.sink_right
    }

    pub fn has_sleepers(&self) -> bool {
        self.asleep.iter().any(|&s| s)
    }

    /// No active particle left on the interval.
    pub fn is_stable(&self) -> bool {
        self.active.iter().all(|&a| a == 0)
    }

    /// Drops one active particle on `site`; a sleeper there wakes up.
    pub fn add_particle(&mut self, site: usize) -> Result<()> {
        if site == 0 || site > self.n() {
            return Err(ArwError::SiteOutOfRange { site: site as i64, n: self.n() });
        }
        let i = site - 1;
        if self.asleep[i] {
            self.asleep[i] = false;
            self.active[i] = 2;
        } else {
            self.active[i] += 1;
        }
        Ok(())
    }

    /// By-value form of [`Configuration::add_particle`].
    pub fn with_particle(mut self, site: usize) -> Result<Self> {
        self.add_particle(site)?;
        Ok(self)
    }

    /// Turns a sleeper back into an active particle without adding anything.
    pub fn wake(&mut self, site: usize) -> bool {
        let i = site - 1;
        if self.asleep[i] {
            self.asleep[i] = false;
            self.active[i] = 1;
            true
        } else {
            false
        }
    }

    /// Per-site particle counts, sleepers included.
    pub fn particle_counts(&self) -> Vec<u32> {
        self.active.iter().zip(&self.asleep).map(|(&a, &s)| a + s as u32).collect()
    }
}
