use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::Configuration;
use crate::error::{ArwError, Result};
use crate::tape::{Instruction, InstructionTape, SiteKey};

/// Order in which unstable sites are toppled. The final odometer does not
/// depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    /// Worklist of dirty sites; each popped site is emptied before moving on.
    Sweep,
    /// One instruction at a time at the leftmost unstable site.
    Leftmost,
    /// One instruction at a time at a uniformly chosen unstable site.
    Random(u64),
}

impl std::str::FromStr for Policy {
    type Err = ArwError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sweep" => Ok(Policy::Sweep),
            "leftmost" => Ok(Policy::Leftmost),
            _ => match s.strip_prefix("random") {
                Some("") => Ok(Policy::Random(0)),
                Some(rest) => rest
                    .trim_start_matches([':', '='])
                    .parse::<crate::seed::Seed>()
                    .map(|seed| Policy::Random(seed.value())),
                None => Err(ArwError::InvalidParameter(format!("unknown policy `{s}`"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Sinks at `0` and `n + 1`.
    Sinks,
    /// Sites `1..=n` on a ring, no sinks.
    Torus,
}

/// Instructions executed per site, with the left/right usage counts that
/// go with them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Odometer {
    pub(crate) counts: Vec<u64>,
    pub(crate) lefts: Vec<u64>,
    pub(crate) rights: Vec<u64>,
}

impl Odometer {
    pub fn zero(n: usize) -> Self {
        Self { counts: vec![0; n], lefts: vec![0; n], rights: vec![0; n] }
    }

    /// Odometer from raw counts, with usage derived from the tape
    /// (tape site `v` for entry `v - 1`).
    pub fn from_counts(counts: Vec<u64>, tape: &InstructionTape) -> Self {
        let (lefts, rights) = counts
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                let p = tape.prefix_counts(i as i64 + 1, u as i64);
                (p.lefts as u64, p.rights as u64)
            })
            .unzip();
        Self { counts, lefts, rights }
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    /// `u(site)` for 1-based `site`; zero off the interval.
    pub fn get(&self, site: i64) -> u64 {
        if site < 1 || site as usize > self.counts.len() {
            0
        } else {
            self.counts[site as usize - 1]
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn lefts(&self) -> &[u64] {
        &self.lefts
    }

    pub fn rights(&self) -> &[u64] {
        &self.rights
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Restriction to sites `1..=n`.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            counts: self.counts[..n].to_vec(),
            lefts: self.lefts[..n].to_vec(),
            rights: self.rights[..n].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StabilizationResult {
    pub odometer: Odometer,
    pub final_config: Configuration,
    pub sleeping_count: u64,
    pub ejected_left: u64,
    pub ejected_right: u64,
    pub topplings: u64,
}

/// Default budget for driven runs: `64 n^2` instructions.
pub fn default_budget(n: usize) -> u64 {
    64 * (n as u64) * (n as u64)
}

/// Stabilization settings. The tape site used for interval site `v` is
/// `v + site_offset`.
#[derive(Debug, Clone)]
pub struct Stabilizer<'t> {
    tape: &'t InstructionTape,
    policy: Policy,
    budget: Option<u64>,
    boundary: Boundary,
    site_offset: i64,
}

impl<'t> Stabilizer<'t> {
    pub fn new(tape: &'t InstructionTape) -> Self {
        Self { tape, policy: Policy::Sweep, budget: None, boundary: Boundary::Sinks, site_offset: 0 }
    }

    pub fn policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }

    /// Cap on instructions executed by one call; `None` means unlimited.
    pub fn budget(mut self, budget: Option<u64>) -> Self {
        self.budget = budget;
        self
    }

    pub fn boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn site_offset(mut self, offset: i64) -> Self {
        self.site_offset = offset;
        self
    }

    pub fn tape(&self) -> &'t InstructionTape {
        self.tape
    }

    /// Stabilizes `config` from a zero odometer.
    pub fn stabilize(&self, mut config: Configuration) -> Result<StabilizationResult> {
        let mut odometer = Odometer::zero(config.n());
        let topplings = self.stabilize_from(&mut config, &mut odometer)?;
        Ok(StabilizationResult {
            sleeping_count: config.sleeping_count(),
            ejected_left: config.sink_left,
            ejected_right: config.sink_right,
            odometer,
            final_config: config,
            topplings,
        })
    }

    /// Continues execution from `odometer`: the next instruction used at
    /// site `v` is number `odometer(v) + 1`. Returns the number of
    /// instructions executed. On error the state is left mid-run.
    pub fn stabilize_from(&self, config: &mut Configuration, odometer: &mut Odometer) -> Result<u64> {
        assert_eq!(config.n(), odometer.n(), "configuration and odometer sizes differ");
        let mut run = Run::new(self, config, odometer);
        match self.policy {
            Policy::Sweep => run.sweep()?,
            Policy::Leftmost => run.leftmost()?,
            Policy::Random(seed) => run.random(seed)?,
        }
        Ok(run.executed)
    }
}

struct Run<'a, 't> {
    tape: &'t InstructionTape,
    keys: Vec<SiteKey>,
    config: &'a mut Configuration,
    odo: &'a mut Odometer,
    torus: bool,
    budget: u64,
    executed: u64,
}

/// Where a moved particle lands.
enum Landing {
    Site(usize),
    SinkLeft,
    SinkRight,
}

impl<'a, 't> Run<'a, 't> {
    fn new(s: &Stabilizer<'t>, config: &'a mut Configuration, odo: &'a mut Odometer) -> Self {
        let keys =
            (0..config.n()).map(|i| s.tape.site_key(i as i64 + 1 + s.site_offset)).collect();
        Self {
            tape: s.tape,
            keys,
            config,
            odo,
            torus: s.boundary == Boundary::Torus,
            budget: s.budget.unwrap_or(u64::MAX),
            executed: 0,
        }
    }

    #[inline(always)]
    fn neighbor(&self, i: usize, left: bool) -> Landing {
        let n = self.config.active.len();
        if left {
            if i > 0 {
                Landing::Site(i - 1)
            } else if self.torus {
                Landing::Site(n - 1)
            } else {
                Landing::SinkLeft
            }
        } else if i + 1 < n {
            Landing::Site(i + 1)
        } else if self.torus {
            Landing::Site(0)
        } else {
            Landing::SinkRight
        }
    }

    /// Executes the next instruction at `i` (which must hold an active
    /// particle). Returns the site that received a particle, if any.
    #[inline(always)]
    fn step(&mut self, i: usize) -> Result<Option<usize>> {
        if self.executed >= self.budget {
            return Err(ArwError::BudgetExceeded { budget: self.budget });
        }
        self.executed += 1;
        self.odo.counts[i] += 1;
        let index = self.odo.counts[i] as i64;
        let left = match self.tape.instruction_keyed(self.keys[i], index) {
            Instruction::Sleep => {
                if self.config.active[i] == 1 {
                    self.config.active[i] = 0;
                    self.config.asleep[i] = true;
                }
                return Ok(None);
            }
            Instruction::Left => {
                self.odo.lefts[i] += 1;
                true
            }
            Instruction::Right => {
                self.odo.rights[i] += 1;
                false
            }
        };
        self.config.active[i] -= 1;
        match self.neighbor(i, left) {
            Landing::SinkLeft => {
                self.config.sink_left += 1;
                Ok(None)
            }
            Landing::SinkRight => {
                self.config.sink_right += 1;
                Ok(None)
            }
            Landing::Site(j) => {
                if self.config.asleep[j] {
                    self.config.asleep[j] = false;
                    self.config.active[j] = 2;
                } else {
                    self.config.active[j] += 1;
                }
                Ok(Some(j))
            }
        }
    }

    fn sweep(&mut self) -> Result<()> {
        let n = self.config.active.len();
        let mut queued = vec![false; n];
        let mut work: Vec<usize> = (0..n).rev().filter(|&i| self.config.active[i] > 0).collect();
        for &i in &work {
            queued[i] = true;
        }
        while let Some(i) = work.pop() {
            queued[i] = false;
            while self.config.active[i] > 0 {
                if let Some(j) = self.step(i)? {
                    if !queued[j] && j != i {
                        queued[j] = true;
                        work.push(j);
                    }
                }
            }
        }
        Ok(())
    }

    fn leftmost(&mut self) -> Result<()> {
        let mut unstable: BTreeSet<usize> =
            (0..self.config.active.len()).filter(|&i| self.config.active[i] > 0).collect();
        while let Some(&i) = unstable.iter().next() {
            if let Some(j) = self.step(i)? {
                unstable.insert(j);
            }
            if self.config.active[i] == 0 {
                unstable.remove(&i);
            }
        }
        Ok(())
    }

    fn random(&mut self, seed: u64) -> Result<()> {
        let n = self.config.active.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Unstable sites with O(1) insert/remove via a position index.
        let mut list: Vec<usize> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for i in 0..n {
            if self.config.active[i] > 0 {
                slot[i] = list.len();
                list.push(i);
            }
        }
        while !list.is_empty() {
            let i = list[rng.gen_range(0..list.len())];
            if let Some(j) = self.step(i)? {
                if slot[j] == usize::MAX {
                    slot[j] = list.len();
                    list.push(j);
                }
            }
            if self.config.active[i] == 0 {
                let k = slot[i];
                let last = list.pop().expect("nonempty");
                if last != i {
                    list[k] = last;
                    slot[last] = k;
                }
                slot[i] = usize::MAX;
            }
        }
        Ok(())
    }
}

/// Stabilizes `config` on its interval with sinks.
pub fn stabilize(
    config: Configuration,
    tape: &InstructionTape,
    policy: Policy,
    budget: Option<u64>,
) -> Result<StabilizationResult> {
    Stabilizer::new(tape).policy(policy).budget(budget).stabilize(config)
}
