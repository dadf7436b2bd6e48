use std::fmt;

use rayon::prelude::*;

use crate::engine::{Boundary, Configuration, Odometer, Stabilizer};
use crate::error::{ArwError, Result};
use crate::seed::{derive, Stream};
use crate::tape::InstructionTape;

use super::hockey::fmt_real;
use super::Placement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    FixedEnergyTorus,
    DrivenDissipativeStationary,
    HockeyPlateau,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::FixedEnergyTorus => "fixed_energy_torus",
            Method::DrivenDissipativeStationary => "driven_dissipative_stationary",
            Method::HockeyPlateau => "hockey_plateau",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalEstimate {
    pub lambda: f64,
    pub n: usize,
    pub zeta_hat: f64,
    pub method: Method,
    pub trials: usize,
    /// One-standard-error half width.
    pub ci_halfwidth: f64,
    pub seed: u64,
}

impl CriticalEstimate {
    pub const CSV_HEADER: &'static str = "lambda,n,method,zeta_hat,ci_halfwidth,trials,seed";

    pub fn csv_row(&self, seed_text: &str) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.lambda,
            self.n,
            self.method,
            fmt_real(self.zeta_hat),
            fmt_real(self.ci_halfwidth),
            self.trials,
            seed_text
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeParams {
    pub lambda: f64,
    pub n: usize,
    pub trials: usize,
    /// Instruction budget per probe, in units of `n^2`.
    pub budget_factor: u64,
    pub seed: u64,
}

impl FeParams {
    pub fn new(lambda: f64, n: usize, seed: u64) -> Self {
        Self { lambda, n, trials: 31, budget_factor: 64, seed }
    }

    pub fn trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn budget_factor(mut self, factor: u64) -> Self {
        self.budget_factor = factor;
        self
    }
}

/// Does the torus with the first `k` placements of this trial fall fully
/// asleep within the budget?
fn torus_absorbs(tape: &InstructionTape, placement: &Placement, k: u64, budget: u64) -> Result<bool> {
    let cfg = placement.configuration(k);
    match Stabilizer::new(tape).boundary(Boundary::Torus).budget(Some(budget)).stabilize(cfg) {
        Ok(_) => Ok(true),
        Err(ArwError::BudgetExceeded { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Largest particle count `k <= n` for which trial `trial` absorbs.
///
/// With a fixed tape and placement stream, adding particles only increases
/// the odometer, so absorption within a fixed budget is monotone in `k`
/// and a bisection finds the threshold exactly.
pub fn fe_trial_threshold(p: &FeParams, trial: u64) -> Result<u64> {
    let tape = InstructionTape::new(derive(p.seed, Stream::Trial, 2 * trial), p.lambda)?;
    let placement = Placement::new(derive(p.seed, Stream::Trial, 2 * trial + 1), p.n);
    let budget = p.budget_factor.saturating_mul((p.n * p.n) as u64);
    let (mut lo, mut hi) = (0u64, p.n as u64 + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if torus_absorbs(&tape, &placement, mid, budget)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Fixed-energy critical density on the `n`-torus.
///
/// Bisection over particle counts at resolution `1/n`; a probe counts as
/// absorbing when a strict majority of the trials absorbs. Trials are
/// coupled across probes (same tape and placements), so each trial's
/// outcome is a threshold in the particle count and the vote at any probe
/// is read off the per-trial thresholds. The half width is the distance
/// between the densities where the absorbing vote sits one binomial
/// standard deviation above and below an even split.
pub fn estimate_zeta_fe(p: &FeParams) -> Result<CriticalEstimate> {
    if p.n < 8 {
        return Err(ArwError::InvalidParameter("fixed-energy estimate needs n >= 8".into()));
    }
    if p.trials == 0 {
        return Err(ArwError::InvalidParameter("trials must be at least 1".into()));
    }
    let mut thresholds: Vec<u64> = (0..p.trials as u64)
        .into_par_iter()
        .map(|t| fe_trial_threshold(p, t))
        .collect::<Result<_>>()?;
    thresholds.sort_unstable();

    let votes = |k: u64| thresholds.iter().filter(|&&t| t >= k).count();
    let trials = p.trials;
    let (mut lo, mut hi) = (0u64, p.n as u64 + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let a = votes(mid);
        if 2 * a > trials {
            lo = mid;
        } else if 2 * a < trials || hi - lo > 2 {
            hi = mid;
        } else {
            return Err(ArwError::Inconclusive {
                rho: mid as f64 / p.n as f64,
                absorbing: a,
                trials,
            });
        }
    }
    let n = p.n as f64;
    let zeta_hat = (lo + hi) as f64 / 2.0 / n;

    let half = trials as f64 / 2.0;
    let spread = (trials as f64).sqrt() / 2.0;
    let at = |rank: f64| {
        let i = (rank.round() as isize).clamp(1, trials as isize) as usize;
        thresholds[i - 1] as f64
    };
    let width = (at(half + spread) - at(half - spread)) / (2.0 * n);
    Ok(CriticalEstimate {
        lambda: p.lambda,
        n: p.n,
        zeta_hat,
        method: Method::FixedEnergyTorus,
        trials,
        ci_halfwidth: width.max(0.5 / n),
        seed: p.seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DdParams {
    pub lambda: f64,
    pub n: usize,
    pub burn_in: u64,
    pub samples: u64,
    pub seed: u64,
    pub budget_factor: u64,
}

impl DdParams {
    pub fn new(lambda: f64, n: usize, burn_in: u64, samples: u64, seed: u64) -> Self {
        Self { lambda, n, burn_in, samples, seed, budget_factor: 64 }
    }
}

/// Stationary sleeper density of the driven-dissipative chain: add a
/// particle at a uniform site, stabilize with sinks, repeat. The standard
/// error comes from batch means (20 batches) to absorb autocorrelation.
pub fn estimate_zeta_dd(p: &DdParams) -> Result<CriticalEstimate> {
    if p.burn_in == 0 || p.samples == 0 || p.n == 0 {
        return Err(ArwError::InvalidParameter("need n, burn_in, samples >= 1".into()));
    }
    let n = p.n;
    let tape = InstructionTape::new(derive(p.seed, Stream::Tape, 0), p.lambda)?;
    let placement = Placement::new(derive(p.seed, Stream::Placement, 0), n);
    let stab = Stabilizer::new(&tape).budget(Some(p.budget_factor.saturating_mul((n * n) as u64)));
    let mut cfg = Configuration::empty(n);
    let mut odo = Odometer::zero(n);
    let mut t = 0u64;
    for _ in 0..p.burn_in {
        cfg.add_particle(placement.site(t))?;
        t += 1;
        stab.stabilize_from(&mut cfg, &mut odo)?;
    }
    let mut series = Vec::with_capacity(p.samples as usize);
    for _ in 0..p.samples {
        cfg.add_particle(placement.site(t))?;
        t += 1;
        stab.stabilize_from(&mut cfg, &mut odo)?;
        series.push(cfg.sleeping_count() as f64 / n as f64);
    }
    let (mean, se) = batch_means(&series, 20);
    Ok(CriticalEstimate {
        lambda: p.lambda,
        n,
        zeta_hat: mean,
        method: Method::DrivenDissipativeStationary,
        trials: p.samples as usize,
        ci_halfwidth: se,
        seed: p.seed,
    })
}

/// Mean and batch-means standard error. Falls back to the i.i.d. formula
/// when there are too few samples to batch.
pub(crate) fn batch_means(xs: &[f64], batches: usize) -> (f64, f64) {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 * batches {
        if n < 2 {
            return (mean, 0.0);
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        return (mean, (var / n as f64).sqrt());
    }
    let size = n / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| xs[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}
