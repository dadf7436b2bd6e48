use std::fmt::Write as _;
use std::str::FromStr;

use crate::engine::{Configuration, Odometer, Stabilizer};
use crate::error::{ArwError, Result};
use crate::seed::{derive, Stream};
use crate::tape::InstructionTape;

use super::Placement;

/// How the particles behind each grid point are stabilized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HockeyMode {
    /// One particle at a time, stabilizing after each; one shared run.
    Incremental,
    /// All `⌈ρn⌉` particles placed at once and stabilized, per grid point,
    /// with the same tape and placement stream as `Incremental`.
    Batch,
    /// Like `Batch`, but every grid point gets its own tape and placements.
    Independent,
}

impl HockeyMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            HockeyMode::Incremental => "incremental",
            HockeyMode::Batch => "batch",
            HockeyMode::Independent => "independent",
        }
    }
}

impl FromStr for HockeyMode {
    type Err = ArwError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "incremental" => Ok(HockeyMode::Incremental),
            "batch" => Ok(HockeyMode::Batch),
            "independent" => Ok(HockeyMode::Independent),
            _ => Err(ArwError::InvalidParameter(format!("unknown hockey mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HockeyParams {
    pub n: usize,
    pub lambda: f64,
    pub rho_max: f64,
    pub grid_step: f64,
    pub seed: u64,
    pub mode: HockeyMode,
    /// Instruction budget per added particle, in units of `n^2`.
    pub budget_factor: u64,
}

impl HockeyParams {
    pub fn new(n: usize, lambda: f64, rho_max: f64, grid_step: f64, seed: u64) -> Self {
        Self { n, lambda, rho_max, grid_step, seed, mode: HockeyMode::Incremental, budget_factor: 64 }
    }

    pub fn mode(mut self, mode: HockeyMode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HockeyRow {
    pub rho: f64,
    /// `Y / n`.
    pub density: f64,
    /// Sleepers left after `⌈ρn⌉` additions.
    pub sleeping: u64,
    pub ejected_left: u64,
    pub ejected_right: u64,
    /// Instructions executed to reach this state.
    pub topplings: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HockeyCurve {
    pub params: HockeyParams,
    pub rows: Vec<HockeyRow>,
}

/// Grid `step, 2 step, ...` up to `rho_max` inclusive.
pub fn rho_grid(rho_max: f64, step: f64) -> Vec<f64> {
    if rho_max <= 0.0 {
        return Vec::new();
    }
    let count = (rho_max / step + 1e-9).floor() as usize;
    (1..=count).map(|i| i as f64 * step).collect()
}

/// `⌈ρn⌉`, robust to the float error in `ρ` itself.
pub fn particles_for(rho: f64, n: usize) -> u64 {
    (rho * n as f64 - 1e-9).ceil().max(0.0) as u64
}

fn validate(p: &HockeyParams) -> Result<()> {
    if p.n == 0 {
        return Err(ArwError::InvalidParameter("n must be at least 1".into()));
    }
    if !(p.grid_step > 0.0) || p.rho_max < 0.0 || !p.rho_max.is_finite() {
        return Err(ArwError::InvalidParameter(
            "need rho_max >= 0 and grid_step > 0".into(),
        ));
    }
    Ok(())
}

/// Empirical density profile `D_ρ = Y_⌈ρn⌉ / n` over a grid of `ρ`.
pub fn hockey_curve(params: &HockeyParams) -> Result<HockeyCurve> {
    validate(params)?;
    let n = params.n;
    let grid = rho_grid(params.rho_max, params.grid_step);
    let per_particle = params.budget_factor.saturating_mul((n * n) as u64);
    let row = |rho: f64, cfg: &Configuration, topplings: u64| HockeyRow {
        rho,
        density: cfg.sleeping_count() as f64 / n as f64,
        sleeping: cfg.sleeping_count(),
        ejected_left: cfg.sink_left(),
        ejected_right: cfg.sink_right(),
        topplings,
    };

    let mut rows = Vec::with_capacity(grid.len());
    match params.mode {
        HockeyMode::Incremental => {
            let tape = InstructionTape::new(derive(params.seed, Stream::Tape, 0), params.lambda)?;
            let placement = Placement::new(derive(params.seed, Stream::Placement, 0), n);
            let stab = Stabilizer::new(&tape).budget(Some(per_particle));
            let mut cfg = Configuration::empty(n);
            let mut odo = Odometer::zero(n);
            let mut added = 0u64;
            let mut topplings = 0u64;
            for &rho in &grid {
                let target = particles_for(rho, n);
                while added < target {
                    cfg.add_particle(placement.site(added))?;
                    added += 1;
                    topplings += stab.stabilize_from(&mut cfg, &mut odo)?;
                }
                rows.push(row(rho, &cfg, topplings));
            }
        }
        HockeyMode::Batch | HockeyMode::Independent => {
            for (i, &rho) in grid.iter().enumerate() {
                let stream = if params.mode == HockeyMode::Batch { 0 } else { i as u64 + 1 };
                let tape =
                    InstructionTape::new(derive(params.seed, Stream::Tape, stream), params.lambda)?;
                let placement = Placement::new(derive(params.seed, Stream::Placement, stream), n);
                let k = particles_for(rho, n);
                let cfg = placement.configuration(k);
                let budget = per_particle.saturating_mul(k.max(1));
                let r = Stabilizer::new(&tape).budget(Some(budget)).stabilize(cfg)?;
                rows.push(row(rho, &r.final_config, r.topplings));
            }
        }
    }
    Ok(HockeyCurve { params: params.clone(), rows })
}

impl HockeyCurve {
    /// Mean of `D_ρ` over the top quarter of the grid. Diagnostic only.
    pub fn plateau(&self) -> Option<f64> {
        let k = self.rows.len();
        if k == 0 {
            return None;
        }
        let top = &self.rows[k - k.div_ceil(4)..];
        Some(top.iter().map(|r| r.density).sum::<f64>() / top.len() as f64)
    }

    pub fn csv_header(&self, seed_text: &str) -> String {
        format!(
            "# arw-lab v1, seed={}, lambda={}, n={}, mode={}",
            seed_text,
            self.params.lambda,
            self.params.n,
            self.params.mode.as_str()
        )
    }

    /// CSV body: column header plus one line per grid point.
    pub fn csv_body(&self) -> String {
        let mut out = String::from("rho,D,Y,ejected_left,ejected_right,topplings\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_real(r.rho),
                fmt_real(r.density),
                r.sleeping,
                r.ejected_left,
                r.ejected_right,
                r.topplings
            );
        }
        out
    }

    pub fn to_csv(&self, seed_text: &str) -> String {
        format!("{}\n{}", self.csv_header(seed_text), self.csv_body())
    }
}

/// Fixed six-decimal formatting keeps CSV bodies byte-stable.
pub(crate) fn fmt_real(x: f64) -> String {
    format!("{x:.6}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_edges() {
        assert!(rho_grid(0.0, 0.1).is_empty());
        let g = rho_grid(1.0, 0.25);
        assert_eq!(g, vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(rho_grid(0.3, 0.1).len(), 3);
    }

    #[test]
    fn ceil_particles() {
        assert_eq!(particles_for(0.3, 10), 3);
        assert_eq!(particles_for(0.31, 10), 4);
        assert_eq!(particles_for(0.1 * 3.0, 10), 3);
    }

    #[test]
    fn empty_grid_is_header_only() {
        let c = hockey_curve(&HockeyParams::new(10, 0.8, 0.0, 0.1, 1)).unwrap();
        assert!(c.rows.is_empty());
        assert_eq!(c.csv_body(), "rho,D,Y,ejected_left,ejected_right,topplings\n");
    }

    #[test]
    fn density_never_exceeds_rho() {
        for mode in [HockeyMode::Incremental, HockeyMode::Batch, HockeyMode::Independent] {
            let c = hockey_curve(&HockeyParams::new(40, 0.8, 1.5, 0.05, 3).mode(mode)).unwrap();
            for r in &c.rows {
                assert!(r.density <= r.rho + 1.0 / 40.0 + 1e-12);
                assert_eq!(r.sleeping + r.ejected_left + r.ejected_right, particles_for(r.rho, 40));
            }
        }
    }

    #[test]
    fn incremental_equals_batch() {
        let p = HockeyParams::new(30, 1.0, 1.2, 0.1, 9);
        let a = hockey_curve(&p).unwrap();
        let b = hockey_curve(&p.clone().mode(HockeyMode::Batch)).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(hockey_curve(&HockeyParams::new(10, 0.8, 1.0, 0.0, 1)).is_err());
        assert!(hockey_curve(&HockeyParams::new(0, 0.8, 1.0, 0.1, 1)).is_err());
    }
}
