use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::Result;
use crate::seed::{derive, Stream};

use super::critical::{batch_means, estimate_zeta_dd, estimate_zeta_fe, DdParams, FeParams};
use super::{hockey_curve, CriticalEstimate, HockeyParams, Method};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepParams {
    pub lambdas: Vec<f64>,
    pub ns: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub rho_max: f64,
    pub grid_step: f64,
    pub fe_trials: usize,
    pub budget_factor: u64,
}

impl SweepParams {
    pub fn new(lambdas: Vec<f64>, ns: Vec<usize>, replicas: usize, seed: u64) -> Self {
        Self {
            lambdas,
            ns,
            replicas,
            seed,
            methods: vec![Method::HockeyPlateau],
            rho_max: 1.25,
            grid_step: 0.05,
            fe_trials: 31,
            budget_factor: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub n: usize,
    pub replica: usize,
    pub method: Method,
    pub seed: u64,
    pub outcome: std::result::Result<CriticalEstimate, String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Seed of replica `r`: replica 0 runs on the master seed itself.
pub fn replica_seed(seed: u64, r: usize) -> u64 {
    if r == 0 {
        seed
    } else {
        derive(seed, Stream::Replica, r as u64)
    }
}

/// Critical-density estimate from the top quarter of a density profile.
pub fn plateau_estimate(lambda: f64, n: usize, rho_max: f64, step: f64, seed: u64) -> Result<CriticalEstimate> {
    let curve = hockey_curve(&HockeyParams::new(n, lambda, rho_max, step, seed))?;
    let k = curve.rows.len();
    let top: Vec<f64> = curve.rows[k - k.div_ceil(4)..].iter().map(|r| r.density).collect();
    let (mean, se) = batch_means(&top, 20);
    Ok(CriticalEstimate {
        lambda,
        n,
        zeta_hat: mean,
        method: Method::HockeyPlateau,
        trials: top.len(),
        ci_halfwidth: se,
        seed,
    })
}

fn run_cell(p: &SweepParams, lambda: f64, n: usize, method: Method, seed: u64) -> Result<CriticalEstimate> {
    match method {
        Method::HockeyPlateau => plateau_estimate(lambda, n, p.rho_max, p.grid_step, seed),
        Method::FixedEnergyTorus => estimate_zeta_fe(
            &FeParams::new(lambda, n, seed).trials(p.fe_trials).budget_factor(p.budget_factor),
        ),
        Method::DrivenDissipativeStationary => {
            let mut dd = DdParams::new(lambda, n, 2 * n as u64, 4 * n as u64, seed);
            dd.budget_factor = p.budget_factor;
            estimate_zeta_dd(&dd)
        }
    }
}

/// Runs every `(λ, n, replica, method)` cell. Errors are recorded per row.
/// The table depends only on the parameters, not on scheduling.
pub fn sweep(p: &SweepParams) -> SweepTable {
    let mut cells = Vec::new();
    for &lambda in &p.lambdas {
        for &n in &p.ns {
            for r in 0..p.replicas {
                for &method in &p.methods {
                    cells.push((lambda, n, r, method));
                }
            }
        }
    }
    let rows = cells
        .into_par_iter()
        .map(|(lambda, n, replica, method)| {
            let seed = replica_seed(p.seed, replica);
            let outcome = run_cell(p, lambda, n, method, seed).map_err(|e| e.to_string());
            SweepRow { lambda, n, replica, method, seed, outcome }
        })
        .collect();
    SweepTable { rows }
}

impl SweepTable {
    /// Estimates CSV. Failed cells carry `nan` estimates and are explained
    /// in trailing `# error` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CriticalEstimate::CSV_HEADER);
        out.push('\n');
        let mut errors = String::new();
        for row in &self.rows {
            match &row.outcome {
                Ok(est) => {
                    out.push_str(&est.csv_row(&row.seed.to_string()));
                    out.push('\n');
                }
                Err(msg) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},nan,nan,0,{}",
                        row.lambda, row.n, row.method, row.seed
                    );
                    let _ = writeln!(
                        errors,
                        "# error lambda={} n={} replica={} method={}: {}",
                        row.lambda, row.n, row.replica, row.method, msg
                    );
                }
            }
        }
        out + &errors
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_grid_has_header_only() {
        let t = sweep(&SweepParams::new(vec![], vec![], 3, 1));
        assert_eq!(t.to_csv(), format!("{}\n", CriticalEstimate::CSV_HEADER));
    }

    #[test]
    fn single_cell_matches_direct_run() {
        let mut p = SweepParams::new(vec![0.8], vec![30], 1, 42);
        p.grid_step = 0.1;
        let t = sweep(&p);
        assert_eq!(t.rows.len(), 1);
        let direct = plateau_estimate(0.8, 30, p.rho_max, p.grid_step, 42).unwrap();
        assert_eq!(t.rows[0].outcome.as_ref().unwrap(), &direct);
    }

    #[test]
    fn replicas_get_distinct_seeds() {
        let mut p = SweepParams::new(vec![0.8], vec![30], 2, 42);
        p.grid_step = 0.1;
        let t = sweep(&p);
        assert_eq!(t.rows.len(), 2);
        assert_ne!(t.rows[0].seed, t.rows[1].seed);
        assert_ne!(t.rows[0].outcome, t.rows[1].outcome);
        assert_eq!((t.rows[0].lambda, t.rows[0].n), (t.rows[1].lambda, t.rows[1].n));
    }

    #[test]
    fn failures_are_recorded() {
        let mut p = SweepParams::new(vec![0.8], vec![4], 1, 1);
        p.methods = vec![Method::FixedEnergyTorus];
        let t = sweep(&p);
        assert!(t.rows[0].outcome.is_err());
        let csv = t.to_csv();
        assert!(csv.contains(",nan,nan,"));
        assert!(csv.contains("# error lambda=0.8 n=4"));
    }
}
