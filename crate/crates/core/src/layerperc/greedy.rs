use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::{BoundaryData, Cell, InfectionPath, Layer};
use crate::error::{ArwError, Result};
use crate::seed::{derive, Stream};
use crate::tape::InstructionTape;

pub const MAX_GREEDY_K: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyPath {
    pub k: usize,
    pub path: InfectionPath,
    /// An odometer realizing the path on steps `0..=horizon`.
    pub values: Vec<i64>,
}

impl GreedyPath {
    /// Cells at steps `0, k, 2k, ...`.
    pub fn blocks(&self) -> Vec<Cell> {
        self.path.cells.iter().step_by(self.k).copied().collect()
    }

    /// `block,r,s`, block 0 being the origin.
    pub fn records_csv(&self) -> String {
        let mut out = String::from("block,r,s\n");
        for (j, c) in self.blocks().iter().enumerate() {
            let _ = writeln!(out, "{j},{},{}", c.r, c.s);
        }
        out
    }
}

/// Block-wise row-maximizing infection path over `horizon` steps.
///
/// Each block explores every path of `k` steps from the current cell and
/// moves to a cell of maximal row; ties go to the smaller column, then to
/// the smaller parent cell, then to the smaller odometer value.
pub fn greedy_path(tape: &InstructionTape, bd: &BoundaryData, k: usize, horizon: usize) -> Result<GreedyPath> {
    if k == 0 || k > MAX_GREEDY_K {
        return Err(ArwError::InvalidParameter(format!("k must be in 1..={MAX_GREEDY_K}")));
    }
    if horizon % k != 0 {
        return Err(ArwError::InvalidParameter(format!("horizon {horizon} is not a multiple of k = {k}")));
    }
    if horizon > bd.n + 1 {
        return Err(ArwError::InvalidParameter(format!(
            "horizon {horizon} exceeds the {} steps of the boundary data",
            bd.n + 1
        )));
    }
    let mut layer = Layer::new(tape, bd)?;
    let mut cells = vec![Cell::ORIGIN];
    let mut values = vec![bd.u0];
    for block in 0..horizon / k {
        let start = block * k;
        let mut levels: Vec<BTreeMap<Cell, (Cell, i64)>> = Vec::with_capacity(k + 1);
        let here = cells[start];
        levels.push(BTreeMap::from([(here, (here, values[start]))]));
        for t in 1..=k {
            let mut next = BTreeMap::new();
            for &c in levels[t - 1].keys() {
                let (succ, _) = layer.successors(start + t, c, None)?;
                for s in succ {
                    next.entry(s.cell).or_insert((c, s.x));
                }
            }
            if next.is_empty() {
                return Err(ArwError::InfeasibleBoundary { step: start + t });
            }
            levels.push(next);
        }
        let best = *levels[k]
            .keys()
            .max_by(|a, b| a.s.cmp(&b.s).then(b.r.cmp(&a.r)))
            .expect("nonempty level");
        let mut trail = Vec::with_capacity(k);
        let mut c = best;
        for t in (1..=k).rev() {
            let (parent, x) = levels[t][&c];
            trail.push((c, x));
            c = parent;
        }
        for (c, x) in trail.into_iter().rev() {
            cells.push(c);
            values.push(x);
        }
    }
    Ok(GreedyPath { k, path: InfectionPath { cells }, values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZetaStarEstimate {
    pub lambda: f64,
    pub k: usize,
    pub horizon: usize,
    pub replicas: usize,
    /// Mean of `s_horizon / horizon` over replicas.
    pub mean: f64,
    pub std_err: f64,
    /// Mean of `X_k / k`, the best row after one block from the origin.
    pub direct_mean: f64,
    pub direct_std_err: f64,
}

impl ZetaStarEstimate {
    pub const CSV_HEADER: &'static str =
        "lambda,k,horizon,replicas,zeta_star,std_err,direct,direct_std_err";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6}",
            self.lambda,
            self.k,
            self.horizon,
            self.replicas,
            self.mean,
            self.std_err,
            self.direct_mean,
            self.direct_std_err
        )
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// ζ*(k) from `replicas` independent k-greedy paths with trivial boundary
/// data (`σ ≡ 0`, `u0 = f0 = 0`). Replica `i` reads the tape seeded by
/// `derive(seed, Replica, i)`.
pub fn estimate_zeta_star(seed: u64, lambda: f64, k: usize, horizon: usize, replicas: usize) -> Result<ZetaStarEstimate> {
    if replicas == 0 || horizon == 0 {
        return Err(ArwError::InvalidParameter("need replicas >= 1 and horizon >= 1".into()));
    }
    let bd = BoundaryData::zero(horizon - 1);
    let runs: Vec<(f64, f64)> = (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let tape = InstructionTape::new(derive(seed, Stream::Replica, i), lambda)?;
            let g = greedy_path(&tape, &bd, k, horizon)?;
            let rate = g.path.last().s as f64 / horizon as f64;
            let first = g.path.cells[k].s as f64 / k as f64;
            Ok((rate, first))
        })
        .collect::<Result<_>>()?;
    let (rates, firsts): (Vec<f64>, Vec<f64>) = runs.into_iter().unzip();
    let (mean, std_err) = mean_se(&rates);
    let (direct_mean, direct_std_err) = mean_se(&firsts);
    Ok(ZetaStarEstimate { lambda, k, horizon, replicas, mean, std_err, direct_mean, direct_std_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layerperc::{enumerate_infections, phi_map, ExtendedOdometer};

    #[test]
    fn single_block_reaches_max_row() {
        for seed in 0..10 {
            let tape = InstructionTape::new(seed, 0.8).unwrap();
            let bd = BoundaryData::new(vec![1, 0, 1], 0, 0);
            let g = greedy_path(&tape, &bd, 4, 4).unwrap();
            let sets = enumerate_infections(&tape, &bd, None).unwrap();
            assert_eq!(Some(g.path.last().s), sets.max_row());
            let u = ExtendedOdometer::new(g.values.clone(), &tape);
            assert_eq!(phi_map(&u, &tape, &bd).unwrap(), g.path);
        }
    }

    #[test]
    fn rows_never_decrease() {
        let tape = InstructionTape::new(4, 0.8).unwrap();
        let g = greedy_path(&tape, &BoundaryData::zero(23), 2, 24).unwrap();
        for w in g.path.cells.windows(2) {
            assert!(w[1].s - w[0].s == 0 || w[1].s - w[0].s == 1);
        }
        assert_eq!(g.blocks().len(), 13);
        assert!(g.records_csv().starts_with("block,r,s\n0,0,0\n"));
    }

    #[test]
    fn bad_parameters() {
        let tape = InstructionTape::new(4, 0.8).unwrap();
        let bd = BoundaryData::zero(10);
        assert!(greedy_path(&tape, &bd, 0, 4).is_err());
        assert!(greedy_path(&tape, &bd, 7, 7).is_err());
        assert!(greedy_path(&tape, &bd, 3, 4).is_err());
        assert!(greedy_path(&tape, &bd, 2, 14).is_err());
    }

    #[test]
    fn one_step_rate() {
        // With k = 1 a row is gained when a sleep precedes the next left.
        let est = estimate_zeta_star(1, 0.8, 1, 40, 400).unwrap();
        let exact = 0.8 / 1.3;
        assert!((est.mean - exact).abs() < 4.0 * est.std_err + 1e-9, "{est:?}");
    }
}
