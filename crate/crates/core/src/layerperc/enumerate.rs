use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{BoundaryData, Cell, ExtendedOdometer, Layer, MAX_ENUM_N};
use crate::error::{ArwError, Result};
use crate::tape::InstructionTape;

/// Reachable cells at steps `0..=n+1`, restricted to paths of members
/// whose values stay within `window_cap` of the minimal odometer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfectionSets {
    pub steps: Vec<BTreeSet<Cell>>,
    /// Some candidate was cut by the window, so the true sets may be larger.
    pub truncated: bool,
}

impl InfectionSets {
    /// `step,r,s`, one line per cell.
    pub fn dump(&self) -> String {
        let mut out = String::from("step,r,s\n");
        for (v, set) in self.steps.iter().enumerate() {
            for c in set {
                let _ = writeln!(out, "{v},{},{}", c.r, c.s);
            }
        }
        out
    }

    /// Highest row at the last step.
    pub fn max_row(&self) -> Option<i64> {
        self.steps.last()?.iter().map(|c| c.s).max()
    }
}

fn check_n(bd: &BoundaryData) -> Result<()> {
    if bd.n > MAX_ENUM_N {
        return Err(ArwError::InvalidParameter(format!(
            "enumeration is limited to n <= {MAX_ENUM_N}, got {}",
            bd.n
        )));
    }
    Ok(())
}

/// Infection sets of the windowed class, by a forward pass over cells
/// followed by a backward pass that keeps only cells on complete paths.
pub fn enumerate_infections(
    tape: &InstructionTape,
    bd: &BoundaryData,
    window_cap: Option<u64>,
) -> Result<InfectionSets> {
    check_n(bd)?;
    let mut layer = Layer::new(tape, bd)?;
    let steps = layer.steps();
    let mut truncated = false;
    let mut edges: Vec<BTreeMap<Cell, BTreeSet<Cell>>> = Vec::with_capacity(steps);
    let mut frontier = BTreeSet::from([Cell::ORIGIN]);
    for v in 1..=steps {
        let mut next = BTreeSet::new();
        let mut out = BTreeMap::new();
        for &c in &frontier {
            let (succ, cut) = layer.successors(v, c, window_cap)?;
            truncated |= cut;
            let targets: BTreeSet<Cell> = succ.iter().map(|s| s.cell).collect();
            next.extend(targets.iter().copied());
            out.insert(c, targets);
        }
        if next.is_empty() {
            return Err(ArwError::InfeasibleBoundary { step: v });
        }
        edges.push(out);
        frontier = next;
    }

    let mut sets = vec![BTreeSet::new(); steps + 1];
    sets[steps] = frontier;
    for v in (0..steps).rev() {
        let alive: BTreeSet<Cell> = edges[v]
            .iter()
            .filter(|(_, t)| t.iter().any(|c| sets[v + 1].contains(c)))
            .map(|(c, _)| *c)
            .collect();
        sets[v] = alive;
    }
    if sets[0].is_empty() {
        return Err(ArwError::InfeasibleBoundary { step: 0 });
    }
    Ok(InfectionSets { steps: sets, truncated })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdometerSet {
    pub odometers: Vec<ExtendedOdometer>,
    pub truncated: bool,
}

/// Every member of the windowed class, in lexicographic order of values.
/// Fails with `InvalidParameter` once more than `limit` members are found.
pub fn enumerate_odometers(
    tape: &InstructionTape,
    bd: &BoundaryData,
    window_cap: Option<u64>,
    limit: usize,
) -> Result<OdometerSet> {
    check_n(bd)?;
    let mut layer = Layer::new(tape, bd)?;
    let steps = layer.steps();
    let mut walk = Walk { layer: &mut layer, tape, cap: window_cap, limit, out: Vec::new(), truncated: false };
    let mut values = vec![bd.u0];
    walk.descend(1, steps, Cell::ORIGIN, &mut values)?;
    let Walk { out, truncated, .. } = walk;
    Ok(OdometerSet { odometers: out, truncated })
}

struct Walk<'a, 't> {
    layer: &'a mut Layer<'t>,
    tape: &'a InstructionTape,
    cap: Option<u64>,
    limit: usize,
    out: Vec<ExtendedOdometer>,
    truncated: bool,
}

impl Walk<'_, '_> {
    fn descend(&mut self, v: usize, steps: usize, from: Cell, values: &mut Vec<i64>) -> Result<()> {
        let (cands, cut) = self.layer.successors(v, from, self.cap)?;
        self.truncated |= cut;
        for step in cands {
            values.push(step.x);
            if v == steps {
                if self.out.len() == self.limit {
                    return Err(ArwError::InvalidParameter(format!(
                        "more than {} odometers in the window",
                        self.limit
                    )));
                }
                self.out.push(ExtendedOdometer::new(values.clone(), self.tape));
            } else {
                self.descend(v + 1, steps, step.cell, values)?;
            }
            values.pop();
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layerperc::{flow_nonnegativity_check, minimal_odometer, phi_map};

    #[test]
    fn step_zero_is_origin() {
        let tape = InstructionTape::new(1, 0.8).unwrap();
        let sets = enumerate_infections(&tape, &BoundaryData::new(vec![1; 3], 0, 0), Some(40)).unwrap();
        assert_eq!(sets.steps[0], BTreeSet::from([Cell::ORIGIN]));
        assert_eq!(sets.steps.len(), 5);
        for (v, set) in sets.steps.iter().enumerate() {
            assert!(set.iter().all(|c| c.s <= v as i64 && c.s >= 0 && c.r >= 0));
        }
    }

    #[test]
    fn odometers_and_sets_agree() {
        for seed in 0..10 {
            let tape = InstructionTape::new(seed, 0.8).unwrap();
            let bd = BoundaryData::new(vec![1, 0, 2], 0, -1);
            let sets = enumerate_infections(&tape, &bd, Some(40)).unwrap();
            let all = enumerate_odometers(&tape, &bd, Some(40), 1_000_000).unwrap();
            let m = minimal_odometer(&tape, &bd).unwrap();
            let mut seen = vec![BTreeSet::new(); bd.n + 2];
            for u in &all.odometers {
                let path = phi_map(u, &tape, &bd).unwrap();
                for (v, c) in path.cells.iter().enumerate() {
                    seen[v].insert(*c);
                }
                assert!(u.values.iter().zip(&m.values).all(|(a, b)| a >= b));
                assert!(flow_nonnegativity_check(u).is_empty());
            }
            assert_eq!(seen, sets.steps);
        }
    }

    #[test]
    fn tiny_window_is_truncated_or_infeasible() {
        let tape = InstructionTape::new(3, 0.8).unwrap();
        let bd = BoundaryData::new(vec![2; 4], 0, 0);
        match enumerate_infections(&tape, &bd, Some(0)) {
            Ok(sets) => assert!(sets.truncated),
            Err(ArwError::InfeasibleBoundary { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn rejects_large_n() {
        let tape = InstructionTape::new(3, 0.8).unwrap();
        assert!(enumerate_infections(&tape, &BoundaryData::zero(13), Some(4)).is_err());
    }
}
