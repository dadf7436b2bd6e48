//! Extended stable odometers with boundary data, the minimal odometer,
//! the map Φ to infection paths in layer percolation, exhaustive
//! enumeration of infection sets, k-greedy paths and the ζ* estimator.
//!
//! An extended odometer `u` lives on sites `0..=n+1` and may be negative;
//! negative values read the negative half of each instruction stack, and
//! only through the count identities. Membership in the class
//! `E_{n+1}(Instr, σ, u0, f0)` means `u(0) = u0`, flow `f0` from site 0 to
//! site 1, and the stability conditions on `1..=n`.
//!
//! With `f_v = R_v(u(v)) - L_{v+1}(u(v+1))`, stability at `v` reads
//! `f_v = f_{v-1} + σ(v) - 1{Instr_v(u(v)) = sleep}`, so `u(v+1)` must lie
//! in the run of indices at site `v+1` whose left count is
//! `R_v(u(v)) - f_v`. In cell coordinates this becomes a transition that
//! depends only on `(r, s)`: from cell `(r, s)` at step `v - 1` the
//! candidates at step `v` are the indices of left count `T_m(v) + r + s`,
//! where `T_m(v) = R(m(v-1)) - f0 - Z_{v-1}`.

mod enumerate;
mod greedy;
pub mod oracle;

use std::fmt::Write as _;

use crate::error::{ArwError, Result};
use crate::tape::{Instruction, InstructionTape, SiteStack};

pub use enumerate::{enumerate_infections, enumerate_odometers, InfectionSets, OdometerSet};
pub use greedy::{estimate_zeta_star, greedy_path, GreedyPath, ZetaStarEstimate};

/// Largest `n` accepted by the exhaustive enumerators.
pub const MAX_ENUM_N: usize = 12;

/// How far from index 0 a stack is scanned before giving up.
pub const SEARCH_LIMIT: i64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryData {
    pub n: usize,
    /// Active particles on sites `1..=n`.
    pub sigma: Vec<u32>,
    pub u0: i64,
    pub f0: i64,
}

impl BoundaryData {
    pub fn new(sigma: Vec<u32>, u0: i64, f0: i64) -> Self {
        Self { n: sigma.len(), sigma, u0, f0 }
    }

    /// `σ ≡ 0`, `u0 = f0 = 0`.
    pub fn zero(n: usize) -> Self {
        Self::new(vec![0; n], 0, 0)
    }

    /// `σ(v)`, zero outside `1..=n`.
    pub fn sigma_at(&self, v: usize) -> i64 {
        if v >= 1 && v <= self.n {
            self.sigma[v - 1] as i64
        } else {
            0
        }
    }

    /// `Z_j`, particles on `1..=j`.
    pub fn z(&self, j: usize) -> i64 {
        self.sigma[..j.min(self.n)].iter().map(|&x| x as i64).sum()
    }

    /// `e_i = -f0 - Z_i`.
    pub fn e(&self, i: usize) -> i64 {
        -self.f0 - self.z(i)
    }

    fn check(&self) -> Result<()> {
        if self.sigma.len() != self.n {
            return Err(ArwError::InvalidParameter(format!(
                "sigma has {} entries for n = {}",
                self.sigma.len(),
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedOdometer {
    /// `u(0), ..., u(n+1)`.
    pub values: Vec<i64>,
    /// `f_0, ..., f_n`.
    pub flows: Vec<i64>,
}

impl ExtendedOdometer {
    /// Computes the flows of `values` (sites `0..=n+1`) from the tape.
    pub fn new(values: Vec<i64>, tape: &InstructionTape) -> Self {
        let usage: Vec<_> =
            values.iter().enumerate().map(|(v, &x)| tape.prefix_counts(v as i64, x)).collect();
        let flows = (0..values.len().saturating_sub(1))
            .map(|v| usage[v].rights - usage[v + 1].lefts)
            .collect();
        Self { values, flows }
    }

    /// `n` for an odometer on `0..=n+1`.
    pub fn n(&self) -> usize {
        self.values.len().saturating_sub(2)
    }

    pub fn get(&self, v: usize) -> i64 {
        self.values[v]
    }

    /// Nonnegative everywhere.
    pub fn is_genuine(&self) -> bool {
        self.values.iter().all(|&x| x >= 0)
    }

    /// Values on `1..=n` as an engine odometer, if nonnegative there.
    pub fn to_engine(&self, tape: &InstructionTape) -> Option<crate::engine::Odometer> {
        let inner = &self.values[1..=self.n()];
        if inner.iter().any(|&x| x < 0) {
            return None;
        }
        Some(crate::engine::Odometer::from_counts(
            inner.iter().map(|&x| x as u64).collect(),
            tape,
        ))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("site,u,flow\n");
        for (v, &x) in self.values.iter().enumerate() {
            match self.flows.get(v) {
                Some(f) => {
                    let _ = writeln!(out, "{v},{x},{f}");
                }
                None => {
                    let _ = writeln!(out, "{v},{x},");
                }
            }
        }
        out
    }
}

/// A layer-percolation cell: column `r`, row `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub r: i64,
    pub s: i64,
}

impl Cell {
    pub const ORIGIN: Cell = Cell { r: 0, s: 0 };
}

/// Cells `(r_v, s_v)` for steps `v = 0, 1, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InfectionPath {
    pub cells: Vec<Cell>,
}

impl InfectionPath {
    pub fn last(&self) -> Cell {
        *self.cells.last().expect("paths start at the origin")
    }

    /// `step,r,s` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,r,s\n");
        for (v, c) in self.cells.iter().enumerate() {
            let _ = writeln!(out, "{v},{},{}", c.r, c.s);
        }
        out
    }
}

/// Stacks of sites `0..=steps` with the minimal odometer along them.
pub(crate) struct Layer<'t> {
    pub(crate) bd: BoundaryData,
    stacks: Vec<SiteStack<'t>>,
    /// `m(v)`.
    pub(crate) m: Vec<i64>,
    /// `R_v(m(v))`.
    pub(crate) rm: Vec<i64>,
}

/// One candidate value at a step, with the cell it leads to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Step {
    pub cell: Cell,
    pub x: i64,
}

impl<'t> Layer<'t> {
    /// Layer over steps `0..=bd.n + 1`.
    pub(crate) fn new(tape: &'t InstructionTape, bd: &BoundaryData) -> Result<Self> {
        bd.check()?;
        let steps = bd.n + 1;
        let mut stacks: Vec<_> =
            (0..=steps).map(|v| SiteStack::with_limit(tape, v as i64, SEARCH_LIMIT)).collect();
        let mut m = vec![bd.u0];
        let mut rm = vec![stacks[0].right_count(bd.u0)?];
        for v in 1..=steps {
            let target = rm[v - 1] - bd.f0 - bd.z(v - 1);
            let x = stacks[v].left_position(target)?;
            rm.push(stacks[v].right_count(x)?);
            m.push(x);
        }
        Ok(Self { bd: bd.clone(), stacks, m, rm })
    }

    pub(crate) fn steps(&self) -> usize {
        self.m.len() - 1
    }

    /// Left count required at step `v` from cell `c` at step `v - 1`.
    fn target(&self, v: usize, c: Cell) -> i64 {
        self.rm[v - 1] - self.bd.f0 - self.bd.z(v - 1) + c.r + c.s
    }

    /// Successors at step `v` of cell `c` at step `v - 1`, in increasing
    /// `x`. Values above `m(v) + cap` are dropped; the flag reports whether
    /// any were.
    pub(crate) fn successors(&mut self, v: usize, c: Cell, cap: Option<u64>) -> Result<(Vec<Step>, bool)> {
        let target = self.target(v, c);
        let (start, end) = self.stacks[v].run(target)?;
        let mut last = end - 1;
        let mut truncated = false;
        if let Some(cap) = cap {
            let limit = self.m[v].saturating_add(cap.min(i64::MAX as u64) as i64);
            if last > limit {
                last = limit;
                truncated = true;
            }
        }
        let mut out = Vec::new();
        if start > last {
            return Ok((out, truncated));
        }
        let stack = &mut self.stacks[v];
        let mut rights = stack.right_count(start)?;
        for x in start..=last {
            let ins = stack.instruction(x);
            if ins == Instruction::Right {
                rights += 1;
            }
            let cell = Cell { r: rights - self.rm[v], s: c.s + (ins == Instruction::Sleep) as i64 };
            out.push(Step { cell, x });
        }
        Ok((out, truncated))
    }

    pub(crate) fn instruction(&self, v: usize, x: i64) -> Instruction {
        self.stacks[v].instruction(x)
    }

    pub(crate) fn right_count(&mut self, v: usize, x: i64) -> Result<i64> {
        self.stacks[v].right_count(x)
    }

    pub(crate) fn left_count(&mut self, v: usize, x: i64) -> Result<i64> {
        self.stacks[v].left_count(x)
    }
}

/// The minimal member of `E_{n+1}`: `m(0) = u0` and `m(v)` the least index
/// with `L_v(m(v)) = R_{v-1}(m(v-1)) - f0 - Z_{v-1}`.
pub fn minimal_odometer(tape: &InstructionTape, bd: &BoundaryData) -> Result<ExtendedOdometer> {
    let mut layer = Layer::new(tape, bd)?;
    let values = layer.m.clone();
    let mut flows = Vec::with_capacity(bd.n + 1);
    for v in 0..=bd.n {
        let l = layer.left_count(v + 1, values[v + 1])?;
        flows.push(layer.rm[v] - l);
    }
    Ok(ExtendedOdometer { values, flows })
}

/// Checks membership of `u` in `E_{n+1}(tape, bd)`.
pub fn validate(u: &ExtendedOdometer, tape: &InstructionTape, bd: &BoundaryData) -> Result<()> {
    let bad = |msg: String| Err(ArwError::NotAMember(msg));
    if u.values.len() != bd.n + 2 {
        return bad(format!("expected {} values on 0..={}, got {}", bd.n + 2, bd.n + 1, u.values.len()));
    }
    let fresh = ExtendedOdometer::new(u.values.clone(), tape);
    if fresh.flows != u.flows {
        return bad("flows do not match the tape".into());
    }
    if u.values[0] != bd.u0 {
        return bad(format!("u(0) = {} but u0 = {}", u.values[0], bd.u0));
    }
    if u.flows[0] != bd.f0 {
        return bad(format!("flow from 0 to 1 is {} but f0 = {}", u.flows[0], bd.f0));
    }
    for v in 1..=bd.n {
        let h = bd.sigma_at(v) + u.flows[v - 1] - u.flows[v];
        let sleeps = tape.instruction_at(v as i64, u.values[v]) == Instruction::Sleep;
        if !(0..=1).contains(&h) {
            return bad(format!("h({v}) = {h}"));
        }
        if (h == 1) != sleeps {
            return bad(format!("h({v}) = {h} but the last instruction is {}", if sleeps { "sleep" } else { "not sleep" }));
        }
    }
    Ok(())
}

/// Φ: `r_v = R_v(u(v)) - R_v(m(v))`, `s_v = #{1 <= i <= v : Instr_i(u(i)) = sleep}`
/// for `v = 0..=n+1`.
pub fn phi_map(u: &ExtendedOdometer, tape: &InstructionTape, bd: &BoundaryData) -> Result<InfectionPath> {
    validate(u, tape, bd)?;
    let mut layer = Layer::new(tape, bd)?;
    let mut cells = vec![Cell::ORIGIN];
    let mut s = 0;
    for v in 1..=bd.n + 1 {
        let x = u.values[v];
        if layer.instruction(v, x) == Instruction::Sleep {
            s += 1;
        }
        let r = layer.right_count(v, x)? - layer.rm[v];
        cells.push(Cell { r, s });
    }
    Ok(InfectionPath { cells })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowRule {
    /// `u(v+1) >= 0` implies `u(v) > 0` or `f_v <= 0`.
    A,
    /// `u(v-1) >= 0` implies `u(v) >= 0` or `f_{v-1} > 0`.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowViolation {
    pub site: usize,
    pub rule: FlowRule,
}

/// Violated sign implications between odometer values and net flows.
pub fn flow_nonnegativity_check(u: &ExtendedOdometer) -> Vec<FlowViolation> {
    let mut out = Vec::new();
    let last = u.values.len().saturating_sub(1);
    for v in 0..last {
        if u.values[v + 1] >= 0 && !(u.values[v] > 0 || u.flows[v] <= 0) {
            out.push(FlowViolation { site: v, rule: FlowRule::A });
        }
    }
    for v in 1..=last {
        if u.values[v - 1] >= 0 && !(u.values[v] >= 0 || u.flows[v - 1] > 0) {
            out.push(FlowViolation { site: v, rule: FlowRule::B });
        }
    }
    out.sort_by_key(|f| f.site);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_boundary_gives_zero_minimal_odometer() {
        for seed in 0..20 {
            let tape = InstructionTape::new(seed, 0.8).unwrap();
            let m = minimal_odometer(&tape, &BoundaryData::zero(5)).unwrap();
            assert_eq!(m.values, vec![0; 7]);
            assert_eq!(m.flows, vec![0; 6]);
            assert!(flow_nonnegativity_check(&m).is_empty());
        }
    }

    #[test]
    fn negative_f0_targets_left_counts() {
        let tape = InstructionTape::new(11, 0.8).unwrap();
        let bd = BoundaryData::new(vec![0; 4], 0, -3);
        let m = minimal_odometer(&tape, &bd).unwrap();
        let mut rprev = 0;
        for v in 1..=5 {
            let target = rprev + 3;
            let x = m.values[v];
            assert_eq!(tape.prefix_counts(v as i64, x).lefts, target);
            assert_ne!(tape.prefix_counts(v as i64, x - 1).lefts, target);
            rprev = tape.prefix_counts(v as i64, x).rights;
        }
    }

    #[test]
    fn minimal_odometer_maps_to_column_zero() {
        for seed in 0..20 {
            let tape = InstructionTape::new(seed, 0.8).unwrap();
            let bd = BoundaryData::new(vec![1, 0, 2, 1], 3, -2);
            let m = minimal_odometer(&tape, &bd).unwrap();
            let path = phi_map(&m, &tape, &bd).unwrap();
            assert!(path.cells.iter().all(|c| *c == Cell::ORIGIN));
        }
    }

    #[test]
    fn phi_rejects_non_members() {
        let tape = InstructionTape::new(5, 0.8).unwrap();
        let bd = BoundaryData::zero(3);
        let mut u = minimal_odometer(&tape, &bd).unwrap();
        u.values[0] = 7;
        assert!(matches!(phi_map(&u, &tape, &bd), Err(ArwError::NotAMember(_))));
        let short = ExtendedOdometer::new(vec![0, 0], &tape);
        assert!(phi_map(&short, &tape, &bd).is_err());
    }

    #[test]
    fn flows_follow_prefix_counts() {
        let tape = InstructionTape::new(2, 1.0).unwrap();
        let u = ExtendedOdometer::new(vec![3, -4, 0, 9], &tape);
        for v in 0..3 {
            let f = tape.prefix_counts(v as i64, u.values[v]).rights
                - tape.prefix_counts(v as i64 + 1, u.values[v + 1]).lefts;
            assert_eq!(u.flows[v], f);
        }
        assert_eq!(u.n(), 2);
    }
}
