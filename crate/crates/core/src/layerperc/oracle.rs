//! Brute-force reference for the layer-percolation enumerators.
//!
//! Everything here is recomputed from raw tape prefix counts: the minimal
//! odometer by linear search, class membership by checking the stability
//! conditions literally on every array in the window, and Φ directly from
//! its definition. Nothing is shared with the fast path beyond the tape.

use std::collections::BTreeSet;

use super::{BoundaryData, Cell};
use crate::error::{ArwError, Result};
use crate::tape::{Instruction, InstructionTape};

/// Least `x` with `L_site(x) = c`, by scanning.
fn first_with_left_count(tape: &InstructionTape, site: i64, c: i64) -> i64 {
    let l = |x: i64| tape.prefix_counts(site, x).lefts;
    let mut x = 0;
    while l(x) < c {
        x += 1;
    }
    while l(x - 1) >= c {
        x -= 1;
    }
    x
}

/// Minimal odometer on `0..=n+1`.
pub fn minimal_odometer(tape: &InstructionTape, bd: &BoundaryData) -> Vec<i64> {
    let mut m = vec![bd.u0];
    for v in 1..=bd.n + 1 {
        let prev = tape.prefix_counts(v as i64 - 1, m[v - 1]).rights;
        let z: i64 = bd.sigma[..v - 1].iter().map(|&x| x as i64).sum();
        m.push(first_with_left_count(tape, v as i64, prev - bd.f0 - z));
    }
    m
}

#[derive(Debug, Clone, Copy)]
struct Usage {
    x: i64,
    lefts: i64,
    rights: i64,
    sleep: bool,
}

/// All arrays `u` on `0..=n+1` with `u(0) = u0`, `|u(v) - m(v)| <= cap`,
/// flow `f0` into site 1 and conditions (a), (b) on `1..=n`.
pub fn members(tape: &InstructionTape, bd: &BoundaryData, cap: u64) -> Result<Vec<Vec<i64>>> {
    if bd.sigma.len() != bd.n {
        return Err(ArwError::InvalidParameter("sigma length differs from n".into()));
    }
    let cap = cap as i64;
    let m = minimal_odometer(tape, bd);
    let table: Vec<Vec<Usage>> = (0..=bd.n + 1)
        .map(|v| {
            let range = if v == 0 { bd.u0..=bd.u0 } else { m[v] - cap..=m[v] + cap };
            range
                .map(|x| {
                    let p = tape.prefix_counts(v as i64, x);
                    let sleep = tape.instruction_at(v as i64, x) == Instruction::Sleep;
                    Usage { x, lefts: p.lefts, rights: p.rights, sleep }
                })
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    let mut partial: Vec<Usage> = vec![table[0][0]];
    extend(bd, &table, &mut partial, &mut out);
    Ok(out)
}

fn extend(bd: &BoundaryData, table: &[Vec<Usage>], partial: &mut Vec<Usage>, out: &mut Vec<Vec<i64>>) {
    let next = partial.len();
    if next == bd.n + 2 {
        out.push(partial.iter().map(|u| u.x).collect());
        return;
    }
    for cand in &table[next] {
        let ok = if next == 1 {
            partial[0].rights - cand.lefts == bd.f0
        } else {
            let v = next - 1;
            let (a, b) = (partial[v - 1], partial[v]);
            let h = bd.sigma[v - 1] as i64 + a.rights + cand.lefts - b.lefts - b.rights;
            (h == 0 || h == 1) && (h == 1) == b.sleep
        };
        if ok {
            partial.push(*cand);
            extend(bd, table, partial, out);
            partial.pop();
        }
    }
}

/// Φ of a member, from the definition.
pub fn phi(tape: &InstructionTape, bd: &BoundaryData, u: &[i64]) -> Vec<Cell> {
    let m = minimal_odometer(tape, bd);
    let mut s = 0;
    (0..u.len())
        .map(|v| {
            if v >= 1 && tape.instruction_at(v as i64, u[v]) == Instruction::Sleep {
                s += 1;
            }
            let r = tape.prefix_counts(v as i64, u[v]).rights - tape.prefix_counts(v as i64, m[v]).rights;
            Cell { r, s }
        })
        .collect()
}

/// Per-step Φ-images of all windowed members.
pub fn infection_sets(tape: &InstructionTape, bd: &BoundaryData, cap: u64) -> Result<Vec<BTreeSet<Cell>>> {
    let mut sets = vec![BTreeSet::new(); bd.n + 2];
    for u in members(tape, bd, cap)? {
        for (v, c) in phi(tape, bd, &u).into_iter().enumerate() {
            sets[v].insert(c);
        }
    }
    Ok(sets)
}

/// Whether some windowed member lies below the minimal odometer at a site.
pub fn has_member_below_minimal(tape: &InstructionTape, bd: &BoundaryData, cap: u64) -> Result<bool> {
    let m = minimal_odometer(tape, bd);
    Ok(members(tape, bd, cap)?.iter().any(|u| u.iter().zip(&m).any(|(a, b)| a < b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_finds_first_index() {
        let tape = InstructionTape::new(8, 0.8).unwrap();
        for c in -10..10 {
            let x = first_with_left_count(&tape, 3, c);
            assert_eq!(tape.prefix_counts(3, x).lefts, c);
            assert_eq!(tape.prefix_counts(3, x - 1).lefts, c - 1);
        }
    }

    #[test]
    fn minimal_odometer_is_a_member() {
        let tape = InstructionTape::new(8, 0.8).unwrap();
        let bd = BoundaryData::new(vec![1, 1, 1], 0, 0);
        let m = minimal_odometer(&tape, &bd);
        assert!(members(&tape, &bd, 10).unwrap().contains(&m));
    }
}
