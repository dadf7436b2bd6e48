//! Instruction tapes: one bi-infinite stack of `left`/`right`/`sleep`
//! symbols per site, generated on demand from a counter-based hash of
//! `(seed, site, index)`.
//!
//! Index `k >= 1` is the `k`-th instruction executed at a site. Indices
//! `k <= 0` form the negative half used by extended odometers. Index 0 is a
//! fixed `left` marker: an odometer resting at 0 has executed nothing, and
//! the lowest value carrying a given left count always sits on a `left`
//! symbol. Indices other than 0 are i.i.d. with
//! `P(left) = P(right) = (1/2)/(1+λ)` and `P(sleep) = λ/(1+λ)`.

use std::fmt;

use crate::error::{ArwError, Result};
use crate::seed::mix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instruction {
    Left,
    Right,
    Sleep,
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Instruction::Left => "left",
            Instruction::Right => "right",
            Instruction::Sleep => "sleep",
        })
    }
}

/// Counts of each symbol over a prefix of a stack. For negative `k` the
/// counts cover indices `k+1..=0` and are reported negated, so all three
/// are nondecreasing in `k` and vanish at `k = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct PrefixCounts {
    pub lefts: i64,
    pub rights: i64,
    pub sleeps: i64,
}

impl PrefixCounts {
    pub fn total(&self) -> i64 {
        self.lefts + self.rights + self.sleeps
    }
}

/// Per-site hash key. Computing it once per site saves one mixing round
/// per instruction in hot loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiteKey(u64);

#[derive(Debug, Clone, PartialEq)]
pub struct InstructionTape {
    seed: u64,
    lambda: f64,
    left_cut: u64,
    right_cut: u64,
}

impl InstructionTape {
    pub fn new(seed: u64, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(ArwError::InvalidParameter(format!(
                "sleep rate must be positive and finite, got {lambda}"
            )));
        }
        let p_step = 0.5 / (1.0 + lambda);
        // 2^64 * p, exact enough for p in (0, 1/2).
        let left_cut = (p_step * 18_446_744_073_709_551_616.0) as u64;
        Ok(Self { seed, lambda, left_cut, right_cut: left_cut.saturating_mul(2) })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Probability of each of `left` and `right`.
    pub fn p_step(&self) -> f64 {
        0.5 / (1.0 + self.lambda)
    }

    pub fn p_sleep(&self) -> f64 {
        self.lambda / (1.0 + self.lambda)
    }

    #[inline(always)]
    pub fn site_key(&self, site: i64) -> SiteKey {
        let a = mix64(self.seed ^ 0x6A09_E667_F3BC_C909);
        SiteKey(mix64(a ^ (site as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }

    #[inline(always)]
    pub fn instruction_keyed(&self, key: SiteKey, index: i64) -> Instruction {
        if index == 0 {
            return Instruction::Left;
        }
        let x = mix64(key.0.wrapping_add((index as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93)));
        if x < self.left_cut {
            Instruction::Left
        } else if x < self.right_cut {
            Instruction::Right
        } else {
            Instruction::Sleep
        }
    }

    /// The `index`-th instruction at `site`. Pure in `(seed, λ, site, index)`.
    pub fn instruction_at(&self, site: i64, index: i64) -> Instruction {
        self.instruction_keyed(self.site_key(site), index)
    }

    /// Symbol counts over indices `1..=k` (or `k+1..=0`, negated, for `k < 0`).
    /// Linear in `|k|`; use [`SiteStack`] for repeated queries.
    pub fn prefix_counts(&self, site: i64, k: i64) -> PrefixCounts {
        let key = self.site_key(site);
        let mut c = PrefixCounts::default();
        let (range, sign) = if k >= 0 { (1..=k, 1) } else { (k + 1..=0, -1) };
        for i in range {
            match self.instruction_keyed(key, i) {
                Instruction::Left => c.lefts += sign,
                Instruction::Right => c.rights += sign,
                Instruction::Sleep => c.sleeps += sign,
            }
        }
        c
    }
}

/// Memoized view of one site's stack, indexed by its `left` symbols.
///
/// Lefts are numbered by their left count: the left at index 0 has number
/// 0, the first left above it number 1, the first below it number -1, and
/// so on. `left_position(c)` is then the smallest index `x` with
/// `L(x) = c`, and `L(x) = c` holds exactly on
/// `left_position(c)..left_position(c + 1)`.
#[derive(Debug, Clone)]
pub struct SiteStack<'a> {
    tape: &'a InstructionTape,
    site: i64,
    key: SiteKey,
    limit: i64,
    // (position, R(position)) of lefts numbered 1, 2, ...
    up: Vec<(i64, i64)>,
    up_scanned: i64,
    up_rights: i64,
    // (position, R(position)) of lefts numbered 0, -1, -2, ...
    down: Vec<(i64, i64)>,
    down_scanned: i64,
    down_rights: i64,
}

impl<'a> SiteStack<'a> {
    pub const DEFAULT_LIMIT: i64 = 1 << 40;

    pub fn new(tape: &'a InstructionTape, site: i64) -> Self {
        Self::with_limit(tape, site, Self::DEFAULT_LIMIT)
    }

    /// `limit` bounds how far from index 0 the cache will scan.
    pub fn with_limit(tape: &'a InstructionTape, site: i64, limit: i64) -> Self {
        Self {
            tape,
            site,
            key: tape.site_key(site),
            limit,
            up: Vec::new(),
            up_scanned: 0,
            up_rights: 0,
            down: vec![(0, 0)],
            down_scanned: 0,
            down_rights: 0,
        }
    }

    pub fn site(&self) -> i64 {
        self.site
    }

    #[inline]
    pub fn instruction(&self, index: i64) -> Instruction {
        self.tape.instruction_keyed(self.key, index)
    }

    fn exhausted(&self, target: i64) -> ArwError {
        ArwError::SearchWindowExhausted { site: self.site, target, limit: self.limit }
    }

    fn scan_up_to(&mut self, index: i64) -> Result<()> {
        while self.up_scanned < index {
            if self.up_scanned >= self.limit {
                return Err(self.exhausted(index));
            }
            self.up_scanned += 1;
            match self.instruction(self.up_scanned) {
                Instruction::Left => self.up.push((self.up_scanned, self.up_rights)),
                Instruction::Right => self.up_rights += 1,
                Instruction::Sleep => {}
            }
        }
        Ok(())
    }

    fn scan_down_to(&mut self, index: i64) -> Result<()> {
        while self.down_scanned > index {
            if self.down_scanned <= -self.limit {
                return Err(self.exhausted(index));
            }
            self.down_scanned -= 1;
            let i = self.down_scanned;
            match self.instruction(i) {
                Instruction::Left => self.down.push((i, -self.down_rights)),
                Instruction::Right => self.down_rights += 1,
                Instruction::Sleep => {}
            }
        }
        Ok(())
    }

    fn entry(&mut self, c: i64) -> Result<(i64, i64)> {
        if c >= 1 {
            let i = (c - 1) as usize;
            while self.up.len() <= i {
                if self.up_scanned >= self.limit {
                    return Err(self.exhausted(c));
                }
                self.scan_up_to(self.up_scanned + 1)?;
            }
            Ok(self.up[i])
        } else {
            let i = (-c) as usize;
            while self.down.len() <= i {
                if self.down_scanned <= -self.limit {
                    return Err(self.exhausted(c));
                }
                self.scan_down_to(self.down_scanned - 1)?;
            }
            Ok(self.down[i])
        }
    }

    /// Smallest index `x` with left count `L(x) = c`. The symbol there is
    /// always `left`.
    pub fn left_position(&mut self, c: i64) -> Result<i64> {
        self.entry(c).map(|e| e.0)
    }

    /// The maximal run `start..end` of indices sharing left count `c`.
    pub fn run(&mut self, c: i64) -> Result<(i64, i64)> {
        Ok((self.left_position(c)?, self.left_position(c + 1)?))
    }

    /// `L(x)`.
    pub fn left_count(&mut self, x: i64) -> Result<i64> {
        if x >= 0 {
            self.scan_up_to(x)?;
            Ok(self.up.partition_point(|&(p, _)| p <= x) as i64)
        } else {
            self.scan_down_to(x + 1)?;
            // `down` is sorted by decreasing position.
            Ok(-(self.down.partition_point(|&(p, _)| p > x) as i64))
        }
    }

    /// `R(x)`.
    pub fn right_count(&mut self, x: i64) -> Result<i64> {
        let c = self.left_count(x)?;
        let (pos, rights) = self.entry(c)?;
        let mut r = rights;
        for i in pos + 1..=x {
            if self.instruction(i) == Instruction::Right {
                r += 1;
            }
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lambda() {
        assert!(InstructionTape::new(1, 0.0).is_err());
        assert!(InstructionTape::new(1, -1.0).is_err());
        assert!(InstructionTape::new(1, f64::NAN).is_err());
        assert!(InstructionTape::new(1, f64::INFINITY).is_err());
    }

    #[test]
    fn deterministic_access() {
        let tape = InstructionTape::new(99, 0.8).unwrap();
        for site in -5..5 {
            for k in -50..50 {
                assert_eq!(tape.instruction_at(site, k), tape.instruction_at(site, k));
            }
        }
        assert_eq!(tape.instruction_at(3, 0), Instruction::Left);
    }

    #[test]
    fn empty_prefix() {
        let tape = InstructionTape::new(5, 1.0).unwrap();
        assert_eq!(tape.prefix_counts(2, 0), PrefixCounts::default());
    }

    #[test]
    fn single_symbol_prefix() {
        let tape = InstructionTape::new(5, 1.0).unwrap();
        // Find a site whose first instruction is `right`.
        let site = (0..).find(|&s| tape.instruction_at(s, 1) == Instruction::Right).unwrap();
        assert_eq!(tape.prefix_counts(site, 1), PrefixCounts { lefts: 0, rights: 1, sleeps: 0 });
    }

    #[test]
    fn prefix_differences_match_symbols() {
        let tape = InstructionTape::new(1234, 0.8).unwrap();
        for site in [-3, 0, 1, 7] {
            for k in -100..=100 {
                let d = {
                    let a = tape.prefix_counts(site, k);
                    let b = tape.prefix_counts(site, k - 1);
                    (a.lefts - b.lefts, a.rights - b.rights, a.sleeps - b.sleeps)
                };
                let expected = match tape.instruction_at(site, k) {
                    Instruction::Left => (1, 0, 0),
                    Instruction::Right => (0, 1, 0),
                    Instruction::Sleep => (0, 0, 1),
                };
                assert_eq!(d, expected, "site {site} k {k}");
                assert_eq!(tape.prefix_counts(site, k).total(), k);
            }
        }
    }

    #[test]
    fn site_stack_agrees_with_prefix_counts() {
        let tape = InstructionTape::new(77, 0.8).unwrap();
        for site in 0..4 {
            let mut stack = SiteStack::new(&tape, site);
            for x in -120..=120 {
                let p = tape.prefix_counts(site, x);
                assert_eq!(stack.left_count(x).unwrap(), p.lefts, "L({x})");
                assert_eq!(stack.right_count(x).unwrap(), p.rights, "R({x})");
            }
            for c in -20..=20 {
                let pos = stack.left_position(c).unwrap();
                // brute force: smallest x in a wide range with L(x) = c
                let brute = (-400..=400).find(|&x| tape.prefix_counts(site, x).lefts == c).unwrap();
                assert_eq!(pos, brute);
                assert_eq!(tape.instruction_at(site, pos), Instruction::Left);
            }
        }
    }

    #[test]
    fn search_limit_is_reported() {
        let tape = InstructionTape::new(1, 0.8).unwrap();
        let mut stack = SiteStack::with_limit(&tape, 0, 10);
        assert!(matches!(
            stack.left_position(1000),
            Err(ArwError::SearchWindowExhausted { .. })
        ));
    }
}
