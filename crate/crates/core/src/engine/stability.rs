use super::config::Configuration;
use super::stabilize::Odometer;
use crate::tape::{Instruction, InstructionTape};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `h(v)` outside `{0, 1}`.
    Balance,
    /// `h(v) = 1` without a final `sleep`, or a final `sleep` with `h(v) = 0`.
    EndInSleep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub site: usize,
    pub h: i64,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub violations: Vec<Violation>,
    /// `(site, h(site))` for every checked site.
    pub h: Vec<(usize, i64)>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.violations.is_empty()
    }

    /// Particles the odometer leaves on the checked sites.
    pub fn resting(&self) -> i64 {
        self.h.iter().map(|&(_, h)| h).sum()
    }
}

/// Checks the local stability conditions of `odometer` on `sites`:
///
/// (a) `h(v) = σ(v) + R(v-1) + L(v+1) - L(v) - R(v)` is 0 or 1, and
/// (b) `h(v) = 1` exactly when the last instruction executed at `v` is `sleep`.
///
/// Usage counts are recounted from the tape, independently of what the
/// engine recorded. A site that starts with a sleeper and is never toppled
/// counts as ending asleep.
pub fn check_stable(
    odometer: &Odometer,
    initial: &Configuration,
    tape: &InstructionTape,
    sites: impl IntoIterator<Item = usize>,
) -> StabilityReport {
    let n = odometer.n();
    let usage = |v: i64| {
        if v < 1 || v as usize > n {
            (0, 0)
        } else {
            let p = tape.prefix_counts(v, odometer.get(v) as i64);
            (p.lefts, p.rights)
        }
    };
    let mut report = StabilityReport { violations: Vec::new(), h: Vec::new() };
    for site in sites {
        let v = site as i64;
        let sigma = if site >= 1 && site <= initial.n() {
            initial.active_at(site) as i64 + initial.is_asleep(site) as i64
        } else {
            0
        };
        let (_, right_prev) = usage(v - 1);
        let (left_next, _) = usage(v + 1);
        let (left_here, right_here) = usage(v);
        let h = sigma + right_prev + left_next - left_here - right_here;
        report.h.push((site, h));

        let u = odometer.get(v);
        let ends_asleep = if u == 0 {
            site <= initial.n() && initial.is_asleep(site)
        } else {
            tape.instruction_at(v, u as i64) == Instruction::Sleep
        };
        if !(0..=1).contains(&h) {
            report.violations.push(Violation { site, h, kind: ViolationKind::Balance });
        } else if (h == 1) != ends_asleep {
            report.violations.push(Violation { site, h, kind: ViolationKind::EndInSleep });
        }
    }
    report
}

/// `u_true(v) <= u_candidate(v)` for every `v` in `sites`. When the
/// candidate is stable this must hold; a `false` points at a bug.
pub fn least_action_compare(
    u_true: &Odometer,
    u_candidate: &Odometer,
    sites: impl IntoIterator<Item = usize>,
) -> bool {
    sites.into_iter().all(|v| u_true.get(v as i64) <= u_candidate.get(v as i64))
}
