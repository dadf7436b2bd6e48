use crate::engine::{Configuration, StabilizationResult, Stabilizer};
use crate::error::{ArwError, Result};
use crate::seed::{derive, Stream};
use crate::tape::InstructionTape;

#[derive(Debug, Clone, PartialEq)]
pub struct PointSourceResult {
    pub run: StabilizationResult,
    /// Half width `W` of the window `-W..=W`.
    pub window: usize,
    /// Leftmost and rightmost sleeper, in coordinates centred on the origin.
    pub segment: Option<(i64, i64)>,
    /// Sleepers per site of the occupied segment.
    pub density: f64,
}

impl PointSourceResult {
    pub fn segment_len(&self) -> usize {
        self.segment.map_or(0, |(a, b)| (b - a + 1) as usize)
    }
}

pub fn default_window(m: u64) -> usize {
    4 * m as usize
}

/// Stabilizes `m` particles started at the origin of `-window..=window`.
/// A particle leaving the window is an error, so on success the result is
/// the stabilization on all of `Z`.
pub fn point_source_run(m: u64, lambda: f64, window: usize, seed: u64) -> Result<PointSourceResult> {
    let n = 2 * window + 1;
    let mut cfg = Configuration::empty(n);
    cfg.active[window] = m as u32;
    let tape = InstructionTape::new(derive(seed, Stream::Tape, 0), lambda)?;
    let run = Stabilizer::new(&tape).site_offset(-(window as i64) - 1).stabilize(cfg)?;
    if run.ejected_left + run.ejected_right > 0 {
        return Err(ArwError::WindowTooSmall { window });
    }
    let asleep = run.final_config.asleep();
    let first = asleep.iter().position(|&s| s);
    let last = asleep.iter().rposition(|&s| s);
    let segment = first.zip(last).map(|(a, b)| (a as i64 - window as i64, b as i64 - window as i64));
    let density = match segment {
        Some((a, b)) => run.sleeping_count as f64 / (b - a + 1) as f64,
        None => 0.0,
    };
    Ok(PointSourceResult { run, window, segment, density })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_particle_single_site() {
        for seed in 0..50 {
            match point_source_run(1, 0.8, 30, seed) {
                Ok(r) => {
                    assert_eq!(r.run.sleeping_count, 1);
                    assert_eq!(r.segment_len(), 1);
                    assert_eq!(r.density, 1.0);
                }
                Err(ArwError::WindowTooSmall { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn conservation_without_sinks() {
        let r = point_source_run(60, 0.8, 240, 4).unwrap();
        assert_eq!(r.run.sleeping_count, 60);
        let (a, b) = r.segment.unwrap();
        assert!(a <= 0 && b >= 0);
        assert!(r.density > 0.0 && r.density <= 1.0);
    }

    #[test]
    fn tiny_window_errors() {
        let err = point_source_run(40, 0.8, 2, 1).unwrap_err();
        assert!(matches!(err, ArwError::WindowTooSmall { window: 2 }));
    }
}
