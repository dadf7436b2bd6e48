//! Seed handling and the fixed splitting function every run uses.
//!
//! A run is driven by one master seed. Every internal stream (instruction
//! tapes, particle placement, policy randomness, replica seeds) is derived
//! from it with [`derive`], so a single number reproduces a whole experiment.

use std::fmt;
use std::str::FromStr;

use crate::error::ArwError;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. Full avalanche on 64 bits.
#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Named sub-streams of a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Tape = 1,
    Placement = 2,
    Policy = 3,
    Replica = 4,
    Trial = 5,
    Cell = 6,
}

/// The splitting function: `derive(seed, stream, index)`.
///
/// Distinct `(stream, index)` pairs give statistically unrelated seeds.
pub fn derive(seed: u64, stream: Stream, index: u64) -> u64 {
    let a = mix64(seed ^ GOLDEN);
    let b = mix64(a ^ (stream as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    mix64(b.wrapping_add(index.wrapping_mul(GOLDEN)))
}

/// Uniform integer in `0..n` for the `index`-th draw of a counter stream.
#[inline]
pub fn uniform_below(seed: u64, index: u64, n: u64) -> u64 {
    let x = mix64(mix64(seed ^ GOLDEN).wrapping_add(index.wrapping_mul(GOLDEN)));
    ((x as u128 * n as u128) >> 64) as u64
}

/// A seed as given by the user. Keeps the original spelling so output
/// headers can record it verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    value: u64,
    text: String,
}

impl Seed {
    pub fn new(value: u64) -> Self {
        Self { value, text: value.to_string() }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl FromStr for Seed {
    type Err = ArwError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let parsed = if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
            u64::from_str_radix(hex, 16)
        } else {
            t.parse::<u64>()
        };
        parsed
            .map(|value| Seed { value, text: t.to_string() })
            .map_err(|_| ArwError::InvalidSeed(s.to_string()))
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}
