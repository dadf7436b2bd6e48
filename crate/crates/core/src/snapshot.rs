//! Plain-text configuration snapshots.
//!
//! ```text
//! # arw-lab snapshot v1
//! # n=3
//! # lambda=0.8
//! # seed=0x2a
//! # particles=4
//! # sink_left=1
//! # sink_right=0
//! 1,A2
//! 2,E
//! 3,S
//! ```
//!
//! Site states are `A<k>` (k >= 1 active particles), `S` (one sleeper) and
//! `E` (empty). Writing a parsed snapshot reproduces the input byte for byte.

use std::fmt::Write as _;

use crate::engine::Configuration;
use crate::error::{ArwError, Result};

pub const SNAPSHOT_MAGIC: &str = "# arw-lab snapshot v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub config: Configuration,
    /// Sleep rate as written in the header.
    pub lambda: String,
    /// Seed as written in the header.
    pub seed: String,
}

impl Snapshot {
    pub fn new(config: Configuration, lambda: impl Into<String>, seed: impl Into<String>) -> Self {
        Self { config, lambda: lambda.into(), seed: seed.into() }
    }

    pub fn lambda_value(&self) -> Result<f64> {
        self.lambda
            .parse()
            .map_err(|_| ArwError::InvalidParameter(format!("bad lambda `{}`", self.lambda)))
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        out.push_str(SNAPSHOT_MAGIC);
        out.push('\n');
        let _ = writeln!(out, "# n={}", c.n());
        let _ = writeln!(out, "# lambda={}", self.lambda);
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# particles={}", c.total_particles());
        let _ = writeln!(out, "# sink_left={}", c.sink_left());
        let _ = writeln!(out, "# sink_right={}", c.sink_right());
        for site in 1..=c.n() {
            if c.is_asleep(site) {
                let _ = writeln!(out, "{site},S");
            } else if c.active_at(site) == 0 {
                let _ = writeln!(out, "{site},E");
            } else {
                let _ = writeln!(out, "{site},A{}", c.active_at(site));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, msg: &str| ArwError::Snapshot { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        match lines.next() {
            Some((_, l)) if l == SNAPSHOT_MAGIC => {}
            _ => return Err(err(1, "missing `# arw-lab snapshot v1` header")),
        }
        let mut header = |key: &str| -> Result<(usize, String)> {
            let (no, l) = lines.next().ok_or_else(|| err(0, "truncated header"))?;
            let value = l
                .strip_prefix("# ")
                .and_then(|r| r.strip_prefix(key))
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| err(no, &format!("expected `# {key}=...`")))?;
            Ok((no, value.to_string()))
        };
        let num = |(no, v): (usize, String)| -> Result<u64> {
            v.parse::<u64>().map_err(|_| err(no, &format!("not a nonnegative integer: `{v}`")))
        };

        let n = num(header("n")?)? as usize;
        let (lno, lambda) = header("lambda")?;
        if lambda.parse::<f64>().map(|l| !(l > 0.0 && l.is_finite())).unwrap_or(true) {
            return Err(err(lno, "lambda must be a positive number"));
        }
        let (_, seed) = header("seed")?;
        let (pno, particles) = header("particles")?;
        let particles = num((pno, particles))?;
        let sink_left = num(header("sink_left")?)?;
        let sink_right = num(header("sink_right")?)?;

        let mut active = vec![0u32; n];
        let mut asleep = vec![false; n];
        let mut expected = 1usize;
        let mut last_line = pno;
        for (no, l) in lines {
            last_line = no;
            let (site, state) =
                l.split_once(',').ok_or_else(|| err(no, "expected `site,state`"))?;
            let site: usize = site.parse().map_err(|_| err(no, "bad site number"))?;
            if site != expected || site > n {
                return Err(err(no, &format!("expected site {expected}")));
            }
            match state {
                "E" => {}
                "S" => asleep[site - 1] = true,
                s => {
                    let k = s
                        .strip_prefix('A')
                        .and_then(|k| k.parse::<u32>().ok())
                        .filter(|&k| k >= 1 && !s[1..].starts_with('0'))
                        .ok_or_else(|| err(no, &format!("bad state `{s}`")))?;
                    active[site - 1] = k;
                }
            }
            expected += 1;
        }
        if expected != n + 1 {
            return Err(err(last_line, &format!("expected {n} site lines, found {}", expected - 1)));
        }
        let config = Configuration::from_parts(active, asleep, sink_left, sink_right)?;
        if config.total_particles() != particles {
            return Err(err(pno, "particle total does not match the site lines"));
        }
        Ok(Snapshot { config, lambda, seed })
    }
}
