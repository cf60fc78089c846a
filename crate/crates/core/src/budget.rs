//! Work and wall-clock limits for the combinatorially explosive computations.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// A coarse resource budget: a cap on abstract work units (roughly, stored
/// sparse entries or enumerated objects) and an optional wall-clock deadline.
#[derive(Debug, Clone)]
pub struct Budget {
    pub max_work: u64,
    pub deadline: Option<Instant>,
    /// Largest chord count for which diagram enumeration is allowed.
    pub max_chords: usize,
    /// Highest degree to which bracket generation of subalgebras proceeds.
    pub max_generation_degree: usize,
}

impl Default for Budget {
    /// Sized for a laptop: about 2e8 work units, 30 minutes, k <= 6 chords.
    fn default() -> Self {
        Budget {
            max_work: 200_000_000,
            deadline: Some(Instant::now() + Duration::from_secs(30 * 60)),
            max_chords: 6,
            max_generation_degree: 4,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            max_work: u64::MAX,
            deadline: None,
            max_chords: usize::MAX,
            max_generation_degree: usize::MAX,
        }
    }

    /// Scales the default limits by `factor` (the CLI `--budget` flag).
    pub fn scaled(factor: f64) -> Self {
        let base = Budget::default();
        let factor = factor.max(0.0);
        Budget {
            max_work: (base.max_work as f64 * factor).min(u64::MAX as f64) as u64,
            deadline: Some(Instant::now() + Duration::from_secs_f64(30.0 * 60.0 * factor.max(1e-3))),
            max_chords: if factor > 1.0 { 8 } else { 6 },
            max_generation_degree: if factor > 1.0 { 6 } else { 4 },
        }
    }

    pub fn check_work(&self, work: u64, what: &str) -> Result<()> {
        if work > self.max_work {
            return Err(Error::ResourceLimit(format!(
                "{what}: {work} work units exceed the budget of {}",
                self.max_work
            )));
        }
        self.check_time(what)
    }

    pub fn check_time(&self, what: &str) -> Result<()> {
        if let Some(d) = self.deadline {
            if Instant::now() > d {
                return Err(Error::ResourceLimit(format!("{what}: deadline exceeded")));
            }
        }
        Ok(())
    }

    pub fn check_chords(&self, k: usize) -> Result<()> {
        if k > self.max_chords {
            return Err(Error::ResourceLimit(format!(
                "{k} chords exceed the configured bound of {}",
                self.max_chords
            )));
        }
        Ok(())
    }
}
