//! Files, wall-clock time and threads around `corridor-core`: scenario
//! documents, output artifacts, batch runs and scenario generation.

pub mod batch;
pub mod fixtures;
pub mod io;
pub mod output;

use corridor_core::Clock;
use std::time::Instant;

/// Seconds elapsed since construction.
#[derive(Clone, Copy, Debug)]
pub struct WallClock(Instant);

impl WallClock {
    pub fn new() -> Self {
        Self(Instant::now())
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
