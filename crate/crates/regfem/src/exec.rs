use std::time::Instant;

use rayon::prelude::*;
use regfem_core::exec::{CellMap, Clock};

/// Per-cell work on the rayon pool; results come back in index order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl CellMap for Rayon {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).into_par_iter().map(f).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct WallClock {
    origin: Instant,
}

impl Default for WallClock {
    fn default() -> Self {
        Self { origin: Instant::now() }
    }
}

impl Clock for WallClock {
    fn now_ms(&mut self) -> f64 {
        self.origin.elapsed().as_secs_f64() * 1e3
    }
}
