//! Execution hooks: how per-cell work is mapped and how time is measured.
//!
//! The core never spawns threads or reads a clock itself. Callers with `std`
//! plug in a parallel [`CellMap`] and a wall [`Clock`]; results are always
//! collected in index order, so the reduction that follows is identical no
//! matter which map produced them.

use alloc::vec::Vec;

pub trait CellMap: Sync {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Plain sequential map.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl CellMap for Serial {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

pub trait Clock {
    /// Milliseconds since an arbitrary, fixed origin.
    fn now_ms(&mut self) -> f64;
}

/// A clock that never advances; timings come out as zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_ms(&mut self) -> f64 {
        0.0
    }
}
