//! The per-step contract the experiment harness drives.

use alloc::vec::Vec;

use crate::codebook::{Codebook, RbParams};
use crate::error::Result;

/// Outcome of a single training step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepReport {
    pub winner: usize,
    pub rb_fired: bool,
}

/// Which trigger, if any, drives remove-birth updating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RbPolicy {
    /// Plain online learning: the static baselines.
    Disabled,
    /// Fire when c_min / c_max drops below th_rb.
    WinCount(RbParams),
    /// Fire when U_min / E_max drops below th_rb (see [`crate::error_based`]).
    ErrorUtility(RbParams),
}

impl RbPolicy {
    pub(crate) fn beta(&self) -> Option<f64> {
        match self {
            RbPolicy::Disabled => None,
            RbPolicy::WinCount(p) | RbPolicy::ErrorUtility(p) => Some(p.beta()),
        }
    }

    pub(crate) fn uses_error_metric(&self) -> bool {
        matches!(self, RbPolicy::ErrorUtility(_))
    }
}

/// An online quantizer fed one input vector at a time.
///
/// A quantizer instance is a single-writer object: one step at a time, no
/// interior locking. Independent instances may run on different threads.
pub trait Quantizer {
    fn codebook(&self) -> &Codebook;

    /// Process one input; reports the winner and whether an RB update fired.
    fn step(&mut self, x: &[f64]) -> Result<StepReport>;

    /// Sorted adjacency lists when the method maintains a graph.
    fn adjacency(&self) -> Option<Vec<Vec<usize>>> {
        None
    }
}
