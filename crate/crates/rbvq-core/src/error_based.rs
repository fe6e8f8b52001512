//! Error/utility RB trigger, an alternative to the win-count metric.
//!
//! Each unit accumulates the squared quantization error it absorbs as
//! winner (`E`) and a utility term (`U`): how much the error would grow if
//! the unit vanished and the runner-up had to serve the input. A unit whose
//! utility is tiny relative to the largest accumulated error is removed and
//! reborn through the host method's usual rb_update. Both terms decay each
//! step, like the win counters. Unlike the win-count ratio, the absolute E
//! and U values scale with the square of the data range; only their ratio
//! is range-free.

use alloc::vec;
use alloc::vec::Vec;

use crate::codebook::{squared_distance, Codebook, RbTrigger};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorUtilityState {
    e: Vec<f64>,
    u: Vec<f64>,
    beta: f64,
}

impl ErrorUtilityState {
    pub fn new(n: usize, beta: f64) -> Self {
        Self {
            e: vec![0.0; n],
            u: vec![0.0; n],
            beta,
        }
    }

    pub fn error(&self, n: usize) -> f64 {
        self.e[n]
    }

    pub fn utility(&self, n: usize) -> f64 {
        self.u[n]
    }

    /// Finds winner s1 and runner-up s2 with the codebook's pre-update
    /// reference vectors, accumulates E_{s1} and U_{s1}, then decays both
    /// terms for all units. Returns (s1, s2).
    pub fn accumulate(&mut self, x: &[f64], cb: &Codebook) -> Result<(usize, usize)> {
        let (s1, s2) = cb.two_nearest(x)?;
        let d1 = squared_distance(x, &cb.unit(s1).w);
        let d2 = squared_distance(x, &cb.unit(s2).w);
        self.e[s1] += d1;
        self.u[s1] += d2 - d1; // never negative: s2 is no closer than s1
        let keep = 1.0 - self.beta;
        for v in &mut self.e {
            *v *= keep;
        }
        for v in &mut self.u {
            *v *= keep;
        }
        Ok((s1, s2))
    }

    /// Trigger check: remove the argmin-U unit, rebirth near the argmax-E
    /// unit over `eligible_max`. Ties to the lowest id; fires only when
    /// E_max > 0, the two units differ, and U_min / E_max < th_rb.
    pub fn trigger<I>(&self, th_rb: f64, eligible_max: I) -> Option<RbTrigger>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut q: Option<usize> = None;
        for n in eligible_max {
            match q {
                None => q = Some(n),
                Some(m) => {
                    if self.e[n] > self.e[m] || (self.e[n] == self.e[m] && n < m) {
                        q = Some(n);
                    }
                }
            }
        }
        let q = q?;
        let mut n_min = 0;
        for n in 1..self.u.len() {
            if self.u[n] < self.u[n_min] {
                n_min = n;
            }
        }
        if self.e[q] > 0.0 && n_min != q && self.u[n_min] / self.e[q] < th_rb {
            Some(RbTrigger { n_min, n_max: q })
        } else {
            None
        }
    }

    /// Overwrites `target`'s E and U with the means over `sources`, the same
    /// blend the host method applies to w and c at rebirth.
    pub fn blend_into(&mut self, target: usize, sources: &[usize]) {
        debug_assert!(!sources.is_empty());
        let k = sources.len() as f64;
        self.e[target] = sources.iter().map(|&s| self.e[s]).sum::<f64>() / k;
        self.u[target] = sources.iter().map(|&s| self.u[s]).sum::<f64>() / k;
    }
}
