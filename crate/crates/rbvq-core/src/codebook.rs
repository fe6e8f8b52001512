//! Shared quantizer state: reference vectors, decayed win counters, and the
//! remove-birth trigger.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Removal threshold and counter decay rate for RB updating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbParams {
    th_rb: f64,
    beta: f64,
}

impl RbParams {
    pub fn new(th_rb: f64, beta: f64) -> Result<Self> {
        if !(th_rb > 0.0 && th_rb <= 1.0) {
            return Err(Error::InvalidParam("th_rb must be in (0, 1]"));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParam("beta must be in (0, 1)"));
        }
        Ok(Self { th_rb, beta })
    }

    pub fn th_rb(self) -> f64 {
        self.th_rb
    }

    pub fn beta(self) -> f64 {
        self.beta
    }
}

/// One codebook entry: reference vector `w` and decayed win count `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub w: Vec<f64>,
    pub c: f64,
}

/// A fixed-size set of units. RB updating reuses the removed unit's slot for
/// the reborn one, so a unit's id is its index and the count never changes.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    dim: usize,
    units: Vec<Unit>,
}

/// RB decision: remove `n_min` and rebirth it near `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RbTrigger {
    pub n_min: usize,
    pub n_max: usize,
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

impl Codebook {
    /// Codebook with every coordinate drawn uniformly from [0, 1) and all
    /// win counts zero.
    pub fn random(n: usize, dim: usize, rng: &mut RandomSource) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParam("codebook needs at least 2 units"));
        }
        if dim == 0 {
            return Err(Error::InvalidParam("dimension must be positive"));
        }
        let units = (0..n)
            .map(|_| Unit {
                w: (0..dim).map(|_| rng.unit_f64()).collect(),
                c: 0.0,
            })
            .collect();
        Ok(Self { dim, units })
    }

    pub fn from_units(units: Vec<Unit>) -> Result<Self> {
        let Some(first) = units.first() else {
            return Err(Error::InvalidParam("codebook must not be empty"));
        };
        let dim = first.w.len();
        if dim == 0 {
            return Err(Error::InvalidParam("dimension must be positive"));
        }
        for (index, u) in units.iter().enumerate() {
            if u.w.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: u.w.len(),
                });
            }
            if !u.w.iter().all(|v| v.is_finite()) || !u.c.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if u.c < 0.0 {
                return Err(Error::InvalidParam("win counts must be non-negative"));
            }
        }
        Ok(Self { dim, units })
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn unit(&self, n: usize) -> &Unit {
        &self.units[n]
    }

    pub fn unit_mut(&mut self, n: usize) -> &mut Unit {
        &mut self.units[n]
    }

    pub fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Index of the unit nearest to `x` (Euclidean); ties go to the lowest id.
    pub fn find_winner(&self, x: &[f64]) -> Result<usize> {
        self.check_dim(x)?;
        let mut best = 0;
        let mut best_d = squared_distance(x, &self.units[0].w);
        for (n, u) in self.units.iter().enumerate().skip(1) {
            let d = squared_distance(x, &u.w);
            if d < best_d {
                best = n;
                best_d = d;
            }
        }
        Ok(best)
    }

    /// Winner and runner-up, with the same (distance, id) ordering that
    /// `find_winner` and rank-based updates use.
    pub fn two_nearest(&self, x: &[f64]) -> Result<(usize, usize)> {
        self.check_dim(x)?;
        if self.units.len() < 2 {
            return Err(Error::InvalidParam("two_nearest needs at least 2 units"));
        }
        let mut best = (squared_distance(x, &self.units[0].w), 0usize);
        let mut second = (squared_distance(x, &self.units[1].w), 1usize);
        if second < best {
            core::mem::swap(&mut best, &mut second);
        }
        for (n, u) in self.units.iter().enumerate().skip(2) {
            let cand = (squared_distance(x, &u.w), n);
            if cand < best {
                second = best;
                best = cand;
            } else if cand < second {
                second = cand;
            }
        }
        Ok((best.1, second.1))
    }

    /// Moves `w_n` a fraction `factor` of the way toward `x`.
    pub fn move_toward(&mut self, n: usize, x: &[f64], factor: f64) {
        let u = &mut self.units[n];
        for (wd, xd) in u.w.iter_mut().zip(x) {
            *wd += factor * (*xd - *wd);
        }
    }

    pub fn add_win(&mut self, n: usize) {
        self.units[n].c += 1.0;
    }

    /// Multiplies every win count by (1 - beta).
    pub fn decay_counts(&mut self, beta: f64) {
        let keep = 1.0 - beta;
        for u in &mut self.units {
            u.c *= keep;
        }
    }

    /// Win metric per unit: c_n / max_m c_m. `None` while all counters are
    /// zero (the ratio is undefined and callers must skip RB).
    pub fn win_metric(&self) -> Option<Vec<f64>> {
        let max = self.units.iter().fold(0.0f64, |m, u| m.max(u.c));
        if max <= 0.0 {
            return None;
        }
        Some(self.units.iter().map(|u| u.c / max).collect())
    }

    /// RB trigger check. `n_max` is the argmax of c over `eligible_max`,
    /// `n_min` the argmin of c over all units, ties to the lowest id. Fires
    /// only when c_max > 0, the two units differ, and c_min/c_max < th_rb.
    pub fn rb_trigger<I>(&self, th_rb: f64, eligible_max: I) -> Option<RbTrigger>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut n_max: Option<usize> = None;
        for n in eligible_max {
            match n_max {
                None => n_max = Some(n),
                Some(m) => {
                    let (cn, cm) = (self.units[n].c, self.units[m].c);
                    if cn > cm || (cn == cm && n < m) {
                        n_max = Some(n);
                    }
                }
            }
        }
        let n_max = n_max?;
        let mut n_min = 0;
        for n in 1..self.units.len() {
            if self.units[n].c < self.units[n_min].c {
                n_min = n;
            }
        }
        let c_max = self.units[n_max].c;
        let c_min = self.units[n_min].c;
        if c_max > 0.0 && n_min != n_max && c_min / c_max < th_rb {
            Some(RbTrigger { n_min, n_max })
        } else {
            None
        }
    }

    /// Unit nearest to `target` in reference space, skipping `exclude`; ties
    /// to the lowest id. `None` when no candidate remains.
    pub fn nearest_excluding(&self, target: usize, exclude: &[usize]) -> Option<usize> {
        let tw = &self.units[target].w;
        let mut best: Option<(f64, usize)> = None;
        for (n, u) in self.units.iter().enumerate() {
            if exclude.contains(&n) {
                continue;
            }
            let d = squared_distance(&u.w, tw);
            if best.is_none_or(|b| (d, n) < b) {
                best = Some((d, n));
            }
        }
        best.map(|(_, n)| n)
    }

    /// Overwrites `target`'s reference vector and win count with the means
    /// over `sources`.
    pub fn blend_into(&mut self, target: usize, sources: &[usize]) {
        debug_assert!(!sources.is_empty());
        let mut w = vec![0.0; self.dim];
        let mut c = 0.0;
        for &s in sources {
            for (acc, v) in w.iter_mut().zip(&self.units[s].w) {
                *acc += v;
            }
            c += self.units[s].c;
        }
        let k = sources.len() as f64;
        for v in &mut w {
            *v /= k;
        }
        self.units[target].w = w;
        self.units[target].c = c / k;
    }
}
