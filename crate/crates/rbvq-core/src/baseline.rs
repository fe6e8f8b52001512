//! Static-parameter comparison methods.
//!
//! The SOM and NG baselines are [`crate::somrb::Somrb`] and
//! [`crate::ngrb::Ngrb`] built with [`crate::RbPolicy::Disabled`]; their update
//! rules are unchanged, only the remove-birth machinery is inert. Online
//! k-means gets its own type because its step is strictly smaller: move the
//! winner, touch nothing else, keep no counters.

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::quantizer::{Quantizer, StepReport};
use crate::rng::RandomSource;

#[derive(Debug, Clone)]
pub struct OkMeans {
    cb: Codebook,
    epsilon: f64,
}

impl OkMeans {
    pub fn new(n: usize, dim: usize, epsilon: f64, rng: &mut RandomSource) -> Result<Self> {
        let cb = Codebook::random(n, dim, rng)?;
        Self::from_codebook(cb, epsilon)
    }

    pub fn from_codebook(cb: Codebook, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParam("epsilon must be in (0, 1]"));
        }
        Ok(Self { cb, epsilon })
    }
}

impl Quantizer for OkMeans {
    fn codebook(&self) -> &Codebook {
        &self.cb
    }

    fn step(&mut self, x: &[f64]) -> Result<StepReport> {
        let winner = self.cb.find_winner(x)?;
        self.cb.move_toward(winner, x, self.epsilon);
        Ok(StepReport {
            winner,
            rb_fired: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Unit;
    use alloc::vec;

    #[test]
    fn only_the_winner_moves() {
        let cb = Codebook::from_units(vec![
            Unit {
                w: vec![0.0, 0.0],
                c: 0.0,
            },
            Unit {
                w: vec![9.0, 9.0],
                c: 0.0,
            },
        ])
        .unwrap();
        let mut q = OkMeans::from_codebook(cb, 0.5).unwrap();
        let r = q.step(&[2.0, 0.0]).unwrap();
        assert_eq!(r.winner, 0);
        assert_eq!(q.codebook().unit(0).w, vec![1.0, 0.0]);
        assert_eq!(q.codebook().unit(1).w, vec![9.0, 9.0]);
        assert_eq!(q.codebook().unit(0).c, 0.0); // no counters in the baseline
    }
}
