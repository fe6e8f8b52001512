//! Online k-means with remove-birth updating.
//!
//! Per step: the winner moves a fixed fraction epsilon toward the input and
//! its win count is incremented; if the count ratio trips the RB trigger,
//! the least-winning unit is reborn at the midpoint of the most-winning
//! unit and its nearest other unit; finally all counts decay. The learning
//! rate stays static because a stream has no known end to anneal toward.

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::error_based::ErrorUtilityState;
use crate::quantizer::{Quantizer, RbPolicy, StepReport};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OkrbParams {
    epsilon: f64,
}

impl OkrbParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParam("epsilon must be in (0, 1]"));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(self) -> f64 {
        self.epsilon
    }
}

#[derive(Debug, Clone)]
pub struct Okrb {
    cb: Codebook,
    params: OkrbParams,
    policy: RbPolicy,
    eb: Option<ErrorUtilityState>,
}

impl Okrb {
    pub fn new(
        n: usize,
        dim: usize,
        params: OkrbParams,
        policy: RbPolicy,
        rng: &mut RandomSource,
    ) -> Result<Self> {
        let cb = Codebook::random(n, dim, rng)?;
        Self::from_codebook(cb, params, policy)
    }

    pub fn from_codebook(cb: Codebook, params: OkrbParams, policy: RbPolicy) -> Result<Self> {
        let eb = policy
            .uses_error_metric()
            .then(|| ErrorUtilityState::new(cb.len(), policy.beta().unwrap_or(0.0)));
        Ok(Self {
            cb,
            params,
            policy,
            eb,
        })
    }

    pub fn params(&self) -> OkrbParams {
        self.params
    }
}

impl Quantizer for Okrb {
    fn codebook(&self) -> &Codebook {
        &self.cb
    }

    fn step(&mut self, x: &[f64]) -> Result<StepReport> {
        let winner = match &mut self.eb {
            Some(eb) => eb.accumulate(x, &self.cb)?.0,
            None => self.cb.find_winner(x)?,
        };
        self.cb.move_toward(winner, x, self.params.epsilon);
        self.cb.add_win(winner);

        let trig = match &self.policy {
            RbPolicy::Disabled => None,
            RbPolicy::WinCount(p) => self.cb.rb_trigger(p.th_rb(), 0..self.cb.len()),
            RbPolicy::ErrorUtility(p) => self
                .eb
                .as_ref()
                .and_then(|eb| eb.trigger(p.th_rb(), 0..self.cb.len())),
        };
        let mut rb_fired = false;
        if let Some(t) = trig {
            if let Some(blend) = rb_update(&mut self.cb, t.n_min, t.n_max) {
                if let Some(eb) = &mut self.eb {
                    eb.blend_into(t.n_min, &blend);
                }
                rb_fired = true;
            }
        }
        if let Some(beta) = self.policy.beta() {
            self.cb.decay_counts(beta);
        }
        Ok(StepReport { winner, rb_fired })
    }
}

/// Rebirths `n_min` at the midpoint of `n_max` and the unit f nearest to
/// `n_max` (excluding both extremes), averaging the win counts the same way.
/// Returns the blend pair, or `None` when fewer than three units leave no f
/// to pick and the update is skipped.
pub fn rb_update(cb: &mut Codebook, n_min: usize, n_max: usize) -> Option<[usize; 2]> {
    debug_assert_ne!(n_min, n_max);
    let Some(f) = cb.nearest_excluding(n_max, &[n_max, n_min]) else {
        log::warn!("okrb: rb update skipped, needs at least 3 units");
        return None;
    };
    cb.blend_into(n_min, &[n_max, f]);
    Some([n_max, f])
}
