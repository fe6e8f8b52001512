//! Streaming vector quantization with remove-birth (RB) updating.
//!
//! Three online quantizers share one codebook model: online k-means
//! ([`okrb`]), a self-organizing map on an integer lattice ([`somrb`]), and
//! a neural gas with aging edges ([`ngrb`]). Each unit carries an
//! exponentially decayed win count; when the least-winning unit's count
//! falls below a threshold share of the most-winning unit's, the unit is
//! removed and reborn next to the winner. Because the trigger is a ratio of
//! win counts, it does not depend on the value range of the data, which is
//! what lets the methods follow concept drift in a stream.
//!
//! The same step code runs with the trigger disabled to provide the static
//! SOM and NG baselines, or with an error/utility trigger ([`error_based`])
//! in place of the win-count one. [`stream`] holds synthetic dataset
//! generators and the concept-drift stream composer, [`metrics`] the
//! evaluation quantities (MSE, dead units, degree, clustering coefficient,
//! RB frequency).
//!
//! The crate is `no_std`-compatible (`alloc` required); float math goes
//! through `libm` so results are bit-identical with and without `std`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baseline;
pub mod codebook;
pub mod error;
pub mod error_based;
mod math;
pub mod metrics;
pub mod ngrb;
pub mod okrb;
pub mod quantizer;
pub mod rng;
pub mod somrb;
pub mod stream;

pub use codebook::{squared_distance, Codebook, RbParams, RbTrigger, Unit};
pub use error::{Error, Result};
pub use quantizer::{Quantizer, RbPolicy, StepReport};
pub use rng::RandomSource;
