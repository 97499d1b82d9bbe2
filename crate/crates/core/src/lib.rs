//! Higher Criticism statistics for large-scale inference.
//!
//! The crate is `no_std` with `alloc`. Enabling `parallel` spreads Monte
//! Carlo replicates over the rayon thread pool without changing any result.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod exec;

pub mod arw;
pub mod calibrate;
pub mod covtest;
pub mod hc;
pub mod hct;
pub mod numerics;
pub mod pairhc;
pub mod phase;
pub mod rng;

pub use error::{Error, Result};
pub use hc::{HcResult, HcVariant, PValueSeries};
pub use numerics::Probability;
pub use rng::RngSeed;
