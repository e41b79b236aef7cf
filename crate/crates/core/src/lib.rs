//! Spectrum shaping via network coding in cognitive radio networks.
//!
//! Primary users (PUs) multicast over lossy slotted channels using either
//! batch random linear network coding or per-packet ARQ. A secondary user
//! (SU) senses those channels mini-slot by mini-slot looking for idle slots,
//! either at random or with a backoff-driven sensing list.
//!
//! The crate is `no_std` (with `alloc`) and split into:
//!
//! - [`config`]: scenario parameters and validation,
//! - [`sampling`]: the arrival and erasure primitives shared by everything stochastic,
//! - [`analysis`]: closed forms, the timer Markov chain and its fixed point,
//! - [`sim`]: the slotted Monte-Carlo simulator used as ground truth,
//! - [`rlnc`]: a GF(2^w) random linear network codec.
//!
//! All randomness is injected: every stochastic function takes an explicit
//! [`rand::Rng`], and [`sampling::stream`] derives reproducible ChaCha streams
//! from a 64-bit seed.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod config;
pub mod error;
mod math;
pub mod rlnc;
pub mod sampling;
pub mod sim;

pub use config::{validate_config, NetworkConfig, PuMode, SuStrategy};
pub use error::{AnalysisError, ConfigError, RlncError, SimError};
