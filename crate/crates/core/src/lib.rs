//! Quantum-noise fingerprint authentication, simulated end to end.
//!
//! Every physical device preparing entangled n-qubit states leaks a signature:
//! the distribution of measurement outcomes that violate the ideal two-state
//! support. This crate simulates such devices ([`sim`]), turns their outcome
//! histograms into normalized distributions and divergences ([`dist`]), learns
//! per-device reference profiles with an open-set classifier ([`fingerprint`]),
//! and orchestrates constellations of nodes that authenticate each other with
//! those profiles ([`constellation`]). [`artifact`] pins the byte-stable file
//! formats the CLI emits.
//!
//! All randomness flows from explicit seeds through [`rng`]; equal inputs give
//! bit-identical outputs.

pub mod artifact;
pub mod constellation;
pub mod dist;
pub mod error;
pub mod fingerprint;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
