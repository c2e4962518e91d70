//! Noisy preparation and measurement of entangled n-qubit states.
//!
//! A [`DeviceNoiseParams`] fixes one transmitter's imperfections (per-qubit
//! readout confusion plus per-gate depolarizing rates); [`sample_shots`] runs
//! seeded Monte-Carlo trajectories of a [`Circuit`] on that device. The
//! deviation of the sampled histogram from the ideal two-outcome distribution
//! is the device's noise signature.

mod circuit;
mod counts;
mod noise;
mod sampler;
mod state;

pub use circuit::{apply_circuit, build_ghz_circuit, Circuit, Gate};
pub use counts::Counts;
pub use noise::{
    DeviceNoiseParams, DeviceParamRanges, ReadoutConfusion, MAX_GATE_ERROR, MAX_READOUT_EPS,
};
pub use sampler::{readout_oracle_distribution, sample_shots};
pub use state::{Pauli, StateVector, MAX_QUBITS, NORM_TOLERANCE};
