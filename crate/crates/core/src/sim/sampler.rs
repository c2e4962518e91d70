//! Monte-Carlo shot sampling of noisy state preparation and measurement.
//!
//! Each shot runs one stochastic-Pauli trajectory over the pure state: after
//! every gate, with probability `p1` (single-qubit) or `p2` (two-qubit) a
//! uniformly random non-identity Pauli hits the gate's qubit(s). The final
//! state is measured in the computational basis and each classical bit is then
//! flipped through the qubit's readout confusion channel.
//!
//! Shot t draws from its own stream keyed by `(seed, t)`, so histograms are a
//! pure function of `(device, circuit, shots, seed)` regardless of evaluation
//! order.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dist::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::rng;
use crate::sim::circuit::{Circuit, Gate};
use crate::sim::counts::Counts;
use crate::sim::noise::{DeviceNoiseParams, ReadoutConfusion};
use crate::sim::state::{check_qubit_count, Pauli, StateVector};

/// Sample `shots` measurement outcomes of `circuit` on `device`.
pub fn sample_shots(
    device: &DeviceNoiseParams,
    circuit: &Circuit,
    shots: u64,
    seed: u64,
) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::invalid("shots must be ≥ 1"));
    }
    if device.qubit_count() != circuit.qubit_count() {
        return Err(Error::DimensionMismatch {
            expected: circuit.qubit_count(),
            got: device.qubit_count(),
        });
    }
    let n = circuit.qubit_count();

    // Noise-free prefix states: prefixes[g] is the state after the first g
    // gates. A trajectory only pays for amplitude updates once a Pauli fires;
    // until then it rides the shared prefix.
    let mut prefixes = Vec::with_capacity(circuit.gates().len() + 1);
    let mut state = StateVector::zero(n)?;
    prefixes.push(state.clone());
    for gate in circuit.gates() {
        state.apply_gate(*gate);
        prefixes.push(state.clone());
    }

    let mut histogram = vec![0u64; 1 << n];
    for shot in 0..shots {
        let mut rng = rng::stream(seed, shot);
        let outcome = run_trajectory(device, circuit, &prefixes, &mut rng);
        histogram[outcome] += 1;
    }
    Counts::from_histogram(n, histogram)
}

fn run_trajectory(
    device: &DeviceNoiseParams,
    circuit: &Circuit,
    prefixes: &[StateVector],
    rng: &mut ChaCha8Rng,
) -> usize {
    let mut diverged: Option<StateVector> = None;
    for (g, gate) in circuit.gates().iter().enumerate() {
        if let Some(state) = diverged.as_mut() {
            state.apply_gate(*gate);
        }
        match *gate {
            Gate::Hadamard { target } => {
                if rng.random::<f64>() < device.p1() {
                    let state = diverged.get_or_insert_with(|| prefixes[g + 1].clone());
                    state.apply_pauli(Pauli::ALL[rng.random_range(0..3)], target);
                }
            }
            Gate::ControlledNot { control, target } => {
                if rng.random::<f64>() < device.p2() {
                    let state = diverged.get_or_insert_with(|| prefixes[g + 1].clone());
                    // One of the 15 non-identity two-qubit Paulis, uniformly.
                    let which = rng.random_range(1usize..16);
                    if which / 4 != 0 {
                        state.apply_pauli(Pauli::ALL[which / 4 - 1], control);
                    }
                    if which % 4 != 0 {
                        state.apply_pauli(Pauli::ALL[which % 4 - 1], target);
                    }
                }
            }
        }
    }
    let final_state = diverged.as_ref().unwrap_or_else(|| {
        prefixes.last().expect("prefixes holds the initial state")
    });
    let ideal = sample_basis_index(final_state, rng.random::<f64>());
    apply_readout_noise(ideal, device.readout(), rng)
}

/// Walk the cumulative squared magnitudes until they exceed `u`.
fn sample_basis_index(state: &StateVector, u: f64) -> usize {
    let mut acc = 0.0;
    for (index, amp) in state.amplitudes().iter().enumerate() {
        acc += amp.norm_sqr();
        if u < acc {
            return index;
        }
    }
    // Rounding in the accumulation can leave acc fractionally below 1.
    state.amplitudes().len() - 1
}

fn apply_readout_noise(index: usize, readout: &[ReadoutConfusion], rng: &mut ChaCha8Rng) -> usize {
    let mut out = index;
    for (qubit, pair) in readout.iter().enumerate() {
        let u: f64 = rng.random();
        let flip = if (index >> qubit) & 1 == 0 {
            u < pair.eps01
        } else {
            u < pair.eps10
        };
        if flip {
            out ^= 1 << qubit;
        }
    }
    out
}

/// Exact readout-outcome distribution for an ideally prepared GHZ state.
///
/// Half the mass starts on each extreme bitstring and is pushed through the
/// independent per-qubit confusion channels:
/// P(x) = ½·∏_b Pr(read x_b | 0) + ½·∏_b Pr(read x_b | 1).
/// This is the analytic oracle the trajectory sampler is checked against in
/// the readout-only case.
pub fn readout_oracle_distribution(
    n: usize,
    readout: &[ReadoutConfusion],
) -> Result<OutcomeDistribution> {
    check_qubit_count(n)?;
    if readout.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: readout.len(),
        });
    }
    let dim = 1usize << n;
    let mut probs = vec![0.0; dim];
    for (x, slot) in probs.iter_mut().enumerate() {
        let mut from_zeros = 0.5;
        let mut from_ones = 0.5;
        for (qubit, pair) in readout.iter().enumerate() {
            if (x >> qubit) & 1 == 1 {
                from_zeros *= pair.eps01;
                from_ones *= 1.0 - pair.eps10;
            } else {
                from_zeros *= 1.0 - pair.eps01;
                from_ones *= pair.eps10;
            }
        }
        *slot = from_zeros + from_ones;
    }
    OutcomeDistribution::new(n, probs)
}
