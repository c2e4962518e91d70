use crate::error::{Error, Result};
use crate::sim::state::{check_qubit_count, StateVector};

/// One gate of an entangled-state preparation circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Hadamard { target: usize },
    ControlledNot { control: usize, target: usize },
}

impl Gate {
    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            Gate::Hadamard { .. } => 1,
            Gate::ControlledNot { .. } => 2,
        }
    }
}

/// An ordered gate list over a fixed number of qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Build a circuit, validating every gate's qubit indices.
    pub fn new(n: usize, gates: Vec<Gate>) -> Result<Self> {
        check_qubit_count(n)?;
        for (pos, gate) in gates.iter().enumerate() {
            match *gate {
                Gate::Hadamard { target } => {
                    if target >= n {
                        return Err(Error::invalid(format!(
                            "gate {pos}: Hadamard target {target} out of range for {n} qubits"
                        )));
                    }
                }
                Gate::ControlledNot { control, target } => {
                    if control >= n || target >= n {
                        return Err(Error::invalid(format!(
                            "gate {pos}: ControlledNot ({control},{target}) out of range for {n} qubits"
                        )));
                    }
                    if control == target {
                        return Err(Error::invalid(format!(
                            "gate {pos}: ControlledNot control equals target ({control})"
                        )));
                    }
                }
            }
        }
        Ok(Self { n, gates })
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
}

/// Hadamard on qubit 0 followed by a ControlledNot chain down the register.
///
/// Applied noiselessly to |0…0⟩ this yields (1/√2)(|0…0⟩ + |1…1⟩); for n = 1
/// the chain degenerates to the single Hadamard.
pub fn build_ghz_circuit(n: usize) -> Result<Circuit> {
    check_qubit_count(n)?;
    let mut gates = Vec::with_capacity(n);
    gates.push(Gate::Hadamard { target: 0 });
    for q in 0..n - 1 {
        gates.push(Gate::ControlledNot {
            control: q,
            target: q + 1,
        });
    }
    Circuit::new(n, gates)
}

/// Apply each gate of `circuit` in order to a copy of `state`.
pub fn apply_circuit(state: &StateVector, circuit: &Circuit) -> Result<StateVector> {
    if state.qubit_count() != circuit.qubit_count() {
        return Err(Error::DimensionMismatch {
            expected: circuit.qubit_count(),
            got: state.qubit_count(),
        });
    }
    let mut out = state.clone();
    for gate in circuit.gates() {
        out.apply_gate(*gate);
    }
    Ok(out)
}
