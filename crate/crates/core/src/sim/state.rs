use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::sim::circuit::Gate;

/// Highest supported qubit count. The 2^n amplitude vector stays desk-scale.
pub const MAX_QUBITS: usize = 12;

/// Tolerance on |ψ|² for a state to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;

pub(crate) fn check_qubit_count(n: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(Error::invalid(format!(
            "qubit count must be in 1..={MAX_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

/// Single-qubit Pauli operator (identity excluded; it is never applied).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
}

/// Pure n-qubit state as 2^n complex amplitudes.
///
/// Bit b of a basis-state index (bit 0 = least significant) carries qubit b,
/// so index 1 is the state with qubit 0 set and all others clear.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state |0…0⟩.
    pub fn zero(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[0] = Complex64::ONE;
        Ok(Self { n, amps })
    }

    /// Build from raw amplitudes, checking length and normalization.
    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: amps.len(),
            });
        }
        let state = Self { n, amps };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!(
                "state is not normalized: |ψ|² = {norm}"
            )));
        }
        Ok(state)
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Sum of squared amplitude magnitudes.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Measurement probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub(crate) fn apply_gate(&mut self, gate: Gate) {
        match gate {
            Gate::Hadamard { target } => self.apply_hadamard(target),
            Gate::ControlledNot { control, target } => self.apply_cnot(control, target),
        }
    }

    pub(crate) fn apply_hadamard(&mut self, target: usize) {
        let mask = 1usize << target;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let a = self.amps[i];
                let b = self.amps[i | mask];
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[i | mask] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    pub(crate) fn apply_cnot(&mut self, control: usize, target: usize) {
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    pub(crate) fn apply_pauli(&mut self, pauli: Pauli, qubit: usize) {
        let mask = 1usize << qubit;
        match pauli {
            Pauli::X => {
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        self.amps.swap(i, i | mask);
                    }
                }
            }
            Pauli::Y => {
                // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                let phase = Complex64::new(0.0, 1.0);
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let a = self.amps[i];
                        let b = self.amps[i | mask];
                        self.amps[i] = -phase * b;
                        self.amps[i | mask] = phase * a;
                    }
                }
            }
            Pauli::Z => {
                for i in 0..self.amps.len() {
                    if i & mask != 0 {
                        self.amps[i] = -self.amps[i];
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_has_unit_amp_at_origin() {
        let s = StateVector::zero(3).unwrap();
        assert_eq!(s.amplitudes().len(), 8);
        assert_eq!(s.amplitudes()[0], Complex64::ONE);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_count_bounds_enforced() {
        assert!(StateVector::zero(0).is_err());
        assert!(StateVector::zero(13).is_err());
        assert!(StateVector::zero(12).is_ok());
    }

    #[test]
    fn from_amplitudes_rejects_bad_inputs() {
        let half = Complex64::new(FRAC_1_SQRT_2, 0.0);
        assert!(StateVector::from_amplitudes(1, vec![half, half]).is_ok());
        assert!(StateVector::from_amplitudes(1, vec![half]).is_err());
        assert!(StateVector::from_amplitudes(1, vec![half, half * 2.0]).is_err());
    }

    #[test]
    fn hadamard_on_zero_gives_equal_superposition() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_hadamard(0);
        let amps = s.amplitudes();
        assert!((amps[0].re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((amps[1].re - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn pauli_x_flips_basis_state() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply_pauli(Pauli::X, 1);
        assert_eq!(s.amplitudes()[2], Complex64::ONE);
    }

    #[test]
    fn pauli_y_applies_phase_and_flip() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_pauli(Pauli::Y, 0);
        assert_eq!(s.amplitudes()[1], Complex64::new(0.0, 1.0));
        // Y² = I up to the representation used here.
        s.apply_pauli(Pauli::Y, 0);
        assert_eq!(s.amplitudes()[0], Complex64::ONE);
    }

    #[test]
    fn paulis_preserve_norm() {
        let mut s = StateVector::zero(3).unwrap();
        s.apply_hadamard(0);
        s.apply_hadamard(2);
        for p in Pauli::ALL {
            s.apply_pauli(p, 1);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
