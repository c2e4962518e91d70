//! Checks the in-place gate kernels against an independent dense-matrix
//! route: every gate is expanded to its full 2^n × 2^n unitary (Kronecker
//! embedding for Hadamard, permutation matrix for ControlledNot) and applied
//! by plain matrix-vector multiplication.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use qnf_core::rng;
use qnf_core::sim::{apply_circuit, build_ghz_circuit, Circuit, Gate, StateVector};

type Matrix = Vec<Vec<Complex64>>;

fn identity(dim: usize) -> Matrix {
    let mut m = vec![vec![Complex64::ZERO; dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::ONE;
    }
    m
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, ca) = (a.len(), a[0].len());
    let (rb, cb) = (b.len(), b[0].len());
    let mut out = vec![vec![Complex64::ZERO; ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Full-register unitary of one gate under the bit-b-is-qubit-b convention.
fn gate_matrix(gate: Gate, n: usize) -> Matrix {
    match gate {
        Gate::Hadamard { target } => {
            let h = vec![
                vec![
                    Complex64::new(FRAC_1_SQRT_2, 0.0),
                    Complex64::new(FRAC_1_SQRT_2, 0.0),
                ],
                vec![
                    Complex64::new(FRAC_1_SQRT_2, 0.0),
                    Complex64::new(-FRAC_1_SQRT_2, 0.0),
                ],
            ];
            // Qubit 0 is the least significant index bit, so it sits rightmost
            // in the Kronecker product.
            let low = identity(1 << target);
            let high = identity(1 << (n - 1 - target));
            kron(&high, &kron(&h, &low))
        }
        Gate::ControlledNot { control, target } => {
            let dim = 1usize << n;
            let mut m = vec![vec![Complex64::ZERO; dim]; dim];
            for input in 0..dim {
                let output = if input >> control & 1 == 1 {
                    input ^ (1 << target)
                } else {
                    input
                };
                m[output][input] = Complex64::ONE;
            }
            m
        }
    }
}

fn matvec(m: &Matrix, x: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn oracle_apply(circuit: &Circuit, basis_index: usize) -> Vec<Complex64> {
    let dim = 1usize << circuit.qubit_count();
    let mut state = vec![Complex64::ZERO; dim];
    state[basis_index] = Complex64::ONE;
    for gate in circuit.gates() {
        state = matvec(&gate_matrix(*gate, circuit.qubit_count()), &state);
    }
    state
}

fn assert_states_match(got: &[Complex64], want: &[Complex64]) {
    assert_eq!(got.len(), want.len());
    for (i, (g, w)) in got.iter().zip(want).enumerate() {
        assert!((g - w).norm() < 1e-10, "amplitude {i}: {g} vs {w}");
    }
}

#[test]
fn ghz5_matches_dense_oracle_and_expected_amplitudes() {
    let circuit = build_ghz_circuit(5).unwrap();
    let fast = apply_circuit(&StateVector::zero(5).unwrap(), &circuit).unwrap();
    let slow = oracle_apply(&circuit, 0);
    assert_states_match(fast.amplitudes(), &slow);

    assert!((slow[0].re - FRAC_1_SQRT_2).abs() < 1e-12);
    assert!((slow[31].re - FRAC_1_SQRT_2).abs() < 1e-12);
    let interior: f64 = slow[1..31].iter().map(|a| a.norm()).sum();
    assert!(interior < 1e-12);
}

#[test]
fn ghz_chain_matches_oracle_for_all_supported_sizes() {
    for n in 1..=6 {
        let circuit = build_ghz_circuit(n).unwrap();
        let fast = apply_circuit(&StateVector::zero(n).unwrap(), &circuit).unwrap();
        let slow = oracle_apply(&circuit, 0);
        assert_states_match(fast.amplitudes(), &slow);
    }
}

#[test]
fn random_circuits_match_oracle_from_random_basis_states() {
    use rand::Rng;
    let mut rng = rng::stream(0xC1AC, 0);
    for round in 0..40 {
        let n = rng.random_range(1..=5usize);
        let gates: Vec<Gate> = (0..rng.random_range(1..=20))
            .map(|_| {
                if n > 1 && rng.random::<f64>() < 0.5 {
                    let control = rng.random_range(0..n);
                    let target = (control + rng.random_range(1..n)) % n;
                    Gate::ControlledNot { control, target }
                } else {
                    Gate::Hadamard {
                        target: rng.random_range(0..n),
                    }
                }
            })
            .collect();
        let circuit = Circuit::new(n, gates).unwrap();
        let basis = rng.random_range(0..1usize << n);

        let mut start = vec![Complex64::ZERO; 1 << n];
        start[basis] = Complex64::ONE;
        let fast = apply_circuit(
            &StateVector::from_amplitudes(n, start).unwrap(),
            &circuit,
        )
        .unwrap();
        let slow = oracle_apply(&circuit, basis);
        assert_states_match(fast.amplitudes(), &slow);
        assert!(
            (fast.norm_sqr() - 1.0).abs() < 1e-10,
            "round {round}: norm drifted"
        );
    }
}
