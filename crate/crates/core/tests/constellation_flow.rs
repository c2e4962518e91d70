//! End-to-end constellation behavior on seeded configurations.

use qnf_core::constellation::{
    authenticate_peer, run_training_phase, ConstellationConfig,
};
use qnf_core::fingerprint::NodeId;
use qnf_core::rng;
use qnf_core::sim::{DeviceNoiseParams, DeviceParamRanges};

fn probe_config(k: u64) -> ConstellationConfig {
    ConstellationConfig {
        n: 5,
        k,
        k_prime: 10 * k.max(1_000),
        ..ConstellationConfig::new(3, 0xFEED)
    }
}

fn genuine_accept_rate(config: &ConstellationConfig, trials: u32) -> f64 {
    let nodes = run_training_phase(config).unwrap();
    let mut accepts = 0u64;
    let mut total = 0u64;
    for verifier in &nodes {
        for claimant in &nodes {
            if verifier.node_id() == claimant.node_id() {
                continue;
            }
            for trial in 0..trials {
                let seed = rng::derive_seed(
                    config.master_seed,
                    &[
                        77,
                        verifier.node_id().0 as u64,
                        claimant.node_id().0 as u64,
                        trial as u64,
                    ],
                );
                let decision = authenticate_peer(verifier, claimant, config.k, seed).unwrap();
                accepts += u64::from(decision.accepts(claimant.node_id()));
                total += 1;
            }
        }
    }
    accepts as f64 / total as f64
}

#[test]
fn genuine_accept_rate_does_not_degrade_with_more_shots() {
    let trials = 20;
    let rates: Vec<f64> = [100u64, 1_000, 10_000]
        .iter()
        .map(|&k| genuine_accept_rate(&probe_config(k), trials))
        .collect();
    assert!(
        rates[0] <= rates[1] + 1e-12 && rates[1] <= rates[2] + 1e-12,
        "accept rate degraded as k grew: {rates:?}"
    );
}

#[test]
fn foreign_device_claimant_is_rejected() {
    let config = probe_config(1_000);
    let nodes = run_training_phase(&config).unwrap();

    // A device realized far outside the enrolled fleet's parameter ranges.
    let foreign_ranges = DeviceParamRanges {
        eps01: (0.20, 0.30),
        eps10: (0.20, 0.30),
        p1: (0.01, 0.02),
        p2: (0.02, 0.05),
    };
    let foreign = DeviceNoiseParams::sample(config.n, &foreign_ranges, 0xD15C).unwrap();
    let outsider = qnf_core::constellation::AdversaryConfig {
        device: foreign,
        claimed_id: NodeId(2),
        verifier_id: NodeId(1),
    };
    for trial in 0..20u64 {
        let decision = qnf_core::constellation::run_mitm_attack(
            &nodes[0],
            &outsider,
            config.k,
            rng::derive_seed(config.master_seed, &[88, trial]),
        )
        .unwrap();
        // Accepting an identity that is not enrolled is impossible by
        // construction; this outsider should not pass as anyone.
        assert!(decision.decided() != Some(NodeId(99)));
        assert!(
            decision.decided().is_none(),
            "trial {trial}: outsider accepted as {:?}",
            decision.decided()
        );
    }

    // A claim on an id the verifier never trained on can never authenticate.
    let ghost = qnf_core::constellation::AdversaryConfig {
        device: nodes[1].device().clone(),
        claimed_id: NodeId(99),
        verifier_id: NodeId(1),
    };
    let decision =
        qnf_core::constellation::run_mitm_attack(&nodes[0], &ghost, config.k, 5).unwrap();
    assert!(!decision.accepts(NodeId(99)));
}
