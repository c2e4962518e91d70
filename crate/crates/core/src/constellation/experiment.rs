use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dist::kl_matrix;
use crate::error::{Error, Result};
use crate::fingerprint::{train_fingerprint, NodeId};
use crate::rng;
use crate::sim::{build_ghz_circuit, sample_shots, Counts};

use super::config::{AdversaryConfig, ConstellationConfig};
use super::node::{
    authenticate_peer, run_mitm_attack, run_training_phase, stream_label, SatelliteNode,
};

/// Whether a trial's claimant really was the node it claimed to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundTruth {
    Genuine,
    Impostor,
}

/// One authentication trial, as logged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub verifier: NodeId,
    /// Transmitting node; absent when the adversary transmitted.
    pub claimant: Option<NodeId>,
    /// Identity the transmitter claimed.
    pub claimed: NodeId,
    pub ground_truth: GroundTruth,
    /// Identity the classifier settled on, absent on rejection.
    pub decided: Option<NodeId>,
    /// Whether the claim was authenticated: decided == claimed.
    pub accepted: bool,
    pub best_score: f64,
    pub seed: u64,
}

/// Accept/reject tallies per claimant over the genuine trials.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConfusionRow {
    /// Trials decided for each identity.
    pub decided: BTreeMap<NodeId, u64>,
    /// Trials rejected outright.
    pub rejected: u64,
}

impl ConfusionRow {
    pub fn total(&self) -> u64 {
        self.rejected + self.decided.values().sum::<u64>()
    }
}

/// Aggregate outcome of an experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentMetrics {
    pub genuine_trials: u64,
    pub impostor_trials: u64,
    /// Fraction of genuine trials where the claimed identity was accepted.
    pub genuine_accept_rate: f64,
    /// False-accept rate: impostor trials whose claim was accepted.
    pub far: f64,
    /// False-reject rate: 1 − genuine accept rate.
    pub frr: f64,
    /// Claimed identity → how the trials were decided (genuine trials only).
    pub confusion: BTreeMap<NodeId, ConfusionRow>,
    pub decisions: Vec<DecisionRecord>,
}

impl ExperimentMetrics {
    fn from_decisions(decisions: Vec<DecisionRecord>) -> Self {
        let mut genuine_trials = 0u64;
        let mut genuine_accepts = 0u64;
        let mut impostor_trials = 0u64;
        let mut impostor_accepts = 0u64;
        let mut confusion: BTreeMap<NodeId, ConfusionRow> = BTreeMap::new();
        for record in &decisions {
            match record.ground_truth {
                GroundTruth::Genuine => {
                    genuine_trials += 1;
                    genuine_accepts += u64::from(record.accepted);
                    let row = confusion.entry(record.claimed).or_default();
                    match record.decided {
                        Some(id) => *row.decided.entry(id).or_insert(0) += 1,
                        None => row.rejected += 1,
                    }
                }
                GroundTruth::Impostor => {
                    impostor_trials += 1;
                    impostor_accepts += u64::from(record.accepted);
                }
            }
        }
        let rate = |num: u64, denom: u64| if denom == 0 { 0.0 } else { num as f64 / denom as f64 };
        Self {
            genuine_trials,
            impostor_trials,
            genuine_accept_rate: rate(genuine_accepts, genuine_trials),
            far: rate(impostor_accepts, impostor_trials),
            frr: rate(genuine_trials - genuine_accepts, genuine_trials),
            confusion,
            decisions,
        }
    }
}

/// Everything an experiment produces, ready for serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub config: ConstellationConfig,
    pub warnings: Vec<String>,
    pub nodes: Vec<SatelliteNode>,
    /// Per-device measurement histograms over k′ dedicated shots.
    pub histograms: Vec<(NodeId, Counts)>,
    /// Pairwise KL matrix (nats) over the devices' reference distributions,
    /// in node-id order; entry (i, j) = D(ref_i ‖ ref_j).
    pub kl: Vec<Vec<f64>>,
    pub metrics: ExperimentMetrics,
}

/// Resolve the adversary spec against the trained constellation.
pub fn resolve_adversary(
    config: &ConstellationConfig,
    nodes: &[SatelliteNode],
) -> Result<Option<AdversaryConfig>> {
    let Some(spec) = &config.adversary else {
        return Ok(None);
    };
    let claimed = NodeId(spec.claimed_id);
    let device = match &spec.device {
        Some(device) => device.clone(),
        None => {
            let genuine = nodes
                .iter()
                .find(|node| node.node_id() == claimed)
                .ok_or_else(|| Error::config("adversary.claimed_id", "no such node"))?;
            genuine.device().with_readout_offset(spec.epsilon_offset)?
        }
    };
    Ok(Some(AdversaryConfig {
        device,
        claimed_id: claimed,
        verifier_id: NodeId(spec.verifier_id),
    }))
}

/// Run the full experiment: training, per-device histograms and the KL
/// matrix of their references, all-pairs genuine authentications, and any
/// configured impostor trials. Deterministic in `config`.
pub fn run_experiment(config: &ConstellationConfig) -> Result<ExperimentOutput> {
    let warnings = config.validate()?;
    let nodes = run_training_phase(config)?;
    let circuit = build_ghz_circuit(config.n)?;

    let mut histograms = Vec::with_capacity(nodes.len());
    let mut references = Vec::with_capacity(nodes.len());
    for node in &nodes {
        let seed = rng::derive_seed(
            config.master_seed,
            &[stream_label::DEVICE_HISTOGRAM, node.node_id().0 as u64],
        );
        let counts = sample_shots(node.device(), &circuit, config.k_prime, seed)?;
        let fingerprint = train_fingerprint(node.node_id(), &counts, &config.classifier)?;
        references.push(fingerprint.reference().to_vec());
        histograms.push((node.node_id(), counts));
    }
    let kl = kl_matrix(&references)?;

    let mut decisions = Vec::new();
    for verifier in &nodes {
        for claimant in &nodes {
            if verifier.node_id() == claimant.node_id()
                || !verifier.profiles().contains_key(&claimant.node_id())
            {
                continue;
            }
            for trial in 0..config.trials_per_pair {
                let seed = rng::derive_seed(
                    config.master_seed,
                    &[
                        stream_label::AUTH_TRIAL,
                        verifier.node_id().0 as u64,
                        claimant.node_id().0 as u64,
                        trial as u64,
                    ],
                );
                let decision = authenticate_peer(verifier, claimant, config.k, seed)?;
                decisions.push(DecisionRecord {
                    verifier: verifier.node_id(),
                    claimant: Some(claimant.node_id()),
                    claimed: claimant.node_id(),
                    ground_truth: GroundTruth::Genuine,
                    decided: decision.decided(),
                    accepted: decision.accepts(claimant.node_id()),
                    best_score: decision.best_score,
                    seed,
                });
            }
        }
    }

    if let Some(adversary) = resolve_adversary(config, &nodes)? {
        let verifier = nodes
            .iter()
            .find(|node| node.node_id() == adversary.verifier_id)
            .ok_or_else(|| Error::config("adversary.verifier_id", "no such node"))?;
        let trials = config.adversary.as_ref().map(|s| s.trials).unwrap_or(0);
        for trial in 0..trials {
            let seed = rng::derive_seed(
                config.master_seed,
                &[stream_label::MITM_TRIAL, trial as u64],
            );
            let decision = run_mitm_attack(verifier, &adversary, config.k, seed)?;
            decisions.push(DecisionRecord {
                verifier: verifier.node_id(),
                claimant: None,
                claimed: adversary.claimed_id,
                ground_truth: GroundTruth::Impostor,
                decided: decision.decided(),
                accepted: decision.accepts(adversary.claimed_id),
                best_score: decision.best_score,
                seed,
            });
        }
    }

    Ok(ExperimentOutput {
        config: config.clone(),
        warnings,
        nodes,
        histograms,
        kl,
        metrics: ExperimentMetrics::from_decisions(decisions),
    })
}

/// Built-in experiment configurations.
///
/// * `table1-analog` — four devices, pairwise KL matrix plus genuine trials.
/// * `fig4-analog` — the same constellation, histograms and matrix only.
/// * `mitm-analog` — adds a readout-offset adversary impersonating node 1.
pub fn preset(name: &str) -> Option<ConstellationConfig> {
    let base = ConstellationConfig::new(4, 42);
    match name {
        "table1-analog" => Some(base),
        "fig4-analog" => Some(ConstellationConfig {
            trials_per_pair: 0,
            ..base
        }),
        "mitm-analog" => Some(ConstellationConfig {
            adversary: Some(super::config::AdversarySpec {
                claimed_id: 1,
                verifier_id: 2,
                epsilon_offset: 0.05,
                device: None,
                trials: 100,
            }),
            ..base
        }),
        _ => None,
    }
}

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 3] = ["table1-analog", "fig4-analog", "mitm-analog"];
