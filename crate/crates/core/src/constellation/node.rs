use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fingerprint::{
    calibrate_threshold, score_profiles, train_fingerprint, AuthDecision, ClassifierConfig,
    NodeId, NoiseFingerprint,
};
use crate::rng;
use crate::sim::{build_ghz_circuit, sample_shots, Counts, DeviceNoiseParams};

use super::config::{AdversaryConfig, ConstellationConfig};

/// Stream labels used to derive every seed of an experiment from the master
/// seed. Paths are (label, ...ids), so no two units of work share a stream.
pub(crate) mod stream_label {
    pub const DEVICE: u64 = 1;
    pub const TRAIN_REFERENCE: u64 = 2;
    pub const TRAIN_VALIDATION: u64 = 3;
    pub const AUTH_TRIAL: u64 = 4;
    pub const MITM_TRIAL: u64 = 5;
    pub const DEVICE_HISTOGRAM: u64 = 6;
}

/// One satellite: a transmitter plus the profiles it holds of its peers.
#[derive(Debug, Clone, PartialEq)]
pub struct SatelliteNode {
    node_id: NodeId,
    device: DeviceNoiseParams,
    classifier: ClassifierConfig,
    profiles: BTreeMap<NodeId, NoiseFingerprint>,
    thresholds: BTreeMap<NodeId, f64>,
}

impl SatelliteNode {
    pub fn node_id(&self) -> NodeId {
        self.node_id
    }

    pub fn device(&self) -> &DeviceNoiseParams {
        &self.device
    }

    pub fn classifier(&self) -> &ClassifierConfig {
        &self.classifier
    }

    /// Peer profiles learned during training, keyed by peer id.
    pub fn profiles(&self) -> &BTreeMap<NodeId, NoiseFingerprint> {
        &self.profiles
    }

    /// Calibrated per-peer rejection thresholds.
    pub fn thresholds(&self) -> &BTreeMap<NodeId, f64> {
        &self.thresholds
    }

    pub fn is_trained(&self) -> bool {
        !self.profiles.is_empty()
    }

    /// Classify observed counts against this node's profile set, applying the
    /// calibrated threshold of whichever peer scores best.
    pub fn classify_counts(&self, observed: &Counts) -> Result<AuthDecision> {
        if !self.is_trained() {
            return Err(Error::ProtocolState(format!(
                "node {} has no trained profiles",
                self.node_id
            )));
        }
        let scored = score_profiles(observed, self.profiles.values(), &self.classifier)?;
        let threshold = self.thresholds[&scored.best()];
        Ok(scored.decide(threshold))
    }
}

/// Validation batches mirror the online setting: batches of k shots (capped
/// by what is held out).
fn validation_plan(k: u64, held_out: u64) -> (u64, u64) {
    let batch = k.min(held_out).max(1);
    (batch, (held_out / batch).max(1))
}

/// Run the training phase: every node queries each of its peers for k′
/// training shots, learns a fingerprint, and calibrates a rejection threshold
/// on a held-out fifth of the shots.
pub fn run_training_phase(config: &ConstellationConfig) -> Result<Vec<SatelliteNode>> {
    config.validate()?;
    let circuit = build_ghz_circuit(config.n)?;
    let devices: BTreeMap<NodeId, DeviceNoiseParams> = config
        .node_ids()
        .map(|id| {
            let seed = rng::derive_seed(config.master_seed, &[stream_label::DEVICE, id.0 as u64]);
            DeviceNoiseParams::sample(config.n, &config.device_ranges, seed).map(|d| (id, d))
        })
        .collect::<Result<_>>()?;

    let held_out = config.k_prime / 5;
    let reference_shots = config.k_prime - held_out;
    let (batch_shots, batches) = validation_plan(config.k, held_out);

    let mut nodes = Vec::with_capacity(config.m as usize);
    for learner in config.node_ids() {
        let mut profiles = BTreeMap::new();
        let mut thresholds = BTreeMap::new();
        for peer in config.peers_of(learner) {
            let device = &devices[&peer];
            let reference_seed = rng::derive_seed(
                config.master_seed,
                &[stream_label::TRAIN_REFERENCE, learner.0 as u64, peer.0 as u64],
            );
            let counts = sample_shots(device, &circuit, reference_shots, reference_seed)?;
            let profile = train_fingerprint(peer, &counts, &config.classifier)?;

            let validation: Vec<Counts> = (0..batches)
                .map(|batch| {
                    let seed = rng::derive_seed(
                        config.master_seed,
                        &[
                            stream_label::TRAIN_VALIDATION,
                            learner.0 as u64,
                            peer.0 as u64,
                            batch,
                        ],
                    );
                    sample_shots(device, &circuit, batch_shots, seed)
                })
                .collect::<Result<_>>()?;
            let theta = calibrate_threshold(&profile, &validation, config.classifier.margin)?;

            profiles.insert(peer, profile);
            thresholds.insert(peer, theta);
        }
        nodes.push(SatelliteNode {
            node_id: learner,
            device: devices[&learner].clone(),
            classifier: config.classifier,
            profiles,
            thresholds,
        });
    }
    Ok(nodes)
}

/// One online authentication: the claimant transmits k fresh batches and the
/// verifier matches them against its profiles.
pub fn authenticate_peer(
    verifier: &SatelliteNode,
    claimant: &SatelliteNode,
    k: u64,
    seed: u64,
) -> Result<AuthDecision> {
    if !verifier.is_trained() {
        return Err(Error::ProtocolState(format!(
            "verifier {} has no trained profiles",
            verifier.node_id()
        )));
    }
    let circuit = build_ghz_circuit(claimant.device().qubit_count())?;
    let observed = sample_shots(claimant.device(), &circuit, k, seed)?;
    verifier.classify_counts(&observed)
}

/// A regeneration attack: the adversary's own hardware produces the batches
/// while claiming an enrolled identity. The verifier classifies normally.
pub fn run_mitm_attack(
    verifier: &SatelliteNode,
    adversary: &AdversaryConfig,
    k: u64,
    seed: u64,
) -> Result<AuthDecision> {
    if !verifier.is_trained() {
        return Err(Error::ProtocolState(format!(
            "verifier {} has no trained profiles",
            verifier.node_id()
        )));
    }
    let circuit = build_ghz_circuit(adversary.device.qubit_count())?;
    let observed = sample_shots(&adversary.device, &circuit, k, seed)?;
    verifier.classify_counts(&observed)
}
