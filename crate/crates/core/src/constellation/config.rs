use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fingerprint::{ClassifierConfig, DomainMode, NodeId};
use crate::sim::{DeviceNoiseParams, DeviceParamRanges, MAX_QUBITS};

fn default_n() -> usize {
    5
}

fn default_k() -> u64 {
    1_000
}

fn default_k_prime() -> u64 {
    10_000
}

fn default_trials_per_pair() -> u32 {
    10
}

fn default_epsilon_offset() -> f64 {
    0.05
}

fn default_adversary_trials() -> u32 {
    100
}

/// How the adversary's hardware is specified.
///
/// Either explicit device parameters, or a readout offset applied to the
/// impersonated device's parameters (every qubit's confusion probabilities
/// shifted by the offset in magnitude).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySpec {
    pub claimed_id: u32,
    pub verifier_id: u32,
    #[serde(default = "default_epsilon_offset")]
    pub epsilon_offset: f64,
    #[serde(default)]
    pub device: Option<DeviceNoiseParams>,
    #[serde(default = "default_adversary_trials")]
    pub trials: u32,
}

/// Resolved man-in-the-middle attack: a non-enrolled device claiming an
/// enrolled identity toward one verifier.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryConfig {
    pub device: DeviceNoiseParams,
    pub claimed_id: NodeId,
    pub verifier_id: NodeId,
}

/// Full description of a constellation experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationConfig {
    /// Number of nodes, ≥ 2.
    pub m: u32,
    /// Qubits per entangled batch.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Shots per online authentication.
    #[serde(default = "default_k")]
    pub k: u64,
    /// Shots per training exchange (k′ ≥ 5k).
    #[serde(default = "default_k_prime")]
    pub k_prime: u64,
    /// Root of every stream the experiment draws from.
    pub master_seed: u64,
    #[serde(default)]
    pub device_ranges: DeviceParamRanges,
    #[serde(default)]
    pub classifier: ClassifierConfig,
    /// Genuine authentications per ordered node pair.
    #[serde(default = "default_trials_per_pair")]
    pub trials_per_pair: u32,
    #[serde(default)]
    pub adversary: Option<AdversarySpec>,
    /// Optional undirected training edges; nodes train on every peer when
    /// absent (complete graph).
    #[serde(default)]
    pub adjacency: Option<Vec<(u32, u32)>>,
}

impl ConstellationConfig {
    /// Minimal config: everything but `m` and `master_seed` at defaults.
    pub fn new(m: u32, master_seed: u64) -> Self {
        Self {
            m,
            n: default_n(),
            k: default_k(),
            k_prime: default_k_prime(),
            master_seed,
            device_ranges: DeviceParamRanges::default(),
            classifier: ClassifierConfig::default(),
            trials_per_pair: default_trials_per_pair(),
            adversary: None,
            adjacency: None,
        }
    }

    /// Check every constraint; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if self.m < 2 {
            return Err(Error::config("m", format!("must be ≥ 2, got {}", self.m)));
        }
        if !(1..=MAX_QUBITS).contains(&self.n) {
            return Err(Error::config(
                "n",
                format!("must be in 1..={MAX_QUBITS}, got {}", self.n),
            ));
        }
        if self.classifier.domain == DomainMode::ErrorStatesOnly && self.n < 2 {
            return Err(Error::config(
                "n",
                "error-only domain needs at least 2 qubits",
            ));
        }
        if self.k == 0 {
            return Err(Error::config("k", "must be ≥ 1"));
        }
        if self.k_prime < 5 * self.k {
            return Err(Error::config(
                "k_prime",
                format!(
                    "training shots must dominate authentication shots: k′ ≥ 5k, got k′ = {} with k = {}",
                    self.k_prime, self.k
                ),
            ));
        }
        if self.k_prime < 10 * self.k {
            warnings.push(format!(
                "k_prime = {} is below the recommended 10×k = {}",
                self.k_prime,
                10 * self.k
            ));
        }
        self.device_ranges.validate()?;
        self.classifier.validate()?;
        if let Some(adversary) = &self.adversary {
            let in_range = |name: &str, id: u32| -> Result<()> {
                if id == 0 || id > self.m {
                    return Err(Error::config(
                        format!("adversary.{name}"),
                        format!("must name a node in 1..={}, got {id}", self.m),
                    ));
                }
                Ok(())
            };
            in_range("claimed_id", adversary.claimed_id)?;
            in_range("verifier_id", adversary.verifier_id)?;
            if adversary.claimed_id == adversary.verifier_id {
                return Err(Error::config(
                    "adversary.claimed_id",
                    "a node does not authenticate itself; claimed_id must differ from verifier_id",
                ));
            }
            if adversary.device.is_none()
                && !(adversary.epsilon_offset.is_finite() && adversary.epsilon_offset >= 0.0)
            {
                return Err(Error::config("adversary.epsilon_offset", "must be ≥ 0"));
            }
        }
        if let Some(edges) = &self.adjacency {
            for (index, &(a, b)) in edges.iter().enumerate() {
                if a == 0 || a > self.m || b == 0 || b > self.m || a == b {
                    return Err(Error::config(
                        format!("adjacency[{index}]"),
                        format!("edge ({a},{b}) must join two distinct nodes in 1..={}", self.m),
                    ));
                }
            }
        }
        Ok(warnings)
    }

    /// Node ids 1..=m.
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.m).map(NodeId)
    }

    /// Peers node `id` trains on: everyone else, or its adjacency neighbors.
    pub fn peers_of(&self, id: NodeId) -> Vec<NodeId> {
        match &self.adjacency {
            None => self.node_ids().filter(|&peer| peer != id).collect(),
            Some(edges) => {
                let mut peers: Vec<NodeId> = edges
                    .iter()
                    .filter_map(|&(a, b)| {
                        if NodeId(a) == id {
                            Some(NodeId(b))
                        } else if NodeId(b) == id {
                            Some(NodeId(a))
                        } else {
                            None
                        }
                    })
                    .collect();
                peers.sort();
                peers.dedup();
                peers
            }
        }
    }
}

/// Parse a config from JSON text, apply defaults, and validate.
///
/// Returns the config plus any non-fatal warnings.
pub fn parse_config(text: &str) -> Result<(ConstellationConfig, Vec<String>)> {
    let config: ConstellationConfig =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("config: {e}")))?;
    let warnings = config.validate()?;
    Ok((config, warnings))
}
