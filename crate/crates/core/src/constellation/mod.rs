//! Constellation orchestration: training exercises between peers, online
//! authentication, a regeneration adversary, and full seeded experiments.

mod config;
mod experiment;
mod node;

pub use config::{parse_config, AdversaryConfig, AdversarySpec, ConstellationConfig};
pub use experiment::{
    preset, resolve_adversary, run_experiment, ConfusionRow, DecisionRecord, ExperimentMetrics,
    ExperimentOutput, GroundTruth, PRESET_NAMES,
};
pub use node::{authenticate_peer, run_mitm_attack, run_training_phase, SatelliteNode};
