//! Experiment artifact emission and the run manifest that seals it.
//!
//! The manifest records the resolved config, the RNG scheme, and a SHA-256
//! digest of every emitted file, so a run can be verified byte-for-byte.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use qnf_core::artifact;
use qnf_core::constellation::{ConstellationConfig, ExperimentOutput};

#[derive(Serialize)]
struct ArtifactEntry {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    rng: &'static str,
    master_seed: u64,
    config: &'a ConstellationConfig,
    artifacts: Vec<ArtifactEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Write every artifact of an experiment run plus `manifest.json` into
/// `out_dir`. Returns the written paths, manifest last.
pub fn write_artifacts(out_dir: &Path, output: &ExperimentOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let mut entries = Vec::new();
    let mut paths = Vec::new();
    let mut write = |name: String, payload: String| -> Result<()> {
        let path = out_dir.join(&name);
        fs::write(&path, &payload).with_context(|| format!("writing {}", path.display()))?;
        entries.push(ArtifactEntry {
            path: name,
            sha256: sha256_hex(payload.as_bytes()),
        });
        paths.push(path);
        Ok(())
    };

    for (id, counts) in &output.histograms {
        write(
            format!("device_{id}_histogram.csv"),
            artifact::histogram_csv(counts),
        )?;
    }
    let ids: Vec<_> = output.histograms.iter().map(|(id, _)| *id).collect();
    write(
        "kl_matrix.csv".to_string(),
        artifact::kl_matrix_csv(&ids, &output.kl),
    )?;
    write(
        "metrics.json".to_string(),
        artifact::metrics_json(&output.metrics),
    )?;
    write(
        "decisions.jsonl".to_string(),
        artifact::decision_log_jsonl(&output.metrics.decisions),
    )?;

    let manifest = RunManifest {
        tool: "qnf",
        version: env!("CARGO_PKG_VERSION"),
        rng: qnf_core::rng::RNG_SPEC,
        master_seed: output.config.master_seed,
        config: &output.config,
        artifacts: entries,
    };
    let manifest_path = out_dir.join("manifest.json");
    let payload = serde_json::to_string_pretty(&manifest).context("serializing manifest")? + "\n";
    fs::write(&manifest_path, payload)
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    paths.push(manifest_path);
    Ok(paths)
}
