//! Stable on-disk formats.
//!
//! CSV artifacts use ascending basis-state index, bitstrings printed
//! most-significant qubit first, and floats at 12 significant digits. JSON
//! artifacts serialize with fixed field order, so every artifact is
//! byte-reproducible from the same inputs.

use serde::{Deserialize, Serialize};

use crate::constellation::{DecisionRecord, ExperimentMetrics};
use crate::error::{Error, Result};
use crate::fingerprint::{DomainMode, NodeId, NoiseFingerprint};
use crate::sim::{Counts, MAX_QUBITS};

/// Significant digits carried by every numeric artifact field.
pub const SIG_DIGITS: usize = 12;

/// Envelope identifier for fingerprint files.
pub const FINGERPRINT_FORMAT: &str = "qnf-fingerprint/1";

/// Basis-state index as a bitstring, most-significant qubit first.
pub fn bitstring(index: usize, n: usize) -> String {
    (0..n).rev().map(|b| if index >> b & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parse a bitstring back to (index, qubit count).
pub fn parse_bitstring(text: &str) -> Result<(usize, usize)> {
    let n = text.len();
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(Error::Malformed(format!(
            "bitstring `{text}` must have 1..={MAX_QUBITS} bits"
        )));
    }
    let mut index = 0usize;
    for c in text.chars() {
        index = (index << 1)
            | match c {
                '0' => 0,
                '1' => 1,
                other => {
                    return Err(Error::Malformed(format!(
                        "bitstring `{text}` contains `{other}`"
                    )))
                }
            };
    }
    Ok((index, n))
}

/// Format with [`SIG_DIGITS`] significant digits.
pub fn fmt_sig(value: f64) -> String {
    format!("{:.*e}", SIG_DIGITS - 1, value)
}

/// Round to [`SIG_DIGITS`] significant digits, for numeric JSON fields.
pub fn round_sig(value: f64) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    let magnitude = value.abs().log10().floor() as i32;
    let factor = 10f64.powi(SIG_DIGITS as i32 - 1 - magnitude);
    (value * factor).round() / factor
}

/// Render `bitstring,count` rows over all 2^n basis states.
pub fn histogram_csv(counts: &Counts) -> String {
    let n = counts.qubit_count();
    let mut out = String::from("bitstring,count\n");
    for (index, &count) in counts.histogram().iter().enumerate() {
        out.push_str(&bitstring(index, n));
        out.push(',');
        out.push_str(&count.to_string());
        out.push('\n');
    }
    out
}

/// Parse a histogram CSV back into counts.
pub fn parse_histogram_csv(text: &str) -> Result<Counts> {
    let mut rows = parse_two_column(text, "count")?;
    rows.sort_by_key(|&(index, _, _)| index);
    let n = rows
        .first()
        .map(|&(_, n, _)| n)
        .ok_or_else(|| Error::Malformed("histogram has no rows".into()))?;
    let mut histogram = vec![0u64; 1 << n];
    let mut seen = vec![false; 1 << n];
    for (index, row_n, value) in rows {
        if row_n != n {
            return Err(Error::Malformed("bitstring widths differ".into()));
        }
        if seen[index] {
            return Err(Error::Malformed(format!("duplicate bitstring for {index}")));
        }
        seen[index] = true;
        if value < 0.0 || value.fract() != 0.0 || value > u64::MAX as f64 {
            return Err(Error::Malformed(format!("count {value} is not a natural number")));
        }
        histogram[index] = value as u64;
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::Malformed(format!(
            "histogram must list all {} bitstrings",
            1usize << n
        )));
    }
    Counts::from_histogram(n, histogram)
}

/// Render `bitstring,probability` rows for the given (basis index, p) pairs.
fn distribution_csv_rows<'a>(n: usize, rows: impl Iterator<Item = (usize, &'a f64)>) -> String {
    let mut out = String::from("bitstring,probability\n");
    for (index, &p) in rows {
        out.push_str(&bitstring(index, n));
        out.push(',');
        out.push_str(&fmt_sig(p));
        out.push('\n');
    }
    out
}

/// Distribution CSV for a fingerprint's reference (error-only references list
/// only the violating states' bitstrings).
pub fn reference_csv(fingerprint: &NoiseFingerprint) -> String {
    let n = fingerprint.qubit_count();
    distribution_csv_rows(
        n,
        fingerprint
            .reference()
            .iter()
            .enumerate()
            .map(|(pos, p)| (fingerprint.basis_index(pos), p)),
    )
}

fn parse_two_column(text: &str, value_header: &str) -> Result<Vec<(usize, usize, f64)>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Malformed("empty CSV".into()))?;
    let expected = format!("bitstring,{value_header}");
    if header.trim_end() != expected {
        return Err(Error::Malformed(format!(
            "expected header `{expected}`, got `{header}`"
        )));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let (bits, value) = line.split_once(',').ok_or_else(|| {
            Error::Malformed(format!("line {}: expected two columns", lineno + 2))
        })?;
        let (index, n) = parse_bitstring(bits)?;
        let value: f64 = value.parse().map_err(|e| {
            Error::Malformed(format!("line {}: bad value `{value}`: {e}", lineno + 2))
        })?;
        rows.push((index, n, value));
    }
    Ok(rows)
}

/// Pairwise divergence matrix with node ids on the header row and column.
pub fn kl_matrix_csv(ids: &[NodeId], matrix: &[Vec<f64>]) -> String {
    let mut out = String::from("node");
    for id in ids {
        out.push(',');
        out.push_str(&id.to_string());
    }
    out.push('\n');
    for (id, row) in ids.iter().zip(matrix) {
        out.push_str(&id.to_string());
        for value in row {
            out.push(',');
            out.push_str(&fmt_sig(*value));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct FingerprintEnvelope {
    format: String,
    node_id: NodeId,
    n: usize,
    domain: DomainMode,
    alpha: f64,
    training_shots: u64,
    reference_csv: String,
}

/// Serialize a fingerprint to its JSON envelope (reference embedded as CSV).
pub fn fingerprint_to_json(fingerprint: &NoiseFingerprint) -> String {
    let envelope = FingerprintEnvelope {
        format: FINGERPRINT_FORMAT.to_string(),
        node_id: fingerprint.node_id(),
        n: fingerprint.qubit_count(),
        domain: fingerprint.domain(),
        alpha: fingerprint.alpha(),
        training_shots: fingerprint.training_shots(),
        reference_csv: reference_csv(fingerprint),
    };
    serde_json::to_string_pretty(&envelope).expect("envelope serializes") + "\n"
}

/// Parse a fingerprint envelope, revalidating every invariant.
pub fn fingerprint_from_json(text: &str) -> Result<NoiseFingerprint> {
    let envelope: FingerprintEnvelope =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("fingerprint: {e}")))?;
    if envelope.format != FINGERPRINT_FORMAT {
        return Err(Error::Malformed(format!(
            "unsupported fingerprint format `{}`",
            envelope.format
        )));
    }
    let mut rows = parse_two_column(&envelope.reference_csv, "probability")?;
    rows.sort_by_key(|&(index, _, _)| index);
    let expected: Vec<usize> = match envelope.domain {
        DomainMode::ErrorStatesOnly => (1..(1usize << envelope.n) - 1).collect(),
        DomainMode::FullSpectrum => (0..1usize << envelope.n).collect(),
    };
    if rows.len() != expected.len()
        || rows
            .iter()
            .zip(&expected)
            .any(|(&(index, n, _), &want)| index != want || n != envelope.n)
    {
        return Err(Error::Malformed(
            "reference rows do not cover the fingerprint domain".into(),
        ));
    }
    NoiseFingerprint::new(
        envelope.node_id,
        envelope.n,
        envelope.domain,
        envelope.alpha,
        envelope.training_shots,
        rows.into_iter().map(|(_, _, p)| p).collect(),
    )
}

fn rounded_scores(
    scores: &std::collections::BTreeMap<NodeId, f64>,
) -> std::collections::BTreeMap<NodeId, f64> {
    scores.iter().map(|(&id, &s)| (id, round_sig(s))).collect()
}

/// Decision log: one JSON record per line, scores rounded to [`SIG_DIGITS`].
pub fn decision_log_jsonl(records: &[DecisionRecord]) -> String {
    let mut out = String::new();
    for record in records {
        let mut record = record.clone();
        record.best_score = round_sig(record.best_score);
        out.push_str(&serde_json::to_string(&record).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Parse a decision log produced by [`decision_log_jsonl`].
pub fn parse_decision_log(text: &str) -> Result<Vec<DecisionRecord>> {
    text.lines()
        .filter(|line| !line.trim().is_empty())
        .map(|line| {
            serde_json::from_str(line).map_err(|e| Error::Malformed(format!("decision log: {e}")))
        })
        .collect()
}

#[derive(Serialize)]
struct MetricsSummary<'a> {
    genuine_trials: u64,
    impostor_trials: u64,
    genuine_accept_rate: f64,
    far: f64,
    frr: f64,
    confusion: &'a std::collections::BTreeMap<NodeId, crate::constellation::ConfusionRow>,
}

/// Metrics summary JSON (decision log excluded; it is its own artifact).
pub fn metrics_json(metrics: &ExperimentMetrics) -> String {
    let summary = MetricsSummary {
        genuine_trials: metrics.genuine_trials,
        impostor_trials: metrics.impostor_trials,
        genuine_accept_rate: round_sig(metrics.genuine_accept_rate),
        far: round_sig(metrics.far),
        frr: round_sig(metrics.frr),
        confusion: &metrics.confusion,
    };
    serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"
}

/// Decision JSON for CLI output.
pub fn decision_json(decision: &crate::fingerprint::AuthDecision) -> String {
    #[derive(Serialize)]
    struct DecisionView {
        verdict: &'static str,
        decided: Option<NodeId>,
        best_score: f64,
        scores: std::collections::BTreeMap<NodeId, f64>,
    }
    let view = DecisionView {
        verdict: if decision.decided().is_some() {
            "accept"
        } else {
            "reject"
        },
        decided: decision.decided(),
        best_score: round_sig(decision.best_score),
        scores: rounded_scores(&decision.scores),
    };
    serde_json::to_string_pretty(&view).expect("decision serializes") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint::{train_fingerprint, ClassifierConfig};

    #[test]
    fn bitstrings_print_msb_first() {
        assert_eq!(bitstring(1, 5), "00001");
        assert_eq!(bitstring(16, 5), "10000");
        assert_eq!(bitstring(31, 5), "11111");
        assert_eq!(parse_bitstring("00001").unwrap(), (1, 5));
        assert_eq!(parse_bitstring("10000").unwrap(), (16, 5));
        assert!(parse_bitstring("102").is_err());
        assert!(parse_bitstring("").is_err());
    }

    #[test]
    fn sig_digit_formatting() {
        assert_eq!(fmt_sig(0.48), "4.80000000000e-1");
        assert_eq!(fmt_sig(0.0), "0.00000000000e0");
        assert_eq!(round_sig(0.123456789012345), 0.123456789012);
        assert_eq!(round_sig(0.0), 0.0);
    }

    #[test]
    fn histogram_csv_round_trips() {
        let counts = Counts::from_histogram(2, vec![480, 20, 30, 470]).unwrap();
        let csv = histogram_csv(&counts);
        assert!(csv.starts_with("bitstring,count\n00,480\n"));
        let back = parse_histogram_csv(&csv).unwrap();
        assert_eq!(back, counts);
    }

    #[test]
    fn histogram_parse_rejects_gaps_and_junk() {
        assert!(parse_histogram_csv("bitstring,count\n00,1\n01,2\n").is_err());
        assert!(parse_histogram_csv("count,bitstring\n").is_err());
        assert!(parse_histogram_csv("bitstring,count\n00,1.5\n01,0\n10,0\n11,0\n").is_err());
        assert!(parse_histogram_csv(
            "bitstring,count\n00,1\n00,2\n10,0\n11,0\n"
        )
        .is_err());
    }

    #[test]
    fn fingerprint_envelope_round_trips() {
        let counts = Counts::from_histogram(3, vec![400, 30, 20, 10, 15, 5, 20, 500]).unwrap();
        for domain in [DomainMode::ErrorStatesOnly, DomainMode::FullSpectrum] {
            let config = ClassifierConfig {
                domain,
                ..ClassifierConfig::default()
            };
            let fingerprint = train_fingerprint(NodeId(2), &counts, &config).unwrap();
            let json = fingerprint_to_json(&fingerprint);
            let back = fingerprint_from_json(&json).unwrap();
            assert_eq!(back.node_id(), fingerprint.node_id());
            assert_eq!(back.domain(), fingerprint.domain());
            assert_eq!(back.training_shots(), fingerprint.training_shots());
            // The reference survives the 12-significant-digit round trip.
            for (a, b) in back.reference().iter().zip(fingerprint.reference()) {
                assert!((a - b).abs() < 1e-11, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn fingerprint_envelope_rejects_tampering() {
        let counts = Counts::from_histogram(2, vec![480, 20, 30, 470]).unwrap();
        let fingerprint =
            train_fingerprint(NodeId(1), &counts, &ClassifierConfig::default()).unwrap();
        let json = fingerprint_to_json(&fingerprint);
        assert!(fingerprint_from_json(&json.replace("qnf-fingerprint/1", "v9")).is_err());
        // Dropping a domain row breaks coverage.
        let truncated = json.replace("01,", "00,");
        assert!(fingerprint_from_json(&truncated).is_err());
    }

    #[test]
    fn kl_matrix_csv_layout() {
        let ids = [NodeId(1), NodeId(2)];
        let matrix = vec![vec![0.0, 0.25], vec![0.5, 0.0]];
        let csv = kl_matrix_csv(&ids, &matrix);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "node,1,2");
        assert_eq!(lines[1], "1,0.00000000000e0,2.50000000000e-1");
        assert_eq!(lines[2], "2,5.00000000000e-1,0.00000000000e0");
    }

    #[test]
    fn decision_log_round_trips() {
        use crate::constellation::GroundTruth;
        let records = vec![DecisionRecord {
            verifier: NodeId(1),
            claimant: Some(NodeId(2)),
            claimed: NodeId(2),
            ground_truth: GroundTruth::Genuine,
            decided: Some(NodeId(2)),
            accepted: true,
            best_score: 0.012345678901234,
            seed: 99,
        }];
        let text = decision_log_jsonl(&records);
        assert_eq!(text.lines().count(), 1);
        let back = parse_decision_log(&text).unwrap();
        assert_eq!(back[0].verifier, NodeId(1));
        assert_eq!(back[0].best_score, round_sig(records[0].best_score));
    }
}
