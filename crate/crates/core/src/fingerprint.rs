//! Per-transmitter noise fingerprints and the open-set classifier over them.
//!
//! A [`NoiseFingerprint`] is the smoothed reference distribution a node learns
//! for one peer. [`classify`] matches observed counts against a profile set by
//! minimum KL divergence or maximum multinomial log-likelihood and applies a
//! rejection threshold, so an observation may match none of the enrolled
//! identities.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dist::{self, SmoothingPolicy};
use crate::error::{Error, Result};
use crate::sim::Counts;

/// Identifier of a constellation node, 1-based.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Which part of the outcome spectrum the classifier consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainMode {
    /// Violating states only; the two allowed states are excluded and the
    /// rest renormalized.
    #[serde(rename = "error-only")]
    ErrorStatesOnly,
    /// All 2^n outcomes.
    #[serde(rename = "full")]
    FullSpectrum,
}

impl DomainMode {
    fn len(self, n: usize) -> usize {
        match self {
            DomainMode::ErrorStatesOnly => (1 << n) - 2,
            DomainMode::FullSpectrum => 1 << n,
        }
    }
}

/// Scoring rule used to match an observation against enrolled profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassifierMode {
    /// Smallest D_KL(observed ‖ reference) wins.
    #[serde(rename = "min-kl")]
    MinKl,
    /// Largest count-weighted log-likelihood wins.
    #[serde(rename = "multinomial")]
    MultinomialLikelihood,
}

/// Direction of the KL score in [`ClassifierMode::MinKl`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KlDirection {
    /// D(observed ‖ reference): penalizes observed mass where the reference
    /// has little. The default.
    #[serde(rename = "observed-vs-reference")]
    ObservedVsReference,
    /// D(reference ‖ observed), for experimentation.
    #[serde(rename = "reference-vs-observed")]
    ReferenceVsObserved,
}

/// Settings shared by training and classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifierConfig {
    pub mode: ClassifierMode,
    pub domain: DomainMode,
    /// Pseudocount per bin applied before normalizing.
    pub alpha: f64,
    /// Rejection threshold θ: nats in MinKl mode, per-shot log-likelihood
    /// units in MultinomialLikelihood mode.
    pub rejection_threshold: f64,
    /// Margin γ applied by threshold calibration.
    pub margin: f64,
    pub kl_direction: KlDirection,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            mode: ClassifierMode::MinKl,
            domain: DomainMode::ErrorStatesOnly,
            alpha: 0.5,
            rejection_threshold: 0.0,
            margin: 3.0,
            kl_direction: KlDirection::ObservedVsReference,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::config("classifier.alpha", "must be ≥ 0"));
        }
        if !(self.rejection_threshold.is_finite() && self.rejection_threshold >= 0.0) {
            return Err(Error::config("classifier.rejection_threshold", "must be ≥ 0"));
        }
        if !(self.margin.is_finite() && self.margin >= 1.0) {
            return Err(Error::config("classifier.margin", "must be ≥ 1"));
        }
        Ok(())
    }
}

/// A node's learned reference distribution for one transmitter.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseFingerprint {
    node_id: NodeId,
    n: usize,
    domain: DomainMode,
    alpha: f64,
    training_shots: u64,
    reference: Vec<f64>,
}

impl NoiseFingerprint {
    /// Assemble a fingerprint from already-normalized reference probabilities.
    pub fn new(
        node_id: NodeId,
        n: usize,
        domain: DomainMode,
        alpha: f64,
        training_shots: u64,
        reference: Vec<f64>,
    ) -> Result<Self> {
        if training_shots == 0 {
            return Err(Error::invalid("training_shots must be ≥ 1"));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::invalid("alpha must be ≥ 0"));
        }
        // The distribution constructors carry the invariants for each domain.
        match domain {
            DomainMode::ErrorStatesOnly => {
                dist::ErrorStateDistribution::new(n, reference.clone())?;
            }
            DomainMode::FullSpectrum => {
                dist::OutcomeDistribution::new(n, reference.clone())?;
            }
        }
        Ok(Self {
            node_id,
            n,
            domain,
            alpha,
            training_shots,
            reference,
        })
    }

    pub fn node_id(&self) -> NodeId {
        self.node_id
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> DomainMode {
        self.domain
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn training_shots(&self) -> u64 {
        self.training_shots
    }

    /// Reference probabilities over the fingerprint's domain.
    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    /// Basis-state index of reference position `pos`.
    pub fn basis_index(&self, pos: usize) -> usize {
        match self.domain {
            DomainMode::ErrorStatesOnly => pos + 1,
            DomainMode::FullSpectrum => pos,
        }
    }
}

/// Smooth `counts` and project them onto the scoring domain.
fn observed_domain_distribution(
    counts: &Counts,
    alpha: f64,
    domain: DomainMode,
) -> Result<Vec<f64>> {
    let smoothed = dist::smooth(counts, SmoothingPolicy::new(alpha)?)?;
    match domain {
        DomainMode::FullSpectrum => Ok(smoothed.probs().to_vec()),
        DomainMode::ErrorStatesOnly => {
            Ok(dist::restrict_to_error_states(&smoothed)?.probs().to_vec())
        }
    }
}

/// Raw counts over the scoring domain and their total.
fn domain_counts(counts: &Counts, domain: DomainMode) -> (Vec<u64>, u64) {
    let slice = match domain {
        DomainMode::FullSpectrum => counts.histogram().to_vec(),
        DomainMode::ErrorStatesOnly => {
            counts.histogram()[1..counts.histogram().len() - 1].to_vec()
        }
    };
    let total = slice.iter().sum();
    (slice, total)
}

/// Learn a reference distribution for `node_id` from training counts.
pub fn train_fingerprint(
    node_id: NodeId,
    counts: &Counts,
    config: &ClassifierConfig,
) -> Result<NoiseFingerprint> {
    config.validate()?;
    let reference = observed_domain_distribution(counts, config.alpha, config.domain)?;
    NoiseFingerprint::new(
        node_id,
        counts.qubit_count(),
        config.domain,
        config.alpha,
        counts.shots(),
        reference,
    )
}

/// θ = γ × max over validation batches of D_KL(batch ‖ reference).
///
/// Batches must come from the profiled device; the margin γ turns the largest
/// intra-device divergence seen during validation into an accept bound.
pub fn calibrate_threshold(
    profile: &NoiseFingerprint,
    validation: &[Counts],
    margin: f64,
) -> Result<f64> {
    if validation.is_empty() {
        return Err(Error::invalid("validation list must be nonempty"));
    }
    if !(margin.is_finite() && margin >= 1.0) {
        return Err(Error::invalid(format!("margin must be ≥ 1, got {margin}")));
    }
    let mut worst = 0.0f64;
    for batch in validation {
        if batch.qubit_count() != profile.qubit_count() {
            return Err(Error::DimensionMismatch {
                expected: profile.qubit_count(),
                got: batch.qubit_count(),
            });
        }
        let observed = observed_domain_distribution(batch, profile.alpha(), profile.domain())?;
        worst = worst.max(dist::kl_divergence(&observed, profile.reference())?);
    }
    Ok(margin * worst)
}

/// Σ_x c_x·ln(reference(x)) over the profile's domain.
///
/// The multinomial coefficient is omitted: it is identical across profiles
/// and cancels in every comparison.
pub fn multinomial_loglik(counts: &Counts, profile: &NoiseFingerprint) -> Result<f64> {
    if counts.qubit_count() != profile.qubit_count() {
        return Err(Error::DimensionMismatch {
            expected: profile.qubit_count(),
            got: counts.qubit_count(),
        });
    }
    let (domain, _) = domain_counts(counts, profile.domain());
    let mut total = 0.0;
    for (index, (&c, &p)) in domain.iter().zip(profile.reference()).enumerate() {
        if c > 0 {
            if p <= 0.0 {
                return Err(Error::DivergenceUndefined { index });
            }
            total += c as f64 * p.ln();
        }
    }
    Ok(total)
}

/// Outcome of matching an observation against a profile set.
#[derive(Debug, Clone, PartialEq)]
pub struct AuthDecision {
    pub verdict: Verdict,
    /// Per-candidate score: KL in nats, or mean per-shot log-likelihood.
    pub scores: BTreeMap<NodeId, f64>,
    /// Score of the winning candidate.
    pub best_score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept(NodeId),
    Reject,
}

impl AuthDecision {
    /// Node the classifier decided on, if any.
    pub fn decided(&self) -> Option<NodeId> {
        match self.verdict {
            Verdict::Accept(id) => Some(id),
            Verdict::Reject => None,
        }
    }

    /// Whether this decision authenticates the claimed identity.
    pub fn accepts(&self, claimed: NodeId) -> bool {
        self.verdict == Verdict::Accept(claimed)
    }
}

enum ThresholdRule {
    /// MinKl: accept iff best score ≤ θ.
    ScoreAtMost,
    /// Multinomial, several profiles: accept iff per-shot margin ≥ θ.
    MarginAtLeast,
    /// Multinomial, single profile: accept iff mean log-likelihood ≥ −θ.
    MeanAtLeast,
}

/// Scores for every profile plus the winning candidate, before the
/// accept/reject test. [`ProfileScores::decide`] applies a threshold, which
/// lets callers use per-peer calibrated thresholds.
pub struct ProfileScores {
    scores: BTreeMap<NodeId, f64>,
    best: NodeId,
    best_score: f64,
    threshold_stat: f64,
    rule: ThresholdRule,
}

impl ProfileScores {
    pub fn best(&self) -> NodeId {
        self.best
    }

    pub fn best_score(&self) -> f64 {
        self.best_score
    }

    /// Apply the rejection threshold and produce the decision.
    pub fn decide(&self, threshold: f64) -> AuthDecision {
        let accept = match self.rule {
            ThresholdRule::ScoreAtMost => self.threshold_stat <= threshold,
            ThresholdRule::MarginAtLeast => self.threshold_stat >= threshold,
            ThresholdRule::MeanAtLeast => self.threshold_stat >= -threshold,
        };
        AuthDecision {
            verdict: if accept {
                Verdict::Accept(self.best)
            } else {
                Verdict::Reject
            },
            scores: self.scores.clone(),
            best_score: self.best_score,
        }
    }
}

/// Score `observed` against every profile without deciding.
pub fn score_profiles<'a, I>(
    observed: &Counts,
    profiles: I,
    config: &ClassifierConfig,
) -> Result<ProfileScores>
where
    I: IntoIterator<Item = &'a NoiseFingerprint>,
{
    config.validate()?;
    let mut profiles: Vec<&NoiseFingerprint> = profiles.into_iter().collect();
    if profiles.is_empty() {
        return Err(Error::invalid("profile set must be nonempty"));
    }
    profiles.sort_by_key(|p| p.node_id());
    for pair in profiles.windows(2) {
        if pair[0].node_id() == pair[1].node_id() {
            return Err(Error::invalid(format!(
                "duplicate profile for node {}",
                pair[0].node_id()
            )));
        }
    }
    let n = observed.qubit_count();
    for profile in &profiles {
        if profile.qubit_count() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: profile.qubit_count(),
            });
        }
        if profile.domain() != config.domain {
            return Err(Error::invalid(format!(
                "profile for node {} uses a different domain than the classifier",
                profile.node_id()
            )));
        }
        debug_assert_eq!(profile.reference().len(), config.domain.len(n));
    }

    match config.mode {
        ClassifierMode::MinKl => {
            let observed = observed_domain_distribution(observed, config.alpha, config.domain)?;
            let mut scores = BTreeMap::new();
            for profile in &profiles {
                let score = match config.kl_direction {
                    KlDirection::ObservedVsReference => {
                        dist::kl_divergence(&observed, profile.reference())?
                    }
                    KlDirection::ReferenceVsObserved => {
                        dist::kl_divergence(profile.reference(), &observed)?
                    }
                };
                scores.insert(profile.node_id(), score);
            }
            // Ascending node id, strict improvement: ties break to the
            // smallest id.
            let (best, best_score) = scores
                .iter()
                .fold(None, |acc: Option<(NodeId, f64)>, (&id, &s)| match acc {
                    Some((_, bs)) if bs <= s => acc,
                    _ => Some((id, s)),
                })
                .expect("profile set is nonempty");
            Ok(ProfileScores {
                scores,
                best,
                best_score,
                threshold_stat: best_score,
                rule: ThresholdRule::ScoreAtMost,
            })
        }
        ClassifierMode::MultinomialLikelihood => {
            let (_, total) = domain_counts(observed, config.domain);
            let mut totals = BTreeMap::new();
            for profile in &profiles {
                totals.insert(profile.node_id(), multinomial_loglik(observed, profile)?);
            }
            let per_shot = |t: f64| if total == 0 { 0.0 } else { t / total as f64 };
            let scores: BTreeMap<NodeId, f64> =
                totals.iter().map(|(&id, &t)| (id, per_shot(t))).collect();
            let (best, best_total) = totals
                .iter()
                .fold(None, |acc: Option<(NodeId, f64)>, (&id, &t)| match acc {
                    Some((_, bt)) if bt >= t => acc,
                    _ => Some((id, t)),
                })
                .expect("profile set is nonempty");
            let best_score = per_shot(best_total);
            let (threshold_stat, rule) = if totals.len() == 1 {
                (best_score, ThresholdRule::MeanAtLeast)
            } else {
                let second = totals
                    .iter()
                    .filter(|(&id, _)| id != best)
                    .map(|(_, &t)| t)
                    .fold(f64::NEG_INFINITY, f64::max);
                (per_shot(best_total - second), ThresholdRule::MarginAtLeast)
            };
            Ok(ProfileScores {
                scores,
                best,
                best_score,
                threshold_stat,
                rule,
            })
        }
    }
}

/// Match `observed` against `profiles` and apply the configured threshold.
pub fn classify(
    observed: &Counts,
    profiles: &[NoiseFingerprint],
    config: &ClassifierConfig,
) -> Result<AuthDecision> {
    let scored = score_profiles(observed, profiles.iter(), config)?;
    Ok(scored.decide(config.rejection_threshold))
}
