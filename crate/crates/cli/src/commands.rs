use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};

use qnf_core::artifact;
use qnf_core::constellation::{parse_config, preset, run_experiment, PRESET_NAMES};
use qnf_core::fingerprint::{
    classify, train_fingerprint, ClassifierConfig, ClassifierMode, DomainMode, NodeId,
    NoiseFingerprint,
};
use qnf_core::sim::{
    build_ghz_circuit, sample_shots, DeviceNoiseParams, DeviceParamRanges, ReadoutConfusion,
};

use crate::manifest::write_artifacts;
use crate::{AuthenticateArgs, ExperimentArgs, FingerprintArgs, MatrixArgs, SimulateArgs};

fn parse_mode(text: &str) -> Result<ClassifierMode> {
    match text {
        "min-kl" => Ok(ClassifierMode::MinKl),
        "multinomial" => Ok(ClassifierMode::MultinomialLikelihood),
        other => bail!("unknown mode `{other}` (expected min-kl or multinomial)"),
    }
}

fn parse_domain(text: &str) -> Result<DomainMode> {
    match text {
        "error-only" => Ok(DomainMode::ErrorStatesOnly),
        "full" => Ok(DomainMode::FullSpectrum),
        other => bail!("unknown domain `{other}` (expected error-only or full)"),
    }
}

fn parse_eps_list(text: &str, n: usize, flag: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .with_context(|| format!("--{flag}: bad value `{part}`"))
        })
        .collect::<Result<_>>()?;
    match values.len() {
        1 => Ok(vec![values[0]; n]),
        len if len == n => Ok(values),
        len => bail!("--{flag} takes 1 or {n} comma-separated values, got {len}"),
    }
}

fn emit(out: Option<&Path>, payload: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, payload)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{payload}"),
    }
    Ok(())
}

fn load_profiles(paths: &[PathBuf]) -> Result<Vec<NoiseFingerprint>> {
    paths
        .iter()
        .map(|path| {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            artifact::fingerprint_from_json(&text)
                .with_context(|| format!("parsing {}", path.display()))
        })
        .collect()
}

pub fn simulate(args: SimulateArgs) -> Result<ExitCode> {
    let device = match args.device_seed {
        Some(seed) => DeviceNoiseParams::sample(args.n, &DeviceParamRanges::default(), seed)?,
        None => {
            let eps01 = parse_eps_list(&args.eps01, args.n, "eps01")?;
            let eps10 = parse_eps_list(&args.eps10, args.n, "eps10")?;
            let readout = eps01
                .into_iter()
                .zip(eps10)
                .map(|(e01, e10)| ReadoutConfusion {
                    eps01: e01,
                    eps10: e10,
                })
                .collect();
            DeviceNoiseParams::new(readout, args.p1, args.p2, args.seed)?
        }
    };
    let circuit = build_ghz_circuit(args.n)?;
    let counts = sample_shots(&device, &circuit, args.shots, args.seed)?;
    emit(args.out.as_deref(), &artifact::histogram_csv(&counts))?;
    Ok(ExitCode::SUCCESS)
}

pub fn fingerprint(args: FingerprintArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.counts)
        .with_context(|| format!("reading {}", args.counts.display()))?;
    let counts = artifact::parse_histogram_csv(&text)?;
    let config = ClassifierConfig {
        domain: parse_domain(&args.domain)?,
        alpha: args.alpha,
        ..ClassifierConfig::default()
    };
    let fingerprint = train_fingerprint(NodeId(args.node_id), &counts, &config)?;
    emit(args.out.as_deref(), &artifact::fingerprint_to_json(&fingerprint))?;
    Ok(ExitCode::SUCCESS)
}

pub fn authenticate(args: AuthenticateArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.counts)
        .with_context(|| format!("reading {}", args.counts.display()))?;
    let observed = artifact::parse_histogram_csv(&text)?;
    let profiles = load_profiles(&args.profiles)?;

    let domain = profiles[0].domain();
    let alpha = profiles[0].alpha();
    for profile in &profiles[1..] {
        if profile.domain() != domain || profile.alpha() != alpha {
            bail!("profiles disagree on domain or alpha; retrain them consistently");
        }
    }
    if let Some(flag) = &args.domain {
        if parse_domain(flag)? != domain {
            bail!("--domain {flag} does not match the profiles' domain");
        }
    }

    let config = ClassifierConfig {
        mode: parse_mode(&args.mode)?,
        domain,
        alpha: args.alpha.unwrap_or(alpha),
        rejection_threshold: args.theta,
        ..ClassifierConfig::default()
    };
    let decision = classify(&observed, &profiles, &config)?;
    print!("{}", artifact::decision_json(&decision));

    let authenticated = match args.claimed {
        Some(id) => decision.accepts(NodeId(id)),
        None => decision.decided().is_some(),
    };
    Ok(if authenticated {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn matrix(args: MatrixArgs) -> Result<ExitCode> {
    let profiles = load_profiles(&args.profiles)?;
    let first = &profiles[0];
    for profile in &profiles[1..] {
        if profile.qubit_count() != first.qubit_count() || profile.domain() != first.domain() {
            bail!("profiles must share qubit count and domain");
        }
    }
    let ids: Vec<NodeId> = profiles.iter().map(|p| p.node_id()).collect();
    let references: Vec<&[f64]> = profiles.iter().map(|p| p.reference()).collect();
    let matrix = qnf_core::dist::kl_matrix(&references)?;
    emit(args.out.as_deref(), &artifact::kl_matrix_csv(&ids, &matrix))?;
    Ok(ExitCode::SUCCESS)
}

pub fn experiment(args: ExperimentArgs) -> Result<ExitCode> {
    let (mut config, mut warnings) = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text)?
        }
        (None, Some(name)) => {
            let config = preset(name).ok_or_else(|| {
                anyhow!(
                    "unknown preset `{name}` (available: {})",
                    PRESET_NAMES.join(", ")
                )
            })?;
            (config, Vec::new())
        }
        _ => bail!("provide exactly one of --config or --preset"),
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(mode) = &args.mode {
        config.classifier.mode = parse_mode(mode)?;
    }
    if let Some(domain) = &args.domain {
        config.classifier.domain = parse_domain(domain)?;
    }
    warnings.extend(config.validate()?);
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }

    let output = run_experiment(&config)?;
    let paths = write_artifacts(&args.out, &output)?;

    let metrics = &output.metrics;
    println!("experiment complete: {} nodes, seed {}", config.m, config.master_seed);
    println!(
        "genuine trials {} (accept rate {:.4}), impostor trials {} (FAR {:.4})",
        metrics.genuine_trials, metrics.genuine_accept_rate, metrics.impostor_trials, metrics.far
    );
    for path in &paths {
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
