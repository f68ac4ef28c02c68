//! The `motifsig` command line: gen, sign, sim, classify, cluster, eval.
//!
//! Every randomized stage takes an explicit `--seed`; reruns with identical
//! flags produce byte-identical outputs. Exit codes: 0 success, 1 usage
//! error (bad flags or parameter domains), 2 data error (unreadable or
//! malformed inputs).

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use motifsig_core::classify::{classify, AttackSignature};
use motifsig_core::cluster::hcluster;
use motifsig_core::generate::{generate_corpus, CorpusSpec, GenerateError, ScenarioKind};
use motifsig_core::similarity::similarity;

use crate::formats::{parse_clusters, serialize_clusters, ClusterFormat};
use crate::pipeline::{build_metrics, sign_clusters, tau_sweep, SignOptions};
use crate::report;
use crate::sigfile::{
    load_reference_set, read_signatures, write_reference_db, write_signatures, ReferenceRecord,
    SignatureRecord,
};

/// Errors split by exit code.
#[derive(Debug)]
pub enum AppError {
    /// Bad flag values or parameter domains (exit 1).
    Usage(String),
    /// Broken inputs or failing IO (exit 2).
    Data(anyhow::Error),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Data(_) => 2,
        }
    }

    pub fn message(&self) -> String {
        match self {
            AppError::Usage(m) => m.clone(),
            AppError::Data(e) => format!("{e:#}"),
        }
    }
}

fn usage(message: impl Into<String>) -> AppError {
    AppError::Usage(message.into())
}

fn data(err: impl Into<anyhow::Error>) -> AppError {
    AppError::Data(err.into())
}

#[derive(Parser)]
#[command(
    name = "motifsig",
    version,
    about = "Abstract IDS alert clusters into motif signatures; classify and cluster attack scenarios"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled synthetic attack corpus.
    Gen(GenArgs),
    /// Compute motif signatures for an alert-cluster file.
    Sign(SignArgs),
    /// Print the similarity of two single-signature files.
    Sim(SimArgs),
    /// Assign attacks to reference scenarios.
    Classify(ClassifyArgs),
    /// Cluster attacks into scenarios without references.
    Cluster(ClusterArgs),
    /// Emit the combined evaluation report for a labeled signature file.
    Eval(EvalArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Comma-separated scenario kinds, or `all`.
    #[arg(long, default_value = "all")]
    kinds: String,
    /// Population per attack: `N`, `LO..HI` (step 100) or `LO..HI:STEP`.
    #[arg(long)]
    psi: String,
    /// Attacks per (kind, population) pair.
    #[arg(long, default_value_t = 1)]
    count: u32,
    #[arg(long)]
    seed: u64,
    /// Output format.
    #[arg(long, default_value = "jsonl")]
    format: ClusterFormat,
    /// Mean alerts per entity.
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    /// Source-port reuse probability.
    #[arg(long, default_value_t = 0.5)]
    reuse: f64,
    /// Fan-out of the lateral-movement kinds.
    #[arg(long, default_value_t = 5)]
    spread: u32,
    /// Attacker fraction for distributed scans.
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Per-host target fraction for worms.
    #[arg(long, default_value_t = 0.1)]
    mu: f64,
    /// Output path (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SignArgs {
    /// Alert-cluster file (JSONL or CSV).
    #[arg(short, long)]
    input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long)]
    format: Option<ClusterFormat>,
    /// Random graphs per ensemble.
    #[arg(long, default_value_t = 100)]
    samples: u32,
    #[arg(long)]
    seed: u64,
    /// Output path (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    /// Signature file holding exactly one record.
    file_a: PathBuf,
    /// Signature file holding exactly one record.
    file_b: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Signature file of the attacks to classify.
    #[arg(long)]
    sigs: PathBuf,
    /// Reference database (JSON array) or labeled signature JSONL.
    #[arg(long)]
    refs: PathBuf,
    /// Minimum similarity for an assignment.
    #[arg(long)]
    tau: f64,
    /// Assignment CSV path (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    sigs: PathBuf,
    #[arg(long)]
    tau: f64,
    /// Flat clusters JSON (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Dendrogram JSON path.
    #[arg(long)]
    dendrogram: Option<PathBuf>,
    /// Dendrogram DOT path.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Reference database of the derived per-cluster signatures.
    #[arg(long)]
    derived_refs: Option<PathBuf>,
    /// Also emit cluster counts over a threshold sweep `LO:HI:STEP`.
    #[arg(long)]
    sweep: Option<String>,
    /// Sweep CSV path (required with --sweep).
    #[arg(long)]
    sweep_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Labeled signature file.
    #[arg(long)]
    sigs: PathBuf,
    /// Reference database (JSON array) or labeled signature JSONL.
    #[arg(long)]
    refs: PathBuf,
    /// Classification threshold; defaults to the computed window midpoint.
    #[arg(long)]
    tau: Option<f64>,
    /// Metrics JSON path (stdout when neither output is given).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Metrics CSV path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn check_tau(tau: f64) -> Result<f64, AppError> {
    if (0.0..=1.0).contains(&tau) {
        Ok(tau)
    } else {
        Err(usage(format!("--tau must be within [0, 1], got {tau}")))
    }
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), AppError> {
    match out {
        Some(path) => fs::write(path, bytes)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(AppError::Data),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(data)
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, AppError> {
    fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(AppError::Data)
}

fn parse_kinds(kinds: &str) -> Result<Vec<ScenarioKind>, AppError> {
    if kinds == "all" {
        return Ok(ScenarioKind::ALL.to_vec());
    }
    kinds
        .split(',')
        .map(|k| ScenarioKind::parse(k.trim()).map_err(|e| usage(e.to_string())))
        .collect()
}

/// `N`, `LO..HI`, or `LO..HI:STEP`.
fn parse_psi(spec: &str) -> Result<(u32, u32, u32), AppError> {
    let bad = || usage(format!("--psi {spec:?} is not N, LO..HI or LO..HI:STEP"));
    let (range, step) = match spec.split_once(':') {
        Some((range, step)) => (range, step.parse::<u32>().map_err(|_| bad())?),
        None => (spec, 100),
    };
    if step == 0 {
        return Err(usage("--psi step must be positive"));
    }
    match range.split_once("..") {
        Some((lo, hi)) => {
            let lo = lo.parse::<u32>().map_err(|_| bad())?;
            let hi = hi.parse::<u32>().map_err(|_| bad())?;
            if lo > hi {
                return Err(usage(format!("--psi range {range:?} is reversed")));
            }
            Ok((lo, hi, step))
        }
        None => {
            let n = range.parse::<u32>().map_err(|_| bad())?;
            Ok((n, n, 1))
        }
    }
}

fn run_gen(args: GenArgs) -> Result<(), AppError> {
    let kinds = parse_kinds(&args.kinds)?;
    let (lo, hi, step) = parse_psi(&args.psi)?;
    let specs: Vec<CorpusSpec> = kinds
        .into_iter()
        .map(|kind| {
            let mut spec = CorpusSpec::new(kind, lo, hi, step, args.count);
            spec.alerts_per_entity = args.alpha;
            spec.port_reuse_prob = args.reuse;
            spec.spread_factor = args.spread;
            spec.attacker_ratio = args.theta;
            spec.worm_target_fraction = args.mu;
            spec
        })
        .collect();
    // Generator parameter violations are usage errors: the flags describe
    // an impossible attack.
    let corpus = generate_corpus(&specs, args.seed).map_err(|e: GenerateError| usage(e.to_string()))?;
    emit(&args.out, &serialize_clusters(&corpus, args.format))
}

fn run_sign(args: SignArgs) -> Result<(), AppError> {
    let format = args
        .format
        .unwrap_or_else(|| ClusterFormat::from_path(&args.input));
    let bytes = read_file(&args.input)?;
    let clusters = parse_clusters(bytes.as_slice(), format).map_err(data)?;
    let records = sign_clusters(
        &clusters,
        &SignOptions {
            samples: args.samples,
            seed: args.seed,
        },
    )
    .map_err(data)?;
    emit(&args.out, &write_signatures(&records))
}

fn read_single_signature(path: &Path) -> Result<SignatureRecord, AppError> {
    let records = read_signatures(read_file(path)?.as_slice()).map_err(data)?;
    match <[SignatureRecord; 1]>::try_from(records) {
        Ok([record]) => Ok(record),
        Err(records) => Err(data(anyhow::anyhow!(
            "{} holds {} signatures, expected exactly 1",
            path.display(),
            records.len()
        ))),
    }
}

fn run_sim(args: SimArgs) -> Result<(), AppError> {
    let a = read_single_signature(&args.file_a)?;
    let b = read_single_signature(&args.file_b)?;
    let score = similarity(&a.signature(), &b.signature()).map_err(data)?;
    println!("{:.6}", score.value);
    Ok(())
}

fn read_attacks(path: &Path) -> Result<(Vec<SignatureRecord>, Vec<AttackSignature>), AppError> {
    let records = read_signatures(read_file(path)?.as_slice()).map_err(data)?;
    let attacks = records.iter().map(|r| r.to_attack()).collect();
    Ok((records, attacks))
}

fn run_classify(args: ClassifyArgs) -> Result<(), AppError> {
    let tau = check_tau(args.tau)?;
    let (_, attacks) = read_attacks(&args.sigs)?;
    let refs = load_reference_set(&read_file(&args.refs)?).map_err(data)?;
    let assignments = classify(&attacks, &refs, tau).map_err(data)?;
    emit(&args.out, &report::assignments_csv(&assignments))
}

fn parse_sweep(spec: &str) -> Result<Vec<f64>, AppError> {
    let bad = || usage(format!("--sweep {spec:?} is not LO:HI:STEP"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let step: f64 = step.parse().map_err(|_| bad())?;
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi || step <= 0.0 {
        return Err(bad());
    }
    let mut taus = Vec::new();
    let mut tau = lo;
    while tau <= hi + 1e-12 {
        taus.push(tau.min(1.0));
        tau += step;
    }
    Ok(taus)
}

fn run_cluster(args: ClusterArgs) -> Result<(), AppError> {
    let tau = check_tau(args.tau)?;
    if args.sweep.is_some() && args.sweep_out.is_none() {
        return Err(usage("--sweep requires --sweep-out"));
    }
    let (_, attacks) = read_attacks(&args.sigs)?;
    let (dendrogram, clusters) = hcluster(&attacks, tau).map_err(data)?;

    if let Some(path) = &args.dendrogram {
        emit(&Some(path.clone()), &report::dendrogram_json(&dendrogram))?;
    }
    if let Some(path) = &args.dot {
        emit(&Some(path.clone()), report::dendrogram_dot(&dendrogram).as_bytes())?;
    }
    if let Some(path) = &args.derived_refs {
        let refs: Vec<ReferenceRecord> = clusters
            .clusters
            .iter()
            .enumerate()
            .map(|(i, c)| ReferenceRecord::new(format!("scenario-{i:03}"), &c.reference))
            .collect();
        emit(&Some(path.clone()), &write_reference_db(&refs))?;
    }
    if let Some(spec) = &args.sweep {
        let taus = parse_sweep(spec)?;
        let rows = tau_sweep(&attacks, taus).map_err(data)?;
        emit(&args.sweep_out, &report::sweep_csv(&rows))?;
    }
    emit(&args.out, &report::clusters_json(tau, &clusters))
}

fn run_eval(args: EvalArgs) -> Result<(), AppError> {
    let tau = args.tau.map(check_tau).transpose()?;
    let (records, _) = read_attacks(&args.sigs)?;
    let refs = load_reference_set(&read_file(&args.refs)?).map_err(data)?;
    let metrics = build_metrics(&records, &refs, tau).map_err(data)?;
    if let Some(path) = &args.json {
        emit(&Some(path.clone()), &metrics.to_json())?;
    }
    if let Some(path) = &args.csv {
        emit(&Some(path.clone()), &metrics.to_csv())?;
    }
    if args.json.is_none() && args.csv.is_none() {
        emit(&None, &metrics.to_json())?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Sign(args) => run_sign(args),
        Command::Sim(args) => run_sim(args),
        Command::Classify(args) => run_classify(args),
        Command::Cluster(args) => run_cluster(args),
        Command::Eval(args) => run_eval(args),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_specs() {
        assert_eq!(parse_psi("100").unwrap(), (100, 100, 1));
        assert_eq!(parse_psi("100..400").unwrap(), (100, 400, 100));
        assert_eq!(parse_psi("10..50:20").unwrap(), (10, 50, 20));
        assert!(parse_psi("abc").is_err());
        assert!(parse_psi("400..100").is_err());
        assert!(parse_psi("1..2:0").is_err());
    }

    #[test]
    fn kind_lists() {
        assert_eq!(parse_kinds("all").unwrap().len(), 6);
        assert_eq!(
            parse_kinds("ddos, worm").unwrap(),
            vec![ScenarioKind::Ddos, ScenarioKind::Worm]
        );
        assert!(parse_kinds("ddos,nope").is_err());
    }

    #[test]
    fn sweep_specs() {
        let taus = parse_sweep("0.5:0.9:0.2").unwrap();
        assert_eq!(taus.len(), 3);
        assert!((taus[2] - 0.9).abs() < 1e-9);
        assert!(parse_sweep("0.9:0.5:0.1").is_err());
        assert!(parse_sweep("0:1:0").is_err());
        assert!(parse_sweep("0:1").is_err());
    }
}
