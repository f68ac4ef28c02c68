//! Pipeline drivers shared by the CLI and the test suites: signing whole
//! corpora and assembling the combined metrics report.

use std::collections::BTreeMap;

use motifsig_core::classify::{classify, AttackSignature, ClassifyError, ReferenceSet};
use motifsig_core::cluster::{derive_reference, hcluster, ClusterError, ScenarioCluster, ScenarioClusters};
use motifsig_core::graph::{build_graph, GraphError};
use motifsig_core::metrics::{class_similarities, eval_overlap, eval_supervised, tau_window, MetricsError};
use motifsig_core::alert::AlertCluster;
use motifsig_core::seed;
use motifsig_core::signature::{sign_digraph, SignatureError};
use thiserror::Error;

use crate::report::{
    ClassSimilaritySection, ClassificationSection, InterValue, MetricsReport, OverlapSection,
    PairValue, ScenarioRatesSection, WindowSection,
};
use crate::sigfile::SignatureRecord;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cluster {cluster_id:?}: {source}")]
    Graph {
        cluster_id: String,
        source: GraphError,
    },
    #[error("cluster {cluster_id:?}: {source}")]
    Sign {
        cluster_id: String,
        source: SignatureError,
    },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("no signatures to evaluate")]
    Empty,
}

#[derive(Debug, Clone, Copy)]
pub struct SignOptions {
    pub samples: u32,
    pub seed: u64,
}

/// Signs every cluster: communication graph, census, size-matched random
/// ensemble, Z-score. Each cluster's ensemble runs on a seed derived from
/// the master seed and the cluster id, so records do not depend on file
/// order. Labels and host counts ride along for later evaluation.
pub fn sign_clusters(
    clusters: &[AlertCluster],
    options: &SignOptions,
) -> Result<Vec<SignatureRecord>, PipelineError> {
    let mut records = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let graph = build_graph(cluster).map_err(|source| PipelineError::Graph {
            cluster_id: cluster.cluster_id().to_string(),
            source,
        })?;
        let signature = sign_digraph(
            graph.digraph(),
            options.samples,
            seed::derive_tagged(options.seed, cluster.cluster_id()),
        )
        .map_err(|source| PipelineError::Sign {
            cluster_id: cluster.cluster_id().to_string(),
            source,
        })?;
        records.push(SignatureRecord::new(
            cluster.cluster_id(),
            &signature,
            cluster.label().map(String::from),
            Some(graph.stats().host_count as u64),
        ));
    }
    Ok(records)
}

fn window_section(psi_max: Option<u64>, w: motifsig_core::metrics::TauWindow) -> WindowSection {
    WindowSection {
        psi_max,
        max_inter: w.max_inter,
        min_intra: w.min_intra,
        width: w.width(),
        midpoint: w.midpoint(),
        open: w.is_open(),
    }
}

/// Groups classified attacks by assigned reference, deriving each group's
/// medoid. The group order follows the reference set.
pub fn reference_partition(
    assignments: &[motifsig_core::classify::Assignment],
    attacks: &[AttackSignature],
    refs: &ReferenceSet,
) -> Result<ScenarioClusters, PipelineError> {
    let by_id: BTreeMap<&str, &AttackSignature> =
        attacks.iter().map(|a| (a.cluster_id.as_str(), a)).collect();
    let mut clusters = Vec::new();
    for name in refs.names() {
        let members: Vec<&AttackSignature> = assignments
            .iter()
            .filter(|a| a.label.as_deref() == Some(name))
            .map(|a| by_id[a.cluster_id.as_str()])
            .collect();
        if members.is_empty() {
            continue;
        }
        let signatures: Vec<_> = members.iter().map(|m| m.signature.clone()).collect();
        clusters.push(ScenarioCluster {
            members: members.iter().map(|m| m.cluster_id.clone()).collect(),
            reference: derive_reference(&signatures)?,
        });
    }
    Ok(ScenarioClusters { clusters })
}

/// Builds the full evaluation report over a labeled signature file:
/// the per-scenario similarity table, threshold windows per population
/// upper bound (when host counts are recorded), reference classification
/// rates, and the overlap between the reference-based and unsupervised
/// clusterings. Without an explicit `tau` the global window midpoint is
/// used.
pub fn build_metrics(
    records: &[SignatureRecord],
    refs: &ReferenceSet,
    tau_override: Option<f64>,
) -> Result<MetricsReport, PipelineError> {
    if records.is_empty() {
        return Err(PipelineError::Empty);
    }
    let attacks: Vec<AttackSignature> = records.iter().map(|r| r.to_attack()).collect();
    let mut truth: BTreeMap<String, String> = BTreeMap::new();
    for record in records {
        match &record.label {
            Some(label) => {
                truth.insert(record.cluster_id.clone(), label.clone());
            }
            None => return Err(MetricsError::MissingLabel(record.cluster_id.clone()).into()),
        }
    }

    let class_similarity: Vec<ClassSimilaritySection> = class_similarities(&attacks, &truth)?
        .into_iter()
        .map(|row| ClassSimilaritySection {
            scenario: row.scenario,
            members: row.member_count,
            lowest_intra: row.lowest_intra.map(|(value, (a, b))| PairValue { value, a, b }),
            highest_inter: row
                .highest_inter
                .map(|(value, (a, b), with)| InterValue { value, a, b, with }),
        })
        .collect();

    let mut tau_windows = Vec::new();
    if records.iter().all(|r| r.hosts.is_some()) {
        let mut bounds: Vec<u64> = records.iter().filter_map(|r| r.hosts).collect();
        bounds.sort_unstable();
        bounds.dedup();
        for &bound in &bounds {
            let subset: Vec<AttackSignature> = records
                .iter()
                .filter(|r| r.hosts.expect("checked") <= bound)
                .map(|r| r.to_attack())
                .collect();
            tau_windows.push(window_section(Some(bound), tau_window(&subset, &truth)?));
        }
    }
    let global_window = window_section(None, tau_window(&attacks, &truth)?);

    let (tau, tau_source) = match tau_override {
        Some(t) => (t, "explicit"),
        None => (global_window.midpoint, "window-midpoint"),
    };

    let assignments = classify(&attacks, refs, tau)?;
    let unmatched = assignments.iter().filter(|a| a.label.is_none()).count();
    let supervised = eval_supervised(&assignments, &truth)?;
    let classification = ClassificationSection {
        per_scenario: supervised
            .per_scenario
            .into_iter()
            .map(|s| ScenarioRatesSection {
                scenario: s.scenario,
                tp: s.tp,
                fp: s.fp,
                tn: s.tn,
                fn_count: s.fn_count,
                tpr: s.tpr,
                fpr: s.fpr,
                accuracy: s.accuracy,
            })
            .collect(),
        macro_tpr: supervised.macro_tpr,
        macro_fpr: supervised.macro_fpr,
        macro_accuracy: supervised.macro_accuracy,
        unmatched,
        total: assignments.len(),
    };

    let overlap = if unmatched == assignments.len() {
        None
    } else {
        let reference_clusters = reference_partition(&assignments, &attacks, refs)?;
        let (_, unsupervised) = hcluster(&attacks, tau)?;
        let scores = eval_overlap(&reference_clusters, &unsupervised)?;
        Some(OverlapSection {
            equivalent: scores.equivalent,
            homogeneity: scores.homogeneity,
            reference_clusters: reference_clusters.len(),
            unsupervised_clusters: unsupervised.len(),
        })
    };

    Ok(MetricsReport {
        tau,
        tau_source,
        class_similarity,
        tau_windows,
        global_window,
        classification,
        overlap,
    })
}

/// Cluster counts over a threshold sweep, reusing one dendrogram.
pub fn tau_sweep(
    attacks: &[AttackSignature],
    taus: impl IntoIterator<Item = f64>,
) -> Result<Vec<(f64, usize)>, PipelineError> {
    let (dendrogram, _) = hcluster(attacks, 0.0)?;
    Ok(taus
        .into_iter()
        .map(|tau| (tau, dendrogram.cut(1.0 - tau).len()))
        .collect())
}
