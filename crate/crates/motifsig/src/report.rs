//! Report emission: assignment CSV, dendrogram JSON/DOT, scenario-cluster
//! JSON, threshold-sweep CSV, and the combined metrics report (JSON + flat
//! CSV). All outputs are byte-deterministic for fixed inputs.

use std::fmt::Write as _;

use motifsig_core::classify::Assignment;
use motifsig_core::cluster::{Dendrogram, ScenarioClusters};
use serde::Serialize;

/// Label used in reports for attacks no reference accepted.
pub const UNMATCHED: &str = "UNMATCHED";

pub fn assignments_csv(assignments: &[Assignment]) -> Vec<u8> {
    let mut out = String::from("cluster_id,label,similarity\n");
    for a in assignments {
        let label = a.label.as_deref().unwrap_or(UNMATCHED);
        writeln!(out, "{},{},{:.6}", a.cluster_id, label, a.best_similarity).expect("string write");
    }
    out.into_bytes()
}

#[derive(Serialize)]
struct MergeRow {
    left: usize,
    right: usize,
    distance: f64,
    size: usize,
}

#[derive(Serialize)]
struct DendrogramDoc<'a> {
    leaves: &'a [String],
    merges: Vec<MergeRow>,
}

pub fn dendrogram_json(dendrogram: &Dendrogram) -> Vec<u8> {
    let doc = DendrogramDoc {
        leaves: &dendrogram.leaves,
        merges: dendrogram
            .merges
            .iter()
            .map(|m| MergeRow {
                left: m.left,
                right: m.right,
                distance: m.distance,
                size: m.size,
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("plain struct");
    out.push(b'\n');
    out
}

/// Graphviz rendering: leaves are boxes labeled with cluster ids, internal
/// nodes carry the merge distance, edges point from each merge to its
/// children.
pub fn dendrogram_dot(dendrogram: &Dendrogram) -> String {
    let k = dendrogram.leaves.len();
    let mut out = String::from("digraph dendrogram {\n  rankdir=BT;\n  node [shape=box];\n");
    for (i, leaf) in dendrogram.leaves.iter().enumerate() {
        writeln!(out, "  n{} [label=\"{}\"];", i, leaf.replace('"', "'")).expect("string write");
    }
    for (step, merge) in dendrogram.merges.iter().enumerate() {
        let id = k + step;
        writeln!(
            out,
            "  n{id} [label=\"d={:.6}\" shape=ellipse];\n  n{} -> n{id};\n  n{} -> n{id};",
            merge.distance, merge.left, merge.right
        )
        .expect("string write");
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct ClusterRow<'a> {
    name: String,
    size: usize,
    members: &'a [String],
}

#[derive(Serialize)]
struct ClustersDoc<'a> {
    tau: f64,
    cluster_count: usize,
    clusters: Vec<ClusterRow<'a>>,
}

/// Flat clusters from a `cluster` run, named `scenario-000`, `scenario-001`,
/// ... in order of first appearance.
pub fn clusters_json(tau: f64, clusters: &ScenarioClusters) -> Vec<u8> {
    let doc = ClustersDoc {
        tau,
        cluster_count: clusters.len(),
        clusters: clusters
            .clusters
            .iter()
            .enumerate()
            .map(|(i, c)| ClusterRow {
                name: format!("scenario-{i:03}"),
                size: c.members.len(),
                members: &c.members,
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("plain struct");
    out.push(b'\n');
    out
}

/// `tau,clusters` curve data for threshold sweeps (Fig.-7-style reporting).
pub fn sweep_csv(rows: &[(f64, usize)]) -> Vec<u8> {
    let mut out = String::from("tau,clusters\n");
    for (tau, count) in rows {
        writeln!(out, "{tau},{count}").expect("string write");
    }
    out.into_bytes()
}

// ----- combined metrics report -----

#[derive(Debug, Clone, Serialize)]
pub struct PairValue {
    pub value: f64,
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct InterValue {
    pub value: f64,
    pub a: String,
    pub b: String,
    pub with: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassSimilaritySection {
    pub scenario: String,
    pub members: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lowest_intra: Option<PairValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub highest_inter: Option<InterValue>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowSection {
    /// Population upper bound this window was computed for; `None` for the
    /// global window over all attacks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_max: Option<u64>,
    pub max_inter: f64,
    pub min_intra: f64,
    pub width: f64,
    pub midpoint: f64,
    pub open: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioRatesSection {
    pub scenario: String,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_count: u64,
    pub tpr: f64,
    pub fpr: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationSection {
    pub per_scenario: Vec<ScenarioRatesSection>,
    pub macro_tpr: f64,
    pub macro_fpr: f64,
    pub macro_accuracy: f64,
    pub unmatched: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapSection {
    pub equivalent: f64,
    pub homogeneity: f64,
    pub reference_clusters: usize,
    pub unsupervised_clusters: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub tau: f64,
    pub tau_source: &'static str,
    pub class_similarity: Vec<ClassSimilaritySection>,
    pub tau_windows: Vec<WindowSection>,
    pub global_window: WindowSection,
    pub classification: ClassificationSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap: Option<OverlapSection>,
}

impl MetricsReport {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("plain struct");
        out.push(b'\n');
        out
    }

    /// Flat `section,scenario,metric,value` rows.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = String::from("section,scenario,metric,value\n");
        let mut row = |section: &str, scenario: &str, metric: &str, value: String| {
            writeln!(out, "{section},{scenario},{metric},{value}").expect("string write");
        };

        row("run", "", "tau", format!("{}", self.tau));
        row("run", "", "tau_source", self.tau_source.to_string());
        for c in &self.class_similarity {
            if let Some(intra) = &c.lowest_intra {
                row("class_similarity", &c.scenario, "lowest_intra", format!("{}", intra.value));
            }
            if let Some(inter) = &c.highest_inter {
                row("class_similarity", &c.scenario, "highest_inter", format!("{}", inter.value));
                row("class_similarity", &c.scenario, "highest_inter_with", inter.with.clone());
            }
        }
        for w in &self.tau_windows {
            let scenario = format!("psi<={}", w.psi_max.unwrap_or(0));
            row("tau_window", &scenario, "max_inter", format!("{}", w.max_inter));
            row("tau_window", &scenario, "min_intra", format!("{}", w.min_intra));
            row("tau_window", &scenario, "width", format!("{}", w.width));
            row("tau_window", &scenario, "midpoint", format!("{}", w.midpoint));
        }
        row("global_window", "", "max_inter", format!("{}", self.global_window.max_inter));
        row("global_window", "", "min_intra", format!("{}", self.global_window.min_intra));
        row("global_window", "", "width", format!("{}", self.global_window.width));
        row("global_window", "", "midpoint", format!("{}", self.global_window.midpoint));
        for s in &self.classification.per_scenario {
            row("classification", &s.scenario, "tpr", format!("{}", s.tpr));
            row("classification", &s.scenario, "fpr", format!("{}", s.fpr));
            row("classification", &s.scenario, "accuracy", format!("{}", s.accuracy));
        }
        row("classification", "macro", "tpr", format!("{}", self.classification.macro_tpr));
        row("classification", "macro", "fpr", format!("{}", self.classification.macro_fpr));
        row(
            "classification",
            "macro",
            "accuracy",
            format!("{}", self.classification.macro_accuracy),
        );
        row("classification", "", "unmatched", format!("{}", self.classification.unmatched));
        row("classification", "", "total", format!("{}", self.classification.total));
        if let Some(overlap) = &self.overlap {
            row("overlap", "", "equivalent", format!("{}", overlap.equivalent));
            row("overlap", "", "homogeneity", format!("{}", overlap.homogeneity));
            row("overlap", "", "reference_clusters", format!("{}", overlap.reference_clusters));
            row(
                "overlap",
                "",
                "unsupervised_clusters",
                format!("{}", overlap.unsupervised_clusters),
            );
        }
        out.into_bytes()
    }
}
