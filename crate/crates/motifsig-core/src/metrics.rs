//! Evaluation metrics: supervised classification scores against ground
//! truth, partition overlap between reference-based and unsupervised
//! clusterings, and the intra/inter-class similarity tables that bound the
//! usable threshold window.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::classify::{Assignment, AttackSignature};
use crate::cluster::ScenarioClusters;
use crate::similarity::similarity_values;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("cluster id {0:?} is missing from the ground truth")]
    UnknownClusterId(String),
    #[error("attack {0:?} carries no label")]
    MissingLabel(String),
    #[error("no attacks to evaluate")]
    EmptyInput,
    #[error("the two clusterings share no attack ids")]
    DisjointUniverses,
}

/// One-vs-rest confusion counts and rates for a single scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioScore {
    pub scenario: String,
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_count: u64,
    pub tpr: f64,
    pub fpr: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedEval {
    pub per_scenario: Vec<ScenarioScore>,
    pub macro_tpr: f64,
    pub macro_fpr: f64,
    pub macro_accuracy: f64,
}

fn rate(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores assignments against ground-truth labels, one-vs-rest per scenario
/// plus macro averages.
///
/// Unmatched assignments count as a negative prediction for every scenario.
/// Scenarios are the sorted union of truth labels and predicted labels; a
/// scenario with no positive examples (or no negatives) reports a 0 rate for
/// the undefined ratio.
pub fn eval_supervised(
    assignments: &[Assignment],
    truth: &BTreeMap<String, String>,
) -> Result<SupervisedEval, MetricsError> {
    if assignments.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut scenarios: BTreeSet<&str> = BTreeSet::new();
    for a in assignments {
        if !truth.contains_key(&a.cluster_id) {
            return Err(MetricsError::UnknownClusterId(a.cluster_id.clone()));
        }
        if let Some(l) = &a.label {
            scenarios.insert(l);
        }
    }
    scenarios.extend(truth.values().map(|s| s.as_str()));

    let total = assignments.len() as u64;
    let mut per_scenario = Vec::new();
    for scenario in scenarios {
        let mut tp = 0u64;
        let mut fp = 0u64;
        let mut fn_count = 0u64;
        for a in assignments {
            let actual = truth[&a.cluster_id] == scenario;
            let predicted = a.label.as_deref() == Some(scenario);
            match (actual, predicted) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_count += 1,
                (false, false) => {}
            }
        }
        let tn = total - tp - fp - fn_count;
        per_scenario.push(ScenarioScore {
            scenario: String::from(scenario),
            tp,
            fp,
            tn,
            fn_count,
            tpr: rate(tp, tp + fn_count),
            fpr: rate(fp, fp + tn),
            accuracy: rate(tp + tn, total),
        });
    }

    let k = per_scenario.len() as f64;
    Ok(SupervisedEval {
        macro_tpr: per_scenario.iter().map(|s| s.tpr).sum::<f64>() / k,
        macro_fpr: per_scenario.iter().map(|s| s.fpr).sum::<f64>() / k,
        macro_accuracy: per_scenario.iter().map(|s| s.accuracy).sum::<f64>() / k,
        per_scenario,
    })
}

/// Overlap between a reference-based clustering and an unsupervised one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapScores {
    /// Average best-candidate Jaccard index over the reference clusters,
    /// each unsupervised cluster consumable by at most one reference
    /// cluster (greedy, best Jaccard first).
    pub equivalent: f64,
    /// Size-weighted modal-scenario fraction over the unsupervised clusters
    /// that contain at least one reference-classified attack.
    pub homogeneity: f64,
}

/// Compares two clusterings of (mostly) the same attacks.
///
/// The reference clustering defines each attack's scenario as the reference
/// cluster containing it; attacks only present on the unsupervised side are
/// counted in cluster sizes but belong to no scenario.
pub fn eval_overlap(
    reference: &ScenarioClusters,
    unsupervised: &ScenarioClusters,
) -> Result<OverlapScores, MetricsError> {
    let ref_sets: Vec<BTreeSet<&str>> = reference
        .clusters
        .iter()
        .map(|c| c.members.iter().map(|m| m.as_str()).collect())
        .collect();
    let unsup_sets: Vec<BTreeSet<&str>> = unsupervised
        .clusters
        .iter()
        .map(|c| c.members.iter().map(|m| m.as_str()).collect())
        .collect();

    let mut scenario_of: BTreeMap<&str, usize> = BTreeMap::new();
    for (r, set) in ref_sets.iter().enumerate() {
        for id in set {
            scenario_of.insert(id, r);
        }
    }
    let any_shared = unsup_sets
        .iter()
        .any(|set| set.iter().any(|id| scenario_of.contains_key(id)));
    if !any_shared {
        return Err(MetricsError::DisjointUniverses);
    }

    // Equivalent: greedy best-Jaccard matching, each side used once.
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (r, rset) in ref_sets.iter().enumerate() {
        for (u, uset) in unsup_sets.iter().enumerate() {
            let inter = rset.intersection(uset).count();
            if inter == 0 {
                continue;
            }
            let union = rset.len() + uset.len() - inter;
            candidates.push((inter as f64 / union as f64, r, u));
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("jaccard is finite")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut ref_used = alloc::vec![false; ref_sets.len()];
    let mut unsup_used = alloc::vec![false; unsup_sets.len()];
    let mut jaccard_sum = 0.0;
    for (jaccard, r, u) in candidates {
        if !ref_used[r] && !unsup_used[u] {
            ref_used[r] = true;
            unsup_used[u] = true;
            jaccard_sum += jaccard;
        }
    }
    let equivalent = jaccard_sum / ref_sets.len() as f64;

    // Homogeneity: among all attacks of a qualifying unsupervised cluster,
    // the fraction belonging to its most frequent scenario.
    let mut modal_sum = 0u64;
    let mut size_sum = 0u64;
    for uset in &unsup_sets {
        let mut per_scenario: BTreeMap<usize, u64> = BTreeMap::new();
        for id in uset {
            if let Some(&r) = scenario_of.get(id) {
                *per_scenario.entry(r).or_insert(0) += 1;
            }
        }
        if let Some(modal) = per_scenario.values().max() {
            modal_sum += modal;
            size_sum += uset.len() as u64;
        }
    }
    let homogeneity = modal_sum as f64 / size_sum as f64;

    Ok(OverlapScores {
        equivalent,
        homogeneity,
    })
}

/// Table row: how tight one scenario's signatures are, and which other
/// scenario comes closest.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSimilarityRow {
    pub scenario: String,
    pub member_count: usize,
    /// Lowest similarity among members, with the offending pair. `None` for
    /// singleton scenarios.
    pub lowest_intra: Option<(f64, (String, String))>,
    /// Highest similarity to a member of any other scenario, with the pair
    /// and that scenario. `None` when only one scenario exists.
    pub highest_inter: Option<(f64, (String, String), String)>,
}

/// Per-scenario lowest intra-class and highest inter-class similarities over
/// a labeled attack set.
pub fn class_similarities(
    attacks: &[AttackSignature],
    labels: &BTreeMap<String, String>,
) -> Result<Vec<ClassSimilarityRow>, MetricsError> {
    if attacks.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut label_of: Vec<&str> = Vec::with_capacity(attacks.len());
    for a in attacks {
        match labels.get(&a.cluster_id) {
            Some(l) => label_of.push(l),
            None => return Err(MetricsError::MissingLabel(a.cluster_id.clone())),
        }
    }

    let scenarios: BTreeSet<&str> = label_of.iter().copied().collect();
    let mut rows: BTreeMap<&str, ClassSimilarityRow> = scenarios
        .iter()
        .map(|&s| {
            (
                s,
                ClassSimilarityRow {
                    scenario: String::from(s),
                    member_count: label_of.iter().filter(|&&l| l == s).count(),
                    lowest_intra: None,
                    highest_inter: None,
                },
            )
        })
        .collect();

    for i in 0..attacks.len() {
        for j in (i + 1)..attacks.len() {
            let s = similarity_values(&attacks[i].signature.z, &attacks[j].signature.z).value;
            let pair = (attacks[i].cluster_id.clone(), attacks[j].cluster_id.clone());
            if label_of[i] == label_of[j] {
                let row = rows.get_mut(label_of[i]).expect("row exists");
                if row.lowest_intra.as_ref().is_none_or(|(v, _)| s < *v) {
                    row.lowest_intra = Some((s, pair));
                }
            } else {
                for (own, other) in [(label_of[i], label_of[j]), (label_of[j], label_of[i])] {
                    let row = rows.get_mut(own).expect("row exists");
                    if row.highest_inter.as_ref().is_none_or(|(v, _, _)| s > *v) {
                        row.highest_inter =
                            Some((s, pair.clone(), String::from(other)));
                    }
                }
            }
        }
    }

    Ok(rows.into_values().collect())
}

/// The feasible threshold range `[max_inter, min_intra]`: any `tau` inside
/// separates every scenario in the labeled set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauWindow {
    pub max_inter: f64,
    pub min_intra: f64,
}

impl TauWindow {
    pub fn is_open(&self) -> bool {
        self.min_intra > self.max_inter
    }

    pub fn width(&self) -> f64 {
        self.min_intra - self.max_inter
    }

    pub fn midpoint(&self) -> f64 {
        (self.min_intra + self.max_inter) / 2.0
    }
}

/// Window bounds over a labeled attack set: minimum intra-class similarity
/// across all scenarios vs. maximum inter-class similarity. Scenarios with a
/// single member contribute no intra pair; with a single scenario the
/// inter bound is 0.
pub fn tau_window(
    attacks: &[AttackSignature],
    labels: &BTreeMap<String, String>,
) -> Result<TauWindow, MetricsError> {
    let rows = class_similarities(attacks, labels)?;
    let mut min_intra = 1.0f64;
    let mut max_inter = 0.0f64;
    for row in rows {
        if let Some((v, _)) = row.lowest_intra {
            min_intra = min_intra.min(v);
        }
        if let Some((v, _, _)) = row.highest_inter {
            max_inter = max_inter.max(v);
        }
    }
    Ok(TauWindow {
        max_inter,
        min_intra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::ScenarioCluster;
    use crate::signature::ZSignature;
    use alloc::string::ToString;
    use alloc::vec;

    fn assignment(id: &str, label: Option<&str>) -> Assignment {
        Assignment {
            cluster_id: id.into(),
            label: label.map(String::from),
            best_similarity: 1.0,
        }
    }

    fn truth(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn perfect_assignment_scores_perfectly() {
        let t = truth(&[("a", "ddos"), ("b", "scan")]);
        let got = eval_supervised(
            &[assignment("a", Some("ddos")), assignment("b", Some("scan"))],
            &t,
        )
        .unwrap();
        assert_eq!(got.macro_tpr, 1.0);
        assert_eq!(got.macro_fpr, 0.0);
        assert_eq!(got.macro_accuracy, 1.0);
    }

    #[test]
    fn all_unmatched_means_zero_tpr() {
        let t = truth(&[("a", "ddos"), ("b", "scan")]);
        let got =
            eval_supervised(&[assignment("a", None), assignment("b", None)], &t).unwrap();
        assert_eq!(got.macro_tpr, 0.0);
        assert_eq!(got.macro_fpr, 0.0);
    }

    #[test]
    fn ten_attack_hand_computed_confusion() {
        // 5 ddos, 5 scan; d5 mislabeled scan, s4 unmatched, s5 mislabeled
        // ddos. Hand-computed: ddos TP=4 FP=1 FN=1 TN=4; scan TP=3 FP=1
        // FN=2 TN=4.
        let t = truth(&[
            ("d1", "ddos"),
            ("d2", "ddos"),
            ("d3", "ddos"),
            ("d4", "ddos"),
            ("d5", "ddos"),
            ("s1", "scan"),
            ("s2", "scan"),
            ("s3", "scan"),
            ("s4", "scan"),
            ("s5", "scan"),
        ]);
        let assignments = vec![
            assignment("d1", Some("ddos")),
            assignment("d2", Some("ddos")),
            assignment("d3", Some("ddos")),
            assignment("d4", Some("ddos")),
            assignment("d5", Some("scan")),
            assignment("s1", Some("scan")),
            assignment("s2", Some("scan")),
            assignment("s3", Some("scan")),
            assignment("s4", None),
            assignment("s5", Some("ddos")),
        ];
        let got = eval_supervised(&assignments, &t).unwrap();
        let ddos = &got.per_scenario[0];
        assert_eq!((ddos.tp, ddos.fp, ddos.fn_count, ddos.tn), (4, 1, 1, 4));
        assert!((ddos.tpr - 0.8).abs() < 1e-12);
        assert!((ddos.fpr - 0.2).abs() < 1e-12);
        let scan = &got.per_scenario[1];
        assert_eq!((scan.tp, scan.fp, scan.fn_count, scan.tn), (3, 1, 2, 4));
        assert!((scan.tpr - 0.6).abs() < 1e-12);
        assert!((got.macro_tpr - 0.7).abs() < 1e-12);
        assert!((got.macro_fpr - 0.2).abs() < 1e-12);
        assert!((got.macro_accuracy - 0.75).abs() < 1e-12);
    }

    #[test]
    fn unknown_cluster_id_is_an_error() {
        let t = truth(&[("a", "ddos")]);
        assert_eq!(
            eval_supervised(&[assignment("ghost", Some("ddos"))], &t),
            Err(MetricsError::UnknownClusterId("ghost".into()))
        );
    }

    fn clusters(groups: &[&[&str]]) -> ScenarioClusters {
        ScenarioClusters {
            clusters: groups
                .iter()
                .map(|members| ScenarioCluster {
                    members: members.iter().map(|m| m.to_string()).collect(),
                    reference: ZSignature::from_values([0.0; 16]),
                })
                .collect(),
        }
    }

    #[test]
    fn identical_clusterings_score_one() {
        let a = clusters(&[&["a", "b"], &["c", "d"]]);
        let got = eval_overlap(&a, &a.clone()).unwrap();
        assert_eq!(got.equivalent, 1.0);
        assert_eq!(got.homogeneity, 1.0);
    }

    #[test]
    fn cluster_spanning_two_scenarios_is_half_homogeneous() {
        let reference = clusters(&[&["a1", "a2"], &["b1", "b2"]]);
        let unsupervised = clusters(&[&["a1", "a2", "b1", "b2"]]);
        let got = eval_overlap(&reference, &unsupervised).unwrap();
        assert_eq!(got.homogeneity, 0.5);
    }

    #[test]
    fn swapped_element_hand_computed() {
        // Three reference clusters of three; unsupervised swaps a3 and b3.
        // Jaccards: 2/4, 2/4, 1 -> equivalent 2/3. Modal fractions: 2/3,
        // 2/3, 3/3 size-weighted -> 7/9.
        let reference = clusters(&[&["a1", "a2", "a3"], &["b1", "b2", "b3"], &["c1", "c2", "c3"]]);
        let unsupervised =
            clusters(&[&["a1", "a2", "b3"], &["b1", "b2", "a3"], &["c1", "c2", "c3"]]);
        let got = eval_overlap(&reference, &unsupervised).unwrap();
        assert!((got.equivalent - 2.0 / 3.0).abs() < 1e-12);
        assert!((got.homogeneity - 7.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_universes_are_an_error() {
        let a = clusters(&[&["a"]]);
        let b = clusters(&[&["z"]]);
        assert_eq!(eval_overlap(&a, &b), Err(MetricsError::DisjointUniverses));
    }

    fn labeled_attack(id: &str, head: &[f64]) -> AttackSignature {
        let mut v = [0.0; 16];
        v[..head.len()].copy_from_slice(head);
        AttackSignature {
            cluster_id: id.into(),
            signature: ZSignature::from_values(v),
        }
    }

    #[test]
    fn class_similarity_table_and_window() {
        let attacks = vec![
            labeled_attack("d1", &[1.0, 0.0]),
            labeled_attack("d2", &[1.0, 0.05]),
            labeled_attack("s1", &[0.0, 1.0]),
            labeled_attack("s2", &[0.05, 1.0]),
        ];
        let labels = truth(&[("d1", "ddos"), ("d2", "ddos"), ("s1", "scan"), ("s2", "scan")]);
        let rows = class_similarities(&attacks, &labels).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            let (intra, _) = row.lowest_intra.clone().unwrap();
            let (inter, _, other) = row.highest_inter.clone().unwrap();
            assert!(intra > inter);
            assert_ne!(other, row.scenario);
        }
        let window = tau_window(&attacks, &labels).unwrap();
        assert!(window.is_open());
        assert!(window.width() > 0.0);
        assert!(window.midpoint() > 0.5);
    }

    #[test]
    fn identical_signatures_give_min_intra_one() {
        let attacks = vec![
            labeled_attack("a", &[1.0, 2.0]),
            labeled_attack("b", &[1.0, 2.0]),
        ];
        let labels = truth(&[("a", "x"), ("b", "x")]);
        let rows = class_similarities(&attacks, &labels).unwrap();
        let (intra, _) = rows[0].lowest_intra.clone().unwrap();
        assert!((intra - 1.0).abs() < 1e-7);
        assert!(rows[0].highest_inter.is_none());
    }

    #[test]
    fn unlabeled_attack_is_an_error() {
        let attacks = vec![labeled_attack("a", &[1.0])];
        let labels = BTreeMap::new();
        assert_eq!(
            class_similarities(&attacks, &labels),
            Err(MetricsError::MissingLabel("a".into()))
        );
    }
}
