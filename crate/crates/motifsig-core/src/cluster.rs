//! Unsupervised scenario discovery.
//!
//! Attacks are clustered agglomeratively on the distance `1 - similarity`
//! with complete linkage, so the merge height of any cluster equals its
//! widest internal pair distance. Cutting the dendrogram at `1 - tau`
//! therefore yields exactly the flat clusters whose members are pairwise at
//! least `tau`-similar. Each flat cluster is represented by its medoid — the
//! member with the highest total similarity to the whole cluster — which
//! becomes the derived reference signature for the newly learned scenario.

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::classify::AttackSignature;
use crate::signature::ZSignature;
use crate::similarity::similarity_values;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("cannot cluster zero attacks")]
    EmptyInput,
    #[error("cannot derive a reference from an empty cluster")]
    EmptyCluster,
    #[error("tau must be within [0, 1], got {0}")]
    InvalidTau(f64),
    #[error("attack {0:?} uses motif order {1:?}, expected {2:?}")]
    OrderMismatch(String, String, String),
}

/// One agglomeration step. `left`/`right` are dendrogram node ids: values
/// below the leaf count are leaves (input indices), higher values refer to
/// the cluster created by that earlier merge (id = leaf count + step).
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

/// Stepwise dendrogram over the input attacks. Complete linkage keeps merge
/// distances non-decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub leaves: Vec<String>,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Flat clusters after applying every merge with distance `<= cutoff`.
    /// Clusters are ordered by their smallest leaf index; members ascend.
    pub fn cut(&self, cutoff: f64) -> Vec<Vec<usize>> {
        let k = self.leaves.len();
        let mut members: Vec<Option<Vec<usize>>> = (0..k).map(|i| Some(alloc::vec![i])).collect();
        members.resize_with(k + self.merges.len(), || None);

        for (step, merge) in self.merges.iter().enumerate() {
            if merge.distance > cutoff {
                break; // merges are sorted by distance
            }
            let mut left = members[merge.left].take().expect("child used once");
            let right = members[merge.right].take().expect("child used once");
            left.extend(right);
            members[k + step] = Some(left);
        }

        let mut clusters: Vec<Vec<usize>> = members.into_iter().flatten().collect();
        for c in &mut clusters {
            c.sort_unstable();
        }
        clusters.sort_by_key(|c| c[0]);
        clusters
    }
}

/// A discovered scenario: its member attacks and the medoid signature that
/// represents it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioCluster {
    pub members: Vec<String>,
    pub reference: ZSignature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioClusters {
    pub clusters: Vec<ScenarioCluster>,
}

impl ScenarioClusters {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Index of the member with the highest summed similarity to all members
/// (self included — a constant shift that cannot move the argmax). Ties go
/// to the lowest index.
pub(crate) fn medoid_index(members: &[&ZSignature]) -> usize {
    let mut best_idx = 0usize;
    let mut best_total = f64::NEG_INFINITY;
    for (i, candidate) in members.iter().enumerate() {
        let total: f64 = members
            .iter()
            .map(|other| similarity_values(&candidate.z, &other.z).value)
            .sum();
        if total > best_total {
            best_total = total;
            best_idx = i;
        }
    }
    best_idx
}

/// The most typical member of a cluster: the medoid under angular
/// similarity.
pub fn derive_reference(members: &[ZSignature]) -> Result<ZSignature, ClusterError> {
    if members.is_empty() {
        return Err(ClusterError::EmptyCluster);
    }
    let refs: Vec<&ZSignature> = members.iter().collect();
    Ok(members[medoid_index(&refs)].clone())
}

/// Complete-linkage agglomerative clustering of attack signatures, cut at
/// distance `1 - tau`.
///
/// Deterministic for a given input order: among equally close pairs the one
/// with the lowest indices merges first. Every returned cluster satisfies
/// pairwise similarity `>= tau`.
pub fn hcluster(
    attacks: &[AttackSignature],
    tau: f64,
) -> Result<(Dendrogram, ScenarioClusters), ClusterError> {
    if attacks.is_empty() {
        return Err(ClusterError::EmptyInput);
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(ClusterError::InvalidTau(tau));
    }
    let order = &attacks[0].signature.motif_order;
    for a in attacks {
        if &a.signature.motif_order != order {
            return Err(ClusterError::OrderMismatch(
                a.cluster_id.clone(),
                a.signature.motif_order.clone(),
                order.clone(),
            ));
        }
    }

    let k = attacks.len();
    // Full square distance matrix; fine at the attack counts this handles
    // (thousands), and complete linkage updates stay branch-free.
    let mut dist = alloc::vec![0.0f64; k * k];
    for i in 0..k {
        for j in (i + 1)..k {
            let s = similarity_values(&attacks[i].signature.z, &attacks[j].signature.z).value;
            let d = 1.0 - s;
            dist[i * k + j] = d;
            dist[j * k + i] = d;
        }
    }

    let mut active: Vec<bool> = alloc::vec![true; k];
    let mut node_id: Vec<usize> = (0..k).collect();
    let mut size: Vec<usize> = alloc::vec![1; k];
    let mut merges: Vec<Merge> = Vec::with_capacity(k.saturating_sub(1));

    for step in 0..k.saturating_sub(1) {
        let mut best = f64::INFINITY;
        let mut pair = (0usize, 0usize);
        for i in 0..k {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..k {
                if active[j] && dist[i * k + j] < best {
                    best = dist[i * k + j];
                    pair = (i, j);
                }
            }
        }

        let (i, j) = pair;
        merges.push(Merge {
            left: node_id[i],
            right: node_id[j],
            distance: best,
            size: size[i] + size[j],
        });

        // Lance-Williams update for complete linkage: d(new, x) = max.
        for x in 0..k {
            if x != i && x != j && active[x] {
                let d = dist[j * k + x].max(dist[i * k + x]);
                dist[i * k + x] = d;
                dist[x * k + i] = d;
            }
        }
        active[j] = false;
        node_id[i] = k + step;
        size[i] += size[j];
    }

    debug_assert!(merges.windows(2).all(|w| w[0].distance <= w[1].distance));

    let dendrogram = Dendrogram {
        leaves: attacks.iter().map(|a| a.cluster_id.clone()).collect(),
        merges,
    };

    let cutoff = 1.0 - tau;
    let clusters = dendrogram
        .cut(cutoff)
        .into_iter()
        .map(|indices| {
            let sigs: Vec<&ZSignature> = indices.iter().map(|&i| &attacks[i].signature).collect();
            let medoid = indices[medoid_index(&sigs)];
            ScenarioCluster {
                members: indices
                    .iter()
                    .map(|&i| attacks[i].cluster_id.clone())
                    .collect(),
                reference: attacks[medoid].signature.clone(),
            }
        })
        .collect();

    Ok((dendrogram, ScenarioClusters { clusters }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::similarity;
    use alloc::vec;

    fn sig(head: &[f64]) -> ZSignature {
        let mut v = [0.0; 16];
        v[..head.len()].copy_from_slice(head);
        ZSignature::from_values(v)
    }

    fn attack(id: &str, head: &[f64]) -> AttackSignature {
        AttackSignature {
            cluster_id: id.into(),
            signature: sig(head),
        }
    }

    #[test]
    fn single_attack_single_cluster() {
        let (dendro, clusters) = hcluster(&[attack("only", &[1.0])], 0.8).unwrap();
        assert!(dendro.merges.is_empty());
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters.clusters[0].members, vec![String::from("only")]);
    }

    #[test]
    fn two_point_threshold_behavior() {
        let a = attack("a", &[1.0, 0.0]);
        let b = attack("b", &[1.0, 0.2]); // similarity just below 1
        let s = similarity(&a.signature, &b.signature).unwrap().value;
        let (_, merged) = hcluster(&[a.clone(), b.clone()], s).unwrap();
        assert_eq!(merged.len(), 1, "at tau == sim the pair merges");
        let (_, split) = hcluster(&[a, b], s + 1e-6).unwrap();
        assert_eq!(split.len(), 2, "just above sim the pair splits");
    }

    #[test]
    fn tau_zero_is_one_cluster_tau_one_requires_identity() {
        let attacks = vec![
            attack("a", &[1.0, 0.0]),
            attack("b", &[0.0, 1.0]),
            attack("c", &[1.0, 0.0]),
            attack("d", &[-1.0, 0.0]),
        ];
        let (_, all) = hcluster(&attacks, 0.0).unwrap();
        assert_eq!(all.len(), 1);
        let (_, identical) = hcluster(&attacks, 1.0).unwrap();
        // a and c share a direction; b and d stand alone.
        assert_eq!(identical.len(), 3);
        assert_eq!(
            identical.clusters[0].members,
            vec![String::from("a"), String::from("c")]
        );
    }

    #[test]
    fn every_cluster_is_pairwise_tau_similar() {
        let attacks: Vec<AttackSignature> = (0..12)
            .map(|i| {
                let angle = i as f64 * 0.35;
                attack(&alloc::format!("a{i}"), &[libm::cos(angle), libm::sin(angle)])
            })
            .collect();
        let tau = 0.8;
        let (dendro, clusters) = hcluster(&attacks, tau).unwrap();
        assert!(dendro
            .merges
            .windows(2)
            .all(|w| w[0].distance <= w[1].distance));
        for cluster in &clusters.clusters {
            let members: Vec<&AttackSignature> = cluster
                .members
                .iter()
                .map(|id| attacks.iter().find(|a| &a.cluster_id == id).unwrap())
                .collect();
            for x in 0..members.len() {
                for y in (x + 1)..members.len() {
                    let s = similarity(&members[x].signature, &members[y].signature)
                        .unwrap()
                        .value;
                    assert!(s >= tau, "{} vs {}: {s}", members[x].cluster_id, members[y].cluster_id);
                }
            }
        }
    }

    #[test]
    fn raising_tau_refines_the_partition() {
        let attacks: Vec<AttackSignature> = (0..10)
            .map(|i| {
                let angle = i as f64 * 0.4;
                attack(&alloc::format!("a{i}"), &[libm::cos(angle), libm::sin(angle)])
            })
            .collect();
        let (_, coarse) = hcluster(&attacks, 0.6).unwrap();
        let (_, fine) = hcluster(&attacks, 0.85).unwrap();
        // Every fine cluster sits inside exactly one coarse cluster.
        for f in &fine.clusters {
            let containing = coarse
                .clusters
                .iter()
                .filter(|c| f.members.iter().all(|m| c.members.contains(m)))
                .count();
            assert_eq!(containing, 1);
        }
    }

    #[test]
    fn medoid_of_majority() {
        let a = sig(&[1.0, 0.0]);
        let b = sig(&[0.0, 1.0]);
        let reference = derive_reference(&[a.clone(), a.clone(), b]).unwrap();
        assert_eq!(reference, a);
    }

    #[test]
    fn medoid_matches_exhaustive_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(42);
        for _ in 0..20 {
            let members: Vec<ZSignature> = (0..10)
                .map(|_| {
                    let mut v = [0.0; 16];
                    for x in v.iter_mut() {
                        *x = rng.gen_range(-3.0..3.0);
                    }
                    ZSignature::from_values(v)
                })
                .collect();

            // Exhaustive argmax over the full pairwise table.
            let mut best = (0usize, f64::NEG_INFINITY);
            for i in 0..members.len() {
                let total: f64 = members
                    .iter()
                    .map(|m| similarity(&members[i], m).unwrap().value)
                    .sum();
                if total > best.1 {
                    best = (i, total);
                }
            }

            assert_eq!(derive_reference(&members).unwrap(), members[best.0]);
        }
    }

    #[test]
    fn singleton_reference_is_itself() {
        let a = sig(&[0.3, 0.4]);
        assert_eq!(derive_reference(core::slice::from_ref(&a)).unwrap(), a);
    }

    #[test]
    fn empty_inputs_are_errors() {
        assert_eq!(hcluster(&[], 0.5).unwrap_err(), ClusterError::EmptyInput);
        assert_eq!(derive_reference(&[]).unwrap_err(), ClusterError::EmptyCluster);
    }
}
