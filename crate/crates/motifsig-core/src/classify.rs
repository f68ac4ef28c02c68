//! Reference-based scenario classification.
//!
//! Each attack signature is assigned the reference scenario it is most
//! similar to, provided that best similarity reaches the threshold `tau`;
//! otherwise it stays unmatched and is a candidate for unsupervised
//! clustering.

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::signature::ZSignature;
use crate::similarity::similarity_values;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("reference set is empty")]
    EmptyReferences,
    #[error("duplicate reference name {0:?}")]
    DuplicateReferenceName(String),
    #[error("reference {0:?} uses motif order {1:?}, expected {2:?}")]
    ReferenceOrderMismatch(String, String, String),
    #[error("attack {0:?} uses motif order {1:?}, expected {2:?}")]
    AttackOrderMismatch(String, String, String),
    #[error("tau must be within [0, 1], got {0}")]
    InvalidTau(f64),
}

/// A signature tied to the attack (alert cluster) it fingerprints.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackSignature {
    pub cluster_id: String,
    pub signature: ZSignature,
}

/// Named reference scenario signatures, in priority order (ties in
/// classification go to the earliest entry).
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet {
    entries: Vec<(String, ZSignature)>,
}

impl ReferenceSet {
    /// Names must be unique and all signatures must share one motif order.
    pub fn new(entries: Vec<(String, ZSignature)>) -> Result<Self, ClassifyError> {
        if entries.is_empty() {
            return Err(ClassifyError::EmptyReferences);
        }
        let order = &entries[0].1.motif_order;
        for (name, sig) in &entries {
            if &sig.motif_order != order {
                return Err(ClassifyError::ReferenceOrderMismatch(
                    name.clone(),
                    sig.motif_order.clone(),
                    order.clone(),
                ));
            }
        }
        for (i, (name, _)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(n, _)| n == name) {
                return Err(ClassifyError::DuplicateReferenceName(name.clone()));
            }
        }
        Ok(ReferenceSet { entries })
    }

    pub fn entries(&self) -> &[(String, ZSignature)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    fn motif_order(&self) -> &str {
        &self.entries[0].1.motif_order
    }
}

/// One classification outcome. `label` is `None` when no reference reached
/// `tau`; `best_similarity` is the similarity to the winning (or, when
/// unmatched, the closest) reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub cluster_id: String,
    pub label: Option<String>,
    pub best_similarity: f64,
}

/// Assigns each attack to its most similar reference scenario, subject to
/// the minimum similarity `tau`. Ties go to the earliest reference.
pub fn classify(
    attacks: &[AttackSignature],
    refs: &ReferenceSet,
    tau: f64,
) -> Result<Vec<Assignment>, ClassifyError> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(ClassifyError::InvalidTau(tau));
    }
    let order = refs.motif_order();
    for attack in attacks {
        if attack.signature.motif_order != order {
            return Err(ClassifyError::AttackOrderMismatch(
                attack.cluster_id.clone(),
                attack.signature.motif_order.clone(),
                String::from(order),
            ));
        }
    }

    let mut out = Vec::with_capacity(attacks.len());
    for attack in attacks {
        let mut best_idx = 0usize;
        let mut best = f64::NEG_INFINITY;
        for (i, (_, reference)) in refs.entries().iter().enumerate() {
            let s = similarity_values(&attack.signature.z, &reference.z).value;
            if s > best {
                best = s;
                best_idx = i;
            }
        }
        let label = if best >= tau {
            Some(refs.entries()[best_idx].0.clone())
        } else {
            None
        };
        out.push(Assignment {
            cluster_id: attack.cluster_id.clone(),
            label,
            best_similarity: best,
        });
    }
    Ok(out)
}
