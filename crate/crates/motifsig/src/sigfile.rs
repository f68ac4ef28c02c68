//! Signature files and the reference scenario database.
//!
//! Signatures travel as JSONL: one object per cluster with the 16 Z-scores,
//! the graph size it was computed from, the ensemble parameters, and the
//! motif-order tag (`triad-census-v1`). `label` and `hosts` are optional
//! extras carried through from labeled corpora; the supervised evaluation
//! needs them. The reference database is a JSON array of named signatures.

use std::io::{BufRead, BufReader, Read};

use motifsig_core::census::MOTIF_COUNT;
use motifsig_core::classify::{AttackSignature, ClassifyError, ReferenceSet};
use motifsig_core::signature::{Provenance, ZSignature, MOTIF_ORDER};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SigFileError {
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: motif order {found:?} is not {MOTIF_ORDER:?}")]
    WrongMotifOrder { line: u64, found: String },
    #[error("reference databases must be a JSON array: {0}")]
    BadReferenceDb(String),
    #[error("signature file is empty")]
    Empty,
    #[error("reference entry {0:?} has no usable name (missing label?)")]
    UnnamedReference(String),
    #[error(transparent)]
    References(#[from] ClassifyError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One signature-file line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureRecord {
    pub cluster_id: String,
    pub z: [f64; MOTIF_COUNT],
    /// Node count of the communication graph.
    pub n: u64,
    /// Edge count of the communication graph.
    pub m: u64,
    pub samples: u32,
    pub seed: u64,
    pub motif_order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hosts: Option<u64>,
}

impl SignatureRecord {
    pub fn new(
        cluster_id: impl Into<String>,
        signature: &ZSignature,
        label: Option<String>,
        hosts: Option<u64>,
    ) -> Self {
        SignatureRecord {
            cluster_id: cluster_id.into(),
            z: signature.z,
            n: signature.provenance.node_count,
            m: signature.provenance.edge_count,
            samples: signature.provenance.samples,
            seed: signature.provenance.seed,
            motif_order: signature.motif_order.clone(),
            label,
            hosts,
        }
    }

    pub fn signature(&self) -> ZSignature {
        ZSignature {
            z: self.z,
            provenance: Provenance {
                node_count: self.n,
                edge_count: self.m,
                samples: self.samples,
                seed: self.seed,
            },
            motif_order: self.motif_order.clone(),
        }
    }

    pub fn to_attack(&self) -> AttackSignature {
        AttackSignature {
            cluster_id: self.cluster_id.clone(),
            signature: self.signature(),
        }
    }
}

pub fn write_signatures(records: &[SignatureRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    for record in records {
        out.extend_from_slice(&serde_json::to_vec(record).expect("plain struct"));
        out.push(b'\n');
    }
    out
}

/// Reads a signature JSONL stream, rejecting unknown motif orders and
/// non-finite entries.
pub fn read_signatures<R: Read>(reader: R) -> Result<Vec<SignatureRecord>, SigFileError> {
    let mut records = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i as u64 + 1;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        let record: SignatureRecord =
            serde_json::from_str(&text).map_err(|e| SigFileError::Malformed {
                line: line_no,
                message: e.to_string(),
            })?;
        if record.motif_order != MOTIF_ORDER {
            return Err(SigFileError::WrongMotifOrder {
                line: line_no,
                found: record.motif_order,
            });
        }
        // JSON cannot carry NaN and serde_json rejects overflowing floats,
        // so every loaded z entry is finite.
        records.push(record);
    }
    Ok(records)
}

/// Signature body of a reference entry (a signature record minus identity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceBody {
    pub z: [f64; MOTIF_COUNT],
    pub n: u64,
    pub m: u64,
    pub samples: u32,
    pub seed: u64,
    pub motif_order: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRecord {
    pub name: String,
    pub signature: ReferenceBody,
}

impl ReferenceRecord {
    pub fn new(name: impl Into<String>, signature: &ZSignature) -> Self {
        ReferenceRecord {
            name: name.into(),
            signature: ReferenceBody {
                z: signature.z,
                n: signature.provenance.node_count,
                m: signature.provenance.edge_count,
                samples: signature.provenance.samples,
                seed: signature.provenance.seed,
                motif_order: signature.motif_order.clone(),
            },
        }
    }

    fn to_entry(&self) -> (String, ZSignature) {
        (
            self.name.clone(),
            ZSignature {
                z: self.signature.z,
                provenance: Provenance {
                    node_count: self.signature.n,
                    edge_count: self.signature.m,
                    samples: self.signature.samples,
                    seed: self.signature.seed,
                },
                motif_order: self.signature.motif_order.clone(),
            },
        )
    }
}

pub fn write_reference_db(records: &[ReferenceRecord]) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(records).expect("plain structs");
    out.push(b'\n');
    out
}

pub fn read_reference_db(bytes: &[u8]) -> Result<Vec<ReferenceRecord>, SigFileError> {
    serde_json::from_slice(bytes).map_err(|e| SigFileError::BadReferenceDb(e.to_string()))
}

/// Loads a reference set from either format: a JSON-array reference
/// database, or a labeled signature JSONL whose labels become the reference
/// names (the flow for references built from generated attacks).
pub fn load_reference_set(bytes: &[u8]) -> Result<ReferenceSet, SigFileError> {
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    let entries = if first == Some(&b'[') {
        read_reference_db(bytes)?
            .iter()
            .map(ReferenceRecord::to_entry)
            .collect()
    } else {
        let records = read_signatures(bytes)?;
        if records.is_empty() {
            return Err(SigFileError::Empty);
        }
        records
            .into_iter()
            .map(|r| match r.label {
                Some(ref name) => Ok((name.clone(), r.signature())),
                None => Err(SigFileError::UnnamedReference(r.cluster_id)),
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    Ok(ReferenceSet::new(entries)?)
}
