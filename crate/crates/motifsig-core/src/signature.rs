//! Z-score motif signatures.
//!
//! The Z-score of class `i` is `(observed[i] - mean[i]) / sd[i]` against the
//! random ensemble: how over- or under-represented the motif is compared to
//! size-matched random graphs. The 16-vector of Z-scores is the fixed-size
//! fingerprint everything downstream works with.

use alloc::string::{String, ToString};
use thiserror::Error;

use crate::census::{triad_census, MotifCounts, MOTIF_COUNT};
use crate::ensemble::{random_ensemble, EnsembleError, EnsembleStats};
use crate::graph::Digraph;

/// Tag identifying the class indexing of signature vectors in files.
pub const MOTIF_ORDER: &str = "triad-census-v1";

/// Ensemble sd below this is treated as exactly zero.
const SD_FLOOR: f64 = 1e-12;
/// Count-vs-mean differences below this (with zero sd) score zero.
const MATCH_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignatureError {
    #[error(
        "census is for a graph with {observed_nodes} nodes / {observed_edges} edges \
         but the ensemble was drawn for {ensemble_nodes} / {ensemble_edges}"
    )]
    ShapeMismatch {
        observed_nodes: u64,
        observed_edges: u64,
        ensemble_nodes: u64,
        ensemble_edges: u64,
    },
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

/// How a signature was produced: graph size plus ensemble parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub node_count: u64,
    pub edge_count: u64,
    pub samples: u32,
    pub seed: u64,
}

/// A Z-score motif signature. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ZSignature {
    pub z: [f64; MOTIF_COUNT],
    pub provenance: Provenance,
    pub motif_order: String,
}

impl ZSignature {
    /// Wraps a raw vector with empty provenance, under the default motif
    /// order. Mostly useful in tests and when loading foreign vectors.
    pub fn from_values(z: [f64; MOTIF_COUNT]) -> Self {
        ZSignature {
            z,
            provenance: Provenance {
                node_count: 0,
                edge_count: 0,
                samples: 0,
                seed: 0,
            },
            motif_order: MOTIF_ORDER.to_string(),
        }
    }
}

/// Z-scores an observed census against ensemble statistics.
///
/// Degenerate classes where the ensemble never varies (`sd == 0`) score 0
/// when the observation matches the ensemble mean and fall back to the raw
/// difference otherwise (sd floored to 1), which keeps every entry finite
/// while preserving the over/under-representation sign.
pub fn z_signature(
    observed: &MotifCounts,
    ensemble: &EnsembleStats,
) -> Result<ZSignature, SignatureError> {
    if observed.node_count != ensemble.node_count || observed.edge_count != ensemble.edge_count {
        return Err(SignatureError::ShapeMismatch {
            observed_nodes: observed.node_count,
            observed_edges: observed.edge_count,
            ensemble_nodes: ensemble.node_count,
            ensemble_edges: ensemble.edge_count,
        });
    }

    let mut z = [0.0; MOTIF_COUNT];
    for (i, entry) in z.iter_mut().enumerate() {
        let diff = observed.counts[i] as f64 - ensemble.mean[i];
        *entry = if ensemble.sd[i] < SD_FLOOR {
            if libm::fabs(diff) < MATCH_EPS {
                0.0
            } else {
                diff
            }
        } else {
            diff / ensemble.sd[i]
        };
    }

    Ok(ZSignature {
        z,
        provenance: Provenance {
            node_count: observed.node_count,
            edge_count: observed.edge_count,
            samples: ensemble.samples,
            seed: ensemble.seed,
        },
        motif_order: MOTIF_ORDER.to_string(),
    })
}

/// Full signing pipeline for one graph: census, size-matched ensemble,
/// Z-score.
pub fn sign_digraph(g: &Digraph, samples: u32, seed: u64) -> Result<ZSignature, SignatureError> {
    let counts = triad_census(g);
    let ensemble = random_ensemble(g.node_count(), g.edge_count(), samples, seed)?;
    Ok(z_signature(&counts, &ensemble).expect("census and ensemble share n and m"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(mean: [f64; 16], sd: [f64; 16]) -> EnsembleStats {
        EnsembleStats {
            node_count: 10,
            edge_count: 5,
            mean,
            sd,
            samples: 100,
            seed: 7,
        }
    }

    fn counts(values: [u64; 16]) -> MotifCounts {
        MotifCounts {
            counts: values,
            node_count: 10,
            edge_count: 5,
        }
    }

    #[test]
    fn observation_equal_to_mean_is_zero_vector() {
        let mut mean = [0.0; 16];
        mean[0] = 100.0;
        mean[1] = 20.0;
        let mut observed = [0u64; 16];
        observed[0] = 100;
        observed[1] = 20;
        let sig = z_signature(&counts(observed), &stats(mean, [1.0; 16])).unwrap();
        assert_eq!(sig.z, [0.0; 16]);
    }

    #[test]
    fn degenerate_sd_keeps_scores_finite() {
        let mut mean = [0.0; 16];
        mean[3] = 4.0;
        let mut observed = [0u64; 16];
        observed[3] = 4; // matches mean, sd 0 -> 0
        observed[5] = 7; // differs from mean 0, sd 0 -> raw difference
        let sig = z_signature(&counts(observed), &stats(mean, [0.0; 16])).unwrap();
        assert_eq!(sig.z[3], 0.0);
        assert_eq!(sig.z[5], 7.0);
        assert!(sig.z.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn translation_scales_by_inverse_sd() {
        let mean = [10.0; 16];
        let sd = [2.5; 16];
        let mut a = [10u64; 16];
        let mut b = a;
        b[4] += 5;
        a[4] += 0;
        let za = z_signature(&counts(a), &stats(mean, sd)).unwrap();
        let zb = z_signature(&counts(b), &stats(mean, sd)).unwrap();
        assert!((zb.z[4] - za.z[4] - 5.0 / 2.5).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let ens = EnsembleStats {
            node_count: 11,
            edge_count: 5,
            mean: [0.0; 16],
            sd: [1.0; 16],
            samples: 10,
            seed: 0,
        };
        assert!(matches!(
            z_signature(&counts([0; 16]), &ens),
            Err(SignatureError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn provenance_records_the_run() {
        let g = Digraph::from_edges(5, [(0, 1), (1, 2), (2, 3)]);
        let sig = sign_digraph(&g, 25, 99).unwrap();
        assert_eq!(sig.provenance.node_count, 5);
        assert_eq!(sig.provenance.edge_count, 3);
        assert_eq!(sig.provenance.samples, 25);
        assert_eq!(sig.provenance.seed, 99);
        assert_eq!(sig.motif_order, MOTIF_ORDER);
        assert!(sig.z.iter().all(|v| v.is_finite()));
    }
}
