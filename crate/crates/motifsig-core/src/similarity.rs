//! Angular similarity between Z-score signatures.
//!
//! Signatures are compared by direction, not magnitude: the attack size
//! still leaks into Z-score magnitudes, so the angle between the two
//! 16-vectors is what carries the scenario. `sim = 1 - angle/pi` maps equal
//! directions to 1, orthogonal ones to 0.5 and opposite ones to 0.

use thiserror::Error;

use crate::census::MOTIF_COUNT;
use crate::signature::ZSignature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimilarityError {
    #[error("signatures use different motif orders ({a:?} vs {b:?})")]
    OrderMismatch {
        a: alloc::string::String,
        b: alloc::string::String,
    },
}

/// Similarity in `[0, 1]` together with the underlying angle in `[0, pi]`.
/// `value == 1 - angle_rad / pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityScore {
    pub value: f64,
    pub angle_rad: f64,
}

/// Angular similarity of two raw 16-vectors.
///
/// The cosine is clamped to `[-1, 1]` before `acos` to absorb floating-point
/// drift. Two zero vectors count as identical (two statistically
/// unremarkable graphs are maximally alike); a zero vector against anything
/// else scores 0.
pub fn similarity_values(a: &[f64; MOTIF_COUNT], b: &[f64; MOTIF_COUNT]) -> SimilarityScore {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for i in 0..MOTIF_COUNT {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }

    if na == 0.0 && nb == 0.0 {
        return SimilarityScore {
            value: 1.0,
            angle_rad: 0.0,
        };
    }
    if na == 0.0 || nb == 0.0 {
        return SimilarityScore {
            value: 0.0,
            angle_rad: core::f64::consts::PI,
        };
    }

    let cos = (dot / (libm::sqrt(na) * libm::sqrt(nb))).clamp(-1.0, 1.0);
    let angle = libm::acos(cos);
    SimilarityScore {
        value: 1.0 - angle / core::f64::consts::PI,
        angle_rad: angle,
    }
}

/// Angular similarity of two signatures. Fails if they do not share a motif
/// order (i.e. were produced under different class indexings).
pub fn similarity(a: &ZSignature, b: &ZSignature) -> Result<SimilarityScore, SimilarityError> {
    if a.motif_order != b.motif_order {
        return Err(SimilarityError::OrderMismatch {
            a: a.motif_order.clone(),
            b: b.motif_order.clone(),
        });
    }
    Ok(similarity_values(&a.z, &b.z))
}
