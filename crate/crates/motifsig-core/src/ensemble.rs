//! Random-graph ensembles for census normalization.
//!
//! A raw census depends on graph size, so it is compared against uniform
//! random simple digraphs with exactly the same node and edge counts. The
//! ensemble statistics (per-class mean and population standard deviation)
//! feed the Z-score in [`crate::signature`].

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::census::{triad_census, MOTIF_COUNT};
use crate::graph::Digraph;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnsembleError {
    #[error("{edges} edges do not fit a {nodes}-node simple digraph (max {max})")]
    TooManyEdges { nodes: usize, edges: usize, max: usize },
    #[error("ensemble needs at least 2 samples, got {0}")]
    TooFewSamples(u32),
}

/// Per-class census statistics over an ensemble of random digraphs.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub node_count: u64,
    pub edge_count: u64,
    pub mean: [f64; MOTIF_COUNT],
    /// Population standard deviation (divide by the sample count).
    pub sd: [f64; MOTIF_COUNT],
    pub samples: u32,
    pub seed: u64,
}

/// Draws one uniform simple digraph with exactly `nodes` nodes and `edges`
/// edges: a uniform `edges`-subset of the `nodes * (nodes - 1)` ordered
/// pairs, via Floyd's sampling algorithm.
pub fn sample_digraph(nodes: usize, edges: usize, rng: &mut impl Rng) -> Digraph {
    let total = nodes as u64 * (nodes as u64 - 1);
    debug_assert!(edges as u64 <= total);

    let mut picked: BTreeSet<u64> = BTreeSet::new();
    for j in (total - edges as u64)..total {
        let t = rng.gen_range(0..=j);
        if !picked.insert(t) {
            picked.insert(j);
        }
    }

    let edge_iter = picked.iter().map(|&k| {
        let i = (k / (nodes as u64 - 1)) as u32;
        let r = (k % (nodes as u64 - 1)) as u32;
        let j = if r < i { r } else { r + 1 };
        (i, j)
    });
    Digraph::from_edges(nodes, edge_iter)
}

/// Census statistics of `samples` uniform G(n, m) digraphs.
///
/// Each sample runs on its own RNG stream derived from `seed` and the sample
/// index, so the result is reproducible bit-for-bit and independent of
/// evaluation order.
pub fn random_ensemble(
    nodes: usize,
    edges: usize,
    samples: u32,
    seed: u64,
) -> Result<EnsembleStats, EnsembleError> {
    let max = nodes.saturating_mul(nodes.saturating_sub(1));
    if edges > max {
        return Err(EnsembleError::TooManyEdges { nodes, edges, max });
    }
    if samples < 2 {
        return Err(EnsembleError::TooFewSamples(samples));
    }

    let mut all_counts: Vec<[u64; MOTIF_COUNT]> = Vec::with_capacity(samples as usize);
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, i as u64));
        let g = sample_digraph(nodes, edges, &mut rng);
        all_counts.push(triad_census(&g).counts);
    }

    let inv = 1.0 / samples as f64;
    let mut mean = [0.0; MOTIF_COUNT];
    let mut sd = [0.0; MOTIF_COUNT];
    for k in 0..MOTIF_COUNT {
        let sum: f64 = all_counts.iter().map(|c| c[k] as f64).sum();
        mean[k] = sum * inv;
        let var: f64 = all_counts
            .iter()
            .map(|c| {
                let d = c[k] as f64 - mean[k];
                d * d
            })
            .sum::<f64>()
            * inv;
        sd[k] = libm::sqrt(var);
    }

    Ok(EnsembleStats {
        node_count: nodes as u64,
        edge_count: edges as u64,
        mean,
        sd,
        samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::MotifCounts;
    use rand::rngs::StdRng;

    #[test]
    fn edgeless_graphs_are_unique() {
        let stats = random_ensemble(10, 0, 5, 1).unwrap();
        assert_eq!(stats.mean[0], MotifCounts::triple_count(10) as f64);
        assert!(stats.mean[1..].iter().all(|&m| m == 0.0));
        assert!(stats.sd.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn complete_graph_is_unique() {
        let stats = random_ensemble(4, 12, 5, 1).unwrap();
        assert_eq!(stats.mean[15], 4.0);
        assert!(stats.sd.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn single_edge_graphs_all_isomorphic() {
        let stats = random_ensemble(3, 1, 50, 9).unwrap();
        assert_eq!(stats.mean[1], 1.0);
        assert!(stats.sd.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let a = random_ensemble(30, 60, 200, 1234).unwrap();
        let b = random_ensemble(30, 60, 200, 1234).unwrap();
        assert_eq!(a, b);
        let c = random_ensemble(30, 60, 200, 1235).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_impossible_edge_count() {
        assert!(matches!(
            random_ensemble(4, 13, 10, 0),
            Err(EnsembleError::TooManyEdges { .. })
        ));
        assert!(matches!(
            random_ensemble(10, 5, 1, 0),
            Err(EnsembleError::TooFewSamples(1))
        ));
    }

    #[test]
    fn sampled_graphs_have_exact_edge_count() {
        use rand::SeedableRng;
        let mut rng = StdRng::seed_from_u64(7);
        for &(n, m) in &[(5, 0), (5, 20), (12, 40), (30, 1)] {
            let g = sample_digraph(n, m, &mut rng);
            assert_eq!(g.node_count(), n);
            assert_eq!(g.edge_count(), m);
        }
    }
}
