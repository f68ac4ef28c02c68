//! Triad census: counts of all 16 isomorphism classes of 3-node induced
//! subgraphs of a simple digraph, over every one of the C(n,3) node triples
//! (disconnected and empty triads included).
//!
//! Classes are indexed 0..=15 in the conventional census order
//! 003, 012, 102, 021D, 021U, 021C, 111D, 111U, 030T, 030C, 201, 120D,
//! 120U, 120C, 210, 300 — index 0 is the empty triad, index 15 the complete
//! one. Every signature produced by this crate implicitly embeds this order;
//! files tag it as `triad-census-v1`.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::graph::Digraph;

pub const MOTIF_COUNT: usize = 16;

/// Class labels in index order (M-A-N naming: mutual/asymmetric/null dyad
/// counts plus orientation).
pub const MOTIF_LABELS: [&str; MOTIF_COUNT] = [
    "003", "012", "102", "021D", "021U", "021C", "111D", "111U", "030T", "030C", "201", "120D",
    "120U", "120C", "210", "300",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("brute-force census refused: {0} nodes exceeds the {MAX_BRUTEFORCE_NODES}-node guard")]
    TooLarge(usize),
}

/// Raw census of one graph, together with the graph size it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotifCounts {
    pub counts: [u64; MOTIF_COUNT],
    pub node_count: u64,
    pub edge_count: u64,
}

impl MotifCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// C(n,3): the number of node triples, which every census must sum to.
    pub fn triple_count(node_count: u64) -> u64 {
        if node_count < 3 {
            0
        } else {
            let n = node_count as u128;
            (n * (n - 1) * (n - 2) / 6) as u64
        }
    }
}

/// Maps the 6-bit adjacency code of an ordered triple (v, u, w) to its class
/// index. Bit k set means: 0 `v->u`, 1 `u->v`, 2 `v->w`, 3 `w->v`,
/// 4 `u->w`, 5 `w->u`.
const CODE_CLASS: [u8; 64] = [
    0, 1, 1, 2, 1, 3, 5, 7, 1, 5, 4, 6, 2, 7, 6, 10, 1, 5, 3, 7, 4, 8, 8, 12, 5, 9, 8, 13, 6, 13,
    11, 14, 1, 4, 5, 6, 5, 8, 9, 13, 3, 8, 8, 11, 7, 12, 13, 14, 2, 6, 7, 10, 6, 11, 13, 14, 7,
    13, 12, 14, 10, 14, 14, 15,
];

fn tricode(g: &Digraph, v: u32, u: u32, w: u32) -> usize {
    let mut code = 0usize;
    if g.has_edge(v, u) {
        code |= 1;
    }
    if g.has_edge(u, v) {
        code |= 2;
    }
    if g.has_edge(v, w) {
        code |= 4;
    }
    if g.has_edge(w, v) {
        code |= 8;
    }
    if g.has_edge(u, w) {
        code |= 16;
    }
    if g.has_edge(w, u) {
        code |= 32;
    }
    code
}

/// Exact triad census via dyad-anchored enumeration.
///
/// Only triples containing at least one connected dyad are visited
/// explicitly; for each such dyad the third nodes that touch neither
/// endpoint are accounted for arithmetically, and the empty-triad count
/// falls out of the C(n,3) total. Runs in O(sum over edges (u,v) of
/// |N(u) ∪ N(v)|), which handles the hub-heavy attack graphs comfortably.
pub fn triad_census(g: &Digraph) -> MotifCounts {
    let n = g.node_count();
    let mut counts = [0u64; MOTIF_COUNT];

    // Epoch-stamped "seen" marks so the per-dyad scratch set clears in O(1).
    let mut stamp: Vec<u32> = vec![0; n];
    let mut epoch: u32 = 0;

    for v in 0..n as u32 {
        for &u in g.und_neighbors(v) {
            if u <= v {
                continue;
            }
            let dyad_class = if g.has_edge(v, u) && g.has_edge(u, v) {
                2 // 102
            } else {
                1 // 012
            };

            epoch += 1;
            stamp[v as usize] = epoch;
            stamp[u as usize] = epoch;
            let mut neighborhood = 0usize;

            for &w in g.und_neighbors(u).iter().chain(g.und_neighbors(v)) {
                if stamp[w as usize] == epoch {
                    continue;
                }
                stamp[w as usize] = epoch;
                neighborhood += 1;
                // Each connected triple must be counted for exactly one of
                // its dyads: the (v, u) pair with v minimal and u the
                // smallest co-visible partner.
                if u < w || (v < w && w < u && !g.connected(v, w)) {
                    counts[CODE_CLASS[tricode(g, v, u, w)] as usize] += 1;
                }
            }

            // Third nodes adjacent to neither v nor u leave the dyad bare.
            counts[dyad_class] += (n - neighborhood - 2) as u64;
        }
    }

    let connected: u64 = counts.iter().skip(1).sum();
    counts[0] = MotifCounts::triple_count(n as u64) - connected;

    MotifCounts {
        counts,
        node_count: n as u64,
        edge_count: g.edge_count() as u64,
    }
}

/// Node guard for [`census_bruteforce`].
pub const MAX_BRUTEFORCE_NODES: usize = 100;

/// Reference census by exhaustive triple enumeration.
///
/// Classifies each induced 3-node subgraph by canonicalizing its adjacency
/// code over all 6 node permutations and matching it against explicit
/// per-class representative graphs, sharing nothing with the lookup table
/// that drives [`triad_census`]. Quadratic-ish and deliberately slow; it
/// refuses graphs above [`MAX_BRUTEFORCE_NODES`] nodes.
pub fn census_bruteforce(g: &Digraph) -> Result<MotifCounts, CensusError> {
    let n = g.node_count();
    if n > MAX_BRUTEFORCE_NODES {
        return Err(CensusError::TooLarge(n));
    }

    // One representative edge set per class, on local nodes {0, 1, 2}.
    const REPRESENTATIVES: [&[(u8, u8)]; MOTIF_COUNT] = [
        &[],                                         // 003
        &[(0, 1)],                                   // 012
        &[(0, 1), (1, 0)],                           // 102
        &[(0, 1), (0, 2)],                           // 021D
        &[(1, 0), (2, 0)],                           // 021U
        &[(0, 1), (1, 2)],                           // 021C
        &[(0, 1), (1, 0), (2, 0)],                   // 111D
        &[(0, 1), (1, 0), (0, 2)],                   // 111U
        &[(0, 1), (0, 2), (1, 2)],                   // 030T
        &[(0, 1), (1, 2), (2, 0)],                   // 030C
        &[(0, 1), (1, 0), (0, 2), (2, 0)],           // 201
        &[(0, 1), (1, 0), (2, 0), (2, 1)],           // 120D
        &[(0, 1), (1, 0), (0, 2), (1, 2)],           // 120U
        &[(0, 1), (1, 0), (0, 2), (2, 1)],           // 120C
        &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2)],   // 210
        &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)], // 300
    ];

    const PERMUTATIONS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];

    // adj[a][b] -> bit position, for local nodes a != b.
    fn bit(a: usize, b: usize) -> usize {
        const POS: [[usize; 3]; 3] = [[9, 0, 2], [1, 9, 4], [3, 5, 9]];
        POS[a][b]
    }

    fn canonical(adj: [[bool; 3]; 3]) -> u8 {
        let mut best = u8::MAX;
        for perm in PERMUTATIONS {
            let mut code = 0u8;
            for a in 0..3 {
                for b in 0..3 {
                    if a != b && adj[perm[a]][perm[b]] {
                        code |= 1 << bit(a, b);
                    }
                }
            }
            best = best.min(code);
        }
        best
    }

    let mut class_of_canonical = [u8::MAX; 64];
    for (class, rep) in REPRESENTATIVES.iter().enumerate() {
        let mut adj = [[false; 3]; 3];
        for &(a, b) in *rep {
            adj[a as usize][b as usize] = true;
        }
        class_of_canonical[canonical(adj) as usize] = class as u8;
    }

    let mut counts = [0u64; MOTIF_COUNT];
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            for c in b + 1..n as u32 {
                let trio = [a, b, c];
                let mut adj = [[false; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        if i != j {
                            adj[i][j] = g.has_edge(trio[i], trio[j]);
                        }
                    }
                }
                let class = class_of_canonical[canonical(adj) as usize];
                debug_assert_ne!(class, u8::MAX, "unclassifiable triple code");
                counts[class as usize] += 1;
            }
        }
    }

    Ok(MotifCounts {
        counts,
        node_count: n as u64,
        edge_count: g.edge_count() as u64,
    })
}
