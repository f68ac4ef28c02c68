//! Fixed-size motif fingerprints for clusters of IDS alerts.
//!
//! An attack that produced a cluster of alerts is abstracted in four steps:
//!
//! 1. [`graph::build_graph`] turns the cluster into a directed
//!    *communication structure graph* over host and host:port nodes.
//! 2. [`census::triad_census`] counts all 16 isomorphism classes of 3-node
//!    induced subgraphs (triads) of that graph.
//! 3. [`signature::z_signature`] normalizes the census against an ensemble of
//!    random digraphs of identical size ([`ensemble::random_ensemble`]),
//!    yielding a 16-dimensional Z-score signature that no longer depends on
//!    attack size, addresses, or ports.
//! 4. [`similarity::similarity`] compares two signatures by the angle between
//!    them, mapped to `[0, 1]`.
//!
//! On top of the fingerprints, [`classify`] assigns attacks to named
//! reference scenarios, [`cluster`] groups attacks into scenarios without
//! references (complete-linkage hierarchical clustering) and derives medoid
//! reference signatures, and [`metrics`] scores both against ground truth.
//! [`generate`] produces labeled synthetic attack clusters for six scenario
//! kinds (DDoS, scan, distributed scan, worm, exploration, convergence).
//!
//! The crate is `no_std` (with `alloc`); all functions are pure and
//! deterministic given their explicit seeds, and all public types are
//! immutable once built, so they can be shared freely across threads.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod alert;
pub mod census;
pub mod classify;
pub mod cluster;
pub mod ensemble;
pub mod generate;
pub mod graph;
pub mod metrics;
pub mod seed;
pub mod signature;
pub mod similarity;

pub use alert::{Alert, AlertCluster};
pub use census::{census_bruteforce, triad_census, MotifCounts, MOTIF_COUNT, MOTIF_LABELS};
pub use classify::{classify, Assignment, AttackSignature, ReferenceSet};
pub use cluster::{derive_reference, hcluster, Dendrogram, Merge, ScenarioCluster, ScenarioClusters};
pub use ensemble::{random_ensemble, EnsembleStats};
pub use generate::{generate, generate_corpus, CorpusSpec, ScenarioKind, ScenarioParams};
pub use graph::{build_graph, CommGraph, Digraph, GraphStats, NodeKind};
pub use metrics::{class_similarities, eval_overlap, eval_supervised, tau_window};
pub use signature::{sign_digraph, z_signature, Provenance, ZSignature, MOTIF_ORDER};
pub use similarity::{similarity, similarity_values, SimilarityScore};
