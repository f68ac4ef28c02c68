//! Communication structure graphs.
//!
//! Each alert `S:T -> D:L` contributes four nodes — hosts `S` and `D`, plus
//! the host-bound ports `S:T` and `D:L` — and the three directed edges
//! `S -> S:T`, `S:T -> D:L`, `D:L -> D`. Binding ports to hosts in the node
//! id keeps "port 80 on S" and "port 80 on D" distinct, and the edge chain
//! records who attacked whom over which service.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::alert::AlertCluster;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("cannot build a graph from an empty cluster")]
    EmptyCluster,
}

/// A simple directed graph over integer node ids, stored as sorted adjacency
/// lists. No self-loops, no duplicate edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    out_adj: Vec<Vec<u32>>,
    in_adj: Vec<Vec<u32>>,
    und_adj: Vec<Vec<u32>>,
    edge_count: usize,
}

impl Digraph {
    /// Builds from an edge list. Self-loops and duplicates are discarded.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut out_adj = alloc::vec![Vec::new(); node_count];
        let mut in_adj = alloc::vec![Vec::new(); node_count];
        for (a, b) in edges {
            if a != b {
                out_adj[a as usize].push(b);
                in_adj[b as usize].push(a);
            }
        }
        let mut edge_count = 0;
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        let mut und_adj = Vec::with_capacity(node_count);
        for v in 0..node_count {
            edge_count += out_adj[v].len();
            // Sorted merge of out- and in-neighbors.
            let mut und = Vec::with_capacity(out_adj[v].len() + in_adj[v].len());
            und.extend_from_slice(&out_adj[v]);
            und.extend_from_slice(&in_adj[v]);
            und.sort_unstable();
            und.dedup();
            und_adj.push(und);
        }
        Digraph {
            out_adj,
            in_adj,
            und_adj,
            edge_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, from: u32, to: u32) -> bool {
        self.out_adj[from as usize].binary_search(&to).is_ok()
    }

    /// Adjacent in either direction.
    pub fn connected(&self, a: u32, b: u32) -> bool {
        self.und_adj[a as usize].binary_search(&b).is_ok()
    }

    pub fn out_neighbors(&self, v: u32) -> &[u32] {
        &self.out_adj[v as usize]
    }

    pub fn in_neighbors(&self, v: u32) -> &[u32] {
        &self.in_adj[v as usize]
    }

    pub fn und_neighbors(&self, v: u32) -> &[u32] {
        &self.und_adj[v as usize]
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(v, outs)| outs.iter().map(move |&w| (v as u32, w)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Host,
    HostPort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub host_count: usize,
    pub port_node_count: usize,
}

/// The communication structure graph of one alert cluster.
///
/// Node and edge sets carry no multiplicity: adding the same alert twice
/// changes nothing. Nodes are indexed in lexicographic id order, so any
/// permutation of the input alerts produces an identical value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommGraph {
    node_ids: Vec<String>,
    kinds: Vec<NodeKind>,
    digraph: Digraph,
    dropped_self_loops: usize,
}

/// Builds the communication structure graph for a cluster.
///
/// An alert with identical source and destination endpoint (`S == D` and
/// `T == L`) would produce the self-loop `S:T -> S:T`; that edge is dropped
/// (nodes kept) and counted in [`CommGraph::dropped_self_loops`], since the
/// triad census is defined on simple digraphs.
pub fn build_graph(cluster: &AlertCluster) -> Result<CommGraph, GraphError> {
    if cluster.alerts().is_empty() {
        return Err(GraphError::EmptyCluster);
    }

    let mut nodes: BTreeSet<String> = BTreeSet::new();
    let mut edges: BTreeSet<(String, String)> = BTreeSet::new();
    let mut dropped_self_loops = 0usize;

    for alert in cluster.alerts() {
        let src_host = String::from(alert.src_ip());
        let dst_host = String::from(alert.dst_ip());
        let src_port = format!("{}:{}", alert.src_ip(), alert.src_port());
        let dst_port = format!("{}:{}", alert.dst_ip(), alert.dst_port());

        if src_port == dst_port {
            dropped_self_loops += 1;
            nodes.insert(src_host.clone());
            edges.insert((src_host.clone(), src_port.clone()));
            edges.insert((src_port.clone(), src_host));
            nodes.insert(src_port);
            continue;
        }

        edges.insert((src_host.clone(), src_port.clone()));
        edges.insert((src_port.clone(), dst_port.clone()));
        edges.insert((dst_port.clone(), dst_host.clone()));
        nodes.insert(src_host);
        nodes.insert(dst_host);
        nodes.insert(src_port);
        nodes.insert(dst_port);
    }

    let node_ids: Vec<String> = nodes.into_iter().collect();
    let index: BTreeMap<&str, u32> = node_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i as u32))
        .collect();
    let kinds: Vec<NodeKind> = node_ids
        .iter()
        .map(|id| {
            if id.contains(':') {
                NodeKind::HostPort
            } else {
                NodeKind::Host
            }
        })
        .collect();
    let digraph = Digraph::from_edges(
        node_ids.len(),
        edges.iter().map(|(a, b)| (index[a.as_str()], index[b.as_str()])),
    );

    Ok(CommGraph {
        node_ids,
        kinds,
        digraph,
        dropped_self_loops,
    })
}

impl CommGraph {
    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    /// Canonical node ids, index-aligned with the digraph.
    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    pub fn node_kind(&self, v: u32) -> NodeKind {
        self.kinds[v as usize]
    }

    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    pub fn stats(&self) -> GraphStats {
        let host_count = self.kinds.iter().filter(|k| **k == NodeKind::Host).count();
        GraphStats {
            node_count: self.node_ids.len(),
            edge_count: self.digraph.edge_count(),
            host_count,
            port_node_count: self.node_ids.len() - host_count,
        }
    }

    /// Debug export: one `src<TAB>dst` line per edge, in canonical order.
    pub fn edge_list_text(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.digraph.edges() {
            out.push_str(&self.node_ids[a as usize]);
            out.push('\t');
            out.push_str(&self.node_ids[b as usize]);
            out.push('\n');
        }
        out
    }
}
