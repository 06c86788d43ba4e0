//! Splits a clustered network into its clustered subnetwork (induced on nodes
//! of non-singleton clusters) and the complementary edge set.

use rayon::prelude::*;

use crate::clustering::{ClusterId, Clustering};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, Edge, EdgeSet, NodeId};

/// Chunk size used when filtering edges in parallel.
const FILTER_CHUNK: usize = 1 << 16;

#[derive(Debug, Clone)]
pub struct SplitResult {
    /// Parent ids of the clustered nodes; sub-index `i` is `clustered_nodes[i]`.
    pub clustered_nodes: Vec<NodeId>,
    /// Clustered subnetwork over sub-indices.
    pub clustered: CsrGraph,
    /// Input clustering restricted to the clustered nodes, over sub-indices.
    pub clustered_clustering: Clustering,
    /// Every edge not in the clustered subnetwork, over the full node universe.
    pub singleton_edges: EdgeSet,
    /// Clustered nodes keep their cluster; each singleton gets a fresh id.
    pub singleton_clustering: Clustering,
}

impl SplitResult {
    /// Clustered subnetwork edges expressed in parent ids.
    pub fn clustered_edges_global(&self) -> EdgeSet {
        self.clustered
            .edges()
            .filter_map(|e| Edge::new(self.clustered_nodes[e.u()], self.clustered_nodes[e.v()]))
            .collect()
    }
}

pub fn split(g: &CsrGraph, c: &Clustering) -> Result<SplitResult> {
    if c.len() != g.n() {
        let missing = c.len().min(g.n());
        return Err(Error::MissingAssignment(missing.to_string()));
    }
    let n = g.n();
    let clustered_mask: Vec<bool> = (0..n).map(|v| c.is_clustered(v)).collect();
    let clustered_nodes: Vec<NodeId> = (0..n).filter(|&v| clustered_mask[v]).collect();
    let mut sub_index = vec![usize::MAX; n];
    for (i, &v) in clustered_nodes.iter().enumerate() {
        sub_index[v] = i;
    }

    // Tabular filter: an edge belongs to the clustered side iff both
    // endpoints are clustered.
    let all: Vec<Edge> = g.edges().collect();
    let parts: Vec<(Vec<Edge>, Vec<Edge>)> = all
        .par_chunks(FILTER_CHUNK)
        .map(|chunk| {
            let mut inner = Vec::new();
            let mut outer = Vec::new();
            for &e in chunk {
                if clustered_mask[e.u()] && clustered_mask[e.v()] {
                    inner.push(
                        Edge::new(sub_index[e.u()], sub_index[e.v()]).expect("distinct endpoints"),
                    );
                } else {
                    outer.push(e);
                }
            }
            (inner, outer)
        })
        .collect();

    let mut inner_edges = Vec::new();
    let mut singleton_edges = EdgeSet::new();
    for (inner, outer) in parts {
        inner_edges.extend(inner);
        singleton_edges.extend(outer);
    }
    let clustered = CsrGraph::from_edges(clustered_nodes.len(), &inner_edges)?;
    let clustered_clustering = Clustering::new(
        clustered_nodes
            .iter()
            .map(|&v| c.cluster_of(v))
            .collect(),
    );

    // Fresh singleton ids: max input id + 1-based rank among singletons.
    let base = c.max_id().map_or(0, |id| id.0);
    let mut rank = 0i64;
    let singleton_assignment = (0..n)
        .map(|v| {
            if clustered_mask[v] {
                c.cluster_of(v)
            } else {
                rank += 1;
                ClusterId(base + rank)
            }
        })
        .collect();

    Ok(SplitResult {
        clustered_nodes,
        clustered,
        clustered_clustering,
        singleton_edges,
        singleton_clustering: Clustering::new(singleton_assignment),
    })
}
