//! The cluster repair module.
//!
//! Takes the SBM-sampled clustered subnetwork and, cluster by cluster,
//! enforces the reference minimum degree, connects components, raises the
//! minimum cut to the reference value and finally matches degrees, either
//! per cluster or in one global pass afterwards.

pub mod matching;
pub mod stages;

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashSet};
use std::hash::BuildHasherDefault;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterId, Clustering};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, Edge, EdgeSet, NodeId};
use crate::stats::ClusterStats;

pub use matching::{deficits, heap_match, MatchOutcome, MatchTarget, DEFAULT_PARTNER_CAP};
pub use stages::{
    enforce_min_degree, match_degrees_per_cluster, min_degree_target, mincut_target,
    repair_mincut, stitch_components, StitchMode,
};

/// Which pipeline variant drives the repair module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Per-cluster min-degree, stitching and cut repair, then one global
    /// degree-matching pass that may add edges between clusters.
    ReccsPlus,
    /// Everything per cluster: combined stitching and min-degree, cut
    /// repair, then intra-cluster degree matching.
    ReccsPp,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::ReccsPlus => "reccs_plus",
            Variant::ReccsPp => "reccs_pp",
        })
    }
}

/// One cluster's mutable intra-cluster graph plus its repair targets.
///
/// Members are addressed by local index `0..size`; `members[i]` is the
/// node id in the enclosing graph.
#[derive(Debug, Clone)]
pub struct ClusterWorkItem {
    pub cluster: ClusterId,
    pub members: Vec<NodeId>,
    /// Reference minimum cut `k`.
    pub target_mincut: usize,
    /// Reference degree of each member.
    pub reference_degrees: Vec<usize>,
    /// Edges each member has to nodes outside the cluster.
    pub external_degrees: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    edges: HashSet<Edge, BuildHasherDefault<DefaultHasher>>,
    added: Vec<Edge>,
}

impl ClusterWorkItem {
    pub fn new(
        cluster: ClusterId,
        members: Vec<NodeId>,
        target_mincut: usize,
        reference_degrees: Vec<usize>,
        external_degrees: Vec<usize>,
        intra_edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let size = members.len();
        assert_eq!(reference_degrees.len(), size);
        assert_eq!(external_degrees.len(), size);
        let mut item = ClusterWorkItem {
            cluster,
            members,
            target_mincut,
            reference_degrees,
            external_degrees,
            adjacency: vec![Vec::new(); size],
            edges: HashSet::default(),
            added: Vec::new(),
        };
        for (a, b) in intra_edges {
            item.insert(a, b);
        }
        item
    }

    /// Cluster of `size` members with ids `0..size`, the given edges, no
    /// external edges and zero reference degrees.
    pub fn standalone(size: usize, target_mincut: usize, edges: &[(usize, usize)]) -> Self {
        Self::new(
            ClusterId(0),
            (0..size).collect(),
            target_mincut,
            vec![0; size],
            vec![0; size],
            edges.iter().copied(),
        )
    }

    pub fn with_reference_degrees(mut self, degrees: Vec<usize>) -> Self {
        assert_eq!(degrees.len(), self.size());
        self.reference_degrees = degrees;
        self
    }

    fn insert(&mut self, a: usize, b: usize) -> bool {
        let Some(e) = Edge::new(a, b) else {
            return false;
        };
        if !self.edges.insert(e) {
            return false;
        }
        self.adjacency[a].push(b);
        self.adjacency[b].push(a);
        true
    }

    /// Adds the intra-cluster edge `{a, b}` (local indices); returns whether
    /// it was new.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        let new = self.insert(a, b);
        if new {
            self.added.push(Edge::new(a, b).expect("checked by insert"));
        }
        new
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Intra-cluster degree.
    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Intra-cluster plus external degree.
    #[inline]
    pub fn total_degree(&self, v: usize) -> usize {
        self.adjacency[v].len() + self.external_degrees[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        Edge::new(a, b).is_some_and(|e| self.edges.contains(&e))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn to_csr(&self) -> CsrGraph {
        let mut edges: Vec<Edge> = self.edges.iter().copied().collect();
        edges.sort_unstable();
        CsrGraph::from_edges(self.size(), &edges).expect("local indices are in range")
    }

    /// Edges added since construction, in local indices and insertion order.
    pub fn added_local(&self) -> &[Edge] {
        &self.added
    }

    /// Edges added since construction, in enclosing-graph ids.
    pub fn added_global(&self) -> Vec<Edge> {
        self.added
            .iter()
            .map(|e| Edge::new(self.members[e.u()], self.members[e.v()]).expect("distinct members"))
            .collect()
    }
}

impl MatchTarget for ClusterWorkItem {
    fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.has_edge(a, b)
    }

    fn add(&mut self, a: NodeId, b: NodeId) {
        self.add_edge(a, b);
    }
}

/// Edges added by each stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub min_degree: usize,
    pub stitch: usize,
    pub stitch_and_min_degree: usize,
    pub mincut: usize,
    pub degree_match: usize,
}

impl StageCounts {
    pub fn total(&self) -> usize {
        self.min_degree + self.stitch + self.stitch_and_min_degree + self.mincut + self.degree_match
    }

    fn accumulate(&mut self, other: &StageCounts) {
        self.min_degree += other.min_degree;
        self.stitch += other.stitch;
        self.stitch_and_min_degree += other.stitch_and_min_degree;
        self.mincut += other.mincut;
        self.degree_match += other.degree_match;
    }
}

/// Structural stages in faithful order: min-degree, stitching, cut repair.
pub fn process_cluster_plus(item: &mut ClusterWorkItem, size_limit: usize) -> Result<StageCounts> {
    let min_degree = enforce_min_degree(item);
    let stitch = stitch_components(item, StitchMode::Standalone);
    let mincut = repair_mincut(item, size_limit)?;
    Ok(StageCounts {
        min_degree,
        stitch,
        mincut,
        ..StageCounts::default()
    })
}

/// All per-cluster stages: combined stitching and min-degree, cut repair,
/// then intra-cluster degree matching.
pub fn process_cluster_pp(
    item: &mut ClusterWorkItem,
    size_limit: usize,
    partner_cap: usize,
) -> Result<(StageCounts, MatchOutcome)> {
    let stitch_and_min_degree = stitch_components(item, StitchMode::Combined);
    let mincut = repair_mincut(item, size_limit)?;
    let matched = match_degrees_per_cluster(item, partner_cap);
    Ok((
        StageCounts {
            stitch_and_min_degree,
            mincut,
            degree_match: matched.added,
            ..StageCounts::default()
        },
        matched,
    ))
}

/// Degree matching over the whole clustered graph; edges may join any two
/// deficient nodes, including across clusters.
pub fn match_degrees_global(
    edges: &mut EdgeSet,
    reference: &[usize],
    partner_cap: usize,
) -> MatchOutcome {
    let mut current = vec![0usize; reference.len()];
    for e in edges.iter() {
        current[e.u()] += 1;
        current[e.v()] += 1;
    }
    let mut deficit = deficits(reference, &current);
    let nodes: Vec<NodeId> = (0..reference.len()).collect();
    heap_match(edges, &nodes, &mut deficit, partner_cap)
}

/// Settings for [`run_module`].
#[derive(Debug, Clone, Copy)]
pub struct ModuleConfig {
    pub variant: Variant,
    pub partner_cap: usize,
    pub size_limit: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterReport {
    pub cluster: ClusterId,
    pub size: usize,
    pub target_mincut: usize,
    pub added: StageCounts,
}

#[derive(Debug, Clone)]
pub struct ModuleOutput {
    /// Repaired clustered graph: the input edges plus every addition.
    pub edges: EdgeSet,
    pub clusters: Vec<ClusterReport>,
    pub totals: StageCounts,
    /// `(node, deficit)` left unmatched at the end.
    pub residual: Vec<(NodeId, usize)>,
}

/// Runs the repair module over every cluster of `clustering` on `sampled`.
///
/// `reference_degrees` are degrees in the reference clustered subnetwork,
/// indexed like `sampled`. Per-cluster work runs on the ambient rayon pool;
/// the output depends only on the inputs, never on the pool width.
pub fn run_module(
    sampled: &EdgeSet,
    clustering: &Clustering,
    stats: &BTreeMap<ClusterId, ClusterStats>,
    reference_degrees: &[usize],
    cfg: &ModuleConfig,
) -> Result<ModuleOutput> {
    let n = clustering.len();
    let graph = CsrGraph::from_edge_set(n, sampled)?;
    let mut local_index = vec![0usize; n];
    for members in clustering.clusters().values() {
        for (i, &v) in members.iter().enumerate() {
            local_index[v] = i;
        }
    }

    let clusters: Vec<(ClusterId, &[NodeId])> = clustering.non_singleton_clusters().collect();
    type Repaired = (ClusterReport, Vec<Edge>, Vec<(NodeId, usize)>);
    let results: Vec<Repaired> = clusters
        .par_iter()
        .map(|&(cluster, members)| {
            let target = stats
                .get(&cluster)
                .ok_or(Error::MissingStats(cluster))?
                .mincut;
            let mut intra = Vec::new();
            let mut external = vec![0usize; members.len()];
            for (i, &v) in members.iter().enumerate() {
                for &w in graph.neighbors(v) {
                    if clustering.cluster_of(w) != cluster {
                        external[i] += 1;
                    } else if v < w {
                        intra.push((i, local_index[w]));
                    }
                }
            }
            let refs = members.iter().map(|&v| reference_degrees[v]).collect();
            let mut item =
                ClusterWorkItem::new(cluster, members.to_vec(), target, refs, external, intra);
            let (added, residual) = match cfg.variant {
                Variant::ReccsPlus => (process_cluster_plus(&mut item, cfg.size_limit)?, Vec::new()),
                Variant::ReccsPp => {
                    let (counts, matched) =
                        process_cluster_pp(&mut item, cfg.size_limit, cfg.partner_cap)?;
                    (counts, matched.residual)
                }
            };
            let report = ClusterReport {
                cluster,
                size: members.len(),
                target_mincut: target,
                added,
            };
            Ok((report, item.added_global(), residual))
        })
        .collect::<Result<_>>()?;

    let mut edges = sampled.clone();
    let mut totals = StageCounts::default();
    let mut reports = Vec::with_capacity(results.len());
    let mut residual = Vec::new();
    for (report, added, res) in results {
        totals.accumulate(&report.added);
        edges.extend(added);
        residual.extend(res);
        reports.push(report);
    }

    if cfg.variant == Variant::ReccsPlus {
        let matched = match_degrees_global(&mut edges, reference_degrees, cfg.partner_cap);
        totals.degree_match = matched.added;
        residual = matched.residual;
    }
    residual.sort_unstable();

    Ok(ModuleOutput {
        edges,
        clusters: reports,
        totals,
        residual,
    })
}
