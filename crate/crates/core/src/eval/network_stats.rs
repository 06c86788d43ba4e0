//! Whole-network statistics compared between a reference and a synthetic
//! network.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterId, Clustering};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, NodeId};
use crate::mincut::DEFAULT_SIZE_LIMIT;
use crate::scalar::Scalar;
use crate::stats::compute_stats;

/// Above this component size the diameter is a double-sweep lower bound.
pub const DEFAULT_EXACT_DIAMETER_LIMIT: usize = 200_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixingMode {
    /// Fraction of all edges whose endpoints lie in different clusters.
    #[default]
    EdgeFraction,
    /// Mean over nodes with positive degree of the node's fraction of
    /// edges leaving its cluster.
    MeanNodeFraction,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalCoefficientMode {
    /// Nodes of degree < 2 contribute 0 to the mean.
    #[default]
    ZeroForLowDegree,
    /// Nodes of degree < 2 are left out of the mean.
    ExcludeLowDegree,
}

#[derive(Debug, Clone, Copy)]
pub struct StatsOptions {
    pub mixing: MixingMode,
    pub local_coefficient: LocalCoefficientMode,
    pub exact_diameter_limit: usize,
    pub mincut_size_limit: usize,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            mixing: MixingMode::default(),
            local_coefficient: LocalCoefficientMode::default(),
            exact_diameter_limit: DEFAULT_EXACT_DIAMETER_LIMIT,
            mincut_size_limit: DEFAULT_SIZE_LIMIT,
        }
    }
}

/// The eight statistics of a clustered network.
///
/// Sequences are kept per entity (degrees by node id, minimum cuts by
/// cluster id, outlier degrees by ascending outlier id); use
/// [`NetworkStats::sorted_degrees`] and friends for descending views.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkStats<T> {
    pub degrees: Vec<usize>,
    pub mincuts: Vec<(ClusterId, usize)>,
    pub diameter: usize,
    pub diameter_exact: bool,
    pub outlier_clustered_edges: usize,
    pub outlier_degrees: Vec<usize>,
    pub mean_local_clustering: T,
    pub global_clustering: T,
    pub mixing: T,
    pub mixing_mode: MixingMode,
}

fn descending(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

impl<T> NetworkStats<T> {
    pub fn sorted_degrees(&self) -> Vec<usize> {
        descending(&self.degrees)
    }

    pub fn sorted_mincuts(&self) -> Vec<usize> {
        descending(&self.mincuts.iter().map(|&(_, c)| c).collect::<Vec<_>>())
    }

    pub fn sorted_outlier_degrees(&self) -> Vec<usize> {
        descending(&self.outlier_degrees)
    }
}

pub fn compute_network_stats<T: Scalar>(
    g: &CsrGraph,
    c: &Clustering,
    opts: &StatsOptions,
) -> Result<NetworkStats<T>> {
    if c.len() != g.n() {
        return Err(Error::UniverseMismatch {
            left: g.n(),
            right: c.len(),
        });
    }
    let degrees = g.degrees();
    let mincuts = compute_stats(g, c, opts.mincut_size_limit)?
        .into_iter()
        .map(|s| (s.cluster, s.mincut))
        .collect();
    let (diameter, diameter_exact) = diameter(g, opts.exact_diameter_limit);

    let outliers: Vec<NodeId> = (0..g.n()).filter(|&v| !c.is_clustered(v)).collect();
    let outlier_clustered_edges = g
        .edges()
        .filter(|e| c.is_clustered(e.u()) != c.is_clustered(e.v()))
        .count();
    let outlier_degrees = outliers.iter().map(|&v| degrees[v]).collect();

    let (mean_local_clustering, global_clustering) =
        clustering_coefficients::<T>(g, opts.local_coefficient);

    Ok(NetworkStats {
        degrees,
        mincuts,
        diameter,
        diameter_exact,
        outlier_clustered_edges,
        outlier_degrees,
        mean_local_clustering,
        global_clustering,
        mixing: mixing_parameter(g, c, opts.mixing),
        mixing_mode: opts.mixing,
    })
}

/// Fraction of edges (or mean per-node fraction) crossing cluster
/// boundaries; every singleton is its own cluster.
pub fn mixing_parameter<T: Scalar>(g: &CsrGraph, c: &Clustering, mode: MixingMode) -> T {
    match mode {
        MixingMode::EdgeFraction => {
            if g.m() == 0 {
                return T::zero();
            }
            let inter = g
                .edges()
                .filter(|e| c.cluster_of(e.u()) != c.cluster_of(e.v()))
                .count();
            T::from_count(inter) / T::from_count(g.m())
        }
        MixingMode::MeanNodeFraction => {
            let mut sum = T::zero();
            let mut counted = 0;
            for v in 0..g.n() {
                let d = g.degree(v);
                if d == 0 {
                    continue;
                }
                let out = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| c.cluster_of(w) != c.cluster_of(v))
                    .count();
                sum = sum + T::from_count(out) / T::from_count(d);
                counted += 1;
            }
            if counted == 0 {
                T::zero()
            } else {
                sum / T::from_count(counted)
            }
        }
    }
}

/// Triangles through each node.
pub fn node_triangles(g: &CsrGraph) -> Vec<usize> {
    (0..g.n())
        .into_par_iter()
        .map(|u| {
            let nu = g.neighbors(u);
            let twice: usize = nu
                .iter()
                .map(|&v| sorted_intersection(nu, g.neighbors(v)))
                .sum();
            twice / 2
        })
        .collect()
}

fn sorted_intersection(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Mean local clustering coefficient and transitivity
/// (3 x triangles / connected triples).
pub fn clustering_coefficients<T: Scalar>(g: &CsrGraph, mode: LocalCoefficientMode) -> (T, T) {
    let triangles = node_triangles(g);
    let mut local_sum = T::zero();
    let mut local_count = 0usize;
    let mut closed = 0usize;
    let mut wedges = 0usize;
    for (v, &t) in triangles.iter().enumerate() {
        let d = g.degree(v);
        let pairs = d * d.saturating_sub(1) / 2;
        closed += t;
        wedges += pairs;
        if d >= 2 {
            local_sum = local_sum + T::from_count(t) / T::from_count(pairs);
            local_count += 1;
        } else if mode == LocalCoefficientMode::ZeroForLowDegree {
            local_count += 1;
        }
    }
    let mean_local = if local_count == 0 {
        T::zero()
    } else {
        local_sum / T::from_count(local_count)
    };
    let global = if wedges == 0 {
        T::zero()
    } else {
        T::from_count(closed) / T::from_count(wedges)
    };
    (mean_local, global)
}

fn bfs_eccentricity(g: &CsrGraph, source: NodeId, dist: &mut [usize]) -> (usize, NodeId) {
    dist.fill(usize::MAX);
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    let mut far = (0, source);
    while let Some(v) = queue.pop_front() {
        let d = dist[v];
        if d > far.0 || (d == far.0 && v < far.1) {
            far = (d, v);
        }
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = d + 1;
                queue.push_back(w);
            }
        }
    }
    far
}

/// Diameter of the largest connected component. Exact by all-source BFS up
/// to `exact_limit` nodes, otherwise a double-sweep lower bound; the flag
/// says which.
pub fn diameter(g: &CsrGraph, exact_limit: usize) -> (usize, bool) {
    let comps = g.connected_components();
    let Some(largest) = comps.largest() else {
        return (0, true);
    };
    let members: Vec<NodeId> = (0..g.n()).filter(|&v| comps.labels[v] == largest).collect();
    if members.len() > exact_limit {
        let mut dist = vec![0; g.n()];
        let (_, far) = bfs_eccentricity(g, members[0], &mut dist);
        let (ecc, _) = bfs_eccentricity(g, far, &mut dist);
        return (ecc, false);
    }
    let exact = members
        .par_iter()
        .map_init(
            || vec![0; g.n()],
            |dist, &v| bfs_eccentricity(g, v, dist).0,
        )
        .max()
        .unwrap_or(0);
    (exact, true)
}
