//! Per-cluster repair stages. Every stage only adds intra-cluster edges.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use log::warn;

use super::matching::{heap_match, MatchOutcome};
use super::ClusterWorkItem;
use crate::error::{Error, Result};
use crate::mincut::global_min_cut;

/// How [`stitch_components`] interacts with minimum-degree enforcement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StitchMode {
    /// Stitch only; minimum degrees were enforced beforehand.
    Standalone,
    /// Stitch first, then enforce minimum degrees counting the stitch edges.
    Combined,
}

/// Minimum intra-cluster degree the structural stages aim for.
pub fn min_degree_target(target_mincut: usize, size: usize) -> usize {
    target_mincut.max(1).min(size.saturating_sub(1))
}

/// Minimum cut value the repair stage aims for.
pub fn mincut_target(target_mincut: usize, size: usize) -> usize {
    target_mincut.min(size.saturating_sub(1))
}

/// Raises every member's intra-cluster degree to at least
/// `min(max(1, k), size - 1)`.
///
/// The most deficient node (ties: lowest id) is paired with the most
/// deficient non-adjacent node; if no deficient partner is free it takes the
/// lowest-degree non-adjacent member.
pub fn enforce_min_degree(item: &mut ClusterWorkItem) -> usize {
    let size = item.size();
    let target = min_degree_target(item.target_mincut, size);
    let mut deficit: Vec<usize> = (0..size)
        .map(|v| target.saturating_sub(item.degree(v)))
        .collect();
    let mut queue: BTreeSet<(Reverse<usize>, usize)> = deficit
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(v, &d)| (Reverse(d), v))
        .collect();

    let mut added = 0;
    while let Some(&(_, u)) = queue.first() {
        let partner = queue
            .iter()
            .map(|&(_, v)| v)
            .find(|&v| v != u && !item.has_edge(u, v))
            .or_else(|| {
                (0..size)
                    .filter(|&v| v != u && !item.has_edge(u, v))
                    .min_by_key(|&v| (item.degree(v), v))
            })
            .expect("a member below size - 1 has a non-neighbor");
        item.add_edge(u, partner);
        added += 1;
        for v in [u, partner] {
            if deficit[v] > 0 {
                queue.remove(&(Reverse(deficit[v]), v));
                deficit[v] -= 1;
                if deficit[v] > 0 {
                    queue.insert((Reverse(deficit[v]), v));
                }
            }
        }
    }
    added
}

/// Connects the cluster by chaining its components.
///
/// Components are ordered by smallest member; component `i` is joined to
/// component `i + 1` through each one's lowest-degree member (ties: lowest
/// id), degrees taken before any stitch edge is added.
pub fn stitch_components(item: &mut ClusterWorkItem, mode: StitchMode) -> usize {
    let comps = item.to_csr().connected_components();
    let mut added = 0;
    if comps.count > 1 {
        let anchors: Vec<usize> = comps
            .groups()
            .iter()
            .map(|group| {
                *group
                    .iter()
                    .min_by_key(|&&v| (item.degree(v), v))
                    .expect("components are nonempty")
            })
            .collect();
        for pair in anchors.windows(2) {
            if item.add_edge(pair[0], pair[1]) {
                added += 1;
            }
        }
    }
    if mode == StitchMode::Combined {
        added += enforce_min_degree(item);
    }
    added
}

/// Adds edges across minimum cuts until the cluster's edge connectivity
/// reaches `min(k, size - 1)`.
///
/// Each round recomputes the exact minimum cut and adds one edge between the
/// non-adjacent cross pair with the smallest degree sum.
pub fn repair_mincut(item: &mut ClusterWorkItem, size_limit: usize) -> Result<usize> {
    let size = item.size();
    let target = mincut_target(item.target_mincut, size);
    if target == 0 {
        return Ok(0);
    }
    if size > size_limit {
        return Err(Error::ClusterTooLarge {
            cluster: item.cluster,
            size,
            limit: size_limit,
        });
    }

    let mut added = 0;
    loop {
        let cut = global_min_cut(&item.to_csr());
        if cut.value >= target {
            return Ok(added);
        }
        let mask = cut.side_mask(size);
        let by_degree = |inside: bool| {
            let mut nodes: Vec<usize> = (0..size).filter(|&v| mask[v] == inside).collect();
            nodes.sort_by_key(|&v| (item.degree(v), v));
            nodes
        };
        let (left, right) = (by_degree(true), by_degree(false));

        let mut best: Option<(usize, usize, usize)> = None;
        for &a in &left {
            let da = item.degree(a);
            if best.is_some_and(|(s, _, _)| da + item.degree(right[0]) >= s) {
                break;
            }
            for &b in &right {
                let sum = da + item.degree(b);
                if best.is_some_and(|(s, _, _)| sum >= s) {
                    break;
                }
                if !item.has_edge(a, b) {
                    best = Some((sum, a, b));
                    break;
                }
            }
        }
        let Some((_, a, b)) = best else {
            warn!(
                "cluster {}: every pair across the minimum cut is adjacent; stopping at cut {}",
                item.cluster, cut.value
            );
            return Ok(added);
        };
        item.add_edge(a, b);
        added += 1;
    }
}

/// Heap-based degree matching restricted to the cluster's own members.
///
/// Deficits count every edge a member already has, including those leaving
/// the cluster; only intra-cluster edges are added.
pub fn match_degrees_per_cluster(item: &mut ClusterWorkItem, partner_cap: usize) -> MatchOutcome {
    let size = item.size();
    let mut deficits: Vec<usize> = (0..size)
        .map(|v| item.reference_degrees[v].saturating_sub(item.total_degree(v)))
        .collect();
    let locals: Vec<usize> = (0..size).collect();
    let mut outcome = heap_match(item, &locals, &mut deficits, partner_cap);
    for entry in &mut outcome.residual {
        entry.0 = item.members[entry.0];
    }
    outcome
}
