//! Exact global minimum edge cut (Stoer–Wagner).

use std::cmp::Reverse;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BinaryHeap, HashMap};
use std::hash::BuildHasherDefault;

use crate::graph::{CsrGraph, NodeId};

/// Default upper bound on the node count of a graph handed to the exact cut.
pub const DEFAULT_SIZE_LIMIT: usize = 50_000;

type WeightMap = HashMap<usize, u64, BuildHasherDefault<DefaultHasher>>;

/// Value of a global minimum edge cut and one side of a partition achieving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCut {
    pub value: usize,
    /// Ascending node ids of one side. Empty only when `n <= 1`.
    pub side: Vec<NodeId>,
}

impl MinCut {
    /// Membership mask of `side` over `n` nodes.
    pub fn side_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.side {
            mask[v] = true;
        }
        mask
    }
}

/// Exact global minimum edge cut of `g`.
///
/// Disconnected graphs cut at 0 with the component of node 0 as the side;
/// graphs with at most one node cut at 0 with an empty side.
pub fn global_min_cut(g: &CsrGraph) -> MinCut {
    let n = g.n();
    if n <= 1 {
        return MinCut {
            value: 0,
            side: Vec::new(),
        };
    }
    let comps = g.connected_components();
    if comps.count > 1 {
        let side = (0..n).filter(|&v| comps.labels[v] == 0).collect();
        return MinCut { value: 0, side };
    }
    stoer_wagner(g)
}

fn stoer_wagner(g: &CsrGraph) -> MinCut {
    let n = g.n();
    let mut adj: Vec<WeightMap> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&w| (w, 1u64)).collect())
        .collect();
    let mut members: Vec<Vec<NodeId>> = (0..n).map(|v| vec![v]).collect();
    let mut alive: Vec<usize> = (0..n).collect();

    let mut best = u64::MAX;
    let mut best_side = Vec::new();

    // Scratch reused across phases.
    let mut key = vec![0u64; n];
    let mut added = vec![false; n];
    let mut heap = BinaryHeap::new();

    while alive.len() > 1 {
        for &v in &alive {
            key[v] = 0;
            added[v] = false;
        }
        heap.clear();
        heap.push((0u64, Reverse(alive[0])));

        let mut prev = usize::MAX;
        let mut last = usize::MAX;
        let mut remaining = alive.len();
        while remaining > 0 {
            let Some((k, Reverse(v))) = heap.pop() else {
                unreachable!("connected graph exhausted the ordering early");
            };
            if added[v] || k != key[v] {
                continue;
            }
            added[v] = true;
            remaining -= 1;
            prev = last;
            last = v;
            for (&x, &w) in &adj[v] {
                if !added[x] {
                    key[x] += w;
                    heap.push((key[x], Reverse(x)));
                }
            }
        }

        let phase_cut = key[last];
        if phase_cut < best {
            best = phase_cut;
            best_side = members[last].clone();
            if best == 1 {
                break;
            }
        }

        // Contract `last` into `prev`.
        let moved = std::mem::take(&mut adj[last]);
        for (x, w) in moved {
            adj[x].remove(&last);
            if x != prev {
                *adj[prev].entry(x).or_insert(0) += w;
                *adj[x].entry(prev).or_insert(0) += w;
            }
        }
        let taken = std::mem::take(&mut members[last]);
        members[prev].extend(taken);
        alive.retain(|&v| v != last);
    }

    best_side.sort_unstable();
    MinCut {
        value: best as usize,
        side: best_side,
    }
}

/// Number of edges of `g` with exactly one endpoint in `mask`.
pub fn cut_size(g: &CsrGraph, mask: &[bool]) -> usize {
    g.edges().filter(|e| mask[e.u()] != mask[e.v()]).count()
}
