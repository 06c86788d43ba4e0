//! Degree-sequence matching by a max-heap over degree deficits.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use crate::graph::{EdgeSet, NodeId};

pub const DEFAULT_PARTNER_CAP: usize = 64;

/// A graph the matcher can query and extend.
pub trait MatchTarget {
    fn adjacent(&self, a: NodeId, b: NodeId) -> bool;
    fn add(&mut self, a: NodeId, b: NodeId);
}

impl MatchTarget for EdgeSet {
    fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.contains_pair(a, b)
    }

    fn add(&mut self, a: NodeId, b: NodeId) {
        self.insert_pair(a, b);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchOutcome {
    pub added: usize,
    /// `(node, remaining deficit)` for every node left with a positive deficit.
    pub residual: Vec<(NodeId, usize)>,
}

impl MatchOutcome {
    pub fn residual_total(&self) -> usize {
        self.residual.iter().map(|&(_, d)| d).sum()
    }
}

/// Pairs deficient nodes until no deficit can be reduced.
///
/// `deficits[i]` is the remaining deficit of node `nodes[i]`. The node with
/// the largest deficit (ties: smallest index) is popped and matched with the
/// next candidate in heap order that is distinct and non-adjacent; up to
/// `partner_cap` candidates are examined before the node is retired.
/// Deficits are decremented in place.
pub fn heap_match<G: MatchTarget + ?Sized>(
    graph: &mut G,
    nodes: &[NodeId],
    deficits: &mut [usize],
    partner_cap: usize,
) -> MatchOutcome {
    debug_assert_eq!(nodes.len(), deficits.len());
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> = deficits
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(i, &d)| (d, Reverse(i)))
        .collect();

    let mut added = 0;
    let mut skipped = Vec::new();
    while let Some((_, Reverse(i))) = heap.pop() {
        let u = nodes[i];
        let mut partner = None;
        let mut examined = 0;
        while examined < partner_cap {
            let Some((d, Reverse(j))) = heap.pop() else {
                break;
            };
            examined += 1;
            if !graph.adjacent(u, nodes[j]) {
                partner = Some(j);
                break;
            }
            skipped.push((d, Reverse(j)));
        }
        heap.extend(skipped.drain(..));

        let Some(j) = partner else {
            continue;
        };
        graph.add(u, nodes[j]);
        added += 1;
        deficits[i] -= 1;
        deficits[j] -= 1;
        if deficits[i] > 0 {
            heap.push((deficits[i], Reverse(i)));
        }
        if deficits[j] > 0 {
            heap.push((deficits[j], Reverse(j)));
        }
    }

    let residual = deficits
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(i, &d)| (nodes[i], d))
        .collect();
    MatchOutcome { added, residual }
}

/// Deficit of every node: `max(0, reference - current)`.
pub fn deficits(reference: &[usize], current: &[usize]) -> Vec<usize> {
    reference
        .iter()
        .zip(current)
        .map(|(&r, &c)| r.saturating_sub(c))
        .collect()
}
