//! Simple undirected graphs: canonical edges, a deduplicating edge set under
//! construction, and the immutable CSR adjacency every algorithm reads from.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::BuildHasherDefault;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense internal node index in `0..n`.
pub type NodeId = usize;

type FixedState = BuildHasherDefault<DefaultHasher>;

/// An undirected edge stored in canonical form `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    u: NodeId,
    v: NodeId,
}

impl Edge {
    /// Canonical edge between `a` and `b`, or `None` for a self-loop.
    pub fn new(a: NodeId, b: NodeId) -> Option<Edge> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Some(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    #[inline]
    pub fn u(&self) -> NodeId {
        self.u
    }

    #[inline]
    pub fn v(&self) -> NodeId {
        self.v
    }

    #[inline]
    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }
}

/// Insertion-ordered set of canonical edges.
///
/// Iteration follows insertion order, so anything built from a deterministic
/// sequence of inserts iterates deterministically.
#[derive(Debug, Clone, Default)]
pub struct EdgeSet {
    order: Vec<Edge>,
    members: HashSet<Edge, FixedState>,
}

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(capacity: usize) -> Self {
        EdgeSet {
            order: Vec::with_capacity(capacity),
            members: HashSet::with_capacity_and_hasher(capacity, FixedState::default()),
        }
    }

    /// Inserts `edge`; returns `false` if it was already present.
    pub fn insert(&mut self, edge: Edge) -> bool {
        if self.members.insert(edge) {
            self.order.push(edge);
            true
        } else {
            false
        }
    }

    /// Inserts the edge `{a, b}`; self-loops and duplicates are rejected.
    pub fn insert_pair(&mut self, a: NodeId, b: NodeId) -> bool {
        Edge::new(a, b).is_some_and(|e| self.insert(e))
    }

    pub fn contains(&self, edge: &Edge) -> bool {
        self.members.contains(edge)
    }

    pub fn contains_pair(&self, a: NodeId, b: NodeId) -> bool {
        Edge::new(a, b).is_some_and(|e| self.contains(&e))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Edge> {
        self.order.iter()
    }

    pub fn as_slice(&self) -> &[Edge] {
        &self.order
    }

    /// Edges in ascending `(u, v)` order.
    pub fn sorted(&self) -> Vec<Edge> {
        let mut edges = self.order.clone();
        edges.sort_unstable();
        edges
    }

    /// Largest endpoint plus one, i.e. the smallest node count that holds every edge.
    pub fn node_bound(&self) -> usize {
        self.order.iter().map(|e| e.v + 1).max().unwrap_or(0)
    }

    /// Adds every edge of `other`, returning how many were already present.
    pub fn union_with(&mut self, other: &EdgeSet) -> usize {
        other.iter().filter(|&&e| !self.insert(e)).count()
    }
}

impl PartialEq for EdgeSet {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for EdgeSet {}

impl FromIterator<Edge> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        let mut set = EdgeSet::new();
        for e in iter {
            set.insert(e);
        }
        set
    }
}

impl Extend<Edge> for EdgeSet {
    fn extend<I: IntoIterator<Item = Edge>>(&mut self, iter: I) {
        for e in iter {
            self.insert(e);
        }
    }
}

impl<'a> IntoIterator for &'a EdgeSet {
    type Item = &'a Edge;
    type IntoIter = std::slice::Iter<'a, Edge>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// Immutable simple undirected graph in compressed sparse row form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrGraph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl CsrGraph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        CsrGraph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    /// Builds the CSR adjacency of `edges` over `n` nodes.
    ///
    /// Two passes: degree counting then slot filling; neighbor lists are
    /// sorted afterwards in parallel, so the result does not depend on how
    /// the work is split.
    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self> {
        if let Some(bad) = edges.iter().find(|e| e.v >= n) {
            return Err(Error::NodeOutOfBounds { node: bad.v, n });
        }
        let mut offsets = vec![0usize; n + 1];
        for e in edges {
            offsets[e.u + 1] += 1;
            offsets[e.v + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0; 2 * edges.len()];
        for e in edges {
            targets[cursor[e.u]] = e.v;
            cursor[e.u] += 1;
            targets[cursor[e.v]] = e.u;
            cursor[e.v] += 1;
        }

        let mut rows: Vec<&mut [NodeId]> = Vec::with_capacity(n);
        let mut rest = targets.as_mut_slice();
        for i in 0..n {
            let (row, tail) = rest.split_at_mut(offsets[i + 1] - offsets[i]);
            rows.push(row);
            rest = tail;
        }
        rows.par_iter_mut().for_each(|row| row.sort_unstable());

        let graph = CsrGraph { offsets, targets };
        debug_assert!(graph.rows_are_simple());
        Ok(graph)
    }

    /// Convenience wrapper over [`CsrGraph::from_edges`] for an [`EdgeSet`].
    pub fn from_edge_set(n: usize, edges: &EdgeSet) -> Result<Self> {
        Self::from_edges(n, edges.as_slice())
    }

    fn rows_are_simple(&self) -> bool {
        (0..self.n()).all(|i| {
            let row = self.neighbors(i);
            row.windows(2).all(|w| w[0] < w[1]) && !row.contains(&i)
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    #[inline]
    pub fn degree(&self, node: NodeId) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Sorted neighbor list of `node`.
    #[inline]
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        let (a, b) = if self.degree(a) <= self.degree(b) {
            (a, b)
        } else {
            (b, a)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Canonical edges in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v > u)
                .map(move |&v| Edge { u, v })
        })
    }

    pub fn edge_set(&self) -> EdgeSet {
        let mut set = EdgeSet::with_capacity(self.m());
        set.extend(self.edges());
        set
    }

    /// Subgraph induced by `nodes`, together with the map from sub-indices
    /// back to indices of `self`. Sub-index `i` corresponds to `nodes[i]`.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Result<(CsrGraph, Vec<NodeId>)> {
        let n = self.n();
        let mut local = vec![usize::MAX; n];
        for (i, &v) in nodes.iter().enumerate() {
            if v >= n {
                return Err(Error::NodeOutOfBounds { node: v, n });
            }
            local[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in nodes.iter().enumerate() {
            for &w in self.neighbors(v) {
                let j = local[w];
                if j != usize::MAX && i < j {
                    edges.push(Edge { u: i, v: j });
                }
            }
        }
        let sub = CsrGraph::from_edges(nodes.len(), &edges)?;
        Ok((sub, nodes.to_vec()))
    }

    /// Connected components labelled `0..k` in order of each component's
    /// smallest node.
    pub fn connected_components(&self) -> Components {
        let n = self.n();
        let mut labels = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for root in 0..n {
            if labels[root] != usize::MAX {
                continue;
            }
            labels[root] = count;
            stack.push(root);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if labels[w] == usize::MAX {
                        labels[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        Components { labels, count }
    }

    pub fn min_degree(&self) -> Option<usize> {
        (0..self.n()).map(|v| self.degree(v)).min()
    }
}

/// Component labelling produced by [`CsrGraph::connected_components`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub labels: Vec<usize>,
    pub count: usize,
}

impl Components {
    /// Members of every component, each list ascending.
    pub fn groups(&self) -> Vec<Vec<NodeId>> {
        let mut groups = vec![Vec::new(); self.count];
        for (v, &c) in self.labels.iter().enumerate() {
            groups[c].push(v);
        }
        groups
    }

    /// Label of the largest component; ties go to the smaller label.
    pub fn largest(&self) -> Option<usize> {
        let mut sizes = vec![0usize; self.count];
        for &c in &self.labels {
            sizes[c] += 1;
        }
        sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(c, _)| c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, pairs: &[(usize, usize)]) -> CsrGraph {
        let edges: Vec<Edge> = pairs.iter().map(|&(a, b)| Edge::new(a, b).unwrap()).collect();
        CsrGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn edge_canonical_form() {
        assert_eq!(Edge::new(3, 1), Edge::new(1, 3));
        assert_eq!(Edge::new(3, 1).unwrap().endpoints(), (1, 3));
        assert!(Edge::new(2, 2).is_none());
    }

    #[test]
    fn edge_set_rejects_duplicates() {
        let mut set = EdgeSet::new();
        assert!(set.insert_pair(0, 1));
        assert!(!set.insert_pair(1, 0));
        assert!(!set.insert_pair(4, 4));
        assert_eq!(set.len(), 1);
        assert!(set.contains_pair(1, 0));
    }

    #[test]
    fn csr_triangle() {
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(g.offsets(), &[0, 2, 4, 6]);
        assert_eq!(g.degrees(), vec![2, 2, 2]);
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.m(), 3);
    }

    #[test]
    fn csr_path_and_empty() {
        assert_eq!(graph(3, &[(0, 1), (1, 2)]).degrees(), vec![1, 2, 1]);
        assert_eq!(graph(3, &[]).offsets(), &[0, 0, 0, 0]);
    }

    #[test]
    fn csr_rejects_out_of_bounds() {
        let e = [Edge::new(0, 5).unwrap()];
        assert!(matches!(
            CsrGraph::from_edges(3, &e),
            Err(Error::NodeOutOfBounds { node: 5, n: 3 })
        ));
    }

    #[test]
    fn induced_subgraphs() {
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let (sub, map) = tri.induced_subgraph(&[0, 1]).unwrap();
        assert_eq!((sub.n(), sub.m()), (2, 1));
        assert_eq!(map, vec![0, 1]);
        let (sub, _) = tri.induced_subgraph(&[0]).unwrap();
        assert_eq!((sub.n(), sub.m()), (1, 0));

        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let (sub, map) = star.induced_subgraph(&[1, 2, 3]).unwrap();
        assert_eq!((sub.n(), sub.m()), (3, 0));
        assert_eq!(map, vec![1, 2, 3]);
    }

    #[test]
    fn components() {
        let tri = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(tri.connected_components().count, 1);

        let two = graph(4, &[(0, 1), (2, 3)]).connected_components();
        assert_eq!(two.labels, vec![0, 0, 1, 1]);
        assert_eq!(two.count, 2);

        assert_eq!(graph(5, &[]).connected_components().count, 5);
    }

    #[test]
    fn component_labels_follow_smallest_member() {
        let c = graph(5, &[(4, 1), (0, 3)]).connected_components();
        assert_eq!(c.labels, vec![0, 1, 2, 0, 1]);
        assert_eq!(c.groups(), vec![vec![0, 3], vec![1, 4], vec![2]]);
        assert_eq!(c.largest(), Some(0));
    }
}
