use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::NodeId;

/// External cluster label, as read from a clustering file.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct ClusterId(pub i64);

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Disjoint, total assignment of nodes `0..n` to clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    assignment: Vec<ClusterId>,
    members: BTreeMap<ClusterId, Vec<NodeId>>,
}

impl Clustering {
    pub fn new(assignment: Vec<ClusterId>) -> Self {
        let mut members: BTreeMap<ClusterId, Vec<NodeId>> = BTreeMap::new();
        for (v, &c) in assignment.iter().enumerate() {
            members.entry(c).or_default().push(v);
        }
        Clustering {
            assignment,
            members,
        }
    }

    /// Number of nodes covered.
    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    #[inline]
    pub fn cluster_of(&self, node: NodeId) -> ClusterId {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[ClusterId] {
        &self.assignment
    }

    /// Clusters in ascending id order with their ascending member lists.
    pub fn clusters(&self) -> &BTreeMap<ClusterId, Vec<NodeId>> {
        &self.members
    }

    pub fn members(&self, cluster: ClusterId) -> &[NodeId] {
        self.members.get(&cluster).map_or(&[], Vec::as_slice)
    }

    pub fn cluster_count(&self) -> usize {
        self.members.len()
    }

    pub fn cluster_size(&self, cluster: ClusterId) -> usize {
        self.members(cluster).len()
    }

    /// A node is clustered iff its cluster has more than one member.
    #[inline]
    pub fn is_clustered(&self, node: NodeId) -> bool {
        self.cluster_size(self.assignment[node]) > 1
    }

    /// Clusters of size > 1, ascending by id.
    pub fn non_singleton_clusters(&self) -> impl Iterator<Item = (ClusterId, &[NodeId])> {
        self.members
            .iter()
            .filter(|(_, m)| m.len() > 1)
            .map(|(&c, m)| (c, m.as_slice()))
    }

    pub fn max_id(&self) -> Option<ClusterId> {
        self.members.keys().next_back().copied()
    }

    /// Dense rank `0..k` of every cluster id, in ascending id order.
    pub fn dense_labels(&self) -> Vec<usize> {
        let rank: BTreeMap<ClusterId, usize> =
            self.members.keys().enumerate().map(|(i, &c)| (c, i)).collect();
        self.assignment.iter().map(|c| rank[c]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_and_singletons() {
        let c = Clustering::new(vec![ClusterId(5), ClusterId(5), ClusterId(2), ClusterId(9)]);
        assert_eq!(c.cluster_count(), 3);
        assert_eq!(c.members(ClusterId(5)), &[0, 1]);
        assert!(c.is_clustered(0));
        assert!(!c.is_clustered(2));
        assert_eq!(c.max_id(), Some(ClusterId(9)));
        assert_eq!(c.dense_labels(), vec![1, 1, 0, 2]);
        let big: Vec<_> = c.non_singleton_clusters().map(|(id, _)| id).collect();
        assert_eq!(big, vec![ClusterId(5)]);
    }
}
