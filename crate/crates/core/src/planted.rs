//! Planted-partition reference networks for tests and benchmarks.
//!
//! Each cluster is two random halves (a ring plus G(h, p) edges each)
//! joined by 1 to 4 bridge edges, so cluster min cuts spread over 1..=4.
//! Inter-cluster noise edges and low-degree outlier singletons are added on
//! top.

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::clustering::{ClusterId, Clustering};
use crate::graph::{CsrGraph, Edge, EdgeSet, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedConfig {
    pub nodes: usize,
    pub clusters: usize,
    /// Fraction of nodes left as singletons.
    pub outlier_fraction: f64,
    /// Intra-half edge probability is drawn per cluster from this range.
    pub p_in: (f64, f64),
    /// Inter-cluster edges as a fraction of intra-cluster edges.
    pub mixing: f64,
    pub max_bridges: usize,
    pub seed: u64,
}

impl PlantedConfig {
    pub fn small(nodes: usize, clusters: usize, seed: u64) -> Self {
        PlantedConfig {
            nodes,
            clusters,
            outlier_fraction: 0.05,
            p_in: (0.15, 0.5),
            mixing: 0.1,
            max_bridges: 4,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Planted {
    pub graph: CsrGraph,
    pub clustering: Clustering,
}

fn add(edges: &mut EdgeSet, a: NodeId, b: NodeId) {
    if let Some(e) = Edge::new(a, b) {
        edges.insert(e);
    }
}

fn half(edges: &mut EdgeSet, nodes: &[NodeId], p: f64, rng: &mut ChaCha8Rng) {
    let h = nodes.len();
    if h >= 2 {
        for i in 0..h {
            add(edges, nodes[i], nodes[(i + 1) % h]);
        }
    }
    for i in 0..h {
        for j in i + 2..h {
            if rng.gen_bool(p) {
                add(edges, nodes[i], nodes[j]);
            }
        }
    }
}

/// Builds a reference network. Clusters get at least four nodes each, so
/// `nodes` must leave room for that after outliers are taken out.
pub fn planted_partition(cfg: &PlantedConfig) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let outliers = ((cfg.nodes as f64) * cfg.outlier_fraction).round() as usize;
    let clustered = cfg.nodes - outliers;
    let k = cfg.clusters.max(1);
    assert!(clustered >= 4 * k, "{clustered} clustered nodes cannot fill {k} clusters");

    let mut sizes = vec![4usize; k];
    let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(1.0..4.0)).collect();
    let pick = WeightedIndex::new(&weights).expect("positive weights");
    for _ in 0..clustered - 4 * k {
        sizes[pick.sample(&mut rng)] += 1;
    }

    let mut order: Vec<NodeId> = (0..cfg.nodes).collect();
    order.shuffle(&mut rng);
    let mut assignment = vec![ClusterId(0); cfg.nodes];
    let mut members: Vec<Vec<NodeId>> = Vec::with_capacity(k);
    let mut next = 0;
    for (cluster, &size) in sizes.iter().enumerate() {
        let group = order[next..next + size].to_vec();
        next += size;
        for &v in &group {
            assignment[v] = ClusterId(cluster as i64);
        }
        members.push(group);
    }
    for (i, &v) in order[next..].iter().enumerate() {
        assignment[v] = ClusterId((k + i) as i64);
    }

    let mut edges = EdgeSet::new();
    for group in &members {
        let p = rng.gen_range(cfg.p_in.0..=cfg.p_in.1);
        let (a, b) = group.split_at(group.len() / 2);
        half(&mut edges, a, p, &mut rng);
        half(&mut edges, b, p, &mut rng);
        let bridges = rng.gen_range(1..=cfg.max_bridges.max(1)).min(a.len());
        let left: Vec<NodeId> = a.choose_multiple(&mut rng, bridges).copied().collect();
        let right: Vec<NodeId> = b.choose_multiple(&mut rng, bridges).copied().collect();
        for (&x, &y) in left.iter().zip(&right) {
            add(&mut edges, x, y);
        }
    }

    let intra = edges.len();
    let inter = ((intra as f64) * cfg.mixing).round() as usize;
    if k > 1 {
        let clustered_nodes = &order[..clustered];
        let mut placed = 0;
        while placed < inter {
            let x = *clustered_nodes.choose(&mut rng).unwrap();
            let y = *clustered_nodes.choose(&mut rng).unwrap();
            if assignment[x] != assignment[y] && edges.insert_pair(x, y) {
                placed += 1;
            }
        }
    }
    for &v in &order[clustered..] {
        for _ in 0..rng.gen_range(1..=3) {
            let w = order[rng.gen_range(0..cfg.nodes)];
            add(&mut edges, v, w);
        }
    }

    Planted {
        graph: CsrGraph::from_edge_set(cfg.nodes, &edges).expect("ids are in range"),
        clustering: Clustering::new(assignment),
    }
}
