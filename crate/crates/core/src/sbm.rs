//! Degree-corrected stochastic block model: block edge-count matrix
//! extraction and simple-graph sampling.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashSet};
use std::hash::BuildHasherDefault;
use std::path::Path;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterId, Clustering};
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeSet, NodeId};

pub const DEFAULT_CHUNK_SIZE: usize = 1 << 16;
pub const DEFAULT_MAX_RETRIES: usize = 30;

/// One aggregated coordinate of the block matrix, `r <= s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockEntry {
    pub r: ClusterId,
    pub s: ClusterId,
    pub count: u64,
}

/// Sparse edge counts between (and within) blocks. Diagonal entries hold the
/// intra-block edge count directly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockMatrix {
    pub blocks: usize,
    pub entries: Vec<BlockEntry>,
}

impl BlockMatrix {
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
        writer
            .write_record(["r", "s", "count"])
            .map_err(|e| io_err(path, e))?;
        for e in &self.entries {
            writer
                .write_record([e.r.to_string(), e.s.to_string(), e.count.to_string()])
                .map_err(|e| io_err(path, e))?;
        }
        writer.flush().map_err(|e| Error::io(path, e))
    }
}

fn io_err(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e))
}

fn block_pair(c: &Clustering, e: &Edge) -> Result<(ClusterId, ClusterId)> {
    let n = c.len();
    if e.v() >= n {
        return Err(Error::MissingAssignment(e.v().to_string()));
    }
    let (a, b) = (c.cluster_of(e.u()), c.cluster_of(e.v()));
    Ok(if a <= b { (a, b) } else { (b, a) })
}

fn aggregate(mut pairs: Vec<(ClusterId, ClusterId, u64)>) -> Vec<BlockEntry> {
    pairs.sort_unstable_by_key(|&(r, s, _)| (r, s));
    let mut out: Vec<BlockEntry> = Vec::new();
    for (r, s, count) in pairs {
        match out.last_mut() {
            Some(last) if last.r == r && last.s == s => last.count += count,
            _ => out.push(BlockEntry { r, s, count }),
        }
    }
    out
}

/// Tallies `edges` into block coordinates. Edges are processed in chunks of
/// `chunk_size`, each chunk aggregated independently and then merged by
/// sorted coordinate; the result does not depend on `chunk_size`.
pub fn build_block_matrix(edges: &[Edge], c: &Clustering, chunk_size: usize) -> Result<BlockMatrix> {
    let chunk_size = chunk_size.max(1);
    let partials: Vec<Vec<BlockEntry>> = edges
        .par_chunks(chunk_size)
        .map(|chunk| {
            let pairs = chunk
                .iter()
                .map(|e| block_pair(c, e).map(|(r, s)| (r, s, 1)))
                .collect::<Result<Vec<_>>>()?;
            Ok(aggregate(pairs))
        })
        .collect::<Result<_>>()?;
    let merged = aggregate(
        partials
            .into_iter()
            .flatten()
            .map(|e| (e.r, e.s, e.count))
            .collect(),
    );
    Ok(BlockMatrix {
        blocks: c.cluster_count(),
        entries: merged,
    })
}

/// Per-node sampling weights, normally the node's degree in the reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeWeights {
    pub weights: Vec<u64>,
}

impl DegreeWeights {
    pub fn from_degrees(degrees: &[usize]) -> Self {
        DegreeWeights {
            weights: degrees.iter().map(|&d| d as u64).collect(),
        }
    }

    pub fn block_total(&self, members: &[NodeId]) -> u64 {
        members.iter().map(|&v| self.weights[v]).sum()
    }
}

/// Weighted endpoint sampler over one block; uniform when all weights are 0.
struct BlockSampler<'a> {
    members: &'a [NodeId],
    cumulative: Vec<u64>,
}

impl<'a> BlockSampler<'a> {
    fn new(members: &'a [NodeId], w: &DegreeWeights) -> Self {
        let mut acc = 0;
        let cumulative = members
            .iter()
            .map(|&v| {
                acc += w.weights[v];
                acc
            })
            .collect();
        BlockSampler {
            members,
            cumulative,
        }
    }

    fn total(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> NodeId {
        let total = self.total();
        if total == 0 {
            return self.members[rng.gen_range(0..self.members.len())];
        }
        let x = rng.gen_range(0..total);
        self.members[self.cumulative.partition_point(|&c| c <= x)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortfall {
    pub r: ClusterId,
    pub s: ClusterId,
    pub requested: u64,
    pub placed: u64,
}

#[derive(Debug, Clone)]
pub struct SbmSample {
    pub edges: EdgeSet,
    /// Coordinates that could not place every requested edge.
    pub shortfall: Vec<Shortfall>,
}

impl SbmSample {
    pub fn total_shortfall(&self) -> u64 {
        self.shortfall.iter().map(|s| s.requested - s.placed).sum()
    }
}

/// Samples a simple graph from `bm`.
///
/// Each coordinate draws its edges from its own RNG stream (derived from
/// `seed` and the coordinate's position in `bm.entries`), so the output is
/// identical for any thread count. Each edge gets `1 + max_retries`
/// attempts; draws that produce a self-loop or an existing edge are retried
/// and, once attempts run out, the edge is dropped and counted as shortfall.
pub fn sample_dcsbm(
    bm: &BlockMatrix,
    c: &Clustering,
    w: &DegreeWeights,
    seed: u64,
    max_retries: usize,
) -> SbmSample {
    let samplers: BTreeMap<ClusterId, BlockSampler<'_>> = c
        .clusters()
        .iter()
        .map(|(&id, members)| (id, BlockSampler::new(members, w)))
        .collect();

    let per_coord: Vec<(Vec<Edge>, Option<Shortfall>)> = bm
        .entries
        .par_iter()
        .enumerate()
        .map(|(index, entry)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            sample_coordinate(entry, &samplers, &mut rng, max_retries)
        })
        .collect();

    let mut edges = EdgeSet::with_capacity(bm.total() as usize);
    let mut shortfall = Vec::new();
    for (placed, short) in per_coord {
        edges.extend(placed);
        shortfall.extend(short);
    }
    SbmSample { edges, shortfall }
}

fn sample_coordinate(
    entry: &BlockEntry,
    samplers: &BTreeMap<ClusterId, BlockSampler<'_>>,
    rng: &mut ChaCha8Rng,
    max_retries: usize,
) -> (Vec<Edge>, Option<Shortfall>) {
    let short = |placed: u64| {
        (placed < entry.count).then_some(Shortfall {
            r: entry.r,
            s: entry.s,
            requested: entry.count,
            placed,
        })
    };
    let (Some(left), Some(right)) = (samplers.get(&entry.r), samplers.get(&entry.s)) else {
        warn!("block ({}, {}) has no members; dropping {} edges", entry.r, entry.s, entry.count);
        return (Vec::new(), short(0));
    };
    if entry.r == entry.s && left.members.len() < 2 {
        warn!(
            "block {} has a single node; dropping {} intra-block edges",
            entry.r, entry.count
        );
        return (Vec::new(), short(0));
    }

    let mut seen: HashSet<Edge, BuildHasherDefault<DefaultHasher>> = HashSet::default();
    let mut placed = Vec::with_capacity(entry.count as usize);
    for _ in 0..entry.count {
        for _ in 0..=max_retries {
            let a = left.sample(rng);
            let b = right.sample(rng);
            if let Some(e) = Edge::new(a, b) {
                if seen.insert(e) {
                    placed.push(e);
                    break;
                }
            }
        }
    }
    let n_placed = placed.len() as u64;
    (placed, short(n_placed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn ids(raw: &[i64]) -> Clustering {
        Clustering::new(raw.iter().map(|&c| ClusterId(c)).collect())
    }

    fn edges(pairs: &[(usize, usize)]) -> Vec<Edge> {
        pairs.iter().filter_map(|&(a, b)| Edge::new(a, b)).collect()
    }

    #[test]
    fn triangle_block() {
        let bm = build_block_matrix(&edges(&[(0, 1), (1, 2), (0, 2)]), &ids(&[0, 0, 0]), 2).unwrap();
        assert_eq!(bm.entries, vec![BlockEntry { r: ClusterId(0), s: ClusterId(0), count: 3 }]);
    }

    #[test]
    fn cross_block_edge() {
        let bm = build_block_matrix(&edges(&[(0, 1)]), &ids(&[7, 3]), 8).unwrap();
        assert_eq!(bm.entries, vec![BlockEntry { r: ClusterId(3), s: ClusterId(7), count: 1 }]);
        assert_eq!(bm.blocks, 2);
    }

    #[test]
    fn missing_endpoint_cluster() {
        assert!(build_block_matrix(&edges(&[(0, 5)]), &ids(&[0, 0]), 8).is_err());
    }

    #[test]
    fn random_graph_matches_tally() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 30;
        let labels: Vec<i64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let c = ids(&labels);
        let mut set = EdgeSet::new();
        while set.len() < 50 {
            set.insert_pair(rng.gen_range(0..n), rng.gen_range(0..n));
        }
        let bm = build_block_matrix(set.as_slice(), &c, 7).unwrap();

        let mut tally: BTreeMap<(i64, i64), u64> = BTreeMap::new();
        for e in set.iter() {
            let (a, b) = (labels[e.u()], labels[e.v()]);
            *tally.entry((a.min(b), a.max(b))).or_default() += 1;
        }
        let got: BTreeMap<(i64, i64), u64> =
            bm.entries.iter().map(|e| ((e.r.0, e.s.0), e.count)).collect();
        assert_eq!(got, tally);
    }

    #[test]
    fn forced_triangle_sample() {
        let c = ids(&[0, 0, 0]);
        let bm = BlockMatrix {
            blocks: 1,
            entries: vec![BlockEntry { r: ClusterId(0), s: ClusterId(0), count: 3 }],
        };
        let w = DegreeWeights::from_degrees(&[1, 1, 1]);
        for seed in 0..20 {
            let s = sample_dcsbm(&bm, &c, &w, seed, DEFAULT_MAX_RETRIES);
            // Shortfall is possible but unlikely; whatever lands is simple.
            assert_eq!(s.edges.len() as u64 + s.total_shortfall(), 3);
        }
        let s = sample_dcsbm(&bm, &c, &w, 1, 500);
        assert_eq!(s.edges.len(), 3);
    }

    #[test]
    fn single_cross_edge() {
        let c = ids(&[0, 1]);
        let bm = BlockMatrix {
            blocks: 2,
            entries: vec![BlockEntry { r: ClusterId(0), s: ClusterId(1), count: 1 }],
        };
        let s = sample_dcsbm(&bm, &c, &DegreeWeights::from_degrees(&[1, 1]), 9, 30);
        assert_eq!(s.edges.sorted(), vec![Edge::new(0, 1).unwrap()]);
        assert!(s.shortfall.is_empty());
    }

    #[test]
    fn singleton_block_intra_edges_dropped() {
        let c = ids(&[0, 1, 1]);
        let bm = BlockMatrix {
            blocks: 2,
            entries: vec![BlockEntry { r: ClusterId(0), s: ClusterId(0), count: 2 }],
        };
        let s = sample_dcsbm(&bm, &c, &DegreeWeights::from_degrees(&[1, 1, 1]), 0, 30);
        assert!(s.edges.is_empty());
        assert_eq!(s.total_shortfall(), 2);
    }

    #[test]
    fn zero_weight_nodes_never_sampled() {
        let c = ids(&[0, 0, 0, 0]);
        let bm = BlockMatrix {
            blocks: 1,
            entries: vec![BlockEntry { r: ClusterId(0), s: ClusterId(0), count: 3 }],
        };
        let w = DegreeWeights::from_degrees(&[2, 2, 2, 0]);
        for seed in 0..50 {
            let s = sample_dcsbm(&bm, &c, &w, seed, 30);
            assert!(s.edges.iter().all(|e| e.v() != 3));
        }
        // All-zero block falls back to uniform.
        let s = sample_dcsbm(&bm, &c, &DegreeWeights::from_degrees(&[0; 4]), 5, 30);
        assert_eq!(s.edges.len(), 3);
    }

    #[test]
    fn endpoint_frequencies_are_uniform() {
        let c = ids(&[0; 6]);
        let bm = BlockMatrix {
            blocks: 1,
            entries: vec![BlockEntry { r: ClusterId(0), s: ClusterId(0), count: 5 }],
        };
        let w = DegreeWeights::from_degrees(&[1; 6]);
        let mut hits = [0u64; 6];
        let mut total = 0u64;
        for seed in 0..10_000 {
            for e in sample_dcsbm(&bm, &c, &w, seed, 30).edges.iter() {
                hits[e.u()] += 1;
                hits[e.v()] += 1;
                total += 2;
            }
        }
        // Multinomial model: each endpoint lands on a node with p = 1/6.
        let p = 1.0 / 6.0;
        let mean = total as f64 * p;
        let sigma = (total as f64 * p * (1.0 - p)).sqrt();
        for h in hits {
            assert!((h as f64 - mean).abs() <= 3.0 * sigma, "{hits:?}");
        }
    }

    proptest! {
        #[test]
        fn chunking_invariant_and_conserving(
            seed in any::<u64>(),
            n in 2usize..40,
            m in 0usize..120,
            k in 1i64..6,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = ids(&(0..n).map(|_| rng.gen_range(0..k)).collect::<Vec<_>>());
            let mut set = EdgeSet::new();
            for _ in 0..m {
                set.insert_pair(rng.gen_range(0..n), rng.gen_range(0..n));
            }
            let base = build_block_matrix(set.as_slice(), &c, 1).unwrap();
            prop_assert_eq!(base.total(), set.len() as u64);
            for chunk in [7, 1024] {
                prop_assert_eq!(&build_block_matrix(set.as_slice(), &c, chunk).unwrap(), &base);
            }
        }

        #[test]
        fn sampled_edges_respect_blocks(seed in any::<u64>(), n in 4usize..30, m in 1usize..60) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = ids(&(0..n).map(|_| rng.gen_range(0..3)).collect::<Vec<_>>());
            let mut set = EdgeSet::new();
            for _ in 0..m {
                set.insert_pair(rng.gen_range(0..n), rng.gen_range(0..n));
            }
            let bm = build_block_matrix(set.as_slice(), &c, 16).unwrap();
            let degrees: Vec<usize> = {
                let mut d = vec![0; n];
                for e in set.iter() { d[e.u()] += 1; d[e.v()] += 1; }
                d
            };
            let w = DegreeWeights::from_degrees(&degrees);
            let s = sample_dcsbm(&bm, &c, &w, seed, 30);
            prop_assert_eq!(s.edges.len() as u64, bm.total() - s.total_shortfall());
            let allowed: HashSet<(ClusterId, ClusterId)> = bm.entries.iter().map(|e| (e.r, e.s)).collect();
            for e in s.edges.iter() {
                prop_assert!(allowed.contains(&block_pair(&c, e).unwrap()));
            }
            let again = sample_dcsbm(&bm, &c, &w, seed, 30);
            prop_assert_eq!(again.edges.as_slice(), s.edges.as_slice());
        }
    }
}
