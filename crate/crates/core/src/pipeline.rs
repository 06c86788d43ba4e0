//! End-to-end generation: split and stats, both SBMs, the repair module,
//! then the merge into one synthetic network.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clustering::{ClusterId, Clustering};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, Edge, EdgeSet, NodeId};
use crate::io::LabelMap;
use crate::mincut::DEFAULT_SIZE_LIMIT;
use crate::reccs::{run_module, ClusterReport, ModuleConfig, StageCounts, Variant, DEFAULT_PARTNER_CAP};
use crate::sbm::{
    build_block_matrix, sample_dcsbm, DegreeWeights, SbmSample, Shortfall, DEFAULT_CHUNK_SIZE,
    DEFAULT_MAX_RETRIES,
};
use crate::splitter::split;
use crate::stats::{compute_stats, reference_degrees, ClusterStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub variant: Variant,
    pub seed: u64,
    pub workers: usize,
    pub max_retries: usize,
    pub partner_cap: usize,
    pub chunk_size: usize,
    pub size_limit: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            variant: Variant::ReccsPp,
            seed: 0,
            workers: 1,
            max_retries: DEFAULT_MAX_RETRIES,
            partner_cap: DEFAULT_PARTNER_CAP,
            chunk_size: DEFAULT_CHUNK_SIZE,
            size_limit: DEFAULT_SIZE_LIMIT,
        }
    }
}

/// Wall time per stage, in seconds. Kept apart from [`RunReport`] so the
/// report stays a pure function of inputs and seed.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Timings {
    pub split: f64,
    pub stats: f64,
    pub sbm_clustered: f64,
    pub sbm_singleton: f64,
    pub reccs: f64,
    pub merge: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub variant: Variant,
    pub seed: u64,
    pub nodes: usize,
    pub reference_edges: usize,
    pub clusters_processed: usize,
    pub clustered_sbm_edges: usize,
    pub singleton_sbm_edges: usize,
    pub sbm_shortfall: u64,
    pub added: StageCounts,
    pub residual_deficit: usize,
    pub merge_duplicates: usize,
    pub output_edges: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subnetwork {
    Clustered,
    Singleton,
}

impl Subnetwork {
    fn name(self) -> &'static str {
        match self {
            Subnetwork::Clustered => "clustered",
            Subnetwork::Singleton => "singleton",
        }
    }
}

/// Everything up to the repair module: shared by both variants.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub nodes: usize,
    pub reference_edges: usize,
    pub clustered_nodes: Vec<NodeId>,
    pub clustered_clustering: Clustering,
    pub reference_degrees: Vec<usize>,
    pub stats: BTreeMap<ClusterId, ClusterStats>,
    /// Over sub-indices of `clustered_nodes`.
    pub clustered_sample: SbmSample,
    /// Over the full node universe.
    pub singleton_sample: SbmSample,
    pub timings: Timings,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub edges: EdgeSet,
    pub report: RunReport,
    pub clusters: Vec<ClusterReport>,
    /// `(node, deficit)` in parent ids.
    pub residual: Vec<(NodeId, usize)>,
    pub shortfall: Vec<(Subnetwork, Shortfall)>,
    pub timings: Timings,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(pool.install(f))
}

/// Independent seeds for the clustered and singleton SBMs.
fn sbm_seeds(seed: u64) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (rng.next_u64(), rng.next_u64())
}

fn degrees_of(n: usize, edges: &EdgeSet) -> Vec<usize> {
    let mut deg = vec![0usize; n];
    for e in edges {
        deg[e.u()] += 1;
        deg[e.v()] += 1;
    }
    deg
}

/// Split and stats, then both SBM draws. Runs on the ambient rayon pool.
pub fn prepare(
    g: &CsrGraph,
    c: &Clustering,
    injected_stats: Option<Vec<ClusterStats>>,
    cfg: &PipelineConfig,
) -> Result<Prepared> {
    let start = Instant::now();
    let mut timings = Timings::default();
    let ((split_out, split_time), (stats_out, stats_time)) = rayon::join(
        || timed(|| split(g, c)),
        || {
            timed(|| match injected_stats {
                Some(s) => Ok(s),
                None => compute_stats(g, c, cfg.size_limit),
            })
        },
    );
    timings.split = split_time;
    timings.stats = stats_time;
    let parts = split_out.map_err(|e| e.in_stage("split"))?;
    let stats = stats_out.map_err(|e| e.in_stage("stats"))?;

    let (seed_c, seed_s) = sbm_seeds(cfg.seed);
    let ((clustered, t_c), (singleton, t_s)) = rayon::join(
        || {
            timed(|| -> Result<SbmSample> {
                let edges: Vec<Edge> = parts.clustered.edges().collect();
                let bm = build_block_matrix(&edges, &parts.clustered_clustering, cfg.chunk_size)?;
                let w = DegreeWeights::from_degrees(&parts.clustered.degrees());
                Ok(sample_dcsbm(&bm, &parts.clustered_clustering, &w, seed_c, cfg.max_retries))
            })
        },
        || {
            timed(|| -> Result<SbmSample> {
                let edges = parts.singleton_edges.as_slice();
                let bm = build_block_matrix(edges, &parts.singleton_clustering, cfg.chunk_size)?;
                let w = DegreeWeights::from_degrees(&degrees_of(g.n(), &parts.singleton_edges));
                Ok(sample_dcsbm(&bm, &parts.singleton_clustering, &w, seed_s, cfg.max_retries))
            })
        },
    );
    timings.sbm_clustered = t_c;
    timings.sbm_singleton = t_s;
    let clustered_sample = clustered.map_err(|e| e.in_stage("sbm_clustered"))?;
    let singleton_sample = singleton.map_err(|e| e.in_stage("sbm_singleton"))?;
    timings.total = start.elapsed().as_secs_f64();

    Ok(Prepared {
        nodes: g.n(),
        reference_edges: g.m(),
        reference_degrees: reference_degrees(&parts.clustered),
        clustered_nodes: parts.clustered_nodes,
        clustered_clustering: parts.clustered_clustering,
        stats: stats.into_iter().map(|s| (s.cluster, s)).collect(),
        clustered_sample,
        singleton_sample,
        timings,
    })
}

/// Deduplicating union; returns the merged set and the number of edges of
/// `b` already present in `a`.
pub fn merge(a: &EdgeSet, b: &EdgeSet) -> (EdgeSet, usize) {
    let mut out = a.clone();
    let duplicates = out.union_with(b);
    (out, duplicates)
}

/// Repair module for `variant` on a prepared draw, then the merge.
pub fn finish(p: &Prepared, variant: Variant, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let start = Instant::now();
    let mut timings = p.timings;
    let module_cfg = ModuleConfig {
        variant,
        partner_cap: cfg.partner_cap,
        size_limit: cfg.size_limit,
    };
    let (module, reccs_time) = timed(|| {
        run_module(
            &p.clustered_sample.edges,
            &p.clustered_clustering,
            &p.stats,
            &p.reference_degrees,
            &module_cfg,
        )
    });
    timings.reccs = reccs_time;
    let module = module.map_err(|e| e.in_stage("reccs"))?;

    let ((edges, merge_duplicates), merge_time) = timed(|| {
        let lifted: EdgeSet = module
            .edges
            .iter()
            .filter_map(|e| Edge::new(p.clustered_nodes[e.u()], p.clustered_nodes[e.v()]))
            .collect();
        merge(&lifted, &p.singleton_sample.edges)
    });
    timings.merge = merge_time;
    timings.total += start.elapsed().as_secs_f64();

    let residual: Vec<(NodeId, usize)> = module
        .residual
        .iter()
        .map(|&(v, d)| (p.clustered_nodes[v], d))
        .collect();
    let shortfall = p
        .clustered_sample
        .shortfall
        .iter()
        .map(|s| (Subnetwork::Clustered, *s))
        .chain(p.singleton_sample.shortfall.iter().map(|s| (Subnetwork::Singleton, *s)))
        .collect();
    let report = RunReport {
        variant,
        seed: cfg.seed,
        nodes: p.nodes,
        reference_edges: p.reference_edges,
        clusters_processed: module.clusters.len(),
        clustered_sbm_edges: p.clustered_sample.edges.len(),
        singleton_sbm_edges: p.singleton_sample.edges.len(),
        sbm_shortfall: p.clustered_sample.total_shortfall() + p.singleton_sample.total_shortfall(),
        added: module.totals,
        residual_deficit: residual.iter().map(|r| r.1).sum(),
        merge_duplicates,
        output_edges: edges.len(),
    };
    Ok(PipelineOutput {
        edges,
        report,
        clusters: module.clusters,
        residual,
        shortfall,
        timings,
    })
}

/// The whole pipeline on a pool of `cfg.workers` threads.
pub fn run_pipeline(
    g: &CsrGraph,
    c: &Clustering,
    injected_stats: Option<Vec<ClusterStats>>,
    cfg: &PipelineConfig,
) -> Result<PipelineOutput> {
    with_workers(cfg.workers, || {
        let p = prepare(g, c, injected_stats, cfg)?;
        finish(&p, cfg.variant, cfg)
    })?
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

/// `node,deficit` rows with external node labels.
pub fn write_residual_csv(residual: &[(NodeId, usize)], labels: &LabelMap, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["node", "deficit"]).map_err(|e| csv_error(path, e))?;
    for &(v, d) in residual {
        w.write_record([labels.label(v).to_string(), d.to_string()])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `subnetwork,r,s,requested,placed` rows.
pub fn write_shortfall_csv(shortfall: &[(Subnetwork, Shortfall)], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["subnetwork", "r", "s", "requested", "placed"])
        .map_err(|e| csv_error(path, e))?;
    for (sub, s) in shortfall {
        w.write_record([
            sub.name().to_string(),
            s.r.to_string(),
            s.s.to_string(),
            s.requested.to_string(),
            s.placed.to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Per-cluster additions by stage.
pub fn write_cluster_report_csv(clusters: &[ClusterReport], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record([
        "cluster",
        "size",
        "target_mincut",
        "min_degree",
        "stitch",
        "stitch_and_min_degree",
        "mincut",
        "degree_match",
    ])
    .map_err(|e| csv_error(path, e))?;
    for r in clusters {
        let a = &r.added;
        let row = [
            r.size,
            r.target_mincut,
            a.min_degree,
            a.stitch,
            a.stitch_and_min_degree,
            a.mincut,
            a.degree_match,
        ];
        let fields = std::iter::once(r.cluster.to_string()).chain(row.iter().map(|v| v.to_string()));
        w.write_record(fields).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mincut::global_min_cut;
    use crate::planted::{planted_partition, PlantedConfig};
    use crate::reccs::{min_degree_target, mincut_target};

    fn ids(raw: &[i64]) -> Clustering {
        Clustering::new(raw.iter().map(|&c| ClusterId(c)).collect())
    }

    fn graph(n: usize, pairs: &[(usize, usize)]) -> CsrGraph {
        let set: EdgeSet = pairs.iter().filter_map(|&(a, b)| Edge::new(a, b)).collect();
        CsrGraph::from_edge_set(n, &set).unwrap()
    }

    #[test]
    fn merge_examples() {
        let e = |pairs: &[(usize, usize)]| -> EdgeSet {
            pairs.iter().filter_map(|&(a, b)| Edge::new(a, b)).collect()
        };
        let (m, d) = merge(&e(&[(0, 1)]), &e(&[(1, 2)]));
        assert_eq!((m.sorted(), d), (e(&[(0, 1), (1, 2)]).sorted(), 0));
        let (m, d) = merge(&e(&[(0, 1)]), &e(&[(0, 1)]));
        assert_eq!((m.len(), d), (1, 1));
        let (m, d) = merge(&e(&[(0, 1), (2, 3)]), &EdgeSet::new());
        assert_eq!((m.len(), d), (2, 0));
    }

    #[test]
    fn all_singletons_skip_the_module() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let c = ids(&[0, 1, 2, 3, 4]);
        let out = run_pipeline(&g, &c, None, &PipelineConfig::default()).unwrap();
        assert_eq!(out.report.clusters_processed, 0);
        assert_eq!(out.report.clustered_sbm_edges, 0);
        assert_eq!(out.report.added.total(), 0);
        assert_eq!(out.edges.len(), out.report.singleton_sbm_edges);
    }

    #[test]
    fn single_cluster_has_empty_singleton_side() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let c = ids(&[7, 7, 7, 7]);
        let out = run_pipeline(&g, &c, None, &PipelineConfig::default()).unwrap();
        assert_eq!(out.report.singleton_sbm_edges, 0);
        assert_eq!(out.report.clusters_processed, 1);
        let syn = CsrGraph::from_edge_set(4, &out.edges).unwrap();
        assert!(global_min_cut(&syn).value >= 2);
    }

    #[test]
    fn edge_accounting_holds() {
        let p = planted_partition(&PlantedConfig::small(300, 8, 5));
        for variant in [Variant::ReccsPlus, Variant::ReccsPp] {
            let cfg = PipelineConfig { variant, seed: 11, ..Default::default() };
            let out = run_pipeline(&p.graph, &p.clustering, None, &cfg).unwrap();
            let r = &out.report;
            assert_eq!(
                r.output_edges,
                r.clustered_sbm_edges + r.added.total() + r.singleton_sbm_edges - r.merge_duplicates
            );
        }
    }

    #[test]
    fn planted_reference_clusters_are_repaired() {
        let p = planted_partition(&PlantedConfig::small(1000, 20, 3));
        let stats: BTreeMap<ClusterId, ClusterStats> = compute_stats(&p.graph, &p.clustering, DEFAULT_SIZE_LIMIT)
            .unwrap()
            .into_iter()
            .map(|s| (s.cluster, s))
            .collect();
        for variant in [Variant::ReccsPlus, Variant::ReccsPp] {
            let cfg = PipelineConfig { variant, seed: 4, ..Default::default() };
            let out = run_pipeline(&p.graph, &p.clustering, None, &cfg).unwrap();
            let syn = CsrGraph::from_edge_set(p.graph.n(), &out.edges).unwrap();
            for (cluster, members) in p.clustering.non_singleton_clusters() {
                let (sub, _) = syn.induced_subgraph(members).unwrap();
                let k = stats[&cluster].mincut;
                assert!(global_min_cut(&sub).value >= mincut_target(k, members.len()));
                assert!(sub.min_degree().unwrap_or(0) >= min_degree_target(k, members.len()));
                assert_eq!(sub.connected_components().count, 1);
            }
        }
    }

    #[test]
    fn injected_stats_are_used() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let c = ids(&[1, 1, 1, 1]);
        let fake = vec![ClusterStats { cluster: ClusterId(1), n: 4, m: 3, mincut: 3 }];
        let out = run_pipeline(&g, &c, Some(fake), &PipelineConfig::default()).unwrap();
        let syn = CsrGraph::from_edge_set(4, &out.edges).unwrap();
        assert_eq!(global_min_cut(&syn).value, 3);
    }

    #[test]
    fn missing_stats_fail_in_reccs_stage() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let c = ids(&[1, 1, 1]);
        let err = run_pipeline(&g, &c, Some(Vec::new()), &PipelineConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Stage { stage: "reccs", .. }), "{err}");
        assert!(!err.is_input_error());
    }

    #[test]
    fn zero_workers_rejected() {
        let g = graph(2, &[(0, 1)]);
        let cfg = PipelineConfig { workers: 0, ..Default::default() };
        assert!(run_pipeline(&g, &ids(&[0, 0]), None, &cfg).is_err());
    }

    #[test]
    fn output_independent_of_workers() {
        let p = planted_partition(&PlantedConfig::small(400, 10, 9));
        let run = |workers| {
            let cfg = PipelineConfig { workers, seed: 3, ..Default::default() };
            run_pipeline(&p.graph, &p.clustering, None, &cfg).unwrap()
        };
        let one = run(1);
        for w in [2, 4] {
            let other = run(w);
            assert_eq!(other.edges.sorted(), one.edges.sorted());
            assert_eq!(other.report, one.report);
        }
    }

    #[test]
    fn variants_share_the_draw() {
        let p = planted_partition(&PlantedConfig::small(300, 6, 2));
        let cfg = PipelineConfig { seed: 8, ..Default::default() };
        let prepared = prepare(&p.graph, &p.clustering, None, &cfg).unwrap();
        let plus = finish(&prepared, Variant::ReccsPlus, &cfg).unwrap();
        let pp = finish(&prepared, Variant::ReccsPp, &cfg).unwrap();
        assert_eq!(plus.report.clustered_sbm_edges, pp.report.clustered_sbm_edges);
        assert_eq!(plus.report.singleton_sbm_edges, pp.report.singleton_sbm_edges);
        let via_run = run_pipeline(&p.graph, &p.clustering, None, &PipelineConfig { variant: Variant::ReccsPlus, ..cfg }).unwrap();
        assert_eq!(via_run.edges.sorted(), plus.edges.sorted());
    }
}
