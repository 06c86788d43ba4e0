//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num::bigint::BigInt;
use num::traits::{Signed, Zero};
use num::BigRational;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use reccs_core::eval::{
    absolute_difference, ari, compare_stats, compute_network_stats, frobenius_diff, nmi,
    relative_difference, rmse, Alignment, Matrix, Statistic, StatsOptions,
};
use reccs_core::io::{write_clustering, write_edge_list, LabelMap};
use reccs_core::pipeline::{finish, prepare, run_pipeline, PipelineConfig};
use reccs_core::planted::{planted_partition, PlantedConfig};
use reccs_core::reccs::{
    match_degrees_per_cluster, min_degree_target, mincut_target, repair_mincut,
    stitch_components, ClusterWorkItem, StitchMode, DEFAULT_PARTNER_CAP,
};
use reccs_core::sbm::build_block_matrix;
use reccs_core::splitter::split;
use reccs_core::stats::compute_stats;
use reccs_core::{global_min_cut, ClusterId, Clustering, CsrGraph, Edge, EdgeSet, Variant};

const REL_TOL_EXPONENT: u32 = 12;
const FIDELITY_RUNS: usize = 20;
const FIDELITY_MIN_SHARE: f64 = 0.70;
const SCALING_MAX_RATIO: f64 = 0.6;
const SCALING_REPEATS: usize = 3;
const ARI_NULL_BAND: f64 = 0.05;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> CsrGraph {
    let mut set = EdgeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                set.insert_pair(a, b);
            }
        }
    }
    CsrGraph::from_edge_set(n, &set).unwrap()
}

fn random_clustering(rng: &mut ChaCha8Rng, n: usize, labels: i64) -> Clustering {
    Clustering::new((0..n).map(|_| ClusterId(rng.gen_range(0..labels))).collect())
}

fn structural_guarantees() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut clusters_checked = 0;
    for i in 0..50 {
        let nodes = rng.gen_range(100..=2000);
        let max_clusters = (nodes * 95 / 100 / 4).min(50);
        let clusters = rng.gen_range(5..=max_clusters);
        let p = planted_partition(&PlantedConfig::small(nodes, clusters, 1000 + i));
        let stats: BTreeMap<_, _> = compute_stats(&p.graph, &p.clustering, usize::MAX)
            .unwrap()
            .into_iter()
            .map(|s| (s.cluster, s.mincut))
            .collect();
        let cfg = PipelineConfig { variant: Variant::ReccsPp, seed: i, ..Default::default() };
        let out = run_pipeline(&p.graph, &p.clustering, None, &cfg).unwrap();
        let syn = CsrGraph::from_edge_set(nodes, &out.edges).unwrap();
        for (cluster, members) in p.clustering.non_singleton_clusters() {
            let (sub, _) = syn.induced_subgraph(members).unwrap();
            let k = stats[&cluster];
            let size = members.len();
            let connected = sub.connected_components().count == 1;
            let cut = global_min_cut(&sub).value;
            let min_deg = sub.min_degree().unwrap_or(0);
            if !connected || cut < mincut_target(k, size) || min_deg < min_degree_target(k, size) {
                return outcome(
                    false,
                    format!("reference {i}, cluster {cluster}: connected={connected} cut={cut} min_degree={min_deg} ref_cut={k}"),
                );
            }
            clusters_checked += 1;
        }
    }
    outcome(true, format!("50 references, {clusters_checked} clusters checked"))
}

fn split_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for i in 0..200 {
        let n = rng.gen_range(1..80);
        let p = rng.gen_range(0.0..0.5);
        let g = random_graph(&mut rng, n, p);
        let labels = rng.gen_range(1..=n as i64);
        let c = random_clustering(&mut rng, n, labels);
        let parts = split(&g, &c).unwrap();
        let gc = parts.clustered_edges_global();
        let gs = &parts.singleton_edges;
        let overlap = gc.iter().filter(|e| gs.contains(e)).count();
        if gc.len() + gs.len() != g.m() || overlap != 0 {
            return outcome(false, format!("pair {i}: |Ec|={} |Es|={} |E|={} overlap={overlap}", gc.len(), gs.len(), g.m()));
        }
    }
    outcome(true, "200 pairs")
}

fn enumerated_cut(g: &CsrGraph) -> usize {
    let n = g.n();
    if n < 2 {
        return 0;
    }
    (1u32..(1 << n) - 1)
        .filter(|mask| mask & 1 == 1)
        .map(|mask| {
            g.edges()
                .filter(|e| ((mask >> e.u()) & 1) != ((mask >> e.v()) & 1))
                .count()
        })
        .min()
        .unwrap()
}

fn mincut_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let start = Instant::now();
    for i in 0..500 {
        let n = rng.gen_range(1..=10);
        let p = rng.gen_range(0.1..0.9);
        let g = random_graph(&mut rng, n, p);
        let (got, want) = (global_min_cut(&g).value, enumerated_cut(&g));
        if got != want {
            return outcome(false, format!("graph {i} (n={n}): {got} vs enumerated {want}"));
        }
    }
    outcome(true, format!("500 graphs in {:.2}s", start.elapsed().as_secs_f64()))
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn rat_sqrt(x: &BigRational) -> BigRational {
    let scale = BigInt::from(10u32).pow(40);
    let scaled = x.numer() * &scale * &scale / x.denom();
    BigRational::new(scaled.sqrt(), scale)
}

fn within_tol(got: f64, exact: &BigRational) -> bool {
    let diff = (rat(got) - exact).abs();
    if exact.is_zero() {
        return diff.is_zero();
    }
    diff * BigRational::from_integer(BigInt::from(10u32).pow(REL_TOL_EXPONENT)) <= exact.abs()
}

fn sum_squares(a: &[f64], b: &[f64]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = rat(x) - rat(y);
            &d * &d
        })
        .fold(BigRational::zero(), |acc, v| acc + v)
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let value = |rng: &mut ChaCha8Rng| rng.gen_range(-1e3..1e3) * 10f64.powi(rng.gen_range(-3..3));
    for i in 0..100 {
        let (a, b) = (value(&mut rng), value(&mut rng));
        if !within_tol(absolute_difference(a, b), &(rat(a) - rat(b))) {
            return outcome(false, format!("absolute difference instance {i}: {a} {b}"));
        }
        let exact_rel = (rat(a) - rat(b)) / rat(a);
        if !within_tol(relative_difference(a, b).unwrap(), &exact_rel) {
            return outcome(false, format!("relative difference instance {i}: {a} {b}"));
        }
        let len = rng.gen_range(1..200);
        let xs: Vec<f64> = (0..len).map(|_| value(&mut rng)).collect();
        let ys: Vec<f64> = (0..len).map(|_| value(&mut rng)).collect();
        let exact = rat_sqrt(&(sum_squares(&xs, &ys) / BigRational::from_integer(BigInt::from(len))));
        if !within_tol(rmse(&xs, &ys).unwrap(), &exact) {
            return outcome(false, format!("rmse instance {i}"));
        }
        let (r, c) = (rng.gen_range(1..20), rng.gen_range(1..20));
        let ma: Vec<Vec<f64>> = (0..r).map(|_| (0..c).map(|_| value(&mut rng)).collect()).collect();
        let mb: Vec<Vec<f64>> = (0..r).map(|_| (0..c).map(|_| value(&mut rng)).collect()).collect();
        let exact = rat_sqrt(&sum_squares(&ma.concat(), &mb.concat()));
        let got = frobenius_diff(&Matrix::from_rows(&ma).unwrap(), &Matrix::from_rows(&mb).unwrap()).unwrap();
        if !within_tol(got, &exact) {
            return outcome(false, format!("frobenius instance {i}"));
        }
    }
    outcome(true, format!("100 instances each, relative tolerance 1e-{REL_TOL_EXPONENT}"))
}

fn squared_error(item: &ClusterWorkItem) -> usize {
    (0..item.size())
        .map(|v| {
            let d = item.reference_degrees[v].abs_diff(item.total_degree(v));
            d * d
        })
        .sum()
}

fn addable_deficit_pair(item: &ClusterWorkItem) -> bool {
    let deficit = |v: usize| item.reference_degrees[v] > item.total_degree(v);
    (0..item.size()).any(|a| {
        deficit(a) && (a + 1..item.size()).any(|b| deficit(b) && !item.has_edge(a, b))
    })
}

fn matching_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut strict_cases = 0;
    for i in 0..100 {
        let n = rng.gen_range(2..40);
        let p = rng.gen_range(0.0..0.4);
        let g = random_graph(&mut rng, n, p);
        let edges: Vec<(usize, usize)> = g.edges().map(|e| (e.u(), e.v())).collect();
        let k = rng.gen_range(1..=4);
        let refs: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let mut item = ClusterWorkItem::standalone(n, k, &edges).with_reference_degrees(refs);
        stitch_components(&mut item, StitchMode::Combined);
        repair_mincut(&mut item, usize::MAX).unwrap();
        let before = squared_error(&item);
        let addable = addable_deficit_pair(&item);
        match_degrees_per_cluster(&mut item, DEFAULT_PARTNER_CAP);
        let after = squared_error(&item);
        if after > before || (addable && after >= before) {
            return outcome(false, format!("cluster {i}: squared error {before} -> {after}, addable={addable}"));
        }
        strict_cases += usize::from(addable);
    }
    outcome(true, format!("100 clusters, {strict_cases} with an addable deficit pair"))
}

fn determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let p = planted_partition(&PlantedConfig::small(3000, 40, 606));
    let labels = LabelMap::identity(3000);
    let (net, clu) = (dir.path().join("net.tsv"), dir.path().join("clu.tsv"));
    write_edge_list(&p.graph.edge_set(), &labels, &net).unwrap();
    write_clustering(&p.clustering, &labels, &clu).unwrap();
    let files = ["synthetic.tsv", "clustering.tsv", "report.json", "residual.csv", "shortfall.csv", "clusters.csv"];
    for variant in ["plus", "pp"] {
        let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
        for workers in [1, 4, 16] {
            let out = dir.path().join(format!("{variant}-{workers}"));
            let status = Command::new(env!("CARGO_BIN_EXE_reccs"))
                .args(["generate", "--variant", variant, "--seed", "77", "--workers", &workers.to_string()])
                .arg("--network").arg(&net)
                .arg("--clustering").arg(&clu)
                .arg("--out-dir").arg(&out)
                .status()
                .unwrap();
            if !status.success() {
                return outcome(false, format!("generate failed at {workers} workers"));
            }
            outputs.push(files.iter().map(|f| fs::read(Path::new(&out).join(f)).unwrap()).collect());
        }
        if outputs.iter().any(|o| o != &outputs[0]) {
            return outcome(false, format!("variant {variant}: outputs differ across worker counts"));
        }
    }
    outcome(true, "both variants byte-identical at workers 1, 4, 16")
}

fn block_matrix_conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for i in 0..50 {
        let n = rng.gen_range(2..300);
        let p = rng.gen_range(0.0..0.2);
        let edges: Vec<Edge> = random_graph(&mut rng, n, p).edges().collect();
        let labels = rng.gen_range(1..=20);
        let c = random_clustering(&mut rng, n, labels);
        let mats: Vec<_> = [1, 7, 1024]
            .iter()
            .map(|&chunk| build_block_matrix(&edges, &c, chunk).unwrap())
            .collect();
        if mats[0].total() != edges.len() as u64 {
            return outcome(false, format!("input {i}: total {} vs {} edges", mats[0].total(), edges.len()));
        }
        if mats.iter().any(|m| m != &mats[0]) {
            return outcome(false, format!("input {i}: chunk sizes disagree"));
        }
    }
    outcome(true, "50 inputs, chunk sizes 1, 7, 1024")
}

fn fidelity_ordering() -> Outcome {
    let mut plus_diff = 0.0;
    let mut pp_diff = 0.0;
    let mut plus_better = 0;
    for i in 0..FIDELITY_RUNS as u64 {
        let p = planted_partition(&PlantedConfig::small(800, 20, 800 + i));
        let cfg = PipelineConfig { seed: i, ..Default::default() };
        let prepared = prepare(&p.graph, &p.clustering, None, &cfg).unwrap();
        let opts = StatsOptions::default();
        let reference = compute_network_stats::<f64>(&p.graph, &p.clustering, &opts).unwrap();
        let run = |variant| {
            let out = finish(&prepared, variant, &cfg).unwrap();
            let syn = CsrGraph::from_edge_set(p.graph.n(), &out.edges).unwrap();
            let stats = compute_network_stats::<f64>(&syn, &p.clustering, &opts).unwrap();
            let diffs: Vec<f64> = stats
                .mincuts
                .iter()
                .zip(&reference.mincuts)
                .map(|(s, r)| s.1 as f64 - r.1 as f64)
                .collect();
            let report = compare_stats(&reference, &stats, Alignment::ByEntity).unwrap();
            let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
            (mean, report.get(Statistic::DegreeSequence).unwrap())
        };
        let (plus_mean, plus_rmse) = run(Variant::ReccsPlus);
        let (pp_mean, pp_rmse) = run(Variant::ReccsPp);
        plus_diff += plus_mean;
        pp_diff += pp_mean;
        plus_better += usize::from(plus_rmse <= pp_rmse);
    }
    let runs = FIDELITY_RUNS as f64;
    let (plus_diff, pp_diff) = (plus_diff / runs, pp_diff / runs);
    let share = plus_better as f64 / runs;
    outcome(
        pp_diff >= plus_diff && share >= FIDELITY_MIN_SHARE,
        format!(
            "mean mincut diff ++ {pp_diff:.4} vs + {plus_diff:.4}; + degree RMSE <= ++ in {plus_better}/{FIDELITY_RUNS} runs (need {FIDELITY_MIN_SHARE})"
        ),
    )
}

fn agreement_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for _ in 0..20 {
        let n = rng.gen_range(1..500);
        let c = random_clustering(&mut rng, n, 8);
        if nmi::<f64>(&c, &c).unwrap() != 1.0 || ari::<f64>(&c, &c).unwrap() != 1.0 {
            return outcome(false, "identical partitions did not score exactly 1");
        }
    }
    let a = random_clustering(&mut rng, 600, 12);
    let b = random_clustering(&mut rng, 600, 7);
    let (base_nmi, base_ari) = (nmi::<f64>(&a, &b).unwrap(), ari::<f64>(&a, &b).unwrap());
    let mut perm: Vec<i64> = (0..12).collect();
    for t in 0..100 {
        perm.shuffle(&mut rng);
        let relabelled = Clustering::new(a.assignment().iter().map(|c| ClusterId(perm[c.0 as usize] * 5 - 17)).collect());
        if nmi::<f64>(&relabelled, &b).unwrap() != base_nmi || ari::<f64>(&relabelled, &b).unwrap() != base_ari {
            return outcome(false, format!("permutation {t} changed a score"));
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x = random_clustering(&mut rng, 1000, 10);
        let y = random_clustering(&mut rng, 1000, 10);
        worst = worst.max(ari::<f64>(&x, &y).unwrap().abs());
    }
    outcome(worst <= ARI_NULL_BAND, format!("identity exact, 100 permutations invariant, max |ARI| on null pairs {worst:.4}"))
}

fn scaling() -> Outcome {
    let cfg = PlantedConfig { p_in: (0.1, 0.3), ..PlantedConfig::small(100_000, 1000, 1111) };
    let p = planted_partition(&cfg);
    // Best of SCALING_REPEATS wall times per configuration.
    let time = |variant, workers| {
        let cfg = PipelineConfig { variant, workers, seed: 5, ..Default::default() };
        (0..SCALING_REPEATS)
            .map(|_| {
                let start = Instant::now();
                run_pipeline(&p.graph, &p.clustering, None, &cfg).unwrap();
                start.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let pp_1 = time(Variant::ReccsPp, 1);
    let pp_8 = time(Variant::ReccsPp, 8);
    let plus_8 = time(Variant::ReccsPlus, 8);
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let ratio = pp_8 / pp_1;
    outcome(
        ratio <= SCALING_MAX_RATIO && pp_8 <= plus_8,
        format!(
            "{} edges, {cores} cores: ++ 1 worker {pp_1:.2}s, 8 workers {pp_8:.2}s (ratio {ratio:.2}, need <= {SCALING_MAX_RATIO}); + 8 workers {plus_8:.2}s",
            p.graph.m()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("structural guarantees", structural_guarantees),
        ("split identity", split_identity),
        ("min-cut correctness", mincut_correctness),
        ("difference, RMSE and Frobenius oracles", metric_oracles),
        ("degree-matching monotonicity", matching_monotonicity),
        ("determinism across workers", determinism),
        ("block-matrix conservation", block_matrix_conservation),
        ("fidelity ordering", fidelity_ordering),
        ("NMI/ARI sanity", agreement_sanity),
        ("scaling", scaling),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let tag = if o.ok { "PASS" } else { "FAIL" };
        println!("{tag} {name} ({:.1}s): {}", start.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.ok);
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
