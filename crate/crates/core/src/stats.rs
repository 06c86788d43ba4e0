//! Per-cluster reference statistics: size, intra-cluster edge count and
//! global minimum cut.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterId, Clustering};
use crate::error::{Error, Result};
use crate::graph::CsrGraph;
use crate::mincut::global_min_cut;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterStats {
    pub cluster: ClusterId,
    pub n: usize,
    pub m: usize,
    pub mincut: usize,
}

/// Statistics for every cluster of size > 1, ascending by cluster id.
///
/// Clusters larger than `size_limit` abort with [`Error::ClusterTooLarge`].
pub fn compute_stats(g: &CsrGraph, c: &Clustering, size_limit: usize) -> Result<Vec<ClusterStats>> {
    let clusters: Vec<_> = c.non_singleton_clusters().collect();
    clusters
        .par_iter()
        .map(|&(cluster, members)| {
            if members.len() > size_limit {
                return Err(Error::ClusterTooLarge {
                    cluster,
                    size: members.len(),
                    limit: size_limit,
                });
            }
            let (sub, _) = g.induced_subgraph(members)?;
            Ok(ClusterStats {
                cluster,
                n: sub.n(),
                m: sub.m(),
                mincut: global_min_cut(&sub).value,
            })
        })
        .collect()
}

/// Degree of every node within the clustered subnetwork.
pub fn reference_degrees(clustered: &CsrGraph) -> Vec<usize> {
    clustered.degrees()
}

pub fn write_stats_csv(stats: &[ClusterStats], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    if stats.is_empty() {
        writer
            .write_record(["cluster", "n", "m", "mincut"])
            .map_err(|e| csv_error(path, e))?;
    }
    for s in stats {
        writer.serialize(s).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

pub fn read_stats_csv(path: &Path) -> Result<Vec<ClusterStats>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut stats = Vec::new();
    for (i, row) in reader.deserialize().enumerate() {
        let row: ClusterStats = row.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            message: e.to_string(),
        })?;
        stats.push(row);
    }
    stats.sort_by_key(|s| s.cluster);
    Ok(stats)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}
