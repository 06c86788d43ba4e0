//! Fidelity of a synthetic network to its reference, and agreement between
//! clusterings.

pub mod agreement;
pub mod metrics;
pub mod network_stats;

use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::graph::CsrGraph;
use crate::scalar::Scalar;

pub use agreement::{ari, nmi};
pub use metrics::{
    absolute_difference, frobenius_diff, relative_difference, rmse, sequence_rmse, Alignment,
    Matrix,
};
pub use network_stats::{
    clustering_coefficients, compute_network_stats, diameter, mixing_parameter, node_triangles,
    LocalCoefficientMode, MixingMode, NetworkStats, StatsOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    DegreeSequence,
    MincutSequence,
    Diameter,
    OutlierClusteredEdges,
    OutlierDegreeSequence,
    MeanLocalClustering,
    GlobalClustering,
    MixingParameter,
}

impl Statistic {
    pub const ALL: [Statistic; 8] = [
        Statistic::DegreeSequence,
        Statistic::MincutSequence,
        Statistic::Diameter,
        Statistic::OutlierClusteredEdges,
        Statistic::OutlierDegreeSequence,
        Statistic::MeanLocalClustering,
        Statistic::GlobalClustering,
        Statistic::MixingParameter,
    ];

    /// The error metric each statistic is judged by.
    pub fn metric(self) -> MetricKind {
        match self {
            Statistic::DegreeSequence
            | Statistic::MincutSequence
            | Statistic::OutlierDegreeSequence => MetricKind::Rmse,
            Statistic::Diameter | Statistic::OutlierClusteredEdges => MetricKind::Relative,
            Statistic::MeanLocalClustering
            | Statistic::GlobalClustering
            | Statistic::MixingParameter => MetricKind::Absolute,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Rmse,
    Relative,
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricEntry<T> {
    pub statistic: Statistic,
    pub metric: MetricKind,
    /// `None` when the metric is undefined (relative difference against 0).
    pub value: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport<T> {
    pub entries: Vec<MetricEntry<T>>,
    pub alignment: Alignment,
    pub mixing_mode: MixingMode,
    pub diameter_exact: bool,
}

impl<T: Copy> MetricReport<T> {
    pub fn get(&self, statistic: Statistic) -> Option<T> {
        self.entries
            .iter()
            .find(|e| e.statistic == statistic)
            .and_then(|e| e.value)
    }

    /// CSV body with header `statistic,metric,value`; undefined values are empty.
    pub fn to_csv(&self) -> String
    where
        T: std::fmt::Display,
    {
        let mut out = String::from("statistic,metric,value\n");
        for e in &self.entries {
            let value = e.value.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{}\n", e.statistic.name(), e.metric.name(), value));
        }
        out
    }
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::DegreeSequence => "degree_sequence",
            Statistic::MincutSequence => "mincut_sequence",
            Statistic::Diameter => "diameter",
            Statistic::OutlierClusteredEdges => "outlier_clustered_edges",
            Statistic::OutlierDegreeSequence => "outlier_degree_sequence",
            Statistic::MeanLocalClustering => "mean_local_clustering",
            Statistic::GlobalClustering => "global_clustering",
            Statistic::MixingParameter => "mixing_parameter",
        }
    }
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Rmse => "rmse",
            MetricKind::Relative => "relative",
            MetricKind::Absolute => "absolute",
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CompareOptions {
    pub stats: StatsOptions,
    pub alignment: Alignment,
}

/// Compares `synthetic` against `reference`, both carrying the clustering `c`.
pub fn compare_networks<T: Scalar>(
    reference: &CsrGraph,
    synthetic: &CsrGraph,
    c: &Clustering,
    opts: &CompareOptions,
) -> Result<MetricReport<T>> {
    if reference.n() != synthetic.n() {
        return Err(Error::UniverseMismatch {
            left: reference.n(),
            right: synthetic.n(),
        });
    }
    let a = compute_network_stats::<T>(reference, c, &opts.stats)?;
    let b = compute_network_stats::<T>(synthetic, c, &opts.stats)?;
    compare_stats(&a, &b, opts.alignment)
}

/// Applies each statistic's metric to two precomputed stat sets.
pub fn compare_stats<T: Scalar>(
    a: &NetworkStats<T>,
    b: &NetworkStats<T>,
    alignment: Alignment,
) -> Result<MetricReport<T>> {
    let cuts = |s: &NetworkStats<T>| s.mincuts.iter().map(|&(_, k)| k).collect::<Vec<_>>();
    if alignment == Alignment::ByEntity
        && a.mincuts.iter().map(|m| m.0).ne(b.mincuts.iter().map(|m| m.0))
    {
        return Err(Error::LengthMismatch {
            left: a.mincuts.len(),
            right: b.mincuts.len(),
        });
    }
    let count = T::from_count;
    let entries = Statistic::ALL
        .iter()
        .map(|&statistic| {
            let value = match statistic {
                Statistic::DegreeSequence => Some(sequence_rmse(&a.degrees, &b.degrees, alignment)?),
                Statistic::MincutSequence => Some(sequence_rmse(&cuts(a), &cuts(b), alignment)?),
                Statistic::OutlierDegreeSequence => Some(sequence_rmse(
                    &a.outlier_degrees,
                    &b.outlier_degrees,
                    alignment,
                )?),
                Statistic::Diameter => relative_difference(count(a.diameter), count(b.diameter)),
                Statistic::OutlierClusteredEdges => relative_difference(
                    count(a.outlier_clustered_edges),
                    count(b.outlier_clustered_edges),
                ),
                Statistic::MeanLocalClustering => Some(absolute_difference(
                    a.mean_local_clustering,
                    b.mean_local_clustering,
                )),
                Statistic::GlobalClustering => {
                    Some(absolute_difference(a.global_clustering, b.global_clustering))
                }
                Statistic::MixingParameter => Some(absolute_difference(a.mixing, b.mixing)),
            };
            Ok(MetricEntry {
                statistic,
                metric: statistic.metric(),
                value,
            })
        })
        .collect::<Result<_>>()?;
    Ok(MetricReport {
        entries,
        alignment,
        mixing_mode: a.mixing_mode,
        diameter_exact: a.diameter_exact && b.diameter_exact,
    })
}
