//! Two-column text formats: edge lists and `node cluster` clusterings.
//!
//! Lines are split on whitespace; blank lines and lines starting with `#` or
//! `%` are skipped. External node labels are integers and are relabelled to
//! dense ids in ascending label order.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::info;

use crate::clustering::{ClusterId, Clustering};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, Edge, EdgeSet, NodeId};

/// Bijection between dense internal ids and external integer labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelMap {
    labels: Vec<i64>,
    index: HashMap<i64, NodeId>,
}

impl LabelMap {
    /// Builds a map from arbitrary labels; ids follow ascending label order.
    pub fn from_labels(labels: impl IntoIterator<Item = i64>) -> Self {
        let mut labels: Vec<i64> = labels.into_iter().collect();
        labels.sort_unstable();
        labels.dedup();
        let index = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        LabelMap { labels, index }
    }

    /// Identity labelling of `0..n`.
    pub fn identity(n: usize) -> Self {
        Self::from_labels(0..n as i64)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn label(&self, node: NodeId) -> i64 {
        self.labels[node]
    }

    #[inline]
    pub fn id(&self, label: i64) -> Option<NodeId> {
        self.index.get(&label).copied()
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }
}

/// One parsed record with its 1-based source line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Record {
    pub line: usize,
    pub a: i64,
    pub b: i64,
}

/// Reads every two-column integer record from `path`.
pub fn read_records(path: &Path) -> Result<Vec<Record>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let records = parse_records(BufReader::new(file), path)?;
    if records.is_empty() {
        return Err(Error::EmptyInput(path.to_path_buf()));
    }
    Ok(records)
}

fn parse_records(reader: impl BufRead, path: &Path) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(parse_err(format!(
                "expected two columns, found {}",
                trimmed.split_whitespace().count()
            )));
        };
        let parse = |tok: &str| {
            tok.parse::<i64>()
                .map_err(|_| parse_err(format!("`{tok}` is not an integer")))
        };
        records.push(Record {
            line: line_no,
            a: parse(a)?,
            b: parse(b)?,
        });
    }
    Ok(records)
}

/// Result of reading an edge list.
#[derive(Debug, Clone)]
pub struct LoadedEdges {
    pub edges: EdgeSet,
    pub labels: LabelMap,
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Loads an edge list, relabelling nodes densely, dropping self-loops and
/// duplicate edges.
pub fn load_edge_list(path: &Path) -> Result<LoadedEdges> {
    let records = read_records(path)?;
    let labels = LabelMap::from_labels(records.iter().flat_map(|r| [r.a, r.b]));
    let (edges, self_loops, duplicates) = canonicalize(&records, |l| labels.id(l))
        .map_err(|label| Error::UnknownNode(label.to_string()))?;
    log_drops(path, self_loops, duplicates);
    Ok(LoadedEdges {
        edges,
        labels,
        self_loops,
        duplicates,
    })
}

/// Loads an edge list over an existing label universe. Labels outside it
/// are reported as [`Error::UnknownNode`].
pub fn load_edge_list_in(path: &Path, labels: &LabelMap) -> Result<LoadedEdges> {
    let records = read_records(path)?;
    let (edges, self_loops, duplicates) = canonicalize(&records, |l| labels.id(l))
        .map_err(|label| Error::UnknownNode(label.to_string()))?;
    log_drops(path, self_loops, duplicates);
    Ok(LoadedEdges {
        edges,
        labels: labels.clone(),
        self_loops,
        duplicates,
    })
}

fn log_drops(path: &Path, self_loops: usize, duplicates: usize) {
    if self_loops + duplicates > 0 {
        info!(
            "{}: dropped {self_loops} self-loops and {duplicates} duplicate edges",
            path.display()
        );
    }
}

fn canonicalize(
    records: &[Record],
    lookup: impl Fn(i64) -> Option<NodeId>,
) -> std::result::Result<(EdgeSet, usize, usize), i64> {
    let mut edges = EdgeSet::with_capacity(records.len());
    let mut self_loops = 0;
    let mut duplicates = 0;
    for r in records {
        let a = lookup(r.a).ok_or(r.a)?;
        let b = lookup(r.b).ok_or(r.b)?;
        match Edge::new(a, b) {
            None => self_loops += 1,
            Some(e) => {
                if !edges.insert(e) {
                    duplicates += 1;
                }
            }
        }
    }
    Ok((edges, self_loops, duplicates))
}

/// Writes `edges` as tab-separated external labels, one edge per line,
/// sorted by endpoints.
pub fn write_edge_list(edges: &EdgeSet, labels: &LabelMap, path: &Path) -> Result<()> {
    let mut rows: Vec<(i64, i64)> = edges
        .iter()
        .map(|e| {
            let (a, b) = (labels.label(e.u()), labels.label(e.v()));
            (a.min(b), a.max(b))
        })
        .collect();
    rows.sort_unstable();
    write_rows(path, rows.into_iter())
}

/// Reads a `node cluster` file. Returns the label universe (exactly the
/// nodes named in the file) and the clustering over it.
pub fn load_clustering(path: &Path) -> Result<(LabelMap, Clustering)> {
    let records = read_records(path)?;
    let labels = LabelMap::from_labels(records.iter().map(|r| r.a));
    let mut assignment: Vec<Option<ClusterId>> = vec![None; labels.len()];
    for r in &records {
        let node = labels.id(r.a).expect("label collected above");
        let cluster = ClusterId(r.b);
        match assignment[node] {
            Some(prev) if prev != cluster => {
                return Err(Error::ConflictingAssignment {
                    node: r.a.to_string(),
                    first: prev,
                    second: cluster,
                });
            }
            _ => assignment[node] = Some(cluster),
        }
    }
    let assignment = assignment.into_iter().map(Option::unwrap).collect();
    Ok((labels, Clustering::new(assignment)))
}

/// Writes `node\tcluster` lines sorted by node label.
pub fn write_clustering(clustering: &Clustering, labels: &LabelMap, path: &Path) -> Result<()> {
    let mut rows: Vec<(i64, i64)> = (0..clustering.len())
        .map(|v| (labels.label(v), clustering.cluster_of(v).0))
        .collect();
    rows.sort_unstable();
    write_rows(path, rows.into_iter())
}

fn write_rows(path: &Path, rows: impl Iterator<Item = (i64, i64)>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (a, b) in rows {
        writeln!(out, "{a}\t{b}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// A reference network together with its clustering over one node universe.
#[derive(Debug, Clone)]
pub struct Network {
    pub labels: LabelMap,
    pub graph: CsrGraph,
    pub clustering: Clustering,
}

impl Network {
    /// Loads an edge list and a clustering. The clustering defines the node
    /// universe and must cover every node named in the edge list.
    pub fn load(edge_path: &Path, clustering_path: &Path) -> Result<Network> {
        let (labels, clustering) = load_clustering(clustering_path)?;
        let records = read_records(edge_path)?;
        let (edges, self_loops, duplicates) = canonicalize(&records, |l| labels.id(l))
            .map_err(|label| Error::MissingAssignment(label.to_string()))?;
        log_drops(edge_path, self_loops, duplicates);
        let graph = CsrGraph::from_edge_set(labels.len(), &edges)?;
        Ok(Network {
            labels,
            graph,
            clustering,
        })
    }

    /// In-memory network with identity labels.
    pub fn from_parts(graph: CsrGraph, clustering: Clustering) -> Network {
        assert_eq!(graph.n(), clustering.len(), "clustering must cover the graph");
        Network {
            labels: LabelMap::identity(graph.n()),
            graph,
            clustering,
        }
    }
}
