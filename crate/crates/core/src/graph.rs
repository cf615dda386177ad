//! Directed substrate graph with typed per-edge metrics.
//!
//! Every edge carries `link_arity` link metrics (concave, e.g. bandwidth) and
//! `path_arity` path metrics (additive, e.g. delay). Arity is declared once per
//! graph. Adjacency is kept sorted by `(neighbor, edge)` so every traversal in
//! the crate iterates neighbors in the same order.

use std::fmt;

use thiserror::Error;

/// Dense node index in `[0, node_count)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Edge handle; equals the position of the edge in the construction input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeMetrics {
    pub link: Vec<f64>,
    pub path: Vec<f64>,
}

impl EdgeMetrics {
    pub fn new(link: Vec<f64>, path: Vec<f64>) -> Self {
        Self { link, path }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSpec {
    pub src: NodeId,
    pub dst: NodeId,
    pub metrics: EdgeMetrics,
}

impl EdgeSpec {
    pub fn new(src: usize, dst: usize, link: Vec<f64>, path: Vec<f64>) -> Self {
        Self {
            src: NodeId(src),
            dst: NodeId(dst),
            metrics: EdgeMetrics::new(link, path),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {edge}: node {node} out of range (graph has {node_count} nodes)")]
    IndexOutOfRange {
        edge: usize,
        node: usize,
        node_count: usize,
    },
    #[error("edge {edge}: self-loop on node {node}")]
    SelfLoop { edge: usize, node: usize },
    #[error("{what}: expected {expected} values, got {got}")]
    ArityMismatch {
        what: String,
        expected: usize,
        got: usize,
    },
    #[error("edge {edge}: link metric {index} is negative or not finite ({value})")]
    InvalidLinkMetric { edge: usize, index: usize, value: f64 },
}

/// Read access shared by the immutable graph and the residual overlay.
///
/// Solvers are written against this trait so the same code runs on base
/// capacities and on residual capacities.
pub trait GraphView {
    fn node_count(&self) -> usize;
    fn edge_count(&self) -> usize;
    fn link_arity(&self) -> usize;
    fn path_arity(&self) -> usize;
    /// Outgoing `(neighbor, edge)` pairs sorted by neighbor then edge.
    fn out_edges(&self, u: NodeId) -> &[(NodeId, EdgeId)];
    /// Incoming `(source, edge)` pairs sorted by source then edge.
    fn in_edges(&self, v: NodeId) -> &[(NodeId, EdgeId)];
    fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId);
    fn link_metrics(&self, e: EdgeId) -> &[f64];
    fn path_metrics(&self, e: EdgeId) -> &[f64];
}

#[derive(Clone, Debug)]
pub struct PhysicalGraph {
    node_count: usize,
    link_arity: usize,
    path_arity: usize,
    endpoints: Vec<(NodeId, NodeId)>,
    link: Vec<f64>,
    path: Vec<f64>,
    out_adj: Vec<Vec<(NodeId, EdgeId)>>,
    in_adj: Vec<Vec<(NodeId, EdgeId)>>,
    node_capacity: Vec<f64>,
    labels: Vec<Option<String>>,
}

impl PhysicalGraph {
    /// Builds a graph, validating ranges, self-loops and metric arities.
    ///
    /// Edge handles follow input order. `node_capacity` may be empty, in which
    /// case every node gets capacity 0.
    pub fn build(
        node_count: usize,
        link_arity: usize,
        path_arity: usize,
        edges: Vec<EdgeSpec>,
        node_capacity: Vec<f64>,
    ) -> Result<Self, GraphError> {
        let node_capacity = if node_capacity.is_empty() {
            vec![0.0; node_count]
        } else if node_capacity.len() != node_count {
            return Err(GraphError::ArityMismatch {
                what: "node capacities".into(),
                expected: node_count,
                got: node_capacity.len(),
            });
        } else {
            node_capacity
        };

        let mut endpoints = Vec::with_capacity(edges.len());
        let mut link = Vec::with_capacity(edges.len() * link_arity);
        let mut path = Vec::with_capacity(edges.len() * path_arity);
        let mut out_adj = vec![Vec::new(); node_count];
        let mut in_adj = vec![Vec::new(); node_count];

        for (i, e) in edges.into_iter().enumerate() {
            for n in [e.src, e.dst] {
                if n.0 >= node_count {
                    return Err(GraphError::IndexOutOfRange {
                        edge: i,
                        node: n.0,
                        node_count,
                    });
                }
            }
            if e.src == e.dst {
                return Err(GraphError::SelfLoop { edge: i, node: e.src.0 });
            }
            if e.metrics.link.len() != link_arity {
                return Err(GraphError::ArityMismatch {
                    what: format!("edge {i} link metrics"),
                    expected: link_arity,
                    got: e.metrics.link.len(),
                });
            }
            if e.metrics.path.len() != path_arity {
                return Err(GraphError::ArityMismatch {
                    what: format!("edge {i} path metrics"),
                    expected: path_arity,
                    got: e.metrics.path.len(),
                });
            }
            for (k, &v) in e.metrics.link.iter().enumerate() {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(GraphError::InvalidLinkMetric {
                        edge: i,
                        index: k,
                        value: v,
                    });
                }
            }
            let id = EdgeId(i);
            endpoints.push((e.src, e.dst));
            link.extend_from_slice(&e.metrics.link);
            path.extend_from_slice(&e.metrics.path);
            out_adj[e.src.0].push((e.dst, id));
            in_adj[e.dst.0].push((e.src, id));
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }

        Ok(Self {
            node_count,
            link_arity,
            path_arity,
            endpoints,
            link,
            path,
            out_adj,
            in_adj,
            node_capacity,
            labels: vec![None; node_count],
        })
    }

    pub fn node_capacity(&self, n: NodeId) -> f64 {
        self.node_capacity[n.0]
    }

    pub fn node_capacities(&self) -> &[f64] {
        &self.node_capacity
    }

    pub fn edge_metrics(&self, e: EdgeId) -> EdgeMetrics {
        EdgeMetrics::new(self.link_metrics(e).to_vec(), self.path_metrics(e).to_vec())
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.endpoints.len()).map(EdgeId)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count).map(NodeId)
    }

    /// Reconstructs the construction input, in handle order.
    pub fn edge_specs(&self) -> Vec<EdgeSpec> {
        self.edges()
            .map(|e| {
                let (s, d) = self.endpoints[e.0];
                EdgeSpec {
                    src: s,
                    dst: d,
                    metrics: self.edge_metrics(e),
                }
            })
            .collect()
    }

    /// Optional human-facing label attached to a node.
    pub fn label(&self, n: NodeId) -> Option<&str> {
        self.labels.get(n.0).and_then(|l| l.as_deref())
    }

    pub fn set_label(&mut self, n: NodeId, label: impl Into<String>) {
        self.labels[n.0] = Some(label.into());
    }

    /// Label if present, numeric id otherwise.
    pub fn display_name(&self, n: NodeId) -> String {
        self.label(n).map(str::to_owned).unwrap_or_else(|| n.to_string())
    }

    /// Mean out-degree, i.e. directed edges per node.
    pub fn avg_out_degree(&self) -> f64 {
        if self.node_count == 0 {
            0.0
        } else {
            self.endpoints.len() as f64 / self.node_count as f64
        }
    }

    /// Largest value of path metric `index` over all edges.
    pub fn max_path_metric(&self, index: usize) -> Option<f64> {
        self.edges()
            .map(|e| self.path_metrics(e)[index])
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }

    /// True when every path metric of every edge is nonnegative.
    pub fn path_metrics_nonnegative(&self) -> bool {
        self.path.iter().all(|&v| v >= 0.0)
    }
}

impl GraphView for PhysicalGraph {
    fn node_count(&self) -> usize {
        self.node_count
    }
    fn edge_count(&self) -> usize {
        self.endpoints.len()
    }
    fn link_arity(&self) -> usize {
        self.link_arity
    }
    fn path_arity(&self) -> usize {
        self.path_arity
    }
    fn out_edges(&self, u: NodeId) -> &[(NodeId, EdgeId)] {
        &self.out_adj[u.0]
    }
    fn in_edges(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.in_adj[v.0]
    }
    fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.endpoints[e.0]
    }
    fn link_metrics(&self, e: EdgeId) -> &[f64] {
        let k = self.link_arity;
        &self.link[e.0 * k..(e.0 + 1) * k]
    }
    fn path_metrics(&self, e: EdgeId) -> &[f64] {
        let k = self.path_arity;
        &self.path[e.0 * k..(e.0 + 1) * k]
    }
}

/// Emits both directions of an undirected link with equal metrics.
pub fn symmetric_pair(a: usize, b: usize, link: Vec<f64>, path: Vec<f64>) -> [EdgeSpec; 2] {
    [
        EdgeSpec::new(a, b, link.clone(), path.clone()),
        EdgeSpec::new(b, a, link, path),
    ]
}
