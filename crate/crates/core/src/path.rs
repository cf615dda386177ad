use std::fmt::Write as _;

use thiserror::Error;

use crate::constraints::{ConstraintError, ConstraintSet, MetricAccumulator};
use crate::graph::{EdgeId, GraphView, NodeId};

/// A loop-free path together with its accumulated path metrics and the
/// bottleneck value of every link metric.
#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub accumulated: MetricAccumulator,
    /// Component-wise minimum over traversed edges; `+inf` for an empty path.
    pub min_link_metrics: Vec<f64>,
}

impl PathResult {
    /// The zero-hop path at `src`.
    pub fn trivial<G: GraphView + ?Sized>(g: &G, src: NodeId) -> Self {
        Self {
            nodes: vec![src],
            edges: Vec::new(),
            accumulated: MetricAccumulator::zero(g.path_arity()),
            min_link_metrics: vec![f64::INFINITY; g.link_arity()],
        }
    }

    /// Builds the path that starts at `src` and follows `edges`, computing
    /// sums and minima from the view's metrics.
    pub fn from_edges<G: GraphView + ?Sized>(g: &G, src: NodeId, edges: Vec<EdgeId>) -> Self {
        let mut p = Self::trivial(g, src);
        for &e in &edges {
            let (s, d) = g.endpoints(e);
            debug_assert_eq!(s, *p.nodes.last().unwrap());
            p.nodes.push(d);
            p.accumulated.extend(g.path_metrics(e));
            for (m, &v) in p.min_link_metrics.iter_mut().zip(g.link_metrics(e)) {
                *m = m.min(v);
            }
        }
        p.edges = edges;
        p
    }

    pub fn hop_count(&self) -> usize {
        self.edges.len()
    }

    pub fn src(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn dst(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    pub fn is_loop_free(&self) -> bool {
        let mut seen: Vec<NodeId> = self.nodes.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Re-verifies every bound from the stored sums and minima.
    pub fn satisfies(&self, c: &ConstraintSet) -> bool {
        c.links_ok(&self.min_link_metrics) && c.sums_ok(&self.accumulated.sums)
    }

    /// Consistency of the stored summary with the view it was computed on.
    pub fn is_consistent_with<G: GraphView + ?Sized>(&self, g: &G) -> bool {
        if self.nodes.len() != self.edges.len() + 1 {
            return false;
        }
        for (i, &e) in self.edges.iter().enumerate() {
            if g.endpoints(e) != (self.nodes[i], self.nodes[i + 1]) {
                return false;
            }
        }
        let again = Self::from_edges(g, self.nodes[0], self.edges.clone());
        again.accumulated == self.accumulated && again.min_link_metrics == self.min_link_metrics
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("destination unreachable")]
    Unreachable,
    #[error("no loop-free path satisfies the constraints")]
    Infeasible,
    #[error("negative weight cycle detected")]
    NegativeWeightCycle,
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("negative path metric on edge {0}")]
    NegativeMetric(usize),
    #[error("node {0} out of range")]
    InvalidNode(usize),
    #[error("solver requires exactly one path bound, got {0}")]
    PathBoundCount(usize),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

impl SolveError {
    /// Status token used in result lines.
    pub fn status(&self) -> &'static str {
        match self {
            SolveError::Unreachable => "unreachable",
            SolveError::Infeasible => "infeasible",
            SolveError::NegativeWeightCycle => "negcycle",
            SolveError::ResourceLimit(_) => "limit",
            _ => "error",
        }
    }

    /// Whether the failure means "no path for this request" as opposed to a
    /// misuse of the solver.
    pub fn is_no_path(&self) -> bool {
        matches!(self, SolveError::Unreachable | SolveError::Infeasible)
    }
}

pub type SolveResult = Result<PathResult, SolveError>;

pub(crate) fn check_query<G: GraphView + ?Sized>(
    g: &G,
    src: NodeId,
    dst: NodeId,
    c: &ConstraintSet,
) -> Result<(), SolveError> {
    for n in [src, dst] {
        if n.0 >= g.node_count() {
            return Err(SolveError::InvalidNode(n.0));
        }
    }
    c.validate(g.link_arity(), g.path_arity())?;
    Ok(())
}

fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

/// One-line result record:
/// `status=<..> hops=<n> path=<id,..> sums=<v,..> mins=<v,..> micros=<t>`.
///
/// `name` maps node ids to their printed form.
pub fn format_result_line(result: &SolveResult, micros: u128, name: impl Fn(NodeId) -> String) -> String {
    let mut s = String::new();
    match result {
        Ok(p) => {
            let path: Vec<String> = p.nodes.iter().map(|&n| name(n)).collect();
            let sums: Vec<String> = p.accumulated.sums.iter().map(|&v| fmt_num(v)).collect();
            let mins: Vec<String> = p.min_link_metrics.iter().map(|&v| fmt_num(v)).collect();
            write!(
                s,
                "status=ok hops={} path={} sums={} mins={} micros={micros}",
                p.hop_count(),
                path.join(","),
                sums.join(","),
                mins.join(",")
            )
            .unwrap();
        }
        Err(e) => {
            write!(s, "status={} hops=0 path= sums= mins= micros={micros}", e.status()).unwrap();
        }
    }
    s
}
