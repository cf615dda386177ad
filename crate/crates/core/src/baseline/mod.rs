//! Comparison solvers: Extended Dijkstra with pre-routing, Yen-style
//! k-shortest loop-free paths, and exhaustive simple-path search.

mod search;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::constraints::ConstraintSet;
use crate::graph::{EdgeId, GraphView, NodeId};
use crate::path::{check_query, PathResult, SolveError, SolveResult};

use search::{shortest_path, Query, Weight};

/// Least-path-metric route over edges meeting the link bounds.
///
/// Hop count is not minimized; equal-metric routes are resolved by fewer hops,
/// then lexicographically.
pub fn solve_edijkstra<G: GraphView + ?Sized>(g: &G, src: NodeId, dst: NodeId, c: &ConstraintSet) -> SolveResult {
    check_query(g, src, dst, c)?;
    if c.path_count() != 1 {
        return Err(SolveError::PathBoundCount(c.path_count()));
    }
    let bound = c.path_bounds()[0];
    let usable = c.prune(g);
    if let Some(i) = (0..g.edge_count()).find(|&i| usable[i] && g.path_metrics(EdgeId(i))[bound.metric] < 0.0) {
        return Err(SolveError::NegativeMetric(i));
    }
    let q = Query {
        weight: Weight::PathMetric(bound.metric),
        hop_tiebreak: true,
        usable_edge: &|e| usable[e.0],
        banned_node: &|_| false,
    };
    let edges = shortest_path(g, src, dst, &q).ok_or(SolveError::Unreachable)?;
    let p = PathResult::from_edges(g, src, edges);
    if c.sums_ok(&p.accumulated.sums) {
        Ok(p)
    } else {
        Err(SolveError::Infeasible)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KspRanking {
    #[default]
    ByHops,
    ByPathMetric(usize),
}

impl fmt::Display for KspRanking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KspRanking::ByHops => write!(f, "by_hops"),
            KspRanking::ByPathMetric(i) => write!(f, "by_path_metric({i})"),
        }
    }
}

impl FromStr for KspRanking {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "by_hops" {
            return Ok(KspRanking::ByHops);
        }
        let inner = s
            .strip_prefix("by_path_metric(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("by_path_metric"));
        match inner {
            Some("") => Ok(KspRanking::ByPathMetric(0)),
            Some(i) => i
                .parse()
                .map(KspRanking::ByPathMetric)
                .map_err(|_| format!("bad ranking `{s}`")),
            None => Err(format!("unknown ranking `{s}` (expected by_hops or by_path_metric(<i>))")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KspConfig {
    pub k: usize,
    pub ranking: KspRanking,
}

impl KspConfig {
    pub fn new(k: usize, ranking: KspRanking) -> Self {
        assert!(k >= 1, "k must be at least 1");
        Self { k, ranking }
    }
}

struct Ranked {
    cost: f64,
    path: PathResult,
}

impl Ranked {
    fn new(path: PathResult, ranking: KspRanking, g: &(impl GraphView + ?Sized)) -> Self {
        let cost = match ranking {
            KspRanking::ByHops => path.hop_count() as f64,
            KspRanking::ByPathMetric(i) => path.edges.iter().map(|&e| g.path_metrics(e)[i]).sum(),
        };
        Self { cost, path }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.path.nodes.cmp(&other.path.nodes))
            .then_with(|| self.path.edges.cmp(&other.path.edges))
    }
}

/// First `cfg.k` loop-free `src -> dst` paths in ranking order over the whole
/// graph (no pre-routing), ties broken lexicographically.
pub fn ksp_candidates<G: GraphView + ?Sized>(g: &G, src: NodeId, dst: NodeId, cfg: &KspConfig) -> Vec<PathResult> {
    let weight = match cfg.ranking {
        KspRanking::ByHops => Weight::Hops,
        KspRanking::ByPathMetric(i) => Weight::PathMetric(i),
    };
    let first = {
        let q = Query {
            weight,
            hop_tiebreak: false,
            usable_edge: &|_| true,
            banned_node: &|_| false,
        };
        match shortest_path(g, src, dst, &q) {
            Some(edges) => PathResult::from_edges(g, src, edges),
            None => return Vec::new(),
        }
    };
    let mut accepted: Vec<PathResult> = vec![first];
    let mut pending: Vec<Ranked> = Vec::new();

    while accepted.len() < cfg.k {
        let prev = accepted.last().unwrap().clone();
        for i in 0..prev.hop_count() {
            let spur = prev.nodes[i];
            let root_edges = &prev.edges[..i];
            let banned_edges: Vec<EdgeId> = accepted
                .iter()
                .filter(|p| p.edges.len() > i && p.edges[..i] == *root_edges)
                .map(|p| p.edges[i])
                .collect();
            let root_nodes = &prev.nodes[..i];
            let q = Query {
                weight,
                hop_tiebreak: false,
                usable_edge: &|e| !banned_edges.contains(&e),
                banned_node: &|n| root_nodes.contains(&n),
            };
            let Some(spur_edges) = shortest_path(g, spur, dst, &q) else {
                continue;
            };
            let mut edges = root_edges.to_vec();
            edges.extend(spur_edges);
            let cand = PathResult::from_edges(g, src, edges);
            let dup = |p: &PathResult| p.edges == cand.edges;
            if accepted.iter().any(dup) || pending.iter().any(|r| dup(&r.path)) {
                continue;
            }
            pending.push(Ranked::new(cand, cfg.ranking, g));
        }
        let Some(best) = (0..pending.len()).min_by(|&a, &b| pending[a].cmp(&pending[b])) else {
            break;
        };
        accepted.push(pending.swap_remove(best).path);
    }
    accepted
}

/// Returns the first of the `k` ranked candidates that meets every bound.
pub fn solve_ksp<G: GraphView + ?Sized>(
    g: &G,
    src: NodeId,
    dst: NodeId,
    c: &ConstraintSet,
    cfg: &KspConfig,
) -> SolveResult {
    check_query(g, src, dst, c)?;
    if let KspRanking::ByPathMetric(i) = cfg.ranking {
        if i >= g.path_arity() {
            return Err(crate::constraints::ConstraintError::IndexOutOfRange {
                kind: "ranking",
                index: i,
                arity: g.path_arity(),
            }
            .into());
        }
    }
    let cands = ksp_candidates(g, src, dst, cfg);
    if cands.is_empty() {
        return Err(SolveError::Unreachable);
    }
    cands.into_iter().find(|p| p.satisfies(c)).ok_or(SolveError::Infeasible)
}

#[derive(Clone, Copy, Debug)]
pub struct ExhaustiveConfig {
    /// Largest graph the search accepts.
    pub max_nodes: usize,
}

impl Default for ExhaustiveConfig {
    fn default() -> Self {
        Self { max_nodes: 14 }
    }
}

struct Dfs<'a, G: GraphView + ?Sized> {
    g: &'a G,
    c: &'a ConstraintSet,
    dst: NodeId,
    on_path: Vec<bool>,
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,
    best: Option<PathResult>,
    link_feasible_route: bool,
}

impl<G: GraphView + ?Sized> Dfs<'_, G> {
    fn walk(&mut self, u: NodeId, links_ok: bool) {
        if u == self.dst {
            if links_ok {
                self.link_feasible_route = true;
            }
            let p = PathResult::from_edges(self.g, self.nodes[0], self.edges.clone());
            // depth-first in ascending adjacency order meets equal-length
            // paths in lexicographic order, so only strictly shorter wins
            if p.satisfies(self.c) && self.best.as_ref().is_none_or(|b| p.hop_count() < b.hop_count()) {
                self.best = Some(p);
            }
            return;
        }
        if let Some(b) = &self.best {
            if self.edges.len() + 1 >= b.hop_count() {
                return;
            }
        }
        for &(v, e) in self.g.out_edges(u) {
            if self.on_path[v.0] {
                continue;
            }
            self.on_path[v.0] = true;
            self.nodes.push(v);
            self.edges.push(e);
            let ok = links_ok && self.c.links_ok(self.g.link_metrics(e));
            self.walk(v, ok);
            self.edges.pop();
            self.nodes.pop();
            self.on_path[v.0] = false;
        }
    }
}

/// Enumerates every simple path and returns the feasible one minimizing
/// `(hops, node sequence)`. Exponential; guarded by `cfg.max_nodes`.
pub fn solve_exhaustive<G: GraphView + ?Sized>(
    g: &G,
    src: NodeId,
    dst: NodeId,
    c: &ConstraintSet,
    cfg: &ExhaustiveConfig,
) -> SolveResult {
    check_query(g, src, dst, c)?;
    if g.node_count() > cfg.max_nodes {
        return Err(SolveError::ResourceLimit(format!(
            "exhaustive search limited to {} nodes, graph has {}",
            cfg.max_nodes,
            g.node_count()
        )));
    }
    let mut on_path = vec![false; g.node_count()];
    on_path[src.0] = true;
    let mut dfs = Dfs {
        g,
        c,
        dst,
        on_path,
        nodes: vec![src],
        edges: Vec::new(),
        best: None,
        link_feasible_route: false,
    };
    dfs.walk(src, true);
    match dfs.best {
        Some(p) => Ok(p),
        None if dfs.link_feasible_route => Err(SolveError::Infeasible),
        None => Err(SolveError::Unreachable),
    }
}
