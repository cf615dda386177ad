//! `l ⊕ 1` case: pre-routing, level-synchronous forward relaxation, back track.
//!
//! A node is relabeled when the candidate distance beats its best distance so
//! far and stays under the path bound. A relabeled node moves to the newest
//! level. The forward phase stops at the first level that labels `dst`, which
//! is the minimum hop count of any feasible path.
//!
//! Back tracking follows the predecessor recorded *at each level* rather than
//! the node's latest predecessor: a node may be relabeled after its successors
//! were labeled from its older value, and following the newer predecessor
//! would then produce a path longer than the level count.

use crate::constraints::ConstraintSet;
use crate::graph::{EdgeId, GraphView, NodeId};
use crate::nm::NeighborhoodList;
use crate::path::{check_query, PathResult, SolveError, SolveResult};

/// Per-node `π(u)`, `D(u)` and `L_NH(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchLabels {
    pub predecessor: Vec<Option<NodeId>>,
    pub distance: Vec<f64>,
    pub level: Vec<Option<usize>>,
}

impl SearchLabels {
    /// Every node starts with no predecessor, distance 0 and no level.
    pub fn new(node_count: usize) -> Self {
        Self {
            predecessor: vec![None; node_count],
            distance: vec![0.0; node_count],
            level: vec![None; node_count],
        }
    }

    pub fn len(&self) -> usize {
        self.predecessor.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predecessor.is_empty()
    }
}

/// Working state left behind by [`solve_l1_traced`].
#[derive(Clone, Debug)]
pub struct L1Trace {
    pub labels: SearchLabels,
    pub neighborhoods: NeighborhoodList,
}

#[derive(Clone, Copy, Debug)]
struct Label {
    node: NodeId,
    via: Option<EdgeId>,
    dist: f64,
}

pub fn solve_l1<G: GraphView + ?Sized>(g: &G, src: NodeId, dst: NodeId, c: &ConstraintSet) -> SolveResult {
    solve_l1_traced(g, src, dst, c).0
}

fn reachable<G: GraphView + ?Sized>(g: &G, usable: &[bool], src: NodeId, dst: NodeId) -> bool {
    let mut seen = vec![false; g.node_count()];
    let mut stack = vec![src];
    seen[src.0] = true;
    while let Some(u) = stack.pop() {
        if u == dst {
            return true;
        }
        for &(v, e) in g.out_edges(u) {
            if usable[e.0] && !seen[v.0] {
                seen[v.0] = true;
                stack.push(v);
            }
        }
    }
    false
}

pub fn solve_l1_traced<G: GraphView + ?Sized>(
    g: &G,
    src: NodeId,
    dst: NodeId,
    c: &ConstraintSet,
) -> (SolveResult, L1Trace) {
    let n = g.node_count();
    let mut labels = SearchLabels::new(n);
    let empty_trace = |labels: SearchLabels, usable: Vec<bool>| L1Trace {
        labels,
        neighborhoods: NeighborhoodList::from_parts(Vec::new(), vec![None; n], usable),
    };
    if let Err(e) = check_query(g, src, dst, c) {
        return (Err(e), empty_trace(labels, Vec::new()));
    }
    if c.path_count() != 1 {
        return (Err(SolveError::PathBoundCount(c.path_count())), empty_trace(labels, Vec::new()));
    }
    let bound = c.path_bounds()[0];
    let metric = bound.metric;

    // pre-routing
    let usable = c.prune(g);

    // forward
    let mut labeled = vec![false; n];
    labeled[src.0] = true;
    labels.level[src.0] = Some(0);
    let mut history: Vec<Vec<Label>> = vec![vec![Label {
        node: src,
        via: None,
        dist: 0.0,
    }]];
    let mut slot_in_round = vec![usize::MAX; n];
    let mut round_of = vec![usize::MAX; n];

    let outcome = if src == dst {
        if c.sum_ok(0.0, bound.max) {
            Ok(0)
        } else {
            Err(SolveError::Infeasible)
        }
    } else {
        loop {
            let r = history.len();
            let mut frontier: Vec<Label> = history[r - 1].clone();
            frontier.sort_unstable_by_key(|l| l.node);
            let mut next: Vec<Label> = Vec::new();
            for u in &frontier {
                for &(v, e) in g.out_edges(u.node) {
                    if !usable[e.0] {
                        continue;
                    }
                    let dist = u.dist + g.path_metrics(e)[metric];
                    let improves = !labeled[v.0] || dist < labels.distance[v.0];
                    if !improves || !c.sum_ok(dist, bound.max) {
                        continue;
                    }
                    labeled[v.0] = true;
                    labels.distance[v.0] = dist;
                    labels.predecessor[v.0] = Some(u.node);
                    labels.level[v.0] = Some(r);
                    let label = Label {
                        node: v,
                        via: Some(e),
                        dist,
                    };
                    if round_of[v.0] == r {
                        next[slot_in_round[v.0]] = label;
                    } else {
                        round_of[v.0] = r;
                        slot_in_round[v.0] = next.len();
                        next.push(label);
                    }
                }
            }
            if next.is_empty() {
                break Err(if reachable(g, &usable, src, dst) {
                    SolveError::Infeasible
                } else {
                    SolveError::Unreachable
                });
            }
            if r >= n {
                break Err(SolveError::NegativeWeightCycle);
            }
            let reached = round_of[dst.0] == r;
            history.push(next);
            if reached {
                break Ok(r);
            }
        }
    };

    // neighborhoods keep only each node's latest level
    let levels: Vec<Vec<NodeId>> = history
        .iter()
        .enumerate()
        .map(|(k, hs)| {
            let mut nodes: Vec<NodeId> = hs
                .iter()
                .map(|l| l.node)
                .filter(|v| labels.level[v.0] == Some(k))
                .collect();
            nodes.sort_unstable();
            nodes
        })
        .collect();
    let trace = L1Trace {
        neighborhoods: NeighborhoodList::from_parts(levels, labels.level.clone(), usable),
        labels,
    };

    let result = outcome.map(|depth| {
        // back track through the per-level records
        let mut edges = Vec::with_capacity(depth);
        let mut cur = dst;
        for k in (1..=depth).rev() {
            let label = history[k]
                .iter()
                .find(|l| l.node == cur)
                .expect("every back-tracked node was labeled one level earlier");
            let e = label.via.expect("only the source lacks a predecessor");
            edges.push(e);
            cur = g.endpoints(e).0;
        }
        debug_assert_eq!(cur, src);
        edges.reverse();
        PathResult::from_edges(g, src, edges)
    });
    (result, trace)
}
