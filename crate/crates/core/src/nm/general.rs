//! General `l ⊕ p` case: forward pass, backward pass, validation loop.

use std::ops::ControlFlow;

use crate::constraints::ConstraintSet;
use crate::graph::{EdgeId, GraphView, NodeId};
use crate::nm::NeighborhoodList;
use crate::path::{check_query, PathResult, SolveError, SolveResult};

#[derive(Clone, Copy, Debug)]
pub struct GeneralConfig {
    /// Maximum number of partial paths the backward pass may expand over a
    /// whole query before giving up with [`SolveError::ResourceLimit`].
    pub candidate_limit: usize,
}

impl Default for GeneralConfig {
    fn default() -> Self {
        Self {
            candidate_limit: 1_000_000,
        }
    }
}

/// Adds the level of all usable out-neighbors of the last level. Returns
/// `false` when that level would be empty.
pub(crate) fn extend<G: GraphView + ?Sized>(g: &G, nh: &mut NeighborhoodList) -> bool {
    let mut seen = vec![false; g.node_count()];
    let mut next = Vec::new();
    for &u in nh.last() {
        for &(v, e) in g.out_edges(u) {
            if nh.usable()[e.0] && !seen[v.0] {
                seen[v.0] = true;
                next.push(v);
            }
        }
    }
    if next.is_empty() {
        return false;
    }
    nh.push_level(next);
    true
}

/// Forward pass: grows neighborhoods from `src` over edges meeting every link
/// bound of `c` until `dst` appears in the newest level.
pub fn build_neighborhoods<G: GraphView + ?Sized>(
    g: &G,
    src: NodeId,
    dst: NodeId,
    c: &ConstraintSet,
) -> Result<NeighborhoodList, SolveError> {
    check_query(g, src, dst, c)?;
    let mut nh = NeighborhoodList::with_source(g.node_count(), src, c.prune(g));
    while !nh.contains(nh.depth(), dst) {
        if nh.levels().len() >= g.node_count() || !extend(g, &mut nh) {
            return Err(SolveError::Unreachable);
        }
    }
    Ok(nh)
}

/// For each level, the nodes that still lead to `dst` at the final level:
/// `keep[k] = {dst}`, `keep[i] = {u in level i : some usable u->w, w in keep[i+1]}`.
fn backward_sets<G: GraphView + ?Sized>(g: &G, nh: &NeighborhoodList, dst: NodeId) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let k = nh.depth();
    let mut keep = vec![vec![false; n]; k + 1];
    if !nh.contains(k, dst) {
        return keep;
    }
    keep[k][dst.0] = true;
    let mut frontier = vec![dst];
    for i in (0..k).rev() {
        let mut next = Vec::new();
        for &w in &frontier {
            for &(u, e) in g.in_edges(w) {
                if nh.usable()[e.0] && !keep[i][u.0] && nh.contains(i, u) {
                    keep[i][u.0] = true;
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    keep
}

struct Enumerator<'a, G: GraphView + ?Sized> {
    g: &'a G,
    nh: &'a NeighborhoodList,
    keep: Vec<Vec<bool>>,
    on_path: Vec<bool>,
    edges: Vec<EdgeId>,
    sums: Vec<f64>,
    prune: Option<&'a ConstraintSet>,
    budget: &'a mut usize,
}

impl<G: GraphView + ?Sized> Enumerator<'_, G> {
    fn walk<F>(&mut self, u: NodeId, depth: usize, visit: &mut F) -> Result<ControlFlow<()>, SolveError>
    where
        F: FnMut(&[EdgeId]) -> ControlFlow<()>,
    {
        if depth == self.keep.len() - 1 {
            return Ok(visit(&self.edges));
        }
        for &(v, e) in self.g.out_edges(u) {
            if !self.nh.usable()[e.0] || !self.keep[depth + 1][v.0] || self.on_path[v.0] {
                continue;
            }
            if *self.budget == 0 {
                return Err(SolveError::ResourceLimit("backward pass candidate limit reached".into()));
            }
            *self.budget -= 1;
            let pm = self.g.path_metrics(e);
            for (s, m) in self.sums.iter_mut().zip(pm) {
                *s += m;
            }
            let ok = self.prune.is_none_or(|c| c.sums_ok(&self.sums));
            let flow = if ok {
                self.on_path[v.0] = true;
                self.edges.push(e);
                let flow = self.walk(v, depth + 1, visit);
                self.edges.pop();
                self.on_path[v.0] = false;
                flow
            } else {
                Ok(ControlFlow::Continue(()))
            };
            for (s, m) in self.sums.iter_mut().zip(pm) {
                *s -= m;
            }
            if let ControlFlow::Break(()) = flow? {
                return Ok(ControlFlow::Break(()));
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Visits every loop-free path whose `i`-th node lies in level `i` and whose
/// last node is `dst`, in lexicographic order of `(nodes, edges)`.
fn enumerate<G, F>(
    g: &G,
    nh: &NeighborhoodList,
    dst: NodeId,
    prune: Option<&ConstraintSet>,
    budget: &mut usize,
    mut visit: F,
) -> Result<(), SolveError>
where
    G: GraphView + ?Sized,
    F: FnMut(&[EdgeId]) -> ControlFlow<()>,
{
    let keep = backward_sets(g, nh, dst);
    let src = nh.levels()[0][0];
    if !keep[0][src.0] {
        return Ok(());
    }
    let mut on_path = vec![false; g.node_count()];
    on_path[src.0] = true;
    let mut e = Enumerator {
        g,
        nh,
        keep,
        on_path,
        edges: Vec::new(),
        sums: vec![0.0; g.path_arity()],
        prune,
        budget,
    };
    let _ = e.walk(src, 0, &mut visit)?;
    Ok(())
}

/// Backward pass: all loop-free `src -> dst` paths with exactly `depth` hops
/// that follow the neighborhoods, sorted lexicographically.
pub fn backward_pass<G: GraphView + ?Sized>(g: &G, nh: &NeighborhoodList, dst: NodeId) -> Vec<PathResult> {
    backward_pass_limited(g, nh, dst, usize::MAX).expect("unbounded enumeration")
}

/// [`backward_pass`] with a cap on expanded partial paths.
pub fn backward_pass_limited<G: GraphView + ?Sized>(
    g: &G,
    nh: &NeighborhoodList,
    dst: NodeId,
    limit: usize,
) -> Result<Vec<PathResult>, SolveError> {
    let src = nh.levels()[0][0];
    let mut out = Vec::new();
    let mut budget = limit;
    enumerate(g, nh, dst, None, &mut budget, |edges| {
        out.push(PathResult::from_edges(g, src, edges.to_vec()));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Prefix pruning on path sums is sound only when no usable edge can lower a
/// constrained sum.
fn prefix_prunable<G: GraphView + ?Sized>(g: &G, usable: &[bool], c: &ConstraintSet) -> bool {
    (0..g.edge_count()).filter(|&i| usable[i]).all(|i| {
        let pm = g.path_metrics(EdgeId(i));
        c.path_bounds().iter().all(|b| pm[b.metric] >= 0.0)
    })
}

/// Minimum-hop loop-free path meeting every bound in `c`.
///
/// Depth grows one level at a time from the first level that contains `dst`;
/// at each depth the lexicographically first feasible candidate wins.
pub fn solve_general<G: GraphView + ?Sized>(
    g: &G,
    src: NodeId,
    dst: NodeId,
    c: &ConstraintSet,
    cfg: &GeneralConfig,
) -> SolveResult {
    check_query(g, src, dst, c)?;
    if src == dst {
        let p = PathResult::trivial(g, src);
        return if c.sums_ok(&p.accumulated.sums) {
            Ok(p)
        } else {
            Err(SolveError::Infeasible)
        };
    }
    let mut nh = build_neighborhoods(g, src, dst, c)?;
    let prune = prefix_prunable(g, nh.usable(), c).then_some(c);
    let mut budget = cfg.candidate_limit;
    loop {
        if nh.contains(nh.depth(), dst) {
            let mut found = None;
            enumerate(g, &nh, dst, prune, &mut budget, |edges| {
                let p = PathResult::from_edges(g, src, edges.to_vec());
                if p.satisfies(c) {
                    found = Some(p);
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            })?;
            if let Some(p) = found {
                return Ok(p);
            }
        }
        if nh.depth() + 1 >= g.node_count() || !extend(g, &mut nh) {
            return Err(SolveError::Infeasible);
        }
    }
}
