//! Single-pair shortest path with deterministic tie-breaking.
//!
//! Equal-cost alternatives are resolved by the lexicographic order of the
//! node sequence, then of the edge sequence. Ties are rare, so they are
//! settled by walking both predecessor chains on demand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::graph::{EdgeId, GraphView, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Weight {
    Hops,
    PathMetric(usize),
}

pub(crate) struct Query<'a> {
    pub weight: Weight,
    /// Prefer fewer hops among equal-weight paths.
    pub hop_tiebreak: bool,
    pub usable_edge: &'a dyn Fn(EdgeId) -> bool,
    pub banned_node: &'a dyn Fn(NodeId) -> bool,
}

#[derive(Clone, Copy, PartialEq)]
struct Key {
    dist: f64,
    hops: usize,
}

#[derive(PartialEq)]
struct HeapItem {
    key: Key,
    node: NodeId,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, hops, node)
        other
            .key
            .dist
            .total_cmp(&self.key.dist)
            .then(other.key.hops.cmp(&self.key.hops))
            .then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn chain<G: GraphView + ?Sized>(g: &G, pred: &[Option<EdgeId>], mut v: NodeId) -> (Vec<NodeId>, Vec<EdgeId>) {
    let mut nodes = vec![v];
    let mut edges = Vec::new();
    while let Some(e) = pred[v.0] {
        edges.push(e);
        v = g.endpoints(e).0;
        nodes.push(v);
    }
    nodes.reverse();
    edges.reverse();
    (nodes, edges)
}

/// Edge sequence of the best `src -> dst` path, or `None` if `dst` cannot be
/// reached. Weights must be nonnegative on usable edges.
pub(crate) fn shortest_path<G: GraphView + ?Sized>(g: &G, src: NodeId, dst: NodeId, q: &Query<'_>) -> Option<Vec<EdgeId>> {
    if (q.banned_node)(src) || (q.banned_node)(dst) {
        return None;
    }
    if src == dst {
        return Some(Vec::new());
    }
    let n = g.node_count();
    let mut best: Vec<Option<Key>> = vec![None; n];
    let mut pred: Vec<Option<EdgeId>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    best[src.0] = Some(Key { dist: 0.0, hops: 0 });
    heap.push(HeapItem {
        key: Key { dist: 0.0, hops: 0 },
        node: src,
    });

    let cmp_key = |a: Key, b: Key| -> Ordering {
        let o = a.dist.total_cmp(&b.dist);
        if q.hop_tiebreak {
            o.then(a.hops.cmp(&b.hops))
        } else {
            o
        }
    };

    while let Some(HeapItem { key, node: u }) = heap.pop() {
        if settled[u.0] || best[u.0] != Some(key) {
            continue;
        }
        settled[u.0] = true;
        if u == dst {
            break;
        }
        for &(v, e) in g.out_edges(u) {
            if settled[v.0] || !(q.usable_edge)(e) || (q.banned_node)(v) {
                continue;
            }
            let w = match q.weight {
                Weight::Hops => 1.0,
                Weight::PathMetric(i) => g.path_metrics(e)[i],
            };
            let cand = Key {
                dist: key.dist + w,
                hops: key.hops + 1,
            };
            let replace = match best[v.0] {
                None => true,
                Some(cur) => match cmp_key(cand, cur) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => {
                        let old = pred[v.0].expect("non-source labels have a predecessor");
                        let (mut a_nodes, mut a_edges) = chain(g, &pred, u);
                        a_nodes.push(v);
                        a_edges.push(e);
                        let (mut b_nodes, mut b_edges) = chain(g, &pred, g.endpoints(old).0);
                        b_nodes.push(v);
                        b_edges.push(old);
                        (a_nodes, a_edges) < (b_nodes, b_edges)
                    }
                },
            };
            if replace {
                let push = best[v.0].is_none_or(|cur| cur != cand);
                best[v.0] = Some(cand);
                pred[v.0] = Some(e);
                if push {
                    heap.push(HeapItem { key: cand, node: v });
                }
            }
        }
    }
    settled[dst.0].then(|| chain(g, &pred, dst).1)
}
