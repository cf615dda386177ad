#![allow(dead_code)]

use nmpath::{ConstraintSet, EdgeSpec, GraphView, LinkBound, NodeId, PathBound, PathResult, PhysicalGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const X: NodeId = NodeId(0);
pub const A: NodeId = NodeId(1);
pub const B: NodeId = NodeId(2);
pub const Y: NodeId = NodeId(3);

/// Four-node example: the only feasible route under bw >= 5, delay < 5 is
/// X -> B -> A -> Y. Metrics are `[bw], [delay]`.
pub fn worked_example() -> PhysicalGraph {
    let e = |s, d, bw: f64, delay: f64| EdgeSpec::new(s, d, vec![bw], vec![delay]);
    let mut g = PhysicalGraph::build(
        4,
        1,
        1,
        vec![
            e(0, 1, 5.0, 5.0),
            e(0, 2, 6.0, 1.0),
            e(1, 2, 7.0, 1.0),
            e(2, 1, 7.0, 1.0),
            e(1, 3, 8.0, 2.0),
            e(2, 3, 3.0, 1.0),
        ],
        vec![],
    )
    .unwrap();
    for (i, name) in ["X", "A", "B", "Y"].iter().enumerate() {
        g.set_label(NodeId(i), *name);
    }
    g
}

pub fn worked_constraints() -> ConstraintSet {
    ConstraintSet::bw_delay(Some(5.0), Some(5.0))
}

/// X -> A -> B -> C -> A is a cycle of total delay -1; Y hangs off C.
pub fn negative_cycle() -> (PhysicalGraph, ConstraintSet) {
    let e = |s, d, w: f64| EdgeSpec::new(s, d, vec![10.0], vec![w]);
    let g = PhysicalGraph::build(
        5,
        1,
        1,
        vec![e(0, 1, 1.0), e(1, 2, 1.0), e(2, 3, 1.0), e(3, 1, -3.0), e(3, 4, 100.0)],
        vec![],
    )
    .unwrap();
    (g, ConstraintSet::bw_delay(Some(1.0), Some(50.0)))
}

pub struct Instance {
    pub g: PhysicalGraph,
    pub src: NodeId,
    pub dst: NodeId,
    pub c: ConstraintSet,
}

/// Random directed graph with `n` in `[3, max_n]`, each ordered pair present
/// with probability `p`, bw in 1..=9 and `path_arity` delay-like metrics in
/// 1..=10, plus a random bw floor and one random bound per path metric.
pub fn random_instance(seed: u64, max_n: usize, p: f64, path_arity: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=max_n);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(p) {
                let bw = rng.gen_range(1..=9) as f64;
                let pm = (0..path_arity).map(|_| rng.gen_range(1..=10) as f64).collect();
                edges.push(EdgeSpec::new(a, b, vec![bw], pm));
            }
        }
    }
    let g = PhysicalGraph::build(n, 1, path_arity, edges, vec![]).unwrap();
    let src = NodeId(rng.gen_range(0..n));
    let dst = loop {
        let d = rng.gen_range(0..n);
        if d != src.0 {
            break NodeId(d);
        }
    };
    let links = vec![LinkBound {
        metric: 0,
        min: rng.gen_range(1..=6) as f64,
    }];
    let paths = (0..path_arity)
        .map(|i| PathBound {
            metric: i,
            max: rng.gen_range(2..=30) as f64,
        })
        .collect();
    Instance {
        g,
        src,
        dst,
        c: ConstraintSet::new(links, paths).unwrap(),
    }
}

/// Minimum hop count over all feasible simple paths, by plain enumeration.
pub fn brute_min_hops<G: GraphView>(g: &G, src: NodeId, dst: NodeId, c: &ConstraintSet) -> Option<usize> {
    brute_all(g, src, dst)
        .into_iter()
        .filter(|p| p.satisfies(c))
        .map(|p| p.hop_count())
        .min()
}

/// Every simple `src -> dst` path.
pub fn brute_all<G: GraphView>(g: &G, src: NodeId, dst: NodeId) -> Vec<PathResult> {
    fn go<G: GraphView>(g: &G, u: NodeId, dst: NodeId, seen: &mut Vec<bool>, edges: &mut Vec<nmpath::EdgeId>, src: NodeId, out: &mut Vec<PathResult>) {
        if u == dst {
            out.push(PathResult::from_edges(g, src, edges.clone()));
            return;
        }
        for &(v, e) in g.out_edges(u) {
            if !seen[v.0] {
                seen[v.0] = true;
                edges.push(e);
                go(g, v, dst, seen, edges, src, out);
                edges.pop();
                seen[v.0] = false;
            }
        }
    }
    let mut seen = vec![false; g.node_count()];
    seen[src.0] = true;
    let mut out = Vec::new();
    go(g, src, dst, &mut seen, &mut Vec::new(), src, &mut out);
    out
}

/// Direct re-check of a result against the graph: bottleneck and sums
/// recomputed edge by edge.
pub fn verify_directly<G: GraphView>(g: &G, p: &PathResult, c: &ConstraintSet) -> bool {
    if !p.is_loop_free() || !p.is_consistent_with(g) {
        return false;
    }
    let links_ok = c
        .link_bounds()
        .iter()
        .all(|b| p.edges.iter().all(|&e| g.link_metrics(e)[b.metric] >= b.min) && p.min_link_metrics[b.metric] >= b.min);
    let sums_ok = c.path_bounds().iter().all(|b| {
        let s: f64 = p.edges.iter().map(|&e| g.path_metrics(e)[b.metric]).sum();
        c.sum_ok(s, b.max) && c.sum_ok(p.accumulated.sums[b.metric], b.max)
    });
    links_ok && sums_ok
}
