//! Seeded Waxman and Barabasi-Albert substrate generation.
//!
//! Links are undirected in the model and emitted as symmetric directed pairs
//! with one link metric (bandwidth, Gbps) and one path metric (delay).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::constraints::ConstraintSet;
use crate::graph::{symmetric_pair, EdgeSpec, GraphView, PhysicalGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid `{field}`: {msg}")]
    InvalidSpec { field: &'static str, msg: String },
    #[error("target degree unreachable: {0}")]
    DegreeUnreachable(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TopologyModel {
    Waxman { alpha: f64, beta: f64 },
    BarabasiAlbert { m: usize },
}

impl TopologyModel {
    /// BRITE's default Waxman parameters.
    pub fn waxman() -> Self {
        TopologyModel::Waxman { alpha: 0.15, beta: 0.2 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TopologyModel::Waxman { .. } => "waxman",
            TopologyModel::BarabasiAlbert { .. } => "ba",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DelayModel {
    /// Delay proportional to plane distance; the longest link gets `max_delay`.
    EuclideanScaled { max_delay: f64 },
    Uniform { low: f64, high: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub model: TopologyModel,
    pub node_count: usize,
    /// When set, overrides Waxman's alpha and Barabasi-Albert's m.
    pub target_avg_degree: Option<f64>,
    pub bw_range: (f64, f64),
    pub delay_model: DelayModel,
    pub cpu_units: f64,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            model: TopologyModel::waxman(),
            node_count: 100,
            target_avg_degree: Some(4.0),
            bw_range: (1.0, 9.0),
            delay_model: DelayModel::EuclideanScaled { max_delay: 10.0 },
            cpu_units: 200.0,
            seed: 1,
        }
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |field, msg: &str| {
            Err(GenError::InvalidSpec {
                field,
                msg: msg.to_owned(),
            })
        };
        if self.node_count < 2 {
            return bad("nodes", "need at least 2 nodes");
        }
        if let TopologyModel::Waxman { alpha, beta } = self.model {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return bad("alpha", "must be in (0, 1]");
            }
            if !(beta > 0.0 && beta <= 1.0) {
                return bad("beta", "must be in (0, 1]");
            }
        }
        if let TopologyModel::BarabasiAlbert { m } = self.model {
            if self.target_avg_degree.is_none() && m == 0 {
                return bad("m", "must be at least 1");
            }
        }
        if let Some(d) = self.target_avg_degree {
            if !(d > 0.0) || !d.is_finite() {
                return bad("degree", "must be positive");
            }
        }
        let (lo, hi) = self.bw_range;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return bad("bw", "need 0 <= low <= high");
        }
        match self.delay_model {
            DelayModel::EuclideanScaled { max_delay } if !(max_delay > 0.0) => {
                return bad("max_delay", "must be positive");
            }
            DelayModel::Uniform { low, high } if !(low >= 0.0 && low <= high) => {
                return bad("delay", "need 0 <= low <= high");
            }
            _ => {}
        }
        if !(self.cpu_units >= 0.0) {
            return bad("cpu", "must be nonnegative");
        }
        Ok(())
    }
}

/// Undirected link before metric assignment.
struct Link {
    a: usize,
    b: usize,
    bw: f64,
    dist: f64,
}

fn place(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect()
}

fn dist(p: (f64, f64), q: (f64, f64)) -> f64 {
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

fn waxman_links(
    rng: &mut ChaCha8Rng,
    pts: &[(f64, f64)],
    alpha: f64,
    beta: f64,
    target: Option<f64>,
    bw: (f64, f64),
) -> Result<Vec<Link>, GenError> {
    let n = pts.len();
    let scale = beta * std::f64::consts::SQRT_2;
    let alpha = match target {
        None => alpha,
        Some(t) => {
            // expected mean degree is linear in alpha: 2 * alpha * sum(w) / n
            let s: f64 = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| (-dist(pts[i], pts[j]) / scale).exp())
                .sum();
            let a = t * n as f64 / (2.0 * s);
            if !(a > 0.0 && a <= 1.0) {
                return Err(GenError::DegreeUnreachable(format!(
                    "degree {t} needs alpha {a:.3} > 1 with beta {beta} on {n} nodes"
                )));
            }
            a
        }
    };
    let mut links = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(pts[i], pts[j]);
            if rng.gen::<f64>() < alpha * (-d / scale).exp() {
                links.push(Link {
                    a: i,
                    b: j,
                    bw: rng.gen_range(bw.0..=bw.1),
                    dist: d,
                });
            }
        }
    }
    Ok(links)
}

fn ba_links(rng: &mut ChaCha8Rng, pts: &[(f64, f64)], m: usize, bw: (f64, f64)) -> Result<Vec<Link>, GenError> {
    let n = pts.len();
    if m == 0 || m >= n {
        return Err(GenError::DegreeUnreachable(format!("m = {m} with {n} nodes")));
    }
    let mut links = Vec::new();
    let mut ends: Vec<usize> = Vec::new();
    let mut add = |a: usize, b: usize, rng: &mut ChaCha8Rng, ends: &mut Vec<usize>| {
        ends.push(a);
        ends.push(b);
        links.push(Link {
            a,
            b,
            bw: rng.gen_range(bw.0..=bw.1),
            dist: dist(pts[a], pts[b]),
        });
    };
    for i in 0..=m {
        for j in i + 1..=m {
            add(i, j, rng, &mut ends);
        }
    }
    for t in m + 1..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        while chosen.len() < m {
            let cand = ends[rng.gen_range(0..ends.len())];
            if !chosen.contains(&cand) {
                chosen.push(cand);
            }
        }
        chosen.sort_unstable();
        for c in chosen {
            add(c, t, rng, &mut ends);
        }
    }
    Ok(links)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn components(n: usize, links: &[Link]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    for l in links {
        let (ra, rb) = (find(&mut parent, l.a), find(&mut parent, l.b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len();
    Some(if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) })
}

/// Joins every component to the largest one through its closest node pair.
/// Bridges get the median bandwidth and median delay of the existing links.
fn bridge(pts: &[(f64, f64)], links: &mut Vec<Link>, delays: &mut Vec<f64>, spec: &GenSpec) {
    let n = pts.len();
    let comp = components(n, links);
    let mut sizes = vec![0usize; n];
    for &c in &comp {
        sizes[c] += 1;
    }
    let main = (0..n).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a))).unwrap();
    let bw = median(links.iter().map(|l| l.bw).collect()).unwrap_or(0.5 * (spec.bw_range.0 + spec.bw_range.1));
    let delay = median(delays.clone());
    let mut in_main: Vec<bool> = comp.iter().map(|&c| c == main).collect();
    let mut roots: Vec<usize> = comp.clone();
    roots.sort_unstable();
    roots.dedup();
    for r in roots.into_iter().filter(|&r| r != main) {
        let members: Vec<usize> = (0..n).filter(|&i| comp[i] == r).collect();
        let mut best = (f64::INFINITY, 0, 0);
        for &a in &members {
            for b in (0..n).filter(|&b| in_main[b]) {
                let d = dist(pts[a], pts[b]);
                if d < best.0 {
                    best = (d, a, b);
                }
            }
        }
        let (d, a, b) = best;
        links.push(Link {
            a: a.min(b),
            b: a.max(b),
            bw,
            dist: d,
        });
        delays.push(delay.unwrap_or_else(|| match spec.delay_model {
            DelayModel::EuclideanScaled { max_delay } => max_delay,
            DelayModel::Uniform { low, high } => 0.5 * (low + high),
        }));
        for m in members {
            in_main[m] = true;
        }
    }
}

fn assign_delays(rng: &mut ChaCha8Rng, links: &[Link], model: DelayModel) -> Vec<f64> {
    match model {
        DelayModel::EuclideanScaled { max_delay } => {
            let dmax = links.iter().map(|l| l.dist).fold(0.0, f64::max);
            links
                .iter()
                .map(|l| if dmax > 0.0 { max_delay * l.dist / dmax } else { max_delay })
                .collect()
        }
        DelayModel::Uniform { low, high } => links.iter().map(|_| rng.gen_range(low..=high)).collect(),
    }
}

const CONNECT_RETRIES: u64 = 32;

/// Generates a connected substrate. Identical specs give identical graphs.
pub fn generate(spec: &GenSpec) -> Result<PhysicalGraph, GenError> {
    spec.validate()?;
    let n = spec.node_count;
    let mut first = None;
    for attempt in 0..CONNECT_RETRIES {
        // one stream per attempt so nearby seeds never share retries
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(attempt);
        let pts = place(&mut rng, n);
        let links = match spec.model {
            TopologyModel::Waxman { alpha, beta } => {
                waxman_links(&mut rng, &pts, alpha, beta, spec.target_avg_degree, spec.bw_range)?
            }
            TopologyModel::BarabasiAlbert { m } => {
                let m = spec.target_avg_degree.map_or(m, |t| (t / 2.0).round() as usize);
                ba_links(&mut rng, &pts, m, spec.bw_range)?
            }
        };
        let delays = assign_delays(&mut rng, &links, spec.delay_model);
        let comp = components(n, &links);
        if comp.iter().all(|&c| c == 0) {
            return Ok(assemble(spec, links, delays));
        }
        if first.is_none() {
            first = Some((pts, links, delays));
        }
    }
    let (pts, mut links, mut delays) = first.expect("at least one attempt");
    bridge(&pts, &mut links, &mut delays, spec);
    Ok(assemble(spec, links, delays))
}

fn assemble(spec: &GenSpec, links: Vec<Link>, delays: Vec<f64>) -> PhysicalGraph {
    let edges: Vec<EdgeSpec> = links
        .iter()
        .zip(delays)
        .flat_map(|(l, d)| symmetric_pair(l.a, l.b, vec![l.bw], vec![d]))
        .collect();
    PhysicalGraph::build(spec.node_count, 1, 1, edges, vec![spec.cpu_units; spec.node_count])
        .expect("generated edges are in range and loop-free")
}

/// True when every node reaches every other node.
pub fn is_connected(g: &PhysicalGraph) -> bool {
    let n = g.node_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![crate::graph::NodeId(0)];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &(v, _) in g.out_edges(u).iter().chain(g.in_edges(u)) {
            if !seen[v.0] {
                seen[v.0] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Low,
    Med,
    High,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Low => "low",
            Severity::Med => "med",
            Severity::High => "high",
        })
    }
}

impl FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(Severity::Low),
            "med" | "medium" => Ok(Severity::Med),
            "high" => Ok(Severity::High),
            _ => Err(format!("unknown severity `{s}` (expected low, med or high)")),
        }
    }
}

/// Bandwidth floor in Gbps for a severity level.
pub fn bw_bound(level: Severity) -> f64 {
    match level {
        Severity::Low => 1.0,
        Severity::Med => 4.0,
        Severity::High => 7.0,
    }
}

/// Delay bound as a multiple of the largest single-link delay. A "high"
/// delay constraint is the loosest one.
pub fn delay_factor(level: Severity) -> f64 {
    match level {
        Severity::High => 4.0,
        Severity::Med => 2.5,
        Severity::Low => 0.8,
    }
}

/// Bandwidth floor on link metric 0 and delay ceiling on path metric 0.
pub fn resolve_constraint_severity(g: &PhysicalGraph, bw_level: Severity, delay_level: Severity) -> ConstraintSet {
    let max_delay = g.max_path_metric(0).unwrap_or(0.0);
    ConstraintSet::bw_delay(Some(bw_bound(bw_level)), Some(delay_factor(delay_level) * max_delay))
}

/// Same as [`resolve_constraint_severity`] with the delay bound given as a
/// percentage of the largest link delay.
pub fn resolve_with_delay_percent(g: &PhysicalGraph, bw_level: Severity, percent: f64) -> ConstraintSet {
    let max_delay = g.max_path_metric(0).unwrap_or(0.0);
    ConstraintSet::bw_delay(Some(bw_bound(bw_level)), Some(percent / 100.0 * max_delay))
}

/// Percent grid from `start` down to `end` (inclusive) in `step` decrements.
pub fn percent_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    let count = ((start - end) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start - step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeId;

    fn waxman(n: usize, deg: f64, seed: u64) -> GenSpec {
        GenSpec {
            node_count: n,
            target_avg_degree: Some(deg),
            seed,
            ..GenSpec::default()
        }
    }

    #[test]
    fn capacities_and_connectivity() {
        let g = generate(&waxman(100, 4.0, 3)).unwrap();
        assert!(g.node_capacities().iter().all(|&c| c == 200.0));
        assert!(is_connected(&g));
        for e in g.edges() {
            let bw = g.link_metrics(e)[0];
            assert!((1.0..=9.0).contains(&bw));
        }
        let max = g.max_path_metric(0).unwrap();
        assert!((max - 10.0).abs() < 1e-9);
    }

    #[test]
    fn nearby_seeds_give_distinct_graphs() {
        // small sparse graphs need connectivity retries; retries of
        // neighbouring seeds must not coincide
        let graphs: Vec<_> = (1..=10).map(|s| generate(&waxman(100, 4.0, s)).unwrap().edge_specs()).collect();
        for i in 0..graphs.len() {
            for j in i + 1..graphs.len() {
                assert_ne!(graphs[i], graphs[j], "seeds {} and {}", i + 1, j + 1);
            }
        }
    }

    #[test]
    fn symmetric_pairs() {
        let g = generate(&waxman(60, 4.0, 5)).unwrap();
        assert_eq!(g.edge_count() % 2, 0);
        for i in (0..g.edge_count()).step_by(2) {
            let (a, b) = g.endpoints(EdgeId(i));
            assert_eq!(g.endpoints(EdgeId(i + 1)), (b, a));
            assert_eq!(g.link_metrics(EdgeId(i)), g.link_metrics(EdgeId(i + 1)));
            assert_eq!(g.path_metrics(EdgeId(i)), g.path_metrics(EdgeId(i + 1)));
        }
    }

    #[test]
    fn ba_deterministic() {
        let spec = GenSpec {
            model: TopologyModel::BarabasiAlbert { m: 2 },
            node_count: 10,
            target_avg_degree: None,
            seed: 7,
            ..GenSpec::default()
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.edge_specs(), b.edge_specs());
        // clique on 3 nodes + 2 links per arriving node
        assert_eq!(a.edge_count(), 2 * (3 + 2 * 7));
        assert!(is_connected(&a));
    }

    #[test]
    fn waxman_degree_close_to_target() {
        let mut total = 0.0;
        for seed in 0..20 {
            let g = generate(&waxman(1000, 4.0, seed)).unwrap();
            let d = g.avg_out_degree();
            assert!((d - 4.0).abs() <= 0.4, "seed {seed}: degree {d}");
            total += d;
        }
        assert!((total / 20.0 - 4.0).abs() <= 0.4);
    }

    #[test]
    fn invalid_specs() {
        let mut s = GenSpec::default();
        s.model = TopologyModel::Waxman { alpha: 0.0, beta: 0.2 };
        s.target_avg_degree = None;
        assert!(matches!(generate(&s), Err(GenError::InvalidSpec { field: "alpha", .. })));
        s.model = TopologyModel::Waxman { alpha: 0.5, beta: 1.5 };
        assert!(matches!(generate(&s), Err(GenError::InvalidSpec { field: "beta", .. })));
        let s = GenSpec {
            node_count: 1,
            ..GenSpec::default()
        };
        assert!(matches!(generate(&s), Err(GenError::InvalidSpec { field: "nodes", .. })));
        let s = GenSpec {
            bw_range: (9.0, 1.0),
            ..GenSpec::default()
        };
        assert!(matches!(generate(&s), Err(GenError::InvalidSpec { field: "bw", .. })));
    }

    #[test]
    fn unreachable_degrees() {
        assert!(matches!(generate(&waxman(10, 40.0, 1)), Err(GenError::DegreeUnreachable(_))));
        let s = GenSpec {
            model: TopologyModel::BarabasiAlbert { m: 2 },
            node_count: 5,
            target_avg_degree: Some(12.0),
            ..GenSpec::default()
        };
        assert!(matches!(generate(&s), Err(GenError::DegreeUnreachable(_))));
    }

    #[test]
    fn severity_resolution() {
        let g = PhysicalGraph::build(
            3,
            1,
            1,
            vec![EdgeSpec::new(0, 1, vec![5.0], vec![10.0]), EdgeSpec::new(1, 2, vec![5.0], vec![3.0])],
            vec![],
        )
        .unwrap();
        let c = resolve_constraint_severity(&g, Severity::High, Severity::High);
        assert_eq!(c.link_bounds()[0].min, 7.0);
        assert_eq!(c.path_bounds()[0].max, 40.0);
        let c = resolve_constraint_severity(&g, Severity::Low, Severity::Med);
        assert_eq!(c.link_bounds()[0].min, 1.0);
        assert_eq!(c.path_bounds()[0].max, 25.0);
        let c = resolve_constraint_severity(&g, Severity::Med, Severity::Low);
        assert_eq!(c.link_bounds()[0].min, 4.0);
        assert_eq!(c.path_bounds()[0].max, 8.0);
        assert_eq!(resolve_with_delay_percent(&g, Severity::Low, 50.0).path_bounds()[0].max, 5.0);
    }

    #[test]
    fn delay_sweep_grid() {
        let grid = percent_grid(400.0, 50.0, 50.0);
        assert_eq!(grid, vec![400.0, 350.0, 300.0, 250.0, 200.0, 150.0, 100.0, 50.0]);
    }

    #[test]
    fn bandwidth_mean() {
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut seed = 0;
        while count < 20_000 {
            let g = generate(&waxman(300, 6.0, seed)).unwrap();
            for e in g.edges().step_by(2) {
                sum += g.link_metrics(e)[0];
                count += 1;
            }
            seed += 1;
        }
        let mean = sum / count as f64;
        assert!((mean - 5.0).abs() / 5.0 < 0.02, "mean {mean}");
    }
}
