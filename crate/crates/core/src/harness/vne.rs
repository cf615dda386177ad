use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{adapt_constraints, solve_on_residual, HarnessError};
use crate::constraints::{ConstraintSet, LinkBound, PathBound};
use crate::graph::{EdgeId, GraphView, NodeId, PhysicalGraph};
use crate::overlay::ResidualOverlay;
use crate::solver::Backend;

#[derive(Clone, Debug, PartialEq)]
pub struct VirtualLink {
    pub a: usize,
    pub b: usize,
    pub bw: f64,
    pub max_delay: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VnRequest {
    pub cpu: Vec<f64>,
    pub links: Vec<VirtualLink>,
}

impl VnRequest {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Invalid(m));
        if let Some(d) = self.cpu.iter().find(|d| !(**d > 0.0)) {
            return bad(format!("virtual node demand {d} must be positive"));
        }
        for l in &self.links {
            if l.a == l.b || l.a >= self.cpu.len() || l.b >= self.cpu.len() {
                return bad(format!("virtual link ({}, {}) has invalid endpoints", l.a, l.b));
            }
            if !(l.bw > 0.0) {
                return bad(format!("virtual link demand {} must be positive", l.bw));
            }
        }
        Ok(())
    }
}

/// Random requests: a chain over all virtual nodes plus every other pair with
/// a per-request probability drawn uniformly from [0, 1], so topologies range
/// from linear to fully connected. Demands are uniform in `[1, max_demand]`.
pub fn generate_vn_requests(count: usize, nodes: usize, max_demand: f64, seed: u64) -> Vec<VnRequest> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x564e_5245_5155_4553);
    let hi = max_demand.max(1.0);
    (0..count)
        .map(|_| {
            let cpu = (0..nodes).map(|_| rng.gen_range(1.0..=hi)).collect();
            let density: f64 = rng.gen();
            let mut links = Vec::new();
            for a in 0..nodes {
                for b in a + 1..nodes {
                    if b == a + 1 || rng.gen::<f64>() < density {
                        links.push(VirtualLink {
                            a,
                            b,
                            bw: rng.gen_range(1.0..=hi),
                            max_delay: None,
                        });
                    }
                }
            }
            VnRequest { cpu, links }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum RequestOutcome {
    Accepted { links: usize, hops: usize },
    NoHostFor { vnode: usize },
    LinkFailed { link: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VneReport {
    pub vn_allocation_ratio: f64,
    pub link_allocation_ratio: f64,
    pub link_utilization: f64,
    pub avg_path_length: f64,
    pub avg_time_per_vl: f64,
    pub per_request_outcomes: Vec<RequestOutcome>,
}

struct Tentative {
    cpu: Vec<(NodeId, f64)>,
    links: Vec<(Vec<EdgeId>, Vec<f64>)>,
}

impl Tentative {
    fn rollback(self, overlay: &mut ResidualOverlay) {
        for (edges, demand) in self.links.into_iter().rev() {
            overlay.release_edges(&edges, &demand).expect("releasing a tentative reservation");
        }
        for (n, d) in self.cpu.into_iter().rev() {
            overlay.release_node(n, d).expect("releasing a tentative placement");
        }
    }
}

/// Embeds requests in order. Virtual nodes go greedily to the distinct
/// physical node with the most residual CPU (ties: lowest id); virtual links
/// are routed by `backend` on the residual state. A request is accepted only
/// if every node and link fits; otherwise all of its reservations are undone.
pub fn run_vne(
    g: Arc<PhysicalGraph>,
    requests: &[VnRequest],
    backend: &Backend,
    record_timing: bool,
) -> Result<VneReport, HarnessError> {
    for r in requests {
        r.validate()?;
    }
    let mut overlay = ResidualOverlay::new(g.clone());
    let mut outcomes = Vec::with_capacity(requests.len());
    let mut accepted_vns = 0usize;
    let (mut requested_vls, mut accepted_vls) = (0usize, 0usize);
    let mut hops_total = 0usize;
    let (mut calls, mut micros) = (0usize, 0.0f64);

    'requests: for req in requests {
        requested_vls += req.links.len();
        let mut t = Tentative {
            cpu: Vec::new(),
            links: Vec::new(),
        };
        let mut host = Vec::with_capacity(req.cpu.len());
        for (vi, &d) in req.cpu.iter().enumerate() {
            let pick = g
                .nodes()
                .filter(|n| !host.contains(n) && overlay.residual_node_capacity(*n) >= d)
                .max_by(|a, b| {
                    overlay
                        .residual_node_capacity(*a)
                        .total_cmp(&overlay.residual_node_capacity(*b))
                        .then(b.cmp(a))
                });
            let Some(n) = pick else {
                t.rollback(&mut overlay);
                outcomes.push(RequestOutcome::NoHostFor { vnode: vi });
                continue 'requests;
            };
            overlay.reserve_node(n, d).map_err(|e| HarnessError::Invalid(e.to_string()))?;
            t.cpu.push((n, d));
            host.push(n);
        }

        let mut hops = 0;
        for (li, vl) in req.links.iter().enumerate() {
            let c = ConstraintSet::new(
                vec![LinkBound { metric: 0, min: vl.bw }],
                vl.max_delay.map(|max| PathBound { metric: 0, max }).into_iter().collect(),
            )
            .expect("one bound per class");
            let c = adapt_constraints(backend, &*g, c);
            let started = record_timing.then(Instant::now);
            let result = solve_on_residual(backend, &g, &overlay, host[vl.a], host[vl.b], &c);
            if let Some(s) = started {
                micros += s.elapsed().as_secs_f64() * 1e6;
            }
            calls += 1;
            let path = match result {
                Ok(p) => p,
                Err(e) if e.is_no_path() => {
                    t.rollback(&mut overlay);
                    outcomes.push(RequestOutcome::LinkFailed { link: li });
                    continue 'requests;
                }
                Err(e) => return Err(e.into()),
            };
            let mut demand = vec![0.0; g.link_arity()];
            demand[0] = vl.bw;
            overlay
                .reserve_edges(&path.edges, &demand)
                .map_err(|e| HarnessError::Invalid(format!("feasible path could not be reserved: {e}")))?;
            hops += path.hop_count();
            t.links.push((path.edges, demand));
        }
        accepted_vns += 1;
        accepted_vls += req.links.len();
        hops_total += hops;
        outcomes.push(RequestOutcome::Accepted {
            links: req.links.len(),
            hops,
        });
    }

    let ratio = |num: usize, den: usize| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    let base_total: f64 = g.edges().map(|e| g.link_metrics(e)[0]).sum();
    let reserved: f64 = g.edges().map(|e| overlay.consumed(e, 0)).sum();
    Ok(VneReport {
        vn_allocation_ratio: ratio(accepted_vns, requests.len()),
        link_allocation_ratio: ratio(accepted_vls, requested_vls),
        link_utilization: if base_total > 0.0 { reserved / base_total } else { 0.0 },
        avg_path_length: if accepted_vls == 0 { 0.0 } else { hops_total as f64 / accepted_vls as f64 },
        avg_time_per_vl: if calls == 0 || !record_timing { 0.0 } else { micros / calls as f64 },
        per_request_outcomes: outcomes,
    })
}
