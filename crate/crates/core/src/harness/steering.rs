use std::collections::HashSet;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{adapt_constraints, energy_efficiency, solve_on_residual, HarnessError};
use crate::constraints::ConstraintSet;
use crate::graph::{GraphView, NodeId, PhysicalGraph};
use crate::overlay::ResidualOverlay;
use crate::solver::Backend;

#[derive(Clone, Debug, PartialEq)]
pub struct SteeringReport {
    /// Sum of the demands of all allocated virtual links (Gbps).
    pub total_throughput: f64,
    pub energy_efficiency: f64,
    /// Mean hop count over allocated virtual links; 0 when none.
    pub avg_path_length: f64,
    /// Mean wall-clock microseconds per solver call; 0 when timing is off.
    pub avg_time_per_vl: f64,
    /// Distinct physical nodes touched by any allocated path.
    pub n_used: usize,
    pub n_total: usize,
    pub vl_count: usize,
    pub solver_calls: usize,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SteeringOptions {
    pub record_timing: bool,
}

/// Distinct ordered `(src, dst)` pairs with `src != dst`, drawn uniformly
/// without replacement.
pub fn draw_pairs(node_count: usize, pairs: usize, seed: u64) -> Vec<(NodeId, NodeId)> {
    let possible = node_count.saturating_mul(node_count.saturating_sub(1));
    let want = pairs.min(possible);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5354_4545_5249_4e47);
    let mut seen = HashSet::with_capacity(want);
    let mut out = Vec::with_capacity(want);
    while out.len() < want {
        let s = rng.gen_range(0..node_count);
        let d = rng.gen_range(0..node_count);
        if s != d && seen.insert((s, d)) {
            out.push((NodeId(s), NodeId(d)));
        }
    }
    out
}

/// For every drawn pair, allocates identical virtual links (demand = the bw
/// bound of `c`) until the backend finds no feasible path on the residuals.
pub fn run_steering(
    g: Arc<PhysicalGraph>,
    pairs: usize,
    c: &ConstraintSet,
    backend: &Backend,
    seed: u64,
    opts: SteeringOptions,
) -> Result<SteeringReport, HarnessError> {
    if pairs == 0 {
        return Err(HarnessError::Invalid("need at least one pair".into()));
    }
    let bw = c
        .link_bounds()
        .iter()
        .find(|b| b.metric == 0)
        .map(|b| b.min)
        .filter(|&v| v > 0.0)
        .ok_or_else(|| HarnessError::Invalid("steering needs a positive bandwidth bound on link metric 0".into()))?;
    let mut demand = vec![0.0; g.link_arity()];
    demand[0] = bw;
    let c = adapt_constraints(backend, &*g, c.clone());

    let mut overlay = ResidualOverlay::new(g.clone());
    let mut used = vec![false; g.node_count()];
    let mut vl_count = 0usize;
    let mut hops_total = 0usize;
    let mut calls = 0usize;
    let mut micros_total = 0.0f64;

    for (src, dst) in draw_pairs(g.node_count(), pairs, seed) {
        loop {
            let started = opts.record_timing.then(Instant::now);
            let result = solve_on_residual(backend, &g, &overlay, src, dst, &c);
            if let Some(t) = started {
                micros_total += t.elapsed().as_secs_f64() * 1e6;
            }
            calls += 1;
            let path = match result {
                Ok(p) => p,
                Err(e) if e.is_no_path() => break,
                Err(e) => return Err(e.into()),
            };
            if path.hop_count() == 0 {
                break;
            }
            overlay
                .reserve(&path, &demand)
                .map_err(|e| HarnessError::Invalid(format!("feasible path could not be reserved: {e}")))?;
            vl_count += 1;
            hops_total += path.hop_count();
            for n in &path.nodes {
                used[n.0] = true;
            }
        }
    }

    let n_used = used.iter().filter(|&&u| u).count();
    let total_throughput = vl_count as f64 * bw;
    Ok(SteeringReport {
        total_throughput,
        energy_efficiency: energy_efficiency(g.node_count(), n_used, total_throughput)?,
        avg_path_length: if vl_count == 0 { 0.0 } else { hops_total as f64 / vl_count as f64 },
        avg_time_per_vl: if calls == 0 || !opts.record_timing { 0.0 } else { micros_total / calls as f64 },
        n_used,
        n_total: g.node_count(),
        vl_count,
        solver_calls: calls,
    })
}
