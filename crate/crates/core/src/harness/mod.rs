//! Experiment drivers: VNE management-plane embedding and data-plane traffic
//! steering, plus the sweep runner that produces CSV rows.

mod steering;
pub mod sweep;
mod vne;

use thiserror::Error;

pub use steering::{draw_pairs, run_steering, SteeringOptions, SteeringReport};
pub use sweep::{ConfigError, ExperimentConfig, Scenario};
pub use vne::{generate_vn_requests, run_vne, RequestOutcome, VnRequest, VneReport, VirtualLink};

use crate::baseline::ksp_candidates;
use crate::constraints::ConstraintSet;
use crate::graph::{GraphView, NodeId, PhysicalGraph};
use crate::overlay::ResidualOverlay;
use crate::path::{PathResult, SolveError, SolveResult};
use crate::solver::{Backend, UnknownBackend};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error(transparent)]
    UnknownBackend(#[from] UnknownBackend),
    #[error("energy efficiency needs 0 <= used <= total and total > 0 (total {total}, used {used})")]
    InvalidCounts { total: usize, used: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("solver failed: {0}")]
    Solver(#[from] SolveError),
}

/// Unused-node fraction times total allocated throughput:
/// `((total - used) / total) * bw_total`.
pub fn energy_efficiency(total_nodes: usize, used_nodes: usize, bw_total: f64) -> Result<f64, HarnessError> {
    if total_nodes == 0 || used_nodes > total_nodes {
        return Err(HarnessError::InvalidCounts {
            total: total_nodes,
            used: used_nodes,
        });
    }
    Ok((total_nodes - used_nodes) as f64 / total_nodes as f64 * bw_total)
}

/// Solves one virtual-link request against the residual state.
///
/// k-SP backends enumerate candidates on the base metrics (the precomputed
/// path set) and then take the first one that is feasible on the residuals.
/// Every other backend searches the residual view directly.
pub(crate) fn solve_on_residual(
    backend: &Backend,
    base: &PhysicalGraph,
    overlay: &ResidualOverlay,
    src: NodeId,
    dst: NodeId,
    c: &ConstraintSet,
) -> SolveResult {
    match backend {
        Backend::Ksp(cfg) => {
            let cands = ksp_candidates(base, src, dst, cfg);
            if cands.is_empty() {
                return Err(SolveError::Unreachable);
            }
            cands
                .into_iter()
                .map(|p| PathResult::from_edges(overlay, src, p.edges))
                .find(|p| p.satisfies(c))
                .ok_or(SolveError::Infeasible)
        }
        _ => backend.solve(overlay, src, dst, c),
    }
}

/// Adds an unbounded path constraint for backends that need exactly one.
pub(crate) fn adapt_constraints(backend: &Backend, g: &impl GraphView, c: ConstraintSet) -> ConstraintSet {
    let needs_one = matches!(backend, Backend::NmL1 | Backend::EDijkstra);
    if needs_one && c.path_count() == 0 && g.path_arity() > 0 {
        let links = c.link_bounds().to_vec();
        ConstraintSet::new(
            links,
            vec![crate::constraints::PathBound {
                metric: 0,
                max: f64::INFINITY,
            }],
        )
        .expect("fresh bound set")
        .with_mode(c.mode())
    } else {
        c
    }
}
