//! Residual-capacity view over an immutable [`PhysicalGraph`].
//!
//! Consumption is tracked in fixed point (units of 2^-64) so that a reserve
//! followed by the matching release restores the exact prior residuals. The
//! residual seen by solvers is `base - consumed`, recomputed from the integer
//! ledger on every change.

use std::sync::Arc;

use thiserror::Error;

use crate::graph::{EdgeId, GraphView, NodeId, PhysicalGraph};
use crate::path::PathResult;

const SCALE: f64 = 18_446_744_073_709_551_616.0; // 2^64

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OverlayError {
    #[error("edge {edge} metric {metric}: residual {residual} below demand {demand}")]
    InsufficientResidual {
        edge: usize,
        metric: usize,
        residual: f64,
        demand: f64,
    },
    #[error("edge {edge} metric {metric}: release of {amount} would exceed base capacity")]
    OverRelease { edge: usize, metric: usize, amount: f64 },
    #[error("node {node}: residual capacity {residual} below demand {demand}")]
    InsufficientNodeCapacity { node: usize, residual: f64, demand: f64 },
    #[error("node {node}: release of {amount} would exceed base capacity")]
    NodeOverRelease { node: usize, amount: f64 },
    #[error("demand must have {expected} link metrics, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("demand value {0} is negative or not finite")]
    InvalidDemand(f64),
}

fn to_fixed(v: f64) -> i128 {
    (v * SCALE) as i128
}

fn from_fixed(v: i128) -> f64 {
    v as f64 / SCALE
}

#[derive(Clone, Debug)]
pub struct ResidualOverlay {
    base: Arc<PhysicalGraph>,
    consumed_link: Vec<i128>,
    residual_link: Vec<f64>,
    consumed_node: Vec<i128>,
    residual_node: Vec<f64>,
}

impl ResidualOverlay {
    pub fn new(base: Arc<PhysicalGraph>) -> Self {
        let residual_link = base
            .edges()
            .flat_map(|e| base.link_metrics(e).to_vec())
            .collect::<Vec<_>>();
        let residual_node = base.node_capacities().to_vec();
        Self {
            consumed_link: vec![0; residual_link.len()],
            consumed_node: vec![0; residual_node.len()],
            residual_link,
            residual_node,
            base,
        }
    }

    pub fn base(&self) -> &Arc<PhysicalGraph> {
        &self.base
    }

    pub fn residual_node_capacity(&self, n: NodeId) -> f64 {
        self.residual_node[n.0]
    }

    /// Total amount currently reserved on `(edge, metric)`.
    pub fn consumed(&self, e: EdgeId, metric: usize) -> f64 {
        from_fixed(self.consumed_link[e.0 * self.base.link_arity() + metric])
    }

    fn check_demand(&self, demand: &[f64]) -> Result<(), OverlayError> {
        if demand.len() != self.base.link_arity() {
            return Err(OverlayError::ArityMismatch {
                expected: self.base.link_arity(),
                got: demand.len(),
            });
        }
        if let Some(&bad) = demand.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(OverlayError::InvalidDemand(bad));
        }
        Ok(())
    }

    fn refresh_link(&mut self, slot: usize, base_value: f64) {
        self.residual_link[slot] = base_value - from_fixed(self.consumed_link[slot]);
    }

    /// Decrements every on-path edge's residual link metrics by `demand`.
    /// Either all edges are updated or none.
    pub fn reserve(&mut self, path: &PathResult, demand: &[f64]) -> Result<(), OverlayError> {
        self.reserve_edges(&path.edges, demand)
    }

    pub fn reserve_edges(&mut self, edges: &[EdgeId], demand: &[f64]) -> Result<(), OverlayError> {
        self.check_demand(demand)?;
        let k = self.base.link_arity();
        for &e in edges {
            for (m, &d) in demand.iter().enumerate() {
                let slot = e.0 * k + m;
                let residual = self.residual_link[slot];
                let base_fixed = to_fixed(self.base.link_metrics(e)[m]);
                if residual < d || self.consumed_link[slot] + to_fixed(d) > base_fixed {
                    return Err(OverlayError::InsufficientResidual {
                        edge: e.0,
                        metric: m,
                        residual,
                        demand: d,
                    });
                }
            }
        }
        for &e in edges {
            for (m, &d) in demand.iter().enumerate() {
                let slot = e.0 * k + m;
                self.consumed_link[slot] += to_fixed(d);
                self.refresh_link(slot, self.base.link_metrics(e)[m]);
            }
        }
        Ok(())
    }

    /// Increments residuals by `demand`. The overlay does not track which
    /// reservations exist; it only refuses to exceed the base value.
    pub fn release(&mut self, path: &PathResult, demand: &[f64]) -> Result<(), OverlayError> {
        self.release_edges(&path.edges, demand)
    }

    pub fn release_edges(&mut self, edges: &[EdgeId], demand: &[f64]) -> Result<(), OverlayError> {
        self.check_demand(demand)?;
        let k = self.base.link_arity();
        for &e in edges {
            for (m, &d) in demand.iter().enumerate() {
                if self.consumed_link[e.0 * k + m] < to_fixed(d) {
                    return Err(OverlayError::OverRelease {
                        edge: e.0,
                        metric: m,
                        amount: d,
                    });
                }
            }
        }
        for &e in edges {
            for (m, &d) in demand.iter().enumerate() {
                let slot = e.0 * k + m;
                self.consumed_link[slot] -= to_fixed(d);
                self.refresh_link(slot, self.base.link_metrics(e)[m]);
            }
        }
        Ok(())
    }

    pub fn reserve_node(&mut self, n: NodeId, demand: f64) -> Result<(), OverlayError> {
        if !(demand >= 0.0) || !demand.is_finite() {
            return Err(OverlayError::InvalidDemand(demand));
        }
        let residual = self.residual_node[n.0];
        let base = self.base.node_capacity(n);
        if residual < demand || self.consumed_node[n.0] + to_fixed(demand) > to_fixed(base) {
            return Err(OverlayError::InsufficientNodeCapacity {
                node: n.0,
                residual,
                demand,
            });
        }
        self.consumed_node[n.0] += to_fixed(demand);
        self.residual_node[n.0] = base - from_fixed(self.consumed_node[n.0]);
        Ok(())
    }

    pub fn release_node(&mut self, n: NodeId, demand: f64) -> Result<(), OverlayError> {
        if !(demand >= 0.0) || !demand.is_finite() {
            return Err(OverlayError::InvalidDemand(demand));
        }
        if self.consumed_node[n.0] < to_fixed(demand) {
            return Err(OverlayError::NodeOverRelease { node: n.0, amount: demand });
        }
        self.consumed_node[n.0] -= to_fixed(demand);
        self.residual_node[n.0] = self.base.node_capacity(n) - from_fixed(self.consumed_node[n.0]);
        Ok(())
    }
}

impl GraphView for ResidualOverlay {
    fn node_count(&self) -> usize {
        self.base.node_count()
    }
    fn edge_count(&self) -> usize {
        self.base.edge_count()
    }
    fn link_arity(&self) -> usize {
        self.base.link_arity()
    }
    fn path_arity(&self) -> usize {
        self.base.path_arity()
    }
    fn out_edges(&self, u: NodeId) -> &[(NodeId, EdgeId)] {
        self.base.out_edges(u)
    }
    fn in_edges(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        self.base.in_edges(v)
    }
    fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.base.endpoints(e)
    }
    fn link_metrics(&self, e: EdgeId) -> &[f64] {
        let k = self.base.link_arity();
        &self.residual_link[e.0 * k..(e.0 + 1) * k]
    }
    fn path_metrics(&self, e: EdgeId) -> &[f64] {
        self.base.path_metrics(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeSpec;
    use proptest::prelude::*;

    fn chain(caps: &[f64]) -> (ResidualOverlay, PathResult) {
        let edges = caps
            .iter()
            .enumerate()
            .map(|(i, &c)| EdgeSpec::new(i, i + 1, vec![c], vec![1.0]))
            .collect();
        let g = Arc::new(PhysicalGraph::build(caps.len() + 1, 1, 1, edges, vec![]).unwrap());
        let p = PathResult::from_edges(&*g, NodeId(0), g.edges().collect());
        (ResidualOverlay::new(g), p)
    }

    fn residuals(o: &ResidualOverlay) -> Vec<f64> {
        o.base().edges().map(|e| o.link_metrics(e)[0]).collect()
    }

    #[test]
    fn reserve_decrements() {
        let (mut o, p) = chain(&[9.0, 9.0, 9.0]);
        o.reserve(&p, &[4.0]).unwrap();
        assert_eq!(residuals(&o), vec![5.0, 5.0, 5.0]);
    }

    #[test]
    fn reserve_is_atomic() {
        let (mut o, p) = chain(&[9.0, 3.0, 9.0]);
        let err = o.reserve(&p, &[4.0]).unwrap_err();
        assert!(matches!(err, OverlayError::InsufficientResidual { edge: 1, .. }));
        assert_eq!(residuals(&o), vec![9.0, 3.0, 9.0]);
    }

    #[test]
    fn release_cases() {
        let (mut o, p) = chain(&[9.0]);
        o.reserve(&p, &[4.0]).unwrap();
        assert_eq!(residuals(&o), vec![5.0]);
        o.release(&p, &[4.0]).unwrap();
        assert_eq!(residuals(&o), vec![9.0]);
        assert!(matches!(o.release(&p, &[4.0]), Err(OverlayError::OverRelease { .. })));
        assert_eq!(residuals(&o), vec![9.0]);
    }

    #[test]
    fn release_without_provenance() {
        // two 1-edge reservations, released as one 2-edge path
        let (mut o, p) = chain(&[9.0, 9.0]);
        o.reserve_edges(&[EdgeId(0)], &[2.0]).unwrap();
        o.reserve_edges(&[EdgeId(1)], &[2.0]).unwrap();
        o.release(&p, &[2.0]).unwrap();
        assert_eq!(residuals(&o), vec![9.0, 9.0]);
    }

    #[test]
    fn node_capacity_round_trip() {
        let g = Arc::new(PhysicalGraph::build(2, 1, 1, vec![], vec![200.0, 10.0]).unwrap());
        let mut o = ResidualOverlay::new(g);
        o.reserve_node(NodeId(0), 12.5).unwrap();
        assert_eq!(o.residual_node_capacity(NodeId(0)), 187.5);
        assert!(o.reserve_node(NodeId(1), 10.5).is_err());
        o.release_node(NodeId(0), 12.5).unwrap();
        assert_eq!(o.residual_node_capacity(NodeId(0)), 200.0);
        assert!(o.release_node(NodeId(0), 0.1).is_err());
    }

    #[test]
    fn bad_demand() {
        let (mut o, p) = chain(&[9.0]);
        assert!(matches!(o.reserve(&p, &[1.0, 1.0]), Err(OverlayError::ArityMismatch { .. })));
        assert!(matches!(o.reserve(&p, &[-1.0]), Err(OverlayError::InvalidDemand(_))));
    }

    proptest! {
        #[test]
        fn residuals_stay_in_range_and_restore(
            caps in prop::collection::vec(0.5f64..9.0, 1..5),
            ops in prop::collection::vec((0.01f64..3.0, any::<bool>()), 1..40),
        ) {
            let (mut o, p) = chain(&caps);
            let start: Vec<u64> = residuals(&o).iter().map(|v| v.to_bits()).collect();
            let mut held = Vec::new();
            for (d, release) in ops {
                if release && !held.is_empty() {
                    let d = held.pop().unwrap();
                    o.release(&p, &[d]).unwrap();
                } else {
                    let before = residuals(&o);
                    match o.reserve(&p, &[d]) {
                        Ok(()) => held.push(d),
                        Err(_) => prop_assert_eq!(&before, &residuals(&o)),
                    }
                }
                for (r, c) in residuals(&o).iter().zip(&caps) {
                    prop_assert!(*r >= 0.0 && *r <= *c);
                }
            }
            while let Some(d) = held.pop() {
                o.release(&p, &[d]).unwrap();
            }
            let end: Vec<u64> = residuals(&o).iter().map(|v| v.to_bits()).collect();
            prop_assert_eq!(start, end);
        }
    }
}
