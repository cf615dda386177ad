//! Neighborhoods Method solvers.
//!
//! [`general`] handles any mix of link and path bounds by growing hop-indexed
//! neighborhoods and enumerating every loop-free path of the current length.
//! [`l1`] handles the single-path-bound case in polynomial time with a
//! level-synchronous relaxation.

pub mod general;
pub mod l1;

pub use general::{backward_pass, backward_pass_limited, build_neighborhoods, solve_general, GeneralConfig};
pub use l1::{solve_l1, solve_l1_traced, L1Trace, SearchLabels};

use crate::graph::NodeId;

/// Ordered node sets; level `k` holds nodes reached in `k` hops.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborhoodList {
    levels: Vec<Vec<NodeId>>,
    membership: Vec<Option<usize>>,
    usable: Vec<bool>,
}

impl NeighborhoodList {
    pub(crate) fn with_source(node_count: usize, src: NodeId, usable: Vec<bool>) -> Self {
        let mut membership = vec![None; node_count];
        membership[src.0] = Some(0);
        Self {
            levels: vec![vec![src]],
            membership,
            usable,
        }
    }

    /// Level sets, each sorted ascending.
    pub fn levels(&self) -> &[Vec<NodeId>] {
        &self.levels
    }

    /// `L_NH(u)`: last level containing `u`.
    pub fn membership(&self, u: NodeId) -> Option<usize> {
        self.membership[u.0]
    }

    /// Number of hops represented by the last level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn last(&self) -> &[NodeId] {
        self.levels.last().unwrap()
    }

    pub fn contains(&self, level: usize, u: NodeId) -> bool {
        self.levels[level].binary_search(&u).is_ok()
    }

    /// Edge usability mask the levels were built with.
    pub fn usable(&self) -> &[bool] {
        &self.usable
    }

    pub(crate) fn push_level(&mut self, mut level: Vec<NodeId>) {
        level.sort_unstable();
        level.dedup();
        let k = self.levels.len();
        for &u in &level {
            self.membership[u.0] = Some(k);
        }
        self.levels.push(level);
    }

    pub(crate) fn from_parts(levels: Vec<Vec<NodeId>>, membership: Vec<Option<usize>>, usable: Vec<bool>) -> Self {
        Self {
            levels,
            membership,
            usable,
        }
    }
}
