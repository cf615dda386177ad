//! Minimum-hop path embedding under link (bottleneck) and path (additive)
//! constraints.
//!
//! The core solvers are [`solve_general`] for any number of path bounds and
//! [`solve_l1`] for exactly one. [`baseline`] holds the comparison solvers,
//! [`topogen`] the synthetic topologies and [`harness`] the VNE and
//! traffic-steering experiments.
//!
//! ```
//! use nmpath::{ConstraintSet, EdgeSpec, NodeId, PhysicalGraph, solve_l1};
//!
//! let edges = vec![
//!     EdgeSpec::new(0, 1, vec![5.0], vec![1.0]),
//!     EdgeSpec::new(1, 2, vec![5.0], vec![1.0]),
//!     EdgeSpec::new(0, 2, vec![1.0], vec![1.0]),
//! ];
//! let g = PhysicalGraph::build(3, 1, 1, edges, vec![]).unwrap();
//! let c = ConstraintSet::bw_delay(Some(4.0), Some(10.0));
//! let p = solve_l1(&g, NodeId(0), NodeId(2), &c).unwrap();
//! assert_eq!(p.hop_count(), 2);
//! ```

pub mod baseline;
pub mod constraints;
pub mod graph;
pub mod harness;
pub mod nm;
pub mod overlay;
pub mod path;
pub mod solver;
pub mod topofile;
pub mod topogen;

pub use baseline::{solve_edijkstra, solve_exhaustive, solve_ksp, ExhaustiveConfig, KspConfig, KspRanking};
pub use constraints::{ConstraintError, ConstraintSet, LinkBound, MetricAccumulator, PathBound, PathBoundMode};
pub use graph::{symmetric_pair, EdgeId, EdgeMetrics, EdgeSpec, GraphError, GraphView, NodeId, PhysicalGraph};
pub use harness::{energy_efficiency, HarnessError};
pub use nm::{build_neighborhoods, solve_general, solve_l1, GeneralConfig, NeighborhoodList, SearchLabels};
pub use overlay::{OverlayError, ResidualOverlay};
pub use path::{format_result_line, PathResult, SolveError, SolveResult};
pub use solver::{Backend, UnknownBackend};
