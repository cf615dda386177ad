//! Backend names: `nm-general | nm-l1 | edijkstra | ksp:<k>:<ranking> | exhaustive`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::baseline::{solve_edijkstra, solve_exhaustive, solve_ksp, ExhaustiveConfig, KspConfig, KspRanking};
use crate::constraints::ConstraintSet;
use crate::graph::{GraphView, NodeId};
use crate::nm::{solve_general, solve_l1, GeneralConfig};
use crate::path::SolveResult;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown backend `{0}` (expected nm-general, nm-l1, edijkstra, ksp:<k>:<ranking> or exhaustive)")]
pub struct UnknownBackend(pub String);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    NmGeneral,
    NmL1,
    EDijkstra,
    Ksp(KspConfig),
    Exhaustive,
}

impl Backend {
    pub fn solve<G: GraphView + ?Sized>(&self, g: &G, src: NodeId, dst: NodeId, c: &ConstraintSet) -> SolveResult {
        match self {
            Backend::NmGeneral => solve_general(g, src, dst, c, &GeneralConfig::default()),
            Backend::NmL1 => solve_l1(g, src, dst, c),
            Backend::EDijkstra => solve_edijkstra(g, src, dst, c),
            Backend::Ksp(cfg) => solve_ksp(g, src, dst, c, cfg),
            Backend::Exhaustive => solve_exhaustive(g, src, dst, c, &ExhaustiveConfig::default()),
        }
    }

    pub fn is_nm(&self) -> bool {
        matches!(self, Backend::NmGeneral | Backend::NmL1)
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::NmGeneral => f.write_str("nm-general"),
            Backend::NmL1 => f.write_str("nm-l1"),
            Backend::EDijkstra => f.write_str("edijkstra"),
            Backend::Ksp(cfg) => write!(f, "ksp:{}:{}", cfg.k, cfg.ranking),
            Backend::Exhaustive => f.write_str("exhaustive"),
        }
    }
}

impl FromStr for Backend {
    type Err = UnknownBackend;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || UnknownBackend(s.to_owned());
        match s.trim() {
            "nm-general" => Ok(Backend::NmGeneral),
            "nm-l1" => Ok(Backend::NmL1),
            "edijkstra" => Ok(Backend::EDijkstra),
            "exhaustive" => Ok(Backend::Exhaustive),
            other => {
                let rest = other.strip_prefix("ksp:").ok_or_else(unknown)?;
                let (k, ranking) = match rest.split_once(':') {
                    Some((k, r)) => (k, r.parse::<KspRanking>().map_err(|_| unknown())?),
                    None => (rest, KspRanking::ByHops),
                };
                let k: usize = k.parse().map_err(|_| unknown())?;
                if k == 0 {
                    return Err(unknown());
                }
                Ok(Backend::Ksp(KspConfig::new(k, ranking)))
            }
        }
    }
}
