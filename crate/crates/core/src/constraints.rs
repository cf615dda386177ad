//! SLO constraint sets: `l` lower bounds on link metrics plus `p` upper bounds
//! on accumulated path metrics.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{EdgeId, GraphView};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstraintError {
    #[error("{kind} bound references metric {index}, but arity is {arity}")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        arity: usize,
    },
    #[error("duplicate {kind} bound on metric {index}")]
    DuplicateIndex { kind: &'static str, index: usize },
    #[error("arity mismatch: expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("value {value} at position {position} is not positive")]
    NonPositiveValue { position: usize, value: f64 },
    #[error("cannot parse constraint `{0}`")]
    Syntax(String),
}

/// How accumulated path metrics are compared against their bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PathBoundMode {
    /// `sum < bound`
    #[default]
    Strict,
    /// `sum <= bound`
    Inclusive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBound {
    pub metric: usize,
    pub min: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathBound {
    pub metric: usize,
    pub max: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintSet {
    link_bounds: Vec<LinkBound>,
    path_bounds: Vec<PathBound>,
    mode: PathBoundMode,
}

impl ConstraintSet {
    pub fn new(link_bounds: Vec<LinkBound>, path_bounds: Vec<PathBound>) -> Result<Self, ConstraintError> {
        for (i, b) in link_bounds.iter().enumerate() {
            if link_bounds[..i].iter().any(|o| o.metric == b.metric) {
                return Err(ConstraintError::DuplicateIndex { kind: "link", index: b.metric });
            }
        }
        for (i, b) in path_bounds.iter().enumerate() {
            if path_bounds[..i].iter().any(|o| o.metric == b.metric) {
                return Err(ConstraintError::DuplicateIndex { kind: "path", index: b.metric });
            }
        }
        Ok(Self {
            link_bounds,
            path_bounds,
            mode: PathBoundMode::Strict,
        })
    }

    /// No bounds at all; every path is feasible.
    pub fn unconstrained() -> Self {
        Self::default()
    }

    /// Convenience for the common `metric 0 >= bw`, `metric 0 < delay` shape.
    pub fn bw_delay(min_bw: Option<f64>, max_delay: Option<f64>) -> Self {
        Self {
            link_bounds: min_bw.map(|min| LinkBound { metric: 0, min }).into_iter().collect(),
            path_bounds: max_delay.map(|max| PathBound { metric: 0, max }).into_iter().collect(),
            mode: PathBoundMode::Strict,
        }
    }

    pub fn with_mode(mut self, mode: PathBoundMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn mode(&self) -> PathBoundMode {
        self.mode
    }

    pub fn link_bounds(&self) -> &[LinkBound] {
        &self.link_bounds
    }

    pub fn path_bounds(&self) -> &[PathBound] {
        &self.path_bounds
    }

    /// `l`
    pub fn link_count(&self) -> usize {
        self.link_bounds.len()
    }

    /// `p`
    pub fn path_count(&self) -> usize {
        self.path_bounds.len()
    }

    /// Checks that every bound refers to a metric the graph declares.
    pub fn validate(&self, link_arity: usize, path_arity: usize) -> Result<(), ConstraintError> {
        for b in &self.link_bounds {
            if b.metric >= link_arity {
                return Err(ConstraintError::IndexOutOfRange {
                    kind: "link",
                    index: b.metric,
                    arity: link_arity,
                });
            }
        }
        for b in &self.path_bounds {
            if b.metric >= path_arity {
                return Err(ConstraintError::IndexOutOfRange {
                    kind: "path",
                    index: b.metric,
                    arity: path_arity,
                });
            }
        }
        Ok(())
    }

    /// Link bounds against raw link metrics.
    pub fn links_ok(&self, link_metrics: &[f64]) -> bool {
        self.link_bounds.iter().all(|b| link_metrics[b.metric] >= b.min)
    }

    pub fn edge_feasible(&self, link_metrics: &[f64]) -> Result<bool, ConstraintError> {
        self.check_link_len(link_metrics.len())?;
        Ok(self.links_ok(link_metrics))
    }

    #[inline]
    pub fn sum_ok(&self, sum: f64, bound: f64) -> bool {
        match self.mode {
            PathBoundMode::Strict => sum < bound,
            PathBoundMode::Inclusive => sum <= bound,
        }
    }

    /// Path bounds against accumulated sums.
    pub fn sums_ok(&self, sums: &[f64]) -> bool {
        self.path_bounds.iter().all(|b| self.sum_ok(sums[b.metric], b.max))
    }

    pub fn path_feasible(&self, acc: &MetricAccumulator) -> Result<bool, ConstraintError> {
        self.check_path_len(acc.sums.len())?;
        Ok(self.sums_ok(&acc.sums))
    }

    /// Per-edge usability mask: `true` where every link bound holds.
    pub fn prune<G: GraphView + ?Sized>(&self, g: &G) -> Vec<bool> {
        (0..g.edge_count())
            .map(|i| self.links_ok(g.link_metrics(EdgeId(i))))
            .collect()
    }

    fn check_link_len(&self, len: usize) -> Result<(), ConstraintError> {
        match self.link_bounds.iter().map(|b| b.metric).max() {
            Some(m) if m >= len => Err(ConstraintError::ArityMismatch { expected: m + 1, got: len }),
            _ => Ok(()),
        }
    }

    fn check_path_len(&self, len: usize) -> Result<(), ConstraintError> {
        match self.path_bounds.iter().map(|b| b.metric).max() {
            Some(m) if m >= len => Err(ConstraintError::ArityMismatch { expected: m + 1, got: len }),
            _ => Ok(()),
        }
    }

    /// Parses one constraint per line: `link <i> >= <v>` or `path <i> < <v>`.
    /// `#` starts a comment; blank lines are ignored. `path <i> <= <v>` switches
    /// the set to inclusive mode.
    pub fn parse_literals(text: &str) -> Result<Self, ConstraintError> {
        let mut links = Vec::new();
        let mut paths = Vec::new();
        let mut inclusive = None;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.parse::<Literal>()? {
                Literal::Link(b) => links.push(b),
                Literal::Path(b, mode) => {
                    if inclusive.is_some_and(|m| m != mode) {
                        return Err(ConstraintError::Syntax(format!("{line} (mixed < and <=)")));
                    }
                    inclusive = Some(mode);
                    paths.push(b);
                }
            }
        }
        Ok(Self::new(links, paths)?.with_mode(inclusive.unwrap_or_default()))
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.link_bounds {
            writeln!(f, "link {} >= {}", b.metric, b.min)?;
        }
        let op = match self.mode {
            PathBoundMode::Strict => "<",
            PathBoundMode::Inclusive => "<=",
        };
        for b in &self.path_bounds {
            writeln!(f, "path {} {} {}", b.metric, op, b.max)?;
        }
        Ok(())
    }
}

/// A single constraint literal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Literal {
    Link(LinkBound),
    Path(PathBound, PathBoundMode),
}

impl Literal {
    /// Parses the body after the `link`/`path` keyword, e.g. `0 >= 5`.
    pub fn parse_link_body(body: &str) -> Result<LinkBound, ConstraintError> {
        match format!("link {body}").parse()? {
            Literal::Link(b) => Ok(b),
            Literal::Path(..) => unreachable!(),
        }
    }

    pub fn parse_path_body(body: &str) -> Result<(PathBound, PathBoundMode), ConstraintError> {
        match format!("path {body}").parse()? {
            Literal::Path(b, m) => Ok((b, m)),
            Literal::Link(_) => unreachable!(),
        }
    }
}

impl FromStr for Literal {
    type Err = ConstraintError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || ConstraintError::Syntax(s.trim().to_owned());
        let toks: Vec<&str> = s.split_whitespace().collect();
        let [kind, idx, op, val] = toks[..] else {
            return Err(syntax());
        };
        let metric: usize = idx.parse().map_err(|_| syntax())?;
        let value: f64 = val.parse().map_err(|_| syntax())?;
        if value.is_nan() {
            return Err(syntax());
        }
        match (kind, op) {
            ("link", ">=") => Ok(Literal::Link(LinkBound { metric, min: value })),
            ("path", "<") => Ok(Literal::Path(PathBound { metric, max: value }, PathBoundMode::Strict)),
            ("path", "<=") => Ok(Literal::Path(PathBound { metric, max: value }, PathBoundMode::Inclusive)),
            _ => Err(syntax()),
        }
    }
}

/// Running component-wise sum of path metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricAccumulator {
    pub sums: Vec<f64>,
}

impl MetricAccumulator {
    pub fn zero(arity: usize) -> Self {
        Self { sums: vec![0.0; arity] }
    }

    pub fn from_sums(sums: Vec<f64>) -> Self {
        Self { sums }
    }

    pub fn extend(&mut self, path_metrics: &[f64]) {
        for (s, m) in self.sums.iter_mut().zip(path_metrics) {
            *s += m;
        }
    }

    pub fn extended(&self, path_metrics: &[f64]) -> Self {
        let mut next = self.clone();
        next.extend(path_metrics);
        next
    }
}

/// Maps positive multiplicative metrics (e.g. reliabilities) to an additive
/// domain via the natural log. A product bound `P` becomes the sum bound `ln P`.
pub fn to_additive(values: &[f64]) -> Result<Vec<f64>, ConstraintError> {
    values
        .iter()
        .enumerate()
        .map(|(position, &value)| {
            if value > 0.0 {
                Ok(value.ln())
            } else {
                Err(ConstraintError::NonPositiveValue { position, value })
            }
        })
        .collect()
}
