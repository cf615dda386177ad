//! Line-oriented topology text format.
//!
//! ```text
//! # comment
//! nodes <N> link_metrics <l> path_metrics <p>
//! node <id> cap <cpu>            # label=<name>   (optional)
//! edge <src> <dst> <lm_1 .. lm_l> <pm_1 .. pm_p>
//! ```
//!
//! The header must be the first non-comment line. Node lines are optional;
//! missing nodes get capacity 0.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::graph::{EdgeSpec, GraphError, GraphView, NodeId, PhysicalGraph};

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn perr(line: usize, msg: impl Into<String>) -> TopologyError {
    TopologyError::Parse { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, TopologyError> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| perr(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_topology(text: &str) -> Result<PhysicalGraph, TopologyError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut caps: Vec<f64> = Vec::new();
    let mut labels: Vec<(usize, String)> = Vec::new();
    let mut edges = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let (body, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
            None => (raw, None),
        };
        let mut toks = body.split_whitespace();
        let Some(kw) = toks.next() else { continue };
        match (kw, header) {
            ("nodes", None) => {
                let n: usize = num(toks.next(), lineno, "node count")?;
                if toks.next() != Some("link_metrics") {
                    return Err(perr(lineno, "expected `link_metrics`"));
                }
                let l: usize = num(toks.next(), lineno, "link metric arity")?;
                if toks.next() != Some("path_metrics") {
                    return Err(perr(lineno, "expected `path_metrics`"));
                }
                let p: usize = num(toks.next(), lineno, "path metric arity")?;
                header = Some((n, l, p));
                caps = vec![0.0; n];
            }
            ("nodes", Some(_)) => return Err(perr(lineno, "duplicate header")),
            (_, None) => return Err(perr(lineno, "expected header `nodes <N> link_metrics <l> path_metrics <p>`")),
            ("node", Some((n, _, _))) => {
                let id: usize = num(toks.next(), lineno, "node id")?;
                if id >= n {
                    return Err(perr(lineno, format!("node id {id} out of range")));
                }
                if toks.next() != Some("cap") {
                    return Err(perr(lineno, "expected `cap`"));
                }
                caps[id] = num(toks.next(), lineno, "capacity")?;
                if let Some(label) = comment.and_then(|c| c.trim().strip_prefix("label=")) {
                    let label = label.trim();
                    if !label.is_empty() {
                        labels.push((id, label.to_owned()));
                    }
                }
            }
            ("edge", Some((_, l, p))) => {
                let src: usize = num(toks.next(), lineno, "edge source")?;
                let dst: usize = num(toks.next(), lineno, "edge destination")?;
                let mut link = Vec::with_capacity(l);
                for k in 0..l {
                    link.push(num(toks.next(), lineno, &format!("link metric {k}"))?);
                }
                let mut path = Vec::with_capacity(p);
                for k in 0..p {
                    path.push(num(toks.next(), lineno, &format!("path metric {k}"))?);
                }
                edges.push((lineno, EdgeSpec::new(src, dst, link, path)));
            }
            (other, _) => return Err(perr(lineno, format!("unknown keyword `{other}`"))),
        }
        if kw != "nodes" && toks.next().is_some() {
            return Err(perr(lineno, "trailing tokens"));
        }
    }

    let (n, l, p) = header.ok_or_else(|| perr(0, "missing header"))?;
    let lines: Vec<usize> = edges.iter().map(|(ln, _)| *ln).collect();
    let specs = edges.into_iter().map(|(_, e)| e).collect();
    let mut g = PhysicalGraph::build(n, l, p, specs, caps).map_err(|e| match &e {
        GraphError::IndexOutOfRange { edge, .. }
        | GraphError::SelfLoop { edge, .. }
        | GraphError::InvalidLinkMetric { edge, .. } => perr(lines[*edge], e.to_string()),
        _ => TopologyError::Graph(e),
    })?;
    for (id, label) in labels {
        g.set_label(NodeId(id), label);
    }
    Ok(g)
}

pub fn read_topology(path: impl AsRef<Path>) -> Result<PhysicalGraph, TopologyError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TopologyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_topology(&text)
}

/// Serializes a graph; values use Rust's shortest round-trip float format.
pub fn write_topology(g: &PhysicalGraph) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "nodes {} link_metrics {} path_metrics {}",
        g.node_count(),
        g.link_arity(),
        g.path_arity()
    )
    .unwrap();
    for n in g.nodes() {
        write!(s, "node {} cap {}", n, g.node_capacity(n)).unwrap();
        if let Some(label) = g.label(n) {
            write!(s, " # label={label}").unwrap();
        }
        s.push('\n');
    }
    for e in g.edges() {
        let (a, b) = g.endpoints(e);
        write!(s, "edge {a} {b}").unwrap();
        for v in g.link_metrics(e).iter().chain(g.path_metrics(e)) {
            write!(s, " {v}").unwrap();
        }
        s.push('\n');
    }
    s
}
