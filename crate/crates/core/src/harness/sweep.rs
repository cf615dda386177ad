//! Experiment sweeps over (model, degree or delay grid, severity, backend,
//! seed), with CSV and plot-data output.
//!
//! # Config grammar
//!
//! ```text
//! # comment
//! key = value            # global setting or default for every grid
//! [grid]                 # starts a grid; repeated sections add grids
//! key = value            # overrides the defaults for this grid only
//! ```
//!
//! Lists are comma-separated. `seeds` also accepts inclusive ranges `a..b`;
//! `delay_percents` also accepts `start:end:step` (descending). Global-only
//! keys: `scenario` (`steering | vne | solve`), `scale` (`desk | paper`),
//! `output`, `jobs`, `record_timing`. Grid keys: `models` (`waxman | ba`),
//! `topology` (a topology file, replaces `models`/`degrees`), `nodes`,
//! `degrees`, `bw_levels`, `delay_levels`, `delay_percents`, `backends`,
//! `seeds`, `pairs`, `requests`, `vn_nodes`, `max_demand`, `link_capacity`,
//! `cpu`, `max_delay`, `alpha`, `beta`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use super::{generate_vn_requests, run_steering, run_vne, draw_pairs, SteeringOptions};
use crate::graph::{GraphView, PhysicalGraph};
use crate::solver::Backend;
use crate::topofile::read_topology;
use crate::topogen::{
    generate, percent_grid, resolve_constraint_severity, resolve_with_delay_percent, DelayModel, GenSpec, Severity,
    TopologyModel,
};

pub const CSV_HEADER: &str = "model,nodes,avg_degree,bw_level,delay_level,backend,seed,vn_alloc_ratio,link_alloc_ratio,link_util,throughput_gbps,energy_eff,avg_hops,avg_us,n_used";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config key `{key}`: {msg}")]
    Key { key: String, msg: String },
    #[error("config line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("cell {cell}: {msg}")]
    Runtime { cell: String, msg: String },
}

fn key_err(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Key {
        key: key.to_owned(),
        msg: msg.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    Steering,
    Vne,
    Solve,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Desk,
    Paper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Waxman,
    BarabasiAlbert,
}

impl ModelKind {
    fn name(self) -> &'static str {
        match self {
            ModelKind::Waxman => "waxman",
            ModelKind::BarabasiAlbert => "ba",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DelayAxis {
    Level(Severity),
    Percent(f64),
}

impl DelayAxis {
    fn label(&self) -> String {
        match self {
            DelayAxis::Level(s) => s.to_string(),
            DelayAxis::Percent(p) => format!("{p}%"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub models: Vec<ModelKind>,
    pub topology: Option<PathBuf>,
    pub nodes: usize,
    pub degrees: Vec<f64>,
    pub bw_levels: Vec<Severity>,
    pub delays: Vec<DelayAxis>,
    pub backends: Vec<Backend>,
    pub seeds: Vec<u64>,
    pub pairs: usize,
    pub requests: usize,
    pub vn_nodes: usize,
    pub max_demand: f64,
    pub link_capacity: f64,
    pub cpu: f64,
    pub max_delay: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub scale: Scale,
    pub output: Option<PathBuf>,
    pub jobs: usize,
    pub record_timing: bool,
    pub grids: Vec<Grid>,
}

const GLOBAL_KEYS: &[&str] = &["scenario", "scale", "output", "jobs", "record_timing"];
const GRID_KEYS: &[&str] = &[
    "models",
    "topology",
    "nodes",
    "degrees",
    "bw_levels",
    "delay_levels",
    "delay_percents",
    "backends",
    "seeds",
    "pairs",
    "requests",
    "vn_nodes",
    "max_demand",
    "link_capacity",
    "cpu",
    "max_delay",
    "alpha",
    "beta",
];

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim().parse().map_err(|_| key_err(key, format!("invalid value `{v}`")))
}

fn parse_seeds(v: &str) -> Result<Vec<u64>, ConfigError> {
    let mut out = Vec::new();
    for item in list(v) {
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b): (u64, u64) = (parse_num("seeds", a)?, parse_num("seeds", b)?);
                if a > b {
                    return Err(key_err("seeds", format!("empty range `{item}`")));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_num("seeds", item)?),
        }
    }
    Ok(out)
}

fn parse_percents(v: &str) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = v.split(':').collect();
    if let [start, end, step] = parts[..] {
        let (s, e, st): (f64, f64, f64) = (
            parse_num("delay_percents", start)?,
            parse_num("delay_percents", end)?,
            parse_num("delay_percents", step)?,
        );
        if !(st > 0.0) || s < e {
            return Err(key_err("delay_percents", "need start >= end and step > 0"));
        }
        return Ok(percent_grid(s, e, st));
    }
    list(v).map(|p| parse_num("delay_percents", p)).collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut global: BTreeMap<String, String> = BTreeMap::new();
        let mut sections: Vec<BTreeMap<String, String>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line == "[grid]" {
                sections.push(BTreeMap::new());
                continue;
            }
            if line.starts_with('[') {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    msg: format!("unknown section `{line}`"),
                });
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    msg: "expected `key = value`".into(),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            let in_section = !sections.is_empty();
            if GLOBAL_KEYS.contains(&k) {
                if in_section {
                    return Err(key_err(k, "only allowed before the first [grid] section"));
                }
            } else if !GRID_KEYS.contains(&k) {
                return Err(key_err(k, "unknown key"));
            }
            let target = sections.last_mut().unwrap_or(&mut global);
            if target.insert(k.to_owned(), v.to_owned()).is_some() {
                return Err(key_err(k, "given twice"));
            }
        }

        let scenario = match global.get("scenario").map(String::as_str) {
            Some("steering") => Scenario::Steering,
            Some("vne") => Scenario::Vne,
            Some("solve") => Scenario::Solve,
            Some(o) => return Err(key_err("scenario", format!("unknown scenario `{o}`"))),
            None => return Err(key_err("scenario", "missing")),
        };
        let scale = match global.get("scale").map(String::as_str) {
            None | Some("desk") => Scale::Desk,
            Some("paper") => Scale::Paper,
            Some(o) => return Err(key_err("scale", format!("unknown scale `{o}`"))),
        };
        let jobs = match global.get("jobs") {
            Some(v) => parse_num::<usize>("jobs", v)?.max(1),
            None => 1,
        };
        let record_timing = match global.get("record_timing").map(String::as_str) {
            None | Some("false") => false,
            Some("true") => true,
            Some(o) => return Err(key_err("record_timing", format!("expected true or false, got `{o}`"))),
        };
        let output = global.get("output").map(PathBuf::from);

        if sections.is_empty() {
            sections.push(BTreeMap::new());
        }
        let grids = sections
            .iter()
            .map(|s| {
                let mut merged = global.clone();
                merged.extend(s.iter().map(|(k, v)| (k.clone(), v.clone())));
                Grid::from_map(&merged, scenario, scale)
            })
            .collect::<Result<Vec<_>, _>>()?;

        Ok(Self {
            scenario,
            scale,
            output,
            jobs,
            record_timing,
            grids,
        })
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| key_err("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Human-facing notes about the resolved config (e.g. long runtimes).
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        for g in &self.grids {
            if g.topology.is_none() && g.nodes >= 5000 {
                w.push(format!(
                    "{}-node topologies requested; expect a long runtime",
                    g.nodes
                ));
            }
        }
        w.dedup();
        w
    }

    pub fn cell_count(&self) -> usize {
        self.cells().len()
    }

    fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for (gi, g) in self.grids.iter().enumerate() {
            let topos: Vec<(Option<ModelKind>, Option<f64>)> = if g.topology.is_some() {
                vec![(None, None)]
            } else {
                g.models
                    .iter()
                    .flat_map(|&m| g.degrees.iter().map(move |&d| (Some(m), Some(d))))
                    .collect()
            };
            let severities: Vec<(Option<Severity>, Option<DelayAxis>)> = match self.scenario {
                Scenario::Vne => vec![(None, None)],
                _ => g
                    .bw_levels
                    .iter()
                    .flat_map(|&b| g.delays.iter().map(move |&d| (Some(b), Some(d))))
                    .collect(),
            };
            for &(model, degree) in &topos {
                for &(bw, delay) in &severities {
                    for &backend in &g.backends {
                        for &seed in &g.seeds {
                            cells.push(Cell {
                                grid: gi,
                                model,
                                degree,
                                bw,
                                delay,
                                backend,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        cells
    }

    /// Runs every cell and returns the CSV text (header included). Rows come
    /// out in cell order regardless of `jobs`.
    pub fn run(&self) -> Result<SweepOutput, ConfigError> {
        let cells = self.cells();
        // cells sharing a topology reuse one generated graph
        let mut groups: Vec<(TopoKey, Vec<usize>)> = Vec::new();
        for (i, c) in cells.iter().enumerate() {
            let key = c.topo_key();
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, v)) => v.push(i),
                None => groups.push((key, vec![i])),
            }
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| key_err("jobs", e.to_string()))?;
        let results: Vec<Result<Vec<(usize, Row)>, ConfigError>> = pool.install(|| {
            groups
                .par_iter()
                .map(|(key, idxs)| {
                    let g = Arc::new(self.topology_for(key)?);
                    idxs.iter().map(|&i| Ok((i, self.run_cell(&cells[i], &g)?))).collect()
                })
                .collect()
        });
        let mut rows: Vec<(usize, Row)> = Vec::with_capacity(cells.len());
        for r in results {
            rows.extend(r?);
        }
        rows.sort_by_key(|(i, _)| *i);
        Ok(SweepOutput {
            scenario: self.scenario,
            rows: rows.into_iter().map(|(_, r)| r).collect(),
        })
    }

    fn topology_for(&self, key: &TopoKey) -> Result<PhysicalGraph, ConfigError> {
        let g = &self.grids[key.grid];
        if let Some(path) = &g.topology {
            return read_topology(path).map_err(|e| key_err("topology", e.to_string()));
        }
        let model = match key.model.expect("generated topology has a model") {
            ModelKind::Waxman => TopologyModel::Waxman {
                alpha: g.alpha,
                beta: g.beta,
            },
            ModelKind::BarabasiAlbert => TopologyModel::BarabasiAlbert { m: 2 },
        };
        let bw_range = match self.scenario {
            Scenario::Vne => (g.link_capacity, g.link_capacity),
            _ => (1.0, 9.0),
        };
        let spec = GenSpec {
            model,
            node_count: g.nodes,
            target_avg_degree: key.degree_bits.map(f64::from_bits),
            bw_range,
            delay_model: DelayModel::EuclideanScaled { max_delay: g.max_delay },
            cpu_units: g.cpu,
            seed: key.seed,
        };
        generate(&spec).map_err(|e| ConfigError::Runtime {
            cell: format!("{} seed {}", model.name(), key.seed),
            msg: e.to_string(),
        })
    }

    fn run_cell(&self, cell: &Cell, g: &Arc<PhysicalGraph>) -> Result<Row, ConfigError> {
        let grid = &self.grids[cell.grid];
        let rt = |msg: String| ConfigError::Runtime {
            cell: format!("{} seed {}", cell.backend, cell.seed),
            msg,
        };
        let mut row = Row {
            model: cell.model.map_or("file", ModelKind::name).to_owned(),
            nodes: g.node_count(),
            degree: cell.degree.unwrap_or_else(|| g.avg_out_degree()),
            bw_level: cell.bw,
            delay: cell.delay,
            backend: cell.backend,
            seed: cell.seed,
            metrics: Metrics::default(),
        };
        let constraints = |bw: Severity, delay: DelayAxis| match delay {
            DelayAxis::Level(l) => resolve_constraint_severity(g, bw, l),
            DelayAxis::Percent(p) => resolve_with_delay_percent(g, bw, p),
        };
        match self.scenario {
            Scenario::Steering => {
                let c = constraints(cell.bw.unwrap(), cell.delay.unwrap());
                let opts = SteeringOptions {
                    record_timing: self.record_timing,
                };
                let r = run_steering(g.clone(), grid.pairs, &c, &cell.backend, cell.seed, opts)
                    .map_err(|e| rt(e.to_string()))?;
                row.metrics = Metrics {
                    throughput: Some(r.total_throughput),
                    energy: Some(r.energy_efficiency),
                    hops: Some(r.avg_path_length),
                    micros: self.record_timing.then_some(r.avg_time_per_vl),
                    n_used: Some(r.n_used),
                    ..Metrics::default()
                };
            }
            Scenario::Vne => {
                let reqs = generate_vn_requests(grid.requests, grid.vn_nodes, grid.max_demand, cell.seed);
                let r = run_vne(g.clone(), &reqs, &cell.backend, self.record_timing).map_err(|e| rt(e.to_string()))?;
                row.metrics = Metrics {
                    vn_ratio: Some(r.vn_allocation_ratio),
                    link_ratio: Some(r.link_allocation_ratio),
                    util: Some(r.link_utilization),
                    hops: Some(r.avg_path_length),
                    micros: self.record_timing.then_some(r.avg_time_per_vl),
                    ..Metrics::default()
                };
            }
            Scenario::Solve => {
                let c = constraints(cell.bw.unwrap(), cell.delay.unwrap());
                let c = super::adapt_constraints(&cell.backend, &**g, c);
                let mut used = vec![false; g.node_count()];
                let (mut solved, mut hops, mut micros) = (0usize, 0usize, 0.0f64);
                let pairs = draw_pairs(g.node_count(), grid.pairs, cell.seed);
                for &(s, d) in &pairs {
                    let t = Instant::now();
                    let r = cell.backend.solve(&**g, s, d, &c);
                    micros += t.elapsed().as_secs_f64() * 1e6;
                    match r {
                        Ok(p) => {
                            solved += 1;
                            hops += p.hop_count();
                            for n in &p.nodes {
                                used[n.0] = true;
                            }
                        }
                        Err(e) if e.is_no_path() => {}
                        Err(e) => return Err(rt(e.to_string())),
                    }
                }
                row.metrics = Metrics {
                    link_ratio: Some(solved as f64 / pairs.len().max(1) as f64),
                    hops: Some(if solved == 0 { 0.0 } else { hops as f64 / solved as f64 }),
                    micros: self.record_timing.then(|| micros / pairs.len().max(1) as f64),
                    n_used: Some(used.iter().filter(|&&u| u).count()),
                    ..Metrics::default()
                };
            }
        }
        Ok(row)
    }
}

impl Grid {
    fn from_map(m: &BTreeMap<String, String>, scenario: Scenario, scale: Scale) -> Result<Self, ConfigError> {
        let get = |k: &str| m.get(k).map(String::as_str);
        let num_or = |k: &str, default: f64| -> Result<f64, ConfigError> {
            get(k).map_or(Ok(default), |v| parse_num(k, v))
        };
        let usize_or = |k: &str, default: usize| -> Result<usize, ConfigError> {
            get(k).map_or(Ok(default), |v| parse_num(k, v))
        };

        let models = list(get("models").unwrap_or("waxman"))
            .map(|s| match s {
                "waxman" => Ok(ModelKind::Waxman),
                "ba" | "barabasi-albert" | "barabasi_albert" => Ok(ModelKind::BarabasiAlbert),
                o => Err(key_err("models", format!("unknown model `{o}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let default_nodes = match (scenario, scale) {
            (Scenario::Steering, Scale::Desk) => 1000,
            (Scenario::Steering, Scale::Paper) => 10_000,
            _ => 100,
        };
        let default_pairs = match scale {
            Scale::Desk => 100,
            Scale::Paper => 1000,
        };
        let degrees = list(get("degrees").unwrap_or("4"))
            .map(|d| parse_num::<f64>("degrees", d))
            .collect::<Result<Vec<_>, _>>()?;
        if degrees.iter().any(|d| !(*d > 0.0)) {
            return Err(key_err("degrees", "must be positive"));
        }
        let bw_levels = list(get("bw_levels").unwrap_or("low"))
            .map(|s| s.parse().map_err(|e: String| key_err("bw_levels", e)))
            .collect::<Result<Vec<Severity>, _>>()?;
        let delays = match (get("delay_percents"), get("delay_levels")) {
            (Some(_), Some(_)) => return Err(key_err("delay_percents", "conflicts with delay_levels")),
            (Some(p), None) => parse_percents(p)?.into_iter().map(DelayAxis::Percent).collect(),
            (None, l) => list(l.unwrap_or("high"))
                .map(|s| s.parse().map(DelayAxis::Level).map_err(|e: String| key_err("delay_levels", e)))
                .collect::<Result<Vec<_>, _>>()?,
        };
        let backends = list(get("backends").ok_or_else(|| key_err("backends", "missing"))?)
            .map(|b| b.parse::<Backend>().map_err(|e| key_err("backends", e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let seeds = parse_seeds(get("seeds").unwrap_or("1"))?;

        let grid = Self {
            models,
            topology: get("topology").map(PathBuf::from),
            nodes: usize_or("nodes", default_nodes)?,
            degrees,
            bw_levels,
            delays,
            backends,
            seeds,
            pairs: usize_or("pairs", default_pairs)?,
            requests: usize_or("requests", 15)?,
            vn_nodes: usize_or("vn_nodes", 14)?,
            max_demand: num_or("max_demand", 20.0)?,
            link_capacity: num_or("link_capacity", 200.0)?,
            cpu: num_or("cpu", 200.0)?,
            max_delay: num_or("max_delay", 10.0)?,
            alpha: num_or("alpha", 0.15)?,
            beta: num_or("beta", 0.2)?,
        };
        for (k, empty) in [
            ("models", grid.models.is_empty()),
            ("degrees", grid.degrees.is_empty()),
            ("bw_levels", grid.bw_levels.is_empty()),
            ("delay_levels", grid.delays.is_empty()),
            ("backends", grid.backends.is_empty()),
            ("seeds", grid.seeds.is_empty()),
        ] {
            if empty {
                return Err(key_err(k, "empty list"));
            }
        }
        if grid.nodes < 2 {
            return Err(key_err("nodes", "need at least 2"));
        }
        if grid.pairs == 0 {
            return Err(key_err("pairs", "need at least 1"));
        }
        if !(grid.alpha > 0.0 && grid.alpha <= 1.0) {
            return Err(key_err("alpha", "must be in (0, 1]"));
        }
        if !(grid.beta > 0.0 && grid.beta <= 1.0) {
            return Err(key_err("beta", "must be in (0, 1]"));
        }
        Ok(grid)
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    grid: usize,
    model: Option<ModelKind>,
    degree: Option<f64>,
    bw: Option<Severity>,
    delay: Option<DelayAxis>,
    backend: Backend,
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct TopoKey {
    grid: usize,
    model: Option<ModelKind>,
    degree_bits: Option<u64>,
    seed: u64,
}

impl Cell {
    fn topo_key(&self) -> TopoKey {
        TopoKey {
            grid: self.grid,
            model: self.model,
            degree_bits: self.degree.map(f64::to_bits),
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metrics {
    pub vn_ratio: Option<f64>,
    pub link_ratio: Option<f64>,
    pub util: Option<f64>,
    pub throughput: Option<f64>,
    pub energy: Option<f64>,
    pub hops: Option<f64>,
    pub micros: Option<f64>,
    pub n_used: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub model: String,
    pub nodes: usize,
    pub degree: f64,
    pub bw_level: Option<Severity>,
    pub delay: Option<DelayAxis>,
    pub backend: Backend,
    pub seed: u64,
    pub metrics: Metrics,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

impl Row {
    pub fn to_csv(&self) -> String {
        let m = &self.metrics;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.model,
            self.nodes,
            self.degree,
            self.bw_level.map(|s| s.to_string()).unwrap_or_default(),
            self.delay.map(|d| d.label()).unwrap_or_default(),
            self.backend,
            self.seed,
            opt(m.vn_ratio),
            opt(m.link_ratio),
            opt(m.util),
            opt(m.throughput),
            opt(m.energy),
            opt(m.hops),
            opt(m.micros),
            m.n_used.map(|n| n.to_string()).unwrap_or_default(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub scenario: Scenario,
    pub rows: Vec<Row>,
}

impl SweepOutput {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_csv());
            s.push('\n');
        }
        s
    }

    /// One whitespace-separated series file per (metric, backend). Each file
    /// holds one block per (model, fixed axes); lines are `x mean` with the
    /// mean taken over seeds. `x` is the delay percent when the delay axis is
    /// percentage-based, the average degree otherwise.
    pub fn plot_data(&self) -> Vec<(String, String)> {
        type Metric = (&'static str, fn(&Metrics) -> Option<f64>);
        let metrics: &[Metric] = match self.scenario {
            Scenario::Steering => &[
                ("throughput", |m| m.throughput),
                ("energy", |m| m.energy),
                ("hops", |m| m.hops),
                ("time", |m| m.micros),
                ("nodes_used", |m| m.n_used.map(|n| n as f64)),
            ],
            Scenario::Vne => &[
                ("vn_alloc", |m| m.vn_ratio),
                ("link_alloc", |m| m.link_ratio),
                ("link_util", |m| m.util),
                ("hops", |m| m.hops),
                ("time", |m| m.micros),
            ],
            Scenario::Solve => &[
                ("solved", |m| m.link_ratio),
                ("hops", |m| m.hops),
                ("time", |m| m.micros),
            ],
        };
        let mut backends: Vec<Backend> = Vec::new();
        for r in &self.rows {
            if !backends.contains(&r.backend) {
                backends.push(r.backend);
            }
        }
        let mut files = Vec::new();
        for &(name, get) in metrics {
            if self.rows.iter().all(|r| get(&r.metrics).is_none()) {
                continue;
            }
            for b in &backends {
                // block label -> x -> (sum, count), in first-seen order
                let mut blocks: Vec<(String, Vec<(f64, f64, usize)>)> = Vec::new();
                for r in self.rows.iter().filter(|r| r.backend == *b) {
                    let Some(y) = get(&r.metrics) else { continue };
                    let (label, x) = match r.delay {
                        Some(DelayAxis::Percent(p)) => (
                            format!("model={} degree={} bw={}", r.model, r.degree, fmt_level(r.bw_level)),
                            p,
                        ),
                        d => (
                            format!(
                                "model={} bw={} delay={}",
                                r.model,
                                fmt_level(r.bw_level),
                                d.map(|d| d.label()).unwrap_or_else(|| "-".into())
                            ),
                            r.degree,
                        ),
                    };
                    let idx = match blocks.iter().position(|(l, _)| *l == label) {
                        Some(i) => i,
                        None => {
                            blocks.push((label, Vec::new()));
                            blocks.len() - 1
                        }
                    };
                    let pts = &mut blocks[idx].1;
                    match pts.iter_mut().find(|p| p.0 == x) {
                        Some(p) => {
                            p.1 += y;
                            p.2 += 1;
                        }
                        None => pts.push((x, y, 1)),
                    }
                }
                let mut text = String::new();
                for (i, (label, pts)) in blocks.iter().enumerate() {
                    if i > 0 {
                        text.push_str("\n\n");
                    }
                    writeln!(text, "# {label}").unwrap();
                    let mut pts = pts.clone();
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                    for (x, sum, n) in pts {
                        writeln!(text, "{x} {:.6}", sum / n as f64).unwrap();
                    }
                }
                let fname = format!("{name}_{}.dat", sanitize(&b.to_string()));
                files.push((fname, text));
            }
        }
        files
    }
}

fn fmt_level(s: Option<Severity>) -> String {
    s.map(|s| s.to_string()).unwrap_or_else(|| "-".into())
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '-' })
        .collect::<String>()
        .trim_end_matches('-')
        .to_owned()
}
