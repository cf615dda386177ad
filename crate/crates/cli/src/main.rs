use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nmpath::harness::sweep::ConfigError;
use nmpath::harness::ExperimentConfig;
use nmpath::topofile::{read_topology, write_topology};
use nmpath::topogen::{generate, DelayModel, GenError, GenSpec, TopologyModel};
use nmpath::{format_result_line, Backend, ConstraintSet, GraphView, NodeId, PhysicalGraph};

const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_NO_PATH: u8 = 4;
const EXIT_RUNTIME: u8 = 5;

/// Minimum-hop constrained path embedding: topology generation, single
/// queries and experiment sweeps.
///
/// Exit codes: 0 ok, 2 bad flags or config, 3 unreadable topology or failed
/// generation, 4 no feasible path, 5 runtime failure.
#[derive(Parser, Debug)]
#[command(name = "nmpath", version)]
struct Cli {
    /// Random seed (gen: topology seed; run: replaces every grid's seed list)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for `run` (overrides the config's `jobs`)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file (gen: topology, run: CSV); stdout when omitted
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic topology in the text topology format
    Gen(GenArgs),
    /// Solve one constrained path query and print the result line
    Solve(SolveArgs),
    /// Run an experiment config and write the CSV (and optional plot data)
    Run(RunArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Waxman,
    Ba,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "waxman")]
    model: Model,
    #[arg(long, default_value_t = 100)]
    nodes: usize,
    /// Target average out-degree; overrides --alpha / --m
    #[arg(long)]
    degree: Option<f64>,
    /// Waxman alpha, used when --degree is absent
    #[arg(long, default_value_t = 0.15)]
    alpha: f64,
    /// Waxman beta
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    /// Barabasi-Albert links per new node, used when --degree is absent
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    bw_min: f64,
    #[arg(long, default_value_t = 9.0)]
    bw_max: f64,
    /// Delay of the longest link
    #[arg(long, default_value_t = 10.0)]
    max_delay: f64,
    /// CPU units per node
    #[arg(long, default_value_t = 200.0)]
    cpu: f64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Topology file
    topology: PathBuf,
    /// Source node id or label
    #[arg(long)]
    src: String,
    /// Destination node id or label
    #[arg(long)]
    dst: String,
    /// nm-general | nm-l1 | edijkstra | ksp:<k>[:by_hops|by_path_metric(<i>)] | exhaustive
    #[arg(long, default_value = "nm-general")]
    backend: String,
    /// Link bound `<metric> >= <value>`; repeatable
    #[arg(long = "link", value_name = "BOUND")]
    links: Vec<String>,
    /// Path bound `<metric> < <value>` (or `<=`); repeatable
    #[arg(long = "path", value_name = "BOUND")]
    paths: Vec<String>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment config file
    config: PathBuf,
    /// Also write `<metric>_<backend>.dat` series files into DIR (default:
    /// the CSV's directory, or the current directory)
    #[arg(long, value_name = "DIR", num_args = 0..=1)]
    emit_plotdata: Option<Option<PathBuf>>,
}

struct Failure {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure { code, msg: msg.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(&cli, a),
        Command::Solve(a) => cmd_solve(a),
        Command::Run(a) => cmd_run(&cli, a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| fail(EXIT_RUNTIME, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_gen(cli: &Cli, a: &GenArgs) -> Result<u8, Failure> {
    let model = match a.model {
        Model::Waxman => TopologyModel::Waxman {
            alpha: a.alpha,
            beta: a.beta,
        },
        Model::Ba => TopologyModel::BarabasiAlbert { m: a.m },
    };
    let spec = GenSpec {
        model,
        node_count: a.nodes,
        target_avg_degree: a.degree,
        bw_range: (a.bw_min, a.bw_max),
        delay_model: DelayModel::EuclideanScaled { max_delay: a.max_delay },
        cpu_units: a.cpu,
        seed: cli.seed.unwrap_or(1),
    };
    let g = generate(&spec).map_err(|e| match e {
        GenError::InvalidSpec { .. } => fail(EXIT_USAGE, e.to_string()),
        _ => fail(EXIT_INPUT, e.to_string()),
    })?;
    write_output(cli.output.as_deref(), &write_topology(&g))?;
    let stats = format!(
        "nodes={} edges={} avg_degree={:.3}",
        g.node_count(),
        g.edge_count(),
        g.avg_out_degree()
    );
    if cli.output.is_some() {
        println!("{stats}");
    } else {
        eprintln!("{stats}");
    }
    Ok(0)
}

fn resolve_node(g: &PhysicalGraph, s: &str, flag: &str) -> Result<NodeId, Failure> {
    if let Some(n) = g.nodes().find(|&n| g.label(n) == Some(s)) {
        return Ok(n);
    }
    match s.parse::<usize>() {
        Ok(i) if i < g.node_count() => Ok(NodeId(i)),
        _ => Err(fail(EXIT_USAGE, format!("--{flag}: no node `{s}`"))),
    }
}

fn parse_constraints(links: &[String], paths: &[String]) -> Result<ConstraintSet, Failure> {
    let text: String = links
        .iter()
        .map(|l| format!("link {l}\n"))
        .chain(paths.iter().map(|p| format!("path {p}\n")))
        .collect();
    ConstraintSet::parse_literals(&text).map_err(|e| fail(EXIT_USAGE, format!("constraint: {e}")))
}

fn cmd_solve(a: &SolveArgs) -> Result<u8, Failure> {
    let backend: Backend = a.backend.parse().map_err(|e: nmpath::UnknownBackend| fail(EXIT_USAGE, e.to_string()))?;
    let c = parse_constraints(&a.links, &a.paths)?;
    let g = read_topology(&a.topology).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    c.validate(g.link_arity(), g.path_arity())
        .map_err(|e| fail(EXIT_USAGE, format!("constraint: {e}")))?;
    let src = resolve_node(&g, &a.src, "src")?;
    let dst = resolve_node(&g, &a.dst, "dst")?;

    let started = Instant::now();
    let r = backend.solve(&g, src, dst, &c);
    let micros = started.elapsed().as_micros();
    println!("{}", format_result_line(&r, micros, |n| g.display_name(n)));
    match r {
        Ok(_) => Ok(0),
        Err(e) if e.is_no_path() => Ok(EXIT_NO_PATH),
        Err(e) => Err(fail(EXIT_RUNTIME, e.to_string())),
    }
}

fn config_failure(e: ConfigError) -> Failure {
    match e {
        ConfigError::Runtime { .. } => fail(EXIT_RUNTIME, e.to_string()),
        _ => fail(EXIT_USAGE, e.to_string()),
    }
}

fn cmd_run(cli: &Cli, a: &RunArgs) -> Result<u8, Failure> {
    let mut cfg = ExperimentConfig::read(&a.config).map_err(config_failure)?;
    if let Some(j) = cli.jobs {
        cfg.jobs = j.max(1);
    }
    if let Some(s) = cli.seed {
        for g in &mut cfg.grids {
            g.seeds = vec![s];
        }
    }
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    let output = cli.output.clone().or_else(|| cfg.output.clone());
    let out = cfg.run().map_err(config_failure)?;
    write_output(output.as_deref(), &out.to_csv())?;

    if let Some(dir) = &a.emit_plotdata {
        let dir = match dir {
            Some(d) => d.clone(),
            None => output
                .as_deref()
                .and_then(Path::parent)
                .filter(|p| !p.as_os_str().is_empty())
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from(".")),
        };
        fs::create_dir_all(&dir).map_err(|e| fail(EXIT_RUNTIME, format!("{}: {e}", dir.display())))?;
        for (name, text) in out.plot_data() {
            let p = dir.join(name);
            fs::write(&p, text).map_err(|e| fail(EXIT_RUNTIME, format!("{}: {e}", p.display())))?;
        }
    }
    Ok(0)
}
