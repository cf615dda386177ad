//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any fails. Run with `cargo test -p nmpath --test acceptance`.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::*;
use nmpath::harness::sweep::{Row, SweepOutput};
use nmpath::harness::ExperimentConfig;
use nmpath::topogen::{generate, resolve_constraint_severity, GenSpec, Severity};
use nmpath::{
    solve_exhaustive, solve_general, solve_l1, Backend, ConstraintSet, GeneralConfig, NodeId, PathResult,
    PhysicalGraph, SolveError,
};

struct Suite {
    failed: usize,
    /// Every ok result seen by any criterion, for the direct re-check.
    ok_results: Vec<(PhysicalGraph, PathResult, ConstraintSet)>,
}

impl Suite {
    fn report(&mut self, name: &str, started: Instant, outcome: Result<String, String>) {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                self.failed += 1;
                println!("FAIL {name}: {detail} ({secs:.1}s)");
            }
        }
    }

    fn keep(&mut self, g: &PhysicalGraph, r: &Result<PathResult, SolveError>, c: &ConstraintSet) {
        if let Ok(p) = r {
            self.ok_results.push((g.clone(), p.clone(), c.clone()));
        }
    }
}

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let t = started.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("took {:.1}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
    }
}

fn equivalence(
    suite: &mut Suite,
    trials: u64,
    max_n: usize,
    path_arity: usize,
    seed_base: u64,
    solve: impl Fn(&PhysicalGraph, NodeId, NodeId, &ConstraintSet) -> Result<PathResult, SolveError>,
) -> Result<String, String> {
    let mut mismatches = Vec::new();
    let mut feasible = 0;
    for t in 0..trials {
        let inst = random_instance(seed_base + t, max_n, 0.3, path_arity);
        let oracle = solve_exhaustive(&inst.g, inst.src, inst.dst, &inst.c, &Default::default());
        let got = solve(&inst.g, inst.src, inst.dst, &inst.c);
        let agree = match (&oracle, &got) {
            (Ok(a), Ok(b)) => a.hop_count() == b.hop_count(),
            (Err(a), Err(b)) => a.is_no_path() && b.is_no_path(),
            _ => false,
        };
        if !agree {
            mismatches.push(seed_base + t);
        }
        feasible += oracle.is_ok() as usize;
        suite.keep(&inst.g, &oracle, &inst.c);
        suite.keep(&inst.g, &got, &inst.c);
    }
    if mismatches.is_empty() {
        Ok(format!("{trials}/{trials} match ({feasible} feasible)"))
    } else {
        Err(format!("{} mismatches, seeds {:?}", mismatches.len(), &mismatches[..mismatches.len().min(10)]))
    }
}

fn oracle_equivalence(suite: &mut Suite) {
    let t = Instant::now();
    let r = equivalence(suite, 500, 12, 1, 0, solve_l1).and_then(|d| within(Duration::from_secs(60), t).map(|_| d));
    suite.report("oracle equivalence (l1 vs exhaustive, 500 graphs)", t, r);
}

fn general_equivalence(suite: &mut Suite) {
    let t = Instant::now();
    let r = equivalence(suite, 300, 10, 2, 100_000, |g, s, d, c| {
        solve_general(g, s, d, c, &GeneralConfig::default())
    })
    .and_then(|d| within(Duration::from_secs(120), t).map(|_| d));
    suite.report("general equivalence (two path bounds, 300 graphs)", t, r);
}

fn worked_example_check(suite: &mut Suite) {
    let t = Instant::now();
    let g = worked_example();
    let c = worked_constraints();
    let names = |p: &PathResult| p.nodes.iter().map(|&n| g.display_name(n)).collect::<Vec<_>>().join("->");
    let mut problems = Vec::new();
    for b in ["nm-general", "nm-l1"] {
        let r = b.parse::<Backend>().unwrap().solve(&g, X, Y, &c);
        suite.keep(&g, &r, &c);
        match &r {
            Ok(p) if names(p) == "X->B->A->Y" => {}
            other => problems.push(format!("{b}: {other:?}")),
        }
    }
    let ksp1 = "ksp:1".parse::<Backend>().unwrap().solve(&g, X, Y, &c);
    if ksp1 != Err(SolveError::Infeasible) {
        problems.push(format!("ksp:1: {ksp1:?}"));
    }
    let ed = Backend::EDijkstra.solve(&g, X, Y, &c);
    suite.keep(&g, &ed, &c);
    if let Ok(p) = &ed {
        if p.hop_count() < 3 {
            problems.push(format!("edijkstra: {} hops", p.hop_count()));
        }
    }
    let r = if problems.is_empty() {
        Ok(format!(
            "nm-general, nm-l1 -> X->B->A->Y; ksp:1 infeasible; edijkstra {}",
            ed.map(|p| format!("{} hops", p.hop_count())).unwrap_or_else(|e| e.status().into())
        ))
    } else {
        Err(problems.join("; "))
    };
    suite.report("worked example", t, r);
}

fn negative_cycle_check(suite: &mut Suite) {
    let t = Instant::now();
    let (g, c) = negative_cycle();
    let r = solve_l1(&g, X, NodeId(4), &c);
    let out = match r {
        Err(SolveError::NegativeWeightCycle) => Ok("NegativeWeightCycle".into()),
        other => Err(format!("got {other:?}")),
    };
    suite.report("negative-cycle detection", t, out);
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn run_config(text: &str) -> SweepOutput {
    ExperimentConfig::parse(text).expect("acceptance config").run().expect("acceptance run")
}

/// Means over seeds, keyed by (degree, backend).
fn means(rows: &[Row], get: impl Fn(&Row) -> f64) -> BTreeMap<(u64, String), f64> {
    let mut acc: BTreeMap<(u64, String), (f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry((r.degree.to_bits(), r.backend.to_string())).or_default();
        e.0 += get(r);
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

const STEERING: &str = "\
scenario = steering
models = waxman
nodes = 1000
degrees = 3, 4, 5, 6
bw_levels = low
delay_levels = high
backends = nm-l1, edijkstra
seeds = 1..10
pairs = 100
";

const VNE: &str = "\
scenario = vne
models = waxman
nodes = 100
degrees = 4
link_capacity = 200
cpu = 200
requests = 15
vn_nodes = 14
backends = nm-general, ksp:1, ksp:3
seeds = 1..20
";

fn steering_checks(suite: &mut Suite) -> String {
    let t = Instant::now();
    let cfg = format!("{STEERING}jobs = {}\n", jobs());
    let out = run_config(&cfg);
    let elapsed = t.elapsed();
    let degrees = [3.0f64, 4.0, 5.0, 6.0];
    let tp = means(&out.rows, |r| r.metrics.throughput.unwrap());
    let hops = means(&out.rows, |r| r.metrics.hops.unwrap());
    let energy = means(&out.rows, |r| r.metrics.energy.unwrap());
    let key = |d: f64, b: &str| (d.to_bits(), b.to_owned());

    let mut problems = Vec::new();
    let mut detail = Vec::new();
    for d in degrees {
        let (nt, et) = (tp[&key(d, "nm-l1")], tp[&key(d, "edijkstra")]);
        let (nh, eh) = (hops[&key(d, "nm-l1")], hops[&key(d, "edijkstra")]);
        detail.push(format!("d{d}: tp {nt:.1}/{et:.1} hops {nh:.2}/{eh:.2}"));
        if nt < et {
            problems.push(format!("degree {d}: throughput {nt:.3} < {et:.3}"));
        }
        if nh > eh {
            problems.push(format!("degree {d}: avg hops {nh:.3} > {eh:.3}"));
        }
    }
    let r = if problems.is_empty() { Ok(detail.join(", ")) } else { Err(problems.join("; ")) };
    let r = r.and_then(|d| {
        if elapsed <= Duration::from_secs(1800) {
            Ok(d)
        } else {
            Err(format!("took {:.0}s, limit 1800s", elapsed.as_secs_f64()))
        }
    });
    suite.report("directional trends (throughput, path length; nm-l1 vs edijkstra)", t, r);

    // every cell of this sweep uses the loosest severity (low bw floor, high
    // delay allowance), so the strict comparison applies at each degree
    let t2 = Instant::now();
    let mut problems = Vec::new();
    let mut detail = Vec::new();
    for d in degrees {
        let (n, e) = (energy[&key(d, "nm-l1")], energy[&key(d, "edijkstra")]);
        detail.push(format!("d{d}: {n:.1}/{e:.1}"));
        if n < 0.95 * e {
            problems.push(format!("degree {d}: {n:.3} < 0.95 x {e:.3}"));
        }
        if n <= e {
            problems.push(format!("degree {d}: {n:.3} not strictly above {e:.3} at the loosest severity"));
        }
    }
    let r = if problems.is_empty() { Ok(detail.join(", ")) } else { Err(problems.join("; ")) };
    suite.report("energy ordering (nm-l1 vs edijkstra)", t2, r);
    out.to_csv()
}

fn vne_check(suite: &mut Suite) -> String {
    let t = Instant::now();
    let out = run_config(&format!("{VNE}jobs = {}\n", jobs()));
    let mut by_backend: BTreeMap<String, Vec<&Row>> = BTreeMap::new();
    for r in &out.rows {
        by_backend.entry(r.backend.to_string()).or_default().push(r);
    }
    let mean = |b: &str, f: fn(&Row) -> f64| {
        let rows = &by_backend[b];
        rows.iter().map(|r| f(r)).sum::<f64>() / rows.len() as f64
    };
    let vn = |r: &Row| r.metrics.vn_ratio.unwrap();
    let vl = |r: &Row| r.metrics.link_ratio.unwrap();
    let mut problems = Vec::new();
    let mut detail = vec![format!(
        "nm-general vn {:.3} vl {:.3}",
        mean("nm-general", vn),
        mean("nm-general", vl)
    )];
    for k in ["ksp:1:by_hops", "ksp:3:by_hops"] {
        let (nv, kv) = (mean("nm-general", vn), mean(k, vn));
        let (nl, kl) = (mean("nm-general", vl), mean(k, vl));
        detail.push(format!("{k} vn {kv:.3} vl {kl:.3}"));
        if nv < kv {
            problems.push(format!("vn ratio {nv:.4} < {k} {kv:.4}"));
        }
        if nl < kl {
            problems.push(format!("vl ratio {nl:.4} < {k} {kl:.4}"));
        }
        let strict = by_backend["nm-general"]
            .iter()
            .zip(&by_backend[k])
            .filter(|(a, b)| vl(a) > vl(b))
            .count();
        detail.push(format!("strict VL gains over {k} in {strict}/20 seeds"));
        if strict == 0 {
            problems.push(format!("no seed with a strict VL-ratio gain over {k}"));
        }
    }
    let r = if problems.is_empty() { Ok(detail.join(", ")) } else { Err(problems.join("; ")) };
    suite.report("VNE improvement (nm-general vs ksp:1, ksp:3)", t, r);
    out.to_csv()
}

fn scaling_check(suite: &mut Suite) {
    let t = Instant::now();
    let sizes = [250usize, 500, 1000, 2000];
    let queries = 200;
    let mut points = Vec::new();
    for &n in &sizes {
        let mut total = Duration::ZERO;
        let mut count = 0u32;
        for seed in 1..=3u64 {
            let g = generate(&GenSpec {
                node_count: n,
                seed,
                ..GenSpec::default()
            })
            .expect("waxman graph");
            let c = resolve_constraint_severity(&g, Severity::Low, Severity::High);
            let pairs = nmpath::harness::draw_pairs(n, queries, seed);
            // warm-up
            for &(s, d) in pairs.iter().take(10) {
                let _ = solve_l1(&g, s, d, &c);
            }
            let started = Instant::now();
            for &(s, d) in &pairs {
                let r = solve_l1(&g, s, d, &c);
                std::hint::black_box(&r);
                if seed == 1 && count == 0 {
                    suite.keep(&g, &r, &c);
                }
            }
            total += started.elapsed();
            count += pairs.len() as u32;
        }
        points.push(((n as f64).ln(), (total.as_secs_f64() / count as f64).ln()));
    }
    let k = points.len() as f64;
    let (mx, my) = (
        points.iter().map(|p| p.0).sum::<f64>() / k,
        points.iter().map(|p| p.1).sum::<f64>() / k,
    );
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let per_query: Vec<String> = sizes
        .iter()
        .zip(&points)
        .map(|(n, p)| format!("{n}:{:.0}us", p.1.exp() * 1e6))
        .collect();
    let detail = format!("exponent {slope:.2} ({})", per_query.join(" "));
    let r = if slope <= 2.4 { Ok(detail) } else { Err(detail) };
    suite.report("quadratic scaling of the l1 solver", t, r);
}

fn corollary_check(suite: &mut Suite) {
    let t = Instant::now();
    // also sweep every backend over fresh instances
    for seed in 0..300u64 {
        let inst = random_instance(500_000 + seed, 12, 0.3, 1);
        for b in ["nm-general", "nm-l1", "edijkstra", "ksp:1", "ksp:3", "ksp:5:by_path_metric(0)", "exhaustive"] {
            let r = b.parse::<Backend>().unwrap().solve(&inst.g, inst.src, inst.dst, &inst.c);
            suite.keep(&inst.g, &r, &inst.c);
        }
    }
    let total = suite.ok_results.len();
    let violations = suite
        .ok_results
        .iter()
        .filter(|(g, p, c)| !verify_directly(g, p, c))
        .count();
    let detail = format!("{violations} violations in {total} ok results");
    let r = if violations == 0 { Ok(detail) } else { Err(detail) };
    suite.report("every ok result satisfies its bounds", t, r);
}

fn determinism_check(suite: &mut Suite, steering_csv: &str, vne_csv: &str) {
    let t = Instant::now();
    // rerun single-threaded: same bytes regardless of scheduling
    let steering_again = run_config(&format!("{STEERING}jobs = 1\n")).to_csv();
    let vne_again = run_config(&format!("{VNE}jobs = 1\n")).to_csv();
    let l1_again = {
        let mut s = String::new();
        for seed in 0..500 {
            let inst = random_instance(seed, 12, 0.3, 1);
            s.push_str(&nmpath::format_result_line(&solve_l1(&inst.g, inst.src, inst.dst, &inst.c), 0, |n| n.to_string()));
            s.push('\n');
        }
        s
    };
    let l1_first = {
        let mut s = String::new();
        for seed in 0..500 {
            let inst = random_instance(seed, 12, 0.3, 1);
            s.push_str(&nmpath::format_result_line(&solve_l1(&inst.g, inst.src, inst.dst, &inst.c), 0, |n| n.to_string()));
            s.push('\n');
        }
        s
    };
    let mut problems = Vec::new();
    if steering_again != steering_csv {
        problems.push("steering CSV differs");
    }
    if vne_again != vne_csv {
        problems.push("VNE CSV differs");
    }
    if l1_again != l1_first {
        problems.push("oracle-suite results differ");
    }
    let r = if problems.is_empty() {
        Ok(format!(
            "steering {} bytes, VNE {} bytes identical across reruns",
            steering_csv.len(),
            vne_csv.len()
        ))
    } else {
        Err(problems.join("; "))
    };
    suite.report("determinism (byte-identical CSV)", t, r);
}

fn main() {
    // `cargo test -- --list` and filters: nothing to list, run nothing
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let mut suite = Suite {
        failed: 0,
        ok_results: Vec::new(),
    };
    oracle_equivalence(&mut suite);
    general_equivalence(&mut suite);
    worked_example_check(&mut suite);
    negative_cycle_check(&mut suite);
    let steering_csv = steering_checks(&mut suite);
    let vne_csv = vne_check(&mut suite);
    scaling_check(&mut suite);
    corollary_check(&mut suite);
    determinism_check(&mut suite, &steering_csv, &vne_csv);
    if suite.failed > 0 {
        println!("{} acceptance criteria failed", suite.failed);
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
