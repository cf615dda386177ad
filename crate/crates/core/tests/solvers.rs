mod common;

use common::*;
use nmpath::nm::{backward_pass, solve_l1_traced};
use nmpath::{
    build_neighborhoods, solve_edijkstra, solve_exhaustive, solve_general, solve_ksp, Backend, ConstraintSet, EdgeSpec,
    GeneralConfig, GraphView, KspConfig, KspRanking, NodeId, PhysicalGraph, SearchLabels, SolveError,
};

fn names(g: &PhysicalGraph, p: &nmpath::PathResult) -> Vec<String> {
    p.nodes.iter().map(|&n| g.display_name(n)).collect()
}

#[test]
fn worked_example_neighborhoods() {
    let g = worked_example();
    let nh = build_neighborhoods(&g, X, Y, &ConstraintSet::unconstrained()).unwrap();
    assert_eq!(nh.levels()[..3], [vec![X], vec![A, B], vec![A, B, Y]]);
    assert_eq!(nh.membership(A), Some(2));

    assert_eq!(nh.depth(), 2);
    let paths: Vec<Vec<String>> = backward_pass(&g, &nh, Y).iter().map(|p| names(&g, p)).collect();
    assert_eq!(paths, [["X", "A", "Y"], ["X", "B", "Y"]]);
}

#[test]
fn worked_example_backends() {
    let g = worked_example();
    let c = worked_constraints();
    for b in [Backend::NmGeneral, Backend::NmL1, Backend::Exhaustive] {
        let p = b.solve(&g, X, Y, &c).unwrap();
        assert_eq!(names(&g, &p), ["X", "B", "A", "Y"], "{b}");
        assert_eq!(p.accumulated.sums, vec![4.0]);
        assert_eq!(p.min_link_metrics, vec![6.0]);
    }
    assert_eq!(
        solve_ksp(&g, X, Y, &c, &KspConfig::new(1, KspRanking::ByHops)),
        Err(SolveError::Infeasible)
    );
    let p = solve_ksp(&g, X, Y, &c, &KspConfig::new(4, KspRanking::ByHops)).unwrap();
    assert_eq!(names(&g, &p), ["X", "B", "A", "Y"]);
    let p = solve_edijkstra(&g, X, Y, &c).unwrap();
    assert!(p.hop_count() >= 3);
}

#[test]
fn negative_cycle_fixture() {
    let (g, c) = negative_cycle();
    assert_eq!(nmpath::solve_l1(&g, X, NodeId(4), &c), Err(SolveError::NegativeWeightCycle));
}

#[test]
fn relabel_keeps_minimum_hops() {
    // A is first reached directly (delay 5), then more cheaply through B.
    // Back tracking must not follow A's newer predecessor.
    let e = |s, d, w: f64| EdgeSpec::new(s, d, vec![1.0], vec![w]);
    let g = PhysicalGraph::build(4, 1, 1, vec![e(0, 1, 5.0), e(0, 2, 1.0), e(2, 1, 1.0), e(1, 3, 1.0)], vec![]).unwrap();
    let c = ConstraintSet::bw_delay(None, Some(100.0));
    let (r, trace) = solve_l1_traced(&g, X, Y, &c);
    let p = r.unwrap();
    assert_eq!(p.nodes, vec![X, A, Y]);
    assert_eq!(trace.labels.level[A.0], Some(2));
    assert_eq!(trace.labels.distance[A.0], 2.0);
    // a tight bound forces the relabeled route
    let p = nmpath::solve_l1(&g, X, Y, &ConstraintSet::bw_delay(None, Some(4.0))).unwrap();
    assert_eq!(p.nodes, vec![X, B, A, Y]);
}

#[test]
fn search_labels_start_empty() {
    let l = SearchLabels::new(3);
    assert_eq!(l.len(), 3);
    assert!(l.predecessor.iter().all(Option::is_none));
    assert!(l.level.iter().all(Option::is_none));
    assert!(l.distance.iter().all(|&d| d == 0.0));
    assert!(SearchLabels::new(0).is_empty());
}

#[test]
fn l1_levels_are_exclusive() {
    for seed in 0..200 {
        let inst = random_instance(seed, 12, 0.3, 1);
        let (_, trace) = solve_l1_traced(&inst.g, inst.src, inst.dst, &inst.c);
        let nh = &trace.neighborhoods;
        let mut seen = vec![0; inst.g.node_count()];
        for (k, level) in nh.levels().iter().enumerate() {
            for &u in level {
                seen[u.0] += 1;
                assert_eq!(nh.membership(u), Some(k), "seed {seed}");
            }
        }
        assert!(seen.iter().all(|&s| s <= 1), "seed {seed}");
    }
}

#[test]
fn l1_matches_plain_enumeration() {
    for seed in 0..300 {
        let inst = random_instance(1000 + seed, 9, 0.35, 1);
        let want = brute_min_hops(&inst.g, inst.src, inst.dst, &inst.c);
        let got = nmpath::solve_l1(&inst.g, inst.src, inst.dst, &inst.c);
        match (want, &got) {
            (Some(h), Ok(p)) => {
                assert_eq!(p.hop_count(), h, "seed {seed}");
                assert!(verify_directly(&inst.g, p, &inst.c));
            }
            (None, Err(e)) => assert!(e.is_no_path(), "seed {seed}: {e}"),
            _ => panic!("seed {seed}: oracle {want:?}, solver {got:?}"),
        }
    }
}

#[test]
fn general_matches_plain_enumeration_two_bounds() {
    for seed in 0..200 {
        let inst = random_instance(5000 + seed, 9, 0.35, 2);
        let want = brute_min_hops(&inst.g, inst.src, inst.dst, &inst.c);
        let got = solve_general(&inst.g, inst.src, inst.dst, &inst.c, &GeneralConfig::default());
        match (want, &got) {
            (Some(h), Ok(p)) => {
                assert_eq!(p.hop_count(), h, "seed {seed}");
                assert!(verify_directly(&inst.g, p, &inst.c));
            }
            (None, Err(e)) => assert!(e.is_no_path(), "seed {seed}: {e}"),
            _ => panic!("seed {seed}: oracle {want:?}, solver {got:?}"),
        }
    }
}

#[test]
fn no_path_classification_agrees() {
    for seed in 0..300 {
        let inst = random_instance(9000 + seed, 10, 0.25, 1);
        let oracle = solve_exhaustive(&inst.g, inst.src, inst.dst, &inst.c, &Default::default());
        for b in [Backend::NmGeneral, Backend::NmL1, Backend::EDijkstra] {
            let r = b.solve(&inst.g, inst.src, inst.dst, &inst.c);
            match (&oracle, &r) {
                (Err(SolveError::Unreachable), r) => assert_eq!(r, &Err(SolveError::Unreachable), "{b} seed {seed}"),
                (_, Err(e)) => assert_eq!(e, &SolveError::Infeasible, "{b} seed {seed}"),
                _ => {}
            }
        }
    }
}

#[test]
fn backward_pass_lists_every_path_of_that_length() {
    for seed in 0..100 {
        let inst = random_instance(20_000 + seed, 8, 0.4, 1);
        let c = ConstraintSet::unconstrained();
        let Ok(nh) = build_neighborhoods(&inst.g, inst.src, inst.dst, &c) else { continue };
        let depth = nh.depth();
        let mut got: Vec<_> = backward_pass(&inst.g, &nh, inst.dst).into_iter().map(|p| p.edges).collect();
        let mut want: Vec<_> = brute_all(&inst.g, inst.src, inst.dst)
            .into_iter()
            .filter(|p| p.hop_count() == depth)
            .map(|p| p.edges)
            .collect();
        got.sort();
        want.sort();
        assert_eq!(got, want, "seed {seed}");
    }
}

#[test]
fn nm_never_longer_than_baselines() {
    for seed in 0..300 {
        let inst = random_instance(30_000 + seed, 11, 0.3, 1);
        let nm = nmpath::solve_l1(&inst.g, inst.src, inst.dst, &inst.c);
        let general = solve_general(&inst.g, inst.src, inst.dst, &inst.c, &GeneralConfig::default());
        assert_eq!(
            nm.as_ref().map(|p| p.hop_count()).ok(),
            general.as_ref().map(|p| p.hop_count()).ok(),
            "seed {seed}"
        );
        for b in ["edijkstra", "ksp:1", "ksp:3", "ksp:8:by_path_metric(0)"] {
            let b: Backend = b.parse().unwrap();
            if let Ok(p) = b.solve(&inst.g, inst.src, inst.dst, &inst.c) {
                assert!(p.satisfies(&inst.c));
                let nm = nm.as_ref().expect("baseline found a path the l1 solver missed");
                assert!(nm.hop_count() <= p.hop_count(), "{b} seed {seed}");
            }
        }
    }
}

#[test]
fn ksp_success_monotone_in_k() {
    for seed in 0..150 {
        let inst = random_instance(40_000 + seed, 10, 0.3, 1);
        let mut ok_before = false;
        for k in 1..=8 {
            let ok = solve_ksp(&inst.g, inst.src, inst.dst, &inst.c, &KspConfig::new(k, KspRanking::ByHops)).is_ok();
            assert!(ok || !ok_before, "seed {seed} k {k}");
            ok_before = ok;
        }
    }
}

#[test]
fn general_respects_candidate_limit() {
    // dense graph with negative delays: no prefix pruning, and the bound
    // rejects every simple path, so enumeration keeps growing
    let mut edges = Vec::new();
    for a in 0..12 {
        for b in 0..12 {
            if a != b {
                edges.push(EdgeSpec::new(a, b, vec![1.0], vec![-1.0]));
            }
        }
    }
    let g = PhysicalGraph::build(12, 1, 1, edges, vec![]).unwrap();
    let c = ConstraintSet::bw_delay(None, Some(-100.0));
    let r = solve_general(&g, NodeId(0), NodeId(11), &c, &GeneralConfig { candidate_limit: 1000 });
    assert!(matches!(r, Err(SolveError::ResourceLimit(_))), "{r:?}");
}
