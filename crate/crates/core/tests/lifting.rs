mod common;

use std::collections::{BTreeMap, VecDeque};

use csp_digraph::algebra::{self, identities, zigzag, CheckError, Operation, OperationTable};
use csp_digraph::gadget::{build_d, GadgetDigraph, GadgetVertex};
use csp_digraph::lifting::{
    in_diagonal_component, lift_endomorphism, lift_general, lift_general_auto, lift_wnu,
    verify_identities, verify_polymorphism, EpsilonOrder, LiftError, PolymorphismCheck,
};
use csp_digraph::structures::{product_structure, tuple_at, tuple_index};
use csp_digraph::Solver;

use common::*;

const BOUND: usize = 1 << 20;

#[test]
fn lifted_wnu_on_two_cycle() {
    let a = two_cycle();
    let d = build_d(&a).unwrap();
    let omega = algebra::find_wnu(&a, 3, &Solver::default(), BOUND)
        .unwrap()
        .unwrap();
    let w = lift_wnu(&d, &omega).unwrap();
    let ops = BTreeMap::from([("w".to_string(), &w)]);
    verify_identities(&d, &ops, &identities::wnu(3)).unwrap();
    let check = verify_polymorphism(&d, &w, u64::MAX, 0);
    assert!(check.exhaustive);
    assert!(check.passed(), "{check}");
    let cov = w.coverage();
    assert!(cov.contains_key("3c") && cov.contains_key("1a"), "{cov:?}");
}

#[test]
fn lifted_wnu_restricts_to_the_source() {
    let a = two_cycle();
    let d = build_d(&a).unwrap();
    let omega = algebra::find_wnu(&a, 3, &Solver::default(), BOUND)
        .unwrap()
        .unwrap();
    let w = lift_wnu(&d, &omega).unwrap();
    for (args, v) in omega.rows() {
        let lifted: Vec<usize> = args.iter().map(|&x| d.element_vertex(x)).collect();
        assert_eq!(w.apply(&lifted), d.element_vertex(v));
    }
    let rels = d.tuple_count();
    for i in 0..rels.pow(3) {
        let rs = tuple_at(i, rels, 3);
        let rows: Vec<&[usize]> = rs.iter().map(|&r| d.tuple(r)).collect();
        let t = csp_digraph::structures::apply_coordinatewise(&omega, &rows).unwrap();
        let expect = d.tuple_vertex(d.relation().position(&t).unwrap());
        let lifted: Vec<usize> = rs.iter().map(|&r| d.tuple_vertex(r)).collect();
        assert_eq!(w.apply(&lifted), expect);
    }
}

#[test]
fn mixed_levels_pick_the_odd_coordinate() {
    let a = two_cycle();
    let d = build_d(&a).unwrap();
    let omega = algebra::find_wnu(&a, 3, &Solver::default(), BOUND)
        .unwrap()
        .unwrap();
    let w = lift_wnu(&d, &omega).unwrap();
    let at = |level: usize| {
        (0..d.vertex_count())
            .find(|&v| d.level(v) == level)
            .unwrap()
    };
    let c = [at(1), at(1), at(2)];
    assert_eq!(w.apply(&c), c[2]);
}

#[test]
fn lifted_wnu_on_example7_sampled() {
    let a = example7();
    let d = build_d(&a).unwrap();
    let omega = algebra::find_wnu(&a, 3, &Solver::default(), BOUND)
        .unwrap()
        .expect("the template has a ternary WNU");
    let w = lift_wnu(&d, &omega).unwrap();
    let check = verify_polymorphism(&d, &w, 100_000, 7);
    assert!(check.passed(), "{check}");
}

fn majority_lift(policy: EpsilonOrder) -> (GadgetDigraph, PolymorphismCheck) {
    let a = two_cycle();
    let d = build_d(&a).unwrap();
    let ops = lift_general_auto(
        &d,
        &identities::majority(),
        &Solver::default(),
        BOUND,
        policy,
    )
    .unwrap();
    verify_identities(&d, &ops, &identities::majority()).unwrap();
    let check = verify_polymorphism(&d, &ops["m"], u64::MAX, 0);
    (d, check)
}

fn touches_elements_or_tuples(d: &GadgetDigraph, tuple: &[usize]) -> bool {
    tuple
        .iter()
        .any(|&v| !matches!(d.tag(v), GadgetVertex::Internal { .. }))
}

#[test]
fn general_majority_lift_breaks_an_edge_next_to_the_template_levels() {
    for policy in [EpsilonOrder::ElementMajor, EpsilonOrder::TupleMajor] {
        let (d, check) = majority_lift(policy);
        let (c, e) = check
            .violation
            .expect("the two-level case picks a non-adjacent minimum");
        assert!(
            touches_elements_or_tuples(&d, &c) || touches_elements_or_tuples(&d, &e),
            "{policy:?}: {c:?} -> {e:?}"
        );
    }
}

#[test]
fn gadget_of_the_two_cycle_still_has_a_majority() {
    let d = build_d(&two_cycle()).unwrap();
    let g = d.to_structure();
    let m = algebra::find_polymorphism(&g, 3, &identities::majority(), &Solver::default(), 1 << 22)
        .unwrap()
        .expect("a majority polymorphism exists");
    assert!(algebra::is_polymorphism(&g, &m));
}

#[test]
fn two_cycle_has_no_binary_tsi() {
    let a = two_cycle();
    let brute = (0..16u32)
        .map(|bits| OperationTable::from_fn(2, 2, |x| ((bits >> (2 * x[0] + x[1])) & 1) as usize))
        .filter(|t| t.is_idempotent() && t.get(&[0, 1]) == t.get(&[1, 0]))
        .filter(|t| algebra::is_polymorphism(&a, t))
        .count();
    assert_eq!(brute, 0);
    let found =
        algebra::find_interpretations(&a, &identities::binary_tsi(), &Solver::default(), BOUND)
            .unwrap();
    assert!(found.is_none());
}

#[test]
fn general_tsi_lift_on_a_semilattice_template() {
    let a = structure(2, vec![("R", 2, vec![vec![0, 0], vec![0, 1], vec![1, 1]])]);
    let d = build_d(&a).unwrap();
    let system = identities::binary_tsi();
    let on_zigzag = BTreeMap::from([("f".to_string(), zigzag::meet_table(2))]);
    let on_template = BTreeMap::from([(
        "f".to_string(),
        OperationTable::from_fn(2, 2, |x| x[0].min(x[1])),
    )]);
    let ops = lift_general(
        &d,
        &system,
        &on_template,
        &on_zigzag,
        EpsilonOrder::default(),
    )
    .unwrap();
    verify_identities(&d, &ops, &system).unwrap();
    let check = verify_polymorphism(&d, &ops["f"], u64::MAX, 0);
    assert!(check.passed() && check.exhaustive, "{check}");
}

#[test]
fn general_majority_lift_misses_two_vertices_on_one_path() {
    let a = structure(2, vec![("R", 2, vec![vec![0, 0], vec![0, 1], vec![1, 1]])]);
    let d = build_d(&a).unwrap();
    let system = identities::majority();
    let ops = lift_general_auto(
        &d,
        &system,
        &Solver::default(),
        BOUND,
        EpsilonOrder::default(),
    )
    .unwrap();
    let Err(CheckError::Fails(ex)) = verify_identities(&d, &ops, &system) else {
        panic!("expected a failing identity");
    };
    let vertices: Vec<usize> = ex.assignment.iter().map(|&(_, v)| v).collect();
    let tags: Vec<GadgetVertex> = vertices.iter().map(|&v| d.tag(v)).collect();
    let [GadgetVertex::Internal { edge: e1, .. }, GadgetVertex::Internal { edge: e2, .. }] =
        tags[..]
    else {
        panic!("{tags:?}");
    };
    assert_eq!(e1, e2);
    assert_eq!(d.level(vertices[0]), d.level(vertices[1]));
    assert!(ops["m"].coverage().contains_key("3c"));
}

#[test]
fn maltsev_is_rejected() {
    let a = two_cycle();
    let d = build_d(&a).unwrap();
    let err = lift_general_auto(
        &d,
        &identities::maltsev(),
        &Solver::default(),
        BOUND,
        EpsilonOrder::default(),
    )
    .unwrap_err();
    assert_eq!(err, LiftError::NoZigzagInterpretation);

    let on_template = BTreeMap::from([(
        "p".to_string(),
        OperationTable::from_fn(2, 3, |x| x[0] ^ x[1] ^ x[2]),
    )]);
    let on_zigzag = BTreeMap::from([("p".to_string(), OperationTable::projection(4, 3, 0))]);
    let err = lift_general(
        &d,
        &identities::maltsev(),
        &on_template,
        &on_zigzag,
        EpsilonOrder::default(),
    )
    .unwrap_err();
    assert!(matches!(err, LiftError::IdentitiesFailOnZigzag(_)), "{err}");
}

#[test]
fn endomorphism_lifts() {
    let a = two_cycle();
    let d = build_d(&a).unwrap();
    let id = lift_endomorphism(&d, &[0, 1]).unwrap();
    assert_eq!(id, (0..d.vertex_count()).collect::<Vec<_>>());
    let swap = lift_endomorphism(&d, &[1, 0]).unwrap();
    let mut sorted = swap.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, (0..d.vertex_count()).collect::<Vec<_>>());
    let g = d.to_structure();
    assert!(g.is_homomorphism(&g, &swap));
    assert_eq!(
        lift_endomorphism(&d, &[0, 0]),
        Err(LiftError::NotAnEndomorphism)
    );
}

/// Component of the diagonal in `D(A)^2`, by breadth-first search.
fn diagonal_component_bfs(a: &csp_digraph::RelationalStructure) {
    let d = build_d(a).unwrap();
    let n = d.vertex_count();
    let g = d.to_structure();
    let sq = product_structure(&g, 2, 1 << 20).unwrap();
    let size = sq.size();
    let mut adj = vec![Vec::new(); size];
    for t in sq.relations()[0].tuples() {
        adj[t[0]].push(t[1]);
        adj[t[1]].push(t[0]);
    }
    let mut seen = vec![false; size];
    let mut queue = VecDeque::new();
    for v in 0..n {
        let diag = tuple_index(&[v, v], n);
        seen[diag] = true;
        queue.push_back(diag);
    }
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    for x in 0..size {
        let c = tuple_at(x, n, 2);
        assert_eq!(in_diagonal_component(&d, &c), seen[x], "tuple {c:?}");
    }
}

#[test]
fn diagonal_component_matches_bfs() {
    diagonal_component_bfs(&two_cycle());
    diagonal_component_bfs(&one_element());
}
