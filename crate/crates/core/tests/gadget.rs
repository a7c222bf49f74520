mod common;

use csp_digraph::corpus;
use csp_digraph::gadget::{
    build_d, build_q, count_formula, path_hom_count, path_hom_exists, to_dot,
};
use csp_digraph::structures::{Direction, LevelAssignment, OrientedPathSpec};
use csp_digraph::GadgetVertex;
use proptest::prelude::*;

use common::*;

#[test]
fn q_word_for_three_with_last_index() {
    let q = build_q(3, &[3]);
    assert_eq!(q.word(), "FFBFFBFFF");
    assert_eq!(q.vertex_count(), 10);
    assert_eq!(q.height(), 5);
}

#[test]
fn gadget_counts_on_fixed_templates() {
    for (a, expected) in [
        (two_cycle(), (24, 24)),
        (one_element(), (4, 3)),
        (example7(), (78, 80)),
    ] {
        let d = build_d(&a).unwrap();
        let g = d.digraph();
        assert_eq!((g.vertex_count(), g.edge_count()), expected);
    }
}

proptest! {
    #[test]
    fn gadget_shape_on_random_templates(seed in any::<u64>()) {
        let mut rng = corpus::rng(seed);
        let n = 1 + (seed % 3) as usize;
        let k = 1 + (seed / 3 % 3) as usize;
        let a = corpus::random_template(&mut rng, n, k, 5);
        let d = build_d(&a).unwrap();
        let g = d.digraph();
        let r = a.single_relation().unwrap().len();
        prop_assert_eq!((g.vertex_count(), g.edge_count()), count_formula(n, r, k));

        // Vertex ids: elements first, then tuples, then internal path vertices.
        for v in 0..g.vertex_count() {
            let expected_kind = if v < n { 0 } else if v < n + r { 1 } else { 2 };
            let kind = match d.tag(v) {
                GadgetVertex::Element(_) => 0,
                GadgetVertex::Tuple(_) => 1,
                GadgetVertex::Internal { .. } => 2,
            };
            prop_assert_eq!(kind, expected_kind);
        }

        let levels = LevelAssignment::compute(g).unwrap();
        prop_assert_eq!(levels.components().len(), 1);
        let bottom: Vec<usize> = (0..g.vertex_count()).filter(|&v| levels.level(v) == 0).collect();
        let top: Vec<usize> = (0..g.vertex_count()).filter(|&v| levels.level(v) == k + 2).collect();
        prop_assert_eq!(bottom, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(top, (n..n + r).collect::<Vec<_>>());
        prop_assert_eq!(d.levels(), levels.levels());

        // Section `l` of P_(a, r) is a single edge exactly when a = r_l.
        for (e, path) in d.paths().iter().enumerate() {
            prop_assert_eq!(e, path.element * r + path.tuple);
            let tuple = d.tuple(path.tuple);
            for l in 1..=k {
                prop_assert_eq!(path.section_is_edge(l), tuple[l - 1] == path.element);
            }
            prop_assert_eq!(path.vertices[0], d.element_vertex(path.element));
            prop_assert_eq!(*path.vertices.last().unwrap(), d.tuple_vertex(path.tuple));
        }
    }
}

/// Depth-first search over position maps, independent of the library's dynamic programming.
fn dfs_hom(source: &OrientedPathSpec, target: &OrientedPathSpec, i: usize, at: usize) -> bool {
    if i == source.len() {
        return at == target.terminal();
    }
    let next: Vec<usize> = match source.steps()[i] {
        Direction::Forward => target
            .edges()
            .into_iter()
            .filter(|&(u, _)| u == at)
            .map(|(_, v)| v)
            .collect(),
        Direction::Backward => target
            .edges()
            .into_iter()
            .filter(|&(_, v)| v == at)
            .map(|(u, _)| u)
            .collect(),
    };
    next.into_iter().any(|w| dfs_hom(source, target, i + 1, w))
}

fn subsets(k: usize) -> Vec<Vec<usize>> {
    (0..1usize << k)
        .map(|mask| (1..=k).filter(|&i| mask >> (i - 1) & 1 == 1).collect())
        .collect()
}

#[test]
fn path_homs_follow_inclusion() {
    for k in 1..=3 {
        for i in subsets(k) {
            for j in subsets(k) {
                let (qi, qj) = (build_q(k, &i), build_q(k, &j));
                let included = i.iter().all(|x| j.contains(x));
                let found = path_hom_exists(&qi, &qj);
                assert_eq!(found.is_some(), included, "k={k} I={i:?} J={j:?}");
                assert_eq!(dfs_hom(&qi, &qj, 0, 0), included);
                assert_eq!(path_hom_count(&qi, &qj) > 0, included);
                if let Some(map) = found {
                    assert_eq!(map[0], 0);
                    assert_eq!(*map.last().unwrap(), qj.terminal());
                    for (p, q) in qi.edges() {
                        assert!(qj.edges().contains(&(map[p], map[q])));
                    }
                }
            }
        }
    }
}

#[test]
fn dot_output_lists_every_vertex() {
    let d = build_d(&two_cycle()).unwrap();
    let dot = to_dot(d.digraph(), Some(d.levels()));
    assert!(dot.starts_with("digraph G {"));
    let nodes = dot
        .lines()
        .filter(|l| l.trim_end().ends_with(';') && !l.contains("->") && !l.contains("rank"))
        .count();
    assert_eq!(nodes, 24);
    assert_eq!(dot.matches("->").count(), 24);
    assert_eq!(dot.matches("rank=same").count(), 5);

    let empty = csp_digraph::structures::Digraph::new(Vec::new(), Vec::new()).unwrap();
    assert_eq!(to_dot(&empty, None), "digraph G {\n  rankdir=BT;\n}\n");
}
