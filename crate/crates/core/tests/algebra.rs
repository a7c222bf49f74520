mod common;

use std::collections::BTreeMap;

use csp_digraph::algebra::identities::{self, library};
use csp_digraph::algebra::zigzag::{self, zigzag_builtins};
use csp_digraph::algebra::{
    check_identities, core_of, endomorphisms, find_interpretations, find_polymorphism, find_wnu,
    is_core, is_polymorphism, report_taylor_and_width, IdentitySystem, OperationTable,
    DEFAULT_INDICATOR_BOUND,
};
use csp_digraph::corpus;
use csp_digraph::structures::RelationalStructure;
use csp_digraph::Solver;
use proptest::prelude::*;

use common::*;

/// All 256 ternary operations on {0,1} that preserve `a` and satisfy `system`.
fn brute_force_ternary(a: &RelationalStructure, system: &IdentitySystem) -> usize {
    let symbol = system.symbols()[0].0.clone();
    (0..256usize)
        .filter(|&code| {
            let table =
                OperationTable::from_values(2, 3, (0..8).map(|i| code >> i & 1).collect()).unwrap();
            is_polymorphism(a, &table)
                && check_identities(&BTreeMap::from([(symbol.clone(), table)]), system, 2).is_ok()
        })
        .count()
}

proptest! {
    #[test]
    fn ternary_search_matches_exhaustive_tables(seed in any::<u64>()) {
        let mut rng = corpus::rng(seed);
        let mut a = corpus::random_multi_template(&mut rng, 2, 2, 2, 3);
        while a.size() != 2 {
            a = corpus::random_multi_template(&mut rng, 2, 2, 2, 3);
        }
        let solver = Solver::default();
        for system in [identities::wnu(3), identities::majority(), identities::maltsev()] {
            let found = find_polymorphism(&a, 3, &system, &solver, DEFAULT_INDICATOR_BOUND).unwrap();
            prop_assert_eq!(found.is_some(), brute_force_ternary(&a, &system) > 0);
            if let Some(table) = found {
                prop_assert!(is_polymorphism(&a, &table));
            }
        }
    }

    #[test]
    fn wnu_existence_is_invariant_under_relabelling(seed in any::<u64>()) {
        let mut rng = corpus::rng(seed);
        let a = corpus::random_template(&mut rng, 3, 2, 4);
        let b = a.permuted(&[2, 0, 1]).unwrap();
        let solver = Solver::default();
        let wa = find_wnu(&a, 3, &solver, DEFAULT_INDICATOR_BOUND).unwrap();
        let wb = find_wnu(&b, 3, &solver, DEFAULT_INDICATOR_BOUND).unwrap();
        prop_assert_eq!(wa.is_some(), wb.is_some());
    }

    #[test]
    fn endomorphisms_match_brute_force(seed in any::<u64>()) {
        let mut rng = corpus::rng(seed);
        let a = corpus::random_multi_template(&mut rng, 3, 2, 2, 4);
        let n = a.size();
        let expected = (0..n.pow(n as u32))
            .filter(|&code| {
                let map: Vec<usize> = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
                a.is_homomorphism(&a, &map)
            })
            .count();
        let solver = Solver::default();
        let endos = endomorphisms(&a, &solver).unwrap();
        prop_assert_eq!(endos.len(), expected);
        let surjective = endos.iter().all(|m| {
            let mut seen = m.clone();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == n
        });
        prop_assert_eq!(is_core(&a, &solver).unwrap(), surjective);
        let core = core_of(&a, &solver).unwrap();
        prop_assert!(is_core(&core, &solver).unwrap());
        prop_assert!(solver.solve(&a, &core).unwrap().is_some());
        prop_assert!(solver.solve(&core, &a).unwrap().is_some());
    }
}

#[test]
fn cores_of_small_digraphs() {
    let solver = Solver::default();
    let full = structure(
        2,
        vec![("E", 2, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]])],
    );
    assert_eq!(core_of(&full, &solver).unwrap().size(), 1);

    let two_cycles = digraph(4, &[(0, 1), (1, 0), (2, 3), (3, 2)])
        .to_structure()
        .unwrap();
    let core = core_of(&two_cycles, &solver).unwrap();
    assert_eq!(core.size(), 2);
    assert_eq!(core.relation("E").unwrap().len(), 2);
    assert!(is_core(&two_cycle(), &solver).unwrap());
}

#[test]
fn taylor_report_for_bipartite_templates() {
    let solver = Solver::default();
    let report =
        report_taylor_and_width(&two_cycle(), 4, &solver, DEFAULT_INDICATOR_BOUND).unwrap();
    assert!(report.is_core);
    assert_eq!(report.wnu_by_arity, vec![(3, true), (4, true)]);
    assert!(report.bounded_width_indicator());

    let z = zigzag::zigzag();
    let report = report_taylor_and_width(&z, 4, &solver, DEFAULT_INDICATOR_BOUND).unwrap();
    // The zigzag folds onto a single edge.
    assert!(!report.is_core);
    assert_eq!(core_of(&z, &solver).unwrap().size(), 2);
    assert!(report.taylor_witness_found());
    let text = report.to_string();
    assert!(text.starts_with("warning: template is not a core"));
    assert!(text.contains("wnu arity 3: found"));
}

#[test]
fn example7_is_a_core_with_a_ternary_wnu() {
    let solver = Solver::default();
    let a = example7();
    assert!(is_core(&a, &solver).unwrap());
    assert!(find_wnu(&a, 3, &solver, DEFAULT_INDICATOR_BOUND)
        .unwrap()
        .is_some());
}

#[test]
fn zigzag_builtins_satisfy_their_identities() {
    let ops = zigzag_builtins();
    let z = zigzag::zigzag();
    for table in ops.values() {
        assert!(is_polymorphism(&z, table));
    }
    let pick = |names: &[(&str, &str)]| -> BTreeMap<String, OperationTable> {
        names
            .iter()
            .map(|&(symbol, builtin)| (symbol.to_string(), ops[builtin].clone()))
            .collect()
    };
    let majority = pick(&[("m", "median")]);
    assert!(check_identities(&majority, &identities::majority(), 4).is_ok());
    let perm = pick(&[("p1", "p1"), ("p2", "p2")]);
    assert!(check_identities(&perm, &identities::three_permutability(), 4).is_ok());
    let tsi = pick(&[("f", "meet")]);
    assert!(check_identities(&tsi, &identities::binary_tsi(), 4).is_ok());
}

#[test]
fn zigzag_has_no_maltsev() {
    let solver = Solver::default();
    let found = find_interpretations(
        &zigzag::zigzag(),
        &identities::maltsev(),
        &solver,
        DEFAULT_INDICATOR_BOUND,
    )
    .unwrap();
    assert!(found.is_none());
}

#[test]
fn identity_text_round_trips() {
    for name in [
        "majority", "maltsev", "3perm", "tsi2", "wnu4", "nu3", "edge2",
    ] {
        let system = library(name).unwrap();
        let again = IdentitySystem::parse(&system.to_text()).unwrap();
        assert_eq!(again.identities(), system.identities(), "{name}");
        assert_eq!(again.symbols(), system.symbols(), "{name}");
    }
    assert!(library("wnu1").is_none());
    assert!(IdentitySystem::parse("f(x) = g(x,").is_err());
}

#[test]
fn meet_is_a_semilattice_operation() {
    let mut ops = BTreeMap::new();
    ops.insert("f".to_string(), zigzag::meet_table(2));
    assert!(check_identities(&ops, &identities::binary_tsi(), 4).is_ok());
    let mut bad = BTreeMap::new();
    bad.insert("f".to_string(), OperationTable::projection(4, 2, 0));
    assert!(check_identities(&bad, &identities::binary_tsi(), 4).is_err());
}
