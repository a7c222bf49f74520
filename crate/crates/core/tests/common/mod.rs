#![allow(dead_code)]

use csp_digraph::structures::{Digraph, Relation, RelationalStructure};

pub fn two_cycle() -> RelationalStructure {
    RelationalStructure::from_names(&["0", "1"], &[("E", &[&["0", "1"], &["1", "0"]])]).unwrap()
}

pub fn one_element() -> RelationalStructure {
    RelationalStructure::from_names(&["a"], &[("R", &[&["a"]])]).unwrap()
}

/// The 4-ary template over {0,1} whose gadget has 78 vertices and 80 edges.
pub fn example7() -> RelationalStructure {
    RelationalStructure::from_names(
        &["0", "1"],
        &[(
            "R",
            &[
                &["0", "0", "0", "1"],
                &["0", "1", "1", "1"],
                &["1", "0", "1", "1"],
                &["1", "1", "0", "1"],
            ],
        )],
    )
    .unwrap()
}

pub fn digraph(n: usize, edges: &[(usize, usize)]) -> Digraph {
    Digraph::new((0..n).map(|i| format!("v{i}")).collect(), edges.to_vec()).unwrap()
}

pub fn structure(n: usize, relations: Vec<(&str, usize, Vec<Vec<usize>>)>) -> RelationalStructure {
    let rels = relations
        .into_iter()
        .map(|(name, arity, tuples)| Relation::new(name, arity, tuples).unwrap())
        .collect();
    RelationalStructure::new((0..n).map(|i| i.to_string()).collect(), rels).unwrap()
}

/// Brute force: does some map `x → a` preserve all relations?
pub fn brute_force_hom(x: &RelationalStructure, a: &RelationalStructure) -> bool {
    let n = a.size();
    let m = x.size();
    let total = (n as u64).pow(m as u32);
    (0..total).any(|code| {
        let mut map = vec![0; m];
        let mut c = code;
        for slot in map.iter_mut() {
            *slot = (c % n as u64) as usize;
            c /= n as u64;
        }
        x.relations().iter().all(|rel| {
            let Some(target) = a.relation(rel.name()) else {
                return false;
            };
            rel.tuples().iter().all(|t| {
                let image: Vec<usize> = t.iter().map(|&v| map[v]).collect();
                target.contains(&image)
            })
        })
    })
}
