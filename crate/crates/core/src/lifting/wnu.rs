use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use super::diagonal::{common_section, in_diagonal_component, section_contains_all};
use super::LiftError;
use crate::algebra::{check_identities, identities, is_polymorphism, Operation, OperationTable};
use crate::gadget::{GadgetDigraph, GadgetVertex};
use crate::structures::apply_coordinatewise;

/// The WNU `ω̄` on `D(A)` built pointwise from a WNU `ω` of `A`.
#[derive(Debug)]
pub struct LiftedWnu<'g> {
    d: &'g GadgetDigraph,
    omega: OperationTable,
    memo: Mutex<HashMap<Vec<usize>, usize>>,
    coverage: Mutex<BTreeMap<&'static str, u64>>,
}

/// The unique index `i` such that all other entries of `keys` agree.
fn odd_one_out<T: PartialEq>(keys: &[T]) -> Option<usize> {
    let mut found = None;
    for i in 0..keys.len() {
        let mut others = (0..keys.len()).filter(|&j| j != i).map(|j| &keys[j]);
        let first = others.next();
        if others.all(|x| Some(x) == first) {
            assert!(
                found.is_none(),
                "two coordinates qualify as the odd one out"
            );
            found = Some(i);
        }
    }
    found
}

pub fn lift_wnu<'g>(
    d: &'g GadgetDigraph,
    omega: &OperationTable,
) -> Result<LiftedWnu<'g>, LiftError> {
    let m = omega.arity();
    if m < 3 {
        return Err(LiftError::ArityTooSmall(m));
    }
    if !is_polymorphism(d.template(), omega) {
        return Err(LiftError::NotAPolymorphism("w".into()));
    }
    let interps = BTreeMap::from([("w".to_string(), omega.clone())]);
    check_identities(&interps, &identities::wnu(m), d.element_count())
        .map_err(|e| LiftError::IdentitiesFailOnTemplate(e.to_string()))?;
    Ok(LiftedWnu {
        d,
        omega: omega.clone(),
        memo: Mutex::new(HashMap::new()),
        coverage: Mutex::new(BTreeMap::new()),
    })
}

impl LiftedWnu<'_> {
    /// How many distinct tuples were evaluated under each case.
    pub fn coverage(&self) -> BTreeMap<&'static str, u64> {
        self.coverage.lock().unwrap().clone()
    }

    fn compute(&self, c: &[usize]) -> (usize, &'static str) {
        let d = self.d;
        let levels: Vec<usize> = c.iter().map(|&v| d.level(v)).collect();
        if levels.iter().any(|&l| l != levels[0]) {
            return match odd_one_out(&levels) {
                Some(i) => (c[i], "1a"),
                None => (c[0], "1b"),
            };
        }
        if !in_diagonal_component(d, c) {
            return match odd_one_out(c) {
                Some(i) => (c[i], "2a"),
                None => (c[0], "2b"),
            };
        }
        let elements: Option<Vec<usize>> = c
            .iter()
            .map(|&v| match d.tag(v) {
                GadgetVertex::Element(a) => Some(a),
                _ => None,
            })
            .collect();
        if let Some(a) = elements {
            return (d.element_vertex(self.omega.apply(&a)), "3a");
        }
        let tuples: Option<Vec<usize>> = c
            .iter()
            .map(|&v| match d.tag(v) {
                GadgetVertex::Tuple(r) => Some(r),
                _ => None,
            })
            .collect();
        if let Some(rs) = tuples {
            return (d.tuple_vertex(self.image_tuple(&rs)), "3b");
        }
        let (placed, l) = common_section(d, c).expect("diagonal tuples share a section");
        let value = self.phi(&placed, l, levels[0]);
        if section_contains_all(d, &placed, l + 1) {
            assert_eq!(
                value,
                self.phi(&placed, l + 1, levels[0]),
                "seam values disagree"
            );
        }
        (value, "3c")
    }

    fn image_tuple(&self, rs: &[usize]) -> usize {
        let d = self.d;
        let rows: Vec<&[usize]> = rs.iter().map(|&r| d.tuple(r)).collect();
        let t = apply_coordinatewise(&self.omega, &rows).expect("arity checked");
        d.relation().position(&t).expect("polymorphisms preserve R")
    }

    fn phi(&self, placed: &[(usize, usize)], l: usize, level: usize) -> usize {
        let d = self.d;
        let a: Vec<usize> = placed.iter().map(|&(e, _)| d.path(e).element).collect();
        let rs: Vec<usize> = placed.iter().map(|&(e, _)| d.path(e).tuple).collect();
        let target = d.path(d.edge_index(self.omega.apply(&a), self.image_tuple(&rs)));
        let start = target.section_starts[l - 1];
        if target.section_is_edge(l) {
            // Section l runs from level l to level l + 1.
            return if level == l {
                target.vertices[start]
            } else {
                target.vertices[start + 1]
            };
        }
        let offset = placed
            .iter()
            .filter(|&&(e, _)| !d.path(e).section_is_edge(l))
            .map(|&(e, pos)| pos - d.path(e).section_starts[l - 1])
            .min()
            .expect("a zigzag target needs a zigzag argument");
        target.vertices[start + offset]
    }
}

impl Operation for LiftedWnu<'_> {
    fn arity(&self) -> usize {
        self.omega.arity()
    }

    fn apply(&self, args: &[usize]) -> usize {
        if let Some(&v) = self.memo.lock().unwrap().get(args) {
            return v;
        }
        let (v, case) = self.compute(args);
        *self.coverage.lock().unwrap().entry(case).or_default() += 1;
        self.memo.lock().unwrap().insert(args.to_vec(), v);
        v
    }
}
