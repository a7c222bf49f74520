use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use super::diagonal::{common_section, in_diagonal_component};
use super::order::{EpsilonOrder, GadgetOrder};
use super::LiftError;
use crate::algebra::zigzag::{zigzag, Z00, Z10};
use crate::algebra::{
    check_identities, find_interpretations, first_violation, IdentitySystem, Interpretations,
    Operation, OperationTable,
};
use crate::gadget::{GadgetDigraph, GadgetVertex};
use crate::solver::Solver;
use crate::structures::apply_coordinatewise;

/// One lifted operation symbol on `D(A)`.
#[derive(Debug)]
pub struct LiftedOperation<'g> {
    d: &'g GadgetDigraph,
    order: Arc<GadgetOrder>,
    on_template: OperationTable,
    on_zigzag: OperationTable,
    memo: Mutex<HashMap<Vec<usize>, usize>>,
    coverage: Mutex<BTreeMap<&'static str, u64>>,
}

/// Checks the syntactic and semantic preconditions of the general lift.
pub fn check_lift_preconditions(
    d: &GadgetDigraph,
    system: &IdentitySystem,
    on_template: &Interpretations,
    on_zigzag: &Interpretations,
) -> Result<(), LiftError> {
    if let Some((symbol, _)) = system
        .symbols()
        .iter()
        .find(|(s, _)| !system.is_marked_idempotent(s))
    {
        return Err(LiftError::NotIdempotent(symbol.clone()));
    }
    if let Some(bad) = system
        .identities()
        .iter()
        .find(|i| !i.is_balanced() && i.variable_count() > 2)
    {
        return Err(LiftError::UnbalancedIdentity(bad.to_string()));
    }
    check_identities(on_template, system, d.element_count())
        .map_err(|e| LiftError::IdentitiesFailOnTemplate(e.to_string()))?;
    check_identities(on_zigzag, system, 4)
        .map_err(|e| LiftError::IdentitiesFailOnZigzag(e.to_string()))?;
    let z = zigzag();
    for (symbol, _) in system.symbols() {
        if first_violation(d.template(), &on_template[symbol]).is_some() {
            return Err(LiftError::NotAPolymorphism(symbol.clone()));
        }
        if first_violation(&z, &on_zigzag[symbol]).is_some() {
            return Err(LiftError::NotAPolymorphism(format!(
                "{symbol} on the zigzag"
            )));
        }
    }
    Ok(())
}

/// Lifts interpretations of a linear idempotent system on `A` and on the
/// zigzag to interpretations on `D(A)`.
pub fn lift_general<'g>(
    d: &'g GadgetDigraph,
    system: &IdentitySystem,
    on_template: &Interpretations,
    on_zigzag: &Interpretations,
    policy: EpsilonOrder,
) -> Result<BTreeMap<String, LiftedOperation<'g>>, LiftError> {
    check_lift_preconditions(d, system, on_template, on_zigzag)?;
    let order = Arc::new(GadgetOrder::new(d, policy));
    Ok(system
        .symbols()
        .iter()
        .map(|(symbol, _)| {
            let op = LiftedOperation {
                d,
                order: Arc::clone(&order),
                on_template: on_template[symbol].clone(),
                on_zigzag: on_zigzag[symbol].clone(),
                memo: Mutex::new(HashMap::new()),
                coverage: Mutex::new(BTreeMap::new()),
            };
            (symbol.clone(), op)
        })
        .collect())
}

/// Like [`lift_general`], searching for the interpretations on `A` and the zigzag first.
pub fn lift_general_auto<'g>(
    d: &'g GadgetDigraph,
    system: &IdentitySystem,
    solver: &Solver,
    bound: usize,
    policy: EpsilonOrder,
) -> Result<BTreeMap<String, LiftedOperation<'g>>, LiftError> {
    if let Some((symbol, _)) = system
        .symbols()
        .iter()
        .find(|(s, _)| !system.is_marked_idempotent(s))
    {
        return Err(LiftError::NotIdempotent(symbol.clone()));
    }
    if let Some(bad) = system
        .identities()
        .iter()
        .find(|i| !i.is_balanced() && i.variable_count() > 2)
    {
        return Err(LiftError::UnbalancedIdentity(bad.to_string()));
    }
    let on_zigzag = find_interpretations(&zigzag(), system, solver, bound)?
        .ok_or(LiftError::NoZigzagInterpretation)?;
    let on_template = find_interpretations(d.template(), system, solver, bound)?
        .ok_or(LiftError::NoTemplateInterpretation)?;
    lift_general(d, system, &on_template, &on_zigzag, policy)
}

impl LiftedOperation<'_> {
    pub fn coverage(&self) -> BTreeMap<&'static str, u64> {
        self.coverage.lock().unwrap().clone()
    }

    pub fn order(&self) -> &GadgetOrder {
        &self.order
    }

    fn image_tuple(&self, rs: &[usize]) -> usize {
        let d = self.d;
        let rows: Vec<&[usize]> = rs.iter().map(|&r| d.tuple(r)).collect();
        let t = apply_coordinatewise(&self.on_template, &rows).expect("arity checked");
        d.relation().position(&t).expect("polymorphisms preserve R")
    }

    /// Picks between two classes mapped to `00` and `10` using the zigzag operation.
    fn choose(&self, upper: &[bool]) -> bool {
        let args: Vec<usize> = upper.iter().map(|&u| if u { Z10 } else { Z00 }).collect();
        let v = self.on_zigzag.apply(&args);
        debug_assert!(
            v == Z00 || v == Z10,
            "{{00,10}} is closed under polymorphisms"
        );
        v == Z10
    }

    fn compute(&self, c: &[usize]) -> (usize, &'static str) {
        let d = self.d;
        let order = &self.order;
        let elements: Option<Vec<usize>> = c
            .iter()
            .map(|&v| match d.tag(v) {
                GadgetVertex::Element(a) => Some(a),
                _ => None,
            })
            .collect();
        if let Some(a) = elements {
            return (d.element_vertex(self.on_template.apply(&a)), "1a");
        }
        let tuples: Option<Vec<usize>> = c
            .iter()
            .map(|&v| match d.tag(v) {
                GadgetVertex::Tuple(r) => Some(r),
                _ => None,
            })
            .collect();
        if let Some(rs) = tuples {
            return (d.tuple_vertex(self.image_tuple(&rs)), "1b");
        }

        if in_diagonal_component(d, c) {
            let (placed, l) = common_section(d, c).expect("diagonal tuples share a section");
            let a: Vec<usize> = placed.iter().map(|&(e, _)| d.path(e).element).collect();
            let rs: Vec<usize> = placed.iter().map(|&(e, _)| d.path(e).tuple).collect();
            let target = d.path(d.edge_index(self.on_template.apply(&a), self.image_tuple(&rs)));
            let start = target.section_starts[l - 1];
            if target.section_is_edge(l) {
                let level = d.level(c[0]);
                let v = if level == l {
                    target.vertices[start]
                } else {
                    target.vertices[start + 1]
                };
                return (v, "2a");
            }
            let offsets: Vec<Option<usize>> = placed
                .iter()
                .map(|&(e, pos)| {
                    let p = d.path(e);
                    (!p.section_is_edge(l)).then(|| pos - p.section_starts[l - 1])
                })
                .collect();
            if let Some(all) = offsets.iter().copied().collect::<Option<Vec<usize>>>() {
                return (target.vertices[start + self.on_zigzag.apply(&all)], "2b");
            }
            let v = order.min_of(
                offsets
                    .iter()
                    .flatten()
                    .map(|&o| target.vertices[start + o]),
            );
            return (v, "2c");
        }

        let levels: BTreeSet<usize> = c.iter().map(|&v| d.level(v)).collect();
        let epsilons: BTreeSet<usize> = c.iter().map(|&v| order.epsilon(v)).collect();
        if levels.len() == 1 && epsilons.len() == 2 {
            let mut pair: Vec<usize> = epsilons.into_iter().collect();
            pair.sort_by_key(|&e| order.rank(e));
            let upper: Vec<bool> = c.iter().map(|&v| order.epsilon(v) == pair[1]).collect();
            let chosen = pair[usize::from(self.choose(&upper))];
            let v = order.min_of(c.iter().copied().filter(|&v| order.epsilon(v) == chosen));
            return (v, "3a");
        }
        if levels.len() == 2 {
            let top = *levels.iter().next_back().unwrap();
            let upper: Vec<bool> = c.iter().map(|&v| d.level(v) == top).collect();
            let pick_upper = self.choose(&upper);
            let v = order.min_of(
                c.iter()
                    .zip(&upper)
                    .filter(|&(_, &u)| u == pick_upper)
                    .map(|(&v, _)| v),
            );
            return (v, "3b");
        }
        (order.min_of(c.iter().copied()), "3c")
    }
}

impl Operation for LiftedOperation<'_> {
    fn arity(&self) -> usize {
        self.on_template.arity()
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
