//! Backtracking homomorphism search with generalised arc consistency.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::structures::RelationalStructure;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),
    #[error("relation `{0}` of the source has no counterpart in the target")]
    MissingRelation(String),
    #[error(
        "relation `{name}` has arity {source_arity} in the source but {target_arity} in the target"
    )]
    ArityMismatch {
        name: String,
        source_arity: usize,
        target_arity: usize,
    },
    #[error("pin refers to source element {element} or target element {value} out of range")]
    BadPin { element: usize, value: usize },
}

#[derive(Debug, Clone)]
struct Constraint {
    scope: Vec<usize>,
    /// For each position, the first position holding the same variable.
    first: Vec<usize>,
    relation: usize,
}

/// A homomorphism problem `source → target` with per-element candidate sets.
#[derive(Debug, Clone)]
pub struct HomInstance<'a> {
    source: &'a RelationalStructure,
    target: &'a RelationalStructure,
    domains: Vec<FixedBitSet>,
    constraints: Vec<Constraint>,
    watchers: Vec<Vec<usize>>,
}

impl<'a> HomInstance<'a> {
    pub fn new(
        source: &'a RelationalStructure,
        target: &'a RelationalStructure,
    ) -> Result<Self, SolveError> {
        let n = target.size();
        let mut full = FixedBitSet::with_capacity(n);
        full.insert_range(..);
        let domains = vec![full; source.size()];
        let mut constraints = Vec::new();
        for rel in source.relations() {
            let (ti, trel) = target
                .relations()
                .iter()
                .enumerate()
                .find(|(_, r)| r.name() == rel.name())
                .ok_or_else(|| SolveError::MissingRelation(rel.name().to_string()))?;
            if trel.arity() != rel.arity() {
                return Err(SolveError::ArityMismatch {
                    name: rel.name().to_string(),
                    source_arity: rel.arity(),
                    target_arity: trel.arity(),
                });
            }
            for t in rel.tuples() {
                let first = (0..t.len())
                    .map(|j| t.iter().position(|&x| x == t[j]).unwrap())
                    .collect();
                constraints.push(Constraint {
                    scope: t.clone(),
                    first,
                    relation: ti,
                });
            }
        }
        let mut watchers = vec![Vec::new(); source.size()];
        for (ci, c) in constraints.iter().enumerate() {
            for (j, &v) in c.scope.iter().enumerate() {
                if c.first[j] == j {
                    watchers[v].push(ci);
                }
            }
        }
        Ok(Self {
            source,
            target,
            domains,
            constraints,
            watchers,
        })
    }

    /// Restricts `element` to the single value `value`.
    pub fn pin(&mut self, element: usize, value: usize) -> Result<(), SolveError> {
        self.restrict(element, &[value])
    }

    /// Intersects the domain of `element` with `values`.
    pub fn restrict(&mut self, element: usize, values: &[usize]) -> Result<(), SolveError> {
        let n = self.target.size();
        if element >= self.domains.len() {
            return Err(SolveError::BadPin {
                element,
                value: values.first().copied().unwrap_or(0),
            });
        }
        let mut allowed = FixedBitSet::with_capacity(n);
        for &v in values {
            if v >= n {
                return Err(SolveError::BadPin { element, value: v });
            }
            allowed.insert(v);
        }
        self.domains[element].intersect_with(&allowed);
        Ok(())
    }

    pub fn source(&self) -> &RelationalStructure {
        self.source
    }

    pub fn target(&self) -> &RelationalStructure {
        self.target
    }

    pub fn domains(&self) -> &[FixedBitSet] {
        &self.domains
    }

    /// Full check of a total map against all constraints and domains.
    pub fn verify(&self, map: &[usize]) -> bool {
        map.len() == self.domains.len()
            && map.iter().zip(&self.domains).all(|(&v, d)| d.contains(v))
            && self.source.is_homomorphism(self.target, map)
    }

    fn propagate(&self, domains: &mut [FixedBitSet], seeds: Option<&[usize]>) -> bool {
        let n = self.target.size();
        let mut queued = vec![false; self.constraints.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        match seeds {
            None => {
                queue.extend(0..self.constraints.len());
                queued.iter_mut().for_each(|q| *q = true);
            }
            Some(vars) => {
                for &v in vars {
                    for &c in &self.watchers[v] {
                        if !queued[c] {
                            queued[c] = true;
                            queue.push_back(c);
                        }
                    }
                }
            }
        }
        let mut support: Vec<FixedBitSet> = Vec::new();
        while let Some(ci) = queue.pop_front() {
            queued[ci] = false;
            let c = &self.constraints[ci];
            let rel = &self.target.relations()[c.relation];
            support.clear();
            support.resize(c.scope.len(), FixedBitSet::with_capacity(n));
            for t in rel.tuples() {
                let ok = c.scope.iter().enumerate().all(|(j, &v)| {
                    domains[v].contains(t[j]) && (c.first[j] == j || t[c.first[j]] == t[j])
                });
                if ok {
                    for (j, s) in support.iter_mut().enumerate() {
                        if c.first[j] == j {
                            s.insert(t[j]);
                        }
                    }
                }
            }
            for (j, &v) in c.scope.iter().enumerate() {
                if c.first[j] != j {
                    continue;
                }
                if support[j].count_ones(..) == domains[v].count_ones(..) {
                    continue;
                }
                domains[v].intersect_with(&support[j]);
                if domains[v].is_clear() {
                    return false;
                }
                for &other in &self.watchers[v] {
                    if other != ci && !queued[other] {
                        queued[other] = true;
                        queue.push_back(other);
                    }
                }
            }
        }
        true
    }
}

/// Greatest arc-consistent refinement of the instance domains, `None` if some domain empties.
pub fn arc_consistency(inst: &HomInstance) -> Option<Vec<FixedBitSet>> {
    let mut domains = inst.domains.clone();
    if domains.iter().any(FixedBitSet::is_clear) {
        return None;
    }
    inst.propagate(&mut domains, None).then_some(domains)
}

/// Node-budgeted backtracking search (smallest domain first, values ascending).
#[derive(Debug, Clone, Copy)]
pub struct Solver {
    budget: u64,
}

impl Default for Solver {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
        }
    }
}

struct Search<'s, 'a> {
    inst: &'s HomInstance<'a>,
    budget: u64,
    nodes: u64,
    limit: usize,
    found: Vec<Vec<usize>>,
}

impl Search<'_, '_> {
    fn run(&mut self, domains: Vec<FixedBitSet>) -> Result<(), SolveError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SolveError::BudgetExhausted(self.budget));
        }
        let pick = domains
            .iter()
            .enumerate()
            .map(|(i, d)| (d.count_ones(..), i))
            .filter(|&(c, _)| c > 1)
            .min();
        let Some((_, var)) = pick else {
            let map: Vec<usize> = domains
                .iter()
                .map(|d| d.ones().next().expect("nonempty domain"))
                .collect();
            if self.inst.verify(&map) {
                self.found.push(map);
            }
            return Ok(());
        };
        for value in domains[var].ones() {
            let mut next = domains.clone();
            next[var].clear();
            next[var].insert(value);
            if self.inst.propagate(&mut next, Some(&[var])) {
                self.run(next)?;
                if self.found.len() >= self.limit {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

impl Solver {
    pub fn new(budget: u64) -> Self {
        Self { budget }
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// First homomorphism in canonical search order.
    pub fn find(&self, inst: &HomInstance) -> Result<Option<Vec<usize>>, SolveError> {
        Ok(self.enumerate(inst, 1)?.pop())
    }

    pub fn exists(&self, inst: &HomInstance) -> Result<bool, SolveError> {
        Ok(self.find(inst)?.is_some())
    }

    /// Up to `limit` homomorphisms in canonical search order.
    pub fn enumerate(
        &self,
        inst: &HomInstance,
        limit: usize,
    ) -> Result<Vec<Vec<usize>>, SolveError> {
        if limit == 0 {
            return Ok(Vec::new());
        }
        let Some(domains) = arc_consistency(inst) else {
            return Ok(Vec::new());
        };
        let mut search = Search {
            inst,
            budget: self.budget,
            nodes: 0,
            limit,
            found: Vec::new(),
        };
        search.run(domains)?;
        Ok(search.found)
    }

    /// Convenience: is there a homomorphism `source → target`?
    pub fn solve(
        &self,
        source: &RelationalStructure,
        target: &RelationalStructure,
    ) -> Result<Option<Vec<usize>>, SolveError> {
        self.find(&HomInstance::new(source, target)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Digraph;

    fn digraph(n: usize, edges: &[(usize, usize)]) -> RelationalStructure {
        let names = (0..n).map(|i| i.to_string()).collect();
        Digraph::new(names, edges.to_vec())
            .unwrap()
            .to_structure()
            .unwrap()
    }

    fn two_cycle() -> RelationalStructure {
        digraph(2, &[(0, 1), (1, 0)])
    }

    fn sym_triangle() -> RelationalStructure {
        digraph(3, &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)])
    }

    #[test]
    fn single_vertex_keeps_both_values() {
        let x = RelationalStructure::new(vec!["v".into()], vec![]).unwrap();
        let t = two_cycle();
        let inst = HomInstance::new(&x, &t).unwrap();
        let doms = arc_consistency(&inst).unwrap();
        assert_eq!(doms[0].count_ones(..), 2);
        assert_eq!(Solver::default().enumerate(&inst, 10).unwrap().len(), 2);
    }

    #[test]
    fn directed_path_into_two_cycle() {
        let x = digraph(3, &[(0, 1), (1, 2)]);
        let t = two_cycle();
        let inst = HomInstance::new(&x, &t).unwrap();
        let doms = arc_consistency(&inst).unwrap();
        assert!(doms.iter().all(|d| d.count_ones(..) == 2));
        assert!(Solver::default().exists(&inst).unwrap());
    }

    #[test]
    fn triangle_is_arc_consistent_but_unsat() {
        let x = sym_triangle();
        let t = two_cycle();
        let inst = HomInstance::new(&x, &t).unwrap();
        assert!(arc_consistency(&inst).is_some());
        assert_eq!(Solver::default().find(&inst).unwrap(), None);
    }

    #[test]
    fn directed_three_cycle_identity() {
        let c3 = digraph(3, &[(0, 1), (1, 2), (2, 0)]);
        let inst = HomInstance::new(&c3, &c3).unwrap();
        assert_eq!(Solver::default().find(&inst).unwrap(), Some(vec![0, 1, 2]));
    }

    #[test]
    fn endomorphisms_of_two_cycle() {
        let t = two_cycle();
        let inst = HomInstance::new(&t, &t).unwrap();
        let all = Solver::default().enumerate(&inst, 100).unwrap();
        assert_eq!(all, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(
            Solver::default().enumerate(&inst, 1).unwrap()[0],
            Solver::default().find(&inst).unwrap().unwrap()
        );
    }

    #[test]
    fn pins_are_respected() {
        let t = two_cycle();
        let mut inst = HomInstance::new(&t, &t).unwrap();
        inst.pin(0, 1).unwrap();
        assert_eq!(Solver::default().find(&inst).unwrap(), Some(vec![1, 0]));
        assert!(inst.pin(0, 7).is_err());
    }

    #[test]
    fn budget_exhaustion_is_not_no() {
        // K4 into K3 needs real search; a budget of one node cannot finish it.
        let mut edges = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    edges.push((a, b));
                }
            }
        }
        let k4 = digraph(4, &edges);
        let k3 = sym_triangle();
        let inst = HomInstance::new(&k4, &k3).unwrap();
        assert_eq!(
            Solver::new(1).find(&inst),
            Err(SolveError::BudgetExhausted(1))
        );
        assert_eq!(Solver::default().find(&inst).unwrap(), None);
    }

    #[test]
    fn repeated_variables_need_loops() {
        let x = RelationalStructure::from_names(&["v"], &[("E", &[&["v", "v"]])]).unwrap();
        let t = two_cycle();
        assert_eq!(Solver::default().solve(&x, &t).unwrap(), None);
    }

    #[test]
    fn missing_relation_is_an_error() {
        let x = RelationalStructure::from_names(&["v"], &[("R", &[&["v"]])]).unwrap();
        let t = two_cycle();
        assert!(matches!(
            HomInstance::new(&x, &t),
            Err(SolveError::MissingRelation(_))
        ));
    }
}
