//! Reduction of digraph instances over `D(A)` back to instances over `A`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::{FreshNames, ReductionError};
use crate::gadget::{build_q, GadgetDigraph};
use crate::solver::{HomInstance, SolveError, Solver};
use crate::structures::{Digraph, LevelAssignment, Relation, RelationalStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
        })
    }
}

/// `[V_1, ..., V_k]_e`: entry sets plus an optional top label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralizedHyperedge {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub entries: Vec<Vec<String>>,
}

impl fmt::Display for GeneralizedHyperedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self
            .entries
            .iter()
            .map(|e| format!("{{{}}}", e.join(",")))
            .collect();
        write!(f, "[{}]", entries.join(","))?;
        if let Some(label) = &self.label {
            write!(f, "{label}")?;
        }
        Ok(())
    }
}

/// Hyperedges and equalities produced before the equality graph is taken.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage3A {
    pub hyperedges: Vec<GeneralizedHyperedge>,
    #[serde(default)]
    pub equalities: Vec<[String; 2]>,
}

impl Stage3A {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

/// The instance over `A` together with the equality-graph class of each of its elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage3B {
    pub instance: RelationalStructure,
    pub classes: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionOutcome {
    Definite {
        answer: Answer,
        reason: String,
    },
    Reduced {
        instance: RelationalStructure,
        /// Members of the equality-graph class behind each instance element.
        provenance: Vec<Vec<String>>,
        stage3a: Stage3A,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelFailure {
    NotBalanced(String),
    TooTall { height: usize, max: usize },
}

impl fmt::Display for LevelFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelFailure::NotBalanced(v) => write!(f, "not balanced (at `{v}`)"),
            LevelFailure::TooTall { height, max } => {
                write!(f, "height {height} exceeds {max}")
            }
        }
    }
}

pub fn compute_levels(g: &Digraph, max_height: usize) -> Result<LevelAssignment, LevelFailure> {
    let levels = LevelAssignment::compute(g).map_err(|e| match e {
        crate::structures::LevelError::NotBalanced(v) => LevelFailure::NotBalanced(v),
    })?;
    if levels.height() > max_height {
        return Err(LevelFailure::TooTall {
            height: levels.height(),
            max: max_height,
        });
    }
    Ok(levels)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShortElimination {
    /// Some short component has no homomorphism to `D(A)`.
    Unsatisfiable { component: Vec<String> },
    /// All short components were satisfiable and have been removed.
    Residual { graph: Digraph, levels: Vec<usize> },
}

/// Solves every component of height below `k + 2` directly against `D(A)`
/// and drops it.
pub fn eliminate_short_components(
    g: &Digraph,
    levels: &LevelAssignment,
    d: &GadgetDigraph,
    solver: &Solver,
) -> Result<ShortElimination, SolveError> {
    let target = d.to_structure();
    let n = d.height();
    let mut keep = Vec::new();
    for (ci, comp) in levels.components().iter().enumerate() {
        if levels.component_height(ci) == n {
            keep.extend_from_slice(comp);
            continue;
        }
        let sub = g.induced(comp).to_structure().expect("induced subgraph");
        if solver.solve(&sub, &target)?.is_none() {
            return Ok(ShortElimination::Unsatisfiable {
                component: comp.iter().map(|&v| g.vertex_name(v).to_string()).collect(),
            });
        }
    }
    keep.sort_unstable();
    Ok(ShortElimination::Residual {
        graph: g.induced(&keep),
        levels: keep.iter().map(|&v| levels.level(v)).collect(),
    })
}

/// A weak component of `G` minus its bottom and top levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalComponent {
    pub vertices: Vec<usize>,
    /// Adjacent level-0 vertices.
    pub bases: Vec<usize>,
    /// Adjacent level-`(k+2)` vertices.
    pub tops: Vec<usize>,
    /// Coordinates `i` (1-based) for which the component does not fit `Q_{[k]∖{i}}`.
    pub gamma: Vec<usize>,
}

/// The forced coordinates of an internal component: `i` is included iff the
/// component, with base-adjacent vertices pinned after the initial vertex and
/// top-adjacent vertices pinned before the terminal one, has no homomorphism
/// to `Q_{[k]∖{i}}`.
pub fn gamma(
    g: &Digraph,
    vertices: &[usize],
    bases: &[usize],
    tops: &[usize],
    k: usize,
    solver: &Solver,
) -> Result<Vec<usize>, SolveError> {
    let sub = g
        .induced(vertices)
        .to_structure()
        .expect("induced subgraph");
    let base_adjacent: Vec<usize> = vertices
        .iter()
        .enumerate()
        .filter(|&(_, &v)| g.neighbours(v).iter().any(|w| bases.contains(w)))
        .map(|(i, _)| i)
        .collect();
    let top_adjacent: Vec<usize> = vertices
        .iter()
        .enumerate()
        .filter(|&(_, &v)| g.neighbours(v).iter().any(|w| tops.contains(w)))
        .map(|(i, _)| i)
        .collect();
    let mut out = Vec::new();
    for i in 1..=k {
        let members: Vec<usize> = (1..=k).filter(|&l| l != i).collect();
        let spec = build_q(k, &members);
        let path = spec
            .to_digraph(|p| p.to_string())
            .to_structure()
            .expect("path digraph");
        let mut inst = HomInstance::new(&sub, &path)?;
        for &v in &base_adjacent {
            inst.pin(v, 1)?;
        }
        for &v in &top_adjacent {
            inst.pin(v, spec.len() - 1)?;
        }
        if !solver.exists(&inst)? {
            out.push(i);
        }
    }
    Ok(out)
}

/// Splits the residual graph (all components of height exactly `k + 2`)
/// into internal components with their bases, tops and forced coordinates.
pub fn analyse_internal_components(
    g: &Digraph,
    levels: &[usize],
    k: usize,
    solver: &Solver,
) -> Result<Vec<InternalComponent>, SolveError> {
    let n = k + 2;
    let inner: Vec<bool> = levels.iter().map(|&l| l > 0 && l < n).collect();
    let mut out = Vec::new();
    for vertices in g.weak_components_within(&inner) {
        let mut bases = BTreeSet::new();
        let mut tops = BTreeSet::new();
        for &v in &vertices {
            for w in g.neighbours(v) {
                if levels[w] == 0 {
                    bases.insert(w);
                } else if levels[w] == n {
                    tops.insert(w);
                }
            }
        }
        assert!(
            !bases.is_empty() || !tops.is_empty(),
            "internal component without base or top"
        );
        let bases: Vec<usize> = bases.into_iter().collect();
        let tops: Vec<usize> = tops.into_iter().collect();
        let gamma = gamma(g, &vertices, &bases, &tops, k, solver)?;
        out.push(InternalComponent {
            vertices,
            bases,
            tops,
            gamma,
        });
    }
    Ok(out)
}

/// Writes the generalised hyperedges and equalities. `names` supplies the
/// vertex names (fresh names avoid them); components are taken in the given order.
pub fn stage_3a(names: &[String], components: &[InternalComponent], k: usize) -> Stage3A {
    let mut fresh = FreshNames::new(names);
    let name = |v: usize| names[v].clone();
    let mut hyperedges = Vec::new();

    let tops: BTreeSet<usize> = components
        .iter()
        .flat_map(|c| c.tops.iter().copied())
        .collect();
    for &e in &tops {
        let mut entries: Vec<BTreeSet<String>> = vec![BTreeSet::new(); k];
        for c in components.iter().filter(|c| c.tops.contains(&e)) {
            // A baseless component still ties its forced coordinates together.
            let shared = (c.bases.is_empty() && !c.gamma.is_empty()).then(|| fresh.next("x"));
            for &i in &c.gamma {
                match &shared {
                    Some(x) => {
                        entries[i - 1].insert(x.clone());
                    }
                    None => entries[i - 1].extend(c.bases.iter().map(|&b| name(b))),
                }
            }
        }
        let entries = entries
            .into_iter()
            .map(|set| {
                if set.is_empty() {
                    vec![fresh.next("x")]
                } else {
                    set.into_iter().collect()
                }
            })
            .collect();
        hyperedges.push(GeneralizedHyperedge {
            label: Some(name(e)),
            entries,
        });
    }

    for c in components.iter().filter(|c| c.tops.is_empty()) {
        for &b in &c.bases {
            let entries = (1..=k)
                .map(|i| {
                    if c.gamma.contains(&i) {
                        vec![name(b)]
                    } else {
                        vec![fresh.next("x")]
                    }
                })
                .collect();
            hyperedges.push(GeneralizedHyperedge {
                label: None,
                entries,
            });
        }
    }

    let mut equalities = Vec::new();
    for c in components {
        for pair in c.tops.windows(2) {
            equalities.push([name(pair[0]), name(pair[1])]);
        }
    }
    for c in components {
        for pair in c.bases.windows(2) {
            equalities.push([name(pair[0]), name(pair[1])]);
        }
    }
    Stage3A {
        hyperedges,
        equalities,
    }
}

/// Quotients the entry vertices by the equality graph and returns the
/// resulting instance over a `k`-ary relation called `relation`.
pub fn stage_3b(
    stage: &Stage3A,
    k: Option<usize>,
    relation: &str,
) -> Result<Stage3B, ReductionError> {
    let first = stage
        .hyperedges
        .first()
        .ok_or(ReductionError::NoHyperedges)?;
    let k = k.unwrap_or(first.entries.len());
    for (index, h) in stage.hyperedges.iter().enumerate() {
        if h.entries.len() != k {
            return Err(ReductionError::EntryCount {
                index,
                expected: k,
                found: h.entries.len(),
            });
        }
        if h.entries.iter().any(Vec::is_empty) {
            return Err(ReductionError::EmptyEntry(index));
        }
    }

    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    let mut pairs = Vec::new();
    for h in &stage.hyperedges {
        for entry in &h.entries {
            let first = intern(&mut ids, &entry[0]);
            for v in &entry[1..] {
                pairs.push((first, intern(&mut ids, v)));
            }
        }
        if let Some(l) = &h.label {
            intern(&mut ids, l);
        }
    }
    for [a, b] in &stage.equalities {
        pairs.push((intern(&mut ids, a), intern(&mut ids, b)));
    }
    let count = ids.len();

    // Labels identified through written equalities share positions.
    let mut labels = UnionFind::<usize>::new(count);
    for [a, b] in &stage.equalities {
        labels.union(ids[a.as_str()], ids[b.as_str()]);
    }
    let mut uf = UnionFind::<usize>::new(count);
    for &(a, b) in &pairs {
        uf.union(a, b);
    }
    let mut anchor: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for h in &stage.hyperedges {
        let Some(l) = &h.label else { continue };
        let class = labels.find(ids[l.as_str()]);
        for (i, entry) in h.entries.iter().enumerate() {
            let v = ids[entry[0].as_str()];
            let a = *anchor.entry((class, i)).or_insert(v);
            uf.union(a, v);
        }
    }

    let entry_names: BTreeSet<&str> = stage
        .hyperedges
        .iter()
        .flat_map(|h| h.entries.iter().flatten().map(String::as_str))
        .collect();
    let mut members: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for &name in &entry_names {
        members
            .entry(uf.find(ids[name]))
            .or_default()
            .push(name.to_string());
    }
    let mut classes: Vec<Vec<String>> = members.into_values().collect();
    classes.sort();
    let mut class_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (ci, c) in classes.iter().enumerate() {
        class_of.insert(uf.find(ids[c[0].as_str()]), ci);
    }
    let tuples: Vec<Vec<usize>> = stage
        .hyperedges
        .iter()
        .map(|h| {
            h.entries
                .iter()
                .map(|e| class_of[&uf.find(ids[e[0].as_str()])])
                .collect()
        })
        .collect();
    let names = classes.iter().map(|c| c[0].clone()).collect();
    let instance = RelationalStructure::new(names, vec![Relation::new(relation, k, tuples)?])?;
    Ok(Stage3B { instance, classes })
}

fn intern<'a>(ids: &mut BTreeMap<&'a str, usize>, s: &'a str) -> usize {
    let next = ids.len();
    *ids.entry(s).or_insert(next)
}

/// The full pipeline from a digraph instance to an instance of `CSP(A)`.
pub fn backward_reduce(
    g: &Digraph,
    d: &GadgetDigraph,
    solver: &Solver,
) -> Result<ReductionOutcome, ReductionError> {
    let n = d.height();
    let levels = match compute_levels(g, n) {
        Ok(levels) => levels,
        Err(failure) => {
            return Ok(ReductionOutcome::Definite {
                answer: Answer::No,
                reason: failure.to_string(),
            })
        }
    };
    let (residual, residual_levels) = match eliminate_short_components(g, &levels, d, solver)? {
        ShortElimination::Unsatisfiable { component } => {
            return Ok(ReductionOutcome::Definite {
                answer: Answer::No,
                reason: format!(
                    "short component containing `{}` has no homomorphism",
                    component[0]
                ),
            })
        }
        ShortElimination::Residual { graph, levels } => (graph, levels),
    };
    if residual.is_empty() {
        return Ok(ReductionOutcome::Definite {
            answer: Answer::Yes,
            reason: "every component is short and satisfiable".into(),
        });
    }
    let components = analyse_internal_components(&residual, &residual_levels, d.k(), solver)?;
    let stage3a = stage_3a(residual.vertices(), &components, d.k());
    let b = stage_3b(&stage3a, Some(d.k()), d.relation().name())?;
    Ok(ReductionOutcome::Reduced {
        instance: b.instance,
        provenance: b.classes,
        stage3a,
    })
}

/// A concrete instance of `CSP(A)` for an outcome: `A` itself for YES, a
/// one-element instance with a constant constraint for NO.
pub fn materialize(
    outcome: &ReductionOutcome,
    a: &RelationalStructure,
) -> Result<RelationalStructure, ReductionError> {
    let rel = a
        .single_relation()
        .ok_or(ReductionError::NotSingleRelation)?;
    match outcome {
        ReductionOutcome::Reduced { instance, .. } => Ok(instance.clone()),
        ReductionOutcome::Definite {
            answer: Answer::Yes,
            ..
        } => Ok(a.clone()),
        ReductionOutcome::Definite {
            answer: Answer::No, ..
        } => {
            // (x,...,x) is a NO instance iff R has no constant tuple; with a
            // constant tuple every instance maps to that constant.
            if rel.tuples().iter().any(|t| t.iter().all(|&x| x == t[0])) {
                return Err(ReductionError::TemplateTrivial);
            }
            let relation = Relation::new(rel.name(), rel.arity(), [vec![0; rel.arity()]])?;
            Ok(RelationalStructure::new(vec!["x".into()], vec![relation])?)
        }
    }
}
