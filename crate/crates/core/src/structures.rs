//! Relational structures, digraphs, level functions and oriented paths.
//!
//! Elements are stored as dense indices `0..n` in declaration order; the
//! external names live in a symbol table next to them. Relations keep their
//! tuples sorted and deduplicated, so every iteration in the crate is
//! deterministic.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::algebra::{Operation, OperationTable};

/// Name of the single binary relation of a digraph viewed as a structure.
pub const EDGE_RELATION: &str = "E";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("structure has an empty domain")]
    EmptyDomain,
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{element}` in `{context}`")]
    UnknownElement { context: String, element: String },
    #[error("relation `{0}` is empty")]
    EmptyRelation(String),
    #[error("relation `{0}` has arity 0")]
    ZeroArity(String),
    #[error("relation `{relation}` has arity {arity} but a tuple of length {found}")]
    TupleLength {
        relation: String,
        arity: usize,
        found: usize,
    },
    #[error("duplicate relation symbol `{0}`")]
    DuplicateRelation(String),
    #[error("construction needs {size} items, above the configured bound {bound}")]
    TooLarge { size: u128, bound: u128 },
    #[error("operation of arity {arity} applied to {given} tuples")]
    ArityMismatch { arity: usize, given: usize },
    #[error("coordinatewise application needs tuples of one length")]
    LengthMismatch,
    #[error("structure is not a digraph (expected one binary relation `E`)")]
    NotADigraph,
}

/// A named relation over dense element indices; tuples are sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    name: String,
    arity: usize,
    tuples: Vec<Vec<usize>>,
}

impl Relation {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, StructureError> {
        let name = name.into();
        if arity == 0 {
            return Err(StructureError::ZeroArity(name));
        }
        let mut tuples: Vec<Vec<usize>> = tuples.into_iter().collect();
        if let Some(bad) = tuples.iter().find(|t| t.len() != arity) {
            return Err(StructureError::TupleLength {
                relation: name,
                arity,
                found: bad.len(),
            });
        }
        if tuples.is_empty() {
            return Err(StructureError::EmptyRelation(name));
        }
        tuples.sort_unstable();
        tuples.dedup();
        Ok(Self {
            name,
            arity,
            tuples,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .is_ok()
    }

    /// Position of `tuple` in the sorted order, if present.
    pub fn position(&self, tuple: &[usize]) -> Option<usize> {
        self.tuples
            .binary_search_by(|t| t.as_slice().cmp(tuple))
            .ok()
    }
}

/// A finite relational structure; doubles as CSP template and instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationalStructure {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    relations: Vec<Relation>,
}

impl RelationalStructure {
    pub fn new(elements: Vec<String>, relations: Vec<Relation>) -> Result<Self, StructureError> {
        if elements.is_empty() {
            return Err(StructureError::EmptyDomain);
        }
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(StructureError::DuplicateElement(e.clone()));
            }
        }
        for (i, rel) in relations.iter().enumerate() {
            if relations[..i].iter().any(|r| r.name == rel.name) {
                return Err(StructureError::DuplicateRelation(rel.name.clone()));
            }
            for t in &rel.tuples {
                if let Some(&bad) = t.iter().find(|&&x| x >= elements.len()) {
                    return Err(StructureError::UnknownElement {
                        context: rel.name.clone(),
                        element: format!("#{bad}"),
                    });
                }
            }
        }
        Ok(Self {
            elements,
            index,
            relations,
        })
    }

    /// Builds a structure from element names and named tuples.
    pub fn from_names(
        elements: &[&str],
        relations: &[(&str, &[&[&str]])],
    ) -> Result<Self, StructureError> {
        let names: Vec<String> = elements.iter().map(|s| s.to_string()).collect();
        let lookup: HashMap<&str, usize> =
            elements.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut rels = Vec::with_capacity(relations.len());
        for &(name, tuples) in relations {
            let arity = tuples.first().map_or(0, |t| t.len());
            let mut idx_tuples = Vec::with_capacity(tuples.len());
            for t in tuples {
                let mut row = Vec::with_capacity(t.len());
                for &x in t.iter() {
                    let i = *lookup
                        .get(x)
                        .ok_or_else(|| StructureError::UnknownElement {
                            context: name.to_string(),
                            element: x.to_string(),
                        })?;
                    row.push(i);
                }
                idx_tuples.push(row);
            }
            if tuples.is_empty() {
                return Err(StructureError::EmptyRelation(name.to_string()));
            }
            rels.push(Relation::new(name, arity, idx_tuples)?);
        }
        Self::new(names, rels)
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    /// The unique relation of a single-relation structure.
    pub fn single_relation(&self) -> Option<&Relation> {
        match self.relations.as_slice() {
            [r] => Some(r),
            _ => None,
        }
    }

    /// Sum of all relation arities.
    pub fn total_arity(&self) -> usize {
        self.relations.iter().map(Relation::arity).sum()
    }

    /// Induced substructure on `keep` (in the given order). `None` when a
    /// relation loses all of its tuples.
    pub fn induced(&self, keep: &[usize]) -> Option<RelationalStructure> {
        let mut remap = vec![usize::MAX; self.size()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let elements = keep.iter().map(|&i| self.elements[i].clone()).collect();
        let mut relations = Vec::with_capacity(self.relations.len());
        for rel in &self.relations {
            let tuples: Vec<Vec<usize>> = rel
                .tuples
                .iter()
                .filter(|t| t.iter().all(|&x| remap[x] != usize::MAX))
                .map(|t| t.iter().map(|&x| remap[x]).collect())
                .collect();
            relations.push(Relation::new(rel.name.clone(), rel.arity, tuples).ok()?);
        }
        RelationalStructure::new(elements, relations).ok()
    }

    /// Rename every element through `f`, keeping indices.
    pub fn renamed(&self, f: impl Fn(usize, &str) -> String) -> Result<Self, StructureError> {
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| f(i, e))
            .collect();
        Self::new(elements, self.relations.clone())
    }

    /// Applies a permutation of the domain (`perm[old] = new`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, StructureError> {
        let mut elements = vec![String::new(); self.size()];
        for (old, &new) in perm.iter().enumerate() {
            elements[new] = self.elements[old].clone();
        }
        let relations = self
            .relations
            .iter()
            .map(|r| {
                Relation::new(
                    r.name.clone(),
                    r.arity,
                    r.tuples
                        .iter()
                        .map(|t| t.iter().map(|&x| perm[x]).collect()),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(elements, relations)
    }

    /// True iff `map` (source element index to target index) is a homomorphism
    /// into `target`; relations are matched by name.
    pub fn is_homomorphism(&self, target: &RelationalStructure, map: &[usize]) -> bool {
        if map.len() != self.size() || map.iter().any(|&v| v >= target.size()) {
            return false;
        }
        self.relations.iter().all(|rel| {
            let Some(trel) = target.relation(&rel.name) else {
                return false;
            };
            trel.arity == rel.arity
                && rel.tuples.iter().all(|t| {
                    let image: Vec<usize> = t.iter().map(|&x| map[x]).collect();
                    trel.contains(&image)
                })
        })
    }
}

/// Block of a collapsed relation: where relation `name` sits inside the product tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub offset: usize,
    pub arity: usize,
}

/// A single-relation structure together with the block layout of its relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collapsed {
    pub structure: RelationalStructure,
    pub blocks: Vec<Block>,
}

impl Collapsed {
    pub fn arity(&self) -> usize {
        self.blocks.iter().map(|b| b.arity).sum()
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }
}

/// Replaces `R_1, ..., R_n` by the single relation `R_1 × ... × R_n`.
pub fn collapse_to_single_relation(a: &RelationalStructure) -> Collapsed {
    let mut blocks = Vec::with_capacity(a.relations.len());
    let mut offset = 0;
    for rel in &a.relations {
        blocks.push(Block {
            name: rel.name.clone(),
            offset,
            arity: rel.arity,
        });
        offset += rel.arity;
    }
    if a.relations.len() <= 1 {
        return Collapsed {
            structure: a.clone(),
            blocks,
        };
    }
    let mut tuples: Vec<Vec<usize>> = vec![Vec::with_capacity(offset)];
    for rel in &a.relations {
        let mut next = Vec::with_capacity(tuples.len() * rel.len());
        for prefix in &tuples {
            for t in &rel.tuples {
                let mut row = prefix.clone();
                row.extend_from_slice(t);
                next.push(row);
            }
        }
        tuples = next;
    }
    let name = a
        .relations
        .iter()
        .map(|r| r.name.as_str())
        .collect::<Vec<_>>()
        .join("*");
    let relation = Relation::new(name, offset, tuples).expect("product of nonempty relations");
    let structure =
        RelationalStructure::new(a.elements.clone(), vec![relation]).expect("domain unchanged");
    Collapsed { structure, blocks }
}

/// Index of an `m`-tuple over `0..n` in lexicographic order (first coordinate most significant).
pub fn tuple_index(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * n + x)
}

/// Inverse of [`tuple_index`].
pub fn tuple_at(mut index: usize, n: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

/// `n^m` with overflow reported as `u128::MAX`.
pub fn power(n: usize, m: usize) -> u128 {
    (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX)
}

/// The direct power `A^m`; refused when `|A|^m` (or a relation power) exceeds `bound`.
pub fn product_structure(
    a: &RelationalStructure,
    m: usize,
    bound: usize,
) -> Result<RelationalStructure, StructureError> {
    assert!(m >= 1, "product power must be positive");
    let n = a.size();
    let size = power(n, m);
    if size > bound as u128 {
        return Err(StructureError::TooLarge {
            size,
            bound: bound as u128,
        });
    }
    for rel in &a.relations {
        let count = power(rel.len(), m);
        if count > bound as u128 {
            return Err(StructureError::TooLarge {
                size: count,
                bound: bound as u128,
            });
        }
    }
    let elements: Vec<String> = (0..size as usize)
        .map(|i| {
            let t = tuple_at(i, n, m);
            let names: Vec<&str> = t.iter().map(|&x| a.elements[x].as_str()).collect();
            format!("({})", names.join(","))
        })
        .collect();
    let mut relations = Vec::with_capacity(a.relations.len());
    for rel in &a.relations {
        let r = rel.len();
        let mut tuples = Vec::with_capacity(power(r, m) as usize);
        for choice in 0..power(r, m) as usize {
            let picks = tuple_at(choice, r, m);
            let row: Vec<usize> = (0..rel.arity)
                .map(|j| {
                    let column: Vec<usize> = picks.iter().map(|&p| rel.tuples[p][j]).collect();
                    tuple_index(&column, n)
                })
                .collect();
            tuples.push(row);
        }
        relations.push(Relation::new(rel.name.clone(), rel.arity, tuples)?);
    }
    RelationalStructure::new(elements, relations)
}

/// `f^(k)`: applies `f` to the columns of `tuples`.
pub fn apply_coordinatewise(
    f: &OperationTable,
    tuples: &[&[usize]],
) -> Result<Vec<usize>, StructureError> {
    if tuples.len() != f.arity() {
        return Err(StructureError::ArityMismatch {
            arity: f.arity(),
            given: tuples.len(),
        });
    }
    let k = tuples.first().map_or(0, |t| t.len());
    if tuples.iter().any(|t| t.len() != k) {
        return Err(StructureError::LengthMismatch);
    }
    let mut column = vec![0; tuples.len()];
    Ok((0..k)
        .map(|j| {
            for (slot, t) in column.iter_mut().zip(tuples) {
                *slot = t[j];
            }
            f.apply(&column)
        })
        .collect())
}

/// A finite digraph with adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self, StructureError> {
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(StructureError::DuplicateElement(v.clone()));
            }
        }
        let n = vertices.len();
        let mut edges = edges;
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(StructureError::UnknownElement {
                context: EDGE_RELATION.into(),
                element: format!("#{}", a.max(b)),
            });
        }
        edges.sort_unstable();
        edges.dedup();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(a, b) in &edges {
            succ[a].push(b);
            pred[b].push(a);
        }
        for p in &mut pred {
            p.sort_unstable();
        }
        Ok(Self {
            vertices,
            index,
            edges,
            succ,
            pred,
        })
    }

    pub fn from_names(vertices: &[&str], edges: &[(&str, &str)]) -> Result<Self, StructureError> {
        let names: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let lookup: HashMap<&str, usize> =
            vertices.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut idx = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            let find = |x: &str| {
                lookup
                    .get(x)
                    .copied()
                    .ok_or_else(|| StructureError::UnknownElement {
                        context: EDGE_RELATION.into(),
                        element: x.to_string(),
                    })
            };
            idx.push((find(a)?, find(b)?));
        }
        Self::new(names, idx)
    }

    /// Reads a structure with exactly one binary relation (or none) as a digraph.
    pub fn from_structure(s: &RelationalStructure) -> Result<Self, StructureError> {
        let edges = match s.relations() {
            [] => Vec::new(),
            [r] if r.arity() == 2 => r.tuples().iter().map(|t| (t[0], t[1])).collect(),
            _ => return Err(StructureError::NotADigraph),
        };
        Self::new(s.elements().to_vec(), edges)
    }

    /// The digraph as a structure with relation `E` (omitted when edgeless).
    pub fn to_structure(&self) -> Result<RelationalStructure, StructureError> {
        let relations = if self.edges.is_empty() {
            Vec::new()
        } else {
            vec![Relation::new(
                EDGE_RELATION,
                2,
                self.edges.iter().map(|&(a, b)| vec![a, b]),
            )?]
        };
        RelationalStructure::new(self.vertices.clone(), relations)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    /// Undirected neighbours, sorted and unique.
    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.succ[v].iter().chain(&self.pred[v]).copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Weak components, each sorted, ordered by smallest vertex.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let keep = vec![true; self.vertex_count()];
        self.weak_components_within(&keep)
    }

    /// Weak components of the subgraph induced by vertices with `keep[v]`.
    pub fn weak_components_within(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut uf = UnionFind::<usize>::new(n);
        for &(a, b) in &self.edges {
            if keep[a] && keep[b] {
                uf.union(a, b);
            }
        }
        let mut by_root: HashMap<usize, usize> = HashMap::new();
        let mut components: Vec<Vec<usize>> = Vec::new();
        for v in (0..n).filter(|&v| keep[v]) {
            let root = uf.find(v);
            let slot = *by_root.entry(root).or_insert_with(|| {
                components.push(Vec::new());
                components.len() - 1
            });
            components[slot].push(v);
        }
        components
    }

    /// Induced subgraph on `keep` (in the given order).
    pub fn induced(&self, keep: &[usize]) -> Digraph {
        let mut remap = vec![usize::MAX; self.vertex_count()];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let vertices = keep.iter().map(|&v| self.vertices[v].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| remap[a] != usize::MAX && remap[b] != usize::MAX)
            .map(|&(a, b)| (remap[a], remap[b]))
            .collect();
        Digraph::new(vertices, edges).expect("induced subgraph of a valid digraph")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelError {
    #[error("digraph is not balanced (conflict at vertex `{0}`)")]
    NotBalanced(String),
}

/// A level function per weak component, minimum 0 in each component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelAssignment {
    levels: Vec<usize>,
    component_of: Vec<usize>,
    components: Vec<Vec<usize>>,
    component_heights: Vec<usize>,
}

impl LevelAssignment {
    pub fn compute(g: &Digraph) -> Result<Self, LevelError> {
        let n = g.vertex_count();
        let mut raw: Vec<Option<i64>> = vec![None; n];
        let components = g.weak_components();
        let mut component_of = vec![0; n];
        let mut component_heights = Vec::with_capacity(components.len());
        let mut levels = vec![0usize; n];
        for (ci, comp) in components.iter().enumerate() {
            let start = comp[0];
            raw[start] = Some(0);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                let lv = raw[v].expect("queued vertices are levelled");
                let steps = g.succ[v]
                    .iter()
                    .map(|&w| (w, lv + 1))
                    .chain(g.pred[v].iter().map(|&w| (w, lv - 1)));
                for (w, want) in steps {
                    match raw[w] {
                        None => {
                            raw[w] = Some(want);
                            queue.push_back(w);
                        }
                        Some(have) if have != want => {
                            return Err(LevelError::NotBalanced(g.vertices[w].clone()));
                        }
                        Some(_) => {}
                    }
                }
            }
            let min = comp.iter().map(|&v| raw[v].unwrap()).min().unwrap();
            let mut height = 0;
            for &v in comp {
                let level = (raw[v].unwrap() - min) as usize;
                levels[v] = level;
                component_of[v] = ci;
                height = height.max(level);
            }
            component_heights.push(height);
        }
        Ok(Self {
            levels,
            component_of,
            components,
            component_heights,
        })
    }

    /// Wraps precomputed levels (a single component is assumed per call site).
    pub fn from_levels(g: &Digraph, levels: Vec<usize>) -> Result<Self, LevelError> {
        for &(a, b) in g.edges() {
            if levels[b] != levels[a] + 1 {
                return Err(LevelError::NotBalanced(g.vertices[b].clone()));
            }
        }
        let mut check = Self::compute(g)?;
        // Components are rebased on the supplied levels.
        for (ci, comp) in check.components.iter().enumerate() {
            let min = comp.iter().map(|&v| levels[v]).min().unwrap_or(0);
            if min != 0 {
                return Err(LevelError::NotBalanced(g.vertices[comp[0]].clone()));
            }
            check.component_heights[ci] = comp.iter().map(|&v| levels[v]).max().unwrap_or(0);
        }
        check.levels = levels;
        Ok(check)
    }

    pub fn level(&self, v: usize) -> usize {
        self.levels[v]
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn height(&self) -> usize {
        self.component_heights.iter().copied().max().unwrap_or(0)
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }

    pub fn component_height(&self, c: usize) -> usize {
        self.component_heights[c]
    }
}

/// Orientation of one step of an oriented path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "F",
            Direction::Backward => "B",
        })
    }
}

/// An oriented path `v_0 .. v_L` given by its direction word.
///
/// Step `i` is `Forward` when `(v_{i-1}, v_i)` is the edge and `Backward`
/// when `(v_i, v_{i-1})` is.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrientedPathSpec {
    steps: Vec<Direction>,
}

impl OrientedPathSpec {
    pub fn new(steps: Vec<Direction>) -> Self {
        Self { steps }
    }

    pub fn single_edge() -> Self {
        Self::new(vec![Direction::Forward])
    }

    pub fn zigzag() -> Self {
        use Direction::*;
        Self::new(vec![Forward, Backward, Forward])
    }

    /// `self ∔ other`: identifies the terminal vertex of `self` with the initial one of `other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        Self { steps }
    }

    pub fn steps(&self) -> &[Direction] {
        &self.steps
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn terminal(&self) -> usize {
        self.steps.len()
    }

    /// Edges as position pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, d)| match d {
                Direction::Forward => (i, i + 1),
                Direction::Backward => (i + 1, i),
            })
            .collect()
    }

    /// Level of each position, minimum 0.
    pub fn levels(&self) -> Vec<usize> {
        let mut raw = Vec::with_capacity(self.vertex_count());
        let mut cur: i64 = 0;
        raw.push(cur);
        for d in &self.steps {
            cur += match d {
                Direction::Forward => 1,
                Direction::Backward => -1,
            };
            raw.push(cur);
        }
        let min = *raw.iter().min().unwrap();
        raw.into_iter().map(|x| (x - min) as usize).collect()
    }

    pub fn height(&self) -> usize {
        self.levels().into_iter().max().unwrap_or(0)
    }

    /// Target positions adjacent to `pos` through an edge oriented like `dir`
    /// when walking away from `pos`.
    pub fn step_targets(&self, pos: usize, dir: Direction) -> impl Iterator<Item = usize> + '_ {
        let forward_next = pos < self.len() && self.steps[pos] == dir;
        let backward_prev = pos > 0 && self.steps[pos - 1] != dir;
        forward_next
            .then_some(pos + 1)
            .into_iter()
            .chain(backward_prev.then(|| pos - 1))
    }

    pub fn to_digraph(&self, name: impl Fn(usize) -> String) -> Digraph {
        let vertices = (0..self.vertex_count()).map(name).collect();
        Digraph::new(vertices, self.edges()).expect("path positions are distinct")
    }

    pub fn word(&self) -> String {
        self.steps.iter().map(|d| d.to_string()).collect()
    }
}
