//! The balanced digraph `D(A)` built from a single-relation structure.

use std::fmt::Write as _;

use thiserror::Error;

use crate::structures::{Digraph, Direction, OrientedPathSpec, Relation, RelationalStructure};

/// Default limit on `|A|·|R|` for [`build_d`].
pub const DEFAULT_GADGET_BOUND: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("template must have exactly one relation, found {0}")]
    NotSingleRelation(usize),
    #[error("|A|·|R| = {size} exceeds the bound {bound}")]
    TooLarge { size: usize, bound: usize },
}

/// The set `Q_I` is indexed by; members are 1-based positions in `1..=k`.
pub fn build_q(k: usize, members: &[usize]) -> OrientedPathSpec {
    use Direction::*;
    let mut steps = vec![Forward];
    for l in 1..=k {
        if members.contains(&l) {
            steps.push(Forward);
        } else {
            steps.extend([Forward, Backward, Forward]);
        }
    }
    steps.push(Forward);
    OrientedPathSpec::new(steps)
}

/// Vertex and edge counts of `D(A)` from `|A|`, `|R|` and `k`.
pub fn count_formula(a: usize, r: usize, k: usize) -> (usize, usize) {
    let (a, r, k) = (a as i128, r as i128, k as i128);
    let vertices = (3 * k + 1) * r * a + (1 - 2 * k) * r + a;
    let edges = (3 * k + 2) * r * a - 2 * k * r;
    (vertices as usize, edges as usize)
}

/// An endpoint-preserving homomorphism between two oriented paths,
/// as a map from source positions to target positions, if one exists. Among
/// several, the lexicographically least is returned.
pub fn path_hom_exists(source: &OrientedPathSpec, target: &OrientedPathSpec) -> Option<Vec<usize>> {
    let reach = reachable(source, target);
    let last = source.terminal();
    if !reach[last][target.terminal()] {
        return None;
    }
    // Walk backwards keeping only positions that still reach the terminal.
    let mut alive = vec![vec![false; target.vertex_count()]; source.vertex_count()];
    alive[last][target.terminal()] = true;
    for i in (0..last).rev() {
        for q in 0..target.vertex_count() {
            if reach[i][q] {
                alive[i][q] = target
                    .step_targets(q, source.steps()[i])
                    .any(|w| alive[i + 1][w]);
            }
        }
    }
    let mut map = vec![0; source.vertex_count()];
    for i in 0..last {
        map[i + 1] = target
            .step_targets(map[i], source.steps()[i])
            .filter(|&w| alive[i + 1][w])
            .min()
            .expect("alive positions have alive successors");
    }
    Some(map)
}

/// Number of endpoint-preserving homomorphisms between two oriented paths.
pub fn path_hom_count(source: &OrientedPathSpec, target: &OrientedPathSpec) -> u128 {
    let mut count = vec![0u128; target.vertex_count()];
    count[0] = 1;
    for &d in source.steps() {
        let mut next = vec![0u128; target.vertex_count()];
        for (q, &c) in count.iter().enumerate().filter(|(_, c)| **c > 0) {
            for w in target.step_targets(q, d) {
                next[w] += c;
            }
        }
        count = next;
    }
    count[target.terminal()]
}

fn reachable(source: &OrientedPathSpec, target: &OrientedPathSpec) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; target.vertex_count()]; source.vertex_count()];
    reach[0][0] = true;
    for (i, &d) in source.steps().iter().enumerate() {
        for q in 0..target.vertex_count() {
            if reach[i][q] {
                for w in target.step_targets(q, d) {
                    reach[i + 1][w] = true;
                }
            }
        }
    }
    reach
}

/// What a vertex of `D(A)` stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GadgetVertex {
    Element(usize),
    Tuple(usize),
    /// Position `step` (strictly inside) of the path `P_e`, `e` an index into `A×R`.
    Internal {
        edge: usize,
        step: usize,
    },
}

/// The path `P_e` for `e = (a, r)` and where it sits in the gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathInfo {
    pub element: usize,
    pub tuple: usize,
    /// Coordinates `l` (1-based) with `a = r_l`.
    pub members: Vec<usize>,
    pub spec: OrientedPathSpec,
    /// Gadget vertex at each path position.
    pub vertices: Vec<usize>,
    /// Start position of section `l` at index `l - 1`.
    pub section_starts: Vec<usize>,
}

impl PathInfo {
    pub fn len(&self) -> usize {
        self.spec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spec.is_empty()
    }

    /// Whether section `l` (1-based) is a single edge.
    pub fn section_is_edge(&self, l: usize) -> bool {
        self.members.contains(&l)
    }

    /// Positions covered by section `l` (1-based), endpoints included.
    pub fn section_positions(&self, l: usize) -> std::ops::RangeInclusive<usize> {
        let start = self.section_starts[l - 1];
        let len = if self.section_is_edge(l) { 1 } else { 3 };
        start..=start + len
    }

    pub fn position_of(&self, vertex: usize) -> Option<usize> {
        self.vertices.iter().position(|&v| v == vertex)
    }
}

/// `D(A)` together with the tags that relate it back to `A`.
#[derive(Debug, Clone)]
pub struct GadgetDigraph {
    template: RelationalStructure,
    k: usize,
    digraph: Digraph,
    tags: Vec<GadgetVertex>,
    levels: Vec<usize>,
    paths: Vec<PathInfo>,
}

fn tuple_label(a: &RelationalStructure, t: &[usize]) -> String {
    let parts: Vec<&str> = t.iter().map(|&x| a.element_name(x)).collect();
    format!("({})", parts.join(","))
}

/// Builds `D(A)` with the default size bound.
pub fn build_d(a: &RelationalStructure) -> Result<GadgetDigraph, GadgetError> {
    GadgetDigraph::build(a, DEFAULT_GADGET_BOUND)
}

impl GadgetDigraph {
    pub fn build(a: &RelationalStructure, bound: usize) -> Result<Self, GadgetError> {
        let rel = a
            .single_relation()
            .ok_or(GadgetError::NotSingleRelation(a.relations().len()))?;
        let n = a.size();
        let size = n * rel.len();
        if size > bound {
            return Err(GadgetError::TooLarge { size, bound });
        }
        let k = rel.arity();
        let mut names: Vec<String> = Vec::new();
        let mut tags = Vec::new();
        let mut levels = Vec::new();
        for x in 0..n {
            names.push(format!("elem:{}", a.element_name(x)));
            tags.push(GadgetVertex::Element(x));
            levels.push(0);
        }
        for (ri, t) in rel.tuples().iter().enumerate() {
            names.push(format!("tup:{}", tuple_label(a, t)));
            tags.push(GadgetVertex::Tuple(ri));
            levels.push(k + 2);
        }
        let mut edges = Vec::new();
        let mut paths = Vec::with_capacity(size);
        for x in 0..n {
            for (ri, t) in rel.tuples().iter().enumerate() {
                let edge = paths.len();
                let members: Vec<usize> = (1..=k).filter(|&l| t[l - 1] == x).collect();
                let spec = build_q(k, &members);
                let path_levels = spec.levels();
                let mut vertices = vec![x];
                for step in 1..spec.len() {
                    vertices.push(names.len());
                    names.push(format!(
                        "path:{}|{}|{}",
                        a.element_name(x),
                        tuple_label(a, t),
                        step
                    ));
                    tags.push(GadgetVertex::Internal { edge, step });
                    levels.push(path_levels[step]);
                }
                vertices.push(n + ri);
                for (p, q) in spec.edges() {
                    edges.push((vertices[p], vertices[q]));
                }
                let mut section_starts = Vec::with_capacity(k);
                let mut pos = 1;
                for l in 1..=k {
                    section_starts.push(pos);
                    pos += if members.contains(&l) { 1 } else { 3 };
                }
                paths.push(PathInfo {
                    element: x,
                    tuple: ri,
                    members,
                    spec,
                    vertices,
                    section_starts,
                });
            }
        }
        let digraph = Digraph::new(names, edges).expect("gadget names are distinct");
        Ok(Self {
            template: a.clone(),
            k,
            digraph,
            tags,
            levels,
            paths,
        })
    }

    pub fn template(&self) -> &RelationalStructure {
        &self.template
    }

    pub fn relation(&self) -> &Relation {
        self.template.single_relation().expect("checked at build")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Height `k + 2`.
    pub fn height(&self) -> usize {
        self.k + 2
    }

    pub fn element_count(&self) -> usize {
        self.template.size()
    }

    pub fn tuple_count(&self) -> usize {
        self.relation().len()
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn vertex_count(&self) -> usize {
        self.digraph.vertex_count()
    }

    pub fn tags(&self) -> &[GadgetVertex] {
        &self.tags
    }

    pub fn tag(&self, v: usize) -> GadgetVertex {
        self.tags[v]
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn level(&self, v: usize) -> usize {
        self.levels[v]
    }

    pub fn paths(&self) -> &[PathInfo] {
        &self.paths
    }

    pub fn path(&self, edge: usize) -> &PathInfo {
        &self.paths[edge]
    }

    /// Index of `e = (a, r)` in `A×R`, element-major.
    pub fn edge_index(&self, element: usize, tuple: usize) -> usize {
        element * self.tuple_count() + tuple
    }

    pub fn element_vertex(&self, a: usize) -> usize {
        a
    }

    pub fn tuple_vertex(&self, r: usize) -> usize {
        self.element_count() + r
    }

    pub fn tuple(&self, r: usize) -> &[usize] {
        &self.relation().tuples()[r]
    }

    /// Every `(edge, position)` with the vertex on `P_edge`.
    pub fn occurrences(&self, v: usize) -> Vec<(usize, usize)> {
        match self.tags[v] {
            GadgetVertex::Element(a) => (0..self.tuple_count())
                .map(|r| (self.edge_index(a, r), 0))
                .collect(),
            GadgetVertex::Tuple(r) => (0..self.element_count())
                .map(|a| {
                    let e = self.edge_index(a, r);
                    (e, self.paths[e].len())
                })
                .collect(),
            GadgetVertex::Internal { edge, step } => vec![(edge, step)],
        }
    }

    /// The gadget as a structure with relation `E`.
    pub fn to_structure(&self) -> RelationalStructure {
        self.digraph
            .to_structure()
            .expect("gadget is a valid digraph")
    }
}

fn dot_id(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz text; vertices at equal level share a rank when levels are given.
pub fn to_dot(g: &Digraph, levels: Option<&[usize]>) -> String {
    let mut out = String::from("digraph G {\n  rankdir=BT;\n");
    for v in g.vertices() {
        let _ = writeln!(out, "  {};", dot_id(v));
    }
    for &(a, b) in g.edges() {
        let _ = writeln!(
            out,
            "  {} -> {};",
            dot_id(g.vertex_name(a)),
            dot_id(g.vertex_name(b))
        );
    }
    if let Some(levels) = levels {
        let top = levels.iter().copied().max().unwrap_or(0);
        for l in 0..=top {
            let members: Vec<String> = (0..g.vertex_count())
                .filter(|&v| levels[v] == l)
                .map(|v| dot_id(g.vertex_name(v)))
                .collect();
            if !members.is_empty() {
                let _ = writeln!(out, "  {{ rank=same; {} }}", members.join("; "));
            }
        }
    }
    out.push_str("}\n");
    out
}
