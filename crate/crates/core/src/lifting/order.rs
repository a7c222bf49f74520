use crate::gadget::GadgetDigraph;

/// The linear order `⪯` on `A×R` that `ε` and `⊑` are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EpsilonOrder {
    /// `(a, r)` by element index, then by the position of `r` in the sorted relation.
    #[default]
    ElementMajor,
    /// `(a, r)` by tuple, then element.
    TupleMajor,
}

/// The order `⊑` on gadget vertices and the map `ε` to `A×R`.
#[derive(Debug, Clone)]
pub struct GadgetOrder {
    policy: EpsilonOrder,
    n_elements: usize,
    n_tuples: usize,
    epsilon: Vec<usize>,
    keys: Vec<(usize, usize, usize)>,
}

impl GadgetOrder {
    pub fn new(d: &GadgetDigraph, policy: EpsilonOrder) -> Self {
        let mut order = Self {
            policy,
            n_elements: d.element_count(),
            n_tuples: d.tuple_count(),
            epsilon: Vec::with_capacity(d.vertex_count()),
            keys: Vec::with_capacity(d.vertex_count()),
        };
        for v in 0..d.vertex_count() {
            let level = d.level(v);
            let (e, pos) = d
                .occurrences(v)
                .into_iter()
                .min_by_key(|&(e, _)| order.rank(e))
                .expect("every vertex lies on a path");
            order.epsilon.push(e);
            order.keys.push((level, order.rank(e), pos));
        }
        order
    }

    pub fn policy(&self) -> EpsilonOrder {
        self.policy
    }

    /// Position of `e` (an element-major index into `A×R`) under `⪯`.
    pub fn rank(&self, e: usize) -> usize {
        match self.policy {
            EpsilonOrder::ElementMajor => e,
            EpsilonOrder::TupleMajor => {
                let (a, r) = (e / self.n_tuples, e % self.n_tuples);
                r * self.n_elements + a
            }
        }
    }

    /// `ε(v)`: the `⪯`-least `e` whose path contains `v`.
    pub fn epsilon(&self, v: usize) -> usize {
        self.epsilon[v]
    }

    /// Sort key: level, rank of `ε`, then distance from the start of `P_ε`.
    pub fn key(&self, v: usize) -> (usize, usize, usize) {
        self.keys[v]
    }

    /// `⊑`-least vertex of a nonempty set.
    pub fn min_of(&self, vertices: impl IntoIterator<Item = usize>) -> usize {
        vertices
            .into_iter()
            .min_by_key(|&v| self.keys[v])
            .expect("minimum of an empty set")
    }
}
