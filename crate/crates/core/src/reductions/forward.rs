use super::{FreshNames, ReductionError};
use crate::gadget::build_q;
use crate::structures::{collapse_to_single_relation, Digraph, RelationalStructure};

struct Builder {
    names: Vec<String>,
    edges: Vec<(usize, usize)>,
    fresh: FreshNames,
    k: usize,
}

impl Builder {
    fn vertex(&mut self, prefix: &str) -> usize {
        self.names.push(self.fresh.next(prefix));
        self.names.len() - 1
    }

    /// A fresh copy of `Q_members` from `from` to `to`.
    fn attach(&mut self, from: usize, to: usize, members: &[usize]) {
        let spec = build_q(self.k, members);
        let mut path = vec![from];
        for _ in 1..spec.len() {
            path.push(self.vertex("q"));
        }
        path.push(to);
        for (p, q) in spec.edges() {
            self.edges.push((path[p], path[q]));
        }
    }
}

/// Translates an instance `X` of `CSP(A)` into a digraph `G` with
/// `X → A` iff `G → D(collapse(A))`.
///
/// Every constraint is first padded with fresh variables to the collapsed
/// relation; then each constraint `(x_1..x_k)` gets a fresh top `y` joined to
/// every `x_i` by a fresh copy of `Q_{i}`. Variables in no constraint get a
/// copy of `Q_∅` to a fresh top.
pub fn forward_translate(
    x: &RelationalStructure,
    a: &RelationalStructure,
) -> Result<Digraph, ReductionError> {
    let collapsed = collapse_to_single_relation(a);
    let k = collapsed.arity();
    for rel in x.relations() {
        let block = collapsed
            .block(rel.name())
            .ok_or_else(|| ReductionError::UnknownRelation(rel.name().to_string()))?;
        if block.arity != rel.arity() {
            return Err(ReductionError::ArityMismatch {
                name: rel.name().to_string(),
                expected: block.arity,
                found: rel.arity(),
            });
        }
    }

    let mut b = Builder {
        names: x.elements().to_vec(),
        edges: Vec::new(),
        fresh: FreshNames::new(x.elements()),
        k,
    };
    let mut constrained = vec![false; x.size()];
    let mut constraints: Vec<Vec<usize>> = Vec::new();
    for rel in x.relations() {
        let block = collapsed.block(rel.name()).expect("checked above");
        for t in rel.tuples() {
            let mut scope = Vec::with_capacity(k);
            for pos in 0..k {
                if (block.offset..block.offset + block.arity).contains(&pos) {
                    let v = t[pos - block.offset];
                    constrained[v] = true;
                    scope.push(v);
                } else {
                    scope.push(b.vertex("pad"));
                }
            }
            constraints.push(scope);
        }
    }
    for scope in &constraints {
        let top = b.vertex("top");
        for (i, &v) in scope.iter().enumerate() {
            b.attach(v, top, &[i + 1]);
        }
    }
    for v in (0..x.size()).filter(|&v| !constrained[v]) {
        let top = b.vertex("top");
        b.attach(v, top, &[]);
    }
    Ok(Digraph::new(b.names, b.edges)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_constraint_over_two_cycle() {
        let a = RelationalStructure::from_names(&["0", "1"], &[("E", &[&["0", "1"], &["1", "0"]])])
            .unwrap();
        let x = RelationalStructure::from_names(&["x1", "x2"], &[("E", &[&["x1", "x2"]])]).unwrap();
        let g = forward_translate(&x, &a).unwrap();
        assert_eq!(g.vertex_count(), 13);
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn unconstrained_variable_gets_a_plain_path() {
        let a = RelationalStructure::from_names(&["0", "1"], &[("E", &[&["0", "1"]])]).unwrap();
        let x = RelationalStructure::new(vec!["v".into()], vec![]).unwrap();
        let g = forward_translate(&x, &a).unwrap();
        // Q_∅ for k = 2 has 2 + 3·2 = 8 edges.
        assert_eq!(g.edge_count(), 8);
        assert_eq!(g.vertex_count(), 9);
    }

    #[test]
    fn fresh_names_avoid_instance_names() {
        let a = RelationalStructure::from_names(&["0", "1"], &[("E", &[&["0", "1"]])]).unwrap();
        let x =
            RelationalStructure::from_names(&["top1", "q2"], &[("E", &[&["top1", "q2"]])]).unwrap();
        let g = forward_translate(&x, &a).unwrap();
        assert_eq!(g.vertex_index("top1"), Some(0));
        assert_eq!(g.vertex_index("q2"), Some(1));
    }

    #[test]
    fn unknown_relation_is_rejected() {
        let a = RelationalStructure::from_names(&["0"], &[("E", &[&["0", "0"]])]).unwrap();
        let x = RelationalStructure::from_names(&["v"], &[("F", &[&["v"]])]).unwrap();
        assert!(matches!(
            forward_translate(&x, &a),
            Err(ReductionError::UnknownRelation(_))
        ));
    }
}
