use super::LiftError;
use crate::algebra::is_polymorphism;
use crate::algebra::OperationTable;
use crate::gadget::{path_hom_exists, GadgetDigraph, GadgetVertex};
use crate::structures::apply_coordinatewise;

/// Extends an endomorphism `φ` of `A` to `D(A)`: elements by `φ`, tuples by
/// `φ` coordinatewise, and each path `P_e` onto `P_{φ(e)}` by the unique path
/// homomorphism.
pub fn lift_endomorphism(d: &GadgetDigraph, phi: &[usize]) -> Result<Vec<usize>, LiftError> {
    let n = d.element_count();
    let table =
        OperationTable::from_values(n, 1, phi.to_vec()).ok_or(LiftError::NotAnEndomorphism)?;
    if !is_polymorphism(d.template(), &table) {
        return Err(LiftError::NotAnEndomorphism);
    }
    let image_tuple = |r: usize| -> usize {
        let t = apply_coordinatewise(&table, &[d.tuple(r)]).expect("arity one");
        d.relation().position(&t).expect("endomorphisms preserve R")
    };
    let mut out = vec![0; d.vertex_count()];
    for (v, slot) in out.iter_mut().enumerate() {
        *slot = match d.tag(v) {
            GadgetVertex::Element(a) => d.element_vertex(phi[a]),
            GadgetVertex::Tuple(r) => d.tuple_vertex(image_tuple(r)),
            GadgetVertex::Internal { .. } => continue,
        };
    }
    for (e, p) in d.paths().iter().enumerate() {
        let target = d.path(d.edge_index(phi[p.element], image_tuple(p.tuple)));
        let map = path_hom_exists(&p.spec, &target.spec).expect("I ⊆ J for image paths");
        for (pos, &v) in p.vertices.iter().enumerate() {
            if matches!(d.tag(v), GadgetVertex::Internal { edge, .. } if edge == e) {
                out[v] = target.vertices[map[pos]];
            }
        }
    }
    Ok(out)
}
