use crate::gadget::{GadgetDigraph, GadgetVertex};

/// Is `c` in the weak component of the diagonal of `D(A)^m`?
///
/// Same-level tuples outside that component are isolated, so it suffices to
/// test for one neighbour in the power.
pub fn in_diagonal_component(d: &GadgetDigraph, c: &[usize]) -> bool {
    let Some(&first) = c.first() else {
        return true;
    };
    let level = d.level(first);
    if c.iter().any(|&v| d.level(v) != level) {
        return false;
    }
    if level == 0 || level == d.height() {
        return true;
    }
    let g = d.digraph();
    c.iter().all(|&v| !g.successors(v).is_empty())
        || c.iter().all(|&v| !g.predecessors(v).is_empty())
}

/// For tuples of internal vertices: the path of each coordinate and the
/// least section `l` (1-based) containing every coordinate.
pub fn common_section(d: &GadgetDigraph, c: &[usize]) -> Option<(Vec<(usize, usize)>, usize)> {
    let mut placed = Vec::with_capacity(c.len());
    for &v in c {
        match d.tag(v) {
            GadgetVertex::Internal { edge, step } => placed.push((edge, step)),
            _ => return None,
        }
    }
    (1..=d.k())
        .find(|&l| {
            placed
                .iter()
                .all(|&(e, pos)| d.path(e).section_positions(l).contains(&pos))
        })
        .map(|l| (placed, l))
}

/// Whether section `l` is also valid for all coordinates (a seam shared with `l - 1`).
pub fn section_contains_all(d: &GadgetDigraph, placed: &[(usize, usize)], l: usize) -> bool {
    l >= 1
        && l <= d.k()
        && placed
            .iter()
            .all(|&(e, pos)| d.path(e).section_positions(l).contains(&pos))
}
