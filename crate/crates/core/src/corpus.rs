//! Seeded random templates, instances and balanced digraphs for equivalence testing.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gadget::{build_q, GadgetDigraph};
use crate::structures::{Digraph, Relation, RelationalStructure};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn element_names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn random_relation(
    rng: &mut impl Rng,
    name: &str,
    n: usize,
    arity: usize,
    max_tuples: usize,
) -> Relation {
    let total = n.pow(arity as u32);
    let count = rng.gen_range(1..=max_tuples.min(total));
    let mut picked: Vec<usize> = (0..total).collect();
    picked.shuffle(rng);
    let tuples = picked[..count]
        .iter()
        .map(|&i| crate::structures::tuple_at(i, n, arity))
        .collect::<Vec<_>>();
    Relation::new(name, arity, tuples).expect("tuples drawn from the domain")
}

/// One nonempty relation `R` of arity `k` with `|R| ≤ max_tuples` over `0..n`.
pub fn random_template(
    rng: &mut impl Rng,
    n: usize,
    k: usize,
    max_tuples: usize,
) -> RelationalStructure {
    let relation = random_relation(rng, "R", n, k, max_tuples);
    RelationalStructure::new(element_names(n), vec![relation]).expect("valid structure")
}

/// Up to `max_relations` nonempty relations named `R0, R1, ...`.
pub fn random_multi_template(
    rng: &mut impl Rng,
    max_elements: usize,
    max_relations: usize,
    max_arity: usize,
    max_tuples: usize,
) -> RelationalStructure {
    let n = rng.gen_range(1..=max_elements);
    let relations = (0..rng.gen_range(1..=max_relations))
        .map(|i| {
            let arity = rng.gen_range(1..=max_arity);
            random_relation(rng, &format!("R{i}"), n, arity, max_tuples)
        })
        .collect();
    RelationalStructure::new(element_names(n), relations).expect("valid structure")
}

/// An instance over the signature of `a` with variables `v0, v1, ...`;
/// relations without constraints are left out.
pub fn random_instance(
    rng: &mut impl Rng,
    a: &RelationalStructure,
    max_variables: usize,
    max_constraints: usize,
) -> RelationalStructure {
    let n = rng.gen_range(1..=max_variables);
    let mut tuples: Vec<Vec<Vec<usize>>> = vec![Vec::new(); a.relations().len()];
    for _ in 0..rng.gen_range(0..=max_constraints) {
        let r = rng.gen_range(0..a.relations().len());
        let arity = a.relations()[r].arity();
        tuples[r].push((0..arity).map(|_| rng.gen_range(0..n)).collect());
    }
    let relations = a
        .relations()
        .iter()
        .zip(tuples)
        .filter(|(_, ts)| !ts.is_empty())
        .map(|(rel, ts)| Relation::new(rel.name(), rel.arity(), ts).expect("in range"))
        .collect();
    RelationalStructure::new((0..n).map(|i| format!("v{i}")).collect(), relations)
        .expect("valid structure")
}

fn named(n: usize, edges: BTreeSet<(usize, usize)>) -> Digraph {
    Digraph::new(
        (0..n).map(|i| format!("g{i}")).collect(),
        edges.into_iter().collect(),
    )
    .expect("edges in range")
}

/// A digraph that maps to `D(A)` by construction: a walk-grown tree over the
/// gadget plus chords between vertices whose images are adjacent. Each of the
/// `noise` extra edges joins two vertices whose images sit on consecutive
/// levels, which keeps the digraph balanced but may destroy the homomorphism.
pub fn planted_digraph(
    rng: &mut impl Rng,
    d: &GadgetDigraph,
    max_vertices: usize,
    noise: usize,
) -> Digraph {
    let g = d.digraph();
    let n = rng.gen_range(1..=max_vertices);
    let mut image = vec![rng.gen_range(0..g.vertex_count())];
    let mut edges = BTreeSet::new();
    while image.len() < n {
        // Mostly extend the newest vertex so walks can span whole paths.
        let u = if rng.gen_bool(0.7) {
            image.len() - 1
        } else {
            rng.gen_range(0..image.len())
        };
        let y = image[u];
        let forward = g.successors(y).len();
        let options = forward + g.predecessors(y).len();
        let v = image.len();
        if options == 0 {
            image.push(rng.gen_range(0..g.vertex_count()));
            continue;
        }
        let pick = rng.gen_range(0..options);
        if pick < forward {
            image.push(g.successors(y)[pick]);
            edges.insert((u, v));
        } else {
            image.push(g.predecessors(y)[pick - forward]);
            edges.insert((v, u));
        }
    }
    for _ in 0..rng.gen_range(0..=n / 4) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if g.has_edge(image[u], image[v]) {
            edges.insert((u, v));
        }
    }
    for _ in 0..noise {
        let u = rng.gen_range(0..n);
        let above: Vec<usize> = (0..n)
            .filter(|&v| d.level(image[v]) == d.level(image[u]) + 1)
            .collect();
        if let Some(&v) = above.choose(rng) {
            edges.insert((u, v));
        }
    }
    named(n, edges)
}

/// Copies of random `Q_I` (for arity `k`) strung between a few shared bottom
/// and top vertices; some copies lose their first or last vertex. `noise`
/// extra edges join random vertices on consecutive levels.
pub fn path_system_digraph(
    rng: &mut impl Rng,
    k: usize,
    max_vertices: usize,
    noise: usize,
) -> Digraph {
    let bases = rng.gen_range(1..=3);
    let tops = rng.gen_range(1..=3);
    let mut level: Vec<usize> = (0..bases)
        .map(|_| 0)
        .chain((0..tops).map(|_| k + 2))
        .collect();
    let mut edges = BTreeSet::new();
    for _ in 0..rng.gen_range(1..=6) {
        let members: Vec<usize> = (1..=k).filter(|_| rng.gen_bool(0.5)).collect();
        let spec = build_q(k, &members);
        let inner = spec.len() - 1;
        if level.len() + inner > max_vertices {
            break;
        }
        let start = level.len();
        let levels = spec.levels();
        level.extend(&levels[1..spec.len()]);
        let mut path: Vec<Option<usize>> = vec![None; spec.vertex_count()];
        for p in 1..spec.len() {
            path[p] = Some(start + p - 1);
        }
        match rng.gen_range(0..4) {
            0 => path[0] = Some(rng.gen_range(0..bases)),
            1 => path[spec.len()] = Some(bases + rng.gen_range(0..tops)),
            _ => {
                path[0] = Some(rng.gen_range(0..bases));
                path[spec.len()] = Some(bases + rng.gen_range(0..tops));
            }
        }
        for (p, q) in spec.edges() {
            if let (Some(u), Some(v)) = (path[p], path[q]) {
                edges.insert((u, v));
            }
        }
    }
    let n = level.len();
    for _ in 0..noise {
        let u = rng.gen_range(0..n);
        let above: Vec<usize> = (0..n).filter(|&v| level[v] == level[u] + 1).collect();
        if let Some(&v) = above.choose(rng) {
            edges.insert((u, v));
        }
    }
    named(n, edges)
}

/// Random levels in `0..=height` with each edge between consecutive levels
/// present with probability `density`.
pub fn random_balanced_digraph(
    rng: &mut impl Rng,
    max_vertices: usize,
    height: usize,
    density: f64,
) -> Digraph {
    let n = rng.gen_range(1..=max_vertices);
    let level: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=height)).collect();
    let mut edges = BTreeSet::new();
    for u in 0..n {
        for v in 0..n {
            if level[v] == level[u] + 1 && rng.gen_bool(density) {
                edges.insert((u, v));
            }
        }
    }
    named(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::build_d;
    use crate::structures::LevelAssignment;
    use crate::Solver;

    #[test]
    fn same_seed_same_corpus() {
        let a = random_multi_template(&mut rng(5), 3, 2, 2, 4);
        let b = random_multi_template(&mut rng(5), 3, 2, 2, 4);
        assert_eq!(a, b);
    }

    #[test]
    fn planted_digraphs_map_to_the_gadget() {
        let a = random_template(&mut rng(1), 2, 2, 2);
        let d = build_d(&a).unwrap();
        let target = d.to_structure();
        let mut r = rng(2);
        for _ in 0..20 {
            let g = planted_digraph(&mut r, &d, 12, 0);
            assert!(LevelAssignment::compute(&g).is_ok());
            let source = g.to_structure().unwrap();
            assert!(Solver::default().solve(&source, &target).unwrap().is_some());
        }
    }

    #[test]
    fn path_systems_are_balanced() {
        let mut r = rng(4);
        for _ in 0..20 {
            let g = path_system_digraph(&mut r, 2, 20, 2);
            assert!(g.vertex_count() <= 20);
            assert!(LevelAssignment::compute(&g).is_ok());
        }
    }

    #[test]
    fn random_digraphs_are_balanced() {
        let mut r = rng(3);
        for _ in 0..20 {
            let g = random_balanced_digraph(&mut r, 10, 3, 0.3);
            assert!(LevelAssignment::compute(&g).is_ok());
        }
    }
}
