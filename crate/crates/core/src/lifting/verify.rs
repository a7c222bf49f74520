use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{check_identities, CheckError, IdentitySystem, Operation};
use crate::gadget::GadgetDigraph;
use crate::structures::{power, tuple_at};

/// Outcome of checking that an operation maps edges of `D(A)^m` to edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolymorphismCheck {
    pub edge_tuples_checked: u64,
    pub exhaustive: bool,
    /// First `(c, d)` with `c → d` in the power but no edge between the images.
    pub violation: Option<(Vec<usize>, Vec<usize>)>,
}

impl PolymorphismCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for PolymorphismCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} edge tuples checked ({})",
            self.edge_tuples_checked,
            if self.exhaustive {
                "exhaustive"
            } else {
                "sampled"
            }
        )?;
        if let Some((c, d)) = &self.violation {
            write!(f, ", violated at {c:?} -> {d:?}")?;
        }
        Ok(())
    }
}

/// Checks edge preservation over every `m`-tuple of edges when there are at
/// most `limit` of them, otherwise over `limit` tuples drawn with `seed`.
pub fn verify_polymorphism<O: Operation + ?Sized>(
    d: &GadgetDigraph,
    op: &O,
    limit: u64,
    seed: u64,
) -> PolymorphismCheck {
    let edges = d.digraph().edges();
    let m = op.arity();
    let total = power(edges.len(), m);
    let exhaustive = total <= limit as u128;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = if exhaustive { total as u64 } else { limit };
    let g = d.digraph();
    let mut from = vec![0; m];
    let mut to = vec![0; m];
    for i in 0..count {
        let picks = if exhaustive {
            tuple_at(i as usize, edges.len(), m)
        } else {
            (0..m).map(|_| rng.gen_range(0..edges.len())).collect()
        };
        for (j, &p) in picks.iter().enumerate() {
            from[j] = edges[p].0;
            to[j] = edges[p].1;
        }
        if !g.has_edge(op.apply(&from), op.apply(&to)) {
            return PolymorphismCheck {
                edge_tuples_checked: i + 1,
                exhaustive,
                violation: Some((from, to)),
            };
        }
    }
    PolymorphismCheck {
        edge_tuples_checked: count,
        exhaustive,
        violation: None,
    }
}

/// Exhaustive identity check of lifted operations on `D(A)`.
pub fn verify_identities<O: Operation>(
    d: &GadgetDigraph,
    ops: &BTreeMap<String, O>,
    system: &IdentitySystem,
) -> Result<(), CheckError> {
    check_identities(ops, system, d.vertex_count())
}
