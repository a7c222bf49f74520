use std::fmt;

use crate::structures::{power, tuple_at, tuple_index, RelationalStructure};

/// Something that can be evaluated on argument tuples of a fixed length.
pub trait Operation {
    fn arity(&self) -> usize;
    fn apply(&self, args: &[usize]) -> usize;
}

impl<T: Operation + ?Sized> Operation for &T {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn apply(&self, args: &[usize]) -> usize {
        (**self).apply(args)
    }
}

impl<T: Operation + ?Sized> Operation for Box<T> {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn apply(&self, args: &[usize]) -> usize {
        (**self).apply(args)
    }
}

/// A total operation `{0..n}^arity → {0..n}` stored in lexicographic argument order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OperationTable {
    n: usize,
    arity: usize,
    values: Vec<usize>,
}

impl fmt::Debug for OperationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "OperationTable(n={}, arity={}, {:?})",
            self.n, self.arity, self.values
        )
    }
}

impl OperationTable {
    pub fn from_fn(n: usize, arity: usize, f: impl Fn(&[usize]) -> usize) -> Self {
        let size = power(n, arity) as usize;
        let values = (0..size)
            .map(|i| {
                let v = f(&tuple_at(i, n, arity));
                assert!(v < n, "operation value {v} outside domain of size {n}");
                v
            })
            .collect();
        Self { n, arity, values }
    }

    /// `None` when `values` has the wrong length or leaves the domain.
    pub fn from_values(n: usize, arity: usize, values: Vec<usize>) -> Option<Self> {
        (values.len() as u128 == power(n, arity) && values.iter().all(|&v| v < n)).then_some(Self {
            n,
            arity,
            values,
        })
    }

    pub fn projection(n: usize, arity: usize, coordinate: usize) -> Self {
        Self::from_fn(n, arity, |args| args[coordinate])
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn get(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        self.values[tuple_index(args, self.n)]
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.n).all(|a| self.get(&vec![a; self.arity]) == a)
    }

    /// Rows `(args, value)` in lexicographic order.
    pub fn rows(&self) -> impl Iterator<Item = (Vec<usize>, usize)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (tuple_at(i, self.n, self.arity), v))
    }
}

impl Operation for OperationTable {
    fn arity(&self) -> usize {
        self.arity
    }

    fn apply(&self, args: &[usize]) -> usize {
        self.get(args)
    }
}

/// Does `op` preserve every relation of `a`? Checks all `|R|^m` tuple choices.
pub fn is_polymorphism<O: Operation + ?Sized>(a: &RelationalStructure, op: &O) -> bool {
    first_violation(a, op).is_none()
}

/// First choice of relation tuples whose coordinatewise image leaves the relation.
pub fn first_violation<O: Operation + ?Sized>(
    a: &RelationalStructure,
    op: &O,
) -> Option<(String, Vec<Vec<usize>>)> {
    let m = op.arity();
    let mut column = vec![0; m];
    for rel in a.relations() {
        let r = rel.len();
        let total = power(r, m);
        let mut image = vec![0; rel.arity()];
        for choice in 0..total as usize {
            let picks = tuple_at(choice, r, m);
            for (j, slot) in image.iter_mut().enumerate() {
                for (c, &p) in column.iter_mut().zip(&picks) {
                    *c = rel.tuples()[p][j];
                }
                *slot = op.apply(&column);
            }
            if !rel.contains(&image) {
                let rows = picks.iter().map(|&p| rel.tuples()[p].clone()).collect();
                return Some((rel.name().to_string(), rows));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_and_rows() {
        let p = OperationTable::projection(2, 3, 0);
        assert!(p.is_idempotent());
        assert_eq!(p.get(&[1, 0, 0]), 1);
        assert_eq!(p.rows().count(), 8);
        assert!(OperationTable::from_values(2, 1, vec![0, 2]).is_none());
    }

    #[test]
    fn swap_is_polymorphism_of_two_cycle() {
        let a = RelationalStructure::from_names(&["0", "1"], &[("E", &[&["0", "1"], &["1", "0"]])])
            .unwrap();
        let swap = OperationTable::from_fn(2, 1, |x| 1 - x[0]);
        assert!(is_polymorphism(&a, &swap));
        let constant = OperationTable::from_fn(2, 1, |_| 0);
        assert!(!is_polymorphism(&a, &constant));
    }
}
