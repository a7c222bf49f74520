//! The zigzag `00 → 01 ← 10 → 11` and its named polymorphisms.

use std::collections::BTreeMap;

use super::table::{is_polymorphism, OperationTable};
use crate::structures::RelationalStructure;

pub const Z00: usize = 0;
pub const Z01: usize = 1;
pub const Z10: usize = 2;
pub const Z11: usize = 3;

/// The zigzag as a structure; element indices follow the path order.
pub fn zigzag() -> RelationalStructure {
    RelationalStructure::from_names(
        &["00", "01", "10", "11"],
        &[("E", &[&["00", "01"], &["10", "01"], &["10", "11"]])],
    )
    .expect("zigzag is well formed")
}

pub fn meet(x: usize, y: usize) -> usize {
    x.min(y)
}

pub fn join(x: usize, y: usize) -> usize {
    x.max(y)
}

pub fn median(x: usize, y: usize, z: usize) -> usize {
    join(join(meet(x, y), meet(x, z)), meet(y, z))
}

pub fn p1(x: usize, y: usize, z: usize) -> usize {
    let has = |v| x == v || y == v || z == v;
    if has(Z01) && y != z {
        Z01
    } else if has(Z10) && !has(Z01) && y != z {
        Z10
    } else {
        x
    }
}

pub fn p2(x: usize, y: usize, z: usize) -> usize {
    let has = |v| x == v || y == v || z == v;
    if has(Z01) && x != y {
        Z01
    } else if has(Z10) && !has(Z01) && x != y {
        Z10
    } else if x == y {
        z
    } else {
        x
    }
}

/// Tables for `meet`, `join`, `median`, `p1`, `p2`, each checked to preserve the zigzag.
pub fn zigzag_builtins() -> BTreeMap<String, OperationTable> {
    let z = zigzag();
    let tables = [
        ("meet", OperationTable::from_fn(4, 2, |a| meet(a[0], a[1]))),
        ("join", OperationTable::from_fn(4, 2, |a| join(a[0], a[1]))),
        (
            "median",
            OperationTable::from_fn(4, 3, |a| median(a[0], a[1], a[2])),
        ),
        (
            "p1",
            OperationTable::from_fn(4, 3, |a| p1(a[0], a[1], a[2])),
        ),
        (
            "p2",
            OperationTable::from_fn(4, 3, |a| p2(a[0], a[1], a[2])),
        ),
    ];
    tables
        .into_iter()
        .map(|(name, t)| {
            assert!(
                is_polymorphism(&z, &t),
                "{name} does not preserve the zigzag"
            );
            (name.to_string(), t)
        })
        .collect()
}

/// The `m`-ary meet of all arguments; satisfies every balanced identity.
pub fn meet_table(m: usize) -> OperationTable {
    OperationTable::from_fn(4, m, |a| a.iter().copied().min().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::identities::{check_identities, majority, three_permutability};

    #[test]
    fn meet_prefers_the_end_near_00() {
        assert_eq!(meet(Z01, Z10), Z01);
        assert_eq!(join(Z01, Z10), Z10);
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(median(x, x, y), x);
                assert_eq!(p1(x, y, y), x);
            }
        }
    }

    #[test]
    fn builtins_satisfy_their_identities() {
        let b = zigzag_builtins();
        let m = BTreeMap::from([("m".to_string(), b["median"].clone())]);
        assert!(check_identities(&m, &majority(), 4).is_ok());
        let p = BTreeMap::from([
            ("p1".to_string(), b["p1"].clone()),
            ("p2".to_string(), b["p2"].clone()),
        ]);
        assert!(check_identities(&p, &three_permutability(), 4).is_ok());
        assert!(is_polymorphism(&zigzag(), &meet_table(4)));
    }
}
