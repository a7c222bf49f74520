//! Polymorphism search through the indicator structure `A^m → A`.

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;

use super::identities::{self, check_identities, IdentitySystem, Term};
use super::table::{is_polymorphism, OperationTable};
use super::AlgebraError;
use crate::solver::{HomInstance, Solver};
use crate::structures::{power, tuple_at, tuple_index, Relation, RelationalStructure};

/// Symbol name to operation table.
pub type Interpretations = BTreeMap<String, OperationTable>;

/// Default bound on indicator size (cells and relation tuples).
pub const DEFAULT_INDICATOR_BOUND: usize = 1 << 20;

struct Layout {
    n: usize,
    offsets: Vec<usize>,
    total: usize,
}

impl Layout {
    fn cell(&self, symbol: usize, args: &[usize]) -> usize {
        self.offsets[symbol] + tuple_index(args, self.n)
    }
}

fn pin_cell(pins: &mut [Option<usize>], cell: usize, value: usize) -> bool {
    match pins[cell] {
        Some(v) if v != value => false,
        _ => {
            pins[cell] = Some(value);
            true
        }
    }
}

enum Side {
    Cell(usize),
    Value(usize),
}

/// Searches jointly for interpretations of every symbol of `system` on `a`
/// satisfying all identities and preserving all relations.
pub fn find_interpretations(
    a: &RelationalStructure,
    system: &IdentitySystem,
    solver: &Solver,
    bound: usize,
) -> Result<Option<Interpretations>, AlgebraError> {
    let n = a.size();
    let symbols = system.symbols();
    if symbols.is_empty() {
        return Ok(Some(Interpretations::new()));
    }
    let mut offsets = Vec::with_capacity(symbols.len());
    let mut total: u128 = 0;
    for (_, arity) in symbols {
        offsets.push(total as usize);
        total += power(n, *arity);
        for rel in a.relations() {
            let tuples = power(rel.len(), *arity);
            if tuples > bound as u128 {
                return Err(AlgebraError::TooLarge {
                    size: tuples,
                    bound,
                });
            }
        }
        if total > bound as u128 {
            return Err(AlgebraError::TooLarge { size: total, bound });
        }
    }
    let layout = Layout {
        n,
        offsets,
        total: total as usize,
    };
    let symbol_index = |name: &str| symbols.iter().position(|(s, _)| s == name).unwrap();

    let mut uf = UnionFind::<usize>::new(layout.total);
    let mut pins: Vec<Option<usize>> = vec![None; layout.total];
    let mut args = Vec::new();
    for identity in system.expanded_identities() {
        let vars = identity.variables();
        for idx in 0..power(n, vars.len()) as usize {
            let values = tuple_at(idx, n, vars.len());
            let value_of = |name: &str| values[vars.iter().position(|v| v == name).unwrap()];
            let mut side = |t: &Term| match t {
                Term::Var(v) => Side::Value(value_of(v)),
                Term::App {
                    symbol,
                    args: names,
                } => {
                    args.clear();
                    args.extend(names.iter().map(|x| value_of(x)));
                    Side::Cell(layout.cell(symbol_index(symbol), &args))
                }
            };
            let l = side(&identity.lhs);
            let r = side(&identity.rhs);
            let consistent = match (l, r) {
                (Side::Value(x), Side::Value(y)) => x == y,
                (Side::Cell(c), Side::Value(v)) | (Side::Value(v), Side::Cell(c)) => {
                    pin_cell(&mut pins, c, v)
                }
                (Side::Cell(c), Side::Cell(d)) => {
                    uf.union(c, d);
                    true
                }
            };
            if !consistent {
                return Ok(None);
            }
        }
    }

    // Quotient: one solver variable per union-find class.
    let mut class_of = vec![usize::MAX; layout.total];
    let mut reps: Vec<usize> = Vec::new();
    let mut class_pin: Vec<Option<usize>> = Vec::new();
    for cell in 0..layout.total {
        let root = uf.find(cell);
        if class_of[root] == usize::MAX {
            class_of[root] = reps.len();
            reps.push(root);
            class_pin.push(None);
        }
        let class = class_of[root];
        class_of[cell] = class;
        if let Some(v) = pins[cell] {
            match class_pin[class] {
                Some(w) if w != v => return Ok(None),
                _ => class_pin[class] = Some(v),
            }
        }
    }

    let mut relations = Vec::with_capacity(a.relations().len());
    for rel in a.relations() {
        let mut tuples = Vec::new();
        for (si, (_, arity)) in symbols.iter().enumerate() {
            let r = rel.len();
            let mut column = vec![0; *arity];
            for choice in 0..power(r, *arity) as usize {
                let picks = tuple_at(choice, r, *arity);
                let row: Vec<usize> = (0..rel.arity())
                    .map(|j| {
                        for (c, &p) in column.iter_mut().zip(&picks) {
                            *c = rel.tuples()[p][j];
                        }
                        class_of[layout.cell(si, &column)]
                    })
                    .collect();
                tuples.push(row);
            }
        }
        if !tuples.is_empty() {
            relations.push(Relation::new(rel.name(), rel.arity(), tuples)?);
        }
    }
    let names = (0..reps.len()).map(|i| format!("c{i}")).collect();
    let indicator = RelationalStructure::new(names, relations)?;
    let mut inst = HomInstance::new(&indicator, a)?;
    for (class, pin) in class_pin.iter().enumerate() {
        if let Some(v) = pin {
            inst.pin(class, *v)?;
        }
    }
    let Some(solution) = solver.find(&inst)? else {
        return Ok(None);
    };

    let mut out = Interpretations::new();
    for (si, (name, arity)) in symbols.iter().enumerate() {
        let values = (0..power(n, *arity) as usize)
            .map(|i| solution[class_of[layout.offsets[si] + i]])
            .collect();
        let table = OperationTable::from_values(n, *arity, values).expect("solver values in range");
        assert!(
            is_polymorphism(a, &table),
            "indicator solution for `{name}` is not a polymorphism"
        );
        out.insert(name.clone(), table);
    }
    check_identities(&out, system, n).map_err(AlgebraError::Verification)?;
    Ok(Some(out))
}

/// Finds an `m`-ary polymorphism satisfying the identities of `system`, which
/// must mention at most one symbol of arity `m`.
pub fn find_polymorphism(
    a: &RelationalStructure,
    m: usize,
    system: &IdentitySystem,
    solver: &Solver,
    bound: usize,
) -> Result<Option<OperationTable>, AlgebraError> {
    let mut system = system.clone();
    let symbol = match system.symbols() {
        [] => {
            system.declare("f", m)?;
            "f".to_string()
        }
        [(s, arity)] if *arity == m => s.clone(),
        [(s, arity)] => {
            return Err(AlgebraError::ArityMismatch {
                symbol: s.clone(),
                expected: m,
                found: *arity,
            })
        }
        _ => return Err(AlgebraError::MultipleSymbols),
    };
    Ok(find_interpretations(a, &system, solver, bound)?.map(|mut i| i.remove(&symbol).unwrap()))
}

/// Finds an `m`-ary weak near-unanimity polymorphism.
pub fn find_wnu(
    a: &RelationalStructure,
    m: usize,
    solver: &Solver,
    bound: usize,
) -> Result<Option<OperationTable>, AlgebraError> {
    find_polymorphism(a, m, &identities::wnu(m), solver, bound)
}
