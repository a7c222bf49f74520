//! Endomorphisms, cores and bounded-arity Taylor reports.

use std::fmt;

use super::search::find_wnu;
use super::AlgebraError;
use crate::solver::{HomInstance, Solver};
use crate::structures::RelationalStructure;

/// All endomorphisms of `a` in canonical order.
pub fn endomorphisms(
    a: &RelationalStructure,
    solver: &Solver,
) -> Result<Vec<Vec<usize>>, AlgebraError> {
    let inst = HomInstance::new(a, a)?;
    Ok(solver.enumerate(&inst, usize::MAX)?)
}

/// True iff every endomorphism is surjective. Searches for a non-surjective
/// endomorphism one missing value at a time instead of enumerating.
pub fn is_core(a: &RelationalStructure, solver: &Solver) -> Result<bool, AlgebraError> {
    for missing in 0..a.size() {
        let mut inst = HomInstance::new(a, a)?;
        let others: Vec<usize> = (0..a.size()).filter(|&v| v != missing).collect();
        for x in 0..a.size() {
            inst.restrict(x, &others)?;
        }
        if solver.exists(&inst)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A core of `a` as an induced substructure, built by repeatedly retracting
/// onto a smaller image.
pub fn core_of(
    a: &RelationalStructure,
    solver: &Solver,
) -> Result<RelationalStructure, AlgebraError> {
    let mut current = a.clone();
    'shrink: loop {
        for missing in 0..current.size() {
            let keep: Vec<usize> = (0..current.size()).filter(|&v| v != missing).collect();
            let Some(smaller) = current.induced(&keep) else {
                continue;
            };
            if solver.solve(&current, &smaller)?.is_some() {
                current = smaller;
                continue 'shrink;
            }
        }
        break;
    }
    debug_assert!(is_core(&current, solver)?);
    Ok(current)
}

/// WNU existence per arity, a bounded-arity approximation of Taylor and bounded width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaylorReport {
    pub is_core: bool,
    pub wnu_by_arity: Vec<(usize, bool)>,
}

impl TaylorReport {
    pub fn taylor_witness_found(&self) -> bool {
        self.wnu_by_arity.iter().any(|&(_, ok)| ok)
    }

    pub fn bounded_width_indicator(&self) -> bool {
        !self.wnu_by_arity.is_empty() && self.wnu_by_arity.iter().all(|&(_, ok)| ok)
    }
}

impl fmt::Display for TaylorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.is_core {
            writeln!(f, "warning: template is not a core")?;
        }
        for (m, ok) in &self.wnu_by_arity {
            writeln!(f, "wnu arity {m}: {}", if *ok { "found" } else { "none" })?;
        }
        writeln!(
            f,
            "taylor witness found: {}",
            if self.taylor_witness_found() {
                "yes"
            } else {
                "no"
            }
        )?;
        write!(
            f,
            "bounded-width indicator (arities 3..={} only): {}",
            self.wnu_by_arity.last().map_or(2, |&(m, _)| m),
            if self.bounded_width_indicator() {
                "yes"
            } else {
                "no"
            }
        )
    }
}

pub fn report_taylor_and_width(
    a: &RelationalStructure,
    max_arity: usize,
    solver: &Solver,
    bound: usize,
) -> Result<TaylorReport, AlgebraError> {
    let mut wnu_by_arity = Vec::new();
    for m in 3..=max_arity {
        wnu_by_arity.push((m, find_wnu(a, m, solver, bound)?.is_some()));
    }
    Ok(TaylorReport {
        is_core: is_core(a, solver)?,
        wnu_by_arity,
    })
}
