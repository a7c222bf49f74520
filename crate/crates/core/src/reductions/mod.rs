//! Instance translations between `CSP(A)` and `CSP(D(A))`.

mod backward;
mod forward;

use std::collections::HashSet;

use thiserror::Error;

pub use backward::{
    analyse_internal_components, backward_reduce, compute_levels, eliminate_short_components,
    gamma, materialize, stage_3a, stage_3b, Answer, GeneralizedHyperedge, InternalComponent,
    LevelFailure, ReductionOutcome, ShortElimination, Stage3A, Stage3B,
};
pub use forward::forward_translate;

use crate::gadget::GadgetError;
use crate::solver::SolveError;
use crate::structures::StructureError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("instance relation `{0}` does not occur in the template")]
    UnknownRelation(String),
    #[error("instance relation `{name}` has arity {found}, template arity is {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("template must have exactly one relation")]
    NotSingleRelation,
    #[error("hyperedge {index} has {found} entries, expected {expected}")]
    EntryCount {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("hyperedge {0} has an empty entry")]
    EmptyEntry(usize),
    #[error("no hyperedges to build an instance from")]
    NoHyperedges,
    #[error("template is trivial: every instance is satisfiable, so no NO instance exists")]
    TemplateTrivial,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

/// Hands out names of the form `{prefix}{n}` avoiding a reserved set.
#[derive(Debug, Clone)]
pub struct FreshNames {
    used: HashSet<String>,
    counter: usize,
}

impl FreshNames {
    pub fn new<'a>(reserved: impl IntoIterator<Item = &'a String>) -> Self {
        Self {
            used: reserved.into_iter().cloned().collect(),
            counter: 0,
        }
    }

    pub fn next(&mut self, prefix: &str) -> String {
        loop {
            self.counter += 1;
            let name = format!("{prefix}{}", self.counter);
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}
