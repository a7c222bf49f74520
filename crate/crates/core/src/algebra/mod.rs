//! Operations, identities and polymorphism search.

mod endo;
pub mod identities;
mod search;
mod table;
pub mod zigzag;

use thiserror::Error;

pub use endo::{core_of, endomorphisms, is_core, report_taylor_and_width, TaylorReport};
pub use identities::{
    check_identities, CheckError, Counterexample, Identity, IdentitySystem, Term,
};
pub use search::{
    find_interpretations, find_polymorphism, find_wnu, Interpretations, DEFAULT_INDICATOR_BOUND,
};
pub use table::{first_violation, is_polymorphism, Operation, OperationTable};

use crate::solver::SolveError;
use crate::structures::StructureError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("indicator needs {size} items, above the bound {bound}")]
    TooLarge { size: u128, bound: usize },
    #[error("symbol `{symbol}` has arity {found}, expected {expected}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("a single-symbol search was given several symbols")]
    MultipleSymbols,
    #[error(transparent)]
    Identity(#[from] identities::IdentityError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("found operations fail verification: {0}")]
    Verification(CheckError),
}
