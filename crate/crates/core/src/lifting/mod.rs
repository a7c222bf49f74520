//! Operations on `D(A)` induced by operations on `A`.

mod diagonal;
mod endo;
mod general;
mod order;
mod verify;
mod wnu;

use thiserror::Error;

pub use diagonal::{common_section, in_diagonal_component};
pub use endo::lift_endomorphism;
pub use general::{check_lift_preconditions, lift_general, lift_general_auto, LiftedOperation};
pub use order::{EpsilonOrder, GadgetOrder};
pub use verify::{verify_identities, verify_polymorphism, PolymorphismCheck};
pub use wnu::{lift_wnu, LiftedWnu};

use crate::algebra::AlgebraError;

/// Default number of edge tuples above which verification samples.
pub const DEFAULT_VERIFY_LIMIT: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("map is not an endomorphism of the template")]
    NotAnEndomorphism,
    #[error("WNU arity must be at least 3, got {0}")]
    ArityTooSmall(usize),
    #[error("`{0}` is not a polymorphism")]
    NotAPolymorphism(String),
    #[error("symbol `{0}` is not marked idempotent")]
    NotIdempotent(String),
    #[error("identity `{0}` is neither balanced nor in at most two variables")]
    UnbalancedIdentity(String),
    #[error("identities fail on the template: {0}")]
    IdentitiesFailOnTemplate(String),
    #[error("identities fail on the zigzag: {0}")]
    IdentitiesFailOnZigzag(String),
    #[error("the zigzag has no polymorphisms satisfying the identities")]
    NoZigzagInterpretation,
    #[error("the template has no polymorphisms satisfying the identities")]
    NoTemplateInterpretation,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
