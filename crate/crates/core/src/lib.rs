//! Gadget reductions from general CSPs to digraph CSPs and the algebra around them.

pub mod algebra;
pub mod corpus;
pub mod format;
pub mod gadget;
pub mod lifting;
pub mod reductions;
pub mod selftest;
pub mod solver;
pub mod structures;

pub use gadget::{build_d, GadgetDigraph, GadgetVertex};
pub use solver::{HomInstance, SolveError, Solver};
pub use structures::{Digraph, RelationalStructure};
