//! Instantiation-based solving of quantified EUF problems with a learned
//! quantifier-admission gate.

pub mod features;
pub mod frontend;
pub mod gbdt;
pub mod ground;
pub mod guidance;
pub mod harness;
pub mod inst;
pub mod solver;
pub mod term;

pub use frontend::{ClausalProblem, Problem};
pub use guidance::{AdmissionGate, Status, Threshold};
pub use solver::{load_problem, run_with_gate, solve, SolveConfig, Verdict};
pub use term::{Kind, Quantifier, SortId, SymbolId, TermError, TermId, TermStore};
