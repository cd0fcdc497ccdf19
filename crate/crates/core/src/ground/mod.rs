//! Ground satisfiability over EUF with numeral evaluation.

mod cc;
mod dpll;

pub use cc::{eval_numeral_atom, CcResult, CongruenceState, LitTag};
pub use dpll::{
    solve_ground, solve_ground_with_stats, GroundClause, GroundConfig, GroundModel, GroundOutcome, GroundStats,
};
