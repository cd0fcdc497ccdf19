//! Input reading and clausal normalisation.

mod clausify;
mod parser;

pub use clausify::{
    clausify, clausify_with_budget, ClausalProblem, Clause, ClausifyError, QuantifiedClause, DEFAULT_CLAUSE_BUDGET,
};
pub use parser::{parse, ParseError, Problem};
