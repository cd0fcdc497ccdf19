//! Normalisation to clausal form: NNF, outer skolemization, CNF by
//! distribution, and universal closure of each clause.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::parser::Problem;
use crate::term::{Kind, Quantifier, TermError, TermId, TermStore};

pub const DEFAULT_CLAUSE_BUDGET: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClausifyError {
    #[error("clause distribution exceeded the budget of {budget} clauses")]
    BlowupGuard { budget: usize },
    #[error(transparent)]
    Term(#[from] TermError),
}

/// A disjunction of ground literals. A literal is an atom or `NOT atom`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<TermId>,
    /// Index of the asserted formula this clause came from.
    pub origin: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantifiedClause {
    pub quantifier: Quantifier,
    pub origin: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClausalProblem {
    pub problem: Problem,
    pub ground_clauses: Vec<Clause>,
    pub quantified: Vec<QuantifiedClause>,
}

impl ClausalProblem {
    pub fn name(&self) -> &str {
        &self.problem.name
    }
}

pub fn clausify(store: &mut TermStore, problem: &Problem) -> Result<ClausalProblem, ClausifyError> {
    clausify_with_budget(store, problem, DEFAULT_CLAUSE_BUDGET)
}

pub fn clausify_with_budget(
    store: &mut TermStore,
    problem: &Problem,
    budget: usize,
) -> Result<ClausalProblem, ClausifyError> {
    let mut out = ClausalProblem {
        problem: problem.clone(),
        ground_clauses: Vec::new(),
        quantified: Vec::new(),
    };
    let mut seen_ground = HashSet::new();
    let mut seen_quant = HashSet::new();
    let mut total = 0usize;
    for (origin, &f) in problem.asserted.iter().enumerate() {
        let nnf = to_nnf(store, f, true)?;
        let matrix = skolemize(store, nnf, &mut Vec::new(), &mut HashMap::new())?;
        let clauses = cnf(store, matrix, budget.saturating_sub(total), budget)?;
        total += clauses.len();
        for lits in clauses {
            let mut vars: Vec<TermId> = lits.iter().flat_map(|&l| store.free_vars(l).to_vec()).collect();
            vars.sort();
            vars.dedup();
            if vars.is_empty() {
                if seen_ground.insert(lits.clone()) {
                    out.ground_clauses.push(Clause { literals: lits, origin });
                }
                continue;
            }
            let body = if lits.len() == 1 {
                lits[0]
            } else {
                store.mk_term(Kind::Or, None, &lits)?
            };
            let mut children = vars;
            children.push(body);
            let q = store.mk_term(Kind::Forall, None, &children)?;
            if seen_quant.insert(q) {
                out.quantified.push(QuantifiedClause {
                    quantifier: Quantifier::from_term(store, q).expect("just built a forall"),
                    origin,
                });
            }
        }
    }
    Ok(out)
}

fn is_atom(kind: Kind) -> bool {
    !matches!(
        kind,
        Kind::Not
            | Kind::And
            | Kind::Or
            | Kind::Implies
            | Kind::Equiv
            | Kind::InstLemma
            | Kind::Distinct
            | Kind::Forall
            | Kind::Exists
            | Kind::True
            | Kind::False
    )
}

/// Negation normal form with implications, equivalences and `distinct`
/// expanded.
fn to_nnf(s: &mut TermStore, t: TermId, positive: bool) -> Result<TermId, TermError> {
    let kind = s.kind(t);
    let ch: Vec<TermId> = s.children(t).to_vec();
    let lit = |s: &mut TermStore, a: TermId, pos: bool| if pos { a } else { s.mk_not(a) };
    Ok(match kind {
        Kind::True | Kind::False => {
            if (kind == Kind::True) == positive {
                s.true_term()
            } else {
                s.false_term()
            }
        }
        Kind::Not => to_nnf(s, ch[0], !positive)?,
        Kind::And | Kind::Or => {
            let parts = ch
                .iter()
                .map(|&c| to_nnf(s, c, positive))
                .collect::<Result<Vec<_>, _>>()?;
            let conj = (kind == Kind::And) == positive;
            s.mk_term(if conj { Kind::And } else { Kind::Or }, None, &parts)?
        }
        Kind::Implies | Kind::InstLemma => {
            let a = to_nnf(s, ch[0], !positive)?;
            let b = to_nnf(s, ch[1], positive)?;
            s.mk_term(if positive { Kind::Or } else { Kind::And }, None, &[a, b])?
        }
        Kind::Equiv => {
            // positive: (~a | b) & (a | ~b); negative: (a | b) & (~a | ~b)
            let a_pos = to_nnf(s, ch[0], true)?;
            let a_neg = to_nnf(s, ch[0], false)?;
            let b_pos = to_nnf(s, ch[1], true)?;
            let b_neg = to_nnf(s, ch[1], false)?;
            let (l, r) = if positive {
                (
                    s.mk_term(Kind::Or, None, &[a_neg, b_pos])?,
                    s.mk_term(Kind::Or, None, &[a_pos, b_neg])?,
                )
            } else {
                (
                    s.mk_term(Kind::Or, None, &[a_pos, b_pos])?,
                    s.mk_term(Kind::Or, None, &[a_neg, b_neg])?,
                )
            };
            s.mk_term(Kind::And, None, &[l, r])?
        }
        Kind::Distinct => {
            let mut parts = Vec::new();
            for i in 0..ch.len() {
                for j in i + 1..ch.len() {
                    let eq = s.mk_term(Kind::Equal, None, &[ch[i], ch[j]])?;
                    parts.push(lit(s, eq, !positive));
                }
            }
            if parts.len() == 1 {
                parts[0]
            } else {
                s.mk_term(if positive { Kind::And } else { Kind::Or }, None, &parts)?
            }
        }
        Kind::Forall | Kind::Exists => {
            let n = ch.len();
            let body = to_nnf(s, ch[n - 1], positive)?;
            let universal = (kind == Kind::Forall) == positive;
            let mut children = ch[..n - 1].to_vec();
            children.push(body);
            s.mk_term(if universal { Kind::Forall } else { Kind::Exists }, None, &children)?
        }
        _ => {
            debug_assert!(is_atom(kind));
            lit(s, t, positive)
        }
    })
}

/// Removes existentials by skolem functions over the enclosing universals and
/// drops universal binders (every binder owns distinct variables, so pulling
/// them to the front cannot capture).
fn skolemize(
    s: &mut TermStore,
    t: TermId,
    universals: &mut Vec<TermId>,
    subst: &mut HashMap<TermId, TermId>,
) -> Result<TermId, TermError> {
    let kind = s.kind(t);
    let ch: Vec<TermId> = s.children(t).to_vec();
    match kind {
        Kind::And | Kind::Or => {
            let parts = ch
                .iter()
                .map(|&c| skolemize(s, c, universals, subst))
                .collect::<Result<Vec<_>, _>>()?;
            s.mk_term(kind, None, &parts)
        }
        Kind::Forall => {
            let mark = universals.len();
            universals.extend_from_slice(&ch[..ch.len() - 1]);
            let r = skolemize(s, ch[ch.len() - 1], universals, subst);
            universals.truncate(mark);
            r
        }
        Kind::Exists => {
            let arg_sorts: Vec<_> = universals.iter().map(|&u| s.sort(u)).collect();
            let mut added = Vec::new();
            for &v in &ch[..ch.len() - 1] {
                let name = s.symbol(s.symbol_of(v).expect("bound var has a symbol")).name.clone();
                let sym = s.fresh_skolem(&format!("sk_{name}"), &arg_sorts, s.sort(v));
                let app = s.mk_term(Kind::Skolem, Some(sym), universals)?;
                subst.insert(v, app);
                added.push(v);
            }
            let r = skolemize(s, ch[ch.len() - 1], universals, subst);
            for v in added {
                subst.remove(&v);
            }
            r
        }
        _ => {
            if subst.is_empty() {
                Ok(t)
            } else {
                s.replace_vars(t, subst)
            }
        }
    }
}

fn negate_literal(s: &mut TermStore, l: TermId) -> TermId {
    if s.kind(l) == Kind::Not {
        s.children(l)[0]
    } else {
        s.mk_not(l)
    }
}

/// Clause set of an NNF matrix, with duplicate literals removed, false
/// literals dropped and tautologies discarded.
fn cnf(s: &mut TermStore, t: TermId, remaining: usize, budget: usize) -> Result<Vec<Vec<TermId>>, ClausifyError> {
    let raw = cnf_rec(s, t, remaining, budget)?;
    let mut out = Vec::with_capacity(raw.len());
    for clause in raw {
        let mut lits: Vec<TermId> = Vec::new();
        let mut taut = false;
        for l in clause {
            match s.kind(l) {
                Kind::False => continue,
                Kind::True => {
                    taut = true;
                    break;
                }
                _ => {}
            }
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        if !taut {
            for i in 0..lits.len() {
                let neg = negate_literal(s, lits[i]);
                if lits.contains(&neg) {
                    taut = true;
                    break;
                }
            }
        }
        if !taut {
            out.push(lits);
        }
    }
    Ok(out)
}

fn cnf_rec(s: &mut TermStore, t: TermId, remaining: usize, budget: usize) -> Result<Vec<Vec<TermId>>, ClausifyError> {
    let guard = |n: usize| {
        if n > remaining {
            Err(ClausifyError::BlowupGuard { budget })
        } else {
            Ok(())
        }
    };
    match s.kind(t) {
        Kind::True => Ok(Vec::new()),
        Kind::False => Ok(vec![Vec::new()]),
        Kind::And => {
            let mut out = Vec::new();
            for c in s.children(t).to_vec() {
                out.extend(cnf_rec(s, c, remaining, budget)?);
                guard(out.len())?;
            }
            Ok(out)
        }
        Kind::Or => {
            let mut acc: Vec<Vec<TermId>> = vec![Vec::new()];
            for c in s.children(t).to_vec() {
                let part = cnf_rec(s, c, remaining, budget)?;
                guard(acc.len().saturating_mul(part.len()))?;
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for a in &acc {
                    for p in &part {
                        let mut clause = a.clone();
                        clause.extend_from_slice(p);
                        next.push(clause);
                    }
                }
                acc = next;
            }
            Ok(acc)
        }
        _ => Ok(vec![vec![t]]),
    }
}
