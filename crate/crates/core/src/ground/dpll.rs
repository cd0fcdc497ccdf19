//! Lazy DPLL(EUF): boolean search over atoms, congruence closure as the
//! theory check, theory conflicts turned into blocking clauses.

use std::collections::HashMap;

use super::cc::{CcResult, CongruenceState};
use crate::term::{Kind, TermId, TermStore};

/// A ground clause. `lemma` is set when the clause encodes an instantiation
/// lemma, and identifies it for unsat-core extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundClause {
    pub literals: Vec<TermId>,
    pub lemma: Option<TermId>,
}

impl GroundClause {
    pub fn input(literals: Vec<TermId>) -> Self {
        GroundClause { literals, lemma: None }
    }

    /// Clause form of an instantiation lemma `q => instance`, where the
    /// instance is a literal or a disjunction of literals.
    pub fn from_lemma(store: &mut TermStore, lemma: TermId) -> Self {
        let ch = store.children(lemma).to_vec();
        debug_assert_eq!(store.kind(lemma), Kind::Implies);
        let mut literals = vec![store.mk_not(ch[0])];
        match store.kind(ch[1]) {
            Kind::Or => literals.extend_from_slice(store.children(ch[1])),
            Kind::False => {}
            _ => literals.push(ch[1]),
        }
        GroundClause {
            literals,
            lemma: Some(lemma),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundConfig {
    /// Maximum number of decisions before giving up with `Unknown`.
    pub decision_budget: u64,
    /// Compute a minimal set of lemmas needed for unsat by deletion.
    pub minimize_lemmas: bool,
}

impl Default for GroundConfig {
    fn default() -> Self {
        GroundConfig {
            decision_budget: 1_000_000,
            minimize_lemmas: true,
        }
    }
}

/// Boolean assignment plus the congruence state it induces.
#[derive(Clone, Debug)]
pub struct GroundModel {
    pub assignment: Vec<(TermId, bool)>,
    pub cc: CongruenceState,
}

impl GroundModel {
    pub fn value(&self, atom: TermId) -> Option<bool> {
        self.assignment.iter().find(|(a, _)| *a == atom).map(|&(_, v)| v)
    }
}

#[derive(Clone, Debug)]
pub enum GroundOutcome {
    Sat(Box<GroundModel>),
    Unsat { used_lemmas: Vec<TermId> },
    Unknown,
}

impl GroundOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, GroundOutcome::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, GroundOutcome::Unsat { .. })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundStats {
    pub decisions: u64,
    pub theory_conflicts: u64,
}

/// Decides the clause set. On unsat, `used_lemmas` is either a deletion-minimal
/// subset of the lemma clauses (when `minimize_lemmas` is set) or all of them.
pub fn solve_ground(store: &TermStore, clauses: &[GroundClause], cfg: &GroundConfig) -> GroundOutcome {
    solve_ground_with_stats(store, clauses, cfg).0
}

pub fn solve_ground_with_stats(
    store: &TermStore,
    clauses: &[GroundClause],
    cfg: &GroundConfig,
) -> (GroundOutcome, GroundStats) {
    let mut stats = GroundStats::default();
    let all: Vec<&GroundClause> = clauses.iter().collect();
    match search(store, &all, cfg.decision_budget, &mut stats) {
        Search::Sat(m) => (GroundOutcome::Sat(m), stats),
        Search::Unknown => (GroundOutcome::Unknown, stats),
        Search::Unsat => {
            let used_lemmas = if cfg.minimize_lemmas {
                minimize(store, clauses, cfg.decision_budget, &mut stats)
            } else {
                clauses.iter().filter_map(|c| c.lemma).collect()
            };
            (GroundOutcome::Unsat { used_lemmas }, stats)
        }
    }
}

/// Deletion-based minimisation. Lemmas are dropped in blocks of halving size;
/// the final pass uses blocks of one, so the result is deletion-minimal.
fn minimize(store: &TermStore, clauses: &[GroundClause], budget: u64, stats: &mut GroundStats) -> Vec<TermId> {
    let inputs: Vec<&GroundClause> = clauses.iter().filter(|c| c.lemma.is_none()).collect();
    let mut kept: Vec<&GroundClause> = clauses.iter().filter(|c| c.lemma.is_some()).collect();
    let mut block = kept.len().div_ceil(2).max(1);
    loop {
        let mut start = 0;
        while start < kept.len() {
            let end = (start + block).min(kept.len());
            let subset: Vec<&GroundClause> = inputs
                .iter()
                .copied()
                .chain(kept[..start].iter().copied())
                .chain(kept[end..].iter().copied())
                .collect();
            if matches!(search(store, &subset, budget, stats), Search::Unsat) {
                kept.drain(start..end);
            } else {
                start = end;
            }
        }
        if block == 1 {
            break;
        }
        block = block.div_ceil(2);
    }
    kept.iter().map(|c| c.lemma.unwrap()).collect()
}

enum Search {
    Sat(Box<GroundModel>),
    Unsat,
    Unknown,
}

type Lit = (usize, bool);

struct Level {
    trail_len: usize,
    atom: usize,
    flipped: bool,
    cc: CongruenceState,
    cc_upto: usize,
}

struct Dpll<'a> {
    store: &'a TermStore,
    atoms: Vec<TermId>,
    clauses: Vec<Vec<Lit>>,
    assign: Vec<Option<bool>>,
    trail: Vec<usize>,
    levels: Vec<Level>,
    cc: CongruenceState,
    cc_upto: usize,
}

fn search(store: &TermStore, clauses: &[&GroundClause], budget: u64, stats: &mut GroundStats) -> Search {
    let mut index: HashMap<TermId, usize> = HashMap::new();
    let mut atoms = Vec::new();
    let mut encoded = Vec::with_capacity(clauses.len());
    for c in clauses {
        let mut lits: Vec<Lit> = Vec::with_capacity(c.literals.len());
        for &l in &c.literals {
            let (atom, pos) = if store.kind(l) == Kind::Not {
                (store.children(l)[0], false)
            } else {
                (l, true)
            };
            let a = *index.entry(atom).or_insert_with(|| {
                atoms.push(atom);
                atoms.len() - 1
            });
            if !lits.contains(&(a, pos)) {
                lits.push((a, pos));
            }
        }
        encoded.push(lits);
    }
    let n = atoms.len();
    let mut d = Dpll {
        store,
        atoms,
        clauses: encoded,
        assign: vec![None; n],
        trail: Vec::new(),
        levels: Vec::new(),
        cc: CongruenceState::new(store),
        cc_upto: 0,
    };
    d.run(budget, stats)
}

impl Dpll<'_> {
    fn set(&mut self, atom: usize, value: bool) {
        self.assign[atom] = Some(value);
        self.trail.push(atom);
    }

    /// Unit propagation to fixpoint; returns false on a falsified clause.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for ci in 0..self.clauses.len() {
                let mut unassigned = None;
                let mut n_unassigned = 0;
                let mut satisfied = false;
                for &(a, pos) in &self.clauses[ci] {
                    match self.assign[a] {
                        Some(v) if v == pos => {
                            satisfied = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            n_unassigned += 1;
                            unassigned = Some((a, pos));
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match n_unassigned {
                    0 => return false,
                    1 => {
                        let (a, pos) = unassigned.unwrap();
                        self.set(a, pos);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Asserts newly assigned literals into the congruence state. On conflict
    /// the negated explanation is added as a blocking clause.
    fn theory_check(&mut self, stats: &mut GroundStats) -> bool {
        while self.cc_upto < self.trail.len() {
            let a = self.trail[self.cc_upto];
            self.cc_upto += 1;
            let v = self.assign[a].unwrap();
            if let CcResult::Conflict(expl) = self.cc.assert_literal(self.store, self.atoms[a], v, a) {
                stats.theory_conflicts += 1;
                let blocking: Vec<Lit> = expl.iter().map(|&t| (t, !self.assign[t].unwrap())).collect();
                self.clauses.push(blocking);
                return false;
            }
        }
        true
    }

    /// Chronological backtracking to the most recent unflipped decision.
    fn backtrack(&mut self) -> bool {
        while let Some(level) = self.levels.last_mut() {
            for &a in &self.trail[level.trail_len..] {
                self.assign[a] = None;
            }
            self.trail.truncate(level.trail_len);
            if level.flipped {
                let level = self.levels.pop().unwrap();
                self.cc = level.cc;
                self.cc_upto = level.cc_upto;
                continue;
            }
            level.flipped = true;
            let atom = level.atom;
            self.cc = level.cc.clone();
            self.cc_upto = level.cc_upto;
            self.set(atom, true);
            return true;
        }
        false
    }

    fn run(&mut self, budget: u64, stats: &mut GroundStats) -> Search {
        let mut decisions = 0u64;
        loop {
            let ok = self.propagate() && self.theory_check(stats);
            if !ok {
                if !self.backtrack() {
                    return Search::Unsat;
                }
                continue;
            }
            let Some(next) = self.assign.iter().position(|v| v.is_none()) else {
                let assignment = self
                    .trail
                    .iter()
                    .map(|&a| (self.atoms[a], self.assign[a].unwrap()))
                    .collect();
                let mut assignment: Vec<(TermId, bool)> = assignment;
                assignment.sort_by_key(|&(t, _)| t);
                return Search::Sat(Box::new(GroundModel {
                    assignment,
                    cc: self.cc.clone(),
                }));
            };
            decisions += 1;
            stats.decisions += 1;
            if decisions > budget {
                return Search::Unknown;
            }
            self.levels.push(Level {
                trail_len: self.trail.len(),
                atom: next,
                flipped: false,
                cc: self.cc.clone(),
                cc_upto: self.cc_upto,
            });
            self.set(next, false);
        }
    }
}
