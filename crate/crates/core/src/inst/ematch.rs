//! Top-down e-matching of trigger patterns against the term database modulo
//! the congruence of the current ground model.

use std::collections::{HashMap, HashSet};

use super::termdb::TermDb;
use super::triggers::{generate_triggers, NoTrigger, Trigger, TriggerOptions};
use super::{InstContext, InstLemma};
use crate::ground::CongruenceState;
use crate::term::{Kind, Quantifier, TermId, TermStore};

/// Variable assignment, sorted by variable id.
pub type Binding = Vec<(TermId, TermId)>;

fn lookup(b: &Binding, v: TermId) -> Option<TermId> {
    b.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| b[i].1)
}

fn bind(b: &Binding, v: TermId, t: TermId) -> Binding {
    let mut out = b.clone();
    let at = out.partition_point(|&(x, _)| x < v);
    out.insert(at, (v, t));
    out
}

fn same_head(store: &TermStore, p: TermId, t: TermId) -> bool {
    store.kind(p) == store.kind(t)
        && store.symbol_of(p) == store.symbol_of(t)
        && store.children(p).len() == store.children(t).len()
}

/// All extensions of the bindings in `ins` under which `p` matches some
/// member of `t`'s class.
fn match_class(store: &TermStore, cc: &CongruenceState, p: TermId, t: TermId, ins: Vec<Binding>) -> Vec<Binding> {
    if ins.is_empty() {
        return ins;
    }
    if store.is_ground(p) {
        return if cc.are_equal(p, t) { ins } else { Vec::new() };
    }
    if store.kind(p) == Kind::BoundVar {
        return ins
            .into_iter()
            .filter_map(|b| match lookup(&b, p) {
                Some(u) => cc.are_equal(u, t).then_some(b),
                None => Some(bind(&b, p, t)),
            })
            .collect();
    }
    let mut out = Vec::new();
    for m in cc.class_of(t) {
        if same_head(store, p, m) {
            out.extend(match_args(store, cc, p, m, ins.clone()));
        }
    }
    out
}

fn match_args(store: &TermStore, cc: &CongruenceState, p: TermId, t: TermId, ins: Vec<Binding>) -> Vec<Binding> {
    let mut cur = ins;
    for (&pc, &tc) in store.children(p).iter().zip(store.children(t)) {
        cur = match_class(store, cc, pc, tc, cur);
        if cur.is_empty() {
            break;
        }
    }
    cur
}

fn rep_key(cc: &CongruenceState, b: &Binding) -> Vec<(TermId, TermId)> {
    b.iter().map(|&(v, t)| (v, cc.find(t))).collect()
}

/// Bindings under which `pattern` is congruent to some database term.
/// Results are ordered by the age of the matched database term, then by the
/// bound terms, with duplicates modulo congruence removed.
pub fn ematch(store: &TermStore, pattern: TermId, db: &TermDb, cc: &CongruenceState) -> Vec<Binding> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &t in db.all_terms() {
        if !same_head(store, pattern, t) {
            continue;
        }
        let mut found = match_args(store, cc, pattern, t, vec![Binding::new()]);
        found.sort_by(|a, b| a.iter().map(|p| p.1).cmp(b.iter().map(|p| p.1)));
        for b in found {
            if seen.insert(rep_key(cc, &b)) {
                out.push(b);
            }
        }
    }
    out
}

/// Joins the matches of every pattern of a trigger on their shared
/// variables.
pub fn ematch_trigger(store: &TermStore, trigger: &Trigger, db: &TermDb, cc: &CongruenceState) -> Vec<Binding> {
    let mut acc: Vec<Binding> = vec![Binding::new()];
    for &p in &trigger.patterns {
        let matches = ematch(store, p, db, cc);
        let mut next = Vec::new();
        for a in &acc {
            'm: for m in &matches {
                let mut merged = a.clone();
                for &(v, t) in m {
                    match lookup(&merged, v) {
                        Some(u) if !cc.are_equal(u, t) => continue 'm,
                        Some(_) => {}
                        None => merged = bind(&merged, v, t),
                    }
                }
                next.push(merged);
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    let mut seen = HashSet::new();
    acc.retain(|b| seen.insert(rep_key(cc, b)));
    acc
}

/// E-matching module state across rounds.
#[derive(Clone, Debug)]
pub struct EMatcher {
    pub options: TriggerOptions,
    /// Maximum new lemmas per quantifier per round.
    pub cap: usize,
    triggers: HashMap<TermId, Result<Vec<Trigger>, NoTrigger>>,
}

impl Default for EMatcher {
    fn default() -> Self {
        EMatcher::new(TriggerOptions::default(), 4)
    }
}

impl EMatcher {
    pub fn new(options: TriggerOptions, cap: usize) -> Self {
        EMatcher {
            options,
            cap: cap.max(1),
            triggers: HashMap::new(),
        }
    }

    pub fn triggers(&mut self, store: &TermStore, q: &Quantifier) -> Result<&[Trigger], NoTrigger> {
        let opts = self.options;
        let entry = self
            .triggers
            .entry(q.term)
            .or_insert_with(|| generate_triggers(store, q, &opts));
        match entry {
            Ok(ts) => Ok(ts),
            Err(e) => Err(*e),
        }
    }

    /// One round over the admitted quantifiers. Quantifiers without a
    /// trigger are skipped.
    pub fn round(
        &mut self,
        ctx: &mut InstContext<'_>,
        cc: &CongruenceState,
        admitted: &[(usize, &Quantifier)],
    ) -> Vec<InstLemma> {
        let mut out = Vec::new();
        let mut fresh = HashSet::new();
        for &(qi, q) in admitted {
            let Ok(triggers) = self.triggers(ctx.store, q) else {
                continue;
            };
            let triggers = triggers.to_vec();
            let mut produced = 0;
            'q: for trig in &triggers {
                for b in ematch_trigger(ctx.store, trig, ctx.db, cc) {
                    let binding: Vec<TermId> = q
                        .bound_vars
                        .iter()
                        .map(|&v| lookup(&b, v).expect("trigger covers every variable"))
                        .collect();
                    let lemma = ctx
                        .store
                        .mk_inst_lemma(q, &binding)
                        .expect("matched terms are ground and sort-correct");
                    if ctx.known_lemmas.contains(&lemma) || !fresh.insert(lemma) {
                        continue;
                    }
                    out.push(InstLemma {
                        quantifier: qi,
                        lemma,
                        binding,
                    });
                    produced += 1;
                    if produced >= self.cap {
                        break 'q;
                    }
                }
            }
        }
        out
    }
}
