//! Enumerative instantiation over the age-ordered term database.
//!
//! Tuples of per-variable indices are visited in stages: stage `s` holds the
//! tuples whose largest index is `s`, walked lexicographically. When the
//! database grows, the cursor rewinds to the earliest stage that gained
//! tuples; already-emitted term tuples are remembered and skipped.

use std::collections::{HashMap, HashSet};

use super::termdb::TermDb;
use super::{InstContext, InstLemma};
use crate::term::{Quantifier, SortId, TermId, TermStore};

/// Per-quantifier enumeration state.
#[derive(Clone, Debug, Default)]
pub struct EnumCursor {
    emitted: HashSet<Vec<TermId>>,
    stage: usize,
    /// Next index tuple to examine inside `stage`; `None` once the stage is done.
    pos: Option<Vec<usize>>,
    seen_lens: Vec<usize>,
    seen_mid: Vec<u64>,
}

impl EnumCursor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_emitted(&self) -> usize {
        self.emitted.len()
    }

    pub fn has_emitted(&self, terms: &[TermId]) -> bool {
        self.emitted.contains(terms)
    }

    fn sync(&mut self, lens: &[usize], mids: &[u64]) {
        if self.seen_lens.len() != lens.len() {
            self.stage = 0;
            self.pos = Some(vec![0; lens.len()]);
        } else if self.seen_lens != lens || self.seen_mid != mids {
            let rewind = if self.seen_mid != mids {
                0
            } else {
                lens.iter()
                    .zip(&self.seen_lens)
                    .filter(|(n, o)| n != o)
                    .map(|(_, &o)| o)
                    .min()
                    .unwrap_or(usize::MAX)
            };
            if rewind <= self.stage {
                self.stage = rewind;
                self.pos = Some(vec![0; lens.len()]);
            }
        }
        self.seen_lens = lens.to_vec();
        self.seen_mid = mids.to_vec();
    }
}

/// Lexicographic successor within the box `[0, bound_i]`.
fn advance(tuple: &mut [usize], bounds: &[usize]) -> bool {
    for i in (0..tuple.len()).rev() {
        if tuple[i] < bounds[i] {
            tuple[i] += 1;
            return true;
        }
        tuple[i] = 0;
    }
    false
}

/// Returns the next not-yet-emitted binding (aligned with `q.bound_vars`)
/// and marks it emitted, or `None` when the current database is exhausted
/// for `q`.
pub fn next_instantiation(
    q: &Quantifier,
    store: &TermStore,
    db: &TermDb,
    cursor: &mut EnumCursor,
) -> Option<Vec<TermId>> {
    let sorts: Vec<SortId> = q.bound_vars.iter().map(|&v| store.sort(v)).collect();
    let lists: Vec<&[TermId]> = sorts.iter().map(|&s| db.terms_of_sort(s)).collect();
    if lists.iter().any(|l| l.is_empty()) {
        return None;
    }
    let lens: Vec<usize> = lists.iter().map(|l| l.len()).collect();
    let mids: Vec<u64> = sorts.iter().map(|&s| db.mid_inserts(s)).collect();
    cursor.sync(&lens, &mids);
    let max_stage = lens.iter().max().copied().unwrap_or(1) - 1;
    loop {
        if cursor.stage > max_stage {
            cursor.pos = None;
            return None;
        }
        let s = cursor.stage;
        let bounds: Vec<usize> = lens.iter().map(|&n| (n - 1).min(s)).collect();
        if let Some(mut tuple) = cursor.pos.take() {
            loop {
                if tuple.contains(&s) {
                    let terms: Vec<TermId> = tuple.iter().zip(&lists).map(|(&i, l)| l[i]).collect();
                    if !cursor.emitted.contains(&terms) {
                        cursor.emitted.insert(terms.clone());
                        if advance(&mut tuple, &bounds) {
                            cursor.pos = Some(tuple);
                        }
                        return Some(terms);
                    }
                }
                if !advance(&mut tuple, &bounds) {
                    break;
                }
            }
        }
        cursor.stage += 1;
        cursor.pos = Some(vec![0; lens.len()]);
    }
}

/// Enumerative instantiation module state across rounds.
#[derive(Clone, Debug)]
pub struct Enumerator {
    cursors: HashMap<TermId, EnumCursor>,
    pub lemmas_per_round: usize,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator {
            cursors: HashMap::new(),
            lemmas_per_round: 1,
        }
    }
}

impl Enumerator {
    pub fn new(lemmas_per_round: usize) -> Self {
        Enumerator {
            cursors: HashMap::new(),
            lemmas_per_round: lemmas_per_round.max(1),
        }
    }

    /// One round over the admitted quantifiers, in the given order. Each gets
    /// at most `lemmas_per_round` lemmas not already known.
    pub fn round(&mut self, ctx: &mut InstContext<'_>, admitted: &[(usize, &Quantifier)]) -> Vec<InstLemma> {
        let mut out = Vec::new();
        let mut fresh = HashSet::new();
        for &(qi, q) in admitted {
            let cursor = self.cursors.entry(q.term).or_default();
            let mut produced = 0;
            while produced < self.lemmas_per_round {
                let Some(binding) = next_instantiation(q, ctx.store, ctx.db, cursor) else {
                    break;
                };
                let lemma = ctx
                    .store
                    .mk_inst_lemma(q, &binding)
                    .expect("database terms are ground and sort-correct");
                if ctx.known_lemmas.contains(&lemma) || !fresh.insert(lemma) {
                    continue;
                }
                out.push(InstLemma {
                    quantifier: qi,
                    lemma,
                    binding,
                });
                produced += 1;
            }
        }
        out
    }

    /// Whether every quantifier's cursor is exhausted against the current db.
    pub fn is_saturated(&mut self, store: &TermStore, db: &TermDb, quants: &[&Quantifier]) -> bool {
        quants.iter().all(|q| {
            let mut probe = self.cursors.get(&q.term).cloned().unwrap_or_default();
            next_instantiation(q, store, db, &mut probe).is_none()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Kind, SortId};

    fn quant(s: &mut TermStore, nvars: usize) -> (Quantifier, SortId, Vec<TermId>) {
        let u = s.declare_sort("U");
        let consts: Vec<TermId> = (0..2)
            .map(|i| {
                let c = s.declare_fun(&format!("t{i}"), &[], u);
                s.apply(c, &[]).unwrap()
            })
            .collect();
        let args = vec![u; nvars];
        let p = s.declare_fun("p", &args, SortId::BOOL);
        let vars: Vec<TermId> = (0..nvars).map(|i| s.fresh_bound_var(&format!("x{i}"), u)).collect();
        let body = s.apply(p, &vars).unwrap();
        let mut ch = vars.clone();
        ch.push(body);
        let qt = s.mk_term(Kind::Forall, None, &ch).unwrap();
        (Quantifier::from_term(s, qt).unwrap(), u, consts)
    }

    #[test]
    fn two_vars_follow_stage_order() {
        let mut s = TermStore::new();
        let (q, _, t) = quant(&mut s, 2);
        let mut db = TermDb::new();
        db.insert(&s, t[0]);
        db.insert(&s, t[1]);
        let mut cur = EnumCursor::new();
        let mut seq = Vec::new();
        while let Some(b) = next_instantiation(&q, &s, &db, &mut cur) {
            seq.push(b);
        }
        let (a, b) = (t[0], t[1]);
        assert_eq!(seq, vec![vec![a, a], vec![a, b], vec![b, a], vec![b, b]]);
    }

    #[test]
    fn growth_resumes_without_repeats() {
        let mut s = TermStore::new();
        let (q, u, t) = quant(&mut s, 1);
        let mut db = TermDb::new();
        db.insert(&s, t[0]);
        let mut cur = EnumCursor::new();
        assert_eq!(next_instantiation(&q, &s, &db, &mut cur), Some(vec![t[0]]));
        assert_eq!(next_instantiation(&q, &s, &db, &mut cur), None);
        db.insert(&s, t[1]);
        assert_eq!(next_instantiation(&q, &s, &db, &mut cur), Some(vec![t[1]]));
        assert_eq!(next_instantiation(&q, &s, &db, &mut cur), None);
        assert_eq!(db.terms_of_sort(u).len(), 2);
    }

    #[test]
    fn empty_sort_is_exhausted() {
        let mut s = TermStore::new();
        let (q, _, _) = quant(&mut s, 1);
        let db = TermDb::new();
        assert_eq!(next_instantiation(&q, &s, &db, &mut EnumCursor::new()), None);
    }
}
