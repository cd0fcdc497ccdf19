use std::collections::{BTreeMap, HashSet};

use crate::term::{Kind, SortId, TermId, TermStore};

/// Age-ordered database of the ground terms known to the solver.
#[derive(Clone, Debug, Default)]
pub struct TermDb {
    by_sort: BTreeMap<SortId, Vec<TermId>>,
    all: Vec<TermId>,
    members: HashSet<TermId>,
    /// Per sort, how many insertions landed before the end of the list.
    mid_inserts: BTreeMap<SortId, u64>,
}

/// Whether a node is an individual term (as opposed to a connective, atom
/// builder or binder).
pub fn is_db_term(kind: Kind) -> bool {
    matches!(kind, Kind::UfApply | Kind::UfConst | Kind::Skolem | Kind::Numeral)
}

impl TermDb {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts every ground individual subterm of `t`. Idempotent.
    pub fn insert(&mut self, store: &TermStore, t: TermId) {
        for u in store.subterms(t) {
            if !store.is_ground(u) || !is_db_term(store.kind(u)) || self.members.contains(&u) {
                continue;
            }
            self.members.insert(u);
            let sort = store.sort(u);
            let list = self.by_sort.entry(sort).or_default();
            let at = list.partition_point(|&x| x < u);
            if at < list.len() {
                *self.mid_inserts.entry(sort).or_default() += 1;
            }
            list.insert(at, u);
            let at = self.all.partition_point(|&x| x < u);
            self.all.insert(at, u);
        }
    }

    pub fn contains(&self, t: TermId) -> bool {
        self.members.contains(&t)
    }

    /// Terms of one sort, oldest first.
    pub fn terms_of_sort(&self, sort: SortId) -> &[TermId] {
        self.by_sort.get(&sort).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All terms, oldest first.
    pub fn all_terms(&self) -> &[TermId] {
        &self.all
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.all.is_empty()
    }

    pub(crate) fn mid_inserts(&self, sort: SortId) -> u64 {
        self.mid_inserts.get(&sort).copied().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_collects_subterms_in_age_order() {
        let mut s = TermStore::new();
        let u = s.declare_sort("U");
        let c = s.declare_fun("c", &[], u);
        let f = s.declare_fun("f", &[u], u);
        let g = s.declare_fun("g", &[u], u);
        let c = s.apply(c, &[]).unwrap();
        let fc = s.apply(f, &[c]).unwrap();
        let gfc = s.apply(g, &[fc]).unwrap();

        let mut db = TermDb::new();
        db.insert(&s, gfc);
        assert_eq!(db.terms_of_sort(u), &[c, fc, gfc]);

        let mut db = TermDb::new();
        db.insert(&s, c);
        db.insert(&s, c);
        assert_eq!(db.terms_of_sort(u), &[c]);
        db.insert(&s, fc);
        assert_eq!(db.terms_of_sort(u), &[c, fc]);
    }

    #[test]
    fn skips_connectives_and_open_terms() {
        let mut s = TermStore::new();
        let u = s.declare_sort("U");
        let p = s.declare_fun("p", &[u], crate::term::SortId::BOOL);
        let c = s.declare_fun("c", &[], u);
        let c = s.apply(c, &[]).unwrap();
        let x = s.fresh_bound_var("x", u);
        let px = s.apply(p, &[x]).unwrap();
        let pc = s.apply(p, &[c]).unwrap();
        let body = s.mk_term(Kind::Or, None, &[px, pc]).unwrap();
        let q = s.mk_term(Kind::Forall, None, &[x, body]).unwrap();
        let mut db = TermDb::new();
        db.insert(&s, q);
        assert_eq!(db.all_terms(), &[c, pc]);
        assert!(!db.contains(px));
    }
}
