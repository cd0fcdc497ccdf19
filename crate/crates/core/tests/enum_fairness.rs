use std::collections::BTreeSet;

use proptest::prelude::*;
use qsel::inst::{next_instantiation, EnumCursor, TermDb};
use qsel::term::{Kind, Quantifier, SortId, TermId, TermStore};

fn setup(n: usize, v: usize) -> (TermStore, Quantifier, Vec<TermId>, SortId) {
    let mut s = TermStore::new();
    let u = s.declare_sort("U");
    let consts: Vec<TermId> = (0..n)
        .map(|i| {
            let c = s.declare_fun(&format!("c{i}"), &[], u);
            s.apply(c, &[]).unwrap()
        })
        .collect();
    let vars: Vec<TermId> = (0..v).map(|i| s.fresh_bound_var(&format!("x{i}"), u)).collect();
    let bool_sort = s.sort(s.true_term());
    let p = s.declare_fun("p", &vec![u; v], bool_sort);
    let body = s.apply(p, &vars).unwrap();
    let mut ch = vars.clone();
    ch.push(body);
    let q = s.mk_term(Kind::Forall, None, &ch).unwrap();
    let q = Quantifier::from_term(&s, q).unwrap();
    (s, q, consts, u)
}

#[test]
fn first_emissions_cover_the_full_box() {
    for n in 1..=5usize {
        for v in 1..=3usize {
            let (s, q, consts, _) = setup(n, v);
            let mut db = TermDb::new();
            for &c in &consts {
                db.insert(&s, c);
            }
            let mut cur = EnumCursor::new();
            let total = n.pow(v as u32);
            let got: Vec<Vec<TermId>> = (0..total)
                .map(|_| next_instantiation(&q, &s, &db, &mut cur).expect("box not exhausted"))
                .collect();
            assert_eq!(got[0], vec![consts[0]; v], "n={n} v={v}: oldest tuple first");
            let set: BTreeSet<Vec<TermId>> = got.iter().cloned().collect();
            assert_eq!(set.len(), total, "n={n} v={v}: duplicates");
            assert!(set.iter().all(|t| t.iter().all(|c| consts.contains(c))));
            assert_eq!(
                next_instantiation(&q, &s, &db, &mut cur),
                None,
                "n={n} v={v}: exhausted"
            );
            // Stages are visited in order of their largest index.
            let pos = |t: &TermId| consts.iter().position(|c| c == t).unwrap();
            let stages: Vec<usize> = got.iter().map(|t| t.iter().map(pos).max().unwrap()).collect();
            assert!(stages.windows(2).all(|w| w[0] <= w[1]), "n={n} v={v}: {stages:?}");
        }
    }
}

proptest! {
    /// Growing the database between emissions never loses or repeats a tuple.
    #[test]
    fn growth_keeps_enumeration_complete(v in 1usize..=2, n in 1usize..=5, schedule in proptest::collection::vec(0usize..6, 0..6)) {
        let (s, q, consts, _) = setup(n, v);
        let mut db = TermDb::new();
        db.insert(&s, consts[0]);
        let mut added = 1;
        let mut cur = EnumCursor::new();
        let mut seen = BTreeSet::new();
        for steps in schedule {
            for _ in 0..steps {
                match next_instantiation(&q, &s, &db, &mut cur) {
                    Some(t) => prop_assert!(seen.insert(t)),
                    None => break,
                }
            }
            if added < n {
                db.insert(&s, consts[added]);
                added += 1;
            }
        }
        while added < n {
            db.insert(&s, consts[added]);
            added += 1;
        }
        while let Some(t) = next_instantiation(&q, &s, &db, &mut cur) {
            prop_assert!(seen.insert(t));
        }
        prop_assert_eq!(seen.len(), n.pow(v as u32));
    }

    /// Inserting a term older than the current list still gets it enumerated.
    #[test]
    fn mid_list_insert_is_enumerated(n in 2usize..=5, first in 0usize..4) {
        let (s, q, consts, _) = setup(n, 1);
        let late = first.min(n - 1);
        let mut db = TermDb::new();
        for (i, &c) in consts.iter().enumerate() {
            if i != late {
                db.insert(&s, c);
            }
        }
        let mut cur = EnumCursor::new();
        let mut seen = BTreeSet::new();
        while let Some(t) = next_instantiation(&q, &s, &db, &mut cur) {
            seen.insert(t);
        }
        db.insert(&s, consts[late]);
        while let Some(t) = next_instantiation(&q, &s, &db, &mut cur) {
            prop_assert!(seen.insert(t));
        }
        prop_assert_eq!(seen.len(), n);
    }
}
