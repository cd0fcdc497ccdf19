//! Random e-matching instances and a naive matcher: classes come from a
//! fixpoint congruence computation over the pool, and a binding matches when
//! the pattern evaluates bottom-up to an existing class.

use std::collections::{BTreeSet, HashMap};

use qsel::ground::CongruenceState;
use qsel::inst::{ematch, TermDb};
use qsel::term::{Kind, SymbolId, TermId, TermStore};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

struct Sig {
    consts: Vec<TermId>,
    f: SymbolId,
    g: SymbolId,
    vars: Vec<TermId>,
}

fn random_ground(r: &mut ChaCha8Rng, s: &mut TermStore, sig: &Sig, depth: u32) -> TermId {
    if depth == 0 || r.random_bool(0.35) {
        return sig.consts[r.random_range(0..sig.consts.len())];
    }
    if r.random_bool(0.6) {
        let a = random_ground(r, s, sig, depth - 1);
        s.apply(sig.f, &[a]).unwrap()
    } else {
        let a = random_ground(r, s, sig, depth - 1);
        let b = random_ground(r, s, sig, depth - 1);
        s.apply(sig.g, &[a, b]).unwrap()
    }
}

fn random_pattern_arg(r: &mut ChaCha8Rng, s: &mut TermStore, sig: &Sig, depth: u32) -> TermId {
    let roll = r.random_range(0..10);
    if depth == 0 || roll < 6 {
        if roll < 5 {
            sig.vars[r.random_range(0..sig.vars.len())]
        } else {
            sig.consts[r.random_range(0..sig.consts.len())]
        }
    } else if roll < 8 {
        let a = random_pattern_arg(r, s, sig, depth - 1);
        s.apply(sig.f, &[a]).unwrap()
    } else {
        let a = random_pattern_arg(r, s, sig, depth - 1);
        let b = random_pattern_arg(r, s, sig, depth - 1);
        s.apply(sig.g, &[a, b]).unwrap()
    }
}

/// Non-ground pattern with an application at the top.
fn random_pattern(r: &mut ChaCha8Rng, s: &mut TermStore, sig: &Sig) -> TermId {
    loop {
        let p = if r.random_bool(0.5) {
            let a = random_pattern_arg(r, s, sig, 2);
            s.apply(sig.f, &[a]).unwrap()
        } else {
            let a = random_pattern_arg(r, s, sig, 2);
            let b = random_pattern_arg(r, s, sig, 2);
            s.apply(sig.g, &[a, b]).unwrap()
        };
        if !s.is_ground(p) {
            return p;
        }
    }
}

/// Naive congruence closure over `pool`: union until no two applications
/// with the same symbol and pairwise-equal arguments sit in different classes.
fn naive_classes(s: &TermStore, pool: &[TermId], eqs: &[(TermId, TermId)]) -> HashMap<TermId, usize> {
    let mut class: HashMap<TermId, usize> = pool.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let merge = |class: &mut HashMap<TermId, usize>, a: usize, b: usize| {
        for v in class.values_mut() {
            if *v == b {
                *v = a;
            }
        }
    };
    for &(a, b) in eqs {
        let (ca, cb) = (class[&a], class[&b]);
        if ca != cb {
            merge(&mut class, ca, cb);
        }
    }
    loop {
        let mut changed = false;
        for &t in pool {
            for &u in pool {
                if s.kind(t) != Kind::UfApply || s.kind(u) != Kind::UfApply || s.symbol_of(t) != s.symbol_of(u) {
                    continue;
                }
                let args_eq = s
                    .children(t)
                    .iter()
                    .zip(s.children(u))
                    .all(|(x, y)| class[x] == class[y]);
                let (ct, cu) = (class[&t], class[&u]);
                if args_eq && ct != cu {
                    merge(&mut class, ct, cu);
                    changed = true;
                }
            }
        }
        if !changed {
            return class;
        }
    }
}

fn eval(
    s: &TermStore,
    p: TermId,
    pool: &[TermId],
    class: &HashMap<TermId, usize>,
    sigma: &HashMap<TermId, usize>,
) -> Option<usize> {
    if s.kind(p) == Kind::BoundVar {
        return Some(sigma[&p]);
    }
    if s.is_ground(p) {
        return class.get(&p).copied();
    }
    let args: Vec<usize> = s
        .children(p)
        .iter()
        .map(|&c| eval(s, c, pool, class, sigma))
        .collect::<Option<_>>()?;
    pool.iter()
        .find(|&&t| {
            s.kind(t) == Kind::UfApply
                && s.symbol_of(t) == s.symbol_of(p)
                && s.children(t).iter().zip(&args).all(|(c, &a)| class[c] == a)
        })
        .map(|t| class[t])
}

fn pattern_vars(s: &TermStore, p: TermId) -> Vec<TermId> {
    let mut v: Vec<TermId> = s
        .subterms(p)
        .into_iter()
        .filter(|&t| s.kind(t) == Kind::BoundVar)
        .collect();
    v.sort();
    v.dedup();
    v
}

/// Generates one instance with at most 20 database terms, runs `ematch` and
/// the naive matcher, and panics on any disagreement. Returns whether the
/// pattern had at least one match.
pub fn check_random_case(r: &mut ChaCha8Rng) -> bool {
    let mut s = TermStore::new();
    let u = s.declare_sort("U");
    let consts: Vec<TermId> = (0..r.random_range(1..=4))
        .map(|i| {
            let c = s.declare_fun(&format!("c{i}"), &[], u);
            s.apply(c, &[]).unwrap()
        })
        .collect();
    let f = s.declare_fun("f", &[u], u);
    let g = s.declare_fun("g", &[u, u], u);
    let vars = vec![s.fresh_bound_var("x", u), s.fresh_bound_var("y", u)];
    let sig = Sig { consts, f, g, vars };

    let mut db = TermDb::new();
    for &c in &sig.consts {
        db.insert(&s, c);
    }
    while db.len() < 20 {
        let t = random_ground(r, &mut s, &sig, 3);
        let mut trial = db.clone();
        trial.insert(&s, t);
        if trial.len() > 20 {
            break;
        }
        db = trial;
    }
    let pool: Vec<TermId> = db.all_terms().to_vec();
    let eqs: Vec<(TermId, TermId)> = (0..r.random_range(0..=4))
        .map(|_| (pool[r.random_range(0..pool.len())], pool[r.random_range(0..pool.len())]))
        .collect();
    let pattern = random_pattern(r, &mut s, &sig);
    let atoms: Vec<TermId> = eqs
        .iter()
        .map(|&(a, b)| s.mk_term(Kind::Equal, None, &[a, b]).unwrap())
        .collect();

    let mut cc = CongruenceState::new(&s);
    for &t in &pool {
        cc.add_term(&s, t);
    }
    for (i, &a) in atoms.iter().enumerate() {
        cc.assert_literal(&s, a, true, i);
    }

    let class = naive_classes(&s, &pool, &eqs);
    let vars = pattern_vars(&s, pattern);
    let classes: BTreeSet<usize> = class.values().copied().collect();
    let classes: Vec<usize> = classes.into_iter().collect();
    let mut expected: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut idx = vec![0usize; vars.len()];
    'outer: loop {
        let sigma: HashMap<TermId, usize> = vars.iter().zip(&idx).map(|(&v, &i)| (v, classes[i])).collect();
        if eval(&s, pattern, &pool, &class, &sigma).is_some() {
            expected.insert(idx.iter().map(|&i| classes[i]).collect());
        }
        for k in (0..idx.len()).rev() {
            if idx[k] + 1 < classes.len() {
                idx[k] += 1;
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }

    let got = ematch(&s, pattern, &db, &cc);
    let keys: Vec<Vec<usize>> = got
        .iter()
        .map(|b| {
            assert_eq!(b.iter().map(|p| p.0).collect::<Vec<_>>(), vars, "binding domain");
            b.iter().map(|&(_, t)| class[&t]).collect()
        })
        .collect();
    let got_set: BTreeSet<Vec<usize>> = keys.iter().cloned().collect();
    assert_eq!(got_set.len(), keys.len(), "duplicate modulo congruence");
    assert_eq!(got_set, expected, "pattern {}", s.display(pattern));
    !expected.is_empty()
}
