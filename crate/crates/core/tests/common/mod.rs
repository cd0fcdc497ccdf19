//! Instance generators and brute-force oracles shared by the integration
//! tests. Nothing here calls into the code paths it is used to check.
#![allow(dead_code)]

pub mod ematch;
pub mod gbdt;

use std::collections::HashMap;

use qsel::ground::GroundClause;
use qsel::term::{Kind, SortId, SymbolId, TermId, TermStore};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random ground EUF instance over one sort.
pub struct EufInstance {
    pub store: TermStore,
    /// Subterm-closed pool of terms appearing in the instance.
    pub pool: Vec<TermId>,
    /// Each clause is a list of (lhs, rhs, positive).
    pub clauses: Vec<Vec<(TermId, TermId, bool)>>,
}

impl EufInstance {
    pub fn ground_clauses(&mut self) -> Vec<GroundClause> {
        let mut out = Vec::new();
        for c in &self.clauses {
            let mut lits = Vec::new();
            for &(a, b, pos) in c {
                let e = self.store.mk_term(Kind::Equal, None, &[a, b]).unwrap();
                lits.push(if pos { e } else { self.store.mk_not(e) });
            }
            out.push(GroundClause::input(lits));
        }
        out
    }

    pub fn literals(&self) -> Vec<(TermId, TermId, bool)> {
        self.clauses.iter().flatten().copied().collect()
    }
}

/// Up to `max_consts` constants, up to two unary functions, at most
/// `max_terms` pool terms and `max_lits` literals spread over clauses of size
/// one to three (`unit_only` forces unit clauses).
pub fn random_euf(
    r: &mut ChaCha8Rng,
    max_consts: usize,
    max_terms: usize,
    max_lits: usize,
    unit_only: bool,
) -> EufInstance {
    let mut store = TermStore::new();
    let u = store.declare_sort("U");
    let n_consts = r.random_range(2..=max_consts);
    let mut pool = Vec::new();
    for i in 0..n_consts {
        let s = store.declare_fun(&format!("c{i}"), &[], u);
        pool.push(store.apply(s, &[]).unwrap());
    }
    let n_funs = r.random_range(0..=2);
    let funs: Vec<SymbolId> = (0..n_funs).map(|i| store.declare_fun(["f", "g"][i], &[u], u)).collect();
    if !funs.is_empty() {
        let extra = r.random_range(0..=max_terms.saturating_sub(pool.len()));
        for _ in 0..extra {
            let f = funs[r.random_range(0..funs.len())];
            let arg = pool[r.random_range(0..pool.len())];
            let t = store.apply(f, &[arg]).unwrap();
            if !pool.contains(&t) {
                pool.push(t);
            }
        }
    }
    let n_lits = r.random_range(1..=max_lits);
    let mut clauses = Vec::new();
    let mut left = n_lits;
    while left > 0 {
        let size = if unit_only {
            1
        } else {
            r.random_range(1..=3usize).min(left)
        };
        let mut c = Vec::new();
        for _ in 0..size {
            let a = pool[r.random_range(0..pool.len())];
            let b = pool[r.random_range(0..pool.len())];
            c.push((a, b, r.random_bool(0.6)));
        }
        left -= size;
        clauses.push(c);
    }
    EufInstance { store, pool, clauses }
}

/// Brute-force EUF satisfiability: enumerate every partition of the pool,
/// keep the congruence-closed ones, and evaluate the clauses.
pub fn partition_oracle(inst: &EufInstance) -> bool {
    let s = &inst.store;
    let pool = &inst.pool;
    let pos: HashMap<TermId, usize> = pool.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    // (symbol, arg index, app index) for unary applications
    let apps: Vec<(SymbolId, usize, usize)> = pool
        .iter()
        .enumerate()
        .filter(|(_, &t)| s.kind(t) == Kind::UfApply)
        .map(|(i, &t)| (s.symbol_of(t).unwrap(), pos[&s.children(t)[0]], i))
        .collect();
    let n = pool.len();
    let mut block = vec![0usize; n];
    loop {
        let closed = apps.iter().all(|&(f, x, fx)| {
            apps.iter()
                .all(|&(g, y, gy)| f != g || block[x] != block[y] || block[fx] == block[gy])
        });
        if closed {
            let sat = inst
                .clauses
                .iter()
                .all(|c| c.iter().any(|&(a, b, p)| (block[pos[&a]] == block[pos[&b]]) == p));
            if sat {
                return true;
            }
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i <= 1 {
                return false;
            }
            i -= 1;
            let max_prev = *block[..i].iter().max().unwrap();
            if block[i] <= max_prev {
                block[i] += 1;
                for b in &mut block[i + 1..] {
                    *b = 0;
                }
                break;
            }
        }
    }
}

/// Signature helper: declares `name : sorts -> result` and applies it.
pub fn app(store: &mut TermStore, name: &str, args: &[TermId], result: SortId) -> TermId {
    let sorts: Vec<SortId> = args.iter().map(|&a| store.sort(a)).collect();
    let f = store.declare_fun(name, &sorts, result);
    store.apply(f, args).unwrap()
}
