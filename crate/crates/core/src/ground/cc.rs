//! Congruence closure with proof-forest explanations.
//!
//! Every class keeps an explicit representative pointer per member, so the
//! whole state is a handful of flat vectors and clones cheaply; the DPLL
//! search snapshots it at every decision level.

use std::collections::{HashMap, HashSet};

use crate::term::{Kind, SymbolId, TermId, TermStore};

/// Caller-chosen identifier attached to each asserted literal and reported
/// back in conflict explanations.
pub type LitTag = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Reason {
    Input(LitTag),
    Congruence(usize, usize),
}

type Signature = (Kind, Option<SymbolId>, Box<[usize]>);

#[derive(Clone, Debug)]
pub struct CongruenceState {
    node_of: HashMap<TermId, usize>,
    terms: Vec<TermId>,
    args: Vec<Box<[usize]>>,
    head: Vec<(Kind, Option<SymbolId>)>,
    rep: Vec<usize>,
    members: Vec<Vec<usize>>,
    uses: Vec<Vec<usize>>,
    /// Interpreted value (numeral, true, false) held by a class, by rep.
    value: Vec<Option<usize>>,
    proof: Vec<Option<(usize, Reason)>>,
    sig: HashMap<Signature, usize>,
    diseqs: Vec<(usize, usize, LitTag)>,
    pending: Vec<(usize, usize, Reason)>,
    conflict: Option<Vec<LitTag>>,
    true_node: usize,
}

/// Outcome of asserting a literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CcResult {
    Ok,
    /// Tags of asserted literals that together are inconsistent.
    Conflict(Vec<LitTag>),
}

/// Evaluates a comparison or equality whose arguments are both numerals.
/// Returns `None` when either side is not a numeral.
pub fn eval_numeral_atom(store: &TermStore, atom: TermId) -> Option<bool> {
    let kind = store.kind(atom);
    if !(kind.is_arith_atom() || kind == Kind::Equal) {
        return None;
    }
    let ch = store.children(atom);
    let a = store.numeral_value(ch[0])?;
    let b = store.numeral_value(ch[1])?;
    Some(match kind {
        Kind::Lt => a < b,
        Kind::Gt => a > b,
        Kind::Le => a <= b,
        Kind::Ge => a >= b,
        _ => a == b,
    })
}

fn is_value(kind: Kind) -> bool {
    matches!(kind, Kind::Numeral | Kind::True | Kind::False)
}

impl CongruenceState {
    pub fn new(store: &TermStore) -> Self {
        let mut cc = CongruenceState {
            node_of: HashMap::new(),
            terms: Vec::new(),
            args: Vec::new(),
            head: Vec::new(),
            rep: Vec::new(),
            members: Vec::new(),
            uses: Vec::new(),
            value: Vec::new(),
            proof: Vec::new(),
            sig: HashMap::new(),
            diseqs: Vec::new(),
            pending: Vec::new(),
            conflict: None,
            true_node: 0,
        };
        cc.true_node = cc.add_term(store, store.true_term());
        cc.add_term(store, store.false_term());
        cc
    }

    pub fn is_consistent(&self) -> bool {
        self.conflict.is_none()
    }

    pub fn conflict(&self) -> Option<&[LitTag]> {
        self.conflict.as_deref()
    }

    pub fn is_registered(&self, t: TermId) -> bool {
        self.node_of.contains_key(&t)
    }

    pub fn registered_terms(&self) -> &[TermId] {
        &self.terms
    }

    /// Registers a ground term and its subterms. Terms with bound variables
    /// (opaque quantifiers) are registered as leaves.
    pub fn add_term(&mut self, store: &TermStore, t: TermId) -> usize {
        if let Some(&n) = self.node_of.get(&t) {
            return n;
        }
        let kind = store.kind(t);
        let has_args =
            store.is_ground(t) && !store.children(t).is_empty() && !matches!(kind, Kind::Forall | Kind::Exists);
        let args: Box<[usize]> = if has_args {
            store.children(t).iter().map(|&c| self.add_term(store, c)).collect()
        } else {
            Box::new([])
        };
        let n = self.terms.len();
        self.node_of.insert(t, n);
        self.terms.push(t);
        self.args.push(args.clone());
        self.head.push((kind, store.symbol_of(t)));
        self.rep.push(n);
        self.members.push(vec![n]);
        self.uses.push(Vec::new());
        self.value.push(is_value(kind).then_some(n));
        self.proof.push(None);
        if !args.is_empty() {
            let mut reps: Vec<usize> = args.iter().map(|&a| self.rep[a]).collect();
            let key: Signature = (kind, store.symbol_of(t), reps.clone().into_boxed_slice());
            reps.sort_unstable();
            reps.dedup();
            for r in reps {
                self.uses[r].push(n);
            }
            match self.sig.get(&key) {
                Some(&other) => {
                    self.pending.push((n, other, Reason::Congruence(n, other)));
                    self.process();
                }
                None => {
                    self.sig.insert(key, n);
                }
            }
        }
        n
    }

    /// Asserts a ground atom with the given polarity. Predicate atoms are
    /// encoded as equalities with `true`; comparisons between numerals are
    /// evaluated directly.
    pub fn assert_literal(&mut self, store: &TermStore, atom: TermId, positive: bool, tag: LitTag) -> CcResult {
        if let Some(c) = &self.conflict {
            return CcResult::Conflict(c.clone());
        }
        let kind = store.kind(atom);
        match kind {
            Kind::True | Kind::False => {
                if (kind == Kind::True) != positive {
                    self.conflict = Some(vec![tag]);
                }
            }
            Kind::Equal => {
                let ch = store.children(atom);
                let a = self.add_term(store, ch[0]);
                let b = self.add_term(store, ch[1]);
                if positive {
                    self.pending.push((a, b, Reason::Input(tag)));
                    self.process();
                } else {
                    self.add_diseq(a, b, tag);
                }
            }
            _ if kind.is_arith_atom() && eval_numeral_atom(store, atom).is_some() => {
                if eval_numeral_atom(store, atom) != Some(positive) {
                    self.conflict = Some(vec![tag]);
                }
            }
            _ => {
                debug_assert!(!matches!(
                    kind,
                    Kind::Not | Kind::And | Kind::Or | Kind::Implies | Kind::Equiv
                ));
                let n = self.add_term(store, atom);
                if positive {
                    self.pending.push((n, self.true_node, Reason::Input(tag)));
                    self.process();
                } else {
                    self.add_diseq(n, self.true_node, tag);
                }
            }
        }
        match &self.conflict {
            Some(c) => CcResult::Conflict(c.clone()),
            None => CcResult::Ok,
        }
    }

    fn add_diseq(&mut self, a: usize, b: usize, tag: LitTag) {
        if self.conflict.is_some() {
            return;
        }
        if self.rep[a] == self.rep[b] {
            let mut expl = self.explain(a, b);
            expl.push(tag);
            self.set_conflict(expl);
            return;
        }
        self.diseqs.push((a, b, tag));
    }

    fn set_conflict(&mut self, mut expl: Vec<LitTag>) {
        expl.sort_unstable();
        expl.dedup();
        self.conflict = Some(expl);
        self.pending.clear();
    }

    fn process(&mut self) {
        let mut head = 0;
        while head < self.pending.len() {
            if self.conflict.is_some() {
                break;
            }
            let (a, b, reason) = self.pending[head];
            head += 1;
            let (ra, rb) = (self.rep[a], self.rep[b]);
            if ra == rb {
                continue;
            }
            self.add_proof_edge(a, b, reason);
            if let (Some(va), Some(vb)) = (self.value[ra], self.value[rb]) {
                if va != vb {
                    let expl = self.explain(va, vb);
                    self.set_conflict(expl);
                    return;
                }
            }
            let (small, large) = if self.members[ra].len() < self.members[rb].len() {
                (ra, rb)
            } else {
                (rb, ra)
            };
            let moved = std::mem::take(&mut self.members[small]);
            for &m in &moved {
                self.rep[m] = large;
            }
            self.members[large].extend(moved);
            if self.value[large].is_none() {
                self.value[large] = self.value[small];
            }
            let uses = std::mem::take(&mut self.uses[small]);
            for &u in &uses {
                let key = self.signature(u);
                match self.sig.get(&key) {
                    Some(&v) if self.rep[v] != self.rep[u] => self.pending.push((u, v, Reason::Congruence(u, v))),
                    Some(_) => {}
                    None => {
                        self.sig.insert(key, u);
                    }
                }
            }
            self.uses[large].extend(uses);
            let clash = self
                .diseqs
                .iter()
                .find(|&&(x, y, _)| self.rep[x] == self.rep[y])
                .copied();
            if let Some((x, y, tag)) = clash {
                let mut expl = self.explain(x, y);
                expl.push(tag);
                self.set_conflict(expl);
                return;
            }
        }
        self.pending.clear();
    }

    fn signature(&self, n: usize) -> Signature {
        let reps: Box<[usize]> = self.args[n].iter().map(|&a| self.rep[a]).collect();
        let (kind, sym) = self.head[n];
        (kind, sym, reps)
    }

    fn add_proof_edge(&mut self, a: usize, b: usize, reason: Reason) {
        // re-root a's proof tree at a
        let mut prev: Option<(usize, Reason)> = None;
        let mut cur = a;
        loop {
            let next = self.proof[cur];
            self.proof[cur] = prev;
            match next {
                Some((p, r)) => {
                    prev = Some((cur, r));
                    cur = p;
                }
                None => break,
            }
        }
        self.proof[a] = Some((b, reason));
    }

    fn explain(&self, a: usize, b: usize) -> Vec<LitTag> {
        let mut out = Vec::new();
        let mut todo = vec![(a, b)];
        let mut done = HashSet::new();
        while let Some((x, y)) = todo.pop() {
            if x == y || !done.insert((x.min(y), x.max(y))) {
                continue;
            }
            let mut ancestors = HashSet::new();
            let mut n = x;
            ancestors.insert(n);
            while let Some((p, _)) = self.proof[n] {
                n = p;
                ancestors.insert(n);
            }
            let mut lca = y;
            while !ancestors.contains(&lca) {
                lca = self.proof[lca].expect("nodes in one class share a proof tree").0;
            }
            for start in [x, y] {
                let mut n = start;
                while n != lca {
                    let (p, r) = self.proof[n].expect("path to common ancestor");
                    match r {
                        Reason::Input(tag) => out.push(tag),
                        Reason::Congruence(u, v) => {
                            for (&cu, &cv) in self.args[u].iter().zip(self.args[v].iter()) {
                                todo.push((cu, cv));
                            }
                        }
                    }
                    n = p;
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    // ---- queries ----

    pub fn are_equal(&self, a: TermId, b: TermId) -> bool {
        if a == b {
            return true;
        }
        match (self.node_of.get(&a), self.node_of.get(&b)) {
            (Some(&x), Some(&y)) => self.rep[x] == self.rep[y],
            _ => false,
        }
    }

    /// Representative term of `t`'s class; `t` itself when unregistered.
    pub fn find(&self, t: TermId) -> TermId {
        match self.node_of.get(&t) {
            Some(&n) => self.terms[self.rep[n]],
            None => t,
        }
    }

    /// Members of `t`'s class in registration order.
    pub fn class_of(&self, t: TermId) -> Vec<TermId> {
        match self.node_of.get(&t) {
            Some(&n) => {
                let mut m: Vec<usize> = self.members[self.rep[n]].clone();
                m.sort_unstable();
                m.into_iter().map(|i| self.terms[i]).collect()
            }
            None => vec![t],
        }
    }

    /// Number of distinct classes among registered terms.
    pub fn num_classes(&self) -> usize {
        (0..self.terms.len()).filter(|&n| self.rep[n] == n).count()
    }
}
