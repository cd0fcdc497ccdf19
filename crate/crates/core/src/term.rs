//! Hash-consed term DAG shared by every stage of the solver.
//!
//! Terms are interned in a [`TermStore`]: structurally equal nodes always get
//! the same [`TermId`], ids are handed out in creation order, and every node
//! carries an age taken from the store's creation counter. Children are always
//! created before their parent, so a child id is strictly smaller than the id
//! of any node that contains it.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Syntactic category of a term node.
///
/// The enumeration is closed and ordered; its position is the feature index
/// used by the bag-of-kinds extractor. All uninterpreted symbols share
/// [`Kind::UfApply`] (applications) or [`Kind::UfConst`] (constants)
/// regardless of their name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Not,
    And,
    Or,
    Implies,
    Equiv,
    Equal,
    Distinct,
    Forall,
    Exists,
    BoundVar,
    Var,
    Skolem,
    UfApply,
    UfConst,
    Numeral,
    Lt,
    Gt,
    Le,
    Ge,
    True,
    False,
    InstLemma,
}

impl Kind {
    pub const ALL: [Kind; 22] = [
        Kind::Not,
        Kind::And,
        Kind::Or,
        Kind::Implies,
        Kind::Equiv,
        Kind::Equal,
        Kind::Distinct,
        Kind::Forall,
        Kind::Exists,
        Kind::BoundVar,
        Kind::Var,
        Kind::Skolem,
        Kind::UfApply,
        Kind::UfConst,
        Kind::Numeral,
        Kind::Lt,
        Kind::Gt,
        Kind::Le,
        Kind::Ge,
        Kind::True,
        Kind::False,
        Kind::InstLemma,
    ];

    /// Number of kinds (the half-width of a concatenated feature vector).
    pub const COUNT: usize = Self::ALL.len();

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Kind> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Not => "NOT",
            Kind::And => "AND",
            Kind::Or => "OR",
            Kind::Implies => "IMPLIES",
            Kind::Equiv => "EQUIV",
            Kind::Equal => "EQUAL",
            Kind::Distinct => "DISTINCT",
            Kind::Forall => "FORALL",
            Kind::Exists => "EXISTS",
            Kind::BoundVar => "BOUND_VAR",
            Kind::Var => "VAR",
            Kind::Skolem => "SKOLEM",
            Kind::UfApply => "UF_APPLY",
            Kind::UfConst => "UF_CONST",
            Kind::Numeral => "NUMERAL",
            Kind::Lt => "LT",
            Kind::Gt => "GT",
            Kind::Le => "LE",
            Kind::Ge => "GE",
            Kind::True => "TRUE",
            Kind::False => "FALSE",
            Kind::InstLemma => "INST_LEMMA",
        }
    }

    /// FNV-1a hash of the ordered kind names. Models record it so that a model
    /// trained against a different kind table is rejected on load.
    pub fn table_checksum() -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for k in Self::ALL {
            for b in k.name().bytes().chain(std::iter::once(b',')) {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        h
    }

    pub fn is_arith_atom(self) -> bool {
        matches!(self, Kind::Lt | Kind::Gt | Kind::Le | Kind::Ge)
    }

    /// Uninterpreted function applications, including skolem functions.
    pub fn is_uninterpreted_app(self) -> bool {
        matches!(self, Kind::UfApply | Kind::Skolem)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortId(pub u32);

impl SortId {
    pub const BOOL: SortId = SortId(0);
    pub const INT: SortId = SortId(1);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(pub u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolRole {
    Function,
    BoundVar,
    Skolem,
    Numeral(i64),
}

#[derive(Clone, Debug)]
pub struct Symbol {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
    pub role: SymbolRole,
}

#[derive(Clone, Debug)]
pub struct TermData {
    pub kind: Kind,
    pub symbol: Option<SymbolId>,
    pub children: Box<[TermId]>,
    pub sort: SortId,
    pub age: u64,
    /// Free bound variables, sorted by id. Empty for ground terms.
    pub free_vars: Box<[TermId]>,
    /// Node count of the tree rendering (saturating).
    pub tree_size: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("{kind} expects {expected} argument(s), got {found}")]
    ArityMismatch {
        kind: Kind,
        expected: &'static str,
        found: usize,
    },
    #[error("sort mismatch in {context}: expected {expected}, found {found}")]
    SortMismatch {
        context: String,
        expected: String,
        found: String,
    },
    #[error("{0} requires a symbol of matching role")]
    BadSymbol(Kind),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
}

/// Where an instantiation lemma came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaOrigin {
    pub quantifier: TermId,
    pub binding: Vec<TermId>,
}

type NodeKey = (Kind, Option<SymbolId>, Box<[TermId]>);

/// Interning table for sorts, symbols and terms.
#[derive(Clone, Debug)]
pub struct TermStore {
    sorts: Vec<String>,
    sort_index: HashMap<String, SortId>,
    symbols: Vec<Symbol>,
    symbol_index: HashMap<String, SymbolId>,
    numerals: HashMap<i64, SymbolId>,
    terms: Vec<TermData>,
    table: HashMap<NodeKey, TermId>,
    lemma_origins: HashMap<TermId, LemmaOrigin>,
    fresh_counter: u32,
    true_term: TermId,
    false_term: TermId,
}

impl Default for TermStore {
    fn default() -> Self {
        Self::new()
    }
}

impl TermStore {
    pub fn new() -> Self {
        let mut store = TermStore {
            sorts: Vec::new(),
            sort_index: HashMap::new(),
            symbols: Vec::new(),
            symbol_index: HashMap::new(),
            numerals: HashMap::new(),
            terms: Vec::new(),
            table: HashMap::new(),
            lemma_origins: HashMap::new(),
            fresh_counter: 0,
            true_term: TermId(0),
            false_term: TermId(0),
        };
        store.sorts.push("Bool".into());
        store.sort_index.insert("Bool".into(), SortId::BOOL);
        store.sorts.push("Int".into());
        store.sort_index.insert("Int".into(), SortId::INT);
        store.true_term = store.mk_term(Kind::True, None, &[]).unwrap();
        store.false_term = store.mk_term(Kind::False, None, &[]).unwrap();
        store
    }

    // ---- sorts and symbols ----

    pub fn declare_sort(&mut self, name: &str) -> SortId {
        if let Some(&s) = self.sort_index.get(name) {
            return s;
        }
        let id = SortId(self.sorts.len() as u32);
        self.sorts.push(name.to_string());
        self.sort_index.insert(name.to_string(), id);
        id
    }

    pub fn sort_by_name(&self, name: &str) -> Option<SortId> {
        self.sort_index.get(name).copied()
    }

    pub fn sort_name(&self, s: SortId) -> &str {
        &self.sorts[s.0 as usize]
    }

    pub fn num_sorts(&self) -> usize {
        self.sorts.len()
    }

    /// Declares (or re-declares with the same signature) an uninterpreted symbol.
    pub fn declare_fun(&mut self, name: &str, args: &[SortId], result: SortId) -> SymbolId {
        if let Some(&id) = self.symbol_index.get(name) {
            return id;
        }
        let id = self.push_symbol(name.to_string(), args.to_vec(), result, SymbolRole::Function);
        self.symbol_index.insert(name.to_string(), id);
        id
    }

    pub fn function_by_name(&self, name: &str) -> Option<SymbolId> {
        self.symbol_index.get(name).copied()
    }

    pub fn symbol(&self, s: SymbolId) -> &Symbol {
        &self.symbols[s.0 as usize]
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols.len()
    }

    fn push_symbol(&mut self, name: String, args: Vec<SortId>, result: SortId, role: SymbolRole) -> SymbolId {
        let id = SymbolId(self.symbols.len() as u32);
        self.symbols.push(Symbol {
            name,
            args,
            result,
            role,
        });
        id
    }

    /// Creates a bound variable with its own symbol. Each binder occurrence gets
    /// a distinct variable even when the user-facing name repeats.
    pub fn fresh_bound_var(&mut self, name: &str, sort: SortId) -> TermId {
        let sym = self.push_symbol(name.to_string(), Vec::new(), sort, SymbolRole::BoundVar);
        self.mk_term(Kind::BoundVar, Some(sym), &[])
            .expect("bound variable is well formed")
    }

    pub fn fresh_skolem(&mut self, hint: &str, args: &[SortId], result: SortId) -> SymbolId {
        self.fresh_counter += 1;
        let name = format!("{hint}!{}", self.fresh_counter);
        self.push_symbol(name, args.to_vec(), result, SymbolRole::Skolem)
    }

    /// Creates a fresh uninterpreted constant whose name cannot clash with input
    /// symbols.
    pub fn fresh_constant(&mut self, hint: &str, sort: SortId) -> TermId {
        self.fresh_counter += 1;
        let name = format!("@{hint}!{}", self.fresh_counter);
        let sym = self.declare_fun(&name, &[], sort);
        self.mk_term(Kind::UfConst, Some(sym), &[])
            .expect("constant is well formed")
    }

    // ---- term construction ----

    pub fn true_term(&self) -> TermId {
        self.true_term
    }

    pub fn false_term(&self) -> TermId {
        self.false_term
    }

    pub fn numeral(&mut self, value: i64) -> TermId {
        let sym = match self.numerals.get(&value) {
            Some(&s) => s,
            None => {
                let s = self.push_symbol(value.to_string(), Vec::new(), SortId::INT, SymbolRole::Numeral(value));
                self.numerals.insert(value, s);
                s
            }
        };
        self.mk_term(Kind::Numeral, Some(sym), &[])
            .expect("numeral is well formed")
    }

    /// Applies an uninterpreted or skolem symbol, choosing the constant kind
    /// for nullary symbols.
    pub fn apply(&mut self, sym: SymbolId, children: &[TermId]) -> Result<TermId, TermError> {
        let kind = match self.symbol(sym).role {
            SymbolRole::Skolem => Kind::Skolem,
            SymbolRole::Function if children.is_empty() => Kind::UfConst,
            SymbolRole::Function => Kind::UfApply,
            SymbolRole::BoundVar => Kind::BoundVar,
            SymbolRole::Numeral(_) => Kind::Numeral,
        };
        self.mk_term(kind, Some(sym), children)
    }

    pub fn mk_not(&mut self, t: TermId) -> TermId {
        self.mk_term(Kind::Not, None, &[t]).expect("negation of a Boolean term")
    }

    /// Interns a node, returning the existing id for a structurally identical
    /// node.
    pub fn mk_term(&mut self, kind: Kind, symbol: Option<SymbolId>, children: &[TermId]) -> Result<TermId, TermError> {
        let key: NodeKey = (kind, symbol, children.into());
        if let Some(&id) = self.table.get(&key) {
            return Ok(id);
        }
        let sort = self.check_node(kind, symbol, children)?;
        let free_vars = self.compute_free_vars(kind, children);
        let tree_size = children
            .iter()
            .fold(1u64, |acc, c| acc.saturating_add(self.terms[c.index()].tree_size));
        let id = TermId(self.terms.len() as u32);
        let free_vars = if kind == Kind::BoundVar {
            vec![id].into_boxed_slice()
        } else {
            free_vars
        };
        self.terms.push(TermData {
            kind,
            symbol,
            children: key.2.clone(),
            sort,
            age: id.0 as u64,
            free_vars,
            tree_size,
        });
        self.table.insert(key, id);
        Ok(id)
    }

    fn check_node(&self, kind: Kind, symbol: Option<SymbolId>, children: &[TermId]) -> Result<SortId, TermError> {
        let n = children.len();
        let arity = |ok: bool, expected: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(TermError::ArityMismatch {
                    kind,
                    expected,
                    found: n,
                })
            }
        };
        match kind {
            Kind::Not => {
                arity(n == 1, "1")?;
                self.expect_sorts(kind, children, SortId::BOOL)?;
                Ok(SortId::BOOL)
            }
            Kind::And | Kind::Or => {
                arity(n >= 1, "at least 1")?;
                self.expect_sorts(kind, children, SortId::BOOL)?;
                Ok(SortId::BOOL)
            }
            Kind::Implies | Kind::Equiv | Kind::InstLemma => {
                arity(n == 2, "2")?;
                self.expect_sorts(kind, children, SortId::BOOL)?;
                Ok(SortId::BOOL)
            }
            Kind::Equal | Kind::Distinct => {
                if kind == Kind::Equal {
                    arity(n == 2, "2")?;
                } else {
                    arity(n >= 2, "at least 2")?;
                }
                let s = self.terms[children[0].index()].sort;
                self.expect_sorts(kind, children, s)?;
                Ok(SortId::BOOL)
            }
            Kind::Forall | Kind::Exists => {
                arity(n >= 2, "at least 2")?;
                for &v in &children[..n - 1] {
                    if self.terms[v.index()].kind != Kind::BoundVar {
                        return Err(TermError::BadSymbol(kind));
                    }
                }
                self.expect_sorts(kind, &children[n - 1..], SortId::BOOL)?;
                Ok(SortId::BOOL)
            }
            Kind::Lt | Kind::Gt | Kind::Le | Kind::Ge => {
                arity(n == 2, "2")?;
                self.expect_sorts(kind, children, SortId::INT)?;
                Ok(SortId::BOOL)
            }
            Kind::True | Kind::False => {
                arity(n == 0, "0")?;
                Ok(SortId::BOOL)
            }
            Kind::BoundVar | Kind::Var => {
                arity(n == 0, "0")?;
                let sym = self.require_symbol(kind, symbol, |r| *r == SymbolRole::BoundVar)?;
                Ok(sym.result)
            }
            Kind::Numeral => {
                arity(n == 0, "0")?;
                let sym = self.require_symbol(kind, symbol, |r| matches!(r, SymbolRole::Numeral(_)))?;
                Ok(sym.result)
            }
            Kind::UfConst | Kind::UfApply | Kind::Skolem => {
                let sym = self.require_symbol(kind, symbol, |r| match kind {
                    Kind::Skolem => *r == SymbolRole::Skolem,
                    _ => *r == SymbolRole::Function,
                })?;
                match kind {
                    Kind::UfConst => arity(n == 0 && sym.args.is_empty(), "0")?,
                    Kind::UfApply => arity(n >= 1 && n == sym.args.len(), "the declared arity")?,
                    _ => arity(n == sym.args.len(), "the declared arity")?,
                }
                for (i, (&c, &s)) in children.iter().zip(&sym.args).enumerate() {
                    let found = self.terms[c.index()].sort;
                    if found != s {
                        return Err(TermError::SortMismatch {
                            context: format!("argument {i} of {}", sym.name),
                            expected: self.sort_name(s).to_string(),
                            found: self.sort_name(found).to_string(),
                        });
                    }
                }
                Ok(sym.result)
            }
        }
    }

    fn require_symbol(
        &self,
        kind: Kind,
        symbol: Option<SymbolId>,
        role_ok: impl Fn(&SymbolRole) -> bool,
    ) -> Result<&Symbol, TermError> {
        let sym = symbol
            .and_then(|s| self.symbols.get(s.0 as usize))
            .ok_or(TermError::BadSymbol(kind))?;
        if role_ok(&sym.role) {
            Ok(sym)
        } else {
            Err(TermError::BadSymbol(kind))
        }
    }

    fn expect_sorts(&self, kind: Kind, children: &[TermId], sort: SortId) -> Result<(), TermError> {
        for &c in children {
            let found = self.terms[c.index()].sort;
            if found != sort {
                return Err(TermError::SortMismatch {
                    context: kind.name().to_string(),
                    expected: self.sort_name(sort).to_string(),
                    found: self.sort_name(found).to_string(),
                });
            }
        }
        Ok(())
    }

    fn compute_free_vars(&self, kind: Kind, children: &[TermId]) -> Box<[TermId]> {
        let mut vars: Vec<TermId> = Vec::new();
        let binders: &[TermId] = match kind {
            Kind::Forall | Kind::Exists => &children[..children.len() - 1],
            _ => &[],
        };
        let scanned = match kind {
            Kind::Forall | Kind::Exists => &children[children.len() - 1..],
            _ => children,
        };
        for &c in scanned {
            for &v in self.terms[c.index()].free_vars.iter() {
                if !binders.contains(&v) {
                    vars.push(v);
                }
            }
        }
        vars.sort();
        vars.dedup();
        vars.into_boxed_slice()
    }

    // ---- accessors ----

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn data(&self, t: TermId) -> &TermData {
        &self.terms[t.index()]
    }

    pub fn kind(&self, t: TermId) -> Kind {
        self.terms[t.index()].kind
    }

    pub fn sort(&self, t: TermId) -> SortId {
        self.terms[t.index()].sort
    }

    pub fn children(&self, t: TermId) -> &[TermId] {
        &self.terms[t.index()].children
    }

    pub fn symbol_of(&self, t: TermId) -> Option<SymbolId> {
        self.terms[t.index()].symbol
    }

    pub fn age(&self, t: TermId) -> u64 {
        self.terms[t.index()].age
    }

    pub fn is_ground(&self, t: TermId) -> bool {
        self.terms[t.index()].free_vars.is_empty()
    }

    pub fn free_vars(&self, t: TermId) -> &[TermId] {
        &self.terms[t.index()].free_vars
    }

    pub fn tree_size(&self, t: TermId) -> u64 {
        self.terms[t.index()].tree_size
    }

    pub fn numeral_value(&self, t: TermId) -> Option<i64> {
        let d = &self.terms[t.index()];
        match (d.kind, d.symbol) {
            (Kind::Numeral, Some(s)) => match self.symbols[s.0 as usize].role {
                SymbolRole::Numeral(v) => Some(v),
                _ => None,
            },
            _ => None,
        }
    }

    /// Looks up a node without creating it.
    pub fn find(&self, kind: Kind, symbol: Option<SymbolId>, children: &[TermId]) -> Option<TermId> {
        self.table.get(&(kind, symbol, children.into())).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = TermId> {
        (0..self.terms.len() as u32).map(TermId)
    }

    pub fn display(&self, t: TermId) -> TermDisplay<'_> {
        TermDisplay { store: self, term: t }
    }

    // ---- substitution and lemmas ----

    /// Replaces free bound variables according to `binding`.
    ///
    /// Variables bound by a quantifier nested inside `t` are left alone. Every
    /// other bound variable must be covered by the binding, and each target
    /// must be ground and of the variable's sort.
    pub fn substitute(&mut self, t: TermId, binding: &HashMap<TermId, TermId>) -> Result<TermId, TermError> {
        for (&var, &target) in binding {
            if self.sort(var) != self.sort(target) {
                return Err(TermError::SortMismatch {
                    context: format!("binding of {}", self.display(var)),
                    expected: self.sort_name(self.sort(var)).to_string(),
                    found: self.sort_name(self.sort(target)).to_string(),
                });
            }
            if !self.is_ground(target) {
                return Err(TermError::UnboundVariable(self.display(target).to_string()));
            }
        }
        let mut memo = HashMap::new();
        self.subst_rec(t, binding, false, &mut Vec::new(), &mut memo)
    }

    /// Like [`TermStore::substitute`] but leaves variables outside `binding`
    /// untouched and performs no sort or groundness checks on the targets.
    pub fn replace_vars(&mut self, t: TermId, binding: &HashMap<TermId, TermId>) -> Result<TermId, TermError> {
        let mut memo = HashMap::new();
        self.subst_rec(t, binding, true, &mut Vec::new(), &mut memo)
    }

    fn subst_rec(
        &mut self,
        t: TermId,
        binding: &HashMap<TermId, TermId>,
        partial: bool,
        shadowed: &mut Vec<TermId>,
        memo: &mut HashMap<TermId, TermId>,
    ) -> Result<TermId, TermError> {
        if self.is_ground(t) {
            return Ok(t);
        }
        if shadowed.is_empty() {
            if let Some(&r) = memo.get(&t) {
                return Ok(r);
            }
        }
        let d = self.data(t);
        let (kind, symbol) = (d.kind, d.symbol);
        let children: Vec<TermId> = d.children.to_vec();
        let result = match kind {
            Kind::BoundVar => {
                if shadowed.contains(&t) {
                    t
                } else {
                    match binding.get(&t) {
                        Some(&r) => r,
                        None if partial => t,
                        None => return Err(TermError::UnboundVariable(self.display(t).to_string())),
                    }
                }
            }
            Kind::Forall | Kind::Exists => {
                let n = children.len();
                let mark = shadowed.len();
                shadowed.extend_from_slice(&children[..n - 1]);
                let body = self.subst_rec(children[n - 1], binding, partial, shadowed, memo);
                shadowed.truncate(mark);
                let mut new_children = children[..n - 1].to_vec();
                new_children.push(body?);
                self.mk_term(kind, symbol, &new_children)?
            }
            _ => {
                let mut new_children = Vec::with_capacity(children.len());
                for c in children {
                    new_children.push(self.subst_rec(c, binding, partial, shadowed, memo)?);
                }
                self.mk_term(kind, symbol, &new_children)?
            }
        };
        if shadowed.is_empty() {
            memo.insert(t, result);
        }
        Ok(result)
    }

    /// Builds the instantiation lemma `q -> body[vars/terms]` and records its
    /// provenance. `terms` is aligned with `q.bound_vars`.
    pub fn mk_inst_lemma(&mut self, q: &Quantifier, terms: &[TermId]) -> Result<TermId, TermError> {
        if terms.len() != q.bound_vars.len() {
            return Err(TermError::ArityMismatch {
                kind: Kind::Forall,
                expected: "one term per bound variable",
                found: terms.len(),
            });
        }
        let binding: HashMap<TermId, TermId> = q.bound_vars.iter().copied().zip(terms.iter().copied()).collect();
        let instance = self.substitute(q.body, &binding)?;
        let lemma = self.mk_term(Kind::Implies, None, &[q.term, instance])?;
        self.lemma_origins.entry(lemma).or_insert_with(|| LemmaOrigin {
            quantifier: q.term,
            binding: terms.to_vec(),
        });
        Ok(lemma)
    }

    pub fn lemma_origin(&self, lemma: TermId) -> Option<&LemmaOrigin> {
        self.lemma_origins.get(&lemma)
    }

    /// Collects every subterm of `t` (including `t`) in post-order, each once.
    pub fn subterms(&self, t: TermId) -> Vec<TermId> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![(t, false)];
        while let Some((u, expanded)) = stack.pop() {
            if expanded {
                out.push(u);
                continue;
            }
            if !seen.insert(u) {
                continue;
            }
            stack.push((u, true));
            for &c in self.children(u).iter().rev() {
                if !seen.contains(&c) {
                    stack.push((c, false));
                }
            }
        }
        out
    }
}

/// A universally quantified formula `forall vars. body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quantifier {
    pub term: TermId,
    pub bound_vars: Vec<TermId>,
    pub body: TermId,
}

impl Quantifier {
    pub fn from_term(store: &TermStore, t: TermId) -> Option<Quantifier> {
        if store.kind(t) != Kind::Forall {
            return None;
        }
        let ch = store.children(t);
        Some(Quantifier {
            term: t,
            bound_vars: ch[..ch.len() - 1].to_vec(),
            body: ch[ch.len() - 1],
        })
    }
}

pub struct TermDisplay<'a> {
    store: &'a TermStore,
    term: TermId,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self.store, self.term, f)
    }
}

fn write_term(s: &TermStore, t: TermId, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let d = s.data(t);
    let name = d.symbol.map(|sym| s.symbol(sym).name.as_str());
    let op = match d.kind {
        Kind::True => return f.write_str("true"),
        Kind::False => return f.write_str("false"),
        Kind::Numeral | Kind::BoundVar | Kind::Var | Kind::UfConst => return f.write_str(name.unwrap_or("?")),
        Kind::Skolem if d.children.is_empty() => return f.write_str(name.unwrap_or("?")),
        Kind::Forall | Kind::Exists => {
            let n = d.children.len();
            f.write_str(if d.kind == Kind::Forall {
                "(forall ("
            } else {
                "(exists ("
            })?;
            for (i, &v) in d.children[..n - 1].iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "({} {})", s.display(v), s.sort_name(s.sort(v)))?;
            }
            f.write_str(") ")?;
            write_term(s, d.children[n - 1], f)?;
            return f.write_str(")");
        }
        Kind::UfApply | Kind::Skolem => name.unwrap_or("?"),
        Kind::Not => "not",
        Kind::And => "and",
        Kind::Or => "or",
        Kind::Implies | Kind::InstLemma => "=>",
        Kind::Equiv | Kind::Equal => "=",
        Kind::Distinct => "distinct",
        Kind::Lt => "<",
        Kind::Gt => ">",
        Kind::Le => "<=",
        Kind::Ge => ">=",
    };
    write!(f, "({op}")?;
    for &c in d.children.iter() {
        f.write_str(" ")?;
        write_term(s, c, f)?;
    }
    f.write_str(")")
}
