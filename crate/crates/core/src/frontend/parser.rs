//! Reader for the supported SMT-LIB subset.

use std::collections::HashMap;

use thiserror::Error;

use crate::term::{Kind, SortId, SymbolId, SymbolRole, TermError, TermId, TermStore};

/// A parsed input problem: declarations plus the asserted formulas in input
/// order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub name: String,
    pub sorts: Vec<SortId>,
    pub signature: Vec<SymbolId>,
    pub asserted: Vec<TermId>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown symbol `{name}`")]
    UnknownSymbol { line: usize, col: usize, name: String },
    #[error("{line}:{col}: `{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        line: usize,
        col: usize,
        name: String,
        expected: String,
        found: usize,
    },
    #[error("{line}:{col}: {source}")]
    Term {
        line: usize,
        col: usize,
        #[source]
        source: TermError,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug)]
enum Sexp {
    Atom(String, Pos),
    Str(Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::Str(p) | Sexp::List(_, p) => *p,
        }
    }
}

fn syntax(p: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line: p.line,
        col: p.col,
        msg: msg.into(),
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read_all(&mut self) -> Result<Vec<Sexp>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            if self.chars.peek().is_none() {
                return Ok(out);
            }
            out.push(self.read()?);
        }
    }

    fn read(&mut self) -> Result<Sexp, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        match self.chars.peek().copied() {
            None => Err(syntax(start, "unexpected end of input")),
            Some(')') => Err(syntax(start, "unexpected `)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(syntax(start, "unclosed `(`")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some('"') => {
                self.bump();
                loop {
                    match self.bump() {
                        None => return Err(syntax(start, "unterminated string literal")),
                        Some('"') => {
                            if self.chars.peek() == Some(&'"') {
                                self.bump();
                            } else {
                                return Ok(Sexp::Str(start));
                            }
                        }
                        Some(_) => {}
                    }
                }
            }
            Some('|') => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(syntax(start, "unterminated quoted symbol")),
                        Some('|') => return Ok(Sexp::Atom(s, start)),
                        Some(c) => s.push(c),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '"' || c == '|' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Sexp::Atom(s, start))
            }
        }
    }
}

struct Builder<'s> {
    store: &'s mut TermStore,
    problem: Problem,
    scope: Vec<(String, TermId)>,
}

/// Parses `text` into `store`, returning the problem declarations and
/// assertions.
pub fn parse(text: &str, name: &str, store: &mut TermStore) -> Result<Problem, ParseError> {
    let mut reader = Reader {
        chars: text.chars().peekable(),
        pos: Pos { line: 1, col: 1 },
    };
    let commands = reader.read_all()?;
    let mut b = Builder {
        store,
        problem: Problem {
            name: name.to_string(),
            ..Problem::default()
        },
        scope: Vec::new(),
    };
    for cmd in &commands {
        b.command(cmd)?;
    }
    Ok(b.problem)
}

fn atom(s: &Sexp) -> Option<&str> {
    match s {
        Sexp::Atom(a, _) => Some(a),
        _ => None,
    }
}

fn is_numeral(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

impl Builder<'_> {
    fn command(&mut self, cmd: &Sexp) -> Result<(), ParseError> {
        let Sexp::List(items, pos) = cmd else {
            return Err(syntax(cmd.pos(), "expected a command"));
        };
        let pos = *pos;
        let head = items
            .first()
            .and_then(atom)
            .ok_or_else(|| syntax(pos, "expected a command name"))?;
        let args = &items[1..];
        match head {
            "set-logic" => {
                if args.len() != 1 || atom(&args[0]).is_none() {
                    return Err(syntax(pos, "set-logic expects one symbol"));
                }
            }
            "set-info" => {
                if args.is_empty() || !atom(&args[0]).is_some_and(|k| k.starts_with(':')) {
                    return Err(syntax(pos, "set-info expects a keyword"));
                }
            }
            "check-sat" | "exit" => {
                if !args.is_empty() {
                    return Err(syntax(pos, format!("{head} takes no arguments")));
                }
            }
            "declare-sort" => {
                let name = args
                    .first()
                    .and_then(atom)
                    .ok_or_else(|| syntax(pos, "declare-sort expects a name"))?;
                match args.get(1).map(atom) {
                    None | Some(Some("0")) if args.len() <= 2 => {}
                    _ => return Err(syntax(pos, "only nullary sorts are supported")),
                }
                if self.store.sort_by_name(name).is_some() || self.store.function_by_name(name).is_some() {
                    return Err(syntax(pos, format!("`{name}` is already declared")));
                }
                let s = self.store.declare_sort(name);
                self.problem.sorts.push(s);
            }
            "declare-fun" | "declare-const" => {
                let (name, params, result) = match (head, args) {
                    ("declare-fun", [n, Sexp::List(ps, _), r]) => (n, ps.as_slice(), r),
                    ("declare-const", [n, r]) => (n, &[][..], r),
                    _ => return Err(syntax(pos, format!("malformed {head}"))),
                };
                let name = atom(name).ok_or_else(|| syntax(pos, "expected a function name"))?;
                if self.store.function_by_name(name).is_some() || is_numeral(name) || name.starts_with('@') {
                    return Err(syntax(pos, format!("`{name}` cannot be declared")));
                }
                let mut arg_sorts = Vec::new();
                for p in params {
                    let s = self.sort(p)?;
                    if s == SortId::BOOL {
                        return Err(syntax(p.pos(), "Boolean arguments are not supported"));
                    }
                    arg_sorts.push(s);
                }
                let result = self.sort(result)?;
                let sym = self.store.declare_fun(name, &arg_sorts, result);
                self.problem.signature.push(sym);
            }
            "assert" => {
                let [t] = args else {
                    return Err(syntax(pos, "assert expects one term"));
                };
                let term = self.term(t)?;
                if self.store.sort(term) != SortId::BOOL {
                    return Err(ParseError::Term {
                        line: pos.line,
                        col: pos.col,
                        source: TermError::SortMismatch {
                            context: "assert".into(),
                            expected: "Bool".into(),
                            found: self.store.sort_name(self.store.sort(term)).into(),
                        },
                    });
                }
                self.problem.asserted.push(term);
            }
            other => return Err(syntax(pos, format!("unsupported command `{other}`"))),
        }
        Ok(())
    }

    fn sort(&self, s: &Sexp) -> Result<SortId, ParseError> {
        let name = atom(s).ok_or_else(|| syntax(s.pos(), "expected a sort name"))?;
        self.store.sort_by_name(name).ok_or_else(|| ParseError::UnknownSymbol {
            line: s.pos().line,
            col: s.pos().col,
            name: name.to_string(),
        })
    }

    fn mk(&mut self, pos: Pos, kind: Kind, children: &[TermId]) -> Result<TermId, ParseError> {
        self.store
            .mk_term(kind, None, children)
            .map_err(|source| ParseError::Term {
                line: pos.line,
                col: pos.col,
                source,
            })
    }

    fn arity(pos: Pos, name: &str, expected: &str, found: usize) -> ParseError {
        ParseError::ArityMismatch {
            line: pos.line,
            col: pos.col,
            name: name.to_string(),
            expected: expected.to_string(),
            found,
        }
    }

    fn term(&mut self, s: &Sexp) -> Result<TermId, ParseError> {
        match s {
            Sexp::Str(p) => Err(syntax(*p, "string literals are not terms")),
            Sexp::Atom(a, p) => self.symbol_term(a, *p),
            Sexp::List(items, p) => {
                let p = *p;
                let Some(head) = items.first() else {
                    return Err(syntax(p, "empty application"));
                };
                let Some(head) = atom(head) else {
                    return Err(syntax(p, "expected an operator"));
                };
                let args = &items[1..];
                match head {
                    "forall" | "exists" => return self.binder(head == "forall", args, p),
                    "let" | "!" | "ite" | "-" | "+" | "*" => {
                        return Err(syntax(p, format!("`{head}` is not supported")));
                    }
                    _ => {}
                }
                let children = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                let n = children.len();
                match head {
                    "not" => {
                        if n != 1 {
                            return Err(Self::arity(p, head, "1", n));
                        }
                        self.mk(p, Kind::Not, &children)
                    }
                    "and" | "or" => {
                        if n == 0 {
                            return Err(Self::arity(p, head, "at least 1", n));
                        }
                        let kind = if head == "and" { Kind::And } else { Kind::Or };
                        self.mk(p, kind, &children)
                    }
                    "=>" => {
                        if n < 2 {
                            return Err(Self::arity(p, head, "at least 2", n));
                        }
                        let mut acc = children[n - 1];
                        for &c in children[..n - 1].iter().rev() {
                            acc = self.mk(p, Kind::Implies, &[c, acc])?;
                        }
                        Ok(acc)
                    }
                    "=" => {
                        if n < 2 {
                            return Err(Self::arity(p, head, "at least 2", n));
                        }
                        let kind = if self.store.sort(children[0]) == SortId::BOOL {
                            Kind::Equiv
                        } else {
                            Kind::Equal
                        };
                        let mut pairs = Vec::new();
                        for w in children.windows(2) {
                            pairs.push(self.mk(p, kind, w)?);
                        }
                        if pairs.len() == 1 {
                            Ok(pairs[0])
                        } else {
                            self.mk(p, Kind::And, &pairs)
                        }
                    }
                    "distinct" => {
                        if n < 2 {
                            return Err(Self::arity(p, head, "at least 2", n));
                        }
                        self.mk(p, Kind::Distinct, &children)
                    }
                    "<" | ">" | "<=" | ">=" => {
                        if n != 2 {
                            return Err(Self::arity(p, head, "2", n));
                        }
                        let kind = match head {
                            "<" => Kind::Lt,
                            ">" => Kind::Gt,
                            "<=" => Kind::Le,
                            _ => Kind::Ge,
                        };
                        self.mk(p, kind, &children)
                    }
                    name => {
                        let sym = self
                            .store
                            .function_by_name(name)
                            .ok_or_else(|| ParseError::UnknownSymbol {
                                line: p.line,
                                col: p.col,
                                name: name.to_string(),
                            })?;
                        let expected = self.store.symbol(sym).args.len();
                        if expected != n {
                            return Err(Self::arity(p, name, &expected.to_string(), n));
                        }
                        self.store.apply(sym, &children).map_err(|source| ParseError::Term {
                            line: p.line,
                            col: p.col,
                            source,
                        })
                    }
                }
            }
        }
    }

    fn symbol_term(&mut self, a: &str, p: Pos) -> Result<TermId, ParseError> {
        match a {
            "true" => return Ok(self.store.true_term()),
            "false" => return Ok(self.store.false_term()),
            _ => {}
        }
        if is_numeral(a) {
            let v: i64 = a.parse().map_err(|_| syntax(p, "numeral out of range"))?;
            return Ok(self.store.numeral(v));
        }
        if let Some((_, v)) = self.scope.iter().rev().find(|(n, _)| n == a) {
            return Ok(*v);
        }
        let sym = self
            .store
            .function_by_name(a)
            .ok_or_else(|| ParseError::UnknownSymbol {
                line: p.line,
                col: p.col,
                name: a.to_string(),
            })?;
        let s = self.store.symbol(sym);
        debug_assert_eq!(s.role, SymbolRole::Function);
        if !s.args.is_empty() {
            return Err(Self::arity(p, a, &s.args.len().to_string(), 0));
        }
        self.store.apply(sym, &[]).map_err(|source| ParseError::Term {
            line: p.line,
            col: p.col,
            source,
        })
    }

    fn binder(&mut self, universal: bool, args: &[Sexp], p: Pos) -> Result<TermId, ParseError> {
        let [Sexp::List(vars, _), body] = args else {
            return Err(syntax(p, "quantifier expects a variable list and a body"));
        };
        if vars.is_empty() {
            return Err(syntax(p, "quantifier binds no variables"));
        }
        let mark = self.scope.len();
        let mut bound = Vec::new();
        let mut names = HashMap::new();
        for v in vars {
            let Sexp::List(pair, vp) = v else {
                return Err(syntax(v.pos(), "expected (name Sort)"));
            };
            let [name, sort] = pair.as_slice() else {
                return Err(syntax(*vp, "expected (name Sort)"));
            };
            let name = atom(name).ok_or_else(|| syntax(*vp, "expected a variable name"))?;
            if names.insert(name.to_string(), ()).is_some() {
                return Err(syntax(*vp, format!("variable `{name}` bound twice")));
            }
            let sort = self.sort(sort)?;
            if sort == SortId::BOOL {
                return Err(syntax(*vp, "Boolean bound variables are not supported"));
            }
            let var = self.store.fresh_bound_var(name, sort);
            self.scope.push((name.to_string(), var));
            bound.push(var);
        }
        let body = self.term(body);
        self.scope.truncate(mark);
        let body = body?;
        bound.push(body);
        let kind = if universal { Kind::Forall } else { Kind::Exists };
        self.mk(p, kind, &bound)
    }
}
