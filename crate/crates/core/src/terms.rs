//! Signatures, terms and identities.
//!
//! Concrete syntax is prefix-only: `f(t1,...,tk)` for symbols of positive
//! arity, bare names for nullary symbols and variables. Any identifier that
//! is not declared in the governing signature is a variable. Identities are
//! written `TERM = TERM`; an identity file (`.ids`) holds one per line, with
//! `#` comment lines and blank lines ignored.

use std::collections::BTreeMap;
use std::fmt;

use indexmap::IndexMap;

use crate::algebras::FiniteAlgebra;
use crate::{Error, Result, Verdict};

/// Operation symbols with their arities, in declaration order.
///
/// The declaration order is significant: a [`FiniteAlgebra`] stores one table
/// per symbol in exactly this order.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    ops: IndexMap<String, usize>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.ops.len() == other.ops.len() && self.ops.iter().eq(other.ops.iter())
    }
}

impl Eq for Signature {}

impl std::hash::Hash for Signature {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (name, arity) in &self.ops {
            name.hash(state);
            arity.hash(state);
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl Signature {
    pub fn new<S: Into<String>>(ops: impl IntoIterator<Item = (S, usize)>) -> Result<Signature> {
        let mut sig = Signature::default();
        for (name, arity) in ops {
            sig.push(name, arity)?;
        }
        Ok(sig)
    }

    pub fn push(&mut self, name: impl Into<String>, arity: usize) -> Result<usize> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(Error::InvalidSignature(format!(
                "`{name}` is not a valid symbol name"
            )));
        }
        if self.ops.contains_key(&name) {
            return Err(Error::InvalidSignature(format!("duplicate symbol `{name}`")));
        }
        let idx = self.ops.len();
        self.ops.insert(name, arity);
        Ok(idx)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.ops.get(name).copied()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ops.get_index_of(name)
    }

    pub fn symbol(&self, idx: usize) -> (&str, usize) {
        let (name, arity) = self.ops.get_index(idx).expect("symbol index in range");
        (name.as_str(), *arity)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> + '_ {
        self.ops.iter().map(|(n, a)| (n.as_str(), *a))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (name, arity)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}:{arity}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(symbol.into(), args)
    }

    /// Variables in first-occurrence (left-to-right, depth-first) order.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Checks that every applied symbol is declared in `sig` with a matching
    /// arity and that no variable shares a name with a symbol.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        match self {
            Term::Var(v) => match sig.arity(v) {
                Some(_) => Err(Error::SignatureMismatch(format!(
                    "variable `{v}` collides with an operation symbol"
                ))),
                None => Ok(()),
            },
            Term::App(sym, args) => match sig.arity(sym) {
                None => Err(Error::SignatureMismatch(format!(
                    "symbol `{sym}` is not in signature {sig}"
                ))),
                Some(a) if a != args.len() => Err(Error::Arity {
                    symbol: sym.clone(),
                    expected: a,
                    found: args.len(),
                }),
                Some(_) => args.iter().try_for_each(|t| t.check(sig)),
            },
        }
    }
}

/// Canonical renderer; `parse_term` inverts it.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, args) if args.is_empty() => write!(f, "{s}"),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// An equation `lhs = rhs`, universally quantified over `vars`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
    vars: Vec<String>,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Identity {
        let mut vars = lhs.variables();
        for v in rhs.variables() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        Identity { lhs, rhs, vars }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn check(&self, sig: &Signature) -> Result<()> {
        self.lhs.check(sig)?;
        self.rhs.check(sig)
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, sig: &'a Signature) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            sig,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn unexpected(&mut self, wanted: &str) -> Error {
        match self.peek() {
            None => self.error(format!("unexpected end of input, expected {wanted}")),
            Some(c) => self.error(format!("unexpected `{}`, expected {wanted}", c as char)),
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.unexpected("an identifier"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn term(&mut self) -> Result<Term> {
        let name = self.ident()?;
        let applied = self.peek() == Some(b'(');
        let mut args = Vec::new();
        if applied {
            self.pos += 1;
            if self.peek() == Some(b')') {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.unexpected("`,` or `)`")),
                    }
                }
            }
        }
        match self.sig.arity(&name) {
            Some(arity) if arity != args.len() => Err(Error::Arity {
                symbol: name,
                expected: arity,
                found: args.len(),
            }),
            Some(_) => Ok(Term::App(name, args)),
            None if applied => Err(Error::UnknownOperation(name)),
            None => Ok(Term::Var(name)),
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of input")),
        }
    }
}

pub fn parse_term(text: &str, sig: &Signature) -> Result<Term> {
    let mut p = Parser::new(text, sig);
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_identity(text: &str, sig: &Signature) -> Result<Identity> {
    let mut p = Parser::new(text, sig);
    let lhs = p.term()?;
    p.expect(b'=')?;
    let rhs = p.term()?;
    p.finish()?;
    Ok(Identity::new(lhs, rhs))
}

/// Parses the contents of an `.ids` file.
pub fn parse_identities(text: &str, sig: &Signature) -> Result<Vec<Identity>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push(parse_identity(trimmed, sig).map_err(|e| e.at_line(i + 1))?);
    }
    Ok(out)
}

pub fn render_identities(ids: &[Identity]) -> String {
    ids.iter().map(|id| format!("{id}\n")).collect()
}

/// A term resolved against an algebra: symbols become table indices and
/// variables become slots in an assignment vector.
#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Var(usize),
    App(usize, Vec<Compiled>),
}

impl Compiled {
    pub(crate) fn new(t: &Term, sig: &Signature, vars: &[String]) -> Result<Compiled> {
        match t {
            Term::Var(v) => match vars.iter().position(|w| w == v) {
                Some(slot) => Ok(Compiled::Var(slot)),
                None => Err(Error::UnboundVariable(v.clone())),
            },
            Term::App(sym, args) => {
                let idx = sig.index_of(sym).ok_or_else(|| {
                    Error::SignatureMismatch(format!("symbol `{sym}` is not in signature {sig}"))
                })?;
                let (_, arity) = sig.symbol(idx);
                if arity != args.len() {
                    return Err(Error::SignatureMismatch(format!(
                        "symbol `{sym}` has arity {arity} in the algebra, {} in the term",
                        args.len()
                    )));
                }
                let args = args
                    .iter()
                    .map(|a| Compiled::new(a, sig, vars))
                    .collect::<Result<_>>()?;
                Ok(Compiled::App(idx, args))
            }
        }
    }

    pub(crate) fn eval(&self, alg: &FiniteAlgebra, env: &[usize]) -> usize {
        match self {
            Compiled::Var(slot) => env[*slot],
            Compiled::App(op, args) => {
                let mut buf = [0usize; 8];
                if args.len() <= buf.len() {
                    for (b, a) in buf.iter_mut().zip(args) {
                        *b = a.eval(alg, env);
                    }
                    alg.apply(*op, &buf[..args.len()])
                } else {
                    let vals: Vec<usize> = args.iter().map(|a| a.eval(alg, env)).collect();
                    alg.apply(*op, &vals)
                }
            }
        }
    }
}

pub fn eval_term(alg: &FiniteAlgebra, t: &Term, env: &BTreeMap<String, usize>) -> Result<usize> {
    let vars: Vec<String> = env.keys().cloned().collect();
    let compiled = Compiled::new(t, alg.signature(), &vars)?;
    let values: Vec<usize> = env.values().copied().collect();
    for &v in &values {
        alg.check_element(v)?;
    }
    Ok(compiled.eval(alg, &values))
}

/// A falsifying assignment, in the identity's variable order.
pub type Assignment = Vec<(String, usize)>;

/// Calls `f` on every assignment of `0..n` to `k` slots in lexicographic
/// order (slot 0 most significant) until `f` returns `false`.
pub(crate) fn for_each_assignment(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut vals = vec![0usize; k];
    loop {
        if !f(&vals) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] < n {
                break;
            }
            vals[i] = 0;
        }
    }
}

/// Checks `alg ⊨ id`. On failure the witness is the lexicographically least
/// falsifying assignment with respect to `id.vars()`.
pub fn satisfies_identity(alg: &FiniteAlgebra, id: &Identity) -> Result<Verdict<Assignment>> {
    satisfies_identity_ordered(alg, id, id.vars())
}

/// Same as [`satisfies_identity`] but enumerates assignments in the given
/// variable order, which must be a permutation of `id.vars()`.
pub fn satisfies_identity_ordered(
    alg: &FiniteAlgebra,
    id: &Identity,
    order: &[String],
) -> Result<Verdict<Assignment>> {
    let mut sorted_order = order.to_vec();
    sorted_order.sort();
    let mut sorted_vars = id.vars().to_vec();
    sorted_vars.sort();
    if sorted_order != sorted_vars {
        return Err(Error::SignatureMismatch(
            "variable order is not a permutation of the identity's variables".into(),
        ));
    }
    let lhs = Compiled::new(&id.lhs, alg.signature(), order)?;
    let rhs = Compiled::new(&id.rhs, alg.signature(), order)?;
    let mut witness = None;
    for_each_assignment(alg.size(), order.len(), |env| {
        if lhs.eval(alg, env) != rhs.eval(alg, env) {
            witness = Some(order.iter().cloned().zip(env.iter().copied()).collect());
            false
        } else {
            true
        }
    });
    Ok(witness.into())
}

/// Whether `alg` satisfies every identity in `ids`.
pub fn satisfies_all(alg: &FiniteAlgebra, ids: &[Identity]) -> Result<bool> {
    for id in ids {
        if !satisfies_identity(alg, id)?.holds() {
            return Ok(false);
        }
    }
    Ok(true)
}
