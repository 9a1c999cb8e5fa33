//! Object language: justification terms, formulas, evidential atoms and
//! signed formulas, together with parsing, printing and the structural
//! subformula/subterm operations.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A justification term.
///
/// Identifier classes follow the concrete syntax: lowercase identifiers
/// starting with `a`..`r` are constants, `s`..`z` are variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    /// Application `s*t`.
    App(Box<Term>, Box<Term>),
    /// Sum `s+t`.
    Sum(Box<Term>, Box<Term>),
    /// Verifier `!t`.
    Bang(Box<Term>),
    /// Negative verifier `?t`.
    Query(Box<Term>),
    /// Weak negative verifier `??t`.
    WQuery(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn cst(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn app(left: Term, right: Term) -> Term {
        Term::App(Box::new(left), Box::new(right))
    }

    pub fn sum(left: Term, right: Term) -> Term {
        Term::Sum(Box::new(left), Box::new(right))
    }

    pub fn bang(inner: Term) -> Term {
        Term::Bang(Box::new(inner))
    }

    pub fn query(inner: Term) -> Term {
        Term::Query(Box::new(inner))
    }

    pub fn wquery(inner: Term) -> Term {
        Term::WQuery(Box::new(inner))
    }

    /// Number of constructors in the term tree.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(l, r) | Term::Sum(l, r) => 1 + l.size() + r.size(),
            Term::Bang(t) | Term::Query(t) | Term::WQuery(t) => 1 + t.size(),
        }
    }
}

/// A formula of the object language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Prop(String),
    Bottom,
    Neg(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `t:A` — term `t` justifies `A`.
    Just(Term, Box<Formula>),
}

impl Formula {
    pub fn prop(name: &str) -> Formula {
        Formula::Prop(name.to_string())
    }

    pub fn neg(inner: Formula) -> Formula {
        Formula::Neg(Box::new(inner))
    }

    pub fn imp(left: Formula, right: Formula) -> Formula {
        Formula::Implies(Box::new(left), Box::new(right))
    }

    pub fn just(term: Term, body: Formula) -> Formula {
        Formula::Just(term, Box::new(body))
    }

    /// Number of constructors in the formula tree (terms count as one node).
    pub fn size(&self) -> usize {
        match self {
            Formula::Prop(_) | Formula::Bottom => 1,
            Formula::Neg(f) => 1 + f.size(),
            Formula::Implies(l, r) => 1 + l.size() + r.size(),
            Formula::Just(_, f) => 1 + f.size(),
        }
    }
}

/// An evidential atom `[t,A]`: branch-local bookkeeping asserting that `t`
/// is admissible evidence for `A`. Distinct from the formula `t:A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvidentialAtom {
    pub term: Term,
    pub body: Formula,
}

impl EvidentialAtom {
    pub fn new(term: Term, body: Formula) -> Self {
        EvidentialAtom { term, body }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    T,
    F,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::T => Sign::F,
            Sign::F => Sign::T,
        }
    }
}

/// Payload of a tableau node: a formula or an evidential atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    Formula(Formula),
    Evidential(EvidentialAtom),
}

/// A signed formula as used by the signed tableau calculus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedFormula {
    pub sign: Sign,
    pub payload: Payload,
}

impl SignedFormula {
    pub fn t(f: Formula) -> Self {
        SignedFormula {
            sign: Sign::T,
            payload: Payload::Formula(f),
        }
    }

    pub fn f(f: Formula) -> Self {
        SignedFormula {
            sign: Sign::F,
            payload: Payload::Formula(f),
        }
    }

    pub fn t_ev(term: Term, body: Formula) -> Self {
        SignedFormula {
            sign: Sign::T,
            payload: Payload::Evidential(EvidentialAtom::new(term, body)),
        }
    }

    pub fn f_ev(term: Term, body: Formula) -> Self {
        SignedFormula {
            sign: Sign::F,
            payload: Payload::Evidential(EvidentialAtom::new(term, body)),
        }
    }

    pub fn as_formula(&self) -> Option<&Formula> {
        match &self.payload {
            Payload::Formula(f) => Some(f),
            Payload::Evidential(_) => None,
        }
    }

    pub fn as_evidential(&self) -> Option<&EvidentialAtom> {
        match &self.payload {
            Payload::Evidential(e) => Some(e),
            Payload::Formula(_) => None,
        }
    }

    /// The unsigned reading of a signed formula node: `T A` is `A`,
    /// `F A` is `¬A`. Evidential payloads have no unsigned formula.
    pub fn unsigned_formula(&self) -> Option<Formula> {
        match (&self.sign, &self.payload) {
            (Sign::T, Payload::Formula(f)) => Some(f.clone()),
            (Sign::F, Payload::Formula(f)) => Some(Formula::neg(f.clone())),
            _ => None,
        }
    }
}

impl fmt::Display for SignedFormula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.sign {
            Sign::T => "T",
            Sign::F => "F",
        };
        match &self.payload {
            Payload::Formula(f) => write!(out, "{} {}", sign, f),
            Payload::Evidential(e) => write!(out, "{} {}", sign, e),
        }
    }
}

impl SignedFormula {
    /// Unsigned rendering: `T` payloads print bare, `F` payloads print with
    /// a leading `~`.
    pub fn render_unsigned(&self) -> String {
        match (&self.sign, &self.payload) {
            (Sign::T, Payload::Formula(f)) => f.to_string(),
            (Sign::F, Payload::Formula(f)) => format!("~{}", render_unary(f)),
            (Sign::T, Payload::Evidential(e)) => e.to_string(),
            (Sign::F, Payload::Evidential(e)) => format!("~{}", e),
        }
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

fn render_term_sum(t: &Term) -> String {
    match t {
        Term::Sum(l, r) => format!("{}+{}", render_term_sum(l), render_term_prod(r)),
        _ => render_term_prod(t),
    }
}

fn render_term_prod(t: &Term) -> String {
    match t {
        Term::App(l, r) => format!("{}*{}", render_term_prod(l), render_term_unary(r)),
        Term::Sum(..) => format!("({})", render_term_sum(t)),
        _ => render_term_unary(t),
    }
}

fn render_term_unary(t: &Term) -> String {
    match t {
        Term::Var(n) | Term::Const(n) => n.clone(),
        Term::Bang(inner) => format!("!{}", render_term_unary(inner)),
        // A `?`-headed operand after a single `?` would lex as `??`, so it
        // needs parentheses.
        Term::Query(inner) if matches!(**inner, Term::Query(_) | Term::WQuery(_)) => {
            format!("?({})", render_term_sum(inner))
        }
        Term::Query(inner) => format!("?{}", render_term_unary(inner)),
        Term::WQuery(inner) => format!("??{}", render_term_unary(inner)),
        Term::App(..) | Term::Sum(..) => format!("({})", render_term_sum(t)),
    }
}

/// Render a term with minimal parentheses (`*` binds tighter than `+`,
/// both left-associative, prefix `!`, `?`, `??`).
pub fn render_term(t: &Term) -> String {
    render_term_sum(t)
}

impl fmt::Display for Term {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}", render_term(self))
    }
}

fn render_unary(f: &Formula) -> String {
    match f {
        Formula::Prop(p) => p.clone(),
        Formula::Bottom => "_|_".to_string(),
        Formula::Neg(inner) => format!("~{}", render_unary(inner)),
        Formula::Just(t, body) => format!("{}:{}", render_term_sum(t), render_unary(body)),
        Formula::Implies(..) => format!("({})", render_formula(f)),
    }
}

/// Render a formula; output reparses to an equal tree.
pub fn render_formula(f: &Formula) -> String {
    match f {
        Formula::Implies(l, r) => format!("{} -> {}", render_unary(l), render_formula(r)),
        _ => render_unary(f),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}", render_formula(self))
    }
}

impl fmt::Display for EvidentialAtom {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "[{},{}]", self.term, self.body)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parse error with a byte position into the input.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser {
            input: input.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.input[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if start >= self.input.len() || !self.input[start].is_ascii_alphabetic() {
            return None;
        }
        let mut end = start + 1;
        while end < self.input.len()
            && (self.input[end].is_ascii_alphanumeric() || self.input[end] == b'_')
        {
            end += 1;
        }
        self.pos = end;
        Some(String::from_utf8_lossy(&self.input[start..end]).into_owned())
    }

    // formula := imp; imp := unary ("->" imp)?
    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.unary()?;
        if self.eat_str("->") {
            let right = self.formula()?;
            Ok(Formula::imp(left, right))
        } else {
            Ok(left)
        }
    }

    // unary := "~" unary | term ":" unary | atom
    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        if self.eat(b'~') {
            return Ok(Formula::neg(self.unary()?));
        }
        // Try `term ":" unary` with backtracking: a parenthesised term and a
        // parenthesised formula look alike until the colon.
        let save = self.pos;
        if let Ok(t) = self.term() {
            if self.eat(b':') {
                let body = self.unary()?;
                return Ok(Formula::just(t, body));
            }
        }
        self.pos = save;
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        if self.eat_str("_|_") {
            return Ok(Formula::Bottom);
        }
        if self.eat(b'(') {
            let f = self.formula()?;
            if !self.eat(b')') {
                return self.err("expected ')'");
            }
            return Ok(f);
        }
        let save = self.pos;
        match self.ident() {
            Some(name) if name.as_bytes()[0].is_ascii_uppercase() => Ok(Formula::Prop(name)),
            Some(name) => {
                self.pos = save;
                self.err(format!("'{}' is a term identifier, not an atom", name))
            }
            None => self.err("expected a formula"),
        }
    }

    // term := tsum; tsum := tprod ("+" tprod)*
    fn term(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.tprod()?;
        while self.eat(b'+') {
            let rhs = self.tprod()?;
            acc = Term::sum(acc, rhs);
        }
        Ok(acc)
    }

    // tprod := tunary ("*" tunary)*
    fn tprod(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.tunary()?;
        while self.eat(b'*') {
            let rhs = self.tunary()?;
            acc = Term::app(acc, rhs);
        }
        Ok(acc)
    }

    // tunary := "!" tunary | "?" "?"? tunary | TERMID | "(" term ")"
    fn tunary(&mut self) -> Result<Term, SyntaxError> {
        if self.eat(b'!') {
            return Ok(Term::bang(self.tunary()?));
        }
        if self.eat(b'?') {
            if self.pos < self.input.len() && self.input[self.pos] == b'?' {
                self.pos += 1;
                return Ok(Term::wquery(self.tunary()?));
            }
            return Ok(Term::query(self.tunary()?));
        }
        if self.eat(b'(') {
            let t = self.term()?;
            if !self.eat(b')') {
                return self.err("expected ')' in term");
            }
            return Ok(t);
        }
        let save = self.pos;
        match self.ident() {
            Some(name) => {
                let first = name.as_bytes()[0];
                if first.is_ascii_lowercase() {
                    if (b'a'..=b'r').contains(&first) {
                        Ok(Term::Const(name))
                    } else {
                        Ok(Term::Var(name))
                    }
                } else {
                    self.pos = save;
                    self.err("expected a term")
                }
            }
            None => self.err("expected a term"),
        }
    }
}

/// Parse a formula from its concrete syntax.
///
/// `->` is right-associative; `~` and `t:` are prefix operators binding the
/// smallest formula on their right; `*` binds tighter than `+`; `!`, `?` and
/// `??` are term prefixes; `_|_` is falsum. Uppercase identifiers are
/// propositional atoms, lowercase `a`..`r` are constants, `s`..`z` variables.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(text);
    let f = p.formula()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

/// Parse a term from its concrete syntax.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(text);
    let t = p.term()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return p.err("trailing input");
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Structural operations
// ---------------------------------------------------------------------------

/// The inductive subformula set; `f` is always a member.
pub fn subformulas(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    collect_subformulas(f, &mut out);
    out
}

pub(crate) fn collect_subformulas(f: &Formula, out: &mut BTreeSet<Formula>) {
    if !out.insert(f.clone()) {
        return;
    }
    match f {
        Formula::Prop(_) | Formula::Bottom => {}
        Formula::Neg(inner) => collect_subformulas(inner, out),
        Formula::Implies(l, r) => {
            collect_subformulas(l, out);
            collect_subformulas(r, out);
        }
        Formula::Just(_, body) => collect_subformulas(body, out),
    }
}

/// The reflexive-transitive subterm set.
pub fn subterms(t: &Term) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    collect_subterms(t, &mut out);
    out
}

pub(crate) fn collect_subterms(t: &Term, out: &mut BTreeSet<Term>) {
    if !out.insert(t.clone()) {
        return;
    }
    match t {
        Term::Var(_) | Term::Const(_) => {}
        Term::App(l, r) | Term::Sum(l, r) => {
            collect_subterms(l, out);
            collect_subterms(r, out);
        }
        Term::Bang(inner) | Term::Query(inner) | Term::WQuery(inner) => {
            collect_subterms(inner, out)
        }
    }
}

/// All terms occurring in a formula (at justification positions and inside
/// other terms), closed under subterms.
pub fn terms_of_formula(f: &Formula) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    collect_terms_of_formula(f, &mut out);
    out
}

pub(crate) fn collect_terms_of_formula(f: &Formula, out: &mut BTreeSet<Term>) {
    match f {
        Formula::Prop(_) | Formula::Bottom => {}
        Formula::Neg(inner) => collect_terms_of_formula(inner, out),
        Formula::Implies(l, r) => {
            collect_terms_of_formula(l, out);
            collect_terms_of_formula(r, out);
        }
        Formula::Just(t, body) => {
            collect_subterms(t, out);
            collect_terms_of_formula(body, out);
        }
    }
}
