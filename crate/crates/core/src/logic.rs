//! Logic configuration: axiom sets and their term signatures, axiom-instance
//! recognition, constant specifications and the CS-subformula machinery that
//! gates the analytic rules.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::syntax::{
    collect_subformulas, collect_terms_of_formula, parse_formula, Formula, SyntaxError, Term,
};

/// Names of the axiom schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomName {
    Taut,
    SumLeft,
    SumRight,
    JK,
    JT,
    JD,
    J4,
    JB,
    J5,
}

impl fmt::Display for AxiomName {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AxiomName::Taut => "Taut",
            AxiomName::SumLeft => "Sum-left",
            AxiomName::SumRight => "Sum-right",
            AxiomName::JK => "jK",
            AxiomName::JT => "jT",
            AxiomName::JD => "jD",
            AxiomName::J4 => "j4",
            AxiomName::JB => "jB",
            AxiomName::J5 => "j5",
        };
        write!(out, "{}", s)
    }
}

/// A justification logic: the base logic plus any subset of the five
/// extension axioms. The term signature is implied: `*` and `+` always,
/// `!` iff j4, `??` iff jB, `?` iff j5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LogicSpec {
    pub jt: bool,
    pub jd: bool,
    pub j4: bool,
    pub jb: bool,
    pub j5: bool,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error(
    "unknown logic name '{0}' (expected J with optional suffixes T,D,4,B,5 in that order, or LP)"
)]
pub struct LogicNameError(pub String);

impl LogicSpec {
    pub const J: LogicSpec = LogicSpec {
        jt: false,
        jd: false,
        j4: false,
        jb: false,
        j5: false,
    };

    pub fn new(jt: bool, jd: bool, j4: bool, jb: bool, j5: bool) -> Self {
        LogicSpec { jt, jd, j4, jb, j5 }
    }

    /// Parse a logic name: `J` plus suffix letters in canonical order
    /// T, D, 4, B, 5 (e.g. `JT4`); `LP` is an alias for `JT4`.
    pub fn parse(name: &str) -> Result<Self, LogicNameError> {
        let upper = name.to_ascii_uppercase();
        if upper == "LP" {
            return Ok(LogicSpec::new(true, false, true, false, false));
        }
        let rest = upper
            .strip_prefix('J')
            .ok_or_else(|| LogicNameError(name.to_string()))?;
        let order = ['T', 'D', '4', 'B', '5'];
        let mut spec = LogicSpec::J;
        let mut last = -1i32;
        for ch in rest.chars() {
            let idx = order
                .iter()
                .position(|&o| o == ch)
                .ok_or_else(|| LogicNameError(name.to_string()))? as i32;
            if idx <= last {
                return Err(LogicNameError(name.to_string()));
            }
            last = idx;
            match ch {
                'T' => spec.jt = true,
                'D' => spec.jd = true,
                '4' => spec.j4 = true,
                'B' => spec.jb = true,
                '5' => spec.j5 = true,
                _ => unreachable!(),
            }
        }
        Ok(spec)
    }

    pub fn name(&self) -> String {
        let mut s = String::from("J");
        if self.jt {
            s.push('T');
        }
        if self.jd {
            s.push('D');
        }
        if self.j4 {
            s.push('4');
        }
        if self.jb {
            s.push('B');
        }
        if self.j5 {
            s.push('5');
        }
        s
    }

    /// Axiom schemes available in this logic.
    pub fn axioms(&self) -> Vec<AxiomName> {
        let mut out = vec![
            AxiomName::Taut,
            AxiomName::SumLeft,
            AxiomName::SumRight,
            AxiomName::JK,
        ];
        if self.jt {
            out.push(AxiomName::JT);
        }
        if self.jd {
            out.push(AxiomName::JD);
        }
        if self.j4 {
            out.push(AxiomName::J4);
        }
        if self.jb {
            out.push(AxiomName::JB);
        }
        if self.j5 {
            out.push(AxiomName::J5);
        }
        out
    }

    /// Whether a term uses only operations in this logic's signature.
    pub fn term_in_signature(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) | Term::Const(_) => true,
            Term::App(l, r) | Term::Sum(l, r) => {
                self.term_in_signature(l) && self.term_in_signature(r)
            }
            Term::Bang(inner) => self.j4 && self.term_in_signature(inner),
            Term::WQuery(inner) => self.jb && self.term_in_signature(inner),
            Term::Query(inner) => self.j5 && self.term_in_signature(inner),
        }
    }

    pub fn formula_in_signature(&self, f: &Formula) -> bool {
        match f {
            Formula::Prop(_) | Formula::Bottom => true,
            Formula::Neg(inner) => self.formula_in_signature(inner),
            Formula::Implies(l, r) => self.formula_in_signature(l) && self.formula_in_signature(r),
            Formula::Just(t, body) => self.term_in_signature(t) && self.formula_in_signature(body),
        }
    }
}

impl fmt::Display for LogicSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}", self.name())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("formula '{formula}' uses term operations outside the {logic} signature")]
pub struct SignatureError {
    pub formula: String,
    pub logic: String,
}

// ---------------------------------------------------------------------------
// Tautology checking and axiom matching
// ---------------------------------------------------------------------------

/// Propositional atoms of a formula: props and maximal `t:A` subformulas,
/// each treated as an opaque unit.
fn boolean_atoms(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Bottom => {}
        Formula::Prop(_) | Formula::Just(..) => {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
        Formula::Neg(inner) => boolean_atoms(inner, out),
        Formula::Implies(l, r) => {
            boolean_atoms(l, out);
            boolean_atoms(r, out);
        }
    }
}

fn eval_boolean(f: &Formula, assignment: &HashMap<&Formula, bool>) -> bool {
    match f {
        Formula::Bottom => false,
        Formula::Prop(_) | Formula::Just(..) => *assignment.get(f).unwrap_or(&false),
        Formula::Neg(inner) => !eval_boolean(inner, assignment),
        Formula::Implies(l, r) => !eval_boolean(l, assignment) || eval_boolean(r, assignment),
    }
}

/// Truth-table validity, treating each prop and each maximal `t:A`
/// subformula as an independent atom and falsum as false. Exponential in
/// the atom count; fine at desk scale.
pub fn is_tautology(f: &Formula) -> bool {
    let mut atoms = Vec::new();
    boolean_atoms(f, &mut atoms);
    let n = atoms.len();
    for mask in 0u64..(1u64 << n) {
        let mut assignment = HashMap::new();
        for (i, a) in atoms.iter().enumerate() {
            assignment.insert(a, mask & (1 << i) != 0);
        }
        if !eval_boolean(f, &assignment) {
            return false;
        }
    }
    true
}

fn match_sum_left(f: &Formula) -> bool {
    // s:A -> (s+t):A
    if let Formula::Implies(l, r) = f {
        if let (Formula::Just(s, a), Formula::Just(Term::Sum(s2, _), a2)) = (l.as_ref(), r.as_ref())
        {
            return s == s2.as_ref() && a == a2;
        }
    }
    false
}

fn match_sum_right(f: &Formula) -> bool {
    // s:A -> (t+s):A
    if let Formula::Implies(l, r) = f {
        if let (Formula::Just(s, a), Formula::Just(Term::Sum(_, s2), a2)) = (l.as_ref(), r.as_ref())
        {
            return s == s2.as_ref() && a == a2;
        }
    }
    false
}

fn match_jk(f: &Formula) -> bool {
    // s:(A->B) -> (t:A -> (s*t):B)
    if let Formula::Implies(l, r) = f {
        if let (Formula::Just(s, lbody), Formula::Implies(m, c)) = (l.as_ref(), r.as_ref()) {
            if let (
                Formula::Implies(a, b),
                Formula::Just(t, a2),
                Formula::Just(Term::App(s2, t2), b2),
            ) = (lbody.as_ref(), m.as_ref(), c.as_ref())
            {
                return s == s2.as_ref()
                    && t == t2.as_ref()
                    && a.as_ref() == a2.as_ref()
                    && b.as_ref() == b2.as_ref();
            }
        }
    }
    false
}

fn match_jt(f: &Formula) -> bool {
    // t:A -> A
    if let Formula::Implies(l, r) = f {
        if let Formula::Just(_, a) = l.as_ref() {
            return a.as_ref() == r.as_ref();
        }
    }
    false
}

fn match_jd(f: &Formula) -> bool {
    // t:_|_ -> _|_
    if let Formula::Implies(l, r) = f {
        if let Formula::Just(_, a) = l.as_ref() {
            return a.as_ref() == &Formula::Bottom && r.as_ref() == &Formula::Bottom;
        }
    }
    false
}

fn match_j4(f: &Formula) -> bool {
    // t:A -> !t:t:A
    if let Formula::Implies(l, r) = f {
        if let (Formula::Just(t, a), Formula::Just(Term::Bang(t2), inner)) =
            (l.as_ref(), r.as_ref())
        {
            if let Formula::Just(t3, a2) = inner.as_ref() {
                return t == t2.as_ref() && t == t3 && a == a2;
            }
        }
    }
    false
}

fn match_jb(f: &Formula) -> bool {
    // ~A -> ??t:~t:A
    if let Formula::Implies(l, r) = f {
        if let (Formula::Neg(a), Formula::Just(Term::WQuery(t), inner)) = (l.as_ref(), r.as_ref()) {
            if let Formula::Neg(just) = inner.as_ref() {
                if let Formula::Just(t2, a2) = just.as_ref() {
                    return t.as_ref() == t2 && a == a2;
                }
            }
        }
    }
    false
}

fn match_j5(f: &Formula) -> bool {
    // ~t:A -> ?t:~t:A
    if let Formula::Implies(l, r) = f {
        if let (Formula::Neg(lneg), Formula::Just(Term::Query(t), inner)) = (l.as_ref(), r.as_ref())
        {
            if let (Formula::Just(t0, _), Formula::Neg(just)) = (lneg.as_ref(), inner.as_ref()) {
                if let Formula::Just(t2, a2) = just.as_ref() {
                    if let Formula::Just(t1, a1) = lneg.as_ref() {
                        return t0 == t.as_ref() && t1 == t2 && a1 == a2;
                    }
                }
            }
        }
    }
    false
}

/// Structural match against a single named scheme (ignoring the Taut
/// fallback and the scheme priority order).
pub fn matches_scheme(f: &Formula, name: AxiomName) -> bool {
    match name {
        AxiomName::Taut => is_tautology(f),
        AxiomName::SumLeft => match_sum_left(f),
        AxiomName::SumRight => match_sum_right(f),
        AxiomName::JK => match_jk(f),
        AxiomName::JT => match_jt(f),
        AxiomName::JD => match_jd(f),
        AxiomName::J4 => match_j4(f),
        AxiomName::JB => match_jb(f),
        AxiomName::J5 => match_j5(f),
    }
}

/// Recognise an axiom instance of the given logic. Returns the first
/// matching scheme in the order Taut, Sum-left, Sum-right, jK, then the
/// active extension axioms in canonical order.
pub fn is_axiom_instance(
    f: &Formula,
    logic: &LogicSpec,
) -> Result<Option<AxiomName>, SignatureError> {
    if !logic.formula_in_signature(f) {
        return Err(SignatureError {
            formula: f.to_string(),
            logic: logic.name(),
        });
    }
    for name in logic.axioms() {
        if matches_scheme(f, name) {
            return Ok(Some(name));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Constant specifications
// ---------------------------------------------------------------------------

/// A finite, downward-closed set of constant-justified axiom instances.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstantSpecification {
    pub entries: BTreeSet<Formula>,
}

impl ConstantSpecification {
    pub fn empty() -> Self {
        ConstantSpecification {
            entries: BTreeSet::new(),
        }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = Formula>) -> Self {
        ConstantSpecification {
            entries: entries.into_iter().collect(),
        }
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.entries.contains(f)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parse the CS file format: one formula per line, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        let mut entries = BTreeSet::new();
        for line in text.lines() {
            let line = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            entries.insert(parse_formula(line)?);
        }
        Ok(ConstantSpecification { entries })
    }
}

/// One reason a constant specification is rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CsViolation {
    /// Entry is not of the shape `c_n:...:c_1:A` with constant prefixes.
    BadShape { entry: Formula },
    /// The innermost body is not an axiom instance of the logic.
    BodyNotAxiom { entry: Formula, body: Formula },
    /// Entry uses term operations outside the logic signature.
    Signature { entry: Formula },
    /// Downward closure fails: the stripped entry is missing.
    MissingClosure { entry: Formula, missing: Formula },
}

impl fmt::Display for CsViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CsViolation::BadShape { entry } => {
                write!(out, "'{}' is not of the form c_n:...:c_1:A", entry)
            }
            CsViolation::BodyNotAxiom { entry, body } => {
                write!(
                    out,
                    "'{}': innermost body '{}' is not an axiom instance",
                    entry, body
                )
            }
            CsViolation::Signature { entry } => {
                write!(
                    out,
                    "'{}' uses operations outside the logic signature",
                    entry
                )
            }
            CsViolation::MissingClosure { entry, missing } => {
                write!(
                    out,
                    "'{}' requires '{}' for downward closure",
                    entry, missing
                )
            }
        }
    }
}

/// Strip the leading constant-justification layers `c_n:...:c_1:` until the
/// body stops being a constant-headed justification. Returns the number of
/// layers and the innermost body. Axiom instances are never constant-headed
/// justifications, so the decomposition is unambiguous.
fn strip_constant_layers(f: &Formula) -> (usize, &Formula) {
    let mut layers = 0;
    let mut cur = f;
    while let Formula::Just(Term::Const(_), body) = cur {
        layers += 1;
        cur = body.as_ref();
    }
    (layers, cur)
}

/// Check a constant specification against a logic. Returns the list of
/// violations; empty means the specification is admissible.
pub fn validate_cs(cs: &ConstantSpecification, logic: &LogicSpec) -> Vec<CsViolation> {
    let mut out = Vec::new();
    for entry in &cs.entries {
        let (layers, body) = strip_constant_layers(entry);
        if layers == 0 {
            out.push(CsViolation::BadShape {
                entry: entry.clone(),
            });
            continue;
        }
        match is_axiom_instance(body, logic) {
            Err(_) => out.push(CsViolation::Signature {
                entry: entry.clone(),
            }),
            Ok(None) => out.push(CsViolation::BodyNotAxiom {
                entry: entry.clone(),
                body: body.clone(),
            }),
            Ok(Some(_)) => {}
        }
        if layers >= 2 {
            if let Formula::Just(Term::Const(_), inner) = entry {
                if !cs.entries.contains(inner.as_ref()) {
                    out.push(CsViolation::MissingClosure {
                        entry: entry.clone(),
                        missing: inner.as_ref().clone(),
                    });
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// CS-subformulas and occurring terms
// ---------------------------------------------------------------------------

/// Subformulas of the root together with the subformulas of every CS entry.
pub fn cs_subformulas(root: &Formula, cs: &ConstantSpecification) -> BTreeSet<Formula> {
    cs_subformulas_of_set(std::slice::from_ref(root), cs)
}

pub fn cs_subformulas_of_set(roots: &[Formula], cs: &ConstantSpecification) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    for r in roots {
        collect_subformulas(r, &mut out);
    }
    for e in &cs.entries {
        collect_subformulas(e, &mut out);
    }
    out
}

/// CS-subformulas closed under a single negation.
pub fn weak_cs_subformulas(root: &Formula, cs: &ConstantSpecification) -> BTreeSet<Formula> {
    weak_cs_subformulas_of_set(std::slice::from_ref(root), cs)
}

pub fn weak_cs_subformulas_of_set(
    roots: &[Formula],
    cs: &ConstantSpecification,
) -> BTreeSet<Formula> {
    let base = cs_subformulas_of_set(roots, cs);
    let mut out = base.clone();
    for f in base {
        out.insert(Formula::neg(f));
    }
    out
}

/// Terms occurring in the root or in a CS entry, closed under subterms.
pub fn occurring_terms(root: &Formula, cs: &ConstantSpecification) -> BTreeSet<Term> {
    occurring_terms_of_set(std::slice::from_ref(root), cs)
}

pub fn occurring_terms_of_set(roots: &[Formula], cs: &ConstantSpecification) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for r in roots {
        collect_terms_of_formula(r, &mut out);
    }
    for e in &cs.entries {
        collect_terms_of_formula(e, &mut out);
    }
    out
}
