//! The signed analytic tableau calculus: rules, closure detection,
//! terminating proof search, proof objects and an independent checker.

mod check;
mod search;

pub use check::{audit_subformula_property, check_proof, check_tableau, AuditError, CheckError};
pub use search::{prove, prove_with_options, Limits, SearchOptions, Verdict};

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::logic::{
    cs_subformulas_of_set, occurring_terms_of_set, validate_cs, ConstantSpecification, CsViolation,
    LogicSpec,
};
use crate::syntax::{EvidentialAtom, Formula, Payload, Sign, SignedFormula, Term};

pub type NodeId = usize;

/// Tableau rule identifiers (signed calculus).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    FNeg,
    TNeg,
    FImp,
    TImp,
    Te,
    Fe,
    SumL,
    SumR,
    /// Binary application rule `(·)`.
    App,
    Pb,
    PbE,
    /// jT factivity rule `(e)`.
    E,
    /// jD consistency rule `(e⊥)`.
    EBot,
    /// j4 rule `(!)`.
    Bang,
    /// jB rule `(?̄)`.
    WQuery,
    /// j5 rule `(?)`.
    Query,
}

impl RuleId {
    pub fn is_branching(self) -> bool {
        matches!(self, RuleId::TImp | RuleId::Pb | RuleId::PbE)
    }

    /// Whether the rule belongs to the active rule set of a logic.
    pub fn active_in(self, logic: &LogicSpec) -> bool {
        match self {
            RuleId::E => logic.jt,
            RuleId::EBot => logic.jd,
            RuleId::Bang => logic.j4,
            RuleId::WQuery => logic.jb,
            RuleId::Query => logic.j5,
            _ => true,
        }
    }

    pub fn ascii_name(self) -> &'static str {
        match self {
            RuleId::FNeg => "f_neg",
            RuleId::TNeg => "t_neg",
            RuleId::FImp => "f_imp",
            RuleId::TImp => "t_imp",
            RuleId::Te => "te",
            RuleId::Fe => "fe",
            RuleId::SumL => "sum_l",
            RuleId::SumR => "sum_r",
            RuleId::App => "app",
            RuleId::Pb => "pb",
            RuleId::PbE => "pbe",
            RuleId::E => "e",
            RuleId::EBot => "e_bot",
            RuleId::Bang => "bang",
            RuleId::WQuery => "wquery",
            RuleId::Query => "query",
        }
    }

    pub fn from_ascii(name: &str) -> Option<RuleId> {
        let r = match name {
            "f_neg" => RuleId::FNeg,
            "t_neg" => RuleId::TNeg,
            "f_imp" => RuleId::FImp,
            "t_imp" => RuleId::TImp,
            "te" => RuleId::Te,
            "fe" => RuleId::Fe,
            "sum_l" => RuleId::SumL,
            "sum_r" => RuleId::SumR,
            "app" => RuleId::App,
            "pb" => RuleId::Pb,
            "pbe" => RuleId::PbE,
            "e" => RuleId::E,
            "e_bot" => RuleId::EBot,
            "bang" => RuleId::Bang,
            "wquery" => RuleId::WQuery,
            "query" => RuleId::Query,
            _ => return None,
        };
        Some(r)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleId::FNeg => "F¬",
            RuleId::TNeg => "T¬",
            RuleId::FImp => "F→",
            RuleId::TImp => "T→",
            RuleId::Te => "Te",
            RuleId::Fe => "Fe",
            RuleId::SumL => "+L",
            RuleId::SumR => "+R",
            RuleId::App => "·",
            RuleId::Pb => "PB",
            RuleId::PbE => "PBe",
            RuleId::E => "e",
            RuleId::EBot => "e⊥",
            RuleId::Bang => "!",
            RuleId::WQuery => "?̄",
            RuleId::Query => "?",
        };
        write!(out, "{}", s)
    }
}

/// A rule application: cited premises (as positions into the branch, root
/// first) and the produced signed formulas, one list per fork.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub premises: Vec<usize>,
    pub products: Vec<Vec<SignedFormula>>,
}

impl RuleInstance {
    fn linear(rule: RuleId, premises: Vec<usize>, products: Vec<SignedFormula>) -> Self {
        RuleInstance {
            rule,
            premises,
            products: vec![products],
        }
    }

    fn branching(
        rule: RuleId,
        premises: Vec<usize>,
        left: SignedFormula,
        right: SignedFormula,
    ) -> Self {
        RuleInstance {
            rule,
            premises,
            products: vec![vec![left], vec![right]],
        }
    }
}

/// How a tableau node was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Root,
    Rule {
        rule: RuleId,
        premises: Vec<NodeId>,
    },
    /// Unrestricted cut child (used by the Hilbert compiler; the
    /// cut-elimination engine removes these).
    Cut,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub payload: SignedFormula,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub just: Justification,
}

/// A tableau: a binary tree of signed formulas with rule-application
/// records. The root sequence is a chain of `Root`-justified nodes at the
/// top.
#[derive(Debug, Clone, Default)]
pub struct Tableau {
    pub nodes: Vec<Node>,
    pub roots: Vec<NodeId>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("illegal rule application: {0}")]
    IllegalApplication(String),
}

impl Tableau {
    pub fn with_roots(roots: Vec<SignedFormula>) -> Self {
        assert!(!roots.is_empty(), "a tableau needs at least one root");
        let mut t = Tableau {
            nodes: Vec::new(),
            roots: Vec::new(),
        };
        let mut parent: Option<NodeId> = None;
        for sf in roots {
            let id = t.nodes.len();
            t.nodes.push(Node {
                payload: sf,
                parent,
                children: Vec::new(),
                just: Justification::Root,
            });
            if let Some(p) = parent {
                t.nodes[p].children.push(id);
            }
            t.roots.push(id);
            parent = Some(id);
        }
        t
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id].children.is_empty()
    }

    /// Node ids on the path from the tree root down to `id`, inclusive.
    pub fn path(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = Some(id);
        while let Some(n) = cur {
            out.push(n);
            cur = self.nodes[n].parent;
        }
        out.reverse();
        out
    }

    /// The branch of signed formulas above and including `id`.
    pub fn branch_formulas(&self, id: NodeId) -> Vec<SignedFormula> {
        self.path(id)
            .into_iter()
            .map(|n| self.nodes[n].payload.clone())
            .collect()
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].children.is_empty())
            .collect()
    }

    pub fn contains_cut(&self) -> bool {
        self.nodes
            .iter()
            .any(|n| matches!(n.just, Justification::Cut))
    }

    fn append_child(
        &mut self,
        parent: NodeId,
        payload: SignedFormula,
        just: Justification,
    ) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            payload,
            parent: Some(parent),
            children: Vec::new(),
            just,
        });
        self.nodes[parent].children.push(id);
        id
    }

    /// Append a rule instance at a leaf: each fork becomes a chain of
    /// children. Returns the head node of each fork.
    pub fn apply(
        &mut self,
        leaf: NodeId,
        instance: &RuleInstance,
    ) -> Result<Vec<NodeId>, EngineError> {
        if !self.is_leaf(leaf) {
            return Err(EngineError::IllegalApplication(format!(
                "node {} is not a leaf",
                leaf
            )));
        }
        let path = self.path(leaf);
        let premise_ids: Vec<NodeId> = instance
            .premises
            .iter()
            .map(|&pos| {
                path.get(pos).copied().ok_or_else(|| {
                    EngineError::IllegalApplication(format!(
                        "premise position {} outside branch of length {}",
                        pos,
                        path.len()
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        let mut heads = Vec::new();
        for fork in &instance.products {
            let mut at = leaf;
            let mut head = None;
            for sf in fork {
                let id = self.append_child(
                    at,
                    sf.clone(),
                    Justification::Rule {
                        rule: instance.rule,
                        premises: premise_ids.clone(),
                    },
                );
                head.get_or_insert(id);
                at = id;
            }
            if let Some(h) = head {
                heads.push(h);
            }
        }
        Ok(heads)
    }
}

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureReason {
    /// `T A` and `F A` both occur.
    FormulaPair(Formula),
    /// `T [t,A]` and `F [t,A]` both occur.
    EvidentialPair(EvidentialAtom),
    /// `T ⊥` occurs.
    Falsum,
    /// `F c:F` occurs for a constant-specification entry `c:F`.
    CsRefuted(Formula),
}

impl fmt::Display for ClosureReason {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosureReason::FormulaPair(f) => write!(out, "T/F pair on {}", f),
            ClosureReason::EvidentialPair(e) => write!(out, "T/F pair on {}", e),
            ClosureReason::Falsum => write!(out, "T _|_"),
            ClosureReason::CsRefuted(f) => write!(out, "F {} with {} in CS", f, f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClosureStatus {
    Open,
    Closed(ClosureReason),
}

impl ClosureStatus {
    pub fn is_closed(&self) -> bool {
        matches!(self, ClosureStatus::Closed(_))
    }
}

/// Closure conditions for a branch of signed formulas.
pub fn closure_status(branch: &[SignedFormula], cs: &ConstantSpecification) -> ClosureStatus {
    let set: HashSet<&SignedFormula> = branch.iter().collect();
    for sf in branch {
        if let Some(reason) = closes_incrementally(&set, sf, cs) {
            return ClosureStatus::Closed(reason);
        }
    }
    ClosureStatus::Open
}

/// Closure check for one formula against a branch membership set (the set
/// may or may not already contain the formula itself).
fn closes_incrementally(
    set: &HashSet<&SignedFormula>,
    sf: &SignedFormula,
    cs: &ConstantSpecification,
) -> Option<ClosureReason> {
    let dual = SignedFormula {
        sign: sf.sign.flip(),
        payload: sf.payload.clone(),
    };
    if set.contains(&dual) {
        return Some(match &sf.payload {
            Payload::Formula(f) => ClosureReason::FormulaPair(f.clone()),
            Payload::Evidential(e) => ClosureReason::EvidentialPair(e.clone()),
        });
    }
    match (&sf.sign, &sf.payload) {
        (Sign::T, Payload::Formula(Formula::Bottom)) => Some(ClosureReason::Falsum),
        (Sign::F, Payload::Formula(f)) if cs.contains(f) => {
            Some(ClosureReason::CsRefuted(f.clone()))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Proof context and rule enumeration
// ---------------------------------------------------------------------------

/// Precomputed side-condition material for a fixed root sequence, logic and
/// constant specification.
#[derive(Debug, Clone)]
pub struct ProofContext {
    pub logic: LogicSpec,
    pub cs: ConstantSpecification,
    /// CS-subformulas of the (unsigned) roots.
    pub cs_sub: BTreeSet<Formula>,
    /// Terms occurring in the roots or the CS, closed under subterms.
    pub occ: BTreeSet<Term>,
}

impl ProofContext {
    /// Build the context for a root sequence. The unsigned reading of every
    /// root contributes to the CS-subformula and occurring-term sets.
    pub fn for_roots(
        roots: &[SignedFormula],
        logic: &LogicSpec,
        cs: &ConstantSpecification,
    ) -> ProofContext {
        let unsigned: Vec<Formula> = roots
            .iter()
            .filter_map(|sf| match (&sf.sign, &sf.payload) {
                (_, Payload::Formula(_)) => sf.unsigned_formula(),
                // Evidential roots only contribute their body and term.
                (_, Payload::Evidential(e)) => Some(Formula::just(e.term.clone(), e.body.clone())),
            })
            .collect();
        ProofContext {
            logic: *logic,
            cs: cs.clone(),
            cs_sub: cs_subformulas_of_set(&unsigned, cs),
            occ: occurring_terms_of_set(&unsigned, cs),
        }
    }

    /// Extend the side-condition sets, used for tableaux containing cuts:
    /// the unsigned readings of cut children (and the bodies of evidential
    /// cut pivots) count towards the root material.
    pub fn extend_with(&mut self, extra: &[SignedFormula]) {
        let unsigned: Vec<Formula> = extra
            .iter()
            .filter_map(|sf| match &sf.payload {
                Payload::Formula(_) => sf.unsigned_formula(),
                Payload::Evidential(e) => Some(Formula::just(e.term.clone(), e.body.clone())),
            })
            .collect();
        let mut more_subs = cs_subformulas_of_set(&unsigned, &ConstantSpecification::empty());
        self.cs_sub.append(&mut more_subs);
        let mut more_terms = occurring_terms_of_set(&unsigned, &ConstantSpecification::empty());
        self.occ.append(&mut more_terms);
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("invalid constant specification: {0:?}")]
    InvalidCs(Vec<CsViolation>),
}

pub(crate) fn check_config(
    cs: &ConstantSpecification,
    logic: &LogicSpec,
) -> Result<(), ConfigError> {
    let violations = validate_cs(cs, logic);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ConfigError::InvalidCs(violations))
    }
}

/// A branch as seen by the rule enumerator: formulas in root-to-leaf order
/// with a membership set.
pub struct BranchView<'a> {
    pub formulas: &'a [SignedFormula],
    set: HashSet<&'a SignedFormula>,
}

impl<'a> BranchView<'a> {
    pub fn new(formulas: &'a [SignedFormula]) -> Self {
        BranchView {
            formulas,
            set: formulas.iter().collect(),
        }
    }

    fn has(&self, sf: &SignedFormula) -> bool {
        self.set.contains(sf)
    }
}

fn linear_products_at(
    view: &BranchView,
    pos: usize,
    logic: &LogicSpec,
) -> Vec<(RuleId, Vec<SignedFormula>)> {
    let sf = &view.formulas[pos];
    let mut out = Vec::new();
    match (&sf.sign, &sf.payload) {
        (Sign::F, Payload::Formula(Formula::Neg(a))) => {
            out.push((RuleId::FNeg, vec![SignedFormula::t(a.as_ref().clone())]));
        }
        (Sign::T, Payload::Formula(Formula::Neg(a))) => {
            out.push((RuleId::TNeg, vec![SignedFormula::f(a.as_ref().clone())]));
        }
        (Sign::F, Payload::Formula(Formula::Implies(a, b))) => {
            out.push((
                RuleId::FImp,
                vec![
                    SignedFormula::t(a.as_ref().clone()),
                    SignedFormula::f(b.as_ref().clone()),
                ],
            ));
        }
        (Sign::T, Payload::Formula(Formula::Just(t, a))) => {
            out.push((
                RuleId::Te,
                vec![SignedFormula::t_ev(t.clone(), a.as_ref().clone())],
            ));
        }
        (Sign::F, Payload::Formula(Formula::Just(t, a))) => {
            out.push((
                RuleId::Fe,
                vec![SignedFormula::f_ev(t.clone(), a.as_ref().clone())],
            ));
        }
        (Sign::T, Payload::Evidential(e)) => {
            if logic.jt {
                out.push((RuleId::E, vec![SignedFormula::t(e.body.clone())]));
            }
            if logic.jd && e.body == Formula::Bottom {
                out.push((RuleId::EBot, vec![SignedFormula::t(Formula::Bottom)]));
            }
        }
        (Sign::F, Payload::Evidential(e)) => {
            if let Term::Sum(l, r) = &e.term {
                out.push((
                    RuleId::SumL,
                    vec![SignedFormula::f_ev(l.as_ref().clone(), e.body.clone())],
                ));
                out.push((
                    RuleId::SumR,
                    vec![SignedFormula::f_ev(r.as_ref().clone(), e.body.clone())],
                ));
            }
            if logic.j4 {
                // F [!t, t:A] yields F [t,A]
                if let (Term::Bang(t), Formula::Just(t2, a)) = (&e.term, &e.body) {
                    if t.as_ref() == t2 {
                        out.push((
                            RuleId::Bang,
                            vec![SignedFormula::f_ev(t2.clone(), a.as_ref().clone())],
                        ));
                    }
                }
            }
            if logic.jb {
                // F [??t, ~t:A] yields T A
                if let (Term::WQuery(t), Formula::Neg(neg)) = (&e.term, &e.body) {
                    if let Formula::Just(t2, a) = neg.as_ref() {
                        if t.as_ref() == t2 {
                            out.push((RuleId::WQuery, vec![SignedFormula::t(a.as_ref().clone())]));
                        }
                    }
                }
            }
            if logic.j5 {
                // F [?t, ~t:A] yields T [t,A]
                if let (Term::Query(t), Formula::Neg(neg)) = (&e.term, &e.body) {
                    if let Formula::Just(t2, a) = neg.as_ref() {
                        if t.as_ref() == t2 {
                            out.push((
                                RuleId::Query,
                                vec![SignedFormula::t_ev(t2.clone(), a.as_ref().clone())],
                            ));
                        }
                    }
                }
            }
        }
        _ => {}
    }
    out
}

/// The application rule's product for a (major, minor) premise pair, if the
/// pair fits and the side conditions hold.
fn app_product(
    ctx: &ProofContext,
    major: &SignedFormula,
    minor: &SignedFormula,
) -> Option<SignedFormula> {
    let (Sign::T, Payload::Evidential(maj)) = (&major.sign, &major.payload) else {
        return None;
    };
    let (Sign::T, Payload::Evidential(min)) = (&minor.sign, &minor.payload) else {
        return None;
    };
    let Formula::Implies(a, b) = &maj.body else {
        return None;
    };
    if a.as_ref() != &min.body {
        return None;
    }
    // Side conditions: A -> B is a CS-subformula of the root and s·t occurs
    // in the root (or in the CS), subterm-closed.
    if !ctx.cs_sub.contains(&maj.body) {
        return None;
    }
    let product_term = Term::app(maj.term.clone(), min.term.clone());
    if !ctx.occ.contains(&product_term) {
        return None;
    }
    Some(SignedFormula::t_ev(product_term, b.as_ref().clone()))
}

/// Enumerate productive PBe pivots `[t,A]`: undecided atoms whose positive
/// fork would complete an application-rule instance with a `T`-atom already
/// on the branch, yielding a product not yet present.
fn productive_pbe_pivots(view: &BranchView, ctx: &ProofContext) -> BTreeSet<(Term, Formula)> {
    let mut pivots = BTreeSet::new();
    let t_atoms: Vec<&EvidentialAtom> = view
        .formulas
        .iter()
        .filter(|sf| sf.sign == Sign::T)
        .filter_map(|sf| sf.as_evidential())
        .collect();
    let apps: Vec<(&Term, &Term, &Term)> = ctx
        .occ
        .iter()
        .filter_map(|t| match t {
            Term::App(l, r) => Some((t, l.as_ref(), r.as_ref())),
            _ => None,
        })
        .collect();
    // Existing atom as major, pivot as minor.
    for atom in &t_atoms {
        let Formula::Implies(a, b) = &atom.body else {
            continue;
        };
        if !ctx.cs_sub.contains(&atom.body) {
            continue;
        }
        for (app, l, r) in &apps {
            if *l != &atom.term {
                continue;
            }
            let product = SignedFormula::t_ev((*app).clone(), b.as_ref().clone());
            if view.has(&product) {
                continue;
            }
            pivots.insert(((*r).clone(), a.as_ref().clone()));
        }
    }
    // Existing atom as minor, pivot as major.
    for atom in &t_atoms {
        for imp in ctx.cs_sub.iter() {
            let Formula::Implies(a, b) = imp else {
                continue;
            };
            if a.as_ref() != &atom.body {
                continue;
            }
            for (app, l, r) in &apps {
                if *r != &atom.term {
                    continue;
                }
                let product = SignedFormula::t_ev((*app).clone(), b.as_ref().clone());
                if view.has(&product) {
                    continue;
                }
                pivots.insert(((*l).clone(), imp.clone()));
            }
        }
    }
    pivots
        .into_iter()
        .filter(|(t, a)| {
            let t_side = SignedFormula::t_ev(t.clone(), a.clone());
            let f_side = SignedFormula::f_ev(t.clone(), a.clone());
            !view.has(&t_side) && !view.has(&f_side)
        })
        .collect()
}

/// All rule instances applicable to an open branch, in priority order:
/// linear rules, then `T→`, then PB on constant-specification entries, then
/// productive PBe pivots. Instances whose products are all already present
/// are skipped; branching instances are skipped when either fork is already
/// fulfilled.
pub fn applicable_rules(branch: &[SignedFormula], ctx: &ProofContext) -> Vec<RuleInstance> {
    let view = BranchView::new(branch);
    let mut out = Vec::new();

    // Linear single-premise rules, oldest premise first.
    for pos in 0..branch.len() {
        for (rule, products) in linear_products_at(&view, pos, &ctx.logic) {
            if products.iter().all(|p| view.has(p)) {
                continue;
            }
            out.push(RuleInstance::linear(rule, vec![pos], products));
        }
    }

    // Application rule: premise pairs in branch order.
    for major_pos in 0..branch.len() {
        for minor_pos in 0..branch.len() {
            if let Some(product) = app_product(ctx, &branch[major_pos], &branch[minor_pos]) {
                if view.has(&product) {
                    continue;
                }
                out.push(RuleInstance::linear(
                    RuleId::App,
                    vec![major_pos, minor_pos],
                    vec![product],
                ));
            }
        }
    }

    // T→ branching: skipped when either fork is fulfilled.
    for pos in 0..branch.len() {
        let sf = &branch[pos];
        if let (Sign::T, Payload::Formula(Formula::Implies(a, b))) = (&sf.sign, &sf.payload) {
            let left = SignedFormula::f(a.as_ref().clone());
            let right = SignedFormula::t(b.as_ref().clone());
            if view.has(&left) || view.has(&right) {
                continue;
            }
            out.push(RuleInstance::branching(
                RuleId::TImp,
                vec![pos],
                left,
                right,
            ));
        }
    }

    // PB on constant-specification entries: the negative fork closes by the
    // CS closure condition, so these behave almost linearly.
    for entry in &ctx.cs.entries {
        let t_side = SignedFormula::t(entry.clone());
        let f_side = SignedFormula::f(entry.clone());
        if view.has(&t_side) || view.has(&f_side) {
            continue;
        }
        if !ctx.cs_sub.contains(entry) {
            continue;
        }
        out.push(RuleInstance::branching(RuleId::Pb, vec![], t_side, f_side));
    }

    // Productive PBe pivots.
    for (t, a) in productive_pbe_pivots(&view, ctx) {
        out.push(RuleInstance::branching(
            RuleId::PbE,
            vec![],
            SignedFormula::t_ev(t.clone(), a.clone()),
            SignedFormula::f_ev(t, a),
        ));
    }

    out
}

/// First applicable instance in priority order, if any.
pub fn first_applicable(branch: &[SignedFormula], ctx: &ProofContext) -> Option<RuleInstance> {
    applicable_rules(branch, ctx).into_iter().next()
}
