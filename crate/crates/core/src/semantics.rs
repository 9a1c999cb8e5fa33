//! Finitely-presented single-world evidence models: evaluation, closure
//! condition verification over a finite universe, and candidate
//! countermodel extraction from open saturated branches.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::logic::{
    cs_subformulas_of_set, occurring_terms_of_set, ConstantSpecification, LogicSpec,
};
use crate::syntax::{Formula, Payload, Sign, SignedFormula, Term};

/// A model is a propositional valuation plus the graph of an admissible
/// evidence function, with all closure conditions read relative to the
/// finite `terms` and `universe` sets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub valuation: BTreeMap<String, bool>,
    pub evidence: BTreeSet<(Term, Formula)>,
    pub universe: BTreeSet<Formula>,
    pub terms: BTreeSet<Term>,
}

impl Model {
    pub fn admits(&self, t: &Term, f: &Formula) -> bool {
        self.evidence.contains(&(t.clone(), f.clone()))
    }
}

/// Classical evaluation; `t:A` is true iff the pair is in the evidence
/// graph, absent pairs count as false.
pub fn eval(model: &Model, f: &Formula) -> bool {
    match f {
        Formula::Bottom => false,
        Formula::Prop(p) => *model.valuation.get(p).unwrap_or(&false),
        Formula::Neg(inner) => !eval(model, inner),
        Formula::Implies(l, r) => !eval(model, l) || eval(model, r),
        Formula::Just(t, body) => model.admits(t, body),
    }
}

/// Whether the model satisfies a signed formula or evidential atom.
pub fn eval_signed(model: &Model, sf: &SignedFormula) -> bool {
    let positive = match &sf.payload {
        Payload::Formula(f) => eval(model, f),
        Payload::Evidential(e) => model.admits(&e.term, &e.body),
    };
    match sf.sign {
        Sign::T => positive,
        Sign::F => !positive,
    }
}

/// One violated closure condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelViolation {
    /// Application closure fails for `(s, A->B)` and `(t, A)`.
    E1 {
        s: Term,
        t: Term,
        conclusion: Formula,
    },
    /// Sum closure fails.
    E2 { sum: Term, body: Formula },
    /// A CS entry `c:F` lacks `(c, F)`.
    E3 { entry: Formula },
    /// jT: evidence for an untrue formula.
    E4 { term: Term, body: Formula },
    /// jD: evidence for falsum.
    E5 { term: Term },
    /// j4: positive introspection closure fails.
    E6 { term: Term, body: Formula },
    /// jB: weak negative introspection closure fails.
    E7 { term: Term, body: Formula },
    /// j5: negative introspection closure fails.
    E8 { term: Term, body: Formula },
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelViolation::E1 { s, t, conclusion } => {
                write!(out, "E1: ({}*{}, {}) missing", s, t, conclusion)
            }
            ModelViolation::E2 { sum, body } => write!(out, "E2: ({}, {}) missing", sum, body),
            ModelViolation::E3 { entry } => write!(out, "E3: CS entry {} not reflected", entry),
            ModelViolation::E4 { term, body } => {
                write!(
                    out,
                    "E4: ({}, {}) admitted but {} is false",
                    term, body, body
                )
            }
            ModelViolation::E5 { term } => write!(out, "E5: ({}, _|_) admitted", term),
            ModelViolation::E6 { term, body } => {
                write!(out, "E6: (!{}, {}:{}) missing", term, term, body)
            }
            ModelViolation::E7 { term, body } => {
                write!(out, "E7: (??{}, ~{}:{}) missing", term, term, body)
            }
            ModelViolation::E8 { term, body } => {
                write!(out, "E8: (?{}, ~{}:{}) missing", term, term, body)
            }
        }
    }
}

/// Check the closure conditions for the logic, quantifiers relativised to
/// `model.terms` × `model.universe`. An empty report means the model is
/// admissible.
pub fn verify_model(
    model: &Model,
    logic: &LogicSpec,
    cs: &ConstantSpecification,
) -> Vec<ModelViolation> {
    let mut out = Vec::new();

    // E1: application closure, instances restricted to product terms and
    // conclusions inside the finite scope.
    for (s, sbody) in &model.evidence {
        let Formula::Implies(a, b) = sbody else {
            continue;
        };
        for (t, tbody) in &model.evidence {
            if tbody != a.as_ref() {
                continue;
            }
            let product = Term::app(s.clone(), t.clone());
            if !model.terms.contains(&product) || !model.universe.contains(b.as_ref()) {
                continue;
            }
            if !model.admits(&product, b) {
                out.push(ModelViolation::E1 {
                    s: s.clone(),
                    t: t.clone(),
                    conclusion: b.as_ref().clone(),
                });
            }
        }
    }

    // E2: sum closure for every sum term in scope.
    for sum in model.terms.iter() {
        let Term::Sum(l, r) = sum else { continue };
        for (t, body) in &model.evidence {
            if (t == l.as_ref() || t == r.as_ref())
                && model.universe.contains(body)
                && !model.admits(sum, body)
            {
                out.push(ModelViolation::E2 {
                    sum: sum.clone(),
                    body: body.clone(),
                });
            }
        }
    }

    // E3: the CS seeds the evidence function.
    for entry in &cs.entries {
        if let Formula::Just(Term::Const(c), body) = entry {
            if !model.admits(&Term::Const(c.clone()), body) {
                out.push(ModelViolation::E3 {
                    entry: entry.clone(),
                });
            }
        }
    }

    if logic.jt {
        for (t, body) in &model.evidence {
            if !eval(model, body) {
                out.push(ModelViolation::E4 {
                    term: t.clone(),
                    body: body.clone(),
                });
            }
        }
    }

    if logic.jd {
        for (t, body) in &model.evidence {
            if body == &Formula::Bottom {
                out.push(ModelViolation::E5 { term: t.clone() });
            }
        }
    }

    if logic.j4 {
        for (t, body) in &model.evidence {
            let bang = Term::bang(t.clone());
            let just = Formula::just(t.clone(), body.clone());
            if model.terms.contains(&bang)
                && model.universe.contains(&just)
                && !model.admits(&bang, &just)
            {
                out.push(ModelViolation::E6 {
                    term: t.clone(),
                    body: body.clone(),
                });
            }
        }
    }

    if logic.jb {
        for wq in model.terms.iter() {
            let Term::WQuery(t) = wq else { continue };
            for a in model.universe.iter() {
                let target = Formula::neg(Formula::just(t.as_ref().clone(), a.clone()));
                if !model.universe.contains(&target) {
                    continue;
                }
                if !eval(model, a) && !model.admits(wq, &target) {
                    out.push(ModelViolation::E7 {
                        term: t.as_ref().clone(),
                        body: a.clone(),
                    });
                }
            }
        }
    }

    if logic.j5 {
        for q in model.terms.iter() {
            let Term::Query(t) = q else { continue };
            for a in model.universe.iter() {
                let target = Formula::neg(Formula::just(t.as_ref().clone(), a.clone()));
                if !model.universe.contains(&target) {
                    continue;
                }
                if !model.admits(t, a) && !model.admits(q, &target) {
                    out.push(ModelViolation::E8 {
                        term: t.as_ref().clone(),
                        body: a.clone(),
                    });
                }
            }
        }
    }

    out
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExtractionError {
    #[error("closure conditions force a pair refuted on the branch: ({term}, {body})")]
    ConflictsWithBranch { term: Term, body: Formula },
    #[error("extracted model fails verification: {0:?}")]
    Verification(Vec<ModelViolation>),
    #[error("extracted model does not satisfy the branch root '{0}'")]
    RootUnsatisfied(String),
    #[error("evidence closure did not stabilise")]
    Unstable,
}

/// Extract a candidate model from a saturated open branch.
///
/// The valuation reads the branch's `T`-signed props; the evidence graph is
/// the least fixpoint of the branch's positive atoms plus the CS seeds under
/// the monotone closure conditions, with jB/j5 instances added against the
/// running fixpoint. Verification and root satisfaction are rechecked; any
/// failure is reported instead of returning a bogus model.
pub fn extract_candidate_model(
    branch: &[SignedFormula],
    roots: &[SignedFormula],
    logic: &LogicSpec,
    cs: &ConstantSpecification,
) -> Result<Model, ExtractionError> {
    let unsigned_roots: Vec<Formula> = roots.iter().filter_map(|r| r.unsigned_formula()).collect();
    let universe = cs_subformulas_of_set(&unsigned_roots, cs);
    let terms = occurring_terms_of_set(&unsigned_roots, cs);

    let mut valuation = BTreeMap::new();
    for sf in branch {
        if let (Sign::T, Payload::Formula(Formula::Prop(p))) = (&sf.sign, &sf.payload) {
            valuation.insert(p.clone(), true);
        }
    }

    let mut evidence: BTreeSet<(Term, Formula)> = BTreeSet::new();
    for sf in branch {
        if let (Sign::T, Payload::Evidential(e)) = (&sf.sign, &sf.payload) {
            evidence.insert((e.term.clone(), e.body.clone()));
        }
    }
    for entry in &cs.entries {
        if let Formula::Just(Term::Const(c), body) = entry {
            evidence.insert((Term::Const(c.clone()), body.as_ref().clone()));
        }
    }

    let mut model = Model {
        valuation,
        evidence,
        universe,
        terms,
    };

    // Iterate the closure conditions to a fixpoint; every step only adds
    // pairs, so the pair space bounds the iteration count.
    let bound = model.terms.len() * model.universe.len() + 2;
    let mut iterations = 0;
    loop {
        let before = model.evidence.len();
        close_monotone(&mut model, logic);
        close_introspective(&mut model, logic);
        if model.evidence.len() == before {
            break;
        }
        iterations += 1;
        if iterations > bound {
            return Err(ExtractionError::Unstable);
        }
    }

    // The fixpoint must not admit anything the branch refutes.
    for sf in branch {
        if let (Sign::F, Payload::Evidential(e)) = (&sf.sign, &sf.payload) {
            if model.admits(&e.term, &e.body) {
                return Err(ExtractionError::ConflictsWithBranch {
                    term: e.term.clone(),
                    body: e.body.clone(),
                });
            }
        }
    }

    let report = verify_model(&model, logic, cs);
    if !report.is_empty() {
        return Err(ExtractionError::Verification(report));
    }

    for root in roots {
        if !eval_signed(&model, root) {
            return Err(ExtractionError::RootUnsatisfied(root.to_string()));
        }
    }

    Ok(model)
}

/// One pass of the monotone closure conditions E1, E2 and E6.
fn close_monotone(model: &mut Model, logic: &LogicSpec) {
    loop {
        let mut added = Vec::new();
        for (s, sbody) in &model.evidence {
            if let Formula::Implies(a, b) = sbody {
                for (t, tbody) in &model.evidence {
                    if tbody != a.as_ref() {
                        continue;
                    }
                    let product = Term::app(s.clone(), t.clone());
                    if model.terms.contains(&product)
                        && model.universe.contains(b.as_ref())
                        && !model.admits(&product, b)
                    {
                        added.push((product, b.as_ref().clone()));
                    }
                }
            }
        }
        for sum in model.terms.iter() {
            if let Term::Sum(l, r) = sum {
                for (t, body) in &model.evidence {
                    if (t == l.as_ref() || t == r.as_ref())
                        && model.universe.contains(body)
                        && !model.admits(sum, body)
                    {
                        added.push((sum.clone(), body.clone()));
                    }
                }
            }
        }
        if logic.j4 {
            for (t, body) in &model.evidence {
                let bang = Term::bang(t.clone());
                let just = Formula::just(t.clone(), body.clone());
                if model.terms.contains(&bang)
                    && model.universe.contains(&just)
                    && !model.admits(&bang, &just)
                {
                    added.push((bang, just));
                }
            }
        }
        if added.is_empty() {
            return;
        }
        model.evidence.extend(added);
    }
}

/// One pass of the jB/j5 conditions, hypotheses judged against the current
/// state.
fn close_introspective(model: &mut Model, logic: &LogicSpec) {
    let mut added = Vec::new();
    if logic.jb {
        for wq in model.terms.iter() {
            if let Term::WQuery(t) = wq {
                for a in model.universe.iter() {
                    let target = Formula::neg(Formula::just(t.as_ref().clone(), a.clone()));
                    if model.universe.contains(&target)
                        && !eval(model, a)
                        && !model.admits(wq, &target)
                    {
                        added.push((wq.clone(), target));
                    }
                }
            }
        }
    }
    if logic.j5 {
        for q in model.terms.iter() {
            if let Term::Query(t) = q {
                for a in model.universe.iter() {
                    let target = Formula::neg(Formula::just(t.as_ref().clone(), a.clone()));
                    if model.universe.contains(&target)
                        && !model.admits(t, a)
                        && !model.admits(q, &target)
                    {
                        added.push((q.clone(), target));
                    }
                }
            }
        }
    }
    model.evidence.extend(added);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_term};

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn eval_examples() {
        let mut model = Model::default();
        model.valuation.insert("P".into(), true);
        assert!(!eval(&model, &p("P -> t:P")));
        assert!(!eval(&model, &Formula::Bottom));

        let mut model = Model::default();
        model.evidence.insert((t("t"), p("P")));
        assert!(eval(&model, &p("t:P")));
    }

    #[test]
    fn eval_agrees_with_truth_table_on_propositional_formulas() {
        // Brute-force oracle over the props of the formula.
        fn oracle(f: &Formula, pv: bool, qv: bool) -> bool {
            match f {
                Formula::Bottom => false,
                Formula::Prop(name) => {
                    if name == "P" {
                        pv
                    } else {
                        qv
                    }
                }
                Formula::Neg(x) => !oracle(x, pv, qv),
                Formula::Implies(a, b) => !oracle(a, pv, qv) || oracle(b, pv, qv),
                Formula::Just(..) => unreachable!(),
            }
        }
        let formulas = [
            "P -> (Q -> P)",
            "~P -> P",
            "P -> Q",
            "~(P -> Q) -> P",
            "_|_ -> Q",
        ];
        for s in formulas {
            let f = p(s);
            for mask in 0..4u8 {
                let pv = mask & 1 != 0;
                let qv = mask & 2 != 0;
                let mut model = Model::default();
                model.valuation.insert("P".into(), pv);
                model.valuation.insert("Q".into(), qv);
                assert_eq!(
                    eval(&model, &f),
                    oracle(&f, pv, qv),
                    "{} at mask {}",
                    s,
                    mask
                );
            }
        }
    }

    #[test]
    fn verify_empty_model_passes() {
        let model = Model::default();
        assert!(verify_model(&model, &LogicSpec::J, &ConstantSpecification::empty()).is_empty());
    }

    #[test]
    fn verify_detects_e1_violation() {
        let mut model = Model::default();
        model.evidence.insert((t("c"), p("P -> Q")));
        model.evidence.insert((t("x"), p("P")));
        model.terms = [t("c"), t("x"), t("c*x")].into_iter().collect();
        model.universe = crate::syntax::subformulas(&p("P -> Q"));
        let report = verify_model(&model, &LogicSpec::J, &ConstantSpecification::empty());
        assert_eq!(report.len(), 1);
        assert!(matches!(report[0], ModelViolation::E1 { .. }));
    }

    #[test]
    fn verify_detects_e5_violation() {
        let mut model = Model::default();
        model.evidence.insert((t("t"), Formula::Bottom));
        model.terms = [t("t")].into_iter().collect();
        model.universe = [Formula::Bottom].into_iter().collect();
        let jd = LogicSpec::parse("JD").unwrap();
        let report = verify_model(&model, &jd, &ConstantSpecification::empty());
        assert!(report
            .iter()
            .any(|v| matches!(v, ModelViolation::E5 { .. })));
    }

    #[test]
    fn extraction_on_simple_open_branch() {
        // Saturated branch refuting P -> t:P in J.
        let goal = p("P -> t:P");
        let roots = vec![SignedFormula::f(goal.clone())];
        let branch = vec![
            SignedFormula::f(goal.clone()),
            SignedFormula::t(p("P")),
            SignedFormula::f(p("t:P")),
            SignedFormula::f_ev(t("t"), p("P")),
        ];
        let model = extract_candidate_model(
            &branch,
            &roots,
            &LogicSpec::J,
            &ConstantSpecification::empty(),
        )
        .unwrap();
        assert_eq!(model.valuation.get("P"), Some(&true));
        assert!(model.evidence.is_empty());
        assert!(!eval(&model, &goal));
        assert!(eval(&model, &Formula::neg(goal)));
    }

    #[test]
    fn extraction_fails_on_branch_conflict() {
        // Seeding (y, P->Q) and (x, P) forces (y*x, Q) by E1 when y*x is in
        // scope, clashing with F [y*x, Q] on the branch.
        let root_formula = p("y:(P->Q) -> (x:P -> y*x:Q)");
        let roots = vec![SignedFormula::f(root_formula)];
        let branch = vec![
            SignedFormula::t_ev(t("y"), p("P -> Q")),
            SignedFormula::t_ev(t("x"), p("P")),
            SignedFormula::f_ev(t("y*x"), p("Q")),
        ];
        let err = extract_candidate_model(
            &branch,
            &roots,
            &LogicSpec::J,
            &ConstantSpecification::empty(),
        )
        .unwrap_err();
        assert!(matches!(err, ExtractionError::ConflictsWithBranch { .. }));
    }
}
