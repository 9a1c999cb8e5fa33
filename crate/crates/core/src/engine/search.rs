//! Terminating proof search: depth-first saturation under the rule
//! priorities, returning a closed tableau, a saturated open branch with a
//! candidate countermodel, or a resource verdict.

use std::collections::HashSet;
use std::time::Instant;

use crate::logic::{ConstantSpecification, LogicSpec};
use crate::semantics::{extract_candidate_model, Model};
use crate::syntax::{Formula, Payload, Sign, SignedFormula};

use super::{
    check_config, first_applicable, ConfigError, NodeId, ProofContext, RuleId, RuleInstance,
    Tableau,
};

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_nodes: usize,
    pub max_millis: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_nodes: 500_000,
            max_millis: 30_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// When false, the PB/PBe classes are disabled; only the linear rules
    /// and `T→` fire. Used for compiling axiom refutations.
    pub pivots: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { pivots: true }
    }
}

/// Outcome of a proof attempt.
#[derive(Debug, Clone)]
pub enum Verdict {
    Valid {
        proof: Tableau,
    },
    Invalid {
        /// A saturated open branch, root first.
        branch: Vec<SignedFormula>,
        /// Verified countermodel, when extraction succeeds; `None` means
        /// the branch is open but the model is undetermined.
        model: Option<Model>,
        /// Why extraction failed, when it did.
        model_note: Option<String>,
    },
    ResourceOut {
        reason: String,
    },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }

    pub fn is_invalid(&self) -> bool {
        matches!(self, Verdict::Invalid { .. })
    }
}

pub(crate) enum SearchOutcome {
    AllClosed,
    Open(Vec<SignedFormula>),
    Out(String),
}

struct Searcher {
    tableau: Tableau,
    ctx: ProofContext,
    options: SearchOptions,
    limits: Limits,
    started: Instant,
    steps: usize,
    branch: Vec<SignedFormula>,
    set: HashSet<SignedFormula>,
}

impl Searcher {
    fn over_budget(&mut self) -> Option<String> {
        if self.tableau.nodes.len() > self.limits.max_nodes {
            return Some(format!("node budget {} exhausted", self.limits.max_nodes));
        }
        self.steps += 1;
        if self.steps % 64 == 0
            && self.started.elapsed().as_millis() as u64 > self.limits.max_millis
        {
            return Some(format!(
                "time budget {} ms exhausted",
                self.limits.max_millis
            ));
        }
        None
    }

    /// Push a formula and report whether it closes the branch.
    fn push(&mut self, sf: &SignedFormula) -> bool {
        let dual = SignedFormula {
            sign: sf.sign.flip(),
            payload: sf.payload.clone(),
        };
        let closes = self.set.contains(&dual)
            || matches!(
                (&sf.sign, &sf.payload),
                (Sign::T, Payload::Formula(Formula::Bottom))
            )
            || matches!((&sf.sign, &sf.payload),
                (Sign::F, Payload::Formula(f)) if self.ctx.cs.contains(f));
        self.branch.push(sf.clone());
        self.set.insert(sf.clone());
        closes
    }

    fn pop(&mut self, count: usize) {
        for _ in 0..count {
            let sf = self.branch.pop().expect("pop past branch root");
            if !self.branch.contains(&sf) {
                self.set.remove(&sf);
            }
        }
    }

    fn next_instance(&self) -> Option<RuleInstance> {
        let inst = first_applicable(&self.branch, &self.ctx)?;
        if !self.options.pivots && matches!(inst.rule, RuleId::Pb | RuleId::PbE) {
            return None;
        }
        Some(inst)
    }

    /// Expand the open branch ending at `leaf`. The branch state mirrors the
    /// path from the root to `leaf` inclusive.
    fn expand(&mut self, leaf: NodeId) -> SearchOutcome {
        if let Some(reason) = self.over_budget() {
            return SearchOutcome::Out(reason);
        }
        let Some(inst) = self.next_instance() else {
            return SearchOutcome::Open(self.branch.clone());
        };
        if inst.products.len() == 1 {
            // Linear: extend the branch with the new products, truncating
            // the chain at the first closure point.
            let mut chain: Vec<SignedFormula> = Vec::new();
            let mut closed = false;
            for sf in &inst.products[0] {
                if self.set.contains(sf) {
                    continue;
                }
                chain.push(sf.clone());
                if self.push(sf) {
                    closed = true;
                    break;
                }
            }
            debug_assert!(
                !chain.is_empty(),
                "applicable linear instance with no new products"
            );
            let pruned = RuleInstance {
                rule: inst.rule,
                premises: inst.premises.clone(),
                products: vec![chain.clone()],
            };
            let heads = self
                .tableau
                .apply(leaf, &pruned)
                .expect("search applies at a leaf");
            let mut last = heads[0];
            while let Some(&child) = self.tableau.nodes[last].children.first() {
                last = child;
            }
            let outcome = if closed {
                SearchOutcome::AllClosed
            } else {
                self.expand(last)
            };
            self.pop(chain.len());
            outcome
        } else {
            let heads = self
                .tableau
                .apply(leaf, &inst)
                .expect("search applies at a leaf");
            for (fork, head) in inst.products.iter().zip(&heads) {
                let sf = &fork[0];
                let closed = self.push(sf);
                let outcome = if closed {
                    SearchOutcome::AllClosed
                } else {
                    self.expand(*head)
                };
                self.pop(1);
                match outcome {
                    SearchOutcome::AllClosed => {}
                    other => return other,
                }
            }
            SearchOutcome::AllClosed
        }
    }
}

/// Run the tableau search for a root sequence. On a closed tableau the
/// proof object is returned; on saturation the first open branch is
/// reported.
pub(crate) fn search_roots(
    roots: Vec<SignedFormula>,
    ctx: ProofContext,
    options: SearchOptions,
    limits: Limits,
) -> (Tableau, SearchOutcome) {
    let tableau = Tableau::with_roots(roots.clone());
    let mut searcher = Searcher {
        tableau,
        ctx,
        options,
        limits,
        started: Instant::now(),
        steps: 0,
        branch: Vec::new(),
        set: HashSet::new(),
    };
    let mut closed_early = false;
    for sf in &roots {
        if searcher.push(sf) {
            closed_early = true;
            break;
        }
    }
    let outcome = if closed_early {
        SearchOutcome::AllClosed
    } else {
        let last_root = *searcher.tableau.roots.last().expect("nonempty roots");
        searcher.expand(last_root)
    };
    (searcher.tableau, outcome)
}

/// Decide a goal: search for a closed tableau rooted at `F goal`.
pub fn prove(
    goal: &Formula,
    logic: &LogicSpec,
    cs: &ConstantSpecification,
    limits: &Limits,
) -> Result<Verdict, ConfigError> {
    prove_with_options(goal, logic, cs, limits, &SearchOptions::default())
}

pub fn prove_with_options(
    goal: &Formula,
    logic: &LogicSpec,
    cs: &ConstantSpecification,
    limits: &Limits,
    options: &SearchOptions,
) -> Result<Verdict, ConfigError> {
    check_config(cs, logic)?;
    let roots = vec![SignedFormula::f(goal.clone())];
    let ctx = ProofContext::for_roots(&roots, logic, cs);
    let (tableau, outcome) = search_roots(roots.clone(), ctx, *options, *limits);
    Ok(match outcome {
        SearchOutcome::AllClosed => Verdict::Valid { proof: tableau },
        SearchOutcome::Open(branch) => match extract_candidate_model(&branch, &roots, logic, cs) {
            Ok(model) => Verdict::Invalid {
                branch,
                model: Some(model),
                model_note: None,
            },
            Err(e) => Verdict::Invalid {
                branch,
                model: None,
                model_note: Some(e.to_string()),
            },
        },
        SearchOutcome::Out(reason) => Verdict::ResourceOut { reason },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{check_proof, closure_status, ClosureStatus, Justification};
    use crate::syntax::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn prove_in(goal: &str, logic: &str, cs: &[&str]) -> Verdict {
        let logic = LogicSpec::parse(logic).unwrap();
        let cs = ConstantSpecification::from_entries(cs.iter().map(|s| p(s)));
        prove(&p(goal), &logic, &cs, &Limits::default()).unwrap()
    }

    #[test]
    fn proves_propositional_identity() {
        assert!(prove_in("P -> P", "J", &[]).is_valid());
        assert!(prove_in("P -> (Q -> P)", "J", &[]).is_valid());
        assert!(prove_in("~~P -> P", "J", &[]).is_valid());
        assert!(prove_in("P -> Q", "J", &[]).is_invalid());
    }

    #[test]
    fn cs_entries_close_in_one_node() {
        // A refuted constant-specification entry closes the root at once.
        let verdict =
            prove_in("c:(P -> (Q -> P))", "J", &["c:(P -> (Q -> P))"]);
        let Verdict::Valid { proof } = verdict else { panic!() };
        assert_eq!(proof.nodes.len(), 1);

        let verdict = prove_in(
            "d:c:(P -> (Q -> P))",
            "J",
            &["c:(P -> (Q -> P))", "d:c:(P -> (Q -> P))"],
        );
        let Verdict::Valid { proof } = verdict else { panic!() };
        assert_eq!(proof.nodes.len(), 1);
    }

    #[test]
    fn productive_pivot_splits_on_application_feeder() {
        // The minor premise [y,P] is undecided; the positive fork closes
        // through the application rule, the negative fork saturates into a
        // verified countermodel where only the pooled sum carries P.
        use crate::semantics::eval;
        use crate::syntax::parse_term;
        let verdict = prove_in("x:(P->Q) -> ((y+z):P -> x*y:Q)", "J", &[]);
        let Verdict::Invalid { branch, model, .. } = verdict else {
            panic!("goal is not provable");
        };
        assert!(branch
            .contains(&SignedFormula::f_ev(parse_term("y").unwrap(), p("P"))));
        let model = model.expect("extraction succeeds");
        assert!(model.admits(&parse_term("y+z").unwrap(), &p("P")));
        assert!(!model.admits(&parse_term("y").unwrap(), &p("P")));
        assert!(!eval(&model, &p("x:(P->Q) -> ((y+z):P -> x*y:Q)")));
    }

    #[test]
    fn proves_application_example() {
        let verdict = prove_in("x:P -> c*x:(Q->P)", "J", &["c:(P -> (Q -> P))"]);
        let Verdict::Valid { proof } = verdict else {
            panic!("expected a proof");
        };
        let logic = LogicSpec::J;
        let cs = ConstantSpecification::from_entries([p("c:(P -> (Q -> P))")]);
        check_proof(&proof, &p("x:P -> c*x:(Q->P)"), &logic, &cs).unwrap();
        // The proof replays the expected rule set.
        let mut used: Vec<String> = proof
            .nodes
            .iter()
            .filter_map(|n| match &n.just {
                Justification::Rule { rule, .. } => Some(rule.to_string()),
                _ => None,
            })
            .collect();
        used.sort();
        used.dedup();
        let mut expected: Vec<String> = ["F→", "Te", "Fe", "PB", "·"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        expected.sort();
        assert_eq!(used, expected);
    }

    #[test]
    fn proves_factivity_in_jt() {
        assert!(prove_in("t:P -> P", "JT", &[]).is_valid());
        assert!(prove_in("t:P -> P", "J", &[]).is_invalid());
    }

    #[test]
    fn refutes_co_closure_with_model() {
        let verdict = prove_in("P -> t:P", "J", &[]);
        let Verdict::Invalid { branch, model, .. } = verdict else {
            panic!("expected invalid");
        };
        let model = model.expect("model should verify");
        assert_eq!(model.valuation.get("P"), Some(&true));
        assert!(model.evidence.is_empty());
        // The saturated branch is exactly the linear saturation.
        assert_eq!(branch.len(), 4);
        assert_eq!(
            closure_status(&branch, &ConstantSpecification::empty()),
            ClosureStatus::Open
        );
    }

    #[test]
    fn jt_countermodel_shape() {
        // Failed positive introspection: the model admits (t,P) but not
        // (!t, t:P).
        use crate::syntax::parse_term;
        let verdict = prove_in("t:P -> !t:t:P", "JT", &[]);
        let Verdict::Invalid {
            model: Some(model), ..
        } = verdict
        else {
            panic!("expected a verified countermodel");
        };
        let t = parse_term("t").unwrap();
        assert!(model.admits(&t, &p("P")));
        assert!(!model.admits(&parse_term("!t").unwrap(), &p("t:P")));
    }

    #[test]
    fn deterministic_proofs() {
        let a = prove_in("x:P -> c*x:(Q->P)", "J", &["c:(P -> (Q -> P))"]);
        let b = prove_in("x:P -> c*x:(Q->P)", "J", &["c:(P -> (Q -> P))"]);
        let (Verdict::Valid { proof: pa }, Verdict::Valid { proof: pb }) = (a, b) else {
            panic!();
        };
        assert_eq!(pa.nodes.len(), pb.nodes.len());
        for (x, y) in pa.nodes.iter().zip(pb.nodes.iter()) {
            assert_eq!(x.payload, y.payload);
        }
    }

    #[test]
    fn axiom_schemes_close_without_pivots() {
        let cases: Vec<(&str, &str)> = vec![
            ("P -> (Q -> P)", "J"),
            ("s:P -> (s+t):P", "J"),
            ("s:P -> (t+s):P", "J"),
            ("x:(P->Q) -> (y:P -> x*y:Q)", "J"),
            ("t:P -> P", "JT"),
            ("t:_|_ -> _|_", "JD"),
            ("t:P -> !t:t:P", "J4"),
            ("~P -> ??t:~t:P", "JB"),
            ("~t:P -> ?t:~t:P", "J5"),
        ];
        for (goal, logic) in cases {
            let logic = LogicSpec::parse(logic).unwrap();
            let verdict = prove_with_options(
                &p(goal),
                &logic,
                &ConstantSpecification::empty(),
                &Limits::default(),
                &SearchOptions { pivots: false },
            )
            .unwrap();
            assert!(
                verdict.is_valid(),
                "axiom {} should close without PB/PBe",
                goal
            );
        }
    }

    #[test]
    fn invalid_cs_is_a_config_error() {
        let cs = ConstantSpecification::from_entries([p("d:c:(P -> (Q -> P))")]);
        let err = prove(&p("P -> P"), &LogicSpec::J, &cs, &Limits::default());
        assert!(err.is_err());
    }

    #[test]
    fn node_budget_reports_resource_out() {
        let limits = Limits {
            max_nodes: 2,
            max_millis: 10_000,
        };
        let verdict = prove(
            &p("x:P -> c*x:(Q->P)"),
            &LogicSpec::J,
            &ConstantSpecification::from_entries([p("c:(P -> (Q -> P))")]),
            &limits,
        )
        .unwrap();
        assert!(matches!(verdict, Verdict::ResourceOut { .. }));
    }
}
