//! Exercises every cut-elimination case on targeted Hilbert inputs: cuts on
//! implications, negations, justification assertions, and the evidential
//! principal cuts of the extension rules. Each run must terminate with a
//! certified cut-free proof and strictly decreasing step measures.

use std::collections::BTreeMap;

use jltab::cutelim::{eliminate_cuts_traced, hilbert_to_tableau, parse_hilbert, validate_hilbert};
use jltab::engine::{audit_subformula_property, check_proof};
use jltab::syntax::parse_formula;
use jltab::{ConstantSpecification, LogicSpec};

fn run_pipeline(text: &str, logic: &str, cs_entries: &[&str]) -> BTreeMap<String, usize> {
    let logic = LogicSpec::parse(logic).unwrap();
    let cs =
        ConstantSpecification::from_entries(cs_entries.iter().map(|s| parse_formula(s).unwrap()));
    let hp = parse_hilbert(text).unwrap();
    validate_hilbert(&hp, &logic, &cs).unwrap();
    let goal_idx = hp.lines.len() - 1;
    let goal = hp.lines[goal_idx].formula.clone();
    let tab = hilbert_to_tableau(&hp, goal_idx, &logic, &cs).unwrap();
    let (out, trace) = eliminate_cuts_traced(&tab, &cs, 1_000_000).unwrap();
    assert!(!out.contains_cut());
    check_proof(&out, &goal, &logic, &cs).unwrap();
    audit_subformula_property(&out, &cs).unwrap();
    let mut hist = BTreeMap::new();
    for entry in &trace {
        assert!(entry.is_decreasing(), "step not decreasing: {}", entry);
        *hist.entry(entry.case.clone()).or_default() += 1;
    }
    hist
}

#[test]
fn implication_cuts() {
    // The cut formulas are implications, so elimination passes through the
    // T→/F→ principal case.
    let hist = run_pipeline(
        "
1. P -> (Q -> P) [Taut]
2. (P -> (Q -> P)) -> (P -> P) [Taut]
3. P -> P [MP 1 2]
4. (P -> P) -> (Q -> (P -> P)) [Taut]
5. Q -> (P -> P) [MP 3 4]
",
        "J",
        &[],
    );
    assert!(hist.contains_key("III-imp") || hist.contains_key("II") || hist.contains_key("I"));
}

#[test]
fn factivity_cuts_reach_the_atom_cases() {
    // A jT axiom as the MP minor: cuts descend through t:A (Te/Fe) into the
    // evidential atom cases handled with the factivity rule.
    let hist = run_pipeline(
        "
1. x:P -> P [jT]
2. (x:P -> P) -> (Q -> (x:P -> P)) [Taut]
3. Q -> (x:P -> P) [MP 1 2]
",
        "JT",
        &[],
    );
    let total: usize = hist.values().sum();
    assert!(total >= 2, "expected several rewrite steps, got {:?}", hist);
}

#[test]
fn sum_axiom_cut() {
    let hist = run_pipeline(
        "
1. x:P -> (x+y):P [Sum]
2. (x:P -> (x+y):P) -> (Q -> (x:P -> (x+y):P)) [Taut]
3. Q -> (x:P -> (x+y):P) [MP 1 2]
",
        "JT",
        &[],
    );
    let total: usize = hist.values().sum();
    assert!(total >= 2, "{:?}", hist);
}

#[test]
fn application_axiom_cut() {
    let hist = run_pipeline(
        "
1. x:(P -> Q) -> (y:P -> x*y:Q) [jK]
2. (x:(P -> Q) -> (y:P -> x*y:Q)) -> (Q -> (x:(P -> Q) -> (y:P -> x*y:Q))) [Taut]
3. Q -> (x:(P -> Q) -> (y:P -> x*y:Q)) [MP 1 2]
",
        "J",
        &[],
    );
    let total: usize = hist.values().sum();
    assert!(total >= 1, "{:?}", hist);
}

#[test]
fn introspection_cut() {
    let hist = run_pipeline(
        "
1. x:P -> !x:x:P [j4]
2. (x:P -> !x:x:P) -> (P -> (x:P -> !x:x:P)) [Taut]
3. P -> (x:P -> !x:x:P) [MP 1 2]
",
        "JT4",
        &[],
    );
    let total: usize = hist.values().sum();
    assert!(total >= 2, "{:?}", hist);
}

#[test]
fn negative_introspection_cut() {
    let hist = run_pipeline(
        "
1. ~x:P -> ?x:~x:P [j5]
2. (~x:P -> ?x:~x:P) -> (Q -> (~x:P -> ?x:~x:P)) [Taut]
3. Q -> (~x:P -> ?x:~x:P) [MP 1 2]
",
        "JT5",
        &[],
    );
    let total: usize = hist.values().sum();
    assert!(total >= 2, "{:?}", hist);
}

#[test]
fn weak_negative_introspection_cut() {
    let hist = run_pipeline(
        "
1. ~P -> ??x:~x:P [jB]
2. (~P -> ??x:~x:P) -> (Q -> (~P -> ??x:~x:P)) [Taut]
3. Q -> (~P -> ??x:~x:P) [MP 1 2]
",
        "JTB",
        &[],
    );
    let total: usize = hist.values().sum();
    assert!(total >= 2, "{:?}", hist);
}

#[test]
fn consistency_cut() {
    let hist = run_pipeline(
        "
1. x:_|_ -> _|_ [jD]
2. (x:_|_ -> _|_) -> (Q -> (x:_|_ -> _|_)) [Taut]
3. Q -> (x:_|_ -> _|_) [MP 1 2]
",
        "JD",
        &[],
    );
    let total: usize = hist.values().sum();
    assert!(total >= 2, "{:?}", hist);
}

#[test]
fn ian_detour() {
    // A constant-specification detour: the goal never mentions the entry.
    let hist = run_pipeline(
        "
1. c:(P -> (Q -> P)) [IAN]
2. c:(P -> (Q -> P)) -> (Q -> c:(P -> (Q -> P))) [Taut]
3. Q -> c:(P -> (Q -> P)) [MP 1 2]
",
        "J",
        &["c:(P -> (Q -> P))"],
    );
    let total: usize = hist.values().sum();
    assert!(total >= 1, "{:?}", hist);
}

#[test]
fn tautology_detour_through_foreign_axiom() {
    // The intermediate jK instance shares nothing with the goal; pruning
    // and the permutation case must dissolve the foreign subtableau.
    let hist = run_pipeline(
        "
1. x:(P -> Q) -> (y:P -> x*y:Q) [jK]
2. (x:(P -> Q) -> (y:P -> x*y:Q)) -> (R -> R) [Taut]
3. R -> R [MP 1 2]
",
        "J",
        &[],
    );
    let total: usize = hist.values().sum();
    assert!(total >= 1, "{:?}", hist);
}

/// Wide seeded sweep for case coverage: every principal case label should
/// appear somewhere, and every step must be strictly decreasing.
#[test]
fn seeded_case_coverage() {
    use jltab::cutelim::{AxiomTag, HilbertJust, HilbertLine, HilbertProof};
    use jltab::syntax::Formula;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    let mut hist: BTreeMap<String, usize> = BTreeMap::new();
    for seed in 0..600u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37));
        let logic_names = ["JT", "JT4", "JT5", "JTB", "JD", "JTD45"];
        let logic = LogicSpec::parse(logic_names[seed as usize % logic_names.len()]).unwrap();
        let cs = ConstantSpecification::from_entries([parse_formula("c:(P -> (Q -> P))").unwrap()]);
        let term = ["x", "y", "x+y"][rng.gen_range(0..3)];
        let mut axioms: Vec<String> = vec![
            format!("({t}):P -> (({t})+y):P", t = term),
            "x:(P -> Q) -> (y:P -> x*y:Q)".into(),
        ];
        if logic.jt {
            axioms.push(format!("({t}):P -> P", t = term));
            axioms.push(format!("({t}):(P -> Q) -> (P -> Q)", t = term));
        }
        if logic.jd {
            axioms.push(format!("({t}):_|_ -> _|_", t = term));
        }
        if logic.j4 {
            axioms.push(format!("({t}):P -> !({t}):({t}):P", t = term));
        }
        if logic.jb {
            axioms.push(format!("~P -> ??({t}):~({t}):P", t = term));
        }
        if logic.j5 {
            axioms.push(format!("~({t}):P -> ?({t}):~({t}):P", t = term));
        }
        let base_text = &axioms[rng.gen_range(0..axioms.len())];
        let base = parse_formula(base_text).unwrap();
        let tag = {
            use jltab::logic::{matches_scheme, AxiomName};
            if matches_scheme(&base, AxiomName::Taut) {
                AxiomTag::Taut
            } else if matches_scheme(&base, AxiomName::SumLeft)
                || matches_scheme(&base, AxiomName::SumRight)
            {
                AxiomTag::Sum
            } else if matches_scheme(&base, AxiomName::JK) {
                AxiomTag::JK
            } else if matches_scheme(&base, AxiomName::JD) && logic.jd {
                AxiomTag::JD
            } else if matches_scheme(&base, AxiomName::J4) && logic.j4 {
                AxiomTag::J4
            } else if matches_scheme(&base, AxiomName::JB) && logic.jb {
                AxiomTag::JB
            } else if matches_scheme(&base, AxiomName::J5) && logic.j5 {
                AxiomTag::J5
            } else {
                AxiomTag::JT
            }
        };
        let mut lines = vec![HilbertLine {
            formula: base.clone(),
            just: HilbertJust::Axiom(tag),
        }];
        let rounds = rng.gen_range(1..=2usize);
        for _ in 0..rounds {
            let b_idx = lines.len() - 1;
            let b = lines[b_idx].formula.clone();
            let x = parse_formula(["P", "Q", "~Q"][rng.gen_range(0..3)]).unwrap();
            lines.push(HilbertLine {
                formula: Formula::imp(b.clone(), Formula::imp(x.clone(), b.clone())),
                just: HilbertJust::Axiom(AxiomTag::Taut),
            });
            lines.push(HilbertLine {
                formula: Formula::imp(x, b),
                just: HilbertJust::Mp(b_idx, lines.len() - 1),
            });
        }
        let goal_idx = lines.len() - 1;
        let hp = HilbertProof { lines };
        let goal = hp.lines[goal_idx].formula.clone();
        let tab = hilbert_to_tableau(&hp, goal_idx, &logic, &cs)
            .unwrap_or_else(|e| panic!("seed {}: {}", seed, e));
        let (out, trace) = eliminate_cuts_traced(&tab, &cs, 1_000_000)
            .unwrap_or_else(|e| panic!("seed {}: {}", seed, e));
        assert!(!out.contains_cut());
        check_proof(&out, &goal, &logic, &cs).unwrap_or_else(|e| panic!("seed {}: {}", seed, e));
        for entry in &trace {
            assert!(entry.is_decreasing(), "seed {}: {}", seed, entry);
            *hist.entry(entry.case.clone()).or_default() += 1;
        }
    }
    println!("case histogram: {:?}", hist);
    for expected in ["I", "II", "III-imp"] {
        assert!(
            hist.contains_key(expected),
            "case {} never exercised: {:?}",
            expected,
            hist
        );
    }
}

/// Heavy randomized sweep; run it with
/// `cargo test -p jltab --test cutelim_cases -- --ignored`.
#[test]
#[ignore]
fn stress_sweep() {
    use jltab::cutelim::{AxiomTag, HilbertJust, HilbertLine, HilbertProof};
    use jltab::syntax::Formula;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    for seed in 0..5000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x1234_5677));
        let logic_names = ["J", "JT", "JD", "J4", "JT4", "JTB", "JT5", "JTD4B5"];
        let logic = LogicSpec::parse(logic_names[seed as usize % logic_names.len()]).unwrap();
        let cs = ConstantSpecification::from_entries([
            parse_formula("c:(P -> (Q -> P))").unwrap(),
            parse_formula("d:c:(P -> (Q -> P))").unwrap(),
        ]);
        let mut axioms: Vec<(String, AxiomTag)> = vec![
            ("x:P -> (x+y):P".into(), AxiomTag::Sum),
            ("y:(P -> Q) -> (x:P -> y*x:Q)".into(), AxiomTag::JK),
            ("P -> (Q -> P)".into(), AxiomTag::Taut),
        ];
        if logic.jt {
            axioms.push(("(x+y):Q -> Q".into(), AxiomTag::JT));
        }
        if logic.jd {
            axioms.push(("y:_|_ -> _|_".into(), AxiomTag::JD));
        }
        if logic.j4 {
            axioms.push(("x:Q -> !x:x:Q".into(), AxiomTag::J4));
        }
        if logic.jb {
            axioms.push(("~Q -> ??y:~y:Q".into(), AxiomTag::JB));
        }
        if logic.j5 {
            axioms.push(("~x:Q -> ?x:~x:Q".into(), AxiomTag::J5));
        }
        let mut lines: Vec<HilbertLine> = Vec::new();
        if rng.gen_bool(0.2) {
            lines.push(HilbertLine {
                formula: parse_formula("c:(P -> (Q -> P))").unwrap(),
                just: HilbertJust::Ian,
            });
        } else {
            let (text, tag) = &axioms[rng.gen_range(0..axioms.len())];
            lines.push(HilbertLine {
                formula: parse_formula(text).unwrap(),
                just: HilbertJust::Axiom(*tag),
            });
        }
        for _ in 0..rng.gen_range(1..=3usize) {
            if lines.len() + 2 > 8 {
                break;
            }
            let b_idx = lines.len() - 1;
            let b = lines[b_idx].formula.clone();
            if rng.gen_bool(0.5) {
                let x = parse_formula(["P", "Q", "~P", "x:Q"][rng.gen_range(0..4)]).unwrap();
                lines.push(HilbertLine {
                    formula: Formula::imp(b.clone(), Formula::imp(x.clone(), b.clone())),
                    just: HilbertJust::Axiom(AxiomTag::Taut),
                });
                lines.push(HilbertLine {
                    formula: Formula::imp(x, b),
                    just: HilbertJust::Mp(b_idx, lines.len() - 1),
                });
            } else {
                let t = parse_formula(["P -> P", "~~Q -> Q", "Q -> (P -> Q)"][rng.gen_range(0..3)])
                    .unwrap();
                lines.push(HilbertLine {
                    formula: Formula::imp(b.clone(), t.clone()),
                    just: HilbertJust::Axiom(AxiomTag::Taut),
                });
                lines.push(HilbertLine {
                    formula: t,
                    just: HilbertJust::Mp(b_idx, lines.len() - 1),
                });
            }
        }
        let goal_idx = lines.len() - 1;
        let hp = HilbertProof { lines };
        let goal = hp.lines[goal_idx].formula.clone();
        let tab = hilbert_to_tableau(&hp, goal_idx, &logic, &cs)
            .unwrap_or_else(|e| panic!("seed {}: {}", seed, e));
        let (out, trace) = eliminate_cuts_traced(&tab, &cs, 1_000_000)
            .unwrap_or_else(|e| panic!("seed {}: {}", seed, e));
        assert!(!out.contains_cut(), "seed {}", seed);
        check_proof(&out, &goal, &logic, &cs).unwrap_or_else(|e| panic!("seed {}: {}", seed, e));
        audit_subformula_property(&out, &cs).unwrap_or_else(|e| panic!("seed {}: {}", seed, e));
        for entry in &trace {
            assert!(entry.is_decreasing(), "seed {}: {}", seed, entry);
        }
    }
}

// ---------------------------------------------------------------------------
// Hand-built principal cuts: one rig per evidential case. The natural
// Hilbert pipelines resolve their component cuts through the permutation
// and branch-end cases before the atom-level principal configurations can
// form, so each rewrite is driven directly here.
// ---------------------------------------------------------------------------

use jltab::engine::{check_tableau, closure_status, Justification, Node, RuleId, Tableau};
use jltab::syntax::{parse_term, SignedFormula};

fn push_node(
    tab: &mut Tableau,
    parent: usize,
    payload: SignedFormula,
    just: Justification,
) -> usize {
    let id = tab.nodes.len();
    tab.nodes.push(Node {
        payload,
        parent: Some(parent),
        children: vec![],
        just,
    });
    tab.nodes[parent].children.push(id);
    id
}

fn rule_node(
    tab: &mut Tableau,
    parent: usize,
    payload: SignedFormula,
    rule: RuleId,
    premises: Vec<usize>,
) -> usize {
    push_node(tab, parent, payload, Justification::Rule { rule, premises })
}

/// Eliminate and certify a rig; returns the case labels seen.
fn eliminate_rig(tab: &Tableau, logic: &str, check_rules: bool) -> BTreeMap<String, usize> {
    let logic = LogicSpec::parse(logic).unwrap();
    let cs = ConstantSpecification::empty();
    let (out, trace) = eliminate_cuts_traced(tab, &cs, 10_000).unwrap();
    assert!(!out.contains_cut());
    for leaf in out.leaves() {
        assert!(
            closure_status(&out.branch_formulas(leaf), &cs).is_closed(),
            "open leaf in eliminated rig"
        );
    }
    if check_rules {
        let roots: Vec<SignedFormula> = out
            .roots
            .iter()
            .map(|&r| out.nodes[r].payload.clone())
            .collect();
        check_tableau(&out, &roots, &logic, &cs).unwrap();
    }
    let mut hist = BTreeMap::new();
    for entry in &trace {
        assert!(entry.is_decreasing(), "{}", entry);
        *hist.entry(entry.case.clone()).or_default() += 1;
    }
    hist
}

#[test]
fn principal_cut_on_justification_assertion() {
    // Roots: F P, T [t,P]; cut on t:P with Te/Fe tops.
    let f = |s: &str| parse_formula(s).unwrap();
    let t = |s: &str| parse_term(s).unwrap();
    let mut tab = Tableau::with_roots(vec![
        SignedFormula::f(f("P")),
        SignedFormula::t_ev(t("t"), f("P")),
    ]);
    let ct = push_node(&mut tab, 1, SignedFormula::t(f("t:P")), Justification::Cut);
    let atom = rule_node(
        &mut tab,
        ct,
        SignedFormula::t_ev(t("t"), f("P")),
        RuleId::Te,
        vec![ct],
    );
    rule_node(
        &mut tab,
        atom,
        SignedFormula::t(f("P")),
        RuleId::E,
        vec![atom],
    );
    let cf = push_node(&mut tab, 1, SignedFormula::f(f("t:P")), Justification::Cut);
    rule_node(
        &mut tab,
        cf,
        SignedFormula::f_ev(t("t"), f("P")),
        RuleId::Fe,
        vec![cf],
    );
    let hist = eliminate_rig(&tab, "JT", true);
    assert!(hist.contains_key("III-jst"), "{:?}", hist);

    // Replacement profile of the principal step: one cut of lower rank on
    // the evidential atom, two cuts of equal rank and strictly lower
    // weight.
    let cs = ConstantSpecification::empty();
    let (_, trace) = eliminate_cuts_traced(&tab, &cs, 1000).unwrap();
    let step = trace.iter().find(|e| e.case == "III-jst").unwrap();
    let lower_rank: Vec<_> =
        step.replacements.iter().filter(|(r, _)| *r < step.rank).collect();
    let same_rank: Vec<_> =
        step.replacements.iter().filter(|(r, _)| *r == step.rank).collect();
    assert_eq!(lower_rank.len(), 1, "{}", step);
    assert_eq!(same_rank.len(), 2, "{}", step);
    assert!(same_rank.iter().all(|(_, w)| *w < step.weight), "{}", step);
}

#[test]
fn permutation_of_application_from_context() {
    // The application instance below the cut only uses atoms from above;
    // the permutation case moves it up as a single cut of the same rank
    // and lower weight, after which the branch closes above the cut.
    let f = |s: &str| parse_formula(s).unwrap();
    let t = |s: &str| parse_term(s).unwrap();
    let mut tab = Tableau::with_roots(vec![
        SignedFormula::t_ev(t("x"), f("P")),
        SignedFormula::t_ev(t("c"), f("P -> Q")),
        SignedFormula::f_ev(t("c*x"), f("Q")),
        SignedFormula::f(f("S")),
    ]);
    let ct = push_node(&mut tab, 3, SignedFormula::t(f("R")), Justification::Cut);
    rule_node(&mut tab, ct, SignedFormula::t_ev(t("c*x"), f("Q")), RuleId::App, vec![1, 0]);
    let cf = push_node(&mut tab, 3, SignedFormula::f(f("R")), Justification::Cut);
    rule_node(&mut tab, cf, SignedFormula::t_ev(t("c*x"), f("Q")), RuleId::App, vec![1, 0]);

    let cs = ConstantSpecification::empty();
    let (out, trace) = eliminate_cuts_traced(&tab, &cs, 1000).unwrap();
    assert!(!out.contains_cut());
    let step = &trace[0];
    assert_eq!(step.case, "II");
    assert_eq!(step.replacements.len(), 1, "{}", step);
    let (rank, weight) = step.replacements[0];
    assert_eq!(rank, step.rank, "{}", step);
    assert!(weight < step.weight, "{}", step);
    for leaf in out.leaves() {
        assert!(closure_status(&out.branch_formulas(leaf), &cs).is_closed());
    }
}

#[test]
fn principal_cut_on_negation() {
    // Θ = {T (Q->R), T (~Q->R), F R}; cut on ~Q with T¬/F¬ tops.
    let f = |s: &str| parse_formula(s).unwrap();
    let mut tab = Tableau::with_roots(vec![
        SignedFormula::t(f("Q -> R")),
        SignedFormula::t(f("~Q -> R")),
        SignedFormula::f(f("R")),
    ]);
    let ct = push_node(&mut tab, 2, SignedFormula::t(f("~Q")), Justification::Cut);
    let fq = rule_node(
        &mut tab,
        ct,
        SignedFormula::f(f("Q")),
        RuleId::TNeg,
        vec![ct],
    );
    rule_node(
        &mut tab,
        fq,
        SignedFormula::f(f("~Q")),
        RuleId::TImp,
        vec![1],
    );
    rule_node(
        &mut tab,
        fq,
        SignedFormula::t(f("R")),
        RuleId::TImp,
        vec![1],
    );
    let cf = push_node(&mut tab, 2, SignedFormula::f(f("~Q")), Justification::Cut);
    let tq = rule_node(
        &mut tab,
        cf,
        SignedFormula::t(f("Q")),
        RuleId::FNeg,
        vec![cf],
    );
    rule_node(
        &mut tab,
        tq,
        SignedFormula::f(f("Q")),
        RuleId::TImp,
        vec![0],
    );
    rule_node(
        &mut tab,
        tq,
        SignedFormula::t(f("R")),
        RuleId::TImp,
        vec![0],
    );
    let hist = eliminate_rig(&tab, "J", true);
    assert!(hist.contains_key("III-neg"), "{:?}", hist);
}

#[test]
fn principal_cut_on_sum_atom() {
    // Roots: F P, T [x,P]; cut on [x+y,P] with (e) and +L tops.
    let f = |s: &str| parse_formula(s).unwrap();
    let t = |s: &str| parse_term(s).unwrap();
    let mut tab = Tableau::with_roots(vec![
        SignedFormula::f(f("P")),
        SignedFormula::t_ev(t("x"), f("P")),
    ]);
    let ct = push_node(
        &mut tab,
        1,
        SignedFormula::t_ev(t("x+y"), f("P")),
        Justification::Cut,
    );
    rule_node(&mut tab, ct, SignedFormula::t(f("P")), RuleId::E, vec![ct]);
    let cf = push_node(
        &mut tab,
        1,
        SignedFormula::f_ev(t("x+y"), f("P")),
        Justification::Cut,
    );
    rule_node(
        &mut tab,
        cf,
        SignedFormula::f_ev(t("x"), f("P")),
        RuleId::SumL,
        vec![cf],
    );
    let hist = eliminate_rig(&tab, "JT", true);
    assert!(hist.contains_key("III-sum"), "{:?}", hist);
}

#[test]
fn principal_cut_on_falsum_sum_atom() {
    // Roots: T [x,_|_]; cut on [x+y,_|_] with (e⊥) and +L tops.
    let f = |s: &str| parse_formula(s).unwrap();
    let t = |s: &str| parse_term(s).unwrap();
    let mut tab = Tableau::with_roots(vec![SignedFormula::t_ev(t("x"), f("_|_"))]);
    let ct = push_node(
        &mut tab,
        0,
        SignedFormula::t_ev(t("x+y"), f("_|_")),
        Justification::Cut,
    );
    rule_node(
        &mut tab,
        ct,
        SignedFormula::t(f("_|_")),
        RuleId::EBot,
        vec![ct],
    );
    let cf = push_node(
        &mut tab,
        0,
        SignedFormula::f_ev(t("x+y"), f("_|_")),
        Justification::Cut,
    );
    rule_node(
        &mut tab,
        cf,
        SignedFormula::f_ev(t("x"), f("_|_")),
        RuleId::SumL,
        vec![cf],
    );
    let hist = eliminate_rig(&tab, "JD", true);
    assert!(hist.contains_key("III-bot"), "{:?}", hist);
}

#[test]
fn principal_cut_on_introspection_atom() {
    // Roots: T [x,P], F x:P; cut on [!x, x:P] with (e)/(!) tops.
    let f = |s: &str| parse_formula(s).unwrap();
    let t = |s: &str| parse_term(s).unwrap();
    let mut tab = Tableau::with_roots(vec![
        SignedFormula::t_ev(t("x"), f("P")),
        SignedFormula::f(f("x:P")),
    ]);
    let ct = push_node(
        &mut tab,
        1,
        SignedFormula::t_ev(t("!x"), f("x:P")),
        Justification::Cut,
    );
    rule_node(
        &mut tab,
        ct,
        SignedFormula::t(f("x:P")),
        RuleId::E,
        vec![ct],
    );
    let cf = push_node(
        &mut tab,
        1,
        SignedFormula::f_ev(t("!x"), f("x:P")),
        Justification::Cut,
    );
    rule_node(
        &mut tab,
        cf,
        SignedFormula::f_ev(t("x"), f("P")),
        RuleId::Bang,
        vec![cf],
    );
    let hist = eliminate_rig(&tab, "JT4", true);
    assert!(hist.contains_key("III-bang"), "{:?}", hist);
}

#[test]
fn principal_cut_on_negative_introspection_atom() {
    // Roots: T x:P, F [x,P]; cut on [?x,~x:P] with (e)/(?) tops.
    let f = |s: &str| parse_formula(s).unwrap();
    let t = |s: &str| parse_term(s).unwrap();
    let mut tab = Tableau::with_roots(vec![
        SignedFormula::t(f("x:P")),
        SignedFormula::f_ev(t("x"), f("P")),
    ]);
    let ct = push_node(
        &mut tab,
        1,
        SignedFormula::t_ev(t("?x"), f("~x:P")),
        Justification::Cut,
    );
    let z = rule_node(
        &mut tab,
        ct,
        SignedFormula::t(f("~x:P")),
        RuleId::E,
        vec![ct],
    );
    rule_node(
        &mut tab,
        z,
        SignedFormula::f(f("x:P")),
        RuleId::TNeg,
        vec![z],
    );
    let cf = push_node(
        &mut tab,
        1,
        SignedFormula::f_ev(t("?x"), f("~x:P")),
        Justification::Cut,
    );
    rule_node(
        &mut tab,
        cf,
        SignedFormula::t_ev(t("x"), f("P")),
        RuleId::Query,
        vec![cf],
    );
    let hist = eliminate_rig(&tab, "JT5", true);
    assert!(hist.contains_key("III-query"), "{:?}", hist);
}

#[test]
fn principal_cut_on_weak_negative_introspection_atom() {
    // Roots: T x:P, F P; cut on [??x,~x:P] with (e)/(?̄) tops.
    let f = |s: &str| parse_formula(s).unwrap();
    let t = |s: &str| parse_term(s).unwrap();
    let mut tab = Tableau::with_roots(vec![SignedFormula::t(f("x:P")), SignedFormula::f(f("P"))]);
    let ct = push_node(
        &mut tab,
        1,
        SignedFormula::t_ev(t("??x"), f("~x:P")),
        Justification::Cut,
    );
    let z = rule_node(
        &mut tab,
        ct,
        SignedFormula::t(f("~x:P")),
        RuleId::E,
        vec![ct],
    );
    rule_node(
        &mut tab,
        z,
        SignedFormula::f(f("x:P")),
        RuleId::TNeg,
        vec![z],
    );
    let cf = push_node(
        &mut tab,
        1,
        SignedFormula::f_ev(t("??x"), f("~x:P")),
        Justification::Cut,
    );
    rule_node(
        &mut tab,
        cf,
        SignedFormula::t(f("P")),
        RuleId::WQuery,
        vec![cf],
    );
    let hist = eliminate_rig(&tab, "JTB", true);
    assert!(hist.contains_key("III-wquery"), "{:?}", hist);
}

#[test]
fn application_cut_reclassifies_as_analytic() {
    // Roots: T [c,P->Q], F [c*(u+v),Q], T [u,P]; the cut on [u+v,P] feeds
    // the application rule, so it is already a legal analytic cut.
    let f = |s: &str| parse_formula(s).unwrap();
    let t = |s: &str| parse_term(s).unwrap();
    let mut tab = Tableau::with_roots(vec![
        SignedFormula::t_ev(t("c"), f("P -> Q")),
        SignedFormula::f_ev(t("c*(u+v)"), f("Q")),
        SignedFormula::t_ev(t("u"), f("P")),
    ]);
    let ct = push_node(
        &mut tab,
        2,
        SignedFormula::t_ev(t("u+v"), f("P")),
        Justification::Cut,
    );
    rule_node(
        &mut tab,
        ct,
        SignedFormula::t_ev(t("c*(u+v)"), f("Q")),
        RuleId::App,
        vec![0, ct],
    );
    let cf = push_node(
        &mut tab,
        2,
        SignedFormula::f_ev(t("u+v"), f("P")),
        Justification::Cut,
    );
    rule_node(
        &mut tab,
        cf,
        SignedFormula::f_ev(t("u"), f("P")),
        RuleId::SumL,
        vec![cf],
    );
    let hist = eliminate_rig(&tab, "J", true);
    assert!(hist.contains_key("III-app"), "{:?}", hist);
    assert_eq!(
        hist.len(),
        1,
        "reclassification should be the only step: {:?}",
        hist
    );
}
