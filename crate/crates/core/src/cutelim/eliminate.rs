//! Cut elimination by local rewriting. Minimal cuts (cut-free subtableaux)
//! are eliminated leftmost-innermost; every rewrite either removes a cut or
//! replaces it by cuts that are strictly smaller in the lexicographic
//! (rank, weight) order. Branch closure is preserved because every grafted
//! subtree lands under a superset of its original branch context.

use crate::engine::{RuleId, Tableau};
use crate::logic::ConstantSpecification;
use crate::syntax::{Formula, Payload, Sign, SignedFormula, Term};

use super::tree::{
    all_branches_closed, find_minimal_cut_path, from_tableau, prune_closed, seq, to_tableau, PJust,
    PNode,
};
use super::{rank_payload, CutElimError};

/// One rewrite step: the case taken, the measure of the cut before the
/// step, and the measures of the replacement cuts created at the site.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub case: String,
    pub pivot: String,
    pub rank: u64,
    pub weight: usize,
    pub replacements: Vec<(u64, usize)>,
}

impl TraceEntry {
    /// The per-step progress property: every replacement is strictly
    /// smaller in (rank, weight), or the site lost its cut altogether.
    pub fn is_decreasing(&self) -> bool {
        self.replacements
            .iter()
            .all(|&(r, w)| (r, w) < (self.rank, self.weight))
    }
}

impl std::fmt::Display for TraceEntry {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            out,
            "case={} pivot={} rank={} weight={} -> [{}]",
            self.case,
            self.pivot,
            self.rank,
            self.weight,
            self.replacements
                .iter()
                .map(|(r, w)| format!("({},{})", r, w))
                .collect::<Vec<_>>()
                .join(" ")
        )
    }
}

const DEFAULT_STEP_BUDGET: usize = 1_000_000;

/// Eliminate all cuts from a closed tableau.
pub fn eliminate_cuts(tab: &Tableau, cs: &ConstantSpecification) -> Result<Tableau, CutElimError> {
    eliminate_cuts_traced(tab, cs, DEFAULT_STEP_BUDGET).map(|(out, _)| out)
}

/// The rewrite trace of an elimination run.
pub fn cut_step_trace(
    tab: &Tableau,
    cs: &ConstantSpecification,
) -> Result<Vec<TraceEntry>, CutElimError> {
    eliminate_cuts_traced(tab, cs, DEFAULT_STEP_BUDGET).map(|(_, trace)| trace)
}

pub fn eliminate_cuts_traced(
    tab: &Tableau,
    cs: &ConstantSpecification,
    max_steps: usize,
) -> Result<(Tableau, Vec<TraceEntry>), CutElimError> {
    let mut root = from_tableau(tab);
    if !all_branches_closed(&root, cs) {
        return Err(CutElimError::NotClosed);
    }
    let mut trace = Vec::new();
    loop {
        prune_closed(&mut root, cs);
        let Some(path) = find_minimal_cut_path(&root) else {
            break;
        };
        if trace.len() >= max_steps {
            return Err(CutElimError::StepBudget(max_steps));
        }
        let entry = reduce_at(&mut root, &path, cs)?;
        debug_assert!(
            all_branches_closed(&root, cs),
            "closure broken by rewrite step: {}",
            entry
        );
        trace.push(entry);
    }
    debug_assert!(all_branches_closed(&root, cs));
    let out = to_tableau(&root)?;
    Ok((out, trace))
}

fn dual(sf: &SignedFormula) -> SignedFormula {
    SignedFormula {
        sign: sf.sign.flip(),
        payload: sf.payload.clone(),
    }
}

fn pivot_text(sf: &SignedFormula) -> String {
    match &sf.payload {
        Payload::Formula(f) => f.to_string(),
        Payload::Evidential(e) => e.to_string(),
    }
}

/// Measures of every cut parent inside a subtree (the replacements created
/// by a rewrite; grafted material is cut-free because the rewritten cut was
/// minimal).
fn cut_measures_under(node: &PNode) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    fn go(node: &PNode, out: &mut Vec<(u64, usize)>) {
        if node.is_cut_parent() {
            let w = node.children[0].size() - 1 + node.children[1].size() - 1;
            out.push((rank_payload(&node.children[0].payload), w));
        }
        for child in &node.children {
            go(child, out);
        }
    }
    go(node, &mut out);
    out
}

/// The rule instance applied at the top of a cut child's subtree: the
/// shared justification of its children.
fn top_instance(node: &PNode) -> Result<Option<(RuleId, Vec<SignedFormula>)>, CutElimError> {
    if node.children.is_empty() {
        return Ok(None);
    }
    let first = match &node.children[0].just {
        PJust::Rule { rule, premises } => (*rule, premises.clone()),
        _ => {
            return Err(CutElimError::MalformedCut(
                "cut child's child is not rule-justified".into(),
            ))
        }
    };
    for child in &node.children[1..] {
        match &child.just {
            PJust::Rule { rule, premises } if (*rule, premises) == (first.0, &first.1) => {}
            _ => {
                return Err(CutElimError::MalformedCut(
                    "siblings below a cut child carry different instances".into(),
                ))
            }
        }
    }
    Ok(Some(first))
}

fn branch_is_closed(branch: &[SignedFormula], cs: &ConstantSpecification) -> bool {
    crate::engine::closure_status(branch, cs).is_closed()
}

/// Detach the maximal single-child chain sharing one instance below `node`;
/// returns the chain nodes (childless) and leaves the tail as `node`'s
/// children.
fn detach_chain(node: &mut PNode) -> Vec<PNode> {
    debug_assert_eq!(node.children.len(), 1);
    let mut cur = node.children.remove(0);
    let instance = cur.just.clone();
    let mut chain = Vec::new();
    loop {
        if cur.children.len() == 1 && cur.children[0].just == instance {
            let next = cur.children.remove(0);
            chain.push(cur);
            cur = next;
        } else {
            node.children = std::mem::take(&mut cur.children);
            chain.push(cur);
            return chain;
        }
    }
}

/// Perform one rewrite at the minimal cut reached by `path`.
fn reduce_at(
    root: &mut PNode,
    path: &[usize],
    cs: &ConstantSpecification,
) -> Result<TraceEntry, CutElimError> {
    let branch = root.branch_to(path);
    let v = root.node_at_mut(path);
    if !v.is_cut_parent() {
        return Err(CutElimError::MalformedCut(
            "selected node is not a cut parent".into(),
        ));
    }
    let rank = rank_payload(&v.children[0].payload);
    let weight = v.children[0].size() - 1 + v.children[1].size() - 1;
    let pivot = pivot_text(&v.children[0].payload);
    let entry = |case: &str, v: &PNode| TraceEntry {
        case: case.into(),
        pivot: pivot.clone(),
        rank,
        weight,
        replacements: cut_measures_under(v),
    };

    // Redundant cut: one child's payload already occurs above. Keep that
    // side; the other fork would close immediately against it.
    for side in 0..2 {
        if branch.contains(&v.children[side].payload) {
            let kept = v.children.swap_remove(side);
            splice(v, kept, &branch, cs)?;
            return Ok(entry("I", v));
        }
    }

    let t_leaf = v.children[0].children.is_empty();
    let f_leaf = v.children[1].children.is_empty();
    if t_leaf || f_leaf {
        case_branch_end(v, &branch, cs)?;
        return Ok(entry("I", v));
    }

    let top_t = top_instance(&v.children[0])?.expect("nonempty side");
    let top_f = top_instance(&v.children[1])?.expect("nonempty side");
    let t_cites_pivot = top_t.1.contains(&v.children[0].payload);
    let f_cites_pivot = top_f.1.contains(&v.children[1].payload);

    if !t_cites_pivot {
        case_permute(v, 0);
        return Ok(entry("II", v));
    }
    if !f_cites_pivot {
        case_permute(v, 1);
        return Ok(entry("II", v));
    }

    // Principal cut: both tops consume their cut child.
    let label = case_principal(v, top_t.0, top_f.0)?;
    Ok(entry(label, v))
}

/// Replace the cut at `v` by one kept side. An empty kept side is legal
/// only when the branch above is already closed (the pruner usually
/// removes those first).
fn splice(
    v: &mut PNode,
    kept: PNode,
    branch: &[SignedFormula],
    cs: &ConstantSpecification,
) -> Result<(), CutElimError> {
    if kept.children.is_empty() && !branch_is_closed(branch, cs) {
        return Err(CutElimError::MalformedCut(
            "cut elimination would leave an open leaf".into(),
        ));
    }
    v.children = kept.children;
    Ok(())
}

/// Case I: one cut child is a (closed) leaf. Either the leaf's closure
/// partner sits above (the cut adds a redundant formula: splice the other
/// side), or the leaf closes by the CS condition and the cut is already a
/// legal PB instance.
fn case_branch_end(
    v: &mut PNode,
    branch: &[SignedFormula],
    cs: &ConstantSpecification,
) -> Result<(), CutElimError> {
    for leaf_side in 0..2 {
        if !v.children[leaf_side].children.is_empty() {
            continue;
        }
        let leaf_payload = v.children[leaf_side].payload.clone();
        if branch.contains(&dual(&leaf_payload)) {
            let kept = v.children.swap_remove(1 - leaf_side);
            return splice(v, kept, branch, cs);
        }
        // T ⊥ closes alone; nothing below can cite F ⊥.
        if leaf_payload == SignedFormula::t(Formula::Bottom) {
            let kept = v.children.swap_remove(1 - leaf_side);
            return splice(v, kept, branch, cs);
        }
        // F c:F against the constant specification: the cut pivot is a
        // CS-subformula of the root, so this is a legal PB.
        if let (Sign::F, Payload::Formula(f)) = (&leaf_payload.sign, &leaf_payload.payload) {
            if cs.contains(f) {
                for child in &mut v.children {
                    child.just = PJust::Rule {
                        rule: RuleId::Pb,
                        premises: vec![],
                    };
                }
                return Ok(());
            }
        }
    }
    Err(CutElimError::MalformedCut(
        "branch-end cut whose leaf closure cannot be explained".into(),
    ))
}

/// Case II: the top rule on `side` only uses material from above the cut.
/// Push that application above the cut; for a branching application the cut
/// is duplicated into both forks, for a linear one the products move up.
/// Weight strictly drops either way.
fn case_permute(v: &mut PNode, side: usize) {
    if v.children[side].children.len() == 1 {
        let chain = detach_chain(&mut v.children[side]);
        let cut_kids = std::mem::take(&mut v.children);
        let moved = seq(chain, cut_kids);
        v.children = vec![moved];
    } else {
        let mut kids = std::mem::take(&mut v.children);
        let f_node = kids.pop().expect("cut pair");
        let t_node = kids.pop().expect("cut pair");
        let (mut main, other) = if side == 0 {
            (t_node, f_node)
        } else {
            (f_node, t_node)
        };
        let forks = std::mem::take(&mut main.children);
        let fork_count = forks.len();
        let mut other_slot = Some(other);
        let mut new_forks = Vec::with_capacity(fork_count);
        for (i, mut fork) in forks.into_iter().enumerate() {
            let sub = std::mem::take(&mut fork.children);
            let main_copy = PNode {
                payload: main.payload.clone(),
                just: PJust::Cut,
                children: sub,
            };
            let other_copy = if i + 1 == fork_count {
                other_slot.take().expect("consumed once")
            } else {
                other_slot.as_ref().expect("still present").clone()
            };
            fork.children = if side == 0 {
                vec![main_copy, other_copy]
            } else {
                vec![other_copy, main_copy]
            };
            new_forks.push(fork);
        }
        v.children = new_forks;
    }
}

/// Case III dispatch: both uppermost rules consume the cut children.
fn case_principal(
    v: &mut PNode,
    t_rule: RuleId,
    f_rule: RuleId,
) -> Result<&'static str, CutElimError> {
    // An application rule consuming the positive atom: the side conditions
    // of that instance make the cut a legal PBe.
    if t_rule == RuleId::App {
        for child in &mut v.children {
            child.just = PJust::Rule {
                rule: RuleId::PbE,
                premises: vec![],
            };
        }
        return Ok("III-app");
    }

    let pivot = v.children[0].payload.clone();
    match &pivot.payload {
        Payload::Formula(Formula::Just(t, a)) => {
            if t_rule != RuleId::Te || f_rule != RuleId::Fe {
                return Err(CutElimError::MalformedCut(
                    "unexpected rules on t:A cut".into(),
                ));
            }
            rewrite_just(v, t.clone(), a.as_ref().clone());
            Ok("III-jst")
        }
        Payload::Formula(Formula::Neg(a)) => {
            if t_rule != RuleId::TNeg || f_rule != RuleId::FNeg {
                return Err(CutElimError::MalformedCut(
                    "unexpected rules on ~A cut".into(),
                ));
            }
            rewrite_neg(v, a.as_ref().clone());
            Ok("III-neg")
        }
        Payload::Formula(Formula::Implies(a, b)) => {
            if t_rule != RuleId::TImp || f_rule != RuleId::FImp {
                return Err(CutElimError::MalformedCut(
                    "unexpected rules on A->B cut".into(),
                ));
            }
            rewrite_imp(v, a.as_ref().clone(), b.as_ref().clone())?;
            Ok("III-imp")
        }
        Payload::Evidential(e) => {
            let e = e.clone();
            match f_rule {
                RuleId::SumL | RuleId::SumR => {
                    let Term::Sum(l, r) = &e.term else {
                        return Err(CutElimError::MalformedCut(
                            "sum rule on non-sum term".into(),
                        ));
                    };
                    let sub = if f_rule == RuleId::SumL {
                        l.as_ref().clone()
                    } else {
                        r.as_ref().clone()
                    };
                    if e.body == Formula::Bottom && t_rule == RuleId::EBot {
                        rewrite_sum_bot(v, e.term.clone(), sub, t_rule, f_rule);
                        Ok("III-bot")
                    } else if t_rule == RuleId::E || t_rule == RuleId::EBot {
                        rewrite_sum(v, e.term.clone(), sub, e.body.clone(), t_rule, f_rule);
                        Ok("III-sum")
                    } else {
                        Err(CutElimError::MalformedCut(
                            "unexpected positive rule on sum cut".into(),
                        ))
                    }
                }
                RuleId::Bang => {
                    if t_rule != RuleId::E {
                        return Err(CutElimError::MalformedCut(
                            "j4 cut without factivity".into(),
                        ));
                    }
                    let (Term::Bang(t), Formula::Just(t2, a)) = (&e.term, &e.body) else {
                        return Err(CutElimError::MalformedCut("malformed j4 atom".into()));
                    };
                    if t.as_ref() != t2 {
                        return Err(CutElimError::MalformedCut("malformed j4 atom".into()));
                    }
                    rewrite_bang(v, t2.clone(), a.as_ref().clone());
                    Ok("III-bang")
                }
                RuleId::Query => {
                    if t_rule != RuleId::E {
                        return Err(CutElimError::MalformedCut(
                            "j5 cut without factivity".into(),
                        ));
                    }
                    let (Term::Query(t), Formula::Neg(neg)) = (&e.term, &e.body) else {
                        return Err(CutElimError::MalformedCut("malformed j5 atom".into()));
                    };
                    let Formula::Just(t2, a) = neg.as_ref() else {
                        return Err(CutElimError::MalformedCut("malformed j5 atom".into()));
                    };
                    if t.as_ref() != t2 {
                        return Err(CutElimError::MalformedCut("malformed j5 atom".into()));
                    }
                    rewrite_query(v, t2.clone(), a.as_ref().clone());
                    Ok("III-query")
                }
                RuleId::WQuery => {
                    if t_rule != RuleId::E {
                        return Err(CutElimError::MalformedCut(
                            "jB cut without factivity".into(),
                        ));
                    }
                    let (Term::WQuery(t), Formula::Neg(neg)) = (&e.term, &e.body) else {
                        return Err(CutElimError::MalformedCut("malformed jB atom".into()));
                    };
                    let Formula::Just(t2, a) = neg.as_ref() else {
                        return Err(CutElimError::MalformedCut("malformed jB atom".into()));
                    };
                    if t.as_ref() != t2 {
                        return Err(CutElimError::MalformedCut("malformed jB atom".into()));
                    }
                    rewrite_wquery(v, t2.clone(), a.as_ref().clone());
                    Ok("III-wquery")
                }
                other => Err(CutElimError::MalformedCut(format!(
                    "unexpected negative rule {} on evidential cut",
                    other
                ))),
            }
        }
        _ => Err(CutElimError::MalformedCut(
            "principal cut on an atomic pivot".into(),
        )),
    }
}

/// Take apart a principal cut: returns (T-side product subtrees, F-side
/// product subtrees), dropping the two cut children and their single
/// product nodes.
fn take_parts(v: &mut PNode) -> (Vec<PNode>, Vec<PNode>) {
    let mut kids = std::mem::take(&mut v.children);
    let mut cf = kids.pop().expect("cut pair");
    let mut ct = kids.pop().expect("cut pair");
    debug_assert_eq!(ct.children.len(), 1);
    debug_assert_eq!(cf.children.len(), 1);
    let t1 = std::mem::take(&mut ct.children[0].children);
    let t2 = std::mem::take(&mut cf.children[0].children);
    (t1, t2)
}

fn cut_t(payload: SignedFormula, children: Vec<PNode>) -> PNode {
    PNode {
        payload,
        just: PJust::Cut,
        children,
    }
}

/// Principal cut on `t:A` with `Te`/`Fe` on the two sides.
fn rewrite_just(v: &mut PNode, t: Term, a: Formula) {
    let (t1, t2) = take_parts(v);
    let tja = Formula::just(t.clone(), a.clone());
    let atom_t = SignedFormula::t_ev(t.clone(), a.clone());
    let atom_f = SignedFormula::f_ev(t.clone(), a.clone());
    let jt = SignedFormula::t(tja.clone());
    let jf = SignedFormula::f(tja.clone());

    v.children = vec![
        cut_t(
            atom_t.clone(),
            vec![
                cut_t(jt.clone(), t1),
                cut_t(
                    jf.clone(),
                    vec![PNode::rule(atom_f.clone(), RuleId::Fe, vec![jf.clone()])],
                ),
            ],
        ),
        cut_t(
            atom_f.clone(),
            vec![
                cut_t(jt.clone(), vec![PNode::rule(atom_t, RuleId::Te, vec![jt])]),
                cut_t(jf, t2),
            ],
        ),
    ];
}

/// Principal cut on `~A` with `T¬`/`F¬` on the two sides.
fn rewrite_neg(v: &mut PNode, a: Formula) {
    let (t1, t2) = take_parts(v);
    let neg = Formula::neg(a.clone());
    let nt = SignedFormula::t(neg.clone());
    let nf = SignedFormula::f(neg.clone());
    let at = SignedFormula::t(a.clone());
    let af = SignedFormula::f(a.clone());

    v.children = vec![
        cut_t(
            at.clone(),
            vec![
                cut_t(
                    nt.clone(),
                    vec![PNode::rule(af.clone(), RuleId::TNeg, vec![nt.clone()])],
                ),
                cut_t(nf.clone(), t2),
            ],
        ),
        cut_t(
            af,
            vec![
                cut_t(nt, t1),
                cut_t(nf.clone(), vec![PNode::rule(at, RuleId::FNeg, vec![nf])]),
            ],
        ),
    ];
}

/// Principal cut on `A->B` with `T→` forks on the positive side and the
/// `F→` chain on the negative side.
fn rewrite_imp(v: &mut PNode, a: Formula, b: Formula) -> Result<(), CutElimError> {
    let mut kids = std::mem::take(&mut v.children);
    let mut cf = kids.pop().expect("cut pair");
    let mut ct = kids.pop().expect("cut pair");
    if ct.children.len() != 2 {
        return Err(CutElimError::MalformedCut(
            "T-side of an implication cut lacks forks".into(),
        ));
    }
    let mut fork_r = ct.children.pop().expect("two forks");
    let mut fork_l = ct.children.pop().expect("two forks");
    // fork order: F A then T B, as produced by the branching application
    if fork_l.payload != SignedFormula::f(a.clone()) {
        std::mem::swap(&mut fork_l, &mut fork_r);
    }
    let alpha = std::mem::take(&mut fork_l.children);
    let beta = std::mem::take(&mut fork_r.children);
    let _ = detach_chain(&mut cf);
    let gamma = std::mem::take(&mut cf.children);

    let imp = Formula::imp(a.clone(), b.clone());
    let it = SignedFormula::t(imp.clone());
    let ifa = SignedFormula::f(imp.clone());
    let ta = SignedFormula::t(a.clone());
    let fa = SignedFormula::f(a.clone());
    let tb = SignedFormula::t(b.clone());
    let fb = SignedFormula::f(b.clone());

    v.children = vec![
        cut_t(
            ta.clone(),
            vec![
                cut_t(
                    tb.clone(),
                    vec![
                        cut_t(it.clone(), beta),
                        cut_t(
                            ifa.clone(),
                            vec![PNode::rule(fb.clone(), RuleId::FImp, vec![ifa.clone()])],
                        ),
                    ],
                ),
                cut_t(
                    fb.clone(),
                    vec![
                        cut_t(
                            it.clone(),
                            vec![
                                PNode::rule(fa.clone(), RuleId::TImp, vec![it.clone()]),
                                PNode::rule(tb.clone(), RuleId::TImp, vec![it.clone()]),
                            ],
                        ),
                        cut_t(ifa.clone(), gamma),
                    ],
                ),
            ],
        ),
        cut_t(
            fa,
            vec![
                cut_t(it, alpha),
                cut_t(ifa.clone(), vec![PNode::rule(ta, RuleId::FImp, vec![ifa])]),
            ],
        ),
    ];
    Ok(())
}

/// Principal cut on `[t+s, A]` with factivity against a sum projection.
fn rewrite_sum(v: &mut PNode, sum: Term, sub: Term, a: Formula, t_rule: RuleId, f_rule: RuleId) {
    let (t1, t2) = take_parts(v);
    let sum_t = SignedFormula::t_ev(sum.clone(), a.clone());
    let sum_f = SignedFormula::f_ev(sum.clone(), a.clone());
    let sub_t = SignedFormula::t_ev(sub.clone(), a.clone());
    let sub_f = SignedFormula::f_ev(sub.clone(), a.clone());
    let at = SignedFormula::t(a.clone());
    let af = SignedFormula::f(a.clone());

    v.children = vec![
        cut_t(
            sub_t.clone(),
            vec![
                cut_t(
                    at.clone(),
                    vec![
                        cut_t(sum_t.clone(), t1.clone()),
                        cut_t(
                            sum_f.clone(),
                            vec![PNode::rule(sub_f.clone(), f_rule, vec![sum_f.clone()])],
                        ),
                    ],
                ),
                cut_t(
                    af,
                    vec![PNode::rule(at.clone(), t_rule, vec![sub_t.clone()])],
                ),
            ],
        ),
        cut_t(
            sub_f,
            vec![
                cut_t(
                    sum_t.clone(),
                    vec![seq(vec![PNode::rule(at, t_rule, vec![sum_t])], t1)],
                ),
                cut_t(sum_f, t2),
            ],
        ),
    ];
}

/// Principal cut on `[t+s, ⊥]` where the positive side closes by falsum.
fn rewrite_sum_bot(v: &mut PNode, sum: Term, sub: Term, t_rule: RuleId, f_rule: RuleId) {
    let (_t1, t2) = take_parts(v);
    let _ = f_rule;
    let bot = Formula::Bottom;
    let sum_t = SignedFormula::t_ev(sum.clone(), bot.clone());
    let sum_f = SignedFormula::f_ev(sum.clone(), bot.clone());
    let sub_t = SignedFormula::t_ev(sub.clone(), bot.clone());
    let sub_f = SignedFormula::f_ev(sub.clone(), bot.clone());
    let falsum = SignedFormula::t(bot);

    v.children = vec![
        cut_t(
            sub_t.clone(),
            vec![PNode::rule(falsum.clone(), t_rule, vec![sub_t])],
        ),
        cut_t(
            sub_f,
            vec![
                cut_t(
                    sum_t.clone(),
                    vec![PNode::rule(falsum, t_rule, vec![sum_t])],
                ),
                cut_t(sum_f, t2),
            ],
        ),
    ];
}

/// Principal cut on `[!t, t:A]` (factivity against positive introspection).
fn rewrite_bang(v: &mut PNode, t: Term, a: Formula) {
    let (t1, t2) = take_parts(v);
    let tja = Formula::just(t.clone(), a.clone());
    let piv_t = SignedFormula::t_ev(Term::bang(t.clone()), tja.clone());
    let piv_f = SignedFormula::f_ev(Term::bang(t.clone()), tja.clone());
    let atom_t = SignedFormula::t_ev(t.clone(), a.clone());
    let atom_f = SignedFormula::f_ev(t.clone(), a.clone());
    let jt = SignedFormula::t(tja.clone());
    let jf = SignedFormula::f(tja.clone());

    v.children = vec![
        cut_t(
            atom_t.clone(),
            vec![
                cut_t(
                    jt.clone(),
                    vec![
                        cut_t(piv_t.clone(), t1),
                        cut_t(
                            piv_f.clone(),
                            vec![PNode::rule(
                                atom_f.clone(),
                                RuleId::Bang,
                                vec![piv_f.clone()],
                            )],
                        ),
                    ],
                ),
                cut_t(
                    jf.clone(),
                    vec![PNode::rule(atom_f.clone(), RuleId::Fe, vec![jf.clone()])],
                ),
            ],
        ),
        cut_t(
            atom_f,
            vec![
                cut_t(
                    jt.clone(),
                    vec![PNode::rule(atom_t, RuleId::Te, vec![jt.clone()])],
                ),
                cut_t(
                    jf.clone(),
                    vec![
                        cut_t(piv_t.clone(), vec![PNode::rule(jt, RuleId::E, vec![piv_t])]),
                        cut_t(piv_f, t2),
                    ],
                ),
            ],
        ),
    ];
}

/// Principal cut on `[?t, ~t:A]` (factivity against negative
/// introspection). The lower-rank cuts on `~t:A` and `[t,A]` carry the
/// multi-node closing stubs; the two same-rank cuts pair one graft with a
/// single-node stub, so their weights are strictly below the original.
fn rewrite_query(v: &mut PNode, t: Term, a: Formula) {
    let (t1, t2) = take_parts(v);
    let tja = Formula::just(t.clone(), a.clone());
    let ntja = Formula::neg(tja.clone());
    let piv_t = SignedFormula::t_ev(Term::query(t.clone()), ntja.clone());
    let piv_f = SignedFormula::f_ev(Term::query(t.clone()), ntja.clone());
    let zt = SignedFormula::t(ntja.clone());
    let zf = SignedFormula::f(ntja.clone());
    let xt = SignedFormula::t_ev(t.clone(), a.clone());
    let xf = SignedFormula::f_ev(t.clone(), a.clone());
    let just_t = SignedFormula::t(tja.clone());
    let just_f = SignedFormula::f(tja.clone());

    v.children = vec![
        cut_t(
            zt.clone(),
            vec![
                cut_t(
                    xt.clone(),
                    vec![seq(
                        vec![
                            PNode::rule(just_f.clone(), RuleId::TNeg, vec![zt.clone()]),
                            PNode::rule(xf.clone(), RuleId::Fe, vec![just_f.clone()]),
                        ],
                        vec![],
                    )],
                ),
                cut_t(
                    xf.clone(),
                    vec![
                        cut_t(piv_t.clone(), t1),
                        cut_t(
                            piv_f.clone(),
                            vec![PNode::rule(xt.clone(), RuleId::Query, vec![piv_f.clone()])],
                        ),
                    ],
                ),
            ],
        ),
        cut_t(
            zf.clone(),
            vec![
                cut_t(
                    xt.clone(),
                    vec![
                        cut_t(
                            piv_t.clone(),
                            vec![PNode::rule(zt, RuleId::E, vec![piv_t.clone()])],
                        ),
                        cut_t(piv_f, t2),
                    ],
                ),
                cut_t(
                    xf,
                    vec![seq(
                        vec![
                            PNode::rule(just_t.clone(), RuleId::FNeg, vec![zf]),
                            PNode::rule(xt, RuleId::Te, vec![just_t]),
                        ],
                        vec![],
                    )],
                ),
            ],
        ),
    ];
}

/// Principal cut on `[??t, ~t:A]` (factivity against the jB rule). An
/// outer cut on `A` feeds the grafts of the negative subtableau; both
/// subtableaux are duplicated.
fn rewrite_wquery(v: &mut PNode, t: Term, a: Formula) {
    let (t1, t2) = take_parts(v);
    let tja = Formula::just(t.clone(), a.clone());
    let ntja = Formula::neg(tja.clone());
    let piv_t = SignedFormula::t_ev(Term::wquery(t.clone()), ntja.clone());
    let piv_f = SignedFormula::f_ev(Term::wquery(t.clone()), ntja.clone());
    let just_t = SignedFormula::t(tja.clone());
    let zt = SignedFormula::t(ntja.clone());
    let zf = SignedFormula::f(ntja.clone());
    let at = SignedFormula::t(a.clone());
    let af = SignedFormula::f(a.clone());
    let atom_t = SignedFormula::t_ev(t.clone(), a.clone());

    v.children = vec![
        cut_t(
            at.clone(),
            vec![
                cut_t(
                    zt.clone(),
                    vec![
                        cut_t(piv_t.clone(), t1.clone()),
                        cut_t(piv_f.clone(), t2.clone()),
                    ],
                ),
                cut_t(
                    zf.clone(),
                    vec![
                        cut_t(
                            piv_t.clone(),
                            vec![PNode::rule(zt.clone(), RuleId::E, vec![piv_t.clone()])],
                        ),
                        cut_t(piv_f.clone(), t2),
                    ],
                ),
            ],
        ),
        cut_t(
            af.clone(),
            vec![
                cut_t(
                    zt.clone(),
                    vec![
                        cut_t(piv_t.clone(), t1),
                        cut_t(
                            piv_f.clone(),
                            vec![PNode::rule(at, RuleId::WQuery, vec![piv_f])],
                        ),
                    ],
                ),
                cut_t(
                    zf.clone(),
                    vec![seq(
                        vec![
                            PNode::rule(just_t.clone(), RuleId::FNeg, vec![zf]),
                            PNode::rule(atom_t.clone(), RuleId::Te, vec![just_t]),
                            PNode::rule(SignedFormula::t(a.clone()), RuleId::E, vec![atom_t]),
                        ],
                        vec![],
                    )],
                ),
            ],
        ),
    ];
}
