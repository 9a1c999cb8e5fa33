//! Independent certification of proof objects: every node is rechecked
//! against the rule schemas and side conditions, and every leaf branch
//! against the closure conditions. Nothing here trusts the search.

use std::collections::HashSet;

use thiserror::Error;

use crate::logic::{ConstantSpecification, LogicSpec};
use crate::syntax::{Formula, Payload, Sign, SignedFormula, Term};

use super::{closure_status, Justification, NodeId, ProofContext, RuleId, Tableau};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error("root sequence does not match the goal")]
    RootMismatch,
    #[error("node {0}: cut nodes are not part of the restricted calculus")]
    CutPresent(NodeId),
    #[error("node {node}: rule {rule} is not active in {logic}")]
    InactiveRule {
        node: NodeId,
        rule: String,
        logic: String,
    },
    #[error("node {node}: premise {premise} is not a proper ancestor")]
    PremiseNotOnBranch { node: NodeId, premise: NodeId },
    #[error("node {node}: payload is not a product of {rule} from the cited premises")]
    ProductMismatch { node: NodeId, rule: String },
    #[error("node {node}: side condition of {rule} fails")]
    SideCondition { node: NodeId, rule: String },
    #[error("node {node}: malformed branching structure")]
    BranchingStructure { node: NodeId },
    #[error("leaf {leaf}: branch is open")]
    OpenLeaf { leaf: NodeId },
    #[error("malformed tableau: {0}")]
    Malformed(String),
}

fn payload_formula(sf: &SignedFormula) -> Option<&Formula> {
    sf.as_formula()
}

/// The admissible products of a linear rule given its premise payloads.
/// `None` means the premises do not fit the rule schema at all.
fn linear_products(
    rule: RuleId,
    premises: &[&SignedFormula],
    ctx: &ProofContext,
) -> Option<Vec<SignedFormula>> {
    match rule {
        RuleId::FNeg => {
            let [sf] = premises else { return None };
            match (&sf.sign, payload_formula(sf)?) {
                (Sign::F, Formula::Neg(a)) => Some(vec![SignedFormula::t(a.as_ref().clone())]),
                _ => None,
            }
        }
        RuleId::TNeg => {
            let [sf] = premises else { return None };
            match (&sf.sign, payload_formula(sf)?) {
                (Sign::T, Formula::Neg(a)) => Some(vec![SignedFormula::f(a.as_ref().clone())]),
                _ => None,
            }
        }
        RuleId::FImp => {
            let [sf] = premises else { return None };
            match (&sf.sign, payload_formula(sf)?) {
                (Sign::F, Formula::Implies(a, b)) => Some(vec![
                    SignedFormula::t(a.as_ref().clone()),
                    SignedFormula::f(b.as_ref().clone()),
                ]),
                _ => None,
            }
        }
        RuleId::Te => {
            let [sf] = premises else { return None };
            match (&sf.sign, payload_formula(sf)?) {
                (Sign::T, Formula::Just(t, a)) => {
                    Some(vec![SignedFormula::t_ev(t.clone(), a.as_ref().clone())])
                }
                _ => None,
            }
        }
        RuleId::Fe => {
            let [sf] = premises else { return None };
            match (&sf.sign, payload_formula(sf)?) {
                (Sign::F, Formula::Just(t, a)) => {
                    Some(vec![SignedFormula::f_ev(t.clone(), a.as_ref().clone())])
                }
                _ => None,
            }
        }
        RuleId::SumL | RuleId::SumR => {
            let [sf] = premises else { return None };
            let e = sf.as_evidential()?;
            if sf.sign != Sign::F {
                return None;
            }
            let Term::Sum(l, r) = &e.term else {
                return None;
            };
            let sub = if rule == RuleId::SumL { l } else { r };
            Some(vec![SignedFormula::f_ev(
                sub.as_ref().clone(),
                e.body.clone(),
            )])
        }
        RuleId::E => {
            let [sf] = premises else { return None };
            let e = sf.as_evidential()?;
            if sf.sign != Sign::T {
                return None;
            }
            Some(vec![SignedFormula::t(e.body.clone())])
        }
        RuleId::EBot => {
            let [sf] = premises else { return None };
            let e = sf.as_evidential()?;
            if sf.sign != Sign::T || e.body != Formula::Bottom {
                return None;
            }
            Some(vec![SignedFormula::t(Formula::Bottom)])
        }
        RuleId::Bang => {
            let [sf] = premises else { return None };
            let e = sf.as_evidential()?;
            if sf.sign != Sign::F {
                return None;
            }
            let (Term::Bang(t), Formula::Just(t2, a)) = (&e.term, &e.body) else {
                return None;
            };
            if t.as_ref() != t2 {
                return None;
            }
            Some(vec![SignedFormula::f_ev(t2.clone(), a.as_ref().clone())])
        }
        RuleId::WQuery => {
            let [sf] = premises else { return None };
            let e = sf.as_evidential()?;
            if sf.sign != Sign::F {
                return None;
            }
            let (Term::WQuery(t), Formula::Neg(neg)) = (&e.term, &e.body) else {
                return None;
            };
            let Formula::Just(t2, a) = neg.as_ref() else {
                return None;
            };
            if t.as_ref() != t2 {
                return None;
            }
            Some(vec![SignedFormula::t(a.as_ref().clone())])
        }
        RuleId::Query => {
            let [sf] = premises else { return None };
            let e = sf.as_evidential()?;
            if sf.sign != Sign::F {
                return None;
            }
            let (Term::Query(t), Formula::Neg(neg)) = (&e.term, &e.body) else {
                return None;
            };
            let Formula::Just(t2, a) = neg.as_ref() else {
                return None;
            };
            if t.as_ref() != t2 {
                return None;
            }
            Some(vec![SignedFormula::t_ev(t2.clone(), a.as_ref().clone())])
        }
        RuleId::App => {
            // Premises unordered; try both assignments.
            let [p1, p2] = premises else { return None };
            for (major, minor) in [(p1, p2), (p2, p1)] {
                let (Some(maj), Some(min)) = (major.as_evidential(), minor.as_evidential()) else {
                    continue;
                };
                if major.sign != Sign::T || minor.sign != Sign::T {
                    continue;
                }
                let Formula::Implies(a, b) = &maj.body else {
                    continue;
                };
                if a.as_ref() != &min.body {
                    continue;
                }
                if !ctx.cs_sub.contains(&maj.body) {
                    continue;
                }
                let product = Term::app(maj.term.clone(), min.term.clone());
                if !ctx.occ.contains(&product) {
                    continue;
                }
                return Some(vec![SignedFormula::t_ev(product, b.as_ref().clone())]);
            }
            None
        }
        RuleId::TImp | RuleId::Pb | RuleId::PbE => None,
    }
}

/// The two fork payloads of a branching rule. For PB/PBe the node's own
/// payload determines the pivot.
fn branching_forks(
    rule: RuleId,
    premises: &[&SignedFormula],
    node_payload: &SignedFormula,
    ctx: &ProofContext,
) -> Option<(SignedFormula, SignedFormula)> {
    match rule {
        RuleId::TImp => {
            let [sf] = premises else { return None };
            match (&sf.sign, payload_formula(sf)?) {
                (Sign::T, Formula::Implies(a, b)) => Some((
                    SignedFormula::f(a.as_ref().clone()),
                    SignedFormula::t(b.as_ref().clone()),
                )),
                _ => None,
            }
        }
        RuleId::Pb => {
            if !premises.is_empty() {
                return None;
            }
            let pivot = node_payload.as_formula()?;
            if !ctx.cs_sub.contains(pivot) {
                return None;
            }
            Some((
                SignedFormula::t(pivot.clone()),
                SignedFormula::f(pivot.clone()),
            ))
        }
        RuleId::PbE => {
            if !premises.is_empty() {
                return None;
            }
            let pivot = node_payload.as_evidential()?;
            if !ctx.cs_sub.contains(&pivot.body) || !ctx.occ.contains(&pivot.term) {
                return None;
            }
            Some((
                SignedFormula::t_ev(pivot.term.clone(), pivot.body.clone()),
                SignedFormula::f_ev(pivot.term.clone(), pivot.body.clone()),
            ))
        }
        _ => None,
    }
}

/// Certify a proof: the root must be `F goal`, every node must be justified
/// by a legal rule instance with its side conditions rechecked, cut nodes
/// are rejected, and every leaf branch must close.
pub fn check_proof(
    tableau: &Tableau,
    goal: &Formula,
    logic: &LogicSpec,
    cs: &ConstantSpecification,
) -> Result<(), CheckError> {
    let expected_roots = vec![SignedFormula::f(goal.clone())];
    check_tableau(tableau, &expected_roots, logic, cs)
}

/// Certification against an explicit root sequence (tableaux for sets).
pub fn check_tableau(
    tableau: &Tableau,
    expected_roots: &[SignedFormula],
    logic: &LogicSpec,
    cs: &ConstantSpecification,
) -> Result<(), CheckError> {
    if tableau.roots.len() != expected_roots.len() {
        return Err(CheckError::RootMismatch);
    }
    for (id, expected) in tableau.roots.iter().zip(expected_roots) {
        if &tableau.nodes[*id].payload != expected
            || !matches!(tableau.nodes[*id].just, Justification::Root)
        {
            return Err(CheckError::RootMismatch);
        }
    }
    // The root chain must sit at the top of the tree: node 0 is the first
    // root, each root's single child is the next root.
    if tableau.roots.first() != Some(&0) || tableau.nodes[0].parent.is_some() {
        return Err(CheckError::RootMismatch);
    }
    for w in tableau.roots.windows(2) {
        if tableau.nodes[w[0]].children != vec![w[1]] {
            return Err(CheckError::RootMismatch);
        }
    }

    // Tree-shape sanity before any branch walking: parent links must match
    // the children arrays and every node must be reachable from the root
    // exactly once, so no cycles and no dangling nodes.
    let n = tableau.nodes.len();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        for &c in &tableau.nodes[id].children {
            if c >= n {
                return Err(CheckError::Malformed(format!("child {} out of range", c)));
            }
            if seen[c] {
                return Err(CheckError::Malformed(format!("node {} has two parents", c)));
            }
            if tableau.nodes[c].parent != Some(id) {
                return Err(CheckError::Malformed(format!(
                    "node {} disagrees with its parent link",
                    c
                )));
            }
            seen[c] = true;
            stack.push(c);
        }
    }
    if let Some(orphan) = seen.iter().position(|s| !s) {
        return Err(CheckError::Malformed(format!(
            "node {} is unreachable",
            orphan
        )));
    }

    let root_set: HashSet<NodeId> = tableau.roots.iter().copied().collect();
    let roots: Vec<SignedFormula> = tableau
        .roots
        .iter()
        .map(|&i| tableau.nodes[i].payload.clone())
        .collect();
    let ctx = ProofContext::for_roots(&roots, logic, cs);

    for (id, node) in tableau.nodes.iter().enumerate() {
        if node.children.len() > 2 {
            return Err(CheckError::Malformed(format!(
                "node {} has {} children",
                id,
                node.children.len()
            )));
        }
        if node.children.len() == 2 {
            let a = &tableau.nodes[node.children[0]];
            let b = &tableau.nodes[node.children[1]];
            match (&a.just, &b.just) {
                (
                    Justification::Rule {
                        rule: ra,
                        premises: pa,
                    },
                    Justification::Rule {
                        rule: rb,
                        premises: pb,
                    },
                ) if ra == rb && pa == pb && ra.is_branching() => {}
                _ => return Err(CheckError::BranchingStructure { node: id }),
            }
        }
        match &node.just {
            Justification::Root => {
                if !root_set.contains(&id) {
                    return Err(CheckError::Malformed(format!(
                        "node {} claims to be a root but is not in the root chain",
                        id
                    )));
                }
            }
            Justification::Cut => return Err(CheckError::CutPresent(id)),
            Justification::Rule { rule, premises } => {
                if !rule.active_in(logic) {
                    return Err(CheckError::InactiveRule {
                        node: id,
                        rule: rule.to_string(),
                        logic: logic.name(),
                    });
                }
                // Premises must be proper ancestors.
                let ancestors: HashSet<NodeId> = {
                    let mut set = HashSet::new();
                    let mut cur = node.parent;
                    while let Some(n) = cur {
                        set.insert(n);
                        cur = tableau.nodes[n].parent;
                    }
                    set
                };
                for p in premises {
                    if !ancestors.contains(p) {
                        return Err(CheckError::PremiseNotOnBranch {
                            node: id,
                            premise: *p,
                        });
                    }
                }
                let premise_payloads: Vec<&SignedFormula> = premises
                    .iter()
                    .map(|&p| &tableau.nodes[p].payload)
                    .collect();
                if rule.is_branching() {
                    let Some((left, right)) =
                        branching_forks(*rule, &premise_payloads, &node.payload, &ctx)
                    else {
                        return Err(CheckError::SideCondition {
                            node: id,
                            rule: rule.to_string(),
                        });
                    };
                    // This node and its sibling must realise both forks.
                    let parent = node
                        .parent
                        .ok_or(CheckError::BranchingStructure { node: id })?;
                    let siblings = &tableau.nodes[parent].children;
                    if siblings.len() != 2 {
                        return Err(CheckError::BranchingStructure { node: id });
                    }
                    let other = if siblings[0] == id {
                        siblings[1]
                    } else {
                        siblings[0]
                    };
                    let pair = (node.payload.clone(), tableau.nodes[other].payload.clone());
                    let ok =
                        (pair.0 == left && pair.1 == right) || (pair.0 == right && pair.1 == left);
                    if !ok {
                        return Err(CheckError::ProductMismatch {
                            node: id,
                            rule: rule.to_string(),
                        });
                    }
                } else {
                    let Some(products) = linear_products(*rule, &premise_payloads, &ctx) else {
                        return Err(CheckError::SideCondition {
                            node: id,
                            rule: rule.to_string(),
                        });
                    };
                    if !products.contains(&node.payload) {
                        return Err(CheckError::ProductMismatch {
                            node: id,
                            rule: rule.to_string(),
                        });
                    }
                }
            }
        }
    }

    for leaf in tableau.leaves() {
        let branch = tableau.branch_formulas(leaf);
        if !closure_status(&branch, cs).is_closed() {
            return Err(CheckError::OpenLeaf { leaf });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("tableau contains a cut at node {0}")]
    CutPresent(NodeId),
    #[error("node {node}: formula '{payload}' is not a weak CS-subformula of the root")]
    FormulaOutsideRoot { node: NodeId, payload: String },
    #[error("node {node}: evidential body '{payload}' is not a CS-subformula of the root")]
    BodyOutsideRoot { node: NodeId, payload: String },
    #[error("node {node}: term '{term}' does not occur in the root or the CS")]
    TermOutsideRoot { node: NodeId, term: String },
}

/// The subformula property: in a cut-free tableau every formula node reads
/// (unsigned) as a weak CS-subformula of the root, every evidential body is
/// a CS-subformula, and every evidential term occurs in the root or in the
/// CS.
pub fn audit_subformula_property(
    tableau: &Tableau,
    cs: &ConstantSpecification,
) -> Result<(), AuditError> {
    use crate::logic::{cs_subformulas_of_set, occurring_terms_of_set, weak_cs_subformulas_of_set};
    let unsigned_roots: Vec<Formula> = tableau
        .roots
        .iter()
        .filter_map(|&i| tableau.nodes[i].payload.unsigned_formula())
        .collect();
    let weak = weak_cs_subformulas_of_set(&unsigned_roots, cs);
    let subs = cs_subformulas_of_set(&unsigned_roots, cs);
    let occ = occurring_terms_of_set(&unsigned_roots, cs);

    for (id, node) in tableau.nodes.iter().enumerate() {
        if matches!(node.just, Justification::Cut) {
            return Err(AuditError::CutPresent(id));
        }
        match &node.payload.payload {
            Payload::Formula(_) => {
                let unsigned = node.payload.unsigned_formula().expect("formula payload");
                if !weak.contains(&unsigned) {
                    return Err(AuditError::FormulaOutsideRoot {
                        node: id,
                        payload: unsigned.to_string(),
                    });
                }
            }
            Payload::Evidential(e) => {
                if !subs.contains(&e.body) {
                    return Err(AuditError::BodyOutsideRoot {
                        node: id,
                        payload: e.body.to_string(),
                    });
                }
                if !occ.contains(&e.term) {
                    return Err(AuditError::TermOutsideRoot {
                        node: id,
                        term: e.term.to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}
