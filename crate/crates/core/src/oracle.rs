//! Cross-checking harness: forgetful projection into modal logic, a small
//! modal tableau prover with ancestor loop checking for the transitive
//! logics, and a seeded random goal generator.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::logic::LogicSpec;
use crate::syntax::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModalFormula {
    Prop(String),
    Bottom,
    Neg(Box<ModalFormula>),
    Implies(Box<ModalFormula>, Box<ModalFormula>),
    Box_(Box<ModalFormula>),
}

impl ModalFormula {
    pub fn neg(inner: ModalFormula) -> Self {
        ModalFormula::Neg(Box::new(inner))
    }

    pub fn imp(l: ModalFormula, r: ModalFormula) -> Self {
        ModalFormula::Implies(Box::new(l), Box::new(r))
    }

    pub fn boxed(inner: ModalFormula) -> Self {
        ModalFormula::Box_(Box::new(inner))
    }
}

impl std::fmt::Display for ModalFormula {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModalFormula::Prop(p) => write!(out, "{}", p),
            ModalFormula::Bottom => write!(out, "_|_"),
            ModalFormula::Neg(a) => write!(out, "~{}", wrap(a)),
            ModalFormula::Implies(a, b) => write!(out, "{} -> {}", wrap(a), b),
            ModalFormula::Box_(a) => write!(out, "[]{}", wrap(a)),
        }
    }
}

fn wrap(f: &ModalFormula) -> String {
    match f {
        ModalFormula::Implies(..) => format!("({})", f),
        _ => f.to_string(),
    }
}

/// Erase justification terms: `t:A` becomes `□A`.
pub fn forgetful_projection(f: &Formula) -> ModalFormula {
    match f {
        Formula::Prop(p) => ModalFormula::Prop(p.clone()),
        Formula::Bottom => ModalFormula::Bottom,
        Formula::Neg(a) => ModalFormula::neg(forgetful_projection(a)),
        Formula::Implies(a, b) => {
            ModalFormula::imp(forgetful_projection(a), forgetful_projection(b))
        }
        Formula::Just(_, a) => ModalFormula::boxed(forgetful_projection(a)),
    }
}

/// Supported modal logics for the projection check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModalLogic {
    K,
    T,
    D,
    K4,
    S4,
}

impl ModalLogic {
    fn reflexive(self) -> bool {
        matches!(self, ModalLogic::T | ModalLogic::S4)
    }

    fn transitive(self) -> bool {
        matches!(self, ModalLogic::K4 | ModalLogic::S4)
    }

    fn serial(self) -> bool {
        matches!(self, ModalLogic::D)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("no modal counterpart for logic {0}")]
pub struct UnsupportedLogic(pub String);

/// The modal counterpart of a justification logic, where one exists in the
/// supported range (logics with jB or j5 are excluded).
pub fn counterpart(logic: &LogicSpec) -> Result<ModalLogic, UnsupportedLogic> {
    match (logic.jt, logic.jd, logic.j4, logic.jb, logic.j5) {
        (false, false, false, false, false) => Ok(ModalLogic::K),
        (true, false, false, false, false) => Ok(ModalLogic::T),
        (false, true, false, false, false) => Ok(ModalLogic::D),
        (false, false, true, false, false) => Ok(ModalLogic::K4),
        (true, false, true, false, false) => Ok(ModalLogic::S4),
        _ => Err(UnsupportedLogic(logic.name())),
    }
}

type World = BTreeSet<(bool, ModalFormula)>;

/// Satisfiability of a set of signed modal formulas by tableau with
/// propositional saturation per world and fresh successors for refuted
/// boxes; transitive logics carry boxes forward and use an ancestor loop
/// check.
fn satisfiable(mut world: World, logic: ModalLogic, path: &mut Vec<World>) -> bool {
    // Propositional saturation; branching handled by recursion.
    loop {
        let mut new_items: Vec<(bool, ModalFormula)> = Vec::new();
        let mut branch: Option<((bool, ModalFormula), (bool, ModalFormula))> = None;
        for (sign, f) in &world {
            match (sign, f) {
                (true, ModalFormula::Bottom) => return false,
                (_, ModalFormula::Neg(a)) => {
                    let item = (!sign, a.as_ref().clone());
                    if !world.contains(&item) {
                        new_items.push(item);
                    }
                }
                (false, ModalFormula::Implies(a, b)) => {
                    for item in [(true, a.as_ref().clone()), (false, b.as_ref().clone())] {
                        if !world.contains(&item) {
                            new_items.push(item);
                        }
                    }
                }
                (true, ModalFormula::Implies(a, b)) => {
                    let left = (false, a.as_ref().clone());
                    let right = (true, b.as_ref().clone());
                    if !world.contains(&left) && !world.contains(&right) {
                        branch.get_or_insert((left, right));
                    }
                }
                (true, ModalFormula::Box_(a)) if logic.reflexive() => {
                    let item = (true, a.as_ref().clone());
                    if !world.contains(&item) {
                        new_items.push(item);
                    }
                }
                _ => {}
            }
        }
        if !new_items.is_empty() {
            for item in new_items {
                let dual = (!item.0, item.1.clone());
                if world.contains(&dual) {
                    return false;
                }
                world.insert(item);
            }
            continue;
        }
        if let Some((left, right)) = branch {
            for item in [left, right] {
                let dual = (!item.0, item.1.clone());
                if world.contains(&dual) {
                    continue;
                }
                let mut next = world.clone();
                next.insert(item);
                if satisfiable(next, logic, path) {
                    return true;
                }
            }
            return false;
        }
        break;
    }

    // Closure for atoms.
    for (sign, f) in &world {
        if *sign && world.contains(&(false, f.clone())) {
            return false;
        }
    }

    let boxes: Vec<ModalFormula> = world
        .iter()
        .filter_map(|(sign, f)| match (sign, f) {
            (true, ModalFormula::Box_(a)) => Some(a.as_ref().clone()),
            _ => None,
        })
        .collect();
    let refuted: Vec<ModalFormula> = world
        .iter()
        .filter_map(|(sign, f)| match (sign, f) {
            (false, ModalFormula::Box_(a)) => Some(a.as_ref().clone()),
            _ => None,
        })
        .collect();

    let successor_base = |extra: Option<&ModalFormula>| -> World {
        let mut succ: World = BTreeSet::new();
        for b in &boxes {
            succ.insert((true, b.clone()));
            if logic.transitive() {
                succ.insert((true, ModalFormula::boxed(b.clone())));
            }
        }
        if let Some(a) = extra {
            succ.insert((false, a.clone()));
        }
        succ
    };

    if refuted.is_empty() {
        if logic.serial() && !boxes.is_empty() {
            let succ = successor_base(None);
            return satisfiable(succ, logic, path);
        }
        return true;
    }

    for a in &refuted {
        let succ = successor_base(Some(a));
        if logic.transitive() && path.contains(&succ) {
            // Demand set already on the path: close the loop in a
            // transitive frame.
            continue;
        }
        path.push(succ.clone());
        let ok = satisfiable(succ, logic, path);
        path.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Validity in the chosen modal logic.
pub fn modal_prove(f: &ModalFormula, logic: ModalLogic) -> bool {
    let mut world = BTreeSet::new();
    world.insert((false, f.clone()));
    !satisfiable(world, logic, &mut Vec::new())
}

// ---------------------------------------------------------------------------
// Random goals
// ---------------------------------------------------------------------------

/// Deterministic random formula generator: output size is bounded by
/// `max_size` nodes and every term operation stays inside the logic's
/// signature.
pub fn random_goal(seed: u64, max_size: usize, logic: &LogicSpec, atoms: &[&str]) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_formula(&mut rng, max_size.max(1), logic, atoms)
}

fn random_formula(
    rng: &mut ChaCha8Rng,
    budget: usize,
    logic: &LogicSpec,
    atoms: &[&str],
) -> Formula {
    if budget <= 1 {
        return match rng.gen_range(0..=atoms.len()) {
            0 => Formula::Bottom,
            i => Formula::prop(atoms[i - 1]),
        };
    }
    match rng.gen_range(0u8..10) {
        0..=1 => {
            let inner = random_formula(rng, budget - 1, logic, atoms);
            Formula::neg(inner)
        }
        2..=5 if budget >= 3 => {
            let left_budget = rng.gen_range(1..=budget - 2);
            let left = random_formula(rng, left_budget, logic, atoms);
            let right = random_formula(rng, budget - 1 - left_budget, logic, atoms);
            Formula::imp(left, right)
        }
        6..=8 => {
            let tsize = rng.gen_range(1..=3usize);
            let term = random_term(rng, tsize, logic);
            let body = random_formula(rng, budget - 1, logic, atoms);
            Formula::just(term, body)
        }
        _ => random_formula(rng, 1, logic, atoms),
    }
}

fn random_term(rng: &mut ChaCha8Rng, budget: usize, logic: &LogicSpec) -> Term {
    let leaves = ["x", "y", "c", "d"];
    if budget <= 1 {
        let name = leaves[rng.gen_range(0..leaves.len())];
        return if name.starts_with('c') || name.starts_with('d') {
            Term::cst(name)
        } else {
            Term::var(name)
        };
    }
    let mut ops: Vec<u8> = vec![0, 1];
    if logic.j4 {
        ops.push(2);
    }
    if logic.jb {
        ops.push(3);
    }
    if logic.j5 {
        ops.push(4);
    }
    match ops[rng.gen_range(0..ops.len())] {
        0 => {
            let l = random_term(rng, budget / 2, logic);
            let r = random_term(rng, budget - 1 - budget / 2, logic);
            Term::app(l, r)
        }
        1 => {
            let l = random_term(rng, budget / 2, logic);
            let r = random_term(rng, budget - 1 - budget / 2, logic);
            Term::sum(l, r)
        }
        2 => Term::bang(random_term(rng, budget - 1, logic)),
        3 => Term::wquery(random_term(rng, budget - 1, logic)),
        _ => Term::query(random_term(rng, budget - 1, logic)),
    }
}
