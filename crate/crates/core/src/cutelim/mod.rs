//! Rank and weight measures, Hilbert-to-tableau compilation, and the cut
//! elimination rewriting system.

mod eliminate;
mod hilbert;
mod tree;

pub use eliminate::{cut_step_trace, eliminate_cuts, eliminate_cuts_traced, TraceEntry};
pub use hilbert::{
    hilbert_to_tableau, parse_hilbert, validate_hilbert, AxiomTag, HilbertError, HilbertJust,
    HilbertLine, HilbertProof,
};

use thiserror::Error;

use crate::engine::{Justification, NodeId, Tableau};
use crate::syntax::{Formula, Payload, SignedFormula, Term};

/// Rank of a term: constructor depth-weighted size with variables and
/// constants at zero.
pub fn rank_term(t: &Term) -> u64 {
    match t {
        Term::Var(_) | Term::Const(_) => 0,
        Term::Sum(l, r) | Term::App(l, r) => rank_term(l) + rank_term(r) + 1,
        Term::Bang(inner) | Term::Query(inner) | Term::WQuery(inner) => rank_term(inner) + 1,
    }
}

/// Rank of a formula.
pub fn rank_formula(f: &Formula) -> u64 {
    match f {
        Formula::Prop(_) | Formula::Bottom => 0,
        Formula::Neg(inner) => rank_formula(inner) + 1,
        Formula::Implies(l, r) => rank_formula(l) + rank_formula(r) + 1,
        Formula::Just(t, body) => rank_term(t) + rank_formula(body) + 1,
    }
}

/// Rank of a cut pivot: formulas use the formula rank, evidential atoms
/// `[t,A]` use `r(t) + r(A)`.
pub fn rank_payload(sf: &SignedFormula) -> u64 {
    match &sf.payload {
        Payload::Formula(f) => rank_formula(f),
        Payload::Evidential(e) => rank_term(&e.term) + rank_formula(&e.body),
    }
}

/// Measure of a cut: pivot rank and the number of nodes strictly below the
/// two cut children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutMeasure {
    pub rank: u64,
    pub weight: usize,
    pub at_branch_end: bool,
}

impl CutMeasure {
    /// Lexicographic (rank, weight) comparison.
    pub fn lex_less(&self, other: &CutMeasure) -> bool {
        (self.rank, self.weight) < (other.rank, other.weight)
    }
}

/// A cut site in an arena tableau: the parent node and its two cut
/// children.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutSite {
    pub parent: NodeId,
    pub t_child: NodeId,
    pub f_child: NodeId,
}

fn subtree_size(tab: &Tableau, id: NodeId) -> usize {
    1 + tab.nodes[id]
        .children
        .iter()
        .map(|&c| subtree_size(tab, c))
        .sum::<usize>()
}

fn subtree_has_cut(tab: &Tableau, id: NodeId) -> bool {
    matches!(tab.nodes[id].just, Justification::Cut)
        || tab.nodes[id]
            .children
            .iter()
            .any(|&c| subtree_has_cut(tab, c))
}

/// Find a minimal cut (both subtableaux cut-free), leftmost-innermost, with
/// its measure. `None` iff the tableau is cut-free.
pub fn find_minimal_cut(tab: &Tableau) -> Option<(CutSite, CutMeasure)> {
    fn go(tab: &Tableau, id: NodeId) -> Option<CutSite> {
        for &child in &tab.nodes[id].children {
            if let Some(found) = go(tab, child) {
                return Some(found);
            }
        }
        let children = &tab.nodes[id].children;
        if children.len() == 2
            && children
                .iter()
                .all(|&c| matches!(tab.nodes[c].just, Justification::Cut))
            && children.iter().all(|&c| {
                tab.nodes[c]
                    .children
                    .iter()
                    .all(|&g| !subtree_has_cut(tab, g))
            })
        {
            return Some(CutSite {
                parent: id,
                t_child: children[0],
                f_child: children[1],
            });
        }
        None
    }
    let site = go(tab, *tab.roots.first()?)?;
    let w1 = subtree_size(tab, site.t_child) - 1;
    let w2 = subtree_size(tab, site.f_child) - 1;
    let measure = CutMeasure {
        rank: rank_payload(&tab.nodes[site.t_child].payload),
        weight: w1 + w2,
        at_branch_end: w1 == 0 || w2 == 0,
    };
    Some((site, measure))
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CutElimError {
    #[error("malformed cut: {0}")]
    MalformedCut(String),
    #[error("premise '{0}' has no occurrence above its use")]
    UnboundPremise(String),
    #[error("rewrite step budget of {0} exhausted")]
    StepBudget(usize),
    #[error("input tableau is not closed")]
    NotClosed,
}
