//! Owned proof trees for the rewriting engine. Premises are recorded by
//! payload and bound to the nearest ancestor with that payload when the
//! tree is converted back to an arena tableau; grafting a subtree under a
//! larger context therefore needs no premise re-pointing, which is exactly
//! the weakening discipline the rewrites rely on.

use std::collections::HashMap;

use crate::engine::{Justification, Node, NodeId, RuleId, Tableau};
use crate::logic::ConstantSpecification;
use crate::syntax::{Formula, Payload, Sign, SignedFormula};

use super::CutElimError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum PJust {
    Root,
    Rule {
        rule: RuleId,
        premises: Vec<SignedFormula>,
    },
    Cut,
}

#[derive(Debug, Clone)]
pub(crate) struct PNode {
    pub payload: SignedFormula,
    pub just: PJust,
    pub children: Vec<PNode>,
}

impl PNode {
    pub fn leaf(payload: SignedFormula, just: PJust) -> PNode {
        PNode {
            payload,
            just,
            children: Vec::new(),
        }
    }

    pub fn rule(payload: SignedFormula, rule: RuleId, premises: Vec<SignedFormula>) -> PNode {
        PNode::leaf(payload, PJust::Rule { rule, premises })
    }

    pub fn cut(payload: SignedFormula) -> PNode {
        PNode::leaf(payload, PJust::Cut)
    }

    pub fn with_children(mut self, children: Vec<PNode>) -> PNode {
        self.children = children;
        self
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(PNode::size).sum::<usize>()
    }

    pub fn is_cut_parent(&self) -> bool {
        self.children.len() == 2 && self.children.iter().all(|c| matches!(c.just, PJust::Cut))
    }

    pub fn contains_cut(&self) -> bool {
        matches!(self.just, PJust::Cut) || self.children.iter().any(PNode::contains_cut)
    }

    pub fn node_at_mut(&mut self, path: &[usize]) -> &mut PNode {
        let mut cur = self;
        for &i in path {
            cur = &mut cur.children[i];
        }
        cur
    }

    /// Payloads on the path to (and including) the node at `path`.
    pub fn branch_to(&self, path: &[usize]) -> Vec<SignedFormula> {
        let mut out = vec![self.payload.clone()];
        let mut cur = self;
        for &i in path {
            cur = &cur.children[i];
            out.push(cur.payload.clone());
        }
        out
    }
}

/// Build a chain: each listed node becomes the single child of the one
/// before it; the final node receives `tail` as children.
pub(crate) fn seq(items: Vec<PNode>, tail: Vec<PNode>) -> PNode {
    let mut iter = items.into_iter().rev();
    let mut acc = iter.next().expect("seq needs at least one node");
    acc.children = tail;
    for mut item in iter {
        item.children = vec![acc];
        acc = item;
    }
    acc
}

/// Convert an arena tableau (root chain plus body) to an owned tree.
pub(crate) fn from_tableau(tab: &Tableau) -> PNode {
    fn build(tab: &Tableau, id: NodeId) -> PNode {
        let node = &tab.nodes[id];
        let just = match &node.just {
            Justification::Root => PJust::Root,
            Justification::Cut => PJust::Cut,
            Justification::Rule { rule, premises } => PJust::Rule {
                rule: *rule,
                premises: premises
                    .iter()
                    .map(|&p| tab.nodes[p].payload.clone())
                    .collect(),
            },
        };
        PNode {
            payload: node.payload.clone(),
            just,
            children: node.children.iter().map(|&c| build(tab, c)).collect(),
        }
    }
    build(tab, tab.roots[0])
}

/// Convert an owned tree back to an arena tableau, binding each premise
/// payload to its nearest ancestor occurrence.
pub(crate) fn to_tableau(root: &PNode) -> Result<Tableau, CutElimError> {
    let mut tab = Tableau {
        nodes: Vec::new(),
        roots: Vec::new(),
    };
    let mut scope: HashMap<SignedFormula, Vec<NodeId>> = HashMap::new();

    fn walk(
        node: &PNode,
        parent: Option<NodeId>,
        tab: &mut Tableau,
        scope: &mut HashMap<SignedFormula, Vec<NodeId>>,
    ) -> Result<NodeId, CutElimError> {
        let just = match &node.just {
            PJust::Root => Justification::Root,
            PJust::Cut => Justification::Cut,
            PJust::Rule { rule, premises } => {
                let ids = premises
                    .iter()
                    .map(|payload| {
                        scope
                            .get(payload)
                            .and_then(|stack| stack.last().copied())
                            .ok_or_else(|| CutElimError::UnboundPremise(payload.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Justification::Rule {
                    rule: *rule,
                    premises: ids,
                }
            }
        };
        let id = tab.nodes.len();
        tab.nodes.push(Node {
            payload: node.payload.clone(),
            parent,
            children: Vec::new(),
            just,
        });
        if let Some(p) = parent {
            tab.nodes[p].children.push(id);
        }
        if matches!(node.just, PJust::Root) {
            tab.roots.push(id);
        }
        scope.entry(node.payload.clone()).or_default().push(id);
        for child in &node.children {
            walk(child, Some(id), tab, scope)?;
        }
        scope.get_mut(&node.payload).expect("pushed above").pop();
        Ok(id)
    }

    walk(root, None, &mut tab, &mut scope)?;
    Ok(tab)
}

fn closes(branch_so_far: &[SignedFormula], sf: &SignedFormula, cs: &ConstantSpecification) -> bool {
    let dual = SignedFormula {
        sign: sf.sign.flip(),
        payload: sf.payload.clone(),
    };
    if branch_so_far.contains(&dual) {
        return true;
    }
    match (&sf.sign, &sf.payload) {
        (Sign::T, Payload::Formula(Formula::Bottom)) => true,
        (Sign::F, Payload::Formula(f)) => cs.contains(f),
        _ => false,
    }
}

/// Truncate every branch at its first closure point: descendants of a node
/// whose prefix branch is closed are dropped. Closedness of the tableau is
/// preserved, and subtree weights can only shrink.
pub(crate) fn prune_closed(root: &mut PNode, cs: &ConstantSpecification) {
    fn go(node: &mut PNode, prefix: &mut Vec<SignedFormula>, cs: &ConstantSpecification) {
        let closed = closes(prefix, &node.payload, cs);
        prefix.push(node.payload.clone());
        if closed {
            node.children.clear();
        } else {
            for child in &mut node.children {
                go(child, prefix, cs);
            }
        }
        prefix.pop();
    }
    let mut prefix = Vec::new();
    go(root, &mut prefix, cs);
}

/// Every leaf branch closed?
pub(crate) fn all_branches_closed(root: &PNode, cs: &ConstantSpecification) -> bool {
    fn go(node: &PNode, prefix: &mut Vec<SignedFormula>, cs: &ConstantSpecification) -> bool {
        let closed_here = closes(prefix, &node.payload, cs);
        if node.children.is_empty() {
            return closed_here;
        }
        prefix.push(node.payload.clone());
        let ok = closed_here || node.children.iter().all(|c| go(c, prefix, cs));
        prefix.pop();
        ok
    }
    let mut prefix = Vec::new();
    go(root, &mut prefix, cs)
}

/// Path (child indices) to the leftmost-innermost minimal cut parent: a
/// node with two cut children and no cuts below them.
pub(crate) fn find_minimal_cut_path(root: &PNode) -> Option<Vec<usize>> {
    fn go(node: &PNode, path: &mut Vec<usize>) -> Option<Vec<usize>> {
        for (i, child) in node.children.iter().enumerate() {
            path.push(i);
            if let Some(found) = go(child, path) {
                return Some(found);
            }
            path.pop();
        }
        if node.is_cut_parent()
            && !node
                .children
                .iter()
                .any(|c| c.children.iter().any(PNode::contains_cut))
        {
            return Some(path.clone());
        }
        None
    }
    let mut path = Vec::new();
    go(root, &mut path)
}
