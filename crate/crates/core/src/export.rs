//! Serialisation of proof objects and models: the proof JSON schema, DOT
//! rendering with closure marks, and the model JSON format.

use serde::{Deserialize, Serialize};

use thiserror::Error;

use crate::engine::{closure_status, Justification, Node, NodeId, RuleId, Tableau};
use crate::logic::ConstantSpecification;
use crate::semantics::Model;
use crate::syntax::{parse_formula, parse_term, Payload, Sign, SignedFormula};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProofNodeJson {
    pub id: usize,
    pub sign: String,
    pub kind: String,
    pub payload: String,
    pub rule: String,
    pub premises: Vec<usize>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProofJson {
    pub roots: Vec<usize>,
    pub nodes: Vec<ProofNodeJson>,
}

#[derive(Debug, Clone, Error)]
pub enum ProofJsonError {
    #[error("node {0}: {1}")]
    Node(usize, String),
    #[error("{0}")]
    Shape(String),
}

fn payload_strings(sf: &SignedFormula) -> (String, String, String) {
    let sign = match sf.sign {
        Sign::T => "T",
        Sign::F => "F",
    };
    match &sf.payload {
        Payload::Formula(f) => (sign.into(), "formula".into(), f.to_string()),
        Payload::Evidential(e) => (sign.into(), "evidential".into(), e.to_string()),
    }
}

/// Export a tableau to the proof JSON schema.
pub fn proof_to_json(tab: &Tableau) -> ProofJson {
    let nodes = tab
        .nodes
        .iter()
        .enumerate()
        .map(|(id, node)| {
            let (sign, kind, payload) = payload_strings(&node.payload);
            let (rule, premises) = match &node.just {
                Justification::Root => ("root".to_string(), Vec::new()),
                Justification::Cut => ("cut".to_string(), Vec::new()),
                Justification::Rule { rule, premises } => {
                    (rule.ascii_name().to_string(), premises.clone())
                }
            };
            ProofNodeJson {
                id,
                sign,
                kind,
                payload,
                rule,
                premises,
                children: node.children.clone(),
            }
        })
        .collect();
    ProofJson {
        roots: tab.roots.clone(),
        nodes,
    }
}

fn parse_payload(sign: &str, kind: &str, payload: &str) -> Result<SignedFormula, String> {
    let sign = match sign {
        "T" => Sign::T,
        "F" => Sign::F,
        other => return Err(format!("bad sign '{}'", other)),
    };
    match kind {
        "formula" => {
            let f = parse_formula(payload).map_err(|e| e.to_string())?;
            Ok(SignedFormula {
                sign,
                payload: Payload::Formula(f),
            })
        }
        "evidential" => {
            let inner = payload
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| format!("bad evidential payload '{}'", payload))?;
            let comma = find_top_level_comma(inner)
                .ok_or_else(|| format!("bad evidential payload '{}'", payload))?;
            let term = parse_term(inner[..comma].trim()).map_err(|e| e.to_string())?;
            let body = parse_formula(inner[comma + 1..].trim()).map_err(|e| e.to_string())?;
            Ok(SignedFormula {
                sign,
                payload: Payload::Evidential(crate::syntax::EvidentialAtom::new(term, body)),
            })
        }
        other => Err(format!("bad kind '{}'", other)),
    }
}

fn find_top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Rebuild a tableau from its JSON form, revalidating the tree shape.
pub fn proof_from_json(json: &ProofJson) -> Result<Tableau, ProofJsonError> {
    let n = json.nodes.len();
    let mut nodes = Vec::with_capacity(n);
    for (pos, jn) in json.nodes.iter().enumerate() {
        if jn.id != pos {
            return Err(ProofJsonError::Shape(format!(
                "node ids must be dense, got {}",
                jn.id
            )));
        }
        let payload = parse_payload(&jn.sign, &jn.kind, &jn.payload)
            .map_err(|e| ProofJsonError::Node(pos, e))?;
        let just = match jn.rule.as_str() {
            "root" => Justification::Root,
            "cut" => Justification::Cut,
            name => {
                let rule = RuleId::from_ascii(name)
                    .ok_or_else(|| ProofJsonError::Node(pos, format!("unknown rule '{}'", name)))?;
                Justification::Rule {
                    rule,
                    premises: jn.premises.clone(),
                }
            }
        };
        for &c in &jn.children {
            if c >= n {
                return Err(ProofJsonError::Node(
                    pos,
                    format!("child {} out of range", c),
                ));
            }
        }
        nodes.push(Node {
            payload,
            parent: None,
            children: jn.children.clone(),
            just,
        });
    }
    // Recover parents and validate every node is reachable exactly once.
    let mut seen = vec![false; n];
    for id in 0..n {
        let children = nodes[id].children.clone();
        for c in children {
            if seen[c] {
                return Err(ProofJsonError::Shape(format!("node {} has two parents", c)));
            }
            seen[c] = true;
            nodes[c].parent = Some(id);
        }
    }
    let tab = Tableau {
        nodes,
        roots: json.roots.clone(),
    };
    if tab.roots.is_empty() {
        return Err(ProofJsonError::Shape("missing roots".into()));
    }
    Ok(tab)
}

/// DOT rendering of a tableau; closed leaves carry the closure mark.
pub fn proof_to_dot(tab: &Tableau, cs: &ConstantSpecification) -> String {
    let mut out = String::from("digraph tableau {\n  node [shape=box, fontname=\"monospace\"];\n");
    for (id, node) in tab.nodes.iter().enumerate() {
        let mut label = node.payload.to_string().replace('"', "\\\"");
        if node.children.is_empty() && closure_status(&tab.branch_formulas(id), cs).is_closed() {
            label.push_str("\\n⊗");
        }
        let rule = match &node.just {
            Justification::Root => String::new(),
            Justification::Cut => " (cut)".into(),
            Justification::Rule { rule, .. } => format!(" ({})", rule),
        };
        out.push_str(&format!("  n{} [label=\"{}{}\"];\n", id, label, rule));
    }
    for (id, node) in tab.nodes.iter().enumerate() {
        for &c in &node.children {
            out.push_str(&format!("  n{} -> n{};\n", id, c));
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelJson {
    pub valuation: std::collections::BTreeMap<String, bool>,
    pub evidence: Vec<[String; 2]>,
    pub universe: Vec<String>,
    pub terms: Vec<String>,
}

pub fn model_to_json(model: &Model) -> ModelJson {
    ModelJson {
        valuation: model.valuation.clone(),
        evidence: model
            .evidence
            .iter()
            .map(|(t, f)| [t.to_string(), f.to_string()])
            .collect(),
        universe: model.universe.iter().map(|f| f.to_string()).collect(),
        terms: model.terms.iter().map(|t| t.to_string()).collect(),
    }
}

/// Ids of closed leaves, for presentation.
pub fn closed_leaves(tab: &Tableau, cs: &ConstantSpecification) -> Vec<NodeId> {
    tab.leaves()
        .into_iter()
        .filter(|&l| closure_status(&tab.branch_formulas(l), cs).is_closed())
        .collect()
}
