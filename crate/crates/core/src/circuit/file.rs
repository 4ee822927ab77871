//! JSON circuit files and structural validation.
//!
//! ```json
//! {"params": 1, "inputs": 1,
//!  "nodes": [{"id": 0, "op": "param", "index": 1},
//!            {"id": 1, "op": "input", "index": 1},
//!            {"id": 2, "op": "mul", "args": [0, 1]}],
//!  "outputs": [2]}
//! ```
//! Parameter and input indices are 1-based in files.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Circuit, CircuitError, Node, NodeId, Op};
use crate::algebra::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: u64,
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub args: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub params: usize,
    pub inputs: usize,
    pub nodes: Vec<NodeRecord>,
    pub outputs: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    /// Reported but does not invalidate the circuit.
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    DuplicateId,
    UnknownOp,
    Arity,
    Ordering,
    UnknownArg,
    MissingValue,
    MissingIndex,
    ParamIndex,
    InputIndex,
    NoOutputs,
    UnknownOutput,
    /// Outdegree-zero node that is not an output.
    Dangling,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub node: Option<u64>,
    pub kind: ViolationKind,
    pub severity: Severity,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.iter().all(|v| v.severity == Severity::Warning)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Error)
    }

    fn push(&mut self, node: Option<u64>, kind: ViolationKind, message: String) {
        let severity = if kind == ViolationKind::Dangling { Severity::Warning } else { Severity::Error };
        self.violations.push(Violation { node, kind, severity, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<String> = self
            .violations
            .iter()
            .map(|v| match v.node {
                Some(id) => format!("node {id}: {}", v.message),
                None => v.message.clone(),
            })
            .collect();
        f.write_str(&msgs.join("; "))
    }
}

fn expected_arity(op: &str) -> Option<usize> {
    match op {
        "scalar" | "param" | "input" => Some(0),
        "add" | "sub" | "mul" | "div" => Some(2),
        _ => None,
    }
}

/// Checks every structural invariant of a circuit file and lists all violations.
pub fn validate(f: &CircuitFile) -> ValidationReport {
    use ViolationKind::*;
    let mut rep = ValidationReport::default();
    // id -> position of first occurrence
    let mut seen: HashMap<u64, usize> = HashMap::new();
    for (pos, n) in f.nodes.iter().enumerate() {
        let id = Some(n.id);
        if seen.contains_key(&n.id) {
            rep.push(id, DuplicateId, format!("duplicate node id {}", n.id));
        }
        let Some(arity) = expected_arity(&n.op) else {
            rep.push(id, UnknownOp, format!("unknown op {:?}", n.op));
            seen.entry(n.id).or_insert(pos);
            continue;
        };
        let args = n.args.as_deref().unwrap_or(&[]);
        if args.len() != arity {
            rep.push(id, Arity, format!("{} expects {} args, found {}", n.op, arity, args.len()));
        }
        for &a in args {
            if !seen.contains_key(&a) {
                if f.nodes.iter().any(|m| m.id == a) {
                    rep.push(id, Ordering, format!("argument {a} is not defined before this node"));
                } else {
                    rep.push(id, UnknownArg, format!("argument {a} does not exist"));
                }
            } else if a >= n.id {
                rep.push(id, Ordering, format!("argument id {a} is not smaller than node id {}", n.id));
            }
        }
        match n.op.as_str() {
            "scalar" if n.value.is_none() => rep.push(id, MissingValue, "scalar node without value".into()),
            "param" | "input" => match n.index {
                None => rep.push(id, MissingIndex, format!("{} node without index", n.op)),
                Some(i) if n.op == "param" && (i == 0 || i > f.params) => {
                    rep.push(id, ParamIndex, format!("param index {i} outside 1..={}", f.params))
                }
                Some(i) if n.op == "input" && (i == 0 || i > f.inputs) => {
                    rep.push(id, InputIndex, format!("input index {i} outside 1..={}", f.inputs))
                }
                _ => {}
            },
            _ => {}
        }
        seen.entry(n.id).or_insert(pos);
    }
    if f.outputs.is_empty() {
        rep.push(None, NoOutputs, "circuit has no outputs".into());
    }
    for &o in &f.outputs {
        if !seen.contains_key(&o) {
            rep.push(Some(o), UnknownOutput, format!("output {o} does not exist"));
        }
    }
    let mut used: HashMap<u64, bool> = HashMap::new();
    for n in &f.nodes {
        for &a in n.args.as_deref().unwrap_or(&[]) {
            used.insert(a, true);
        }
    }
    for n in &f.nodes {
        if !used.contains_key(&n.id) && !f.outputs.contains(&n.id) {
            rep.push(Some(n.id), Dangling, "outdegree zero but not an output".into());
        }
    }
    rep
}

impl CircuitFile {
    pub fn from_circuit(c: &Circuit) -> CircuitFile {
        let id = |i: NodeId| c.nodes[i].id;
        let nodes = c
            .nodes
            .iter()
            .map(|n| {
                let mut rec = NodeRecord { id: n.id, op: n.op.name().to_string(), value: None, index: None, args: None };
                match &n.op {
                    Op::Scalar(v) => rec.value = Some(v.clone()),
                    Op::Param(i) | Op::Input(i) => rec.index = Some(i + 1),
                    op => {
                        let (a, b) = op.args().expect("internal node");
                        rec.args = Some(vec![id(a), id(b)]);
                    }
                }
                rec
            })
            .collect();
        CircuitFile { params: c.params, inputs: c.inputs, nodes, outputs: c.outputs.iter().map(|&o| id(o)).collect() }
    }
}

impl TryFrom<CircuitFile> for Circuit {
    type Error = CircuitError;

    fn try_from(f: CircuitFile) -> Result<Self, Self::Error> {
        let report = validate(&f);
        if !report.is_valid() {
            return Err(CircuitError::Invalid(report));
        }
        let pos: HashMap<u64, usize> = f.nodes.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        let nodes = f
            .nodes
            .iter()
            .map(|n| {
                let arg = |k: usize| pos[&n.args.as_ref().expect("validated")[k]];
                let op = match n.op.as_str() {
                    "scalar" => Op::Scalar(n.value.clone().expect("validated")),
                    "param" => Op::Param(n.index.expect("validated") - 1),
                    "input" => Op::Input(n.index.expect("validated") - 1),
                    "add" => Op::Add(arg(0), arg(1)),
                    "sub" => Op::Sub(arg(0), arg(1)),
                    "mul" => Op::Mul(arg(0), arg(1)),
                    "div" => Op::Div(arg(0), arg(1)),
                    _ => unreachable!("validated op"),
                };
                Node { id: n.id, op }
            })
            .collect();
        let outputs = f.outputs.iter().map(|o| pos[o]).collect();
        Ok(Circuit { params: f.params, inputs: f.inputs, nodes, outputs })
    }
}

/// Parses and validates a circuit file.
pub fn parse(text: &str) -> Result<Circuit, CircuitError> {
    let f: CircuitFile = serde_json::from_str(text).map_err(|e| {
        CircuitError::Malformed(format!("line {}, column {}: {}", e.line(), e.column(), e))
    })?;
    Circuit::try_from(f)
}

pub fn serialize(c: &Circuit) -> String {
    serde_json::to_string_pretty(&c.to_file()).expect("circuit file serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip(s: &str) -> String {
        s.chars().filter(|c| !c.is_whitespace()).collect()
    }

    #[test]
    fn single_input_is_valid() {
        let c = parse(r#"{"params":0,"inputs":1,"nodes":[{"id":0,"op":"input","index":1}],"outputs":[0]}"#).unwrap();
        assert!(c.validate().is_valid());
    }

    #[test]
    fn round_trip_modulo_whitespace() {
        let text = r#"{"params":1,"inputs":1,"nodes":[
            {"id":3,"op":"param","index":1},
            {"id":5,"op":"scalar","value":"-2/3"},
            {"id":7,"op":"input","index":1},
            {"id":9,"op":"mul","args":[3,7]},
            {"id":11,"op":"add","args":[9,5]}],"outputs":[11]}"#;
        let c = parse(text).unwrap();
        assert_eq!(strip(&serialize(&c)), strip(text));
    }

    #[test]
    fn mul_with_one_arg() {
        let f: CircuitFile = serde_json::from_str(
            r#"{"params":0,"inputs":1,"nodes":[{"id":0,"op":"input","index":1},{"id":1,"op":"mul","args":[0]}],"outputs":[1]}"#,
        )
        .unwrap();
        let r = validate(&f);
        assert!(!r.is_valid());
        assert!(r.errors().any(|v| v.kind == ViolationKind::Arity && v.node == Some(1)));
    }

    #[test]
    fn forward_argument_is_ordering_violation() {
        let f: CircuitFile = serde_json::from_str(
            r#"{"params":0,"inputs":1,"nodes":[{"id":0,"op":"add","args":[1,1]},{"id":1,"op":"input","index":1}],"outputs":[0]}"#,
        )
        .unwrap();
        let r = validate(&f);
        assert!(r.errors().any(|v| v.kind == ViolationKind::Ordering && v.node == Some(0)));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let e = parse(r#"{"params":0,"inputs":1,"nodes":[{"id":0,"op":"input","index":1},{"id":0,"op":"input","index":1}],"outputs":[0]}"#);
        match e {
            Err(CircuitError::Invalid(r)) => assert!(r.errors().any(|v| v.kind == ViolationKind::DuplicateId)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn param_index_beyond_r_rejected() {
        let e = parse(r#"{"params":1,"inputs":0,"nodes":[{"id":0,"op":"param","index":2}],"outputs":[0]}"#);
        match e {
            Err(CircuitError::Invalid(r)) => assert!(r.errors().any(|v| v.kind == ViolationKind::ParamIndex)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_json_has_position() {
        let e = parse("{\"params\": 1,\n \"inputs\": }").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn dangling_node_is_a_warning() {
        let c = parse(r#"{"params":0,"inputs":1,"nodes":[{"id":0,"op":"input","index":1},{"id":1,"op":"scalar","value":"1"}],"outputs":[0]}"#)
            .unwrap();
        let r = c.validate();
        assert!(r.is_valid());
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::Dangling);
    }
}
