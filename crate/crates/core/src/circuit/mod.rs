//! Parameterized arithmetic circuits as topologically ordered DAGs.
//!
//! Leaves are scalars, basic parameters `π_1..π_r` and inputs `X_1..X_n`;
//! every internal node is a binary arithmetic operation whose arguments
//! point to earlier nodes, so acyclicity holds by construction.

mod classify;
mod domain;
mod file;
mod random;

pub use classify::{classify, is_essentially_division_free, is_totally_division_free, ClassTable, NodeClass};
pub use domain::{sample_coordinate, Chart, DomainError, ParameterDomain, DEFAULT_SAMPLE_BOUND};
pub use file::{parse, serialize, validate, CircuitFile, NodeRecord, Severity, ValidationReport, Violation, ViolationKind};
pub use random::{random_circuit, RandomShape};

use crate::algebra::Scalar;

/// Position of a node in a circuit's node sequence.
pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Scalar(Scalar),
    /// Basic parameter, 0-based.
    Param(usize),
    /// Input variable, 0-based.
    Input(usize),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Div(NodeId, NodeId),
}

impl Op {
    pub fn args(&self) -> Option<(NodeId, NodeId)> {
        match *self {
            Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) | Op::Div(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.args().is_none()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Op::Scalar(_) => "scalar",
            Op::Param(_) => "param",
            Op::Input(_) => "input",
            Op::Add(..) => "add",
            Op::Sub(..) => "sub",
            Op::Mul(..) => "mul",
            Op::Div(..) => "div",
        }
    }

    /// Same operation with arguments passed through `f`.
    pub fn map_args(&self, mut f: impl FnMut(NodeId) -> NodeId) -> Op {
        match self {
            Op::Add(a, b) => Op::Add(f(*a), f(*b)),
            Op::Sub(a, b) => Op::Sub(f(*a), f(*b)),
            Op::Mul(a, b) => Op::Mul(f(*a), f(*b)),
            Op::Div(a, b) => Op::Div(f(*a), f(*b)),
            leaf => leaf.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    /// External identifier, preserved through parse/serialize.
    pub id: u64,
    pub op: Op,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("invalid circuit: {0}")]
    Invalid(ValidationReport),
    #[error("malformed circuit file: {0}")]
    Malformed(String),
    #[error("parameter count mismatch: {0} vs {1}")]
    ParamMismatch(usize, usize),
    #[error("arity mismatch: {0}")]
    Arity(String),
}

/// A validated circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    params: usize,
    inputs: usize,
    nodes: Vec<Node>,
    outputs: Vec<NodeId>,
}

impl Circuit {
    /// Builds from operations; node ids are assigned as positions.
    pub fn from_ops(params: usize, inputs: usize, ops: Vec<Op>, outputs: Vec<NodeId>) -> Result<Self, CircuitError> {
        let nodes = ops.into_iter().enumerate().map(|(i, op)| Node { id: i as u64, op }).collect();
        Self::from_nodes(params, inputs, nodes, outputs)
    }

    pub fn from_nodes(params: usize, inputs: usize, nodes: Vec<Node>, outputs: Vec<NodeId>) -> Result<Self, CircuitError> {
        let c = Circuit { params, inputs, nodes, outputs };
        let report = c.validate();
        if report.is_valid() {
            Ok(c)
        } else {
            Err(CircuitError::Invalid(report))
        }
    }

    pub fn params(&self) -> usize {
        self.params
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn op(&self, i: NodeId) -> &Op {
        &self.nodes[i].op
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    /// Number of edges leaving each node (output designations not counted).
    pub fn outdegrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for n in &self.nodes {
            if let Some((a, b)) = n.op.args() {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        deg
    }

    /// Nodes with a path to some output.
    pub fn reachable_from_outputs(&self) -> Vec<bool> {
        let mut live = vec![false; self.nodes.len()];
        for &o in &self.outputs {
            live[o] = true;
        }
        for i in (0..self.nodes.len()).rev() {
            if live[i] {
                if let Some((a, b)) = self.nodes[i].op.args() {
                    live[a] = true;
                    live[b] = true;
                }
            }
        }
        live
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> ValidationReport {
        let len = self.nodes.len();
        let mut report = ValidationReport::default();
        for n in &self.nodes {
            if let Some((a, b)) = n.op.args() {
                if a >= len || b >= len {
                    report.violations.push(Violation {
                        node: Some(n.id),
                        kind: ViolationKind::UnknownArg,
                        severity: Severity::Error,
                        message: format!("argument position out of range ({a}, {b})"),
                    });
                }
            }
        }
        if let Some(&o) = self.outputs.iter().find(|&&o| o >= len) {
            report.violations.push(Violation {
                node: None,
                kind: ViolationKind::UnknownOutput,
                severity: Severity::Error,
                message: format!("output position {o} out of range"),
            });
        }
        if !report.violations.is_empty() {
            return report;
        }
        validate(&self.to_file())
    }

    pub fn to_file(&self) -> CircuitFile {
        CircuitFile::from_circuit(self)
    }

    /// Copy with ids renumbered to positions.
    pub fn renumbered(&self) -> Circuit {
        let nodes = self.nodes.iter().enumerate().map(|(i, n)| Node { id: i as u64, op: n.op.clone() }).collect();
        Circuit { params: self.params, inputs: self.inputs, nodes, outputs: self.outputs.clone() }
    }

    /// Same DAG with a different output list.
    pub fn with_outputs(&self, outputs: Vec<NodeId>) -> Result<Circuit, CircuitError> {
        Circuit::from_nodes(self.params, self.inputs, self.nodes.clone(), outputs)
    }
}

/// Incremental construction of circuits; ids equal positions.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    params: usize,
    inputs: usize,
    ops: Vec<Op>,
}

impl CircuitBuilder {
    pub fn new(params: usize, inputs: usize) -> Self {
        CircuitBuilder { params, inputs, ops: Vec::new() }
    }

    pub fn push(&mut self, op: Op) -> NodeId {
        self.ops.push(op);
        self.ops.len() - 1
    }

    pub fn scalar(&mut self, c: impl Into<Scalar>) -> NodeId {
        self.push(Op::Scalar(c.into()))
    }

    /// Basic parameter, 0-based.
    pub fn param(&mut self, i: usize) -> NodeId {
        self.push(Op::Param(i))
    }

    /// Input variable, 0-based.
    pub fn input(&mut self, i: usize) -> NodeId {
        self.push(Op::Input(i))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::Add(a, b))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::Mul(a, b))
    }

    pub fn div(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.push(Op::Div(a, b))
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn finish(self, outputs: Vec<NodeId>) -> Result<Circuit, CircuitError> {
        Circuit::from_ops(self.params, self.inputs, self.ops, outputs)
    }
}
