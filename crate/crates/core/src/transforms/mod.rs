//! Circuit transformations: join, reduction, broadcasting, restriction and
//! garbage collection.

mod reduce;

pub use reduce::{reduce, reduce_on, Merge, MergeKind, Oracle, ReduceReport};

use std::collections::HashSet;

use serde::Serialize;

use crate::circuit::{Circuit, CircuitError, Node, NodeId, Op, ParameterDomain};
use crate::semantics::{consistency_check, ConsistencyMode, ConsistencyReport, SemanticsError, Verdict};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("join map is not a bijection: {0}")]
    NotBijection(String),
    #[error("join is inconsistent at node {node}")]
    InconsistentJoin { node: NodeId },
    #[error("broadcast is inconsistent at node {node}")]
    InconsistentBroadcast { node: NodeId },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Identifies output `k` of the first circuit with input `map[k]` of the second.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JoinSpec {
    pub map: Vec<usize>,
}

impl JoinSpec {
    pub fn identity(k: usize) -> Self {
        JoinSpec { map: (0..k).collect() }
    }

    /// From `(output, input)` pairs such as `0:0,1:1`.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self, TransformError> {
        let k = pairs.len();
        let mut map = vec![usize::MAX; k];
        for &(o, i) in pairs {
            if o >= k || map[o] != usize::MAX {
                return Err(TransformError::NotBijection(format!("output {o} listed twice or out of range")));
            }
            map[o] = i;
        }
        Ok(JoinSpec { map })
    }

    fn check(&self, outputs: usize, inputs: usize) -> Result<(), TransformError> {
        if self.map.len() != outputs || outputs != inputs {
            return Err(TransformError::Arity(format!(
                "{outputs} outputs, {inputs} inputs, map of length {}",
                self.map.len()
            )));
        }
        let mut seen = HashSet::new();
        for &i in &self.map {
            if i >= inputs || !seen.insert(i) {
                return Err(TransformError::NotBijection(format!("input {i} repeated or out of range")));
            }
        }
        Ok(())
    }
}

fn renumber(params: usize, inputs: usize, ops: Vec<Op>, outputs: Vec<NodeId>) -> Result<Circuit, TransformError> {
    Ok(Circuit::from_ops(params, inputs, ops, outputs)?)
}

/// Appends `g` to `ops`; `input_at[j]` is the position standing for `g`'s input `j`.
fn graft(ops: &mut Vec<Op>, g: &Circuit, input_at: &[NodeId]) -> Vec<NodeId> {
    let mut pos = Vec::with_capacity(g.len());
    for n in g.nodes() {
        let p = match &n.op {
            Op::Input(j) => input_at[*j],
            op => {
                ops.push(op.map_args(|a| pos[a]));
                ops.len() - 1
            }
        };
        pos.push(p);
    }
    pos
}

fn recheck(c: &Circuit, domain: &ParameterDomain) -> Result<ConsistencyReport, TransformError> {
    Ok(consistency_check(c, domain, ConsistencyMode::exact())?)
}

/// Composition `g2 ∘ g1`: inputs of `g1`, outputs of `g2`, consistency
/// re-checked over the affine parameter space.
pub fn join(g1: &Circuit, g2: &Circuit, spec: &JoinSpec) -> Result<Circuit, TransformError> {
    join_on(g1, g2, spec, &ParameterDomain::affine(g1.params()))
}

pub fn join_on(g1: &Circuit, g2: &Circuit, spec: &JoinSpec, domain: &ParameterDomain) -> Result<Circuit, TransformError> {
    if g1.params() != g2.params() {
        return Err(TransformError::Arity(format!("parameter counts {} and {}", g1.params(), g2.params())));
    }
    spec.check(g1.outputs().len(), g2.inputs())?;
    let mut ops: Vec<Op> = g1.nodes().iter().map(|n| n.op.clone()).collect();
    let mut input_at = vec![0; g2.inputs()];
    for (k, &j) in spec.map.iter().enumerate() {
        input_at[j] = g1.outputs()[k];
    }
    let pos = graft(&mut ops, g2, &input_at);
    let outputs = g2.outputs().iter().map(|&o| pos[o]).collect();
    let c = renumber(g1.params(), g1.inputs(), ops, outputs)?;
    match recheck(&c, domain)?.verdict {
        Verdict::Inconsistent { node } => Err(TransformError::InconsistentJoin { node }),
        _ => Ok(c),
    }
}

/// `g *_P c`: `g` grafted with its input `j` replaced by node `p[j]`; the
/// outputs stay those of `c`.
pub fn broadcast(c: &Circuit, p: &[NodeId], g: &Circuit) -> Result<Circuit, TransformError> {
    broadcast_on(c, p, g, &ParameterDomain::affine(c.params()))
}

pub fn broadcast_on(c: &Circuit, p: &[NodeId], g: &Circuit, domain: &ParameterDomain) -> Result<Circuit, TransformError> {
    if g.params() != c.params() || g.inputs() != p.len() {
        return Err(TransformError::Arity(format!(
            "template has {} params and {} inputs; expected {} and {}",
            g.params(),
            g.inputs(),
            c.params(),
            p.len()
        )));
    }
    if let Some(&bad) = p.iter().find(|&&i| i >= c.len()) {
        return Err(TransformError::Arity(format!("node {bad} out of range")));
    }
    let mut ops: Vec<Op> = c.nodes().iter().map(|n| n.op.clone()).collect();
    graft(&mut ops, g, p);
    let out = renumber(c.params(), c.inputs(), ops, c.outputs().to_vec())?;
    match recheck(&out, domain)?.verdict {
        Verdict::Inconsistent { node } => Err(TransformError::InconsistentBroadcast { node }),
        _ => Ok(out),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Restriction {
    #[serde(skip)]
    pub circuit: Circuit,
    pub domain: ParameterDomain,
    pub report: ConsistencyReport,
    /// Divisions to hand over to approximative evaluation.
    pub candidates: Vec<NodeId>,
}

/// Same DAG over a smaller domain, with its consistency verdict.
pub fn restrict(c: &Circuit, sub: &ParameterDomain, mode: ConsistencyMode) -> Result<Restriction, TransformError> {
    let report = consistency_check(c, sub, mode)?;
    let candidates = match &report.verdict {
        Verdict::Consistent => vec![],
        Verdict::Inconsistent { node } => vec![*node],
        Verdict::Undecided { nodes } => nodes.clone(),
    };
    Ok(Restriction { circuit: c.clone(), domain: sub.clone(), report, candidates })
}

/// Keeps exactly the nodes with a path to an output; ids are preserved.
pub fn garbage_collect(c: &Circuit) -> Circuit {
    let live = c.reachable_from_outputs();
    let mut pos = vec![usize::MAX; c.len()];
    let mut nodes = Vec::new();
    for (i, n) in c.nodes().iter().enumerate() {
        if live[i] {
            pos[i] = nodes.len();
            nodes.push(Node { id: n.id, op: n.op.map_args(|a| pos[a]) });
        }
    }
    let outputs = c.outputs().iter().map(|&o| pos[o]).collect();
    Circuit::from_nodes(c.params(), c.inputs(), nodes, outputs).expect("sub-DAG of a valid circuit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Scalar;
    use crate::circuit::CircuitBuilder;
    use crate::semantics::eval_outputs;

    #[test]
    fn join_square_then_increment() {
        let mut b = CircuitBuilder::new(0, 1);
        let x = b.input(0);
        let sq = b.mul(x, x);
        let g1 = b.finish(vec![sq]).unwrap();
        let mut b = CircuitBuilder::new(0, 1);
        let y = b.input(0);
        let one = b.scalar(1);
        let s = b.add(y, one);
        let g2 = b.finish(vec![s]).unwrap();
        let j = join(&g1, &g2, &JoinSpec::identity(1)).unwrap();
        assert_eq!(eval_outputs(&j, &[], &[Scalar::from(3)]).unwrap(), vec![Scalar::from(10)]);
    }

    #[test]
    fn join_onto_zero_is_inconsistent() {
        let mut b = CircuitBuilder::new(0, 1);
        let x = b.input(0);
        let z = b.sub(x, x);
        let g1 = b.finish(vec![z]).unwrap();
        let mut b = CircuitBuilder::new(0, 1);
        let one = b.scalar(1);
        let y = b.input(0);
        let d = b.div(one, y);
        let g2 = b.finish(vec![d]).unwrap();
        assert!(matches!(join(&g1, &g2, &JoinSpec::identity(1)), Err(TransformError::InconsistentJoin { .. })));
    }

    #[test]
    fn gc_drops_unreachable_and_is_idempotent() {
        let mut b = CircuitBuilder::new(0, 2);
        let x = b.input(0);
        let y = b.input(1);
        b.add(x, y);
        let m = b.mul(x, x);
        let c = b.finish(vec![m]).unwrap();
        let g = garbage_collect(&c);
        assert_eq!(g.len(), 2);
        assert_eq!(g.nodes()[1].id, 3);
        assert_eq!(garbage_collect(&g), g);
    }

    #[test]
    fn broadcast_identity_rewrite() {
        let mut b = CircuitBuilder::new(0, 1);
        let x = b.input(0);
        let two = b.scalar(2);
        let m = b.mul(x, two);
        let c = b.finish(vec![m]).unwrap();
        let mut b = CircuitBuilder::new(0, 1);
        let y = b.input(0);
        let one = b.scalar(1);
        let a = b.add(y, one);
        let s = b.sub(a, one);
        let g = b.finish(vec![s]).unwrap();
        let out = broadcast(&c, &[x], &g).unwrap();
        assert_eq!(out.len(), c.len() + 3);
        assert_eq!(eval_outputs(&out, &[], &[Scalar::from(5)]).unwrap(), vec![Scalar::from(10)]);
    }

    #[test]
    fn restriction_flags_the_division() {
        let mut b = CircuitBuilder::new(1, 1);
        let x = b.input(0);
        let p = b.param(0);
        let d = b.div(x, p);
        let c = b.finish(vec![d]).unwrap();
        let sub = ParameterDomain::point(&[Scalar::from(0)]);
        let r = restrict(&c, &sub, ConsistencyMode::exact()).unwrap();
        assert_eq!(r.report.verdict, Verdict::Inconsistent { node: d });
        assert_eq!(r.candidates, vec![d]);
    }
}
