//! Seeded random circuits for property tests and the reproduction suite.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Circuit, CircuitBuilder, NodeId, Op};

#[derive(Clone, Copy, Debug)]
pub struct RandomShape {
    pub params: usize,
    pub inputs: usize,
    pub outputs: usize,
    pub max_nodes: usize,
    /// Bound on the degree of every node in parameters and inputs jointly.
    pub max_degree: u32,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape { params: 2, inputs: 2, outputs: 2, max_nodes: 40, max_degree: 6 }
    }
}

/// A consistent circuit: divisions only by basic parameters or nonzero
/// scalars. About one internal node in five repeats an earlier one, possibly
/// with its arguments swapped.
pub fn random_circuit(rng: &mut impl Rng, shape: RandomShape) -> Circuit {
    let mut b = CircuitBuilder::new(shape.params, shape.inputs);
    let mut deg: Vec<u32> = Vec::new();
    let mut ops: Vec<Op> = Vec::new();
    let mut divisors: Vec<NodeId> = Vec::new();
    let push = |b: &mut CircuitBuilder, op: Op, d: u32, ops: &mut Vec<Op>, deg: &mut Vec<u32>| {
        ops.push(op.clone());
        deg.push(d);
        b.push(op)
    };
    for j in 0..shape.inputs {
        push(&mut b, Op::Input(j), 1, &mut ops, &mut deg);
    }
    for i in 0..shape.params {
        let p = push(&mut b, Op::Param(i), 1, &mut ops, &mut deg);
        divisors.push(p);
    }
    for v in [1i64, 2, -3] {
        let s = push(&mut b, Op::Scalar(v.into()), 0, &mut ops, &mut deg);
        divisors.push(s);
    }
    let leaves = ops.len();
    let target = shape.max_nodes.max(leaves + 1);
    while ops.len() < target {
        let n = ops.len();
        if n > leaves && rng.gen_bool(0.2) {
            let k = rng.gen_range(leaves..n);
            let op = match &ops[k] {
                Op::Add(a, c) if rng.gen_bool(0.5) => Op::Add(*c, *a),
                Op::Mul(a, c) if rng.gen_bool(0.5) => Op::Mul(*c, *a),
                op => op.clone(),
            };
            let d = deg[k];
            push(&mut b, op, d, &mut ops, &mut deg);
            continue;
        }
        let a = rng.gen_range(0..n);
        let c = rng.gen_range(0..n);
        let (op, d) = match rng.gen_range(0..10) {
            0..=2 => (Op::Add(a, c), deg[a].max(deg[c])),
            3..=4 => (Op::Sub(a, c), deg[a].max(deg[c])),
            5..=8 if deg[a] + deg[c] <= shape.max_degree => (Op::Mul(a, c), deg[a] + deg[c]),
            9 => {
                let q = *divisors.choose(rng).expect("nonempty");
                (Op::Div(a, q), deg[a])
            }
            _ => (Op::Add(a, c), deg[a].max(deg[c])),
        };
        push(&mut b, op, d, &mut ops, &mut deg);
    }
    let n = ops.len();
    let mut outputs: Vec<NodeId> = (0..shape.outputs).map(|_| rng.gen_range(leaves.min(n - 1)..n)).collect();
    outputs[0] = n - 1;
    b.finish(outputs).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::ParameterDomain;
    use crate::semantics::{consistency_check, trial_rng, ConsistencyMode};

    #[test]
    fn shape_is_respected() {
        for s in 0..20 {
            let c = random_circuit(&mut trial_rng(s, 0), RandomShape::default());
            assert_eq!(c.len(), 40);
            assert_eq!(c.outputs().len(), 2);
            assert!(c.validate().is_valid());
            let r = consistency_check(&c, &ParameterDomain::affine(2), ConsistencyMode::exact()).unwrap();
            assert!(r.is_consistent());
        }
    }
}
