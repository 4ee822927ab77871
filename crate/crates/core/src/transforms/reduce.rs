//! Reduction: merging nodes that compute the same intermediate result.
//!
//! Schedule: structural hash-consing first, then nodes whose value vectors
//! agree at seeded sample points, in topological order. The node with the
//! smallest position is kept and later duplicates are redirected to it, so
//! arguments keep pointing backwards.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{garbage_collect, TransformError};
use crate::algebra::{RatFunc, Scalar};
use crate::circuit::{sample_coordinate, Circuit, Node, NodeId, Op, ParameterDomain, DEFAULT_SAMPLE_BOUND};
use crate::semantics::{expand_prefix, trace_point, trial_rng, SemanticsError, RESAMPLE_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "oracle", rename_all = "snake_case")]
pub enum Oracle {
    /// Value vectors at `samples` seeded points.
    Fingerprint { seed: u64, samples: usize },
    /// Fingerprint candidates confirmed by symbolic expansion over a chart
    /// of the domain; pairs beyond `budget` terms are skipped.
    Exact { seed: u64, samples: usize, budget: usize },
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle::Fingerprint { seed: 0, samples: 10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeKind {
    Structural,
    Semantic,
}

/// Node ids refer to the input circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Merge {
    pub kept: u64,
    pub removed: u64,
    pub kind: MergeKind,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReduceReport {
    #[serde(skip)]
    pub circuit: Circuit,
    pub merges: Vec<Merge>,
    /// Candidate pairs the oracle could not decide.
    pub skipped: Vec<(u64, u64)>,
    pub nodes_before: usize,
    pub nodes_after: usize,
}

pub fn reduce(c: &Circuit, oracle: Oracle) -> Result<ReduceReport, TransformError> {
    reduce_on(c, &ParameterDomain::affine(c.params()), oracle)
}

fn canonical(op: &Op, rep: &[NodeId]) -> Op {
    match op.map_args(|a| rep[a]) {
        Op::Add(a, b) if a > b => Op::Add(b, a),
        Op::Mul(a, b) if a > b => Op::Mul(b, a),
        o => o,
    }
}

fn structural(c: &Circuit, rep: &mut [NodeId], merges: &mut Vec<Merge>) {
    let mut table: HashMap<Op, NodeId> = HashMap::new();
    for i in 0..c.len() {
        if rep[i] != i {
            continue;
        }
        let key = canonical(c.op(i), rep);
        match table.get(&key) {
            Some(&k) => {
                rep[i] = k;
                merges.push(Merge { kept: c.nodes()[k].id, removed: c.nodes()[i].id, kind: MergeKind::Structural });
            }
            None => {
                table.insert(key, i);
            }
        }
    }
}

/// Node value vectors at `k` domain points where no division fails.
fn node_values(c: &Circuit, d: &ParameterDomain, seed: u64, k: usize) -> Result<Vec<Vec<Scalar>>, TransformError> {
    let mut cols: Vec<Vec<Scalar>> = vec![Vec::with_capacity(k); c.len()];
    let limit = (k * RESAMPLE_LIMIT).max(RESAMPLE_LIMIT) as u64;
    let (mut got, mut j) = (0, 0u64);
    while got < k {
        if j >= limit {
            return Err(SemanticsError::SamplesExhausted { tries: limit as usize }.into());
        }
        let mut rng = trial_rng(seed, j);
        j += 1;
        let u = d.sample(&mut rng, DEFAULT_SAMPLE_BOUND, 64).map_err(SemanticsError::from)?;
        let x: Vec<Scalar> = (0..c.inputs()).map(|_| sample_coordinate(&mut rng, DEFAULT_SAMPLE_BOUND)).collect();
        let t = trace_point(c, &u, &x)?;
        if t.failure.is_some() {
            continue;
        }
        for (col, v) in cols.iter_mut().zip(t.values) {
            col.push(v);
        }
        got += 1;
    }
    Ok(cols)
}

fn redirected(c: &Circuit, rep: &[NodeId]) -> Result<Circuit, TransformError> {
    let nodes = c.nodes().iter().map(|n| Node { id: n.id, op: n.op.map_args(|a| rep[a]) }).collect();
    let outputs = c.outputs().iter().map(|&o| rep[o]).collect();
    Ok(Circuit::from_nodes(c.params(), c.inputs(), nodes, outputs)?)
}

/// Reduction with sample points drawn from `d`, so nodes that agree on
/// `d` are merged.
pub fn reduce_on(c: &Circuit, d: &ParameterDomain, oracle: Oracle) -> Result<ReduceReport, TransformError> {
    let mut rep: Vec<NodeId> = (0..c.len()).collect();
    let mut merges = Vec::new();
    let mut skipped = Vec::new();
    structural(c, &mut rep, &mut merges);

    let (seed, samples) = match oracle {
        Oracle::Fingerprint { seed, samples } | Oracle::Exact { seed, samples, .. } => (seed, samples),
    };
    let cols = node_values(c, d, seed, samples.max(1))?;
    let exact: Option<(Vec<RatFunc>, usize)> = match oracle {
        Oracle::Exact { budget, .. } => match d.chart().map_err(SemanticsError::from)? {
            Some(ch) => {
                let (vals, _) = expand_prefix(c, ch.source_dim, &ch.map, budget);
                let known = vals.len();
                Some((vals, known))
            }
            None => Some((Vec::new(), 0)),
        },
        Oracle::Fingerprint { .. } => None,
    };

    let mut table: HashMap<&[Scalar], NodeId> = HashMap::new();
    for i in 0..c.len() {
        if rep[i] != i {
            continue;
        }
        let key = cols[i].as_slice();
        let Some(&k) = table.get(key) else {
            table.insert(key, i);
            continue;
        };
        if let Some((vals, known)) = &exact {
            if i >= *known {
                skipped.push((c.nodes()[k].id, c.nodes()[i].id));
                continue;
            }
            if vals[k] != vals[i] {
                continue;
            }
        }
        rep[i] = k;
        merges.push(Merge { kept: c.nodes()[k].id, removed: c.nodes()[i].id, kind: MergeKind::Semantic });
    }
    // later nodes may point at merged ones
    for i in 0..c.len() {
        rep[i] = rep[rep[i]];
    }

    let out = garbage_collect(&redirected(c, &rep)?);
    Ok(ReduceReport { nodes_before: c.len(), nodes_after: out.len(), circuit: out, merges, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::semantics::{equal_results, fingerprint};

    fn dup_sum() -> Circuit {
        let mut b = CircuitBuilder::new(0, 2);
        let x = b.input(0);
        let y = b.input(1);
        let s1 = b.add(x, y);
        let s2 = b.add(y, x);
        let m = b.mul(s1, s2);
        b.finish(vec![m]).unwrap()
    }

    #[test]
    fn duplicated_subterm_is_merged() {
        let c = dup_sum();
        let r = reduce(&c, Oracle::default()).unwrap();
        assert_eq!(r.nodes_after, c.len() - 1);
        assert_eq!(r.merges[0].kind, MergeKind::Structural);
        assert!(equal_results(&fingerprint(&c, 4, 10).unwrap(), &fingerprint(&r.circuit, 4, 10).unwrap()));
        let again = reduce(&r.circuit, Oracle::default()).unwrap();
        assert_eq!(again.circuit, r.circuit);
        assert!(again.merges.is_empty());
    }

    #[test]
    fn semantic_duplicates_merge_with_exact_confirmation() {
        // x*(y+1) and x*y + x
        let mut b = CircuitBuilder::new(0, 2);
        let x = b.input(0);
        let y = b.input(1);
        let one = b.scalar(1);
        let y1 = b.add(y, one);
        let a = b.mul(x, y1);
        let xy = b.mul(x, y);
        let bb = b.add(xy, x);
        let s = b.sub(a, bb);
        let c = b.finish(vec![s]).unwrap();
        let r = reduce(&c, Oracle::Exact { seed: 1, samples: 4, budget: 100 }).unwrap();
        assert!(r.merges.iter().any(|m| m.kind == MergeKind::Semantic && m.kept == a as u64 && m.removed == bb as u64));
        assert!(r.nodes_after < c.len());
    }
}
