//! Circuit evaluation: pointwise, symbolic and fingerprinted.

mod consistency;
mod fingerprint;

pub use consistency::{consistency_check, ConsistencyMode, ConsistencyReport, Verdict};
pub use fingerprint::{equal_results, fingerprint, fingerprint_on, trial_rng, Fingerprint, FingerprintSample, RESAMPLE_LIMIT};

use serde::Serialize;

use crate::algebra::{AlgebraError, RatFunc, Scalar, SeriesCoeff, SparsePoly, TruncatedLaurent};
use crate::circuit::{is_essentially_division_free, is_totally_division_free, Circuit, DomainError, NodeId, Op};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemanticsError {
    #[error("division by zero at node {node}")]
    DivisionByZero { node: NodeId },
    #[error("division by the zero function at node {node}")]
    DivisionByZeroFunction { node: NodeId },
    #[error("term budget {budget} exceeded at node {node}")]
    BudgetExceeded { node: NodeId, budget: usize },
    #[error("{what}: expected {expected} values, found {found}")]
    Arity { what: &'static str, expected: usize, found: usize },
    #[error("circuits disagree on parameter/input counts")]
    Shape,
    #[error("no usable sample point after {tries} attempts")]
    SamplesExhausted { tries: usize },
    #[error("at node {node}: {source}")]
    Algebra { node: NodeId, source: AlgebraError },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Values a circuit can be evaluated over.
pub trait NodeValue: Clone {
    fn add(&self, o: &Self) -> Result<Self, AlgebraError>;
    fn sub(&self, o: &Self) -> Result<Self, AlgebraError>;
    fn mul(&self, o: &Self) -> Result<Self, AlgebraError>;
    fn div(&self, o: &Self) -> Result<Self, AlgebraError>;
}

impl NodeValue for Scalar {
    fn add(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.checked_div(o)
    }
}

impl NodeValue for SparsePoly {
    fn add(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.try_add(o)
    }
    fn sub(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.try_sub(o)
    }
    fn mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.try_mul(o)
    }
    fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        if o.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        self.div_exact(o).ok_or(AlgebraError::NotDivisible)
    }
}

impl NodeValue for RatFunc {
    fn add(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.try_add(o)
    }
    fn sub(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.try_sub(o)
    }
    fn mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.try_mul(o)
    }
    fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.try_div(o)
    }
}

impl<C: SeriesCoeff> NodeValue for TruncatedLaurent<C> {
    fn add(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(TruncatedLaurent::add(self, o))
    }
    fn sub(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(TruncatedLaurent::sub(self, o))
    }
    fn mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(TruncatedLaurent::mul(self, o))
    }
    fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        TruncatedLaurent::div(self, o)
    }
}

/// Runs the canonical evaluation. `leaf` supplies values of leaf nodes;
/// `inspect` sees each value as it is produced and may abort.
pub fn evaluate<V: NodeValue>(
    c: &Circuit,
    mut leaf: impl FnMut(NodeId, &Op) -> Result<V, SemanticsError>,
    mut inspect: impl FnMut(NodeId, &V) -> Result<(), SemanticsError>,
) -> Result<Vec<V>, SemanticsError> {
    let mut vals: Vec<V> = Vec::with_capacity(c.len());
    for (i, n) in c.nodes().iter().enumerate() {
        let v = match &n.op {
            Op::Add(a, b) => vals[*a].add(&vals[*b]),
            Op::Sub(a, b) => vals[*a].sub(&vals[*b]),
            Op::Mul(a, b) => vals[*a].mul(&vals[*b]),
            Op::Div(a, b) => vals[*a].div(&vals[*b]),
            op => Ok(leaf(i, op)?),
        }
        .map_err(|e| SemanticsError::Algebra { node: i, source: e })?;
        inspect(i, &v)?;
        vals.push(v);
    }
    Ok(vals)
}

/// Node values of a pointwise evaluation; `failure` is the division node
/// where evaluation stopped, if any.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalTrace {
    pub values: Vec<Scalar>,
    pub failure: Option<NodeId>,
    outputs: Vec<NodeId>,
}

impl EvalTrace {
    pub fn outputs(&self) -> Vec<Scalar> {
        self.outputs.iter().map(|&o| self.values[o].clone()).collect()
    }
}

fn check_point(c: &Circuit, u: &[Scalar], x: &[Scalar]) -> Result<(), SemanticsError> {
    if u.len() != c.params() {
        return Err(SemanticsError::Arity { what: "parameters", expected: c.params(), found: u.len() });
    }
    if x.len() != c.inputs() {
        return Err(SemanticsError::Arity { what: "inputs", expected: c.inputs(), found: x.len() });
    }
    Ok(())
}

fn scalar_leaf<'a>(u: &'a [Scalar], x: &'a [Scalar]) -> impl FnMut(NodeId, &Op) -> Result<Scalar, SemanticsError> + 'a {
    move |_, op| {
        Ok(match op {
            Op::Scalar(s) => s.clone(),
            Op::Param(i) => u[*i].clone(),
            Op::Input(j) => x[*j].clone(),
            _ => unreachable!("leaf"),
        })
    }
}

/// Evaluation up to the first failing division, which is recorded.
pub fn trace_point(c: &Circuit, u: &[Scalar], x: &[Scalar]) -> Result<EvalTrace, SemanticsError> {
    check_point(c, u, x)?;
    let mut values = Vec::with_capacity(c.len());
    let r = evaluate(c, scalar_leaf(u, x), |_, v: &Scalar| {
        values.push(v.clone());
        Ok(())
    });
    let failure = match r {
        Ok(_) => None,
        Err(SemanticsError::Algebra { node, source: AlgebraError::DivisionByZero }) => Some(node),
        Err(e) => return Err(e),
    };
    Ok(EvalTrace { values, failure, outputs: c.outputs().to_vec() })
}

pub fn eval_point(c: &Circuit, u: &[Scalar], x: &[Scalar]) -> Result<EvalTrace, SemanticsError> {
    let t = trace_point(c, u, x)?;
    match t.failure {
        Some(node) => Err(SemanticsError::DivisionByZero { node }),
        None => Ok(t),
    }
}

/// Final results only.
pub fn eval_outputs(c: &Circuit, u: &[Scalar], x: &[Scalar]) -> Result<Vec<Scalar>, SemanticsError> {
    check_point(c, u, x)?;
    let vals = evaluate(c, scalar_leaf(u, x), |_, _| Ok(())).map_err(|e| match e {
        SemanticsError::Algebra { node, source: AlgebraError::DivisionByZero } => SemanticsError::DivisionByZero { node },
        e => e,
    })?;
    Ok(c.outputs().iter().map(|&o| vals[o].clone()).collect())
}

/// Symbolic results over the variables `U_1..U_r, X_1..X_n` (in that order).
#[derive(Clone, Debug)]
pub struct Expansion {
    pub params: usize,
    pub inputs: usize,
    pub values: Vec<RatFunc>,
    pub outputs: Vec<RatFunc>,
    /// No intermediate denominator involves an input. Conservative: the
    /// normal form takes no gcds, so a `false` may be spurious.
    pub polynomial_in_inputs: bool,
    pub essentially_division_free: bool,
    pub totally_division_free: bool,
}

impl Expansion {
    pub fn var_names(&self) -> Vec<String> {
        var_names(self.params, self.inputs)
    }
}

pub fn var_names(r: usize, n: usize) -> Vec<String> {
    (1..=r).map(|i| format!("U{i}")).chain((1..=n).map(|j| format!("X{j}"))).collect()
}

fn denominator_free_of_inputs(f: &RatFunc, r: usize) -> bool {
    !f.denom().involves_any(|v| v >= r)
}

/// Symbolic evaluation with parameters given by `params` (polynomials in
/// `k` source variables); inputs become variables `k..k+n`.
pub(crate) fn expand_with(
    c: &Circuit,
    k: usize,
    params: &[SparsePoly],
    budget: usize,
) -> Result<Vec<RatFunc>, SemanticsError> {
    match expand_prefix(c, k, params, budget) {
        (vals, None) => Ok(vals),
        (_, Some(e)) => Err(e),
    }
}

/// Like `expand_with`, but keeps the values computed before a failure.
pub(crate) fn expand_prefix(
    c: &Circuit,
    k: usize,
    params: &[SparsePoly],
    budget: usize,
) -> (Vec<RatFunc>, Option<SemanticsError>) {
    let nv = k + c.inputs();
    let lifted: Vec<RatFunc> = params
        .iter()
        .map(|p| RatFunc::from_poly(p.remap(nv, &(0..k).collect::<Vec<_>>())))
        .collect();
    let mut done = Vec::with_capacity(c.len());
    let r = evaluate(
        c,
        |_, op| {
            Ok(match op {
                Op::Scalar(s) => RatFunc::constant(nv, s.clone()),
                Op::Param(i) => lifted[*i].clone(),
                Op::Input(j) => RatFunc::from_poly(SparsePoly::var(nv, k + j)),
                _ => unreachable!("leaf"),
            })
        },
        |node, v: &RatFunc| {
            if v.term_count() > budget {
                Err(SemanticsError::BudgetExceeded { node, budget })
            } else {
                done.push(v.clone());
                Ok(())
            }
        },
    );
    let err = r.err().map(|e| match e {
        SemanticsError::Algebra { node, source: AlgebraError::DivisionByZero } => SemanticsError::DivisionByZeroFunction { node },
        e => e,
    });
    (done, err)
}

pub fn expand_symbolic(c: &Circuit, budget: usize) -> Result<Expansion, SemanticsError> {
    let r = c.params();
    let params: Vec<SparsePoly> = (0..r).map(|i| SparsePoly::var(r, i)).collect();
    let values = expand_with(c, r, &params, budget)?;
    let outputs = c.outputs().iter().map(|&o| values[o].clone()).collect();
    Ok(Expansion {
        params: r,
        inputs: c.inputs(),
        polynomial_in_inputs: values.iter().all(|v| denominator_free_of_inputs(v, r)),
        essentially_division_free: is_essentially_division_free(c),
        totally_division_free: is_totally_division_free(c),
        values,
        outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;

    fn s(v: i64) -> Scalar {
        Scalar::from(v)
    }

    #[test]
    fn division_by_zero_parameter() {
        let mut b = CircuitBuilder::new(1, 1);
        let x = b.input(0);
        let p = b.param(0);
        let d = b.div(x, p);
        let c = b.finish(vec![d]).unwrap();
        assert_eq!(eval_point(&c, &[s(0)], &[s(1)]), Err(SemanticsError::DivisionByZero { node: d }));
        let t = trace_point(&c, &[s(0)], &[s(1)]).unwrap();
        assert_eq!(t.failure, Some(d));
        assert_eq!(eval_outputs(&c, &[s(2)], &[s(1)]).unwrap(), vec![Scalar::new(1, 2).unwrap()]);
    }

    #[test]
    fn square_over_input_is_not_essentially_division_free() {
        let mut b = CircuitBuilder::new(0, 1);
        let x = b.input(0);
        let sq = b.mul(x, x);
        let d = b.div(sq, x);
        let c = b.finish(vec![d]).unwrap();
        let e = expand_symbolic(&c, 1000).unwrap();
        assert_eq!(e.outputs[0], RatFunc::from_poly(SparsePoly::var(1, 0)));
        assert!(e.polynomial_in_inputs);
        assert!(!e.essentially_division_free);
    }

    #[test]
    fn division_by_zero_function() {
        let mut b = CircuitBuilder::new(0, 1);
        let one = b.scalar(1);
        let x = b.input(0);
        let z = b.sub(x, x);
        let d = b.div(one, z);
        let c = b.finish(vec![d]).unwrap();
        assert_eq!(expand_symbolic(&c, 1000).unwrap_err(), SemanticsError::DivisionByZeroFunction { node: d });
    }

    #[test]
    fn budget_is_enforced() {
        let mut b = CircuitBuilder::new(0, 3);
        let x = b.input(0);
        let y = b.input(1);
        let z = b.input(2);
        let s1 = b.add(x, y);
        let s2 = b.add(s1, z);
        let mut acc = s2;
        for _ in 0..4 {
            acc = b.mul(acc, s2);
        }
        let c = b.finish(vec![acc]).unwrap();
        assert!(matches!(expand_symbolic(&c, 10), Err(SemanticsError::BudgetExceeded { .. })));
    }
}
