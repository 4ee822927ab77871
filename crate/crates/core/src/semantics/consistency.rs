//! Consistency of a circuit over a parameter domain.

use serde::{Deserialize, Serialize};

use super::{expand_with, trace_point, trial_rng, SemanticsError};
use crate::algebra::Scalar;
use crate::circuit::{sample_coordinate, Circuit, DomainError, NodeId, Op, ParameterDomain, DEFAULT_SAMPLE_BOUND};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ConsistencyMode {
    /// Symbolic pullback along a chart of the domain; falls back to
    /// sampling with `fallback_trials` when no chart is available or the
    /// expansion exceeds `budget` terms.
    Exact { budget: usize, fallback_trials: usize, seed: u64 },
    Probabilistic { trials: usize, seed: u64 },
}

impl ConsistencyMode {
    pub fn exact() -> Self {
        ConsistencyMode::Exact { budget: 20_000, fallback_trials: 32, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Inconsistent { node: NodeId },
    /// Some divisors vanished at some samples but not all.
    Undecided { nodes: Vec<NodeId> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub verdict: Verdict,
    pub method: String,
    /// Per division node: samples where the divisor vanished / did not.
    pub tallies: Vec<(NodeId, usize, usize)>,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.verdict == Verdict::Consistent
    }
}

pub fn consistency_check(c: &Circuit, d: &ParameterDomain, mode: ConsistencyMode) -> Result<ConsistencyReport, SemanticsError> {
    if d.dim() != c.params() {
        return Err(SemanticsError::Arity { what: "domain dimension", expected: c.params(), found: d.dim() });
    }
    if !c.nodes().iter().any(|n| matches!(n.op, Op::Div(..))) {
        return Ok(ConsistencyReport { verdict: Verdict::Consistent, method: "division-free".into(), tallies: vec![] });
    }
    match mode {
        ConsistencyMode::Probabilistic { trials, seed } => probabilistic(c, d, trials, seed),
        ConsistencyMode::Exact { budget, fallback_trials, seed } => {
            let chart = d.chart()?;
            let Some(ch) = chart else {
                return probabilistic(c, d, fallback_trials, seed);
            };
            match expand_with(c, ch.source_dim, &ch.map, budget) {
                Ok(_) => Ok(ConsistencyReport { verdict: Verdict::Consistent, method: "exact".into(), tallies: vec![] }),
                Err(SemanticsError::DivisionByZeroFunction { node }) => {
                    Ok(ConsistencyReport { verdict: Verdict::Inconsistent { node }, method: "exact".into(), tallies: vec![] })
                }
                Err(SemanticsError::BudgetExceeded { .. }) => probabilistic(c, d, fallback_trials, seed),
                Err(e) => Err(e),
            }
        }
    }
}

fn probabilistic(c: &Circuit, d: &ParameterDomain, trials: usize, seed: u64) -> Result<ConsistencyReport, SemanticsError> {
    let divs: Vec<NodeId> = (0..c.len()).filter(|&i| matches!(c.op(i), Op::Div(..))).collect();
    let mut zero = vec![0usize; divs.len()];
    let mut nonzero = vec![0usize; divs.len()];
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let u = match d.sample(&mut rng, DEFAULT_SAMPLE_BOUND, 64) {
            Ok(u) => u,
            Err(DomainError::EmptyDomainSuspected { .. }) => {
                return Err(DomainError::EmptyDomainSuspected { trials: 64 * trials.max(1) }.into())
            }
            Err(e) => return Err(e.into()),
        };
        let x: Vec<Scalar> = (0..c.inputs()).map(|_| sample_coordinate(&mut rng, DEFAULT_SAMPLE_BOUND)).collect();
        let tr = trace_point(c, &u, &x)?;
        let reached = tr.failure.unwrap_or(c.len());
        for (k, &i) in divs.iter().enumerate() {
            if i < reached {
                nonzero[k] += 1;
            } else if i == reached {
                zero[k] += 1;
            }
        }
    }
    let tallies: Vec<(NodeId, usize, usize)> = divs.iter().enumerate().map(|(k, &i)| (i, zero[k], nonzero[k])).collect();
    let verdict = if let Some(&(node, _, _)) = tallies.iter().find(|t| t.1 > 0 && t.2 == 0) {
        Verdict::Inconsistent { node }
    } else {
        let mixed: Vec<NodeId> = tallies.iter().filter(|t| t.1 > 0).map(|t| t.0).collect();
        if mixed.is_empty() {
            Verdict::Consistent
        } else {
            Verdict::Undecided { nodes: mixed }
        }
    };
    Ok(ConsistencyReport { verdict, method: "probabilistic".into(), tallies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SparsePoly;
    use crate::circuit::CircuitBuilder;

    fn x_over_p() -> (Circuit, NodeId) {
        let mut b = CircuitBuilder::new(1, 1);
        let x = b.input(0);
        let p = b.param(0);
        let d = b.div(x, p);
        (b.finish(vec![d]).unwrap(), d)
    }

    #[test]
    fn divisor_forced_to_zero() {
        let (c, d) = x_over_p();
        let dom = ParameterDomain::Localized { dim: 1, generators: vec![SparsePoly::var(1, 0)], inequation: None };
        let r = consistency_check(&c, &dom, ConsistencyMode::exact()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconsistent { node: d });
        let r = consistency_check(&c, &dom, ConsistencyMode::Probabilistic { trials: 5, seed: 1 }).unwrap();
        assert_eq!(r.verdict, Verdict::Inconsistent { node: d });
    }

    #[test]
    fn affine_domain_is_fine() {
        let (c, _) = x_over_p();
        let r = consistency_check(&c, &ParameterDomain::affine(1), ConsistencyMode::exact()).unwrap();
        assert!(r.is_consistent());
        let r = consistency_check(&c, &ParameterDomain::affine(1), ConsistencyMode::Probabilistic { trials: 8, seed: 2 }).unwrap();
        assert!(r.is_consistent());
    }
}
