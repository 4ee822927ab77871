//! Candidate evaluators of the eliminant from the `Ξ` encoding, and an
//! audit that checks them against `F` and reports their cost.

use serde::Serialize;

use super::LowerBoundError;
use crate::algebra::{exact_rank, AlgebraError, Matrix, Scalar, SparsePoly};
use crate::circuit::{is_essentially_division_free, sample_coordinate, Circuit, CircuitBuilder, NodeId, Op};
use crate::cost::cost;
use crate::family::{h_value, point_count, product_of_roots, xi};
use crate::semantics::{evaluate, trial_rng, SemanticsError};

/// Interpolating evaluator: parameters are the `K` encoding coordinates,
/// the single input is `Y`, the output is `F(Y)`.
#[derive(Clone, Debug)]
pub struct NaiveEvaluator {
    pub n: usize,
    pub circuit: Circuit,
    /// Indices of the encoding coordinates used for interpolation.
    pub rows: Vec<usize>,
}

fn multilinear_row(p: &[Scalar]) -> Vec<Scalar> {
    (0..1usize << p.len())
        .map(|k| p.iter().enumerate().filter(|(i, _)| (k >> i) & 1 == 1).map(|(_, v)| v.clone()).product())
        .collect()
}

/// Recovers `θ` from `2^n` encoding coordinates, forms the roots
/// `H(ε) = Σ_{κ ⊆ ε} θ_κ`, their elementary symmetric functions, and
/// evaluates `F` by Horner's rule.
pub fn naive_evaluator(n: usize, points: &[Vec<Scalar>]) -> Result<NaiveEvaluator, LowerBoundError> {
    let d = 1usize << n;
    if points.len() != point_count(n) || points.iter().any(|p| p.len() != n) {
        return Err(LowerBoundError::Points { expected: point_count(n), dim: n, found: points.len() });
    }
    let mut rows = Vec::new();
    let mut chosen: Vec<Vec<Scalar>> = Vec::new();
    for (k, p) in points.iter().enumerate() {
        let r = multilinear_row(p);
        chosen.push(r);
        if exact_rank(&Matrix::from_rows(chosen.clone()).expect("rectangular")) == chosen.len() {
            rows.push(k);
            if rows.len() == d {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    if rows.len() < d {
        return Err(LowerBoundError::RankDeficient { rank: rows.len(), full: d, attempts: 1, points: points.to_vec() });
    }
    let w = Matrix::from_rows(chosen).expect("square").inverse().map_err(|_| LowerBoundError::RankDeficient {
        rank: d - 1,
        full: d,
        attempts: 1,
        points: points.to_vec(),
    })?;

    let mut b = CircuitBuilder::new(points.len(), 1);
    let y = b.input(0);
    let pi: Vec<NodeId> = rows.iter().map(|&k| b.param(k)).collect();
    let mut roots = Vec::with_capacity(d);
    for e in 0..d {
        let mut acc: Option<NodeId> = None;
        for (k, &p) in pi.iter().enumerate() {
            let c: Scalar = (0..d).filter(|kappa| kappa & !e == 0).map(|kappa| w[(kappa, k)].clone()).sum();
            if c.is_zero() {
                continue;
            }
            let term = if c.is_one() {
                p
            } else {
                let s = b.scalar(c);
                b.mul(s, p)
            };
            acc = Some(match acc {
                None => term,
                Some(a) => b.add(a, term),
            });
        }
        roots.push(acc.unwrap_or_else(|| b.scalar(0)));
    }
    // coeffs[k] is the coefficient of Y^{deg - k}; the leading 1 is implicit
    let mut coeffs: Vec<NodeId> = Vec::with_capacity(d);
    let zero = b.scalar(0);
    for &r in &roots {
        let mut next = Vec::with_capacity(coeffs.len() + 1);
        for k in 0..=coeffs.len() {
            let prev = if k == 0 { r } else { b.mul(r, coeffs[k - 1]) };
            next.push(if k < coeffs.len() { b.sub(coeffs[k], prev) } else { b.sub(zero, prev) });
        }
        coeffs = next;
    }
    let mut acc = b.add(y, coeffs[0]);
    for &c in &coeffs[1..] {
        let m = b.mul(acc, y);
        acc = b.add(m, c);
    }
    let circuit = b.finish(vec![acc]).expect("valid by construction");
    Ok(NaiveEvaluator { n, circuit, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum AuditVerdict {
    NotAnEvaluator { reason: String },
    /// Disagrees with `F` at the sample `(t, u)`.
    Violation { t: Scalar, u: Vec<Scalar> },
    Consistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub n: usize,
    pub verdict: AuditVerdict,
    pub samples_checked: usize,
    pub m: usize,
    pub essential_mults: usize,
    pub param_mults: usize,
    /// `2^n`, the lower bound on `max(m, essential_mults)`.
    pub bound: usize,
}

impl AuditReport {
    pub fn meets_bound(&self) -> bool {
        self.m.max(self.essential_mults) >= self.bound
    }
}

fn eval_in_y(c: &Circuit, pi: &[Scalar]) -> Result<SparsePoly, SemanticsError> {
    let vals = evaluate::<SparsePoly>(
        c,
        |_, op| {
            Ok(match op {
                Op::Scalar(s) => SparsePoly::constant(1, s.clone()),
                Op::Param(i) => SparsePoly::constant(1, pi[*i].clone()),
                _ => SparsePoly::var(1, 0),
            })
        },
        |_, _| Ok(()),
    )?;
    Ok(vals[c.outputs()[0]].clone())
}

/// Compares `c(Ξ(H(t, u, X)), Y)` with `F(t, u, Y)` at `trials` seeded
/// samples, skipping samples where a division by zero occurs.
pub fn audit_candidate(c: &Circuit, n: usize, points: &[Vec<Scalar>], trials: usize, seed: u64) -> AuditReport {
    let r = cost(c);
    let mut report = AuditReport {
        n,
        verdict: AuditVerdict::Consistent,
        samples_checked: 0,
        m: r.essential_param_count,
        essential_mults: r.essential_mults,
        param_mults: r.param_mults,
        bound: 1 << n,
    };
    let reason = if c.params() != points.len() {
        Some(format!("expected {} parameters, found {}", points.len(), c.params()))
    } else if c.inputs() != 1 || c.outputs().len() != 1 {
        Some("expected one input and one output".to_string())
    } else if !is_essentially_division_free(c) {
        Some("not essentially division-free".to_string())
    } else {
        None
    };
    if let Some(reason) = reason {
        report.verdict = AuditVerdict::NotAnEvaluator { reason };
        return report;
    }
    let mut stream = 0u64;
    while report.samples_checked < trials && stream < 4 * trials as u64 + 4 {
        let mut rng = trial_rng(seed, stream);
        stream += 1;
        let t = sample_coordinate(&mut rng, 1 << 8);
        let u: Vec<Scalar> = (0..n).map(|_| sample_coordinate(&mut rng, 1 << 8)).collect();
        let got = match eval_in_y(c, &xi(points, &t, &u)) {
            Ok(p) => p,
            Err(SemanticsError::Algebra { source: AlgebraError::DivisionByZero, .. }) => continue,
            Err(e) => {
                report.verdict = AuditVerdict::NotAnEvaluator { reason: e.to_string() };
                return report;
            }
        };
        let roots: Vec<Scalar> = (0..1usize << n)
            .map(|e| h_value(&t, &u, &(0..n).map(|i| Scalar::from((e >> i) & 1)).collect::<Vec<_>>()))
            .collect();
        report.samples_checked += 1;
        if got != SparsePoly::from_dense_univariate(&product_of_roots(&roots)) {
            report.verdict = AuditVerdict::Violation { t, u };
            return report;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::identification_points;

    #[test]
    fn naive_evaluator_is_correct_and_costly() {
        for n in 1..=3 {
            let pts = identification_points(n, 11);
            let ev = naive_evaluator(n, &pts).unwrap();
            let rep = audit_candidate(&ev.circuit, n, &pts, 5, 2);
            assert_eq!(rep.verdict, AuditVerdict::Consistent, "n = {n}");
            assert_eq!(rep.samples_checked, 5);
            assert_eq!(rep.m, 1 << n);
            assert_eq!(rep.essential_mults, (1 << n) - 1);
            assert_eq!(rep.param_mults, 0);
            assert!(rep.meets_bound());
        }
    }

    #[test]
    fn wrong_candidate_is_caught() {
        let n = 2;
        let pts = identification_points(n, 4);
        let mut b = CircuitBuilder::new(pts.len(), 1);
        let y = b.input(0);
        let p = b.param(0);
        let s = b.add(y, p);
        let c = b.finish(vec![s]).unwrap();
        assert!(matches!(audit_candidate(&c, n, &pts, 3, 0).verdict, AuditVerdict::Violation { .. }));
        let mut bad = CircuitBuilder::new(1, 1);
        let y = bad.input(0);
        let c = bad.finish(vec![y]).unwrap();
        assert!(matches!(audit_candidate(&c, n, &pts, 3, 0).verdict, AuditVerdict::NotAnEvaluator { .. }));
    }
}
