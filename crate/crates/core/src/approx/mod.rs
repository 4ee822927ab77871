//! Evaluation along parameter germs `u(ε)`: limits, tails and numeric
//! convergence witnesses.

mod cloud;

pub use cloud::{cloud_membership, sample_cloud, CloudMembership, CoefficientCloud};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, Scalar, SparsePoly, TruncatedLaurent};
use crate::circuit::{is_essentially_division_free, Circuit, NodeId, Op, ParameterDomain};
use crate::semantics::{evaluate, SemanticsError};

pub const DEFAULT_PRECISION: usize = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ApproxError {
    #[error("circuit divides by an input-dependent node")]
    NotEssentiallyDivisionFree,
    #[error("precision exhausted at node {node}; raise the precision")]
    PrecisionExhausted { node: NodeId },
    #[error("result has a pole of order {} at output node {node}", -order)]
    NotHolomorphic { order: i64, node: NodeId },
    #[error("germ is not in the domain: {reason}")]
    InvalidGerm { reason: String },
    #[error("expected {expected} {what}, found {found}")]
    Arity { what: &'static str, expected: usize, found: usize },
    #[error("every witness point failed to evaluate")]
    AllPointsFailed,
    #[error("empty coefficient cloud")]
    EmptyCloud,
    #[error("result exceeds the cloud's degree bound {degree}")]
    DegreeBound { degree: u32 },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// One germ entry `Σ coeffs[k] ε^{order+k}`, a Laurent polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GermEntry {
    pub order: i64,
    pub coeffs: Vec<Scalar>,
}

impl GermEntry {
    pub fn series(&self, precision: usize) -> TruncatedLaurent<Scalar> {
        TruncatedLaurent::from_polynomial(self.order, self.coeffs.clone(), Scalar::zero(), precision)
    }

    pub fn at(&self, eps: &Scalar) -> Result<Scalar, AlgebraError> {
        TruncatedLaurent::new(self.order, self.coeffs.clone(), Scalar::zero()).eval_known(eps)
    }

    fn is_constant(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(k, c)| c.is_zero() || self.order + k as i64 == 0)
    }
}

/// Germ file contents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GermFile {
    pub entries: Vec<GermEntry>,
    pub domain: ParameterDomain,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxInstance {
    pub germs: Vec<GermEntry>,
    pub domain: ParameterDomain,
    pub precision: usize,
}

fn poly_at_series(p: &SparsePoly, u: &[TruncatedLaurent<Scalar>], precision: usize) -> TruncatedLaurent<Scalar> {
    let mut acc = TruncatedLaurent::constant(Scalar::zero(), precision);
    for (e, c) in p.terms() {
        let mut t = TruncatedLaurent::constant(c.clone(), precision);
        for (i, &d) in e.iter().enumerate() {
            for _ in 0..d {
                t = t.mul(&u[i]);
            }
        }
        acc = acc.add(&t);
    }
    acc
}

impl ApproxInstance {
    pub fn new(germs: Vec<GermEntry>, domain: ParameterDomain, precision: usize) -> Result<Self, ApproxError> {
        let inst = ApproxInstance { germs, domain, precision };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_file(f: GermFile, precision: usize) -> Result<Self, ApproxError> {
        Self::new(f.entries, f.domain, precision)
    }

    pub fn series(&self) -> Vec<TruncatedLaurent<Scalar>> {
        self.germs.iter().map(|g| g.series(self.precision)).collect()
    }

    /// Generators must vanish at `u(ε)` to the working precision and the
    /// inequation must not. Image domains are accepted unchecked.
    pub fn validate(&self) -> Result<(), ApproxError> {
        let dim = self.domain.dim();
        if self.germs.len() != dim {
            return Err(ApproxError::Arity { what: "germ entries", expected: dim, found: self.germs.len() });
        }
        if let ParameterDomain::Localized { generators, inequation, .. } = &self.domain {
            let u = self.series();
            for (i, g) in generators.iter().enumerate() {
                let v = poly_at_series(g, &u, self.precision);
                if !v.is_zero() {
                    return Err(ApproxError::InvalidGerm { reason: format!("generator {i} has order {}", v.order()) });
                }
            }
            if let Some(p) = inequation {
                if poly_at_series(p, &u, self.precision).is_zero() {
                    return Err(ApproxError::InvalidGerm { reason: "inequation vanishes".into() });
                }
            }
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        self.germs.iter().all(GermEntry::is_constant)
    }
}

/// Per-output series with `SparsePoly`-in-`X` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxResult {
    pub outputs: Vec<TruncatedLaurent<SparsePoly>>,
    pub output_nodes: Vec<NodeId>,
    pub holomorphic: bool,
    /// Coefficients at `ε^0`, when holomorphic.
    pub h: Option<Vec<SparsePoly>>,
    /// Coefficients at `ε^1, ε^2, ..` up to the known precision, when holomorphic.
    pub tail: Option<Vec<Vec<SparsePoly>>>,
}

impl ApproxResult {
    pub fn min_order(&self) -> (i64, NodeId) {
        self.outputs
            .iter()
            .zip(&self.output_nodes)
            .map(|(s, &n)| (s.order(), n))
            .min_by_key(|&(o, _)| o)
            .unwrap_or((0, 0))
    }

    pub fn tail_is_zero(&self) -> bool {
        self.tail.as_ref().is_some_and(|t| t.iter().flatten().all(SparsePoly::is_zero))
    }
}

pub fn approx_eval(c: &Circuit, inst: &ApproxInstance) -> Result<ApproxResult, ApproxError> {
    if !is_essentially_division_free(c) {
        return Err(ApproxError::NotEssentiallyDivisionFree);
    }
    if inst.germs.len() != c.params() {
        return Err(ApproxError::Arity { what: "germ entries", expected: c.params(), found: inst.germs.len() });
    }
    let n = c.inputs();
    let prec = inst.precision;
    let zero = SparsePoly::zero(n);
    let params: Vec<TruncatedLaurent<SparsePoly>> =
        inst.series().iter().map(|s| s.map(|a| SparsePoly::constant(n, a.clone()), zero.clone())).collect();
    let vals = evaluate::<TruncatedLaurent<SparsePoly>>(
        c,
        |_, op| {
            Ok(match op {
                Op::Scalar(s) => TruncatedLaurent::constant(SparsePoly::constant(n, s.clone()), prec),
                Op::Param(i) => params[*i].clone(),
                Op::Input(j) => TruncatedLaurent::constant(SparsePoly::var(n, *j), prec),
                _ => unreachable!("leaf"),
            })
        },
        |_, _| Ok(()),
    )
    .map_err(|e| match e {
        SemanticsError::Algebra { node, source: AlgebraError::PrecisionExhausted { .. } } => {
            ApproxError::PrecisionExhausted { node }
        }
        e => e.into(),
    })?;
    if let Some(&node) = c.outputs().iter().find(|&&o| vals[o].abs_precision() <= 0) {
        return Err(ApproxError::PrecisionExhausted { node });
    }
    let outputs: Vec<TruncatedLaurent<SparsePoly>> = c.outputs().iter().map(|&o| vals[o].clone()).collect();
    let holomorphic = outputs.iter().all(|s| s.order() >= 0);
    let (h, tail) = if holomorphic {
        let h = outputs.iter().map(|s| s.coeff(0).unwrap_or_else(|| zero.clone())).collect();
        let top = outputs.iter().map(|s| s.abs_precision()).min().unwrap_or(1);
        let tail = (1..top).map(|k| outputs.iter().map(|s| s.coeff(k).unwrap_or_else(|| zero.clone())).collect()).collect();
        (Some(h), Some(tail))
    } else {
        (None, None)
    };
    Ok(ApproxResult { outputs, output_nodes: c.outputs().to_vec(), holomorphic, h, tail })
}

/// The limit `H` at `ε = 0`, or the worst pole.
pub fn represents(c: &Circuit, inst: &ApproxInstance) -> Result<Vec<SparsePoly>, ApproxError> {
    let r = approx_eval(c, inst)?;
    match r.h {
        Some(h) => Ok(h),
        None => {
            let (order, node) = r.min_order();
            Err(ApproxError::NotHolomorphic { order, node })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessRow {
    pub k: u32,
    pub eps: Scalar,
    /// `max |coefficient of G(u(ε_k)) - H|`; `None` if evaluation failed.
    pub deviation: Option<Scalar>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessTable {
    pub h: Vec<SparsePoly>,
    pub rows: Vec<WitnessRow>,
    /// Smallest `C` with `deviation(k) <= C ε_k` on every evaluated row.
    pub constant: Scalar,
    pub skipped: usize,
}

impl WitnessTable {
    /// `deviation(k+1) / deviation(k)` for consecutive evaluated rows with
    /// nonzero deviation.
    pub fn ratios(&self) -> Vec<(u32, Scalar)> {
        self.rows
            .windows(2)
            .filter_map(|w| match (&w[0].deviation, &w[1].deviation) {
                (Some(a), Some(b)) if !a.is_zero() => Some((w[0].k, b.checked_div(a).ok()?)),
                _ => None,
            })
            .collect()
    }
}

fn eval_in_x(c: &Circuit, u: &[Scalar]) -> Result<Vec<SparsePoly>, SemanticsError> {
    let n = c.inputs();
    let vals = evaluate::<SparsePoly>(
        c,
        |_, op| {
            Ok(match op {
                Op::Scalar(s) => SparsePoly::constant(n, s.clone()),
                Op::Param(i) => SparsePoly::constant(n, u[*i].clone()),
                Op::Input(j) => SparsePoly::var(n, *j),
                _ => unreachable!("leaf"),
            })
        },
        |_, _| Ok(()),
    )?;
    Ok(c.outputs().iter().map(|&o| vals[o].clone()).collect())
}

fn max_deviation(g: &[SparsePoly], h: &[SparsePoly]) -> Scalar {
    g.iter().zip(h).flat_map(|(a, b)| (a - b).terms().map(|(_, c)| c.abs()).collect::<Vec<_>>()).max().unwrap_or_default()
}

/// Evaluates `c` exactly at `u(2^{-k})` for `k = 1..k_max` and measures the
/// distance to the limit. A constant germ gives a single row.
pub fn convergence_witness(c: &Circuit, inst: &ApproxInstance, k_max: u32) -> Result<WitnessTable, ApproxError> {
    let h = represents(c, inst)?;
    let ks: Vec<u32> = if inst.is_constant() { vec![1] } else { (1..=k_max).collect() };
    let rows: Vec<WitnessRow> = ks
        .par_iter()
        .map(|&k| {
            let eps = Scalar::pow2(-(k as i64));
            let u: Result<Vec<Scalar>, _> = inst.germs.iter().map(|g| g.at(&eps)).collect();
            let res = u.map_err(|e| e.to_string()).and_then(|u| eval_in_x(c, &u).map_err(|e| e.to_string()));
            match res {
                Ok(g) => WitnessRow { k, eps, deviation: Some(max_deviation(&g, &h)), failure: None },
                Err(f) => WitnessRow { k, eps, deviation: None, failure: Some(f) },
            }
        })
        .collect();
    let skipped = rows.iter().filter(|r| r.deviation.is_none()).count();
    if skipped == rows.len() {
        return Err(ApproxError::AllPointsFailed);
    }
    let constant = rows
        .iter()
        .filter_map(|r| r.deviation.as_ref().map(|d| d.checked_div(&r.eps).expect("eps > 0")))
        .max()
        .unwrap_or_default();
    Ok(WitnessTable { h, rows, constant, skipped })
}
