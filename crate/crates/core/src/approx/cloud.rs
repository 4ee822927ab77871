//! Sampled coefficient vectors of final results.

use serde::Serialize;

use super::{eval_in_x, ApproxError};
use crate::algebra::{Monomial, Scalar, SparsePoly};
use crate::circuit::{Circuit, ParameterDomain, DEFAULT_SAMPLE_BOUND};
use crate::semantics::trial_rng;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientCloud {
    pub nvars: usize,
    pub outputs: usize,
    pub degree: u32,
    /// Monomials of total degree at most `degree`, in graded order.
    pub basis: Vec<Monomial>,
    pub seed: u64,
    /// Parameter points behind each cloud point.
    pub params: Vec<Vec<Scalar>>,
    pub points: Vec<Vec<Scalar>>,
}

fn monomials(nvars: usize, degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=degree {
        let mut cur = vec![0u32; nvars];
        fill(&mut cur, 0, d, &mut out);
    }
    out
}

fn fill(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Monomial>) {
    if i + 1 >= cur.len() {
        if let Some(last) = cur.last_mut() {
            *last = left;
            out.push(cur.clone());
        } else if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        fill(cur, i + 1, left - e, out);
    }
}

impl CoefficientCloud {
    pub fn arity(&self) -> usize {
        self.outputs * self.basis.len()
    }

    /// Coefficient vector of one final result, outputs concatenated.
    pub fn coordinates(&self, polys: &[SparsePoly]) -> Result<Vec<Scalar>, ApproxError> {
        if polys.len() != self.outputs {
            return Err(ApproxError::Arity { what: "outputs", expected: self.outputs, found: polys.len() });
        }
        let mut v = Vec::with_capacity(self.arity());
        for p in polys {
            if p.nvars() != self.nvars {
                return Err(ApproxError::Arity { what: "variables", expected: self.nvars, found: p.nvars() });
            }
            if p.total_degree() > self.degree {
                return Err(ApproxError::DegreeBound { degree: self.degree });
            }
            v.extend(self.basis.iter().map(|m| p.coeff(m)));
        }
        Ok(v)
    }
}

/// Evaluates `c` at `samples` seeded domain points, skipping points where a
/// division fails. Sample `i` uses stream `i`, so a larger cloud extends a
/// smaller one.
pub fn sample_cloud(
    c: &Circuit,
    domain: &ParameterDomain,
    degree: u32,
    samples: usize,
    seed: u64,
) -> Result<CoefficientCloud, ApproxError> {
    if domain.dim() != c.params() {
        return Err(ApproxError::Arity { what: "domain coordinates", expected: c.params(), found: domain.dim() });
    }
    let mut cloud = CoefficientCloud {
        nvars: c.inputs(),
        outputs: c.outputs().len(),
        degree,
        basis: monomials(c.inputs(), degree),
        seed,
        params: Vec::new(),
        points: Vec::new(),
    };
    for i in 0..samples as u64 {
        let mut rng = trial_rng(seed, i);
        let u = domain.sample(&mut rng, DEFAULT_SAMPLE_BOUND, 16).map_err(crate::semantics::SemanticsError::from)?;
        let Ok(g) = eval_in_x(c, &u) else { continue };
        let v = cloud.coordinates(&g)?;
        cloud.params.push(u);
        cloud.points.push(v);
    }
    Ok(cloud)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CloudMembership {
    pub size: usize,
    pub nearest: usize,
    /// Max-norm distance to the nearest cloud point, exact.
    pub distance: Scalar,
    pub distance_f64: f64,
    pub within_radius: bool,
}

pub fn cloud_membership(cloud: &CoefficientCloud, h: &[Scalar], radius: &Scalar) -> Result<CloudMembership, ApproxError> {
    if h.len() != cloud.arity() {
        return Err(ApproxError::Arity { what: "coefficients", expected: cloud.arity(), found: h.len() });
    }
    let (nearest, distance) = cloud
        .points
        .iter()
        .map(|p| p.iter().zip(h).map(|(a, b)| (a - b).abs()).max().unwrap_or_default())
        .enumerate()
        .min_by(|a, b| a.1.cmp(&b.1))
        .ok_or(ApproxError::EmptyCloud)?;
    Ok(CloudMembership {
        size: cloud.points.len(),
        nearest,
        distance_f64: distance.to_f64(),
        within_radius: distance <= *radius,
        distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;

    /// `X^2 + ((π₂ - π₁)/π₁) X`.
    fn drift() -> Circuit {
        let mut b = CircuitBuilder::new(2, 1);
        let x = b.input(0);
        let p1 = b.param(0);
        let p2 = b.param(1);
        let d = b.sub(p2, p1);
        let q = b.div(d, p1);
        let sq = b.mul(x, x);
        let qx = b.mul(q, x);
        let y = b.add(sq, qx);
        b.finish(vec![y]).unwrap()
    }

    #[test]
    fn basis_is_graded() {
        assert_eq!(monomials(2, 1), vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert_eq!(monomials(1, 2).len(), 3);
    }

    #[test]
    fn members_and_limits() {
        let c = drift();
        let d = ParameterDomain::affine(2);
        let small = sample_cloud(&c, &d, 2, 10, 3).unwrap();
        let own = small.points[4].clone();
        assert!(cloud_membership(&small, &own, &Scalar::zero()).unwrap().distance.is_zero());
        let h = small.coordinates(&[SparsePoly::monomial(vec![2], Scalar::one())]).unwrap();
        let big = sample_cloud(&c, &d, 2, 200, 3).unwrap();
        let ds = cloud_membership(&small, &h, &Scalar::one()).unwrap().distance;
        let db = cloud_membership(&big, &h, &Scalar::one()).unwrap().distance;
        assert!(db <= ds);
        assert!(matches!(cloud_membership(&big, &h[..2], &Scalar::one()), Err(ApproxError::Arity { .. })));
        let empty = sample_cloud(&c, &d, 2, 0, 3).unwrap();
        assert_eq!(cloud_membership(&empty, &h, &Scalar::one()), Err(ApproxError::EmptyCloud));
    }
}
