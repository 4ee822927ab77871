//! The eliminant `F⁽ⁿ⁾ = ∏_j (Y - (j + T ∏ U_i^{[j]_i}))` and its first-order
//! jets in `T`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::build_h;
use crate::algebra::{Scalar, SparsePoly};
use crate::circuit::Circuit;
use crate::semantics::{eval_outputs, SemanticsError};

/// Largest `n` accepted by pointwise evaluation of `F`.
pub const EVAL_F_CEILING: usize = 10;
/// Largest `n` accepted by the jet computation.
pub const JET_CEILING: usize = 7;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FamilyError {
    #[error("n = {n} exceeds the ceiling {ceiling}")]
    Ceiling { n: usize, ceiling: usize },
    #[error("expected {expected} coordinates, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("no identification point set for n = {n} passed after {attempts} attempts")]
    Identification { n: usize, attempts: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

fn check(n: usize, u: &[Scalar], ceiling: usize) -> Result<(), FamilyError> {
    if n > ceiling {
        return Err(FamilyError::Ceiling { n, ceiling });
    }
    if u.len() != n {
        return Err(FamilyError::Arity { expected: n, found: u.len() });
    }
    Ok(())
}

/// `H⁽ⁿ⁾(t, u, x)` straight from its definition.
pub fn h_value(t: &Scalar, u: &[Scalar], x: &[Scalar]) -> Scalar {
    let mut lin = Scalar::zero();
    let mut prod = Scalar::one();
    for (i, (ui, xi)) in u.iter().zip(x).enumerate() {
        lin += &(&Scalar::pow2(i as i64) * xi);
        prod *= &(Scalar::one() + &(&(ui - &Scalar::one()) * xi));
    }
    lin + t * &prod
}

/// `∏ u_i^{[j]_i}` with `[j]_i` the `i`-th least significant bit of `j`.
pub(crate) fn root_monomial(u: &[Scalar], j: usize) -> Scalar {
    u.iter().enumerate().filter(|(i, _)| (j >> i) & 1 == 1).map(|(_, v)| v.clone()).product()
}

fn dense_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn integer_product(factors: &[(BigInt, BigInt)]) -> Vec<BigInt> {
    match factors.len() {
        0 => vec![BigInt::one()],
        1 => vec![-&factors[0].0, factors[0].1.clone()],
        k => {
            let (l, r) = factors.split_at(k / 2);
            dense_mul(&integer_product(l), &integer_product(r))
        }
    }
}

/// Coefficients (constant term first) of `∏ (Y - r)`. Each factor is scaled
/// to `q Y - p` for `r = p/q`; the integer product is divided by `∏ q` at the end.
pub fn product_of_roots(roots: &[Scalar]) -> Vec<Scalar> {
    let factors: Vec<(BigInt, BigInt)> = roots.iter().map(|r| (r.numer().clone(), r.denom().clone())).collect();
    let scale: BigInt = factors.iter().map(|f| &f.1).product();
    integer_product(&factors).into_iter().map(|c| Scalar::new(c, scale.clone()).expect("nonzero")).collect()
}

/// `F⁽ⁿ⁾(t, u, Y)` as a univariate polynomial.
pub fn eval_f(n: usize, t: &Scalar, u: &[Scalar]) -> Result<SparsePoly, FamilyError> {
    check(n, u, EVAL_F_CEILING)?;
    let roots: Vec<Scalar> = (0..1usize << n).map(|j| Scalar::from(j) + t * &root_monomial(u, j)).collect();
    Ok(SparsePoly::from_dense_univariate(&product_of_roots(&roots)))
}

/// First-order data of `F = Y^{2^n} + Σ φ_κ Y^{2^n - κ}` in `T` at a point
/// `u`: `lambda[κ-1] = φ_κ(0, u)` and `l[κ-1] = ∂φ_κ/∂T (0, u)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Jet {
    pub n: usize,
    pub lambda: Vec<Scalar>,
    pub l: Vec<Scalar>,
}

/// Multiplies the root factors `(Y - j) - T m_j(u)` modulo `T^2`, keeping
/// the pair `(A, B)` of `A + T B`.
pub fn f_coeff_t_jet(n: usize, u: &[Scalar]) -> Result<Jet, FamilyError> {
    f_coeff_t_jet_capped(n, u, JET_CEILING)
}

/// `f_coeff_t_jet` with an explicit ceiling.
pub fn f_coeff_t_jet_capped(n: usize, u: &[Scalar], ceiling: usize) -> Result<Jet, FamilyError> {
    check(n, u, ceiling)?;
    let d = 1usize << n;
    // factor j scaled by the denominator q of m_j: (q Y - q j) - T p
    let mut a = vec![BigInt::zero(); d + 1];
    let mut b = vec![BigInt::zero(); d + 1];
    a[0] = BigInt::one();
    let mut scale = BigInt::one();
    for j in 0..d {
        let m = root_monomial(u, j);
        let (p, q) = (m.numer(), m.denom());
        let qj = q * BigInt::from(j);
        for k in (0..=j + 1).rev() {
            let (hi_a, hi_b) = if k > 0 { (q * &a[k - 1], q * &b[k - 1]) } else { (BigInt::zero(), BigInt::zero()) };
            let new_b = hi_b - &qj * &b[k] - p * &a[k];
            let new_a = hi_a - &qj * &a[k];
            a[k] = new_a;
            b[k] = new_b;
        }
        scale *= q;
    }
    let to_scalar = |v: &BigInt| Scalar::new(v.clone(), scale.clone()).expect("nonzero");
    let lambda = (1..=d).map(|kappa| to_scalar(&a[d - kappa])).collect();
    let l = (1..=d).map(|kappa| to_scalar(&b[d - kappa])).collect();
    Ok(Jet { n, lambda, l })
}

/// `∏_{ε ∈ {0,1}^n} (Y - H(t, u, ε))` with `H` evaluated through `circuit`.
pub(crate) fn boolean_product(circuit: &Circuit, n: usize, t: &Scalar, u: &[Scalar]) -> Result<Vec<Scalar>, FamilyError> {
    let mut params = vec![t.clone()];
    params.extend_from_slice(u);
    let mut roots = Vec::with_capacity(1 << n);
    for e in 0..1usize << n {
        let x: Vec<Scalar> = (0..n).map(|i| Scalar::from((e >> i) & 1)).collect();
        roots.push(eval_outputs(circuit, &params, &x)?.remove(0));
    }
    Ok(product_of_roots(&roots))
}

/// Checks `∏_ε (Y - H(t, u, ε)) = F⁽ⁿ⁾(t, u, Y)` exactly.
pub fn verify_elimination_identity(n: usize, t: &Scalar, u: &[Scalar]) -> Result<bool, FamilyError> {
    check(n, u, EVAL_F_CEILING)?;
    let lhs = SparsePoly::from_dense_univariate(&boolean_product(&build_h(n), n, t, u)?);
    Ok(lhs == eval_f(n, t, u)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from(v)
    }

    #[test]
    fn n1_jets() {
        for uv in [-3, 0, 1, 4] {
            let j = f_coeff_t_jet(1, &[s(uv)]).unwrap();
            assert_eq!(j.lambda, vec![s(-1), s(0)]);
            assert_eq!(j.l, vec![-(s(1) + s(uv)), s(1)]);
        }
    }

    #[test]
    fn n1_identity_and_eliminant() {
        let (t, u) = (Scalar::new(3, 7).unwrap(), s(-5));
        assert!(verify_elimination_identity(1, &t, &[u.clone()]).unwrap());
        let f = eval_f(1, &t, &[u.clone()]).unwrap().to_dense_univariate().unwrap();
        let tu = &t * &u;
        assert_eq!(f, vec![&t * &(s(1) + tu.clone()), -(s(1) + t.clone() + tu), s(1)]);
    }

    #[test]
    fn ceilings() {
        assert!(matches!(f_coeff_t_jet(8, &vec![s(1); 8]), Err(FamilyError::Ceiling { .. })));
        assert!(matches!(eval_f(2, &s(1), &[s(1)]), Err(FamilyError::Arity { .. })));
    }
}
