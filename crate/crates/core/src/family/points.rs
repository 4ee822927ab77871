//! Identification points and the encoding `Ξ(f) = (f(ξ_1), .., f(ξ_K))`.

use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;

use super::{h_value, point_count, FamilyError};
use crate::algebra::{Scalar, SparsePoly};
use crate::circuit::{sample_coordinate, ParameterDomain};
use crate::semantics::trial_rng;

/// `16n^2 + 2` points of `Z^n`, coordinates uniform in `[0, 2^{4n})`.
pub fn identification_points(n: usize, seed: u64) -> Vec<Vec<Scalar>> {
    let bits = 4 * n;
    let mut rng = trial_rng(seed, 0);
    let modulus = BigInt::from(1) << bits;
    (0..point_count(n))
        .map(|_| {
            (0..n)
                .map(|_| {
                    let mut v = BigInt::from(0);
                    for _ in 0..bits.div_ceil(64) {
                        v = (v << 64) + BigInt::from(rng.gen::<u64>());
                    }
                    Scalar::from_int(v % &modulus)
                })
                .collect()
        })
        .collect()
}

/// Coefficients `θ_κ` of `H(t, u, X)` on the multilinear monomials, `κ`
/// read as a bit mask over `X_1..X_n`.
pub fn coefficient_vector(t: &Scalar, u: &[Scalar]) -> Vec<Scalar> {
    let n = u.len();
    (0..1usize << n)
        .map(|k| {
            let mut c = t * &(0..n).filter(|i| (k >> i) & 1 == 1).map(|i| &u[i] - &Scalar::one()).product::<Scalar>();
            if k.count_ones() == 1 {
                c += &Scalar::pow2(k.trailing_zeros() as i64);
            }
            c
        })
        .collect()
}

pub fn xi(points: &[Vec<Scalar>], t: &Scalar, u: &[Scalar]) -> Vec<Scalar> {
    points.iter().map(|p| h_value(t, u, p)).collect()
}

/// `H(T, U, ξ_k)` as polynomials in `(T, U_1, .., U_n)`.
pub fn xi_polynomials(n: usize, points: &[Vec<Scalar>]) -> Vec<SparsePoly> {
    let nv = n + 1;
    let one = SparsePoly::one(nv);
    points
        .iter()
        .map(|p| {
            let mut lin = Scalar::zero();
            let mut prod = one.clone();
            for (i, x) in p.iter().enumerate() {
                lin += &(&Scalar::pow2(i as i64) * x);
                let f = &one + &(&SparsePoly::var(nv, i + 1) - &one).scale(x);
                prod = &prod * &f;
            }
            &SparsePoly::constant(nv, lin) + &(&SparsePoly::var(nv, 0) * &prod)
        })
        .collect()
}

/// The domain `Ξ(O)` as the image of `(t, u) ↦ Ξ(H(t, u, X))`.
pub fn xi_domain(n: usize, points: &[Vec<Scalar>]) -> ParameterDomain {
    ParameterDomain::Image { source_dim: n + 1, map: xi_polynomials(n, points) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentificationReport {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub max_bits: u64,
    pub bounds_ok: bool,
    /// Pairs with different polynomials.
    pub distinct_pairs: usize,
    /// Pairs with equal polynomials (whose encodings must agree).
    pub equal_pairs: usize,
    pub collisions: usize,
    pub pass: bool,
}

fn draw(rng: &mut rand_chacha::ChaCha8Rng, n: usize, wide: bool) -> (Scalar, Vec<Scalar>) {
    let bound = if wide { 1 << 16 } else { 1 };
    let t = sample_coordinate(rng, bound);
    (t, (0..n).map(|_| sample_coordinate(rng, bound)).collect())
}

/// Draws pairs `(t, u)`, `(t', u')` until `trials` pairs with different
/// polynomials `H(t, u, X) != H(t', u', X)` were seen, and counts those
/// whose encodings coincide. Half the draws use a tiny range so that equal
/// polynomials (for instance `t = 0`) also occur.
pub fn verify_identification(n: usize, points: &[Vec<Scalar>], trials: usize, seed: u64) -> IdentificationReport {
    let max_bits = points.iter().flatten().map(Scalar::numer_bits).max().unwrap_or(0);
    let bounds_ok = points.len() == point_count(n)
        && points.iter().all(|p| p.len() == n && p.iter().all(|c| c.is_integer() && *c >= Scalar::zero()))
        && max_bits <= 4 * n as u64;
    let (mut distinct, mut equal, mut collisions) = (0, 0, 0);
    let mut stream = 1u64;
    while distinct < trials && stream < 1 + 8 * trials as u64 {
        let mut rng = trial_rng(seed, stream);
        let wide = stream % 2 == 0;
        stream += 1;
        let (t1, u1) = draw(&mut rng, n, wide);
        let (t2, u2) = draw(&mut rng, n, wide);
        let same_poly = coefficient_vector(&t1, &u1) == coefficient_vector(&t2, &u2);
        let same_code = points.iter().all(|p| h_value(&t1, &u1, p) == h_value(&t2, &u2, p));
        if same_poly {
            equal += 1;
            if !same_code {
                collisions += 1;
            }
        } else {
            distinct += 1;
            if same_code {
                collisions += 1;
            }
        }
    }
    IdentificationReport {
        n,
        k: points.len(),
        seed,
        max_bits,
        bounds_ok,
        distinct_pairs: distinct,
        equal_pairs: equal,
        collisions,
        pass: bounds_ok && collisions == 0 && distinct == trials,
    }
}

/// Points that passed `verify_identification`, resampling with seeds
/// `seed, seed + 1, ..` up to `retries` times.
pub fn identification_points_verified(
    n: usize,
    seed: u64,
    trials: usize,
    retries: usize,
) -> Result<(Vec<Vec<Scalar>>, IdentificationReport), FamilyError> {
    for a in 0..=retries as u64 {
        let pts = identification_points(n, seed.wrapping_add(a));
        let rep = verify_identification(n, &pts, trials, seed.wrapping_add(a));
        if rep.pass {
            return Ok((pts, rep));
        }
    }
    Err(FamilyError::Identification { n, attempts: retries + 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_for_n2() {
        let pts = identification_points(2, 5);
        assert_eq!(pts.len(), 66);
        let lim = Scalar::from(256);
        assert!(pts.iter().flatten().all(|c| c.is_integer() && *c >= Scalar::zero() && *c < lim));
    }

    #[test]
    fn xi_example_and_polynomials() {
        let pts = vec![vec![Scalar::from(2)]];
        assert_eq!(xi(&pts, &Scalar::one(), &[Scalar::from(3)]), vec![Scalar::from(7)]);
        let p = &xi_polynomials(1, &pts)[0];
        assert_eq!(p.eval(&[Scalar::one(), Scalar::from(3)]).unwrap(), Scalar::from(7));
    }

    #[test]
    fn t_zero_forgets_u() {
        let pts = identification_points(2, 1);
        let z = Scalar::zero();
        assert_eq!(xi(&pts, &z, &[Scalar::from(4), Scalar::from(9)]), xi(&pts, &z, &[Scalar::from(-1), Scalar::from(2)]));
    }

    #[test]
    fn small_verification_passes() {
        let pts = identification_points(2, 3);
        let r = verify_identification(2, &pts, 50, 3);
        assert!(r.pass, "{r:?}");
        assert!(r.equal_pairs > 0);
    }
}
