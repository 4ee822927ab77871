//! Exact dense matrices over the rationals: rank, determinant, inverse.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{AlgebraError, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if let Some(bad) = rows.iter().find(|x| x.len() != c) {
            return Err(AlgebraError::ArityMismatch { expected: c, found: bad.len() });
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, AlgebraError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| Scalar::from(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Rows scaled by the lcm of their denominators, as integers.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect()
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix, AlgebraError> {
        if self.cols != o.rows {
            return Err(AlgebraError::ArityMismatch { expected: self.cols, found: o.rows });
        }
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a * &o[(k, j)];
                    out[(i, j)] += &t;
                }
            }
        }
        Ok(out)
    }

    /// Inverse by fraction-free Gauss-Jordan elimination on `[A | I]` after
    /// clearing row denominators; every division is exact.
    pub fn inverse(&self) -> Result<Matrix, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::ArityMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let scales: Vec<BigInt> =
            (0..n).map(|i| self.row(i).iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))).collect();
        let mut a: Vec<Vec<BigInt>> = self
            .integer_rows()
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
                r
            })
            .collect();
        let mut prev = BigInt::one();
        for k in 0..n {
            let piv = (k..n).find(|&r| !a[r][k].is_zero()).ok_or(AlgebraError::Singular)?;
            a.swap(k, piv);
            let pivot_row = a[k].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i == k {
                    continue;
                }
                let f = row[k].clone();
                for j in 0..2 * n {
                    if j != k {
                        row[j] = (&pivot_row[k] * &row[j] - &f * &pivot_row[j]) / &prev;
                    }
                }
                row[k] = BigInt::zero();
            }
            prev = pivot_row[k].clone();
        }
        // left block is now prev * I
        let rows = (0..n)
            .map(|i| (0..n).map(|j| Scalar::new(&a[i][n + j] * &scales[j], prev.clone()).expect("nonzero")).collect())
            .collect();
        Matrix::from_rows(rows)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

/// Rank over the rationals.
///
/// The rank modulo a prime never exceeds the rational rank, so if some prime
/// already yields full rank the answer is proved. Otherwise the result comes
/// from fraction-free (Bareiss) elimination over the integers.
pub fn exact_rank(m: &Matrix) -> usize {
    let full = m.rows.min(m.cols);
    if full == 0 {
        return 0;
    }
    let ints = m.integer_rows();
    for &p in MODULI {
        if rank_mod_p(&ints, p) == full {
            return full;
        }
    }
    bareiss_rank(ints)
}

/// Rank by fraction-free elimination alone, without the modular shortcut.
pub fn exact_rank_bareiss(m: &Matrix) -> usize {
    bareiss_rank(m.integer_rows())
}

/// Determinant by fraction-free elimination.
pub fn determinant(m: &Matrix) -> Result<Scalar, AlgebraError> {
    if m.rows != m.cols {
        return Err(AlgebraError::ArityMismatch { expected: m.rows, found: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Scalar::one());
    }
    // undo the row scaling afterwards
    let scale: Scalar = (0..n)
        .map(|i| Scalar::from_int(m.row(i).iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))))
        .product();
    let mut a = m.integer_rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Ok(Scalar::zero());
        };
        if piv != k {
            a.swap(piv, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = Scalar::from_int(sign * &a[n - 1][n - 1]);
    det.checked_div(&scale)
}

fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(piv, rank);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = (&a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

const MODULI: &[u64] = &[2_305_843_009_213_693_951, 18_446_744_073_709_551_557, 1_000_000_007];

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn reduce(x: &BigInt, p: u64) -> u64 {
    let pb = BigInt::from(p);
    let mut r = x % &pb;
    if r.is_negative() {
        r += &pb;
    }
    r.to_u64().expect("residue fits in u64")
}

fn rank_mod_p(ints: &[Vec<BigInt>], p: u64) -> usize {
    let mut a: Vec<Vec<u64>> = ints.iter().map(|r| r.iter().map(|x| reduce(x, p)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(piv, rank);
        let inv = pow_mod(a[rank][col], p - 2, p);
        for i in rank + 1..rows {
            if a[i][col] == 0 {
                continue;
            }
            let f = mul_mod(a[i][col], inv, p);
            for j in col..cols {
                let t = mul_mod(f, a[rank][j], p);
                a[i][j] = ((a[i][j] as u128 + p as u128 - t as u128) % p as u128) as u64;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_rows(vec![
            vec![Scalar::new(1, 2).unwrap(), Scalar::from(3), Scalar::from(0)],
            vec![Scalar::from(0), Scalar::from(0), Scalar::new(-5, 3).unwrap()],
            vec![Scalar::from(4), Scalar::from(1), Scalar::from(7)],
        ])
        .unwrap();
        assert_eq!(m.mul(&m.inverse().unwrap()).unwrap(), Matrix::identity(3));
        assert_eq!(m.inverse().unwrap().mul(&m).unwrap(), Matrix::identity(3));
        let s = Matrix::from_i64(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(s.inverse(), Err(AlgebraError::Singular));
    }

    #[test]
    fn small_rank_examples() {
        let m = Matrix::from_i64(&[&[-1, 1], &[-2, 1]]).unwrap();
        assert_eq!(exact_rank(&m), 2);
        assert_eq!(exact_rank(&Matrix::zeros(3, 3)), 0);
        assert_eq!(exact_rank(&Matrix::identity(5)), 5);
    }

    #[test]
    fn deficient_matrix_goes_through_bareiss() {
        let m = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]).unwrap();
        assert_eq!(exact_rank(&m), 2);
        assert_eq!(exact_rank_bareiss(&m), 2);
    }

    #[test]
    fn rectangular_and_rational() {
        let half = Scalar::new(1, 2).unwrap();
        let m = Matrix::from_rows(vec![
            vec![half.clone(), Scalar::one(), Scalar::zero(), Scalar::one()],
            vec![Scalar::one(), Scalar::from(2), Scalar::zero(), Scalar::from(2)],
        ])
        .unwrap();
        assert_eq!(exact_rank(&m), 1);
    }

    #[test]
    fn determinant_and_inverse() {
        let m = Matrix::from_i64(&[&[2, 1], &[7, 4]]).unwrap();
        assert_eq!(determinant(&m).unwrap(), Scalar::one());
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(2));
        let sing = Matrix::from_i64(&[&[1, 2], &[2, 4]]).unwrap();
        assert!(matches!(sing.inverse(), Err(AlgebraError::Singular)));
    }

    #[test]
    fn rank_mod_p_can_undercount() {
        // determinant 1_000_000_007: singular mod that prime only
        let m = Matrix::from_i64(&[&[1_000_000_007, 0], &[0, 1]]).unwrap();
        let ints = m.integer_rows();
        assert_eq!(rank_mod_p(&ints, 1_000_000_007), 1);
        assert_eq!(exact_rank(&m), 2);
    }
}
