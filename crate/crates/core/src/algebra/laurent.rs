//! Truncated Laurent series in one indeterminate ε with explicit precision.
//!
//! A series is stored as its order `o` and the known coefficients
//! `c_o, ..., c_{o+N-1}`; everything from `ε^{o+N}` on is unknown. The zero
//! element carries no coefficients and is only known up to `ε^{o}`.

use std::fmt;

use super::{AlgebraError, Scalar, SparsePoly};

/// Coefficient ring of a [`TruncatedLaurent`] series.
pub trait SeriesCoeff: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, when it exists in the coefficient ring.
    fn inverse(&self) -> Option<Self>;
}

impl SeriesCoeff for Scalar {
    fn zero_like(&self) -> Self {
        Scalar::zero()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        self.inv().ok()
    }
}

impl SeriesCoeff for SparsePoly {
    fn zero_like(&self) -> Self {
        SparsePoly::zero(self.nvars())
    }
    fn is_zero(&self) -> bool {
        SparsePoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    /// Only nonzero constants are units of the polynomial ring.
    fn inverse(&self) -> Option<Self> {
        let c = self.as_constant()?;
        Some(SparsePoly::constant(self.nvars(), c.inv().ok()?))
    }
}

#[derive(Clone, PartialEq)]
pub struct TruncatedLaurent<C: SeriesCoeff> {
    order: i64,
    coeffs: Vec<C>,
    zero: C,
}

impl<C: SeriesCoeff> TruncatedLaurent<C> {
    /// Series `Σ coeffs[k] ε^{order+k}`, known up to `ε^{order+coeffs.len()}`.
    pub fn new(order: i64, coeffs: Vec<C>, zero: C) -> Self {
        TruncatedLaurent { order, coeffs, zero }.normalized()
    }

    /// The zero element known up to (excluding) `ε^abs_precision`.
    pub fn zero(abs_precision: i64, zero: C) -> Self {
        TruncatedLaurent { order: abs_precision, coeffs: Vec::new(), zero }
    }

    /// A constant with `precision` known terms.
    pub fn constant(c: C, precision: usize) -> Self {
        let zero = c.zero_like();
        let mut coeffs = vec![zero.clone(); precision];
        if precision > 0 {
            coeffs[0] = c;
        }
        Self::new(0, coeffs, zero)
    }

    /// An exact Laurent polynomial padded with zeros to `precision` terms.
    pub fn from_polynomial(order: i64, mut coeffs: Vec<C>, zero: C, precision: usize) -> Self {
        if coeffs.len() < precision {
            coeffs.resize(precision, zero.clone());
        }
        Self::new(order, coeffs, zero)
    }

    fn normalized(mut self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.order += lead as i64;
        }
        self
    }

    /// True if no known coefficient is nonzero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation of the series; for the zero element, its absolute precision.
    pub fn order(&self) -> i64 {
        self.order
    }

    /// Number of known terms starting at the order.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    /// Exponent of the first unknown term.
    pub fn abs_precision(&self) -> i64 {
        self.order + self.coeffs.len() as i64
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn zero_coeff(&self) -> &C {
        &self.zero
    }

    /// Coefficient of `ε^k`; `None` if `k` lies beyond the known precision.
    pub fn coeff(&self, k: i64) -> Option<C> {
        if k >= self.abs_precision() {
            None
        } else if k < self.order {
            Some(self.zero.clone())
        } else {
            Some(self.coeffs[(k - self.order) as usize].clone())
        }
    }

    fn get(&self, k: i64) -> C {
        self.coeff(k).unwrap_or_else(|| self.zero.clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        let abs = self.abs_precision().min(o.abs_precision());
        let lo = self.order.min(o.order);
        if abs <= lo {
            return Self::zero(abs, self.zero.clone());
        }
        let coeffs = (lo..abs).map(|k| self.get(k).add(&o.get(k))).collect();
        Self::new(lo, coeffs, self.zero.clone())
    }

    pub fn neg(&self) -> Self {
        TruncatedLaurent {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            zero: self.zero.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (self.is_zero(), o.is_zero()) {
            (true, true) => return Self::zero(self.order + o.order, self.zero.clone()),
            (true, false) => return Self::zero(self.order + o.order, self.zero.clone()),
            (false, true) => return Self::zero(self.order + o.order, self.zero.clone()),
            _ => {}
        }
        let len = self.precision().min(o.precision());
        let coeffs = (0..len)
            .map(|k| {
                let mut acc = self.zero.clone();
                for i in 0..=k {
                    acc = acc.add(&self.coeffs[i].mul(&o.coeffs[k - i]));
                }
                acc
            })
            .collect();
        Self::new(self.order + o.order, coeffs, self.zero.clone())
    }

    /// Reciprocal series; fails if the series is zero within its precision or
    /// its leading coefficient is not a unit.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::PrecisionExhausted { abs_precision: self.order });
        }
        let lead_inv = self.coeffs[0].inverse().ok_or(AlgebraError::NonInvertibleCoefficient)?;
        let len = self.precision();
        let mut inv: Vec<C> = Vec::with_capacity(len);
        inv.push(lead_inv.clone());
        for k in 1..len {
            let mut acc = self.zero.clone();
            for j in 1..=k {
                acc = acc.add(&self.coeffs[j].mul(&inv[k - j]));
            }
            inv.push(acc.mul(&lead_inv).neg());
        }
        Ok(Self::new(-self.order, inv, self.zero.clone()))
    }

    /// `self / o`; the order drops by `order(o)` and the precision is the
    /// smaller of the two operands'.
    pub fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        let inv = o.inverse()?;
        Ok(self.mul(&inv))
    }

    /// Drops terms so that at most `precision` coefficients remain.
    pub fn truncate(&self, precision: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(precision);
        s
    }

    pub fn map<D: SeriesCoeff>(&self, f: impl Fn(&C) -> D, zero: D) -> TruncatedLaurent<D> {
        TruncatedLaurent::new(self.order, self.coeffs.iter().map(f).collect(), zero)
    }
}

impl TruncatedLaurent<Scalar> {
    /// Sums the known terms at `ε = eps`; exact when the series is a Laurent polynomial.
    pub fn eval_known(&self, eps: &Scalar) -> Result<Scalar, AlgebraError> {
        let mut acc = Scalar::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.order + i as i64;
            let p = if k >= 0 { eps.pow(k as u32) } else { eps.pow((-k) as u32).inv()? };
            acc += &(c * &p);
        }
        Ok(acc)
    }

    pub fn scalar_constant(c: Scalar, precision: usize) -> Self {
        Self::constant(c, precision)
    }
}

impl<C: SeriesCoeff> fmt::Debug for TruncatedLaurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O(eps^{})", self.order);
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("({:?})*eps^{}", c, self.order + i as i64));
            }
        }
        write!(f, "{} + O(eps^{})", parts.join(" + "), self.abs_precision())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from(v)
    }

    fn series(order: i64, c: &[i64], n: usize) -> TruncatedLaurent<Scalar> {
        TruncatedLaurent::from_polynomial(order, c.iter().map(|&v| s(v)).collect(), Scalar::zero(), n)
    }

    #[test]
    fn eps_over_eps_is_one() {
        let e = series(1, &[1], 8);
        let q = e.div(&e).unwrap();
        assert_eq!(q.order(), 0);
        assert_eq!(q.coeff(0), Some(s(1)));
        assert!(q.coeffs()[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn long_division_shifts_order() {
        let a = series(0, &[1, 1], 8);
        let b = series(1, &[1], 8);
        let q = a.div(&b).unwrap();
        assert_eq!(q.order(), -1);
        assert_eq!(q.coeff(-1), Some(s(1)));
        assert_eq!(q.coeff(0), Some(s(1)));
        assert_eq!(q.coeff(1), Some(s(0)));
    }

    #[test]
    fn polynomial_coefficients_divide_by_scalar_series() {
        let x = SparsePoly::var(1, 0);
        let z = SparsePoly::zero(1);
        let num = TruncatedLaurent::from_polynomial(2, vec![&x * &x], z.clone(), 6);
        let den = TruncatedLaurent::from_polynomial(2, vec![SparsePoly::one(1)], z, 6);
        let q = num.div(&den).unwrap();
        assert_eq!(q.order(), 0);
        assert_eq!(q.coeff(0), Some(&x * &x));
    }

    #[test]
    fn precision_exhaustion() {
        let a = series(0, &[1, -1], 2);
        let z = a.sub(&a);
        assert!(z.is_zero());
        assert!(matches!(series(0, &[1], 4).div(&z), Err(AlgebraError::PrecisionExhausted { .. })));
    }

    #[test]
    fn precision_is_minimum_of_operands() {
        let a = series(0, &[1, 2, 3], 3);
        let b = series(0, &[1, 1, 1, 1, 1], 5);
        assert_eq!(a.mul(&b).precision(), 3);
        assert_eq!(a.add(&b).abs_precision(), 3);
        // cancellation loses relative precision but keeps absolute precision
        let c = series(0, &[1, 5], 4);
        let d = series(0, &[1, 2], 4);
        let diff = c.sub(&d);
        assert_eq!(diff.order(), 1);
        assert_eq!(diff.abs_precision(), 4);
    }

    #[test]
    fn eval_known_terms() {
        let a = series(-1, &[1, 1], 2);
        assert_eq!(a.eval_known(&Scalar::new(1, 2).unwrap()).unwrap(), s(3));
    }
}
