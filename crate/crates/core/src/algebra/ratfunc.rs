//! Rational functions as numerator/denominator pairs of sparse polynomials.

use std::fmt;

use super::{AlgebraError, Scalar, SparsePoly};

/// `num / den` with `den` not identically zero.
///
/// Kept in a light normal form: the denominator's leading coefficient is one,
/// common monomial factors are cancelled, and the fraction collapses to a
/// polynomial whenever the denominator divides the numerator exactly. No
/// general gcd is taken, so two equal functions may have different
/// representations; compare with `==`, which cross-multiplies.
#[derive(Clone)]
pub struct RatFunc {
    num: SparsePoly,
    den: SparsePoly,
}

impl RatFunc {
    pub fn new(num: SparsePoly, den: SparsePoly) -> Result<Self, AlgebraError> {
        if num.nvars() != den.nvars() {
            return Err(AlgebraError::ArityMismatch { expected: num.nvars(), found: den.nvars() });
        }
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(RatFunc { num, den }.normalized())
    }

    pub fn from_poly(p: SparsePoly) -> Self {
        let n = p.nvars();
        RatFunc { num: p, den: SparsePoly::one(n) }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Self::from_poly(SparsePoly::constant(nvars, c))
    }

    pub fn numer(&self) -> &SparsePoly {
        &self.num
    }

    pub fn denom(&self) -> &SparsePoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial this function equals, if the normal form found one.
    pub fn as_poly(&self) -> Option<&SparsePoly> {
        if self.den.is_constant() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn term_count(&self) -> usize {
        self.num.term_count() + self.den.term_count()
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.den = SparsePoly::one(self.num.nvars());
            return self;
        }
        if let Some(c) = self.den.as_constant() {
            let inv = c.inv().expect("nonzero denominator");
            self.num = self.num.scale(&inv);
            self.den = SparsePoly::one(self.num.nvars());
            return self;
        }
        let mn = self.num.monomial_content();
        let md = self.den.monomial_content();
        let common: Vec<u32> = mn.iter().zip(&md).map(|(a, b)| *a.min(b)).collect();
        if common.iter().any(|&d| d > 0) {
            self.num = self.num.div_monomial(&common);
            self.den = self.den.div_monomial(&common);
        }
        if let Some(q) = self.num.div_exact(&self.den) {
            let n = q.nvars();
            return RatFunc { num: q, den: SparsePoly::one(n) };
        }
        let lc = self.den.leading_term().map(|(_, c)| c.clone()).expect("nonzero");
        if !lc.is_one() {
            let inv = lc.inv().expect("nonzero");
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
        self
    }

    pub fn try_add(&self, o: &RatFunc) -> Result<RatFunc, AlgebraError> {
        if self.den == o.den {
            return RatFunc::new(self.num.try_add(&o.num)?, self.den.clone());
        }
        let num = self.num.try_mul(&o.den)?.try_add(&o.num.try_mul(&self.den)?)?;
        RatFunc::new(num, self.den.try_mul(&o.den)?)
    }

    pub fn try_sub(&self, o: &RatFunc) -> Result<RatFunc, AlgebraError> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &RatFunc) -> Result<RatFunc, AlgebraError> {
        RatFunc::new(self.num.try_mul(&o.num)?, self.den.try_mul(&o.den)?)
    }

    /// Fails with `DivisionByZero` when `o` is the zero function.
    pub fn try_div(&self, o: &RatFunc) -> Result<RatFunc, AlgebraError> {
        if o.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        RatFunc::new(self.num.try_mul(&o.den)?, self.den.try_mul(&o.num)?)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar, AlgebraError> {
        let d = self.den.eval(point)?;
        self.num.eval(point)?.checked_div(&d)
    }

    /// Replaces variable `i` by `images[i]` in numerator and denominator.
    pub fn compose(&self, images: &[SparsePoly]) -> Result<RatFunc, AlgebraError> {
        RatFunc::new(self.num.compose(images)?, self.den.compose(images)?)
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, o: &Self) -> bool {
        self.nvars() == o.nvars() && &self.num * &o.den == &o.num * &self.den
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_over_linear_collapses() {
        let x = SparsePoly::var(1, 0);
        let r = RatFunc::new(&x * &x, x.clone()).unwrap();
        assert_eq!(r.as_poly(), Some(&x));
    }

    #[test]
    fn division_by_zero_function() {
        let x = RatFunc::from_poly(SparsePoly::var(1, 0));
        let z = x.try_sub(&x).unwrap();
        assert!(z.is_zero());
        assert!(matches!(x.try_div(&z), Err(AlgebraError::DivisionByZero)));
    }

    #[test]
    fn equality_by_cross_multiplication() {
        let u = SparsePoly::var(2, 0);
        let x = SparsePoly::var(2, 1);
        let a = RatFunc::new(x.clone(), u.clone()).unwrap();
        let b = RatFunc::new(&x * &(&u + &SparsePoly::one(2)), &u * &(&u + &SparsePoly::one(2))).unwrap();
        assert_eq!(a, b);
        assert!(a.as_poly().is_none());
    }
}
