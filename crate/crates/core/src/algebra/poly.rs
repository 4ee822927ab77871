//! Sparse multivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AlgebraError, Scalar};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

/// Sparse polynomial in `nvars` variables. Terms are kept in lexicographic
/// monomial order (variable 0 most significant); zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Scalar::one())
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The variable with index `i` (0-based).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for arity {nvars}");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Scalar::one())
    }

    pub fn monomial(exp: Monomial, c: Scalar) -> Self {
        let nvars = exp.len();
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging duplicates.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Result<Self, AlgebraError> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(AlgebraError::ArityMismatch { expected: nvars, found: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    /// The constant value, if the polynomial has no variable-dependent term.
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// True if any term has a positive exponent in one of `vars`.
    pub fn involves_any(&self, vars: impl Fn(usize) -> bool) -> bool {
        self.terms
            .keys()
            .any(|e| e.iter().enumerate().any(|(i, &d)| d > 0 && vars(i)))
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    fn check_arity(&self, other: &SparsePoly) -> Result<(), AlgebraError> {
        if self.nvars != other.nvars {
            return Err(AlgebraError::ArityMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &SparsePoly) -> Result<SparsePoly, AlgebraError> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &SparsePoly) -> Result<SparsePoly, AlgebraError> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &SparsePoly) -> Result<SparsePoly, AlgebraError> {
        self.check_arity(other)?;
        let mut out = SparsePoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.nvars);
        }
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut k: u32) -> SparsePoly {
        let mut base = self.clone();
        let mut acc = SparsePoly::one(self.nvars);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitutes every variable; `point.len()` must equal the arity.
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar, AlgebraError> {
        if point.len() != self.nvars {
            return Err(AlgebraError::ArityMismatch { expected: self.nvars, found: point.len() });
        }
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &d) in point.iter().zip(e) {
                if d > 0 {
                    t *= &x.pow(d);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Substitutes the variables given as `Some(value)`; the arity is unchanged.
    pub fn substitute(&self, values: &[Option<Scalar>]) -> Result<SparsePoly, AlgebraError> {
        if values.len() != self.nvars {
            return Err(AlgebraError::ArityMismatch { expected: self.nvars, found: values.len() });
        }
        let mut out = SparsePoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut coef = c.clone();
            let mut exp = e.clone();
            for (i, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    if exp[i] > 0 {
                        coef *= &v.pow(exp[i]);
                        exp[i] = 0;
                    }
                }
            }
            out.add_term(exp, coef);
        }
        Ok(out)
    }

    /// Replaces variable `i` by `images[i]`; all images share one target arity.
    pub fn compose(&self, images: &[SparsePoly]) -> Result<SparsePoly, AlgebraError> {
        if images.len() != self.nvars {
            return Err(AlgebraError::ArityMismatch { expected: self.nvars, found: images.len() });
        }
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        if let Some(bad) = images.iter().find(|p| p.nvars != target) {
            return Err(AlgebraError::ArityMismatch { expected: target, found: bad.nvars });
        }
        // cache powers per variable
        let mut powers: Vec<Vec<SparsePoly>> = images.iter().map(|p| vec![SparsePoly::one(target), p.clone()]).collect();
        let mut out = SparsePoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = SparsePoly::constant(target, c.clone());
            for (i, &d) in e.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                while powers[i].len() <= d as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][d as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Re-embeds into `nvars` variables, placing variable `i` at `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> SparsePoly {
        assert_eq!(map.len(), self.nvars);
        let mut out = SparsePoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; nvars];
            for (i, &d) in e.iter().enumerate() {
                ne[map[i]] += d;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    /// Uses lexicographic division by a single divisor, which has zero
    /// remainder exactly when `d` divides `self`.
    pub fn div_exact(&self, d: &SparsePoly) -> Option<SparsePoly> {
        if d.is_zero() || d.nvars != self.nvars {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.inv().ok()?));
        }
        let (dlm, dlc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = SparsePoly::zero(self.nvars);
        let mut steps = 0usize;
        while let Some((rlm, rlc)) = rem.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            steps += 1;
            if steps > 200_000 {
                return None;
            }
            if rlm.iter().zip(&dlm).any(|(a, b)| a < b) {
                return None;
            }
            let qm: Monomial = rlm.iter().zip(&dlm).map(|(a, b)| a - b).collect();
            let qc = &rlc / &dlc;
            let qt = SparsePoly::monomial(qm, qc);
            rem = &rem - &(&qt * d);
            quot = &quot + &qt;
        }
        Some(quot)
    }

    /// Largest monomial dividing every term (all zeros for the zero polynomial).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars];
        };
        let mut m = first.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    /// Divides every exponent vector by `m`; `m` must divide each term.
    pub fn div_monomial(&self, m: &[u32]) -> SparsePoly {
        SparsePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a - b).collect(), c.clone()))
                .collect(),
        }
    }

    /// Dense coefficient vector `[c_0, c_1, ...]` of a univariate polynomial.
    pub fn to_dense_univariate(&self) -> Result<Vec<Scalar>, AlgebraError> {
        if self.nvars != 1 {
            return Err(AlgebraError::ArityMismatch { expected: 1, found: self.nvars });
        }
        let deg = self.degree_in(0) as usize;
        let mut out = vec![Scalar::zero(); if self.is_zero() { 0 } else { deg + 1 }];
        for (e, c) in &self.terms {
            out[e[0] as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn from_dense_univariate(coeffs: &[Scalar]) -> SparsePoly {
        let mut p = SparsePoly::zero(1);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(vec![i as u32], c.clone());
        }
        p
    }

    /// Collects coefficients with respect to the variables selected by `keep`:
    /// returns a map from the kept exponent pattern to the remaining polynomial.
    pub fn coefficients_in(&self, keep: impl Fn(usize) -> bool) -> BTreeMap<Monomial, SparsePoly> {
        let mut out: BTreeMap<Monomial, SparsePoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut key = vec![0; self.nvars];
            let mut rest = e.clone();
            for i in 0..self.nvars {
                if keep(i) {
                    key[i] = e[i];
                    rest[i] = 0;
                }
            }
            out.entry(key).or_insert_with(|| SparsePoly::zero(self.nvars)).add_term(rest, c.clone());
        }
        out
    }

    /// Renders with the given variable names (or `x1, x2, ...`).
    pub fn display_with(&self, names: Option<&[String]>) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let name = |i: usize| names.and_then(|n| n.get(i).cloned()).unwrap_or_else(|| format!("x{}", i + 1));
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > 0)
                .map(|(i, &d)| if d == 1 { name(i) } else { format!("{}^{}", name(i), d) })
                .collect();
            let s = if mono.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mono.join("*")
            } else if (-c).is_one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", c, mono.join("*"))
            };
            parts.push(s);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(None))
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePoly[{}]({})", self.nvars, self)
    }
}

// Operator forms panic on arity mismatch; the `try_*` methods report it.
impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        self.try_add(rhs).expect("polynomial arity mismatch")
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        self.try_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        self.try_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.scale(&-Scalar::one())
    }
}

/// JSON shape: `{"vars": [...], "terms": [{"exp": [...], "coef": "p/q"}]}`.
#[derive(Serialize, Deserialize)]
struct PolyRepr {
    vars: Vec<String>,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    coef: Scalar,
}

impl SparsePoly {
    pub fn to_json_with(&self, names: &[String]) -> serde_json::Value {
        let repr = PolyRepr {
            vars: names.to_vec(),
            terms: self.terms.iter().map(|(e, c)| TermRepr { exp: e.clone(), coef: c.clone() }).collect(),
        };
        serde_json::to_value(repr).expect("polynomial serializes")
    }
}

impl Serialize for SparsePoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        self.to_json_with(&names).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparsePoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        SparsePoly::from_terms(repr.vars.len(), repr.terms.into_iter().map(|t| (t.exp, t.coef)))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> SparsePoly {
        SparsePoly::var(n, i)
    }

    fn c(n: usize, v: i64) -> SparsePoly {
        SparsePoly::constant(n, Scalar::from(v))
    }

    #[test]
    fn difference_of_squares() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        let p = &(&x1 + &x2) * &(&x1 - &x2);
        let expect = &(&x1 * &x1) - &(&x2 * &x2);
        assert_eq!(p, expect);
    }

    #[test]
    fn eval_root() {
        let x1 = x(1, 0);
        let p = &(&x1 * &x1) - &x1;
        assert_eq!(p.eval(&[Scalar::one()]).unwrap(), Scalar::zero());
    }

    #[test]
    fn falling_factorial_expansion() {
        let y = x(1, 0);
        let mut p = SparsePoly::one(1);
        for j in 0..4 {
            p = &p * &(&y - &c(1, j));
        }
        // Y^4 - 6Y^3 + 11Y^2 - 6Y
        let dense = p.to_dense_univariate().unwrap();
        let expect: Vec<Scalar> = [0, -6, 11, -6, 1].iter().map(|&v| Scalar::from(v)).collect();
        assert_eq!(dense, expect);
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let a = x(1, 0);
        let b = x(2, 0);
        assert!(matches!(a.try_add(&b), Err(AlgebraError::ArityMismatch { .. })));
        assert!(a.eval(&[Scalar::one(), Scalar::one()]).is_err());
    }

    #[test]
    fn exact_division() {
        let (x1, x2) = (x(2, 0), x(2, 1));
        let num = &(&x1 * &x1) - &(&x2 * &x2);
        let den = &x1 - &x2;
        assert_eq!(num.div_exact(&den).unwrap(), &x1 + &x2);
        assert!(num.div_exact(&(&x1 + &c(2, 1))).is_none());
    }

    #[test]
    fn compose_pulls_back() {
        // p(u1, u2) = u1 * u2 with u1 = s, u2 = s + 1
        let p = &x(2, 0) * &x(2, 1);
        let s = x(1, 0);
        let q = p.compose(&[s.clone(), &s + &c(1, 1)]).unwrap();
        assert_eq!(q, &(&s * &s) + &s);
    }

    #[test]
    fn json_shape() {
        let p = &x(2, 0) + &c(2, 3);
        let v = p.to_json_with(&["U1".into(), "U2".into()]);
        assert_eq!(v["vars"][0], "U1");
        let back: SparsePoly = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
