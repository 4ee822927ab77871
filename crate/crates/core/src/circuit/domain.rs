//! Parameter domains: affine space, localized zero sets and polynomial images.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, Scalar, SparsePoly};

/// Sample coordinates are drawn uniformly from the integers in `[-B, B]`.
pub const DEFAULT_SAMPLE_BOUND: i64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("no domain point found after {trials} attempts; the domain may be empty")]
    EmptyDomainSuspected { trials: usize },
    #[error("domain is empty: generators are inconsistent")]
    Empty,
    #[error("domain arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParameterDomain {
    Affine {
        dim: usize,
    },
    /// Zero set of `generators` with `inequation` removed.
    Localized {
        dim: usize,
        generators: Vec<SparsePoly>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inequation: Option<SparsePoly>,
    },
    /// Image of `map` on affine `source_dim`-space.
    Image {
        source_dim: usize,
        map: Vec<SparsePoly>,
    },
}

/// A polynomial parameterization of (a dense part of) a domain: its points
/// are `map(s)` for `s` in affine `source_dim`-space with `inequation(s) != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub source_dim: usize,
    pub map: Vec<SparsePoly>,
    pub inequation: Option<SparsePoly>,
}

impl Chart {
    pub fn apply(&self, s: &[Scalar]) -> Result<Vec<Scalar>, AlgebraError> {
        self.map.iter().map(|p| p.eval(s)).collect()
    }

    /// Whether a source point avoids the inequation.
    pub fn admits(&self, s: &[Scalar]) -> Result<bool, AlgebraError> {
        match &self.inequation {
            Some(p) => Ok(!p.eval(s)?.is_zero()),
            None => Ok(true),
        }
    }
}

pub fn sample_coordinate(rng: &mut ChaCha8Rng, bound: i64) -> Scalar {
    Scalar::from(rng.gen_range(-bound..=bound))
}

impl ParameterDomain {
    pub fn affine(dim: usize) -> Self {
        ParameterDomain::Affine { dim }
    }

    /// The single point `u`, as the zero set of `U_i - u_i`.
    pub fn point(u: &[Scalar]) -> Self {
        let r = u.len();
        let generators = u
            .iter()
            .enumerate()
            .map(|(i, c)| &SparsePoly::var(r, i) - &SparsePoly::constant(r, c.clone()))
            .collect();
        ParameterDomain::Localized { dim: r, generators, inequation: None }
    }

    /// Number of basic parameters `r`.
    pub fn dim(&self) -> usize {
        match self {
            ParameterDomain::Affine { dim } | ParameterDomain::Localized { dim, .. } => *dim,
            ParameterDomain::Image { map, .. } => map.len(),
        }
    }

    pub fn check_arity(&self) -> Result<(), DomainError> {
        let r = self.dim();
        match self {
            ParameterDomain::Affine { .. } => Ok(()),
            ParameterDomain::Localized { generators, inequation, .. } => {
                for g in generators.iter().chain(inequation.iter()) {
                    if g.nvars() != r {
                        return Err(DomainError::Arity { expected: r, found: g.nvars() });
                    }
                }
                Ok(())
            }
            ParameterDomain::Image { source_dim, map } => {
                for g in map {
                    if g.nvars() != *source_dim {
                        return Err(DomainError::Arity { expected: *source_dim, found: g.nvars() });
                    }
                }
                Ok(())
            }
        }
    }

    /// Membership where decidable by evaluation; `None` for images.
    pub fn contains(&self, u: &[Scalar]) -> Result<Option<bool>, DomainError> {
        if u.len() != self.dim() {
            return Err(DomainError::Arity { expected: self.dim(), found: u.len() });
        }
        match self {
            ParameterDomain::Affine { .. } => Ok(Some(true)),
            ParameterDomain::Localized { generators, inequation, .. } => {
                for g in generators {
                    if !g.eval(u)?.is_zero() {
                        return Ok(Some(false));
                    }
                }
                if let Some(p) = inequation {
                    if p.eval(u)?.is_zero() {
                        return Ok(Some(false));
                    }
                }
                Ok(Some(true))
            }
            ParameterDomain::Image { .. } => Ok(None),
        }
    }

    /// A polynomial chart, when one is available.
    ///
    /// Localized domains get one when the generators can be solved one
    /// variable at a time, each step isolating a variable that occurs only
    /// linearly with a constant coefficient. `Ok(None)` means no chart was found.
    pub fn chart(&self) -> Result<Option<Chart>, DomainError> {
        self.check_arity()?;
        match self {
            ParameterDomain::Affine { dim } => Ok(Some(Chart {
                source_dim: *dim,
                map: (0..*dim).map(|i| SparsePoly::var(*dim, i)).collect(),
                inequation: None,
            })),
            ParameterDomain::Image { source_dim, map } => {
                Ok(Some(Chart { source_dim: *source_dim, map: map.clone(), inequation: None }))
            }
            ParameterDomain::Localized { dim, generators, inequation } => triangular_chart(*dim, generators, inequation.as_ref()),
        }
    }

    /// One domain point, by chart sampling or rejection.
    pub fn sample(&self, rng: &mut ChaCha8Rng, bound: i64, trials: usize) -> Result<Vec<Scalar>, DomainError> {
        let chart = self.chart()?;
        for _ in 0..trials.max(1) {
            match &chart {
                Some(ch) => {
                    let s: Vec<Scalar> = (0..ch.source_dim).map(|_| sample_coordinate(rng, bound)).collect();
                    if ch.admits(&s)? {
                        return Ok(ch.apply(&s)?);
                    }
                }
                None => {
                    let u: Vec<Scalar> = (0..self.dim()).map(|_| sample_coordinate(rng, bound)).collect();
                    if self.contains(&u)? == Some(true) {
                        return Ok(u);
                    }
                }
            }
        }
        Err(DomainError::EmptyDomainSuspected { trials })
    }
}

fn solvable_var(g: &SparsePoly) -> Option<(usize, Scalar)> {
    (0..g.nvars()).find_map(|i| {
        if g.degree_in(i) != 1 {
            return None;
        }
        let mut coef = None;
        for (e, c) in g.terms() {
            if e[i] == 1 {
                if e.iter().enumerate().any(|(j, &d)| j != i && d > 0) || coef.is_some() {
                    return None;
                }
                coef = Some(c.clone());
            }
        }
        coef.map(|c| (i, c))
    })
}

fn triangular_chart(r: usize, generators: &[SparsePoly], inequation: Option<&SparsePoly>) -> Result<Option<Chart>, DomainError> {
    let mut images: Vec<SparsePoly> = (0..r).map(|i| SparsePoly::var(r, i)).collect();
    let mut pending: Vec<SparsePoly> = generators.iter().filter(|g| !g.is_zero()).cloned().collect();
    let mut solved = vec![false; r];
    while let Some(pos) = pending.iter().position(|g| solvable_var(g).is_some()) {
        let g = pending.remove(pos);
        let (i, c) = solvable_var(&g).expect("checked");
        // U_i = -(g - c U_i) / c
        let rest = &g - &SparsePoly::var(r, i).scale(&c);
        let expr = rest.scale(&(-c.inv()?));
        let mut subst: Vec<SparsePoly> = (0..r).map(|j| SparsePoly::var(r, j)).collect();
        subst[i] = expr;
        for im in images.iter_mut() {
            *im = im.compose(&subst)?;
        }
        let mut next = Vec::new();
        for p in pending {
            let q = p.compose(&subst)?;
            if q.is_zero() {
                continue;
            }
            if q.is_constant() {
                return Err(DomainError::Empty);
            }
            next.push(q);
        }
        pending = next;
        solved[i] = true;
    }
    if let Some(p) = pending.first() {
        if p.is_constant() {
            return Err(DomainError::Empty);
        }
        return Ok(None);
    }
    let free: Vec<usize> = (0..r).filter(|&i| !solved[i]).collect();
    let s = free.len();
    // images only involve free variables; drop the solved ones
    let shrink = |p: &SparsePoly| -> SparsePoly {
        let terms = p.terms().map(|(e, c)| (free.iter().map(|&i| e[i]).collect(), c.clone()));
        SparsePoly::from_terms(s, terms).expect("arity")
    };
    let map: Vec<SparsePoly> = images.iter().map(&shrink).collect();
    let ineq = match inequation {
        Some(p) => {
            let q = p.compose(&map)?;
            if q.is_zero() {
                return Err(DomainError::Empty);
            }
            Some(q)
        }
        None => None,
    };
    Ok(Some(Chart { source_dim: s, map, inequation: ineq }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn u(r: usize, i: usize) -> SparsePoly {
        SparsePoly::var(r, i)
    }

    #[test]
    fn triangular_generators_give_chart() {
        // U2 = U1^2, U3 = U1 + U2
        let g1 = &u(3, 1) - &(&u(3, 0) * &u(3, 0));
        let g2 = &u(3, 2) - &(&u(3, 0) + &u(3, 1));
        let d = ParameterDomain::Localized { dim: 3, generators: vec![g1.clone(), g2.clone()], inequation: None };
        let ch = d.chart().unwrap().unwrap();
        assert_eq!(ch.source_dim, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let p = d.sample(&mut rng, 100, 10).unwrap();
            assert_eq!(d.contains(&p).unwrap(), Some(true));
        }
    }

    #[test]
    fn zero_locus_of_single_variable() {
        let d = ParameterDomain::Localized { dim: 1, generators: vec![u(1, 0)], inequation: None };
        let ch = d.chart().unwrap().unwrap();
        assert_eq!(ch.source_dim, 0);
        assert!(ch.map[0].is_zero());
    }

    #[test]
    fn inconsistent_generators_are_empty() {
        let g1 = u(1, 0);
        let g2 = &u(1, 0) - &SparsePoly::one(1);
        let d = ParameterDomain::Localized { dim: 1, generators: vec![g1, g2], inequation: None };
        assert_eq!(d.chart(), Err(DomainError::Empty));
    }

    #[test]
    fn non_triangular_falls_back_to_rejection() {
        // U1^2 + U2^2 + 1 has no rational points
        let g = &(&(&u(2, 0) * &u(2, 0)) + &(&u(2, 1) * &u(2, 1))) + &SparsePoly::one(2);
        let d = ParameterDomain::Localized { dim: 2, generators: vec![g], inequation: None };
        assert_eq!(d.chart().unwrap(), None);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(d.sample(&mut rng, 10, 20), Err(DomainError::EmptyDomainSuspected { .. })));
    }

    #[test]
    fn json_shape() {
        let d: ParameterDomain = serde_json::from_str(r#"{"kind":"affine","dim":2}"#).unwrap();
        assert_eq!(d.dim(), 2);
        let d = ParameterDomain::point(&[Scalar::from(3)]);
        let s = serde_json::to_string(&d).unwrap();
        let back: ParameterDomain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
