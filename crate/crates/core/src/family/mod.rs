//! The hard elimination family: `H`, `G_i`, `β_n`, `F`, the `Ξ` encoding
//! and the constituents of the defining formula.

mod eliminant;
mod points;

pub use eliminant::{
    eval_f, f_coeff_t_jet, f_coeff_t_jet_capped, h_value, product_of_roots, verify_elimination_identity, FamilyError, Jet, EVAL_F_CEILING, JET_CEILING,
};
pub use points::{
    coefficient_vector, identification_points, identification_points_verified, verify_identification, xi, xi_domain,
    xi_polynomials, IdentificationReport,
};

use serde::Serialize;

use crate::algebra::Scalar;
use crate::circuit::{Circuit, CircuitBuilder, NodeId};

/// Number of identification points for `n`.
pub fn point_count(n: usize) -> usize {
    16 * n * n + 2
}

/// Pushes `Σ 2^{i-1} x_i + t ∏ (1 + (u_i - 1) x_i)`.
fn push_h(b: &mut CircuitBuilder, t: usize, u: impl Fn(usize) -> usize, x: &[NodeId]) -> NodeId {
    let n = x.len();
    let one = b.scalar(1);
    let mut acc = None;
    for (i, &xi) in x.iter().enumerate() {
        let ui = b.param(u(i));
        let um1 = b.sub(ui, one);
        let m = b.mul(um1, xi);
        let f = b.add(one, m);
        acc = Some(match acc {
            None => f,
            Some(a) => b.mul(a, f),
        });
    }
    let tp = b.param(t);
    let prod = b.mul(tp, acc.expect("n >= 1"));
    let mut lin = x[0];
    for (i, &xi) in x.iter().enumerate().take(n).skip(1) {
        let w = b.scalar(Scalar::pow2(i as i64));
        let term = b.mul(w, xi);
        lin = b.add(lin, term);
    }
    b.add(lin, prod)
}

/// `H⁽ⁿ⁾` with parameters `T` (index 0), `U_1..U_n` (indices 1..n) and
/// inputs `X_1..X_n`.
pub fn build_h(n: usize) -> Circuit {
    assert!(n >= 1, "n must be positive");
    let mut b = CircuitBuilder::new(n + 1, n);
    let x: Vec<NodeId> = (0..n).map(|i| b.input(i)).collect();
    let h = push_h(&mut b, 0, |i| i + 1, &x);
    b.finish(vec![h]).expect("valid by construction")
}

/// `H⁽ⁿ⁾(T, U, ξ)` at a fixed integer point: no inputs.
pub fn build_h_at(point: &[Scalar]) -> Circuit {
    let n = point.len();
    let mut b = CircuitBuilder::new(n + 1, 0);
    let x: Vec<NodeId> = point.iter().map(|c| b.scalar(c.clone())).collect();
    let h = push_h(&mut b, 0, |i| i + 1, &x);
    b.finish(vec![h]).expect("valid by construction")
}

/// `G_i = X_i^2 - X_i - S_i` with parameters `S_1..S_n`.
pub fn build_g(n: usize, i: usize) -> Circuit {
    assert!(i < n);
    let mut b = CircuitBuilder::new(n, n);
    let xs: Vec<NodeId> = (0..n).map(|j| b.input(j)).collect();
    let g = push_g(&mut b, xs[i], i);
    b.finish(vec![g]).expect("valid by construction")
}

fn push_g(b: &mut CircuitBuilder, x: NodeId, s: usize) -> NodeId {
    let sq = b.mul(x, x);
    let d = b.sub(sq, x);
    let sp = b.param(s);
    b.sub(d, sp)
}

/// `β_n`: parameters `S_1..S_n` (0..n), `T` (n), `U_1..U_n` (n+1..2n);
/// outputs `G_1, .., G_n, H`.
pub fn build_beta_n(n: usize) -> Circuit {
    assert!(n >= 1, "n must be positive");
    let mut b = CircuitBuilder::new(2 * n + 1, n);
    let x: Vec<NodeId> = (0..n).map(|i| b.input(i)).collect();
    let mut outs: Vec<NodeId> = (0..n).map(|i| push_g(&mut b, x[i], i)).collect();
    outs.push(push_h(&mut b, n, |i| n + 1 + i, &x));
    b.finish(outs).expect("valid by construction")
}

/// `X_i^2 - X_i` over the inputs, no parameters.
fn build_boolean(n: usize, i: usize) -> Circuit {
    let mut b = CircuitBuilder::new(0, n);
    let xs: Vec<NodeId> = (0..n).map(|j| b.input(j)).collect();
    let sq = b.mul(xs[i], xs[i]);
    let d = b.sub(sq, xs[i]);
    b.finish(vec![d]).expect("valid by construction")
}

#[derive(Clone, Debug, Serialize)]
pub struct FormulaReport {
    pub n: usize,
    pub k: usize,
    pub constituents: usize,
    pub boolean_size: usize,
    pub point_size: usize,
    pub h_size: usize,
    pub total_size: usize,
    #[serde(skip)]
    pub circuits: Vec<Circuit>,
}

/// Circuits for the polynomials of the existential formula describing the
/// elimination problem: `X_i^2 - X_i`, `H(T, U, ξ_j)` and `H(T, U, X)`.
pub fn build_formula(n: usize, seed: u64) -> FormulaReport {
    let pts = identification_points(n, seed);
    let mut circuits: Vec<Circuit> = (0..n).map(|i| build_boolean(n, i)).collect();
    let boolean_size: usize = circuits.iter().map(Circuit::len).sum();
    let at: Vec<Circuit> = pts.iter().map(|p| build_h_at(p)).collect();
    let point_size: usize = at.iter().map(Circuit::len).sum();
    circuits.extend(at);
    let h = build_h(n);
    let h_size = h.len();
    circuits.push(h);
    FormulaReport {
        n,
        k: pts.len(),
        constituents: circuits.len(),
        boolean_size,
        point_size,
        h_size,
        total_size: boolean_size + point_size + h_size,
        circuits,
    }
}

/// Names for the parameters of `build_h`.
pub fn h_param_names(n: usize) -> Vec<String> {
    std::iter::once("T".to_string()).chain((1..=n).map(|i| format!("U{i}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::eval_outputs;

    fn s(v: i64) -> Scalar {
        Scalar::from(v)
    }

    #[test]
    fn h2_small_points() {
        let c = build_h(2);
        assert_eq!(eval_outputs(&c, &[s(1), s(1), s(1)], &[s(1), s(1)]).unwrap(), vec![s(4)]);
        assert_eq!(eval_outputs(&c, &[s(0), s(5), s(-3)], &[s(1), s(1)]).unwrap(), vec![s(3)]);
    }

    #[test]
    fn h1_at_boolean_points() {
        let c = build_h(1);
        let (t, u) = (s(7), s(-2));
        assert_eq!(eval_outputs(&c, &[t.clone(), u.clone()], &[s(0)]).unwrap(), vec![t.clone()]);
        assert_eq!(eval_outputs(&c, &[t.clone(), u.clone()], &[s(1)]).unwrap(), vec![s(1) + &t * &u]);
    }

    #[test]
    fn beta_outputs_vanish_on_variety() {
        let n = 3;
        let c = build_beta_n(n);
        let x = [s(2), s(-1), s(5)];
        let mut params: Vec<Scalar> = x.iter().map(|v| v * v - v.clone()).collect();
        params.extend([s(1), s(2), s(3), s(4)]);
        let out = eval_outputs(&c, &params, &x).unwrap();
        assert!(out[..n].iter().all(Scalar::is_zero));
    }

    #[test]
    fn formula_constituent_count() {
        let r = build_formula(2, 0);
        assert_eq!(r.constituents, 2 + 66 + 1);
        assert_eq!(r.total_size, r.circuits.iter().map(Circuit::len).sum::<usize>());
    }
}
