//! Reproduction suites with pinned seeds.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{Scalar, SparsePoly};
use crate::approx::{convergence_witness, represents, ApproxError, ApproxInstance, GermEntry};
use crate::circuit::{random_circuit, Circuit, CircuitBuilder, ParameterDomain, RandomShape};
use crate::cost::cost;
use crate::family::{
    build_beta_n, build_formula, build_h, eval_f, identification_points, product_of_roots, verify_elimination_identity,
    verify_identification,
};
use crate::lowerbound::{audit_candidate, naive_evaluator, rank_certificate, AuditVerdict, PointStrategy};
use crate::semantics::{equal_results, eval_outputs, fingerprint, fingerprint_on, trial_rng, ConsistencyMode};
use crate::transforms::{garbage_collect, join, reduce, reduce_on, restrict, JoinSpec, Oracle};

pub const SUITES: [&str; 9] =
    ["identity", "cost", "rank", "lambda", "size", "transforms", "audit", "approx", "identification"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteRow {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub rows: Vec<SuiteRow>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.pass)
    }
}

fn row(label: impl Into<String>, pass: bool, detail: impl Into<String>) -> SuiteRow {
    SuiteRow { label: label.into(), pass, detail: detail.into() }
}

/// A rational with numerator in `[-2^16, 2^16]` and denominator in `[1, 2^8]`.
pub fn random_rational(rng: &mut ChaCha8Rng) -> Scalar {
    let p: i64 = rng.gen_range(-(1 << 16)..=(1 << 16));
    let q: i64 = rng.gen_range(1..=(1 << 8));
    Scalar::new(p, q).expect("nonzero denominator")
}

pub fn run_suite(name: &str, ceiling: usize) -> Option<SuiteReport> {
    let start = Instant::now();
    let rows = match name {
        "identity" => identity(),
        "cost" => cost_suite(),
        "rank" => rank(ceiling),
        "lambda" => lambda(),
        "size" => size(),
        "transforms" => transforms(),
        "audit" => audit(),
        "approx" => approx(),
        "identification" => identification(),
        _ => return None,
    };
    Some(SuiteReport { name: name.to_string(), rows, seconds: start.elapsed().as_secs_f64() })
}

fn identity() -> Vec<SuiteRow> {
    let mut failures = Vec::new();
    for n in 1..=6 {
        for trial in 0..20 {
            let mut rng = trial_rng(1, ((n as u64) << 32) | trial);
            let t = random_rational(&mut rng);
            let u: Vec<Scalar> = (0..n).map(|_| random_rational(&mut rng)).collect();
            if !verify_elimination_identity(n, &t, &u).unwrap_or(false) {
                failures.push(format!("n={n} trial {trial}"));
            }
        }
    }
    vec![row("n=1..6 identity", failures.is_empty(), format!("120 trials, failures: {failures:?}"))]
}

fn cost_suite() -> Vec<SuiteRow> {
    let bad: Vec<usize> = (1..=12).filter(|&n| cost(&build_h(n)).essential_mults != n - 1).collect();
    vec![row("n=1..12 essential mults of H = n-1", bad.is_empty(), format!("mismatches at {bad:?}"))]
}

fn rank(ceiling: usize) -> Vec<SuiteRow> {
    (1..=7)
        .map(|n| match rank_certificate(n, &PointStrategy::Primes, ceiling) {
            Ok(c) => row(format!("n={n} rank"), c.pass, format!("rank {} of {}", c.rank, 1 << n)),
            Err(e) => row(format!("n={n} rank"), false, e.to_string()),
        })
        .collect()
}

fn lambda() -> Vec<SuiteRow> {
    (1..=6)
        .map(|n| {
            let roots: Vec<Scalar> = (0..1u64 << n).map(Scalar::from).collect();
            let want = SparsePoly::from_dense_univariate(&product_of_roots(&roots));
            let ok = (0..10).all(|s| {
                let mut rng = trial_rng(4, ((n as u64) << 32) | s);
                let u: Vec<Scalar> = (0..n).map(|_| random_rational(&mut rng)).collect();
                eval_f(n, &Scalar::zero(), &u).is_ok_and(|f| f == want)
            });
            row(format!("n={n} F(0,u,Y) = prod (Y-j)"), ok, "10 samples")
        })
        .collect()
}

fn size() -> Vec<SuiteRow> {
    let counts: Vec<i64> = (2..=12).map(|n| build_beta_n(n).len() as i64).collect();
    let second: Vec<i64> = counts.windows(3).map(|w| w[2] - 2 * w[1] + w[0]).collect();
    let linear = second.iter().all(|&d| d == 0);
    let sizes: Vec<(usize, usize)> = (2..=8).map(|n| (n, build_formula(n, 0).total_size)).collect();
    let c = sizes[..3].iter().map(|&(n, s)| Scalar::new(s as i64, (n * n * n) as i64).expect("n > 0")).max().expect("three");
    let over: Vec<usize> =
        sizes[3..].iter().filter(|&&(n, s)| Scalar::from(s) > &c * &Scalar::from(n * n * n)).map(|&(n, _)| n).collect();
    vec![
        row("beta_n node count linear, n=2..12", linear, format!("counts {counts:?}")),
        row("formula size <= c n^3, n=5..8", over.is_empty(), format!("c = {c}, sizes {sizes:?}")),
    ]
}

fn sub_domain() -> ParameterDomain {
    let g = &(&SparsePoly::var(2, 1) - &SparsePoly::var(2, 0).scale(&Scalar::from(2))) - &SparsePoly::one(2);
    ParameterDomain::Localized { dim: 2, generators: vec![g], inequation: None }
}

/// Output values of `g2` at `(u, g1(u, x))`, or `None` where either fails.
fn composed(g1: &Circuit, g2: &Circuit, u: &[Scalar], x: &[Scalar]) -> Option<Vec<Scalar>> {
    let mid = eval_outputs(g1, u, x).ok()?;
    eval_outputs(g2, u, &mid).ok()
}

fn transforms() -> Vec<SuiteRow> {
    let shape = RandomShape::default();
    let mut bad_reduce = Vec::new();
    for s in 0..200u64 {
        let c = random_circuit(&mut trial_rng(6, s), shape);
        let fc = fingerprint(&c, s, 10);
        let ok = (|| {
            let r = reduce(&c, Oracle::Fingerprint { seed: s, samples: 10 }).ok()?.circuit;
            let g = garbage_collect(&c);
            let fc = fc.ok()?;
            Some(
                r.len() <= c.len()
                    && g.len() <= c.len()
                    && equal_results(&fc, &fingerprint(&r, s, 10).ok()?)
                    && equal_results(&fc, &fingerprint(&g, s, 10).ok()?),
            )
        })();
        if ok != Some(true) {
            bad_reduce.push(s);
        }
    }
    let mut bad_join = Vec::new();
    for s in 0..50u64 {
        let mut rng = trial_rng(7, s);
        let g1 = random_circuit(&mut rng, shape);
        let g2 = random_circuit(&mut rng, shape);
        let ok = join(&g1, &g2, &JoinSpec::identity(2)).is_ok_and(|j| {
            let mut checked = 0;
            let mut agree = true;
            for p in 0..10 {
                let mut prng = trial_rng(8, (s << 8) | p);
                let u: Vec<Scalar> = (0..2).map(|_| random_rational(&mut prng)).collect();
                let x: Vec<Scalar> = (0..2).map(|_| random_rational(&mut prng)).collect();
                if let (Some(want), Ok(got)) = (composed(&g1, &g2, &u, &x), eval_outputs(&j, &u, &x)) {
                    checked += 1;
                    agree &= want == got;
                }
            }
            agree && checked > 0
        });
        if !ok {
            bad_join.push(s);
        }
    }
    let sub = sub_domain();
    let mut bad_commute = Vec::new();
    for s in 0..50u64 {
        let c = random_circuit(&mut trial_rng(9, s), shape);
        let ok = (|| {
            let a = reduce_on(&restrict(&c, &sub, ConsistencyMode::exact()).ok()?.circuit, &sub, Oracle::default()).ok()?;
            let b = restrict(&reduce(&c, Oracle::default()).ok()?.circuit, &sub, ConsistencyMode::exact()).ok()?;
            Some(equal_results(&fingerprint_on(&a.circuit, &sub, s, 10).ok()?, &fingerprint_on(&b.circuit, &sub, s, 10).ok()?))
        })();
        if ok != Some(true) {
            bad_commute.push(s);
        }
    }
    vec![
        row("reduce/gc preserve fingerprints, 200 circuits", bad_reduce.is_empty(), format!("failures {bad_reduce:?}")),
        row("join composition law, 50 pairs", bad_join.is_empty(), format!("failures {bad_join:?}")),
        row("reduce and restrict commute, 50 cases", bad_commute.is_empty(), format!("failures {bad_commute:?}")),
    ]
}

fn audit() -> Vec<SuiteRow> {
    (1..=5)
        .map(|n| {
            let pts = identification_points(n, 0);
            match naive_evaluator(n, &pts) {
                Ok(ev) => {
                    let r = audit_candidate(&ev.circuit, n, &pts, 5, 0);
                    let pass = r.verdict == AuditVerdict::Consistent && r.m == 1 << n;
                    row(format!("n={n} naive evaluator"), pass, format!("m = {}, verdict {:?}", r.m, r.verdict))
                }
                Err(e) => row(format!("n={n} naive evaluator"), false, e.to_string()),
            }
        })
        .collect()
}

/// `((1 + π₁X)^2 - 1 - 2π₁X) / π₁^2 + ((π₂ - π₁) / π₁) X`; with one
/// parameter only the first summand.
pub fn square_example(drift: bool) -> Circuit {
    let mut b = CircuitBuilder::new(if drift { 2 } else { 1 }, 1);
    let x = b.input(0);
    let p = b.param(0);
    let one = b.scalar(1);
    let two = b.scalar(2);
    let px = b.mul(p, x);
    let s = b.add(one, px);
    let sq = b.mul(s, s);
    let a = b.sub(sq, one);
    let tp = b.mul(two, px);
    let num = b.sub(a, tp);
    let p2 = b.mul(p, p);
    let inv = b.div(one, p2);
    let mut y = b.mul(num, inv);
    if drift {
        let q = b.param(1);
        let d = b.sub(q, p);
        let r = b.div(d, p);
        let rx = b.mul(r, x);
        y = b.add(y, rx);
    }
    b.finish(vec![y]).expect("valid by construction")
}

/// `(1/π) X`.
pub fn pole_example() -> Circuit {
    let mut b = CircuitBuilder::new(1, 1);
    let x = b.input(0);
    let p = b.param(0);
    let one = b.scalar(1);
    let inv = b.div(one, p);
    let y = b.mul(inv, x);
    b.finish(vec![y]).expect("valid by construction")
}

fn germ(order: i64, coeffs: &[i64]) -> GermEntry {
    GermEntry { order, coeffs: coeffs.iter().map(|&c| Scalar::from(c)).collect() }
}

fn approx() -> Vec<SuiteRow> {
    let x2 = vec![SparsePoly::monomial(vec![2], Scalar::one())];
    let eps = ApproxInstance::new(vec![germ(1, &[1])], ParameterDomain::affine(1), 16).expect("affine");
    let square = crate::approx::approx_eval(&square_example(false), &eps);
    let square_ok = square.as_ref().is_ok_and(|r| r.h.as_ref() == Some(&x2) && r.tail_is_zero());
    let drift = ApproxInstance::new(vec![germ(1, &[1]), germ(1, &[1, 1])], ParameterDomain::affine(2), 16).expect("affine");
    let c = square_example(true);
    let (drift_ok, detail) = match (represents(&c, &drift), convergence_witness(&c, &drift, 10)) {
        (Ok(h), Ok(w)) => {
            let ratios = w.ratios();
            let half = Scalar::new(1, 2).expect("nonzero");
            let ok = h == x2 && ratios.len() == 9 && ratios.iter().all(|(_, r)| *r == half);
            (ok, format!("C = {}, ratios {:?}", w.constant, ratios.iter().map(|(_, r)| r.to_string()).collect::<Vec<_>>()))
        }
        (a, b) => (false, format!("{:?} {:?}", a.err(), b.err())),
    };
    let pole = represents(&pole_example(), &eps);
    vec![
        row("X^2 at u = eps: H = X^2, zero tail", square_ok, format!("{:?}", square.map(|r| r.holomorphic))),
        row("u = (eps, eps + eps^2): ratio 1/2 for k=1..9", drift_ok, detail),
        row(
            "pole: not holomorphic, order -1",
            matches!(pole, Err(ApproxError::NotHolomorphic { order: -1, .. })),
            format!("{pole:?}"),
        ),
    ]
}

fn identification() -> Vec<SuiteRow> {
    (1..=4)
        .map(|n| {
            let pts = identification_points(n, 0);
            let r = verify_identification(n, &pts, 1000, 0);
            row(
                format!("n={n} identification"),
                r.pass,
                format!("K = {}, max bits {}, {} distinct pairs, {} collisions", r.k, r.max_bits, r.distinct_pairs, r.collisions),
            )
        })
        .collect()
}
