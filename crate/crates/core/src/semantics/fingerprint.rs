//! Seeded evaluation fingerprints for identity testing of final results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{eval_outputs, SemanticsError};
use crate::algebra::Scalar;
use crate::circuit::{sample_coordinate, Circuit, ParameterDomain, DEFAULT_SAMPLE_BOUND};

/// Candidate points tried per requested sample before giving up.
pub const RESAMPLE_LIMIT: usize = 16;

/// Generator for stream `stream` under `seed`; streams are independent, so
/// trials can run in any order.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FingerprintSample {
    /// Index of the candidate point in the seeded sequence.
    pub index: u64,
    pub params: Vec<Scalar>,
    pub inputs: Vec<Scalar>,
    pub outputs: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub seed: u64,
    pub params: usize,
    pub inputs: usize,
    pub bound: i64,
    pub samples: Vec<FingerprintSample>,
}

pub fn fingerprint(c: &Circuit, seed: u64, k: usize) -> Result<Fingerprint, SemanticsError> {
    fingerprint_on(c, &ParameterDomain::affine(c.params()), seed, k)
}

/// Samples parameters from `d`; candidates where a division fails are skipped.
pub fn fingerprint_on(c: &Circuit, d: &ParameterDomain, seed: u64, k: usize) -> Result<Fingerprint, SemanticsError> {
    if d.dim() != c.params() {
        return Err(SemanticsError::Arity { what: "domain dimension", expected: c.params(), found: d.dim() });
    }
    let bound = DEFAULT_SAMPLE_BOUND;
    let mut samples = Vec::with_capacity(k);
    let limit = (k * RESAMPLE_LIMIT).max(RESAMPLE_LIMIT) as u64;
    let mut j = 0u64;
    while samples.len() < k {
        if j >= limit {
            return Err(SemanticsError::SamplesExhausted { tries: limit as usize });
        }
        let mut rng = trial_rng(seed, j);
        let u = d.sample(&mut rng, bound, 64)?;
        let x: Vec<Scalar> = (0..c.inputs()).map(|_| sample_coordinate(&mut rng, bound)).collect();
        match eval_outputs(c, &u, &x) {
            Ok(outputs) => samples.push(FingerprintSample { index: j, params: u, inputs: x, outputs }),
            Err(SemanticsError::DivisionByZero { .. }) => {}
            Err(e) => return Err(e),
        }
        j += 1;
    }
    Ok(Fingerprint { seed, params: c.params(), inputs: c.inputs(), bound, samples })
}

fn sorted(v: &[Scalar]) -> Vec<Scalar> {
    let mut v = v.to_vec();
    v.sort();
    v
}

/// Output multisets agree at every point both fingerprints sampled; false
/// when they share no point.
pub fn equal_results(a: &Fingerprint, b: &Fingerprint) -> bool {
    if a.params != b.params || a.inputs != b.inputs || a.seed != b.seed {
        return false;
    }
    let mut common = 0;
    for sa in &a.samples {
        if let Some(sb) = b.samples.iter().find(|s| s.index == sa.index) {
            if sa.params != sb.params || sa.inputs != sb.inputs {
                return false;
            }
            if sorted(&sa.outputs) != sorted(&sb.outputs) {
                return false;
            }
            common += 1;
        }
    }
    common > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;

    #[test]
    fn square_of_sum_identity() {
        let mut b = CircuitBuilder::new(0, 2);
        let x = b.input(0);
        let y = b.input(1);
        let s = b.add(x, y);
        let sq = b.mul(s, s);
        let lhs = b.finish(vec![sq]).unwrap();

        let mut b = CircuitBuilder::new(0, 2);
        let x = b.input(0);
        let y = b.input(1);
        let xx = b.mul(x, x);
        let xy = b.mul(x, y);
        let yy = b.mul(y, y);
        let two = b.scalar(2);
        let t = b.mul(two, xy);
        let a = b.add(xx, t);
        let r = b.add(a, yy);
        let rhs = b.finish(vec![r]).unwrap();

        let fa = fingerprint(&lhs, 9, 5).unwrap();
        assert_eq!(fa, fingerprint(&lhs, 9, 5).unwrap());
        assert!(equal_results(&fa, &fingerprint(&rhs, 9, 5).unwrap()));
    }

    #[test]
    fn different_inputs_differ() {
        let mut b = CircuitBuilder::new(0, 2);
        let x = b.input(0);
        b.input(1);
        let c1 = b.finish(vec![x]).unwrap();
        let mut b = CircuitBuilder::new(0, 2);
        b.input(0);
        let y = b.input(1);
        let c2 = b.finish(vec![y]).unwrap();
        assert!(!equal_results(&fingerprint(&c1, 1, 3).unwrap(), &fingerprint(&c2, 1, 3).unwrap()));
    }
}
