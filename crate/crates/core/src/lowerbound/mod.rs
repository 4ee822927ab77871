//! Certificates for the exponential lower bound at small `n`: the rank of the
//! jet matrix `N = (L_κ(u_l))` and an audit of candidate evaluators.

mod audit;

pub use audit::{audit_candidate, naive_evaluator, AuditReport, AuditVerdict, NaiveEvaluator};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{exact_rank, Matrix, Scalar};
use crate::circuit::sample_coordinate;
use crate::family::{f_coeff_t_jet_capped, FamilyError, Jet, JET_CEILING};

/// Default largest `n`; the jet cost grows like `4^n`.
pub const DEFAULT_CEILING: usize = JET_CEILING;
/// Fresh point sets tried after a rank-deficient one.
pub const RANK_RETRIES: usize = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LowerBoundError {
    #[error("n = {n} exceeds the ceiling {ceiling}")]
    Ceiling { n: usize, ceiling: usize },
    #[error("expected {expected} points of dimension {dim}, found {found}")]
    Points { expected: usize, dim: usize, found: usize },
    #[error("jet matrix stayed rank deficient ({rank} < {full}) after {attempts} point sets")]
    RankDeficient { rank: usize, full: usize, attempts: usize, points: Vec<Vec<Scalar>> },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointStrategy {
    /// Tensor grid: coordinate `i` of point `l` is the `(2i + bit_i(l))`-th prime.
    Primes,
    /// Seeded integers in `[-2^16, 2^16]`.
    Random { seed: u64 },
    Explicit { points: Vec<Vec<Scalar>> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankCertificate {
    pub n: usize,
    pub points: Vec<Vec<Scalar>>,
    #[serde(skip)]
    pub matrix: Matrix,
    pub rank: usize,
    pub pass: bool,
    /// All jets share one `λ`.
    pub lambda_point_independent: bool,
    pub lambda: Vec<Scalar>,
    /// Ranks of rejected point sets, in order.
    pub rejected_ranks: Vec<usize>,
}

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut k = 2u64;
    while out.len() < count {
        if (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0) {
            out.push(k);
        }
        k += 1;
    }
    out
}

pub fn strategy_points(n: usize, strategy: &PointStrategy) -> Vec<Vec<Scalar>> {
    let d = 1usize << n;
    match strategy {
        PointStrategy::Primes => {
            let p = primes(2 * n);
            (0..d).map(|l| (0..n).map(|i| Scalar::from(p[2 * i + ((l >> i) & 1)])).collect()).collect()
        }
        PointStrategy::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..d).map(|_| (0..n).map(|_| sample_coordinate(&mut rng, 1 << 16)).collect()).collect()
        }
        PointStrategy::Explicit { points } => points.clone(),
    }
}

/// Jets at every point, computed in parallel.
pub fn jets_at(n: usize, points: &[Vec<Scalar>], ceiling: usize) -> Result<Vec<Jet>, LowerBoundError> {
    Ok(points.par_iter().map(|u| f_coeff_t_jet_capped(n, u, ceiling)).collect::<Result<Vec<_>, _>>()?)
}

fn certify(n: usize, points: Vec<Vec<Scalar>>, ceiling: usize) -> Result<RankCertificate, LowerBoundError> {
    let jets = jets_at(n, &points, ceiling)?;
    let lambda = jets[0].lambda.clone();
    let lambda_point_independent = jets.iter().all(|j| j.lambda == lambda);
    let matrix = Matrix::from_rows(jets.into_iter().map(|j| j.l).collect()).expect("square");
    let rank = exact_rank(&matrix);
    Ok(RankCertificate {
        n,
        points,
        matrix,
        rank,
        pass: rank == 1 << n,
        lambda_point_independent,
        lambda,
        rejected_ranks: vec![],
    })
}

/// Builds `N` at the strategy's points; a rank-deficient point set is
/// replaced by seeded random points up to `RANK_RETRIES` times.
pub fn rank_certificate(n: usize, strategy: &PointStrategy, ceiling: usize) -> Result<RankCertificate, LowerBoundError> {
    if n > ceiling || n == 0 {
        return Err(LowerBoundError::Ceiling { n, ceiling });
    }
    let full = 1usize << n;
    let points = strategy_points(n, strategy);
    if points.len() != full || points.iter().any(|p| p.len() != n) {
        return Err(LowerBoundError::Points { expected: full, dim: n, found: points.len() });
    }
    let mut rejected = Vec::new();
    let mut cert = certify(n, points, ceiling)?;
    let mut attempt = 0u64;
    while !cert.pass {
        rejected.push(cert.rank);
        if rejected.len() > RANK_RETRIES {
            return Err(LowerBoundError::RankDeficient { rank: cert.rank, full, attempts: rejected.len(), points: cert.points });
        }
        attempt += 1;
        cert = certify(n, strategy_points(n, &PointStrategy::Random { seed: 0x5eed_0000 + attempt }), ceiling)?;
    }
    cert.rejected_ranks = rejected;
    Ok(cert)
}
