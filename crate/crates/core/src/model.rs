//! The binomial random hypergraph `H(n, k, p)` and tail utilities.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, BoundId, BoundsError, ThresholdParams};
use crate::combinatorics::{binomial, BinomialTable};
use crate::hypergraph::Hypergraph;
use crate::logspace::LogValue;
use crate::rng::{stream_rng, StreamRng};

/// Largest universe the per-edge coupled sampler will walk.
pub const COUPLED_MAX_UNIVERSE: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("C({n}, {k}) does not fit in 63 bits")]
    Capacity { n: usize, k: usize },
    #[error("C({n}, {k}) = {size} exceeds the coupled-sampler limit {limit}")]
    CoupledCapacity { n: usize, k: usize, size: u64, limit: u64 },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// `(n, k, p)` plus the seed of the sampling stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub seed: u64,
}

impl ModelParams {
    pub fn new(n: usize, k: usize, p: f64, seed: u64) -> Result<Self, ModelError> {
        let params = ModelParams { n, k, p, seed };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.k < 2 || self.k > self.n {
            return Err(ModelError::InvalidParams(format!("need 2 <= k <= n, got n = {}, k = {}", self.n, self.k)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(ModelError::InvalidParams(format!("p must lie in [0, 1], got {}", self.p)));
        }
        Ok(())
    }
}

/// Samples `H(n, k, p)` from stream 0 of `params.seed`.
pub fn sample(params: &ModelParams) -> Result<Hypergraph, ModelError> {
    sample_stream(params, 0)
}

/// Samples `H(n, k, p)` from stream `stream` of `params.seed`.
pub fn sample_stream(params: &ModelParams, stream: u64) -> Result<Hypergraph, ModelError> {
    params.validate()?;
    sample_with(params.n, params.k, params.p, &mut stream_rng(params.seed, stream))
}

fn universe_size(n: usize, k: usize) -> Result<u64, ModelError> {
    binomial(n as u64, k as u64).filter(|&c| c < 1 << 63).ok_or(ModelError::Capacity { n, k })
}

/// Samples `H(n, k, p)` from an explicit generator.
///
/// Walks the colex-ranked universe of k-subsets with geometric skips, so the
/// cost is proportional to the number of edges drawn. Edges come out in
/// colex order.
pub fn sample_with(n: usize, k: usize, p: f64, rng: &mut StreamRng) -> Result<Hypergraph, ModelError> {
    ModelParams { n, k, p, seed: 0 }.validate()?;
    let total = universe_size(n, k)?;
    if p == 0.0 {
        return Ok(Hypergraph::from_flat_unchecked(n, k, Vec::new()));
    }
    let table = BinomialTable::new(n, k);
    let mut flat = Vec::with_capacity(((total as f64 * p * 1.1) as usize + 16).min(1 << 24) * k);
    let mut buf = vec![0u32; k];
    let ln_q = (-p).ln_1p();
    let mut next: u64 = 0;
    loop {
        if p < 1.0 {
            // number of failures before the next success, Geometric(p)
            let u: f64 = 1.0 - rng.random::<f64>();
            let skip = (u.ln() / ln_q).floor();
            if skip >= (total - next) as f64 {
                break;
            }
            next += skip as u64;
        }
        if next >= total {
            break;
        }
        table.unrank_colex(next, &mut buf);
        flat.extend_from_slice(&buf);
        next += 1;
    }
    Ok(Hypergraph::from_flat_unchecked(n, k, flat))
}

/// Samples one hypergraph per entry of `ps` from shared per-edge uniforms:
/// edge `e` is in sample `j` iff `U_e < ps[j]`. For `p1 <= p2` the first
/// sample is a subhypergraph of the second.
///
/// Draws one uniform for every k-subset, so it is limited to universes of
/// at most [`COUPLED_MAX_UNIVERSE`].
pub fn sample_coupled(n: usize, k: usize, ps: &[f64], seed: u64) -> Result<Vec<Hypergraph>, ModelError> {
    for &p in ps {
        ModelParams { n, k, p, seed }.validate()?;
    }
    let total = universe_size(n, k)?;
    if total > COUPLED_MAX_UNIVERSE {
        return Err(ModelError::CoupledCapacity { n, k, size: total, limit: COUPLED_MAX_UNIVERSE });
    }
    let table = BinomialTable::new(n, k);
    let mut rng = stream_rng(seed, 0);
    let mut flats = vec![Vec::new(); ps.len()];
    let mut buf = vec![0u32; k];
    for rank in 0..total {
        let u: f64 = rng.random();
        table.unrank_colex(rank, &mut buf);
        for (flat, &p) in flats.iter_mut().zip(ps) {
            if u < p {
                flat.extend_from_slice(&buf);
            }
        }
    }
    Ok(flats.into_iter().map(|f| Hypergraph::from_flat_unchecked(n, k, f)).collect())
}

/// `C(n, k) p`.
pub fn expected_edge_count(params: &ModelParams) -> f64 {
    crate::combinatorics::ln_choose(params.n as f64, params.k as f64).exp() * params.p
}

/// `P(X >= EX + λ) <= exp(-λ² / (2 (EX + λ/3)))` for a binomial `X`.
pub fn chernoff_tail(mean: f64, lambda: f64) -> Result<f64, ModelError> {
    if !(mean >= 0.0) {
        return Err(ModelError::InvalidParams(format!("mean must be nonnegative, got {mean}")));
    }
    if !(lambda > 0.0) {
        return Err(ModelError::InvalidParams(format!("lambda must be positive, got {lambda}")));
    }
    Ok((-lambda * lambda / (2.0 * (mean + lambda / 3.0))).exp())
}

/// The edge probability `½ r^(k-1) / k^(1+φ(k)) · n / C(n, k)` below which
/// `H(n, k, p)` is r-colorable with high probability.
pub fn theorem2_p(n: usize, k: usize, r: usize) -> Result<LogValue, ModelError> {
    Ok(bounds::evaluate_threshold_bound(BoundId::Thm2, &ThresholdParams::new(n as u64, k as u64, r as u64))?)
}

/// The side condition `r^(k-1) k^(-φ(k)) >= 6 ln n` on `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeCondition {
    /// `r^(k-1) k^(-φ(k))`.
    pub value: LogValue,
    pub six_ln_n: f64,
    pub holds: bool,
}

pub fn expected_max_degree_threshold(n: usize, k: usize, r: usize) -> Result<DegreeCondition, ModelError> {
    if k < 3 || r < 2 {
        return Err(ModelError::InvalidParams(format!("need k >= 3 and r >= 2, got k = {k}, r = {r}")));
    }
    let value = bounds::evaluate_degree_bound(BoundId::Thm3, k as u64, r as u64)?;
    let six_ln_n = 6.0 * (n as f64).ln();
    Ok(DegreeCondition { value, six_ln_n, holds: value.ln() >= six_ln_n.ln() })
}
