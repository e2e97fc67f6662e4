//! The region interface and deterministic, chunked sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points are generated in chunks of this size; chunk `c` draws from
/// stream `c` of the seeded generator, so results do not depend on the
/// thread count and `sample(n)` is a prefix of `sample(n + k)`.
pub const CHUNK: usize = 1024;

/// Minimum acceptance rate tolerated by rejection sampling.
pub const MIN_ACCEPTANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Interior,
    Boundary,
    Barycentric,
}

impl std::str::FromStr for SampleMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior" => Ok(SampleMode::Interior),
            "boundary" => Ok(SampleMode::Boundary),
            "barycentric" => Ok(SampleMode::Barycentric),
            _ => Err(Error::InvalidInput(format!("unknown sample mode {s:?}"))),
        }
    }
}

pub trait Region: Sync {
    fn dim(&self) -> usize;
    /// Membership with tolerance applied to the raw defining polynomials.
    fn contains(&self, x: &[f64], tol: f64) -> bool;
    /// Defining-polynomial violation of `x` (zero inside).
    fn residual(&self, x: &[f64]) -> f64;
    fn sample(&self, n: usize, seed: u64, mode: SampleMode) -> Result<Vec<Vec<f64>>>;
    fn bbox(&self) -> Option<(Vec<f64>, Vec<f64>)>;
    /// A nearby point of the region, when a cheap projection exists.
    fn project(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }
    /// Distinguished extreme points (polytope vertices), added to nets.
    fn extreme_points(&self) -> Vec<Vec<f64>> {
        Vec::new()
    }
}

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `gen(rng, count)` per chunk in parallel and concatenates in order.
pub fn chunked<F>(n: usize, seed: u64, gen: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Result<Vec<Vec<f64>>> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<Vec<f64>>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(n - c * CHUNK);
            let mut rng = stream_rng(seed, c as u64);
            gen(&mut rng, count)
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Rejection sampling inside a box.
pub fn rejection<F>(
    n: usize,
    seed: u64,
    lo: &[f64],
    hi: &[f64],
    accept: F,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    chunked(n, seed, |rng, count| {
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            let x: Vec<f64> = lo
                .iter()
                .zip(hi)
                .map(|(a, b)| a + (b - a) * rand::Rng::random::<f64>(rng))
                .collect();
            if accept(&x) {
                out.push(x);
            } else if attempts >= 1_000_000
                && (out.len() as f64) < attempts as f64 * MIN_ACCEPTANCE
            {
                return Err(Error::RejectionBudget {
                    accepted: out.len(),
                    attempts,
                });
            }
        }
        Ok(out)
    })
}

pub fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

/// Uniform point on the unit sphere `S^{d-1}`.
pub fn unit_sphere(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let g = gaussian(rng, d);
        let n = crate::linalg::norm(&g);
        if n > 1e-12 {
            return g.iter().map(|x| x / n).collect();
        }
    }
}

/// Symmetric Dirichlet(1) weights, i.e. uniform on the standard simplex.
pub fn dirichlet(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| x / s).collect()
}
