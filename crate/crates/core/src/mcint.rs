//! Plain Monte Carlo over the open unit cube with seeded, splittable
//! streams, and assembly of ε-series coefficients with statistical errors.
//!
//! Samples are drawn in fixed-size chunks. Chunk `k` of stream `s` reads the
//! ChaCha8 keystream of `(seed, s)` from a fixed word offset, and chunk
//! statistics are merged in chunk order. The result therefore does not
//! depend on the number of worker threads.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decomp::FiniteIntegrand;
use crate::rational::{to_f64, Q};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "FEYNSEC_THREADS";

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(u64),
    #[error("integrand is {value} at {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },
    #[error("bad {THREADS_ENV} value {0:?}")]
    Threads(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MCConfig {
    pub samples: u64,
    pub seed: u64,
}

impl MCConfig {
    pub fn new(samples: u64, seed: u64) -> Result<Self, McError> {
        if samples < 2 {
            return Err(McError::TooFewSamples(samples));
        }
        Ok(MCConfig { samples, seed })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
}

#[derive(Clone, Copy, Debug)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    const EMPTY: Moments = Moments {
        n: 0,
        mean: 0.0,
        m2: 0.0,
    };

    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * (o.n as f64 / n as f64),
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64 / n as f64),
        }
    }
}

/// Uniform draw in the open interval (0, 1).
#[inline]
fn open_unit(r: u64) -> f64 {
    ((r >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

fn chunk(
    f: &crate::decomp::CompiledIntegrand,
    dim: usize,
    cfg: &MCConfig,
    stream: u64,
    k: u64,
) -> Result<Moments, McError> {
    let start = k * CHUNK;
    let count = CHUNK.min(cfg.samples - start);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    rng.set_word_pos(start as u128 * dim as u128 * 2);
    let mut scratch = f.scratch();
    let mut x = vec![0.0; dim];
    let mut m = Moments::EMPTY;
    for _ in 0..count {
        for v in x.iter_mut() {
            *v = open_unit(rng.next_u64());
        }
        let y = f.eval(&x, &mut scratch);
        if !y.is_finite() {
            return Err(McError::NonFinite { point: x, value: y });
        }
        m.push(y);
    }
    Ok(m)
}

/// Plain Monte Carlo estimate of `∫_{[0,1]^dim} f` on substream `stream`.
pub fn integrate(f: &FiniteIntegrand, cfg: &MCConfig, stream: u64) -> Result<MCEstimate, McError> {
    if cfg.samples < 2 {
        return Err(McError::TooFewSamples(cfg.samples));
    }
    let dim = f.dim();
    let compiled = f.compile();
    let nchunks = cfg.samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..nchunks)
        .into_par_iter()
        .map(|k| chunk(&compiled, dim, cfg, stream, k))
        .collect::<Result<_, _>>()?;
    let m = parts.into_iter().fold(Moments::EMPTY, Moments::merge);
    let var = m.m2 / (m.n - 1) as f64;
    Ok(MCEstimate {
        mean: m.mean,
        stderr: (var / m.n as f64).sqrt(),
        n: m.n,
    })
}

/// Runs `job` on a pool sized by `FEYNSEC_THREADS`, or the default pool if
/// the variable is unset.
pub fn with_thread_pool<T: Send>(job: impl FnOnce() -> T + Send) -> Result<T, McError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| McError::Threads(v.clone()))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| McError::Threads(e.to_string()))?;
            Ok(pool.install(job))
        }
        Err(_) => Ok(job()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Contribution {
    Exact(Q),
    Estimate(MCEstimate),
}

/// Truncated Laurent series: order → (coefficient, standard error).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EpsSeries {
    coeffs: BTreeMap<i32, (f64, f64)>,
}

impl EpsSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, order: i32, value: f64, error: f64) {
        self.coeffs.insert(order, (value, error));
    }

    pub fn get(&self, order: i32) -> Option<(f64, f64)> {
        self.coeffs.get(&order).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn lowest(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn highest(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64, f64)> + '_ {
        self.coeffs.iter().map(|(&o, &(c, e))| (o, c, e))
    }

    /// Inserts `0 ± 0` for missing orders in `lo..=hi`.
    pub fn fill(&mut self, lo: i32, hi: i32) {
        for o in lo..=hi {
            self.coeffs.entry(o).or_insert((0.0, 0.0));
        }
    }
}

/// Sums contributions per order. Exact parts are added exactly first;
/// statistical errors combine in quadrature.
pub fn assemble(items: &[(i32, Contribution)]) -> EpsSeries {
    let mut exact: BTreeMap<i32, Q> = BTreeMap::new();
    let mut est: BTreeMap<i32, (f64, f64)> = BTreeMap::new();
    for (o, c) in items {
        match c {
            Contribution::Exact(v) => *exact.entry(*o).or_insert_with(Q::zero) += v,
            Contribution::Estimate(e) => {
                let slot = est.entry(*o).or_insert((0.0, 0.0));
                slot.0 += e.mean;
                slot.1 += e.stderr * e.stderr;
            }
        }
    }
    let mut out = EpsSeries::new();
    for (o, v) in &exact {
        out.insert(*o, to_f64(v), 0.0);
    }
    for (o, (m, v2)) in est {
        let base = exact.get(&o).map(to_f64).unwrap_or(0.0);
        out.insert(o, base + m, v2.sqrt());
    }
    out
}
