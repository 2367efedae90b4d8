//! Exact Poisson variates by table inversion.
//!
//! One uniform per draw is compared against the cumulative distribution. Means
//! above [`TABLE_MEAN_LIMIT`] are split into equal parts whose draws are summed,
//! which keeps the distribution exact (sums of independent Poisson variables
//! are Poisson) without long tables or `e^{-λ}` underflow.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::stream::uniform;
use crate::{Error, Result};

/// Largest mean served by a single table.
pub const TABLE_MEAN_LIMIT: f64 = 30.0;

/// Precomputed inverse-CDF sampler for `Poisson(mean)`, optionally capped.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonTable {
    mean: f64,
    /// `cdf[j] = P(X <= j)` for one part.
    cdf: Vec<f64>,
    /// `ceil(cdf[j] * 2^53)`: `u < cdf[j]` exactly when `bits < thresholds[j]`
    /// for `u = bits * 2^-53`.
    thresholds: Vec<u64>,
    parts: u32,
    cap: Option<u32>,
}

impl PoissonTable {
    /// Sampler for `min(X, cap)` with `X ~ Poisson(mean)`.
    pub fn new(mean: f64, cap: Option<u32>) -> Result<Self> {
        if !mean.is_finite() || mean < 0.0 {
            return Err(Error::InvalidInput(alloc::format!(
                "Poisson mean must be finite and >= 0, got {mean}"
            )));
        }
        let parts = if mean > TABLE_MEAN_LIMIT {
            libm::ceil(mean / TABLE_MEAN_LIMIT) as u32
        } else {
            1
        };
        let part_mean = mean / f64::from(parts);
        // A single part only needs entries below the cap.
        let limit = if parts == 1 { cap } else { None };

        let mut cdf = Vec::new();
        if mean > 0.0 && limit != Some(0) {
            let mut p = libm::exp(-part_mean);
            let mut total = p;
            let mut j = 0u32;
            loop {
                cdf.push(total);
                j += 1;
                if limit.is_some_and(|k| j >= k) {
                    break;
                }
                p *= part_mean / f64::from(j);
                let next = total + p;
                if f64::from(j) > part_mean && (next >= 1.0 || next == total) {
                    break;
                }
                total = next;
            }
        }
        let scale = (1u64 << 53) as f64;
        let thresholds = cdf.iter().map(|&c| libm::ceil(c * scale) as u64).collect();
        Ok(Self {
            mean,
            cdf,
            thresholds,
            parts,
            cap,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn is_degenerate(&self) -> bool {
        self.mean == 0.0 || self.cap == Some(0)
    }

    #[inline]
    fn draw_part(&self, rng: &mut impl RngCore) -> u32 {
        let bits = rng.next_u64() >> 11;
        // Small means put almost all mass in the first entries.
        let mut j = 0;
        while j < self.thresholds.len() && bits >= self.thresholds[j] {
            j += 1;
        }
        j as u32
    }

    /// One draw. Consumes one 64-bit word per part, even when degenerate.
    #[inline]
    pub fn draw(&self, rng: &mut impl RngCore) -> u32 {
        let x = if self.parts == 1 {
            self.draw_part(rng)
        } else {
            (0..self.parts).map(|_| self.draw_part(rng)).sum()
        };
        match self.cap {
            Some(k) => x.min(k),
            None => x,
        }
    }
}

/// One `Poisson(mean)` variate. Mean zero always gives zero.
pub fn poisson_draw(mean: f64, rng: &mut impl RngCore) -> Result<u32> {
    Ok(PoissonTable::new(mean, None)?.draw(rng))
}

/// Number of `n` trials that succeed with probability `p`.
pub fn binomial_thin(n: u32, p: f64, rng: &mut impl RngCore) -> u32 {
    if p >= 1.0 {
        return n;
    }
    (0..n).filter(|_| uniform(rng) < p).count() as u32
}
