//! The shared parameter bundle.
//!
//! All rates are on the diffusion clock: one time unit is `N` generations of
//! the haploid Wright-Fisher model, so `alpha = N s`, `theta = 2 N u` and
//! `rho = N r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of `gamma` and `rho` was supplied; the other one is derived via
/// `rho = gamma * alpha / ln(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecombinationSource {
    Gamma,
    Rho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepParams {
    alpha: f64,
    theta: f64,
    gamma: f64,
    rho: f64,
    source: RecombinationSource,
    pop_size: u64,
    sample_size: usize,
    seed: u64,
}

pub const DEFAULT_POP_SIZE: u64 = 10_000;

impl SweepParams {
    /// Selection intensity and mutation rate with no recombination,
    /// `N = 10^4`, a pair sample and seed 0.
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        let p = SweepParams {
            alpha,
            theta,
            gamma: 0.0,
            rho: 0.0,
            source: RecombinationSource::Rho,
            pop_size: DEFAULT_POP_SIZE,
            sample_size: 2,
            seed: 0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParams(format!("rho must be finite and >= 0, got {rho}")));
        }
        self.rho = rho;
        self.gamma = if rho == 0.0 { 0.0 } else { rho * self.alpha.ln() / self.alpha };
        self.source = RecombinationSource::Rho;
        self.validate()?;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        self.gamma = gamma;
        self.rho = if gamma == 0.0 { 0.0 } else { gamma * self.alpha / self.alpha.ln() };
        self.source = RecombinationSource::Gamma;
        self.validate()?;
        Ok(self)
    }

    pub fn with_pop_size(mut self, pop_size: u64) -> Result<Self> {
        self.pop_size = pop_size;
        self.validate()?;
        Ok(self)
    }

    pub fn with_sample_size(mut self, n: usize) -> Result<Self> {
        self.sample_size = n;
        self.validate()?;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return bad(format!("theta must be >= 0, got {}", self.theta));
        }
        if !(self.rho >= 0.0 && self.gamma >= 0.0) {
            return bad("recombination must be >= 0".into());
        }
        if (self.rho > 0.0 || self.gamma > 0.0) && self.alpha <= 1.0 {
            return bad(format!("converting between rho and gamma needs ln(alpha) > 0, got alpha = {}", self.alpha));
        }
        if self.pop_size < 2 {
            return bad(format!("pop_size must be >= 2, got {}", self.pop_size));
        }
        if self.sample_size < 1 {
            return bad("sample_size must be >= 1".into());
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn source(&self) -> RecombinationSource {
        self.source
    }

    pub fn pop_size(&self) -> u64 {
        self.pop_size
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `gamma / ln(alpha)`, which equals `rho / alpha`: the per-level
    /// recombination weight of the Yule marking.
    pub fn mark_intensity(&self) -> f64 {
        self.rho / self.alpha
    }

    /// Number of Yule lines at the stopping time, `floor(2 alpha)`.
    pub fn yule_levels(&self) -> usize {
        (2.0 * self.alpha).floor() as usize
    }

    /// Per-generation selection, mutation and recombination probabilities
    /// of the Wright-Fisher model with `N` individuals.
    pub fn per_generation(&self, pop_size: u64) -> GenerationRates {
        let n = pop_size as f64;
        GenerationRates { s: self.alpha / n, u: self.theta / (2.0 * n), r: (self.rho / n).min(1.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRates {
    pub s: f64,
    pub u: f64,
    pub r: f64,
}

impl GenerationRates {
    /// Probability that an offspring carries the beneficial allele when the
    /// parental frequency is `x`.
    pub fn offspring_frequency(&self, x: f64) -> f64 {
        let w = (1.0 + self.s) * x;
        ((w + self.u * (1.0 - x)) / (w + 1.0 - x)).clamp(0.0, 1.0)
    }

    /// Among beneficial offspring, the fraction created by a fresh mutation.
    pub fn mutant_fraction(&self, x: f64) -> f64 {
        let fresh = self.u * (1.0 - x);
        let total = (1.0 + self.s) * x + fresh;
        if total <= 0.0 {
            1.0
        } else {
            fresh / total
        }
    }
}
