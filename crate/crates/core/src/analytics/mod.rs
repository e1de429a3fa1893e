//! Closed-form heterozygosity and fixation-time results, plus quadrature of
//! the diffusion Green functions.

pub mod green;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use green::{GreenFnContext, GreenKind};
pub use quadrature::{integrate, QuadResult, QuadSettings};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Which levels enter the harmonic sum of the survival probability
/// `p(i1, i2) = exp(-c * sum 1/(i + theta))` of a branch spanning `i1..i2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelSum {
    /// `i` runs over `i1 + 1..=i2`.
    #[default]
    Exclusive,
    /// `i` runs over `i1..=i2`; a branch always carries its start level.
    Inclusive,
}

/// How `gamma` is obtained from `rho` when comparing against the star-like
/// formula.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoScaling {
    /// `gamma = rho ln(alpha) / alpha`.
    #[default]
    LogAlpha,
    /// `gamma = rho (ln(2 alpha) + euler) / alpha`, i.e. `2 gamma = rho E[T*]`.
    SweepDuration,
}

pub fn gamma_from_rho(alpha: f64, rho: f64, scaling: RhoScaling) -> f64 {
    match scaling {
        RhoScaling::LogAlpha => rho * alpha.ln() / alpha,
        RhoScaling::SweepDuration => rho * ((2.0 * alpha).ln() + EULER_GAMMA) / alpha,
    }
}

/// Branch survival probabilities on a Yule forest with `levels` lines.
///
/// `intensity` is the per-unit-harmonic-sum marking rate `gamma / ln(alpha)`.
#[derive(Debug, Clone)]
pub struct LevelWeights {
    // prefix[i] = sum_{j=1}^{i} 1/(j + theta)
    prefix: Vec<f64>,
    theta: f64,
    intensity: f64,
    sum: LevelSum,
}

impl LevelWeights {
    pub fn new(levels: usize, theta: f64, intensity: f64, sum: LevelSum) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParams(format!("theta must be >= 0, got {theta}")));
        }
        if !(intensity >= 0.0 && intensity.is_finite()) {
            return Err(Error::InvalidParams(format!("marking intensity must be >= 0, got {intensity}")));
        }
        let mut prefix = Vec::with_capacity(levels + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for j in 1..=levels {
            acc += 1.0 / (j as f64 + theta);
            prefix.push(acc);
        }
        Ok(LevelWeights { prefix, theta, intensity, sum })
    }

    /// Weights for the forest of a sweep with selection `alpha`: `floor(2 alpha)`
    /// levels and intensity `gamma / ln(alpha)`.
    pub fn for_sweep(alpha: f64, theta: f64, gamma: f64, sum: LevelSum) -> Result<Self> {
        let levels = yule_levels(alpha)?;
        let intensity = if gamma == 0.0 { 0.0 } else { gamma / alpha.ln() };
        if gamma != 0.0 && alpha <= 1.0 {
            return Err(Error::InvalidParams(format!("need alpha > 1 with recombination, got {alpha}")));
        }
        Self::new(levels, theta, intensity, sum)
    }

    pub fn levels(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn convention(&self) -> LevelSum {
        self.sum
    }

    /// Probability that a branch from level `i1` to `i2` carries no mark.
    pub fn p(&self, i1: usize, i2: usize) -> Result<f64> {
        if i1 > i2 {
            return Err(Error::ReversedLevels { from: i1, to: i2 });
        }
        if i1 == 0 || i2 > self.levels() {
            return Err(Error::InvalidArgument(format!("levels must lie in 1..={}, got ({i1}, {i2})", self.levels())));
        }
        Ok(self.p_unchecked(i1, i2))
    }

    pub(crate) fn p_unchecked(&self, i1: usize, i2: usize) -> f64 {
        let mut h = self.prefix[i2] - self.prefix[i1];
        if self.sum == LevelSum::Inclusive {
            h += 1.0 / (i1 as f64 + self.theta);
        }
        (-self.intensity * h).exp()
    }

    /// `p(i, levels)`.
    pub fn to_top(&self, i: usize) -> f64 {
        self.p_unchecked(i, self.levels())
    }
}

pub fn yule_levels(alpha: f64) -> Result<usize> {
    if !(alpha.is_finite() && alpha >= 0.5) {
        return Err(Error::InvalidParams(format!("need floor(2 alpha) >= 1, got alpha = {alpha}")));
    }
    Ok((2.0 * alpha).floor() as usize)
}

/// Unmarked probability of a branch spanning levels `i1..i2`, summing
/// `1/(i + theta)` over `i1 + 1..=i2`.
pub fn p_between(i1: usize, i2: usize, gamma: f64, theta: f64, alpha: f64) -> Result<f64> {
    if i1 > i2 {
        return Err(Error::ReversedLevels { from: i1, to: i2 });
    }
    if i1 == 0 {
        return Err(Error::InvalidArgument("levels start at 1".into()));
    }
    LevelWeights::new(i2, theta, gamma / alpha.ln(), LevelSum::Exclusive)?.p(i1, i2)
}

/// An asymptotic probability that may have been pulled back into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Clamped {
    pub value: f64,
    pub raw: f64,
    pub clamped: bool,
}

impl Clamped {
    fn new(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Clamped { value, raw, clamped: value != raw }
    }
}

/// Heterozygosity ratio at fixation from the marked Yule approximation.
pub fn het_ratio_yule(alpha: f64, theta: f64, gamma: f64) -> Result<Clamped> {
    het_ratio_yule_with(&LevelWeights::for_sweep(alpha, theta, gamma, LevelSum::Exclusive)?)
}

pub fn het_ratio_yule_with(w: &LevelWeights) -> Result<Clamped> {
    let theta = w.theta();
    if w.intensity() == 0.0 {
        return Ok(Clamped::new(theta / (theta + 1.0)));
    }
    let top = w.levels();
    let p1 = w.to_top(1);
    let mut corr = 0.0;
    for i in 2..=top {
        let x = i as f64 + theta;
        let pi = w.to_top(i);
        corr += (2.0 * i as f64 + theta) / (x * x * (x + 1.0)) * pi * pi;
    }
    let raw = 1.0 - p1 * p1 / (theta + 1.0) - 2.0 * w.intensity() * corr;
    Ok(Clamped::new(raw))
}

/// Star-like approximation `1 - exp(-2 gamma)/(theta + 1)`.
pub fn het_ratio_star(theta: f64, gamma: f64) -> Result<f64> {
    if !(theta >= 0.0 && gamma >= 0.0 && theta.is_finite() && gamma.is_finite()) {
        return Err(Error::InvalidParams(format!("need theta, gamma >= 0, got {theta}, {gamma}")));
    }
    Ok(1.0 - (-2.0 * gamma).exp() / (theta + 1.0))
}

/// Exact probability that a pair sampled from the marked forest is in one
/// block of the marked partition.
pub fn pair_partition_prob_exact(alpha: f64, theta: f64, gamma: f64) -> Result<f64> {
    pair_partition_prob_exact_with(&LevelWeights::for_sweep(alpha, theta, gamma, LevelSum::Exclusive)?)
}

/// Only defined for [`LevelSum::Exclusive`], where the weights of the
/// branches along a lineage multiply to `p(i, levels)`.
pub fn pair_partition_prob_exact_with(w: &LevelWeights) -> Result<f64> {
    if w.convention() != LevelSum::Exclusive {
        return Err(Error::InvalidArgument("the exact pair sum needs exclusive level sums".into()));
    }
    let theta = w.theta();
    let top = w.levels();
    // log of prod_{j=i+1}^{top} (j-1)(j+2+theta) / ((j+theta)(j+1))
    let mut log_tail: f64 = 0.0;
    let mut total = 0.0;
    for i in (1..=top).rev() {
        let pi = w.to_top(i);
        let fi = i as f64;
        total += 2.0 * pi * pi / ((fi + theta) * (fi + 1.0)) * log_tail.exp();
        if i > 1 {
            log_tail += ((fi - 1.0) * (fi + 2.0 + theta)).ln() - ((fi + theta) * (fi + 1.0)).ln();
        }
    }
    Ok(total)
}

pub const DEFAULT_SERIES_TERMS: usize = 1_000_000;

/// `sum_{n>=1} 1/(n (n + theta))`, the first `terms` summed directly and the
/// remainder replaced by a midpoint integral.
pub fn mutation_series(theta: f64, terms: usize) -> f64 {
    let direct: f64 = (1..=terms).rev().map(|n| 1.0 / (n as f64 * (n as f64 + theta))).sum();
    let m = terms as f64 + 0.5;
    let tail = if theta == 0.0 { 1.0 / m } else { (theta / m).ln_1p() / theta };
    direct + tail
}

/// Mean fixation time of the sweep from frequency 0, in units of `N`
/// generations.
pub fn expected_t(alpha: f64, theta: f64, series_terms: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if theta == 0.0 {
        return Err(Error::DivergentExpectation);
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParams(format!("theta must be > 0, got {theta}")));
    }
    let s = mutation_series(theta, series_terms);
    Ok(((2.0 * alpha).ln() * 2.0 + 2.0 * EULER_GAMMA + 1.0 / theta - theta * s) / alpha)
}

/// Mean duration of the sweep after its last visit to 0.
pub fn expected_tstar(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(2.0 / alpha * ((2.0 * alpha).ln() + EULER_GAMMA))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("alpha must be > 0, got {alpha}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMethod {
    Series,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub alpha: f64,
    pub theta: f64,
    /// Infinite when `theta = 0`.
    pub expected_t: f64,
    pub expected_tstar: f64,
    /// Order of `Var[T*]`: `1/alpha^2`.
    pub variance_tstar_scale: f64,
    pub method: MomentMethod,
}

pub fn moment_report(alpha: f64, theta: f64, method: MomentMethod) -> Result<MomentReport> {
    let (et, ets) = match method {
        MomentMethod::Series => {
            let et = match expected_t(alpha, theta, DEFAULT_SERIES_TERMS) {
                Err(Error::DivergentExpectation) => f64::INFINITY,
                r => r?,
            };
            (et, expected_tstar(alpha)?)
        }
        MomentMethod::Quadrature => {
            let ctx = GreenFnContext::new(alpha, theta)?;
            let et = match ctx.integrated_t() {
                Err(Error::DivergentExpectation) => f64::INFINITY,
                r => r?,
            };
            (et, ctx.integrated_tstar()?)
        }
    };
    Ok(MomentReport {
        alpha,
        theta,
        expected_t: et,
        expected_tstar: ets,
        variance_tstar_scale: 1.0 / (alpha * alpha),
        method,
    })
}
