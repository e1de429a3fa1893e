use serde::{Deserialize, Serialize};

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl Estimate {
    /// Proportion of successes with the binomial standard error.
    pub fn proportion(successes: usize, n: usize) -> Self {
        if n == 0 {
            return Estimate { mean: f64::NAN, std_error: f64::NAN, n };
        }
        let p = successes as f64 / n as f64;
        Estimate { mean: p, std_error: (p * (1.0 - p) / n as f64).sqrt(), n }
    }

    /// Sample mean with standard error `sd / sqrt(n)`.
    pub fn mean_of(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        Estimate { mean, std_error: (sample_variance(xs) / n as f64).sqrt(), n }
    }

    /// Distance to `target` in standard errors.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.std_error
    }

    /// Whether `target` lies within `k` standard errors. A zero standard
    /// error only accepts an exact match.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportion_standard_error() {
        let e = Estimate::proportion(25, 100);
        assert_eq!(e.mean, 0.25);
        assert!((e.std_error - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        assert!(e.within(0.3, 2.0));
        assert!(!e.within(0.4, 3.0));
    }

    #[test]
    fn mean_and_variance() {
        let e = Estimate::mean_of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((sample_variance(&[1.0, 2.0, 3.0, 4.0]) - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(sample_variance(&[3.0]), 0.0);
    }
}
