//! Green functions of the sweep diffusion `dX = (alpha X(1-X) + theta/2 (1-X)) dt
//! + sqrt(X(1-X)) dW` and the fixation probability, by quadrature.
//!
//! Everything is written in terms of `psi(y) = y^-theta exp(-2 alpha y)` up
//! to a constant, shifted so that no exponent overflows.

use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, QuadSettings};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreenKind {
    /// Unconditioned process started at `p`, run until it first hits 1.
    T,
    /// Process conditioned to fix before returning to 0.
    TStar,
    /// Time reversal of the conditioned process, started at `p`.
    TStarStar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenFnContext {
    alpha: f64,
    theta: f64,
    settings: QuadSettings,
    // int_0^1 psi, if finite
    total_mass: Option<f64>,
}

impl GreenFnContext {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        Self::with_settings(alpha, theta, QuadSettings::default())
    }

    pub fn with_settings(alpha: f64, theta: f64, settings: QuadSettings) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha must be > 0, got {alpha}")));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParams(format!("theta must be >= 0, got {theta}")));
        }
        if !(settings.abs_tol > 0.0) || settings.rel_tol < 0.0 || settings.max_subdivisions == 0 {
            return Err(Error::InvalidParams("quadrature tolerance must be > 0".into()));
        }
        let mut ctx = GreenFnContext { alpha, theta, settings, total_mass: None };
        if theta < 1.0 {
            ctx.total_mass = Some(ctx.mass(0.0, 1.0, 0.0)?);
        }
        Ok(ctx)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn settings(&self) -> &QuadSettings {
        &self.settings
    }

    fn scale_breaks(&self, from: f64) -> Vec<f64> {
        let h = 1.0 / (2.0 * self.alpha);
        [1.0, 4.0, 16.0, 64.0].iter().map(|k| from + k * h).collect()
    }

    /// `int_a^b y^-theta exp(-2 alpha (y - shift)) dy`; infinite when the
    /// lower limit is 0 and `theta >= 1`.
    pub fn mass(&self, a: f64, b: f64, shift: f64) -> Result<f64> {
        let (alpha, theta) = (self.alpha, self.theta);
        if a >= b {
            return Ok(0.0);
        }
        if a > 0.0 || theta == 0.0 {
            let f = |y: f64| y.powf(-theta) * (-2.0 * alpha * (y - shift)).exp();
            return Ok(integrate(f, a, b, &self.scale_breaks(a), &self.settings)?.value);
        }
        if theta >= 1.0 {
            return Ok(f64::INFINITY);
        }
        // y = z^q removes the y^-theta singularity at 0
        let q = 1.0 / (1.0 - theta);
        let f = |z: f64| q * (-2.0 * alpha * (z.powf(q) - shift)).exp();
        let breaks: Vec<f64> = self.scale_breaks(0.0).into_iter().map(|y| y.powf(1.0 / q)).collect();
        Ok(integrate(f, 0.0, b.powf(1.0 / q), &breaks, &self.settings)?.value)
    }

    /// `int_lo^1 exp(-2 alpha (y - x)) (x/y)^theta dy`, i.e. `int_lo^1 psi / psi(x)`.
    fn tail(&self, x: f64, lo: f64) -> Result<f64> {
        let (alpha, theta) = (self.alpha, self.theta);
        let f = |y: f64| (-2.0 * alpha * (y - x)).exp() * (x / y).powf(theta);
        Ok(integrate(f, lo, 1.0, &self.scale_breaks(lo), &self.settings)?.value)
    }

    /// Probability of fixation before absorption at 0 from frequency `p`.
    pub fn fixation_prob(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("p must lie in [0, 1], got {p}")));
        }
        let Some(total) = self.total_mass else {
            return Ok(1.0);
        };
        if p == 0.0 {
            return Ok(0.0);
        }
        if p == 1.0 {
            return Ok(1.0);
        }
        Ok((self.mass(0.0, p, 0.0)? / total).min(1.0))
    }

    /// `int_x^1 psi / int_p^1 psi` for `p <= x`.
    fn upper_ratio(&self, x: f64, p: f64) -> Result<f64> {
        let num = self.mass(x, 1.0, p)?;
        let den = self.mass(p, 1.0, p)?;
        Ok(if den.is_infinite() { 0.0 } else { num / den })
    }

    pub fn density(&self, kind: GreenKind, x: f64, p: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::InvalidArgument(format!("x must lie in (0, 1), got {x}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("p must lie in [0, 1], got {p}")));
        }
        let scale = 2.0 / (x * (1.0 - x));
        let v = match kind {
            GreenKind::T => scale * self.tail(x, x.max(p))?,
            GreenKind::TStar => {
                if self.total_mass.is_none() {
                    scale * self.tail(x, x.max(p))?
                } else if p <= x {
                    scale * self.tail(x, x)? * self.fixation_prob(x)?
                } else {
                    let px = self.fixation_prob(x)?;
                    let ratio = self.mass(0.0, x, 0.0)? / self.mass(0.0, p, 0.0)?;
                    scale * self.tail(x, p)? * px * ratio
                }
            }
            GreenKind::TStarStar => {
                let base = scale * self.tail(x, x)?;
                if x <= p {
                    base * self.fixation_prob(x)?
                } else {
                    base * self.fixation_prob(p)? * self.upper_ratio(x, p)?
                }
            }
        };
        if !v.is_finite() || v < 0.0 {
            return Err(Error::QuadratureNonConvergence { estimate: v, error: f64::NAN });
        }
        Ok(v)
    }

    fn outer_breaks(&self) -> Vec<f64> {
        let h = 1.0 / (2.0 * self.alpha);
        let mut b: Vec<f64> = [1.0, 4.0, 16.0, 64.0].iter().map(|k| k * h).collect();
        b.extend([64.0, 16.0, 4.0, 1.0].iter().map(|k| 1.0 - k * h));
        b.push(0.5);
        b
    }

    /// `int_0^1 t(x; 0) dx`, the mean fixation time from 0.
    pub fn integrated_t(&self) -> Result<f64> {
        if self.theta == 0.0 {
            return Err(Error::DivergentExpectation);
        }
        let theta = self.theta;
        let g = |x: f64| self.density(GreenKind::T, x, 0.0);
        if theta >= 1.0 {
            return self.outer(g, &self.outer_breaks());
        }
        // x = z^(1/theta) absorbs the x^(theta-1) growth at 0
        let inv = 1.0 / theta;
        let h = |z: f64| {
            let x = z.powf(inv);
            if x <= 0.0 {
                // t(x; 0) x^(1-theta) tends to 2 int_0^1 psi here
                return self.tail_limit_at_zero().map(|c| c * inv);
            }
            g(x).map(|v| v * inv * z.powf(inv - 1.0))
        };
        let breaks: Vec<f64> = self.outer_breaks().into_iter().map(|x| x.powf(theta)).collect();
        self.outer(h, &breaks)
    }

    fn tail_limit_at_zero(&self) -> Result<f64> {
        let m = self.total_mass.ok_or(Error::DivergentExpectation)?;
        Ok(2.0 * m)
    }

    /// `int_0^1 t*(x; 0) dx`, the mean of `T* = T - T0`.
    pub fn integrated_tstar(&self) -> Result<f64> {
        self.outer(|x| self.density(GreenKind::TStar, x, 0.0), &self.outer_breaks())
    }

    /// `int_0^1 t**(x; 1) dx`, the same mean computed along the reversed path.
    pub fn integrated_tstar_reversed(&self) -> Result<f64> {
        self.outer(|x| self.density(GreenKind::TStarStar, x, 1.0), &self.outer_breaks())
    }

    fn outer<F: Fn(f64) -> Result<f64>>(&self, f: F, breaks: &[f64]) -> Result<f64> {
        let failure = std::cell::RefCell::new(None);
        let wrapped = |x: f64| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        let outer = QuadSettings { rel_tol: self.settings.rel_tol * 10.0, ..self.settings };
        let r = integrate(wrapped, 0.0, 1.0, breaks, &outer)?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(r.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{expected_t, expected_tstar, DEFAULT_SERIES_TERMS};

    #[test]
    fn fixation_prob_boundaries_and_closed_form() {
        let ctx = GreenFnContext::new(1000.0, 0.0).unwrap();
        assert_eq!(ctx.fixation_prob(0.0).unwrap(), 0.0);
        assert_eq!(ctx.fixation_prob(1.0).unwrap(), 1.0);
        let v = ctx.fixation_prob(0.0005).unwrap();
        assert!((v - (1.0 - (-1f64).exp())).abs() < 1e-10);
        assert!((v - 0.63212).abs() < 1e-5);
        assert!(ctx.fixation_prob(1.5).is_err());
    }

    #[test]
    fn inaccessible_zero_fixes_surely() {
        let ctx = GreenFnContext::new(100.0, 1.0).unwrap();
        assert_eq!(ctx.fixation_prob(0.0).unwrap(), 1.0);
        assert_eq!(ctx.fixation_prob(0.3).unwrap(), 1.0);
    }

    #[test]
    fn fixation_prob_monotone_in_p_and_theta() {
        let thetas = [0.0, 0.2, 0.5, 0.8];
        let ctxs: Vec<_> = thetas.iter().map(|&t| GreenFnContext::new(50.0, t).unwrap()).collect();
        let mut prev_row = vec![0.0; 40];
        for ctx in &ctxs {
            let mut prev = 0.0;
            for (k, slot) in prev_row.iter_mut().enumerate() {
                let p = (k as f64 + 0.5) / 400.0;
                let v = ctx.fixation_prob(p).unwrap();
                assert!(v >= prev - 1e-12);
                assert!(v >= *slot - 1e-12);
                prev = v;
                *slot = v;
            }
        }
    }

    #[test]
    fn t_density_is_positive_and_rejects_endpoints() {
        let ctx = GreenFnContext::new(200.0, 0.5).unwrap();
        for k in 1..50 {
            let x = k as f64 / 50.0;
            assert!(ctx.density(GreenKind::T, x, 0.0).unwrap() > 0.0);
            assert!(ctx.density(GreenKind::TStar, x, 0.3).unwrap() > 0.0);
            assert!(ctx.density(GreenKind::TStarStar, x, 0.3).unwrap() > 0.0);
        }
        assert!(ctx.density(GreenKind::T, 0.0, 0.0).is_err());
        assert!(ctx.density(GreenKind::T, 1.0, 0.0).is_err());
    }

    #[test]
    fn t_density_matches_closed_form_without_mutation() {
        // theta = 0: int_x^1 exp(-2a(y-x)) dy = (1 - exp(-2a(1-x)))/(2a)
        let a = 30.0;
        let ctx = GreenFnContext::new(a, 0.0).unwrap();
        for x in [0.01, 0.2, 0.7, 0.99] {
            let want = 2.0 / (x * (1.0 - x)) * -(-2.0 * a * (1.0 - x)).exp_m1() / (2.0 * a);
            let got = ctx.density(GreenKind::T, x, 0.0).unwrap();
            assert!(((got - want) / want).abs() < 1e-10);
        }
    }

    #[test]
    fn conditioned_density_is_continuous_at_start() {
        let ctx = GreenFnContext::new(100.0, 0.3).unwrap();
        let p = 0.2;
        let below = ctx.density(GreenKind::TStar, p - 1e-9, p).unwrap();
        let above = ctx.density(GreenKind::TStar, p + 1e-9, p).unwrap();
        assert!(((below - above) / above).abs() < 1e-6);
    }

    #[test]
    fn reversed_density_from_one_equals_conditioned_from_zero() {
        let ctx = GreenFnContext::new(100.0, 0.4).unwrap();
        for x in [0.001, 0.1, 0.5, 0.95] {
            let a = ctx.density(GreenKind::TStar, x, 0.0).unwrap();
            let b = ctx.density(GreenKind::TStarStar, x, 1.0).unwrap();
            assert!(((a - b) / a).abs() < 1e-10);
        }
    }

    #[test]
    fn integrated_moments_follow_series() {
        let ctx = GreenFnContext::new(200.0, 1.0).unwrap();
        let et = ctx.integrated_t().unwrap();
        let series = expected_t(200.0, 1.0, DEFAULT_SERIES_TERMS).unwrap();
        assert!(((et - series) / series).abs() < 1e-2);

        let ctx = GreenFnContext::new(200.0, 0.5).unwrap();
        let ets = ctx.integrated_tstar().unwrap();
        let want = expected_tstar(200.0).unwrap();
        assert!(((ets - want) / want).abs() < 1e-2, "{ets} vs {want}");
        let rev = ctx.integrated_tstar_reversed().unwrap();
        assert!(((rev - ets) / ets).abs() < 1e-8);
        assert!(GreenFnContext::new(200.0, 0.0).unwrap().integrated_t().is_err());
    }

    #[test]
    fn rejects_bad_settings() {
        let s = QuadSettings { abs_tol: 0.0, ..QuadSettings::default() };
        assert!(GreenFnContext::with_settings(10.0, 0.1, s).is_err());
        assert!(GreenFnContext::new(-1.0, 0.1).is_err());
    }
}
