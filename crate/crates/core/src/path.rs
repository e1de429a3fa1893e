//! Fixation trajectories of the beneficial allele.
//!
//! Two generators are provided: the discrete haploid Wright-Fisher model and
//! an Euler-Maruyama discretisation of
//! `dX = (theta/2 + alpha X)(1 - X) dt + sqrt(X(1 - X)) dW`.
//! Time is measured in units of `N` generations, so a Wright-Fisher path has
//! grid spacing `1/N`.
//!
//! For `theta >= 1` zero is an entrance boundary of the diffusion and the
//! last-zero time is pinned to the start of the path, even if a finite
//! population happens to touch zero again.

use std::io::Write;

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SweepParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelTag {
    DiscreteWf,
    EulerMaruyama,
}

/// Whether zero can be revisited after the recorded last zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroBoundary {
    /// `theta < 1`: the recorded index is the true last visit to zero.
    Accessible,
    /// `theta >= 1`: the last zero is the start of the path by convention.
    Entrance,
}

impl ZeroBoundary {
    pub fn for_theta(theta: f64) -> Self {
        if theta >= 1.0 {
            ZeroBoundary::Entrance
        } else {
            ZeroBoundary::Accessible
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyPath {
    times: Vec<f64>,
    values: Vec<f64>,
    t0_index: usize,
    fixation_index: usize,
    model: ModelTag,
    boundary: ZeroBoundary,
    pop_size: Option<u64>,
}

impl FrequencyPath {
    /// Builds a path and checks every structural invariant.
    pub fn new(
        times: Vec<f64>,
        values: Vec<f64>,
        t0_index: usize,
        model: ModelTag,
        boundary: ZeroBoundary,
        pop_size: Option<u64>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidPath(m));
        if times.len() != values.len() || times.is_empty() {
            return bad(format!("{} times for {} values", times.len(), values.len()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("times are not strictly increasing".into());
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return bad("frequency outside [0, 1]".into());
        }
        let fixation_index = match values.iter().position(|&v| v >= 1.0) {
            Some(i) => i,
            None => return Err(Error::IncompletePath("frequency never reaches 1".into())),
        };
        if t0_index >= fixation_index {
            return bad(format!("last zero {t0_index} not before fixation {fixation_index}"));
        }
        if values[t0_index] != 0.0 {
            return bad(format!("value at last zero index {t0_index} is {}", values[t0_index]));
        }
        if boundary == ZeroBoundary::Entrance && t0_index != 0 {
            return bad("entrance boundary requires the last zero at the start".into());
        }
        if boundary == ZeroBoundary::Accessible && values[t0_index + 1..fixation_index].iter().any(|&v| v <= 0.0) {
            return bad("zero visited after the recorded last zero".into());
        }
        Ok(FrequencyPath { times, values, t0_index, fixation_index, model, boundary, pop_size })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn t0_index(&self) -> usize {
        self.t0_index
    }

    pub fn fixation_index(&self) -> usize {
        self.fixation_index
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    pub fn boundary(&self) -> ZeroBoundary {
        self.boundary
    }

    /// Population size of a Wright-Fisher path.
    pub fn pop_size(&self) -> Option<u64> {
        self.pop_size
    }

    /// The segment between the last zero and fixation, reversed:
    /// `(beta, X_{T - beta})` for `beta` from 0 to `T - T0`. It starts at 1
    /// and ends at 0.
    pub fn reversed_segment(&self) -> Vec<(f64, f64)> {
        let t = self.times[self.fixation_index];
        (self.t0_index..=self.fixation_index).rev().map(|i| (t - self.times[i], self.values[i])).collect()
    }

    /// Writes `time,frequency` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "frequency"])?;
        for (t, x) in self.times.iter().zip(&self.values) {
            w.write_record([t.to_string(), x.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Last-zero time, conditioned fixation time and fixation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathTimes {
    pub t0: f64,
    pub tstar: f64,
    pub t: f64,
}

pub fn decompose_path(path: &FrequencyPath) -> Result<PathTimes> {
    let n = path.values.len();
    if path.fixation_index >= n || path.values[path.fixation_index] < 1.0 {
        return Err(Error::IncompletePath("no fixation point".into()));
    }
    let t = path.times[path.fixation_index];
    let t0 = path.times[path.t0_index];
    Ok(PathTimes { t0, tstar: t - t0, t })
}

pub const DEFAULT_GENERATION_BUDGET: u64 = 1_000_000_000;

/// Forward simulation of the haploid Wright-Fisher model with selection and
/// recurrent mutation, started with the beneficial allele absent.
#[derive(Debug, Clone)]
pub struct WrightFisher {
    params: SweepParams,
    generation_budget: u64,
    keep_prehistory: bool,
}

impl WrightFisher {
    pub fn new(params: SweepParams) -> Self {
        WrightFisher { params, generation_budget: DEFAULT_GENERATION_BUDGET, keep_prehistory: false }
    }

    pub fn generation_budget(mut self, budget: u64) -> Self {
        self.generation_budget = budget;
        self
    }

    /// Keep the generations before the last zero. They are dropped by
    /// default since nothing downstream reads them.
    pub fn keep_prehistory(mut self, keep: bool) -> Self {
        self.keep_prehistory = keep;
        self
    }

    /// One trajectory from `X = 0` to fixation.
    ///
    /// With `theta = 0` nothing ever arrives by mutation, so a single mutant
    /// is seeded and the run restarts whenever it is lost; the returned path
    /// is conditioned on fixation of the last seeded copy.
    pub fn simulate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<FrequencyPath> {
        let n = self.params.pop_size();
        let nf = n as f64;
        let theta = self.params.theta();
        let rates = self.params.per_generation(n);
        let boundary = ZeroBoundary::for_theta(theta);
        let hard_sweep = theta == 0.0;

        let mut times = vec![0.0];
        let mut values = vec![0.0];
        let mut t0_index = 0;
        let mut k: u64 = 0;
        let mut generation: u64 = 0;

        while k < n {
            if generation >= self.generation_budget {
                return Err(Error::GenerationBudgetExceeded { budget: self.generation_budget });
            }
            k = if hard_sweep && k == 0 {
                1
            } else {
                let p = rates.offspring_frequency(k as f64 / nf);
                Binomial::new(n, p).expect("probability in [0, 1]").sample(rng)
            };
            generation += 1;
            let t = generation as f64 / nf;
            if k == 0 && boundary == ZeroBoundary::Accessible && !self.keep_prehistory {
                times.clear();
                values.clear();
            }
            times.push(t);
            values.push(k as f64 / nf);
            if k == 0 && boundary == ZeroBoundary::Accessible {
                t0_index = times.len() - 1;
            }
        }
        FrequencyPath::new(times, values, t0_index, ModelTag::DiscreteWf, boundary, Some(n))
    }
}

/// Convenience wrapper over [`WrightFisher::simulate`] with default settings.
pub fn simulate_wf_path<R: Rng + ?Sized>(params: &SweepParams, rng: &mut R) -> Result<FrequencyPath> {
    WrightFisher::new(params.clone()).simulate(rng)
}

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000_000;

/// Euler-Maruyama integration of the allele-frequency diffusion.
#[derive(Debug, Clone)]
pub struct EulerMaruyama {
    params: SweepParams,
    dt: f64,
    step_budget: u64,
}

impl EulerMaruyama {
    /// Step size defaults to `0.01 / alpha`.
    pub fn new(params: SweepParams) -> Self {
        let dt = 1e-2 / params.alpha();
        EulerMaruyama { params, dt, step_budget: DEFAULT_STEP_BUDGET }
    }

    pub fn dt(mut self, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step must be > 0, got {dt}")));
        }
        self.dt = dt;
        Ok(self)
    }

    pub fn step_budget(mut self, budget: u64) -> Self {
        self.step_budget = budget;
        self
    }

    /// One trajectory from `X = 0` to absorption at 1.
    ///
    /// Proposals below 0 are clamped to 0 and the drift `theta/2` moves the
    /// path off again. With `theta = 0` a copy at frequency `1/N` is seeded
    /// as in the Wright-Fisher generator and the run restarts if it is lost.
    pub fn simulate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<FrequencyPath> {
        let alpha = self.params.alpha();
        let theta = self.params.theta();
        let seed_freq = 1.0 / self.params.pop_size() as f64;
        let boundary = ZeroBoundary::for_theta(theta);
        let hard_sweep = theta == 0.0;
        let dt = self.dt;
        let sqrt_dt = dt.sqrt();

        let mut times = vec![0.0];
        let mut values = vec![0.0];
        let mut t0_index = 0;
        let mut x: f64 = 0.0;
        let mut step: u64 = 0;

        while x < 1.0 {
            if step >= self.step_budget {
                return Err(Error::StepBudgetExceeded { budget: self.step_budget });
            }
            x = if hard_sweep && x == 0.0 {
                seed_freq
            } else {
                let z: f64 = StandardNormal.sample(rng);
                let drift = (0.5 * theta + alpha * x) * (1.0 - x);
                let noise = (x * (1.0 - x)).max(0.0).sqrt() * sqrt_dt * z;
                (x + drift * dt + noise).clamp(0.0, 1.0)
            };
            step += 1;
            let t = step as f64 * dt;
            if x == 0.0 && boundary == ZeroBoundary::Accessible {
                times.clear();
                values.clear();
            }
            times.push(t);
            values.push(x);
            if x == 0.0 && boundary == ZeroBoundary::Accessible {
                t0_index = times.len() - 1;
            }
        }
        FrequencyPath::new(times, values, t0_index, ModelTag::EulerMaruyama, boundary, None)
    }
}

pub fn simulate_diffusion_path<R: Rng + ?Sized>(params: &SweepParams, dt: f64, rng: &mut R) -> Result<FrequencyPath> {
    EulerMaruyama::new(params.clone()).dt(dt)?.simulate(rng)
}
