//! The two-background structured coalescent, run backward along a stored
//! frequency path from fixation (`beta = 0`) to the last zero
//! (`beta0 = T - T0`).
//!
//! Within one grid cell the beneficial frequency is held at the value of the
//! parental (earlier) grid point and events are drawn as competing
//! exponentials. On Wright-Fisher paths, cells where the beneficial copy
//! count is small are resolved by exact parent sampling instead, which keeps
//! the `1/X` rates finite and sends every remaining beneficial line to a
//! mutation event at the founding generation. Above that threshold the
//! mutation rate of a beneficial line is the per-generation fraction of
//! mutant offspring, scaled by `N`, rather than its diffusion limit.
//!
//! On a continuous path without mutation, beneficial lines still apart when
//! the path reaches zero are merged first: the sweep grew from one copy.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{GenerationRates, SweepParams};
use crate::partition::{kingman_path, KingmanStep, Partition};
use crate::path::{decompose_path, simulate_wf_path, FrequencyPath};
use crate::rng::replicate_rng;
use crate::stats::Estimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Background {
    Beneficial,
    Wild,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    #[serde(rename = "coal-B")]
    CoalB,
    #[serde(rename = "coal-b")]
    CoalWild,
    #[serde(rename = "mut-B→b")]
    Mutation,
    #[serde(rename = "rec-B→b")]
    RecToWild,
    #[serde(rename = "rec-b→B")]
    RecToBeneficial,
}

impl EventKind {
    pub const ALL: [EventKind; 5] =
        [EventKind::CoalB, EventKind::CoalWild, EventKind::Mutation, EventKind::RecToWild, EventKind::RecToBeneficial];

    pub fn label(self) -> &'static str {
        match self {
            EventKind::CoalB => "coal-B",
            EventKind::CoalWild => "coal-b",
            EventKind::Mutation => "mut-B→b",
            EventKind::RecToWild => "rec-B→b",
            EventKind::RecToBeneficial => "rec-b→B",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub beta: f64,
    pub kind: EventKind,
    /// Block indices in the source background when the event fired.
    pub participants: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    events: Vec<Event>,
}

/// Number of events of each kind, indexed like [`EventKind::ALL`].
pub type EventCounts = [usize; 5];

impl EventLog {
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn counts(&self) -> EventCounts {
        let mut c = [0; 5];
        for e in &self.events {
            c[e.kind.index()] += 1;
        }
        c
    }

    fn push(&mut self, beta: f64, kind: EventKind, participants: Vec<usize>) {
        self.events.push(Event { beta, kind, participants });
    }

    /// `beta,kind,participants` rows; participants are `;`-separated.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["beta", "kind", "participants"])?;
        for e in &self.events {
            let parts: Vec<String> = e.participants.iter().map(ToString::to_string).collect();
            w.write_record([e.beta.to_string(), e.kind.label().to_string(), parts.join(";")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Ancestral lines of the sample, split by the allele at the selected site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoalescentState {
    beneficial: Vec<Vec<usize>>,
    wild: Vec<Vec<usize>>,
    beta: f64,
    n: usize,
}

impl CoalescentState {
    /// `n` singleton lines, all on the beneficial background, at `beta = 0`.
    pub fn initial(n: usize) -> Self {
        CoalescentState { beneficial: (0..n).map(|i| vec![i]).collect(), wild: Vec::new(), beta: 0.0, n }
    }

    pub fn beneficial(&self) -> &[Vec<usize>] {
        &self.beneficial
    }

    pub fn wild(&self) -> &[Vec<usize>] {
        &self.wild
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    /// All ancestral lines regardless of background.
    pub fn partition(&self) -> Partition {
        Partition::new(self.beneficial.iter().chain(&self.wild).cloned().collect())
    }

    /// The wild-type lines as a partition (what remains once the beneficial
    /// background has emptied).
    pub fn wild_partition(&self) -> Partition {
        Partition::new(self.wild.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) {
            return Err(Error::InvariantViolation(format!("negative beta {}", self.beta)));
        }
        if !self.partition().is_partition_of(self.n) {
            return Err(Error::InvariantViolation(format!(
                "blocks B={:?} b={:?} do not partition 1..{}",
                self.beneficial, self.wild, self.n
            )));
        }
        Ok(())
    }

    fn blocks_mut(&mut self, bg: Background) -> &mut Vec<Vec<usize>> {
        match bg {
            Background::Beneficial => &mut self.beneficial,
            Background::Wild => &mut self.wild,
        }
    }

    fn merge(&mut self, bg: Background, i: usize, j: usize) {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let blocks = self.blocks_mut(bg);
        let moved = blocks.remove(hi);
        blocks[lo].extend(moved);
        blocks[lo].sort_unstable();
    }

    fn switch(&mut self, from: Background, i: usize) {
        let block = self.blocks_mut(from).remove(i);
        let to = match from {
            Background::Beneficial => Background::Wild,
            Background::Wild => Background::Beneficial,
        };
        self.blocks_mut(to).push(block);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMode {
    /// The full rate table, with recombination back into `B` and
    /// coalescence in `b`.
    Full,
    /// Beneficial coalescence at `(1 - X)/X`, no wild-type coalescence and no
    /// recombination back into `B` before `beta0`.
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardOptions {
    pub mode: RateMode,
    /// On Wright-Fisher paths, cells whose parental beneficial count is
    /// below this are resolved by exact parent sampling (full mode only).
    pub discrete_below: u64,
    /// Check partition validity after every event.
    pub validate_events: bool,
}

impl Default for BackwardOptions {
    fn default() -> Self {
        BackwardOptions { mode: RateMode::Full, discrete_below: 50, validate_events: false }
    }
}

impl BackwardOptions {
    pub fn simplified() -> Self {
        BackwardOptions { mode: RateMode::Simplified, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackwardRun {
    pub state: CoalescentState,
    pub log: EventLog,
    /// `T - T0`.
    pub beta0: f64,
}

impl BackwardRun {
    /// For a pair sample: the two lines have distinct ancestors at `beta0`.
    pub fn pair_distinct(&self) -> bool {
        self.state.partition().len() >= 2
    }
}

/// Runs the structured coalescent of `params.sample_size()` lines backward
/// along `path` from fixation to the last zero.
pub fn run_backward<R: Rng + ?Sized>(
    path: &FrequencyPath,
    params: &SweepParams,
    options: &BackwardOptions,
    rng: &mut R,
) -> Result<BackwardRun> {
    let times = decompose_path(path)?;
    let mut engine = Engine {
        state: CoalescentState::initial(params.sample_size()),
        log: EventLog::default(),
        theta: params.theta(),
        rho: params.rho(),
        options: *options,
        wf: path.pop_size().map(|n| (n as f64, params.per_generation(n))),
    };
    let values = path.values();
    let grid = path.times();
    let t_fix = times.t;

    for j in (path.t0_index() + 1..=path.fixation_index()).rev() {
        let x = values[j - 1];
        let beta_start = t_fix - grid[j];
        let beta_end = t_fix - grid[j - 1];
        engine.state.beta = beta_start;
        let wf_count = path.pop_size().map(|n| (n, (x * n as f64).round() as u64));
        match wf_count {
            Some((n, k)) if options.mode == RateMode::Full && k < options.discrete_below => {
                engine.discrete_generation(params, n, k, beta_end, rng)?;
            }
            _ => {
                if x <= 0.0 {
                    if engine.theta == 0.0 {
                        // a hard sweep grows from a single seeded copy
                        engine.merge_founder(beta_start)?;
                    }
                    engine.force_escape(beta_start)?;
                }
                engine.gillespie_cell(x, beta_start, beta_end, rng)?;
            }
        }
        engine.state.beta = beta_end;
    }
    engine.state.beta = times.tstar;
    if engine.options.validate_events {
        engine.state.validate()?;
    }
    Ok(BackwardRun { state: engine.state, log: engine.log, beta0: times.tstar })
}

struct Engine {
    state: CoalescentState,
    log: EventLog,
    theta: f64,
    rho: f64,
    options: BackwardOptions,
    // population size and per-generation probabilities of a Wright-Fisher path
    wf: Option<(f64, GenerationRates)>,
}

fn pairs(k: usize) -> f64 {
    (k * k.saturating_sub(1)) as f64 / 2.0
}

fn random_pair<R: Rng + ?Sized>(k: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.random_range(0..k);
    let mut j = rng.random_range(0..k - 1);
    if j >= i {
        j += 1;
    }
    (i.min(j), i.max(j))
}

impl Engine {
    fn checked(&self) -> Result<()> {
        if self.options.validate_events {
            self.state.validate()
        } else {
            Ok(())
        }
    }

    fn record(&mut self, beta: f64, kind: EventKind, participants: Vec<usize>) -> Result<()> {
        self.log.push(beta, kind, participants);
        self.checked()
    }

    /// Per-kind rates at frequency `x`, in [`EventKind::ALL`] order.
    fn rates(&self, x: f64) -> [f64; 5] {
        let nb_ben = self.state.beneficial.len();
        let nb_wild = self.state.wild.len();
        let full = self.options.mode == RateMode::Full;
        let mut r = [0.0; 5];
        if nb_ben > 0 {
            let odds = (1.0 - x) / x;
            r[0] = pairs(nb_ben) * if full { 1.0 / x } else { odds };
            let per_line = match self.wf {
                // exact per-generation mutant fraction, per unit time
                Some((n, g)) if full => n * g.mutant_fraction(x),
                _ => 0.5 * self.theta * odds,
            };
            r[2] = nb_ben as f64 * per_line;
            r[3] = nb_ben as f64 * self.rho * (1.0 - x);
        }
        if full && nb_wild > 0 {
            r[1] = pairs(nb_wild) / (1.0 - x);
            r[4] = nb_wild as f64 * self.rho * x;
        }
        r
    }

    fn gillespie_cell<R: Rng + ?Sized>(&mut self, x: f64, from: f64, to: f64, rng: &mut R) -> Result<()> {
        let mut beta = from;
        loop {
            let rates = self.rates(x);
            let total: f64 = rates.iter().sum();
            if !(total > 0.0) {
                return Ok(());
            }
            beta += Exp::new(total).expect("positive total rate").sample(rng);
            if beta >= to {
                return Ok(());
            }
            let mut u = rng.random::<f64>() * total;
            let mut pick = 4;
            for (i, r) in rates.iter().enumerate() {
                if u < *r {
                    pick = i;
                    break;
                }
                u -= r;
            }
            while rates[pick] == 0.0 {
                pick -= 1;
            }
            self.apply(EventKind::ALL[pick], beta, rng)?;
        }
    }

    fn apply<R: Rng + ?Sized>(&mut self, kind: EventKind, beta: f64, rng: &mut R) -> Result<()> {
        match kind {
            EventKind::CoalB | EventKind::CoalWild => {
                let bg = if kind == EventKind::CoalB { Background::Beneficial } else { Background::Wild };
                let k = self.state.blocks_mut(bg).len();
                let (i, j) = random_pair(k, rng);
                self.state.merge(bg, i, j);
                self.record(beta, kind, vec![i, j])
            }
            EventKind::Mutation | EventKind::RecToWild => {
                let i = rng.random_range(0..self.state.beneficial.len());
                self.state.switch(Background::Beneficial, i);
                self.record(beta, kind, vec![i])
            }
            EventKind::RecToBeneficial => {
                let i = rng.random_range(0..self.state.wild.len());
                self.state.switch(Background::Wild, i);
                self.record(beta, kind, vec![i])
            }
        }
    }

    /// Every beneficial line at a zero-frequency parental generation is a
    /// fresh mutant.
    fn merge_founder(&mut self, beta: f64) -> Result<()> {
        while self.state.beneficial.len() > 1 {
            self.state.merge(Background::Beneficial, 0, 1);
            self.record(beta, EventKind::CoalB, vec![0, 1])?;
        }
        Ok(())
    }

    fn force_escape(&mut self, beta: f64) -> Result<()> {
        while let Some(i) = self.state.beneficial.len().checked_sub(1) {
            self.state.switch(Background::Beneficial, i);
            self.record(beta, EventKind::Mutation, vec![i])?;
        }
        Ok(())
    }

    /// One Wright-Fisher generation backward: every line picks a parent among
    /// the `k` beneficial or `n - k` wild-type copies of the parental
    /// generation; lines picking the same copy merge.
    fn discrete_generation<R: Rng + ?Sized>(
        &mut self,
        params: &SweepParams,
        n: u64,
        k: u64,
        beta: f64,
        rng: &mut R,
    ) -> Result<()> {
        let x = k as f64 / n as f64;
        let g = params.per_generation(n);
        let mutant = g.mutant_fraction(x);
        let rec_out = g.r * (1.0 - x);
        let rec_in = g.r * x;
        let wild_copies = n - k;

        // parent copy keyed by the smallest sample label of each block
        let mut parent: Vec<(usize, u64)> = Vec::new();

        for i in (0..self.state.beneficial.len()).rev() {
            let key = self.state.beneficial[i][0];
            if k == 0 || rng.random::<f64>() < mutant {
                self.state.switch(Background::Beneficial, i);
                self.record(beta, EventKind::Mutation, vec![i])?;
                parent.push((key, rng.random_range(0..wild_copies)));
            } else if rng.random::<f64>() < rec_out {
                self.state.switch(Background::Beneficial, i);
                self.record(beta, EventKind::RecToWild, vec![i])?;
                parent.push((key, rng.random_range(0..wild_copies)));
            } else {
                parent.push((key, rng.random_range(0..k)));
            }
        }
        // only lines that were wild-type before this generation remain
        let assigned: Vec<usize> = parent.iter().map(|&(key, _)| key).collect();
        for i in (0..self.state.wild.len()).rev() {
            let key = self.state.wild[i][0];
            if assigned.contains(&key) {
                continue;
            }
            if k > 0 && rng.random::<f64>() < rec_in {
                self.state.switch(Background::Wild, i);
                self.record(beta, EventKind::RecToBeneficial, vec![i])?;
                parent.push((key, rng.random_range(0..k)));
            } else {
                parent.push((key, rng.random_range(0..wild_copies)));
            }
        }

        for (bg, kind) in [(Background::Beneficial, EventKind::CoalB), (Background::Wild, EventKind::CoalWild)] {
            loop {
                let blocks = match bg {
                    Background::Beneficial => &self.state.beneficial,
                    Background::Wild => &self.state.wild,
                };
                let copy_of = |b: &Vec<usize>| parent.iter().find(|(key, _)| b.contains(key)).map(|p| p.1);
                let mut hit = None;
                'outer: for i in 0..blocks.len() {
                    for j in i + 1..blocks.len() {
                        if copy_of(&blocks[i]) == copy_of(&blocks[j]) {
                            hit = Some((i, j));
                            break 'outer;
                        }
                    }
                }
                match hit {
                    Some((i, j)) => {
                        self.state.merge(bg, i, j);
                        self.record(beta, kind, vec![i, j])?;
                    }
                    None => break,
                }
            }
        }
        Ok(())
    }
}

/// Continues the genealogy beyond `beta0` as a Kingman coalescent on the
/// wild-type lines. Each step carries the time since `beta0` and the
/// resulting partition of the sample.
pub fn kingman_tail<R: Rng + ?Sized>(state: &CoalescentState, rng: &mut R) -> Result<Vec<KingmanStep>> {
    if !state.beneficial.is_empty() {
        return Err(Error::BeneficialNotEmpty(state.beneficial.len()));
    }
    let base = state.wild_partition();
    Ok(kingman_path(base.len(), rng)
        .into_iter()
        .map(|s| KingmanStep { time: s.time, state: base.compose(&s.state) })
        .collect())
}

/// Monte Carlo estimate of `H_T / H_T0`: the fraction of Wright-Fisher
/// replicates in which a pair sampled at fixation has two distinct ancestors
/// at the last zero. Replicates run in parallel on independent streams.
pub fn estimate_het_ratio(params: &SweepParams, replicates: usize) -> Result<Estimate> {
    if replicates == 0 {
        return Err(Error::InvalidArgument("replicates must be >= 1".into()));
    }
    let params = params.clone().with_sample_size(2)?;
    let options = BackwardOptions::default();
    let distinct: Vec<bool> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(params.seed(), 0, i as u32);
            let path = simulate_wf_path(&params, &mut rng)?;
            Ok(run_backward(&path, &params, &options, &mut rng)?.pair_distinct())
        })
        .collect::<Result<_>>()?;
    Ok(Estimate::proportion(distinct.iter().filter(|&&d| d).count(), replicates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::{ModelTag, ZeroBoundary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn wf(alpha: f64, theta: f64, rho: f64, n: usize) -> SweepParams {
        SweepParams::new(alpha, theta).unwrap().with_rho(rho).unwrap().with_sample_size(n).unwrap()
    }

    fn checked() -> BackwardOptions {
        BackwardOptions { validate_events: true, ..Default::default() }
    }

    #[test]
    fn single_line_always_escapes_by_mutation() {
        let p = wf(1000.0, 0.5, 0.0, 1);
        for i in 0..200 {
            let mut rng = replicate_rng(21, 0, i);
            let path = simulate_wf_path(&p, &mut rng).unwrap();
            let run = run_backward(&path, &p, &checked(), &mut rng).unwrap();
            assert!(run.state.beneficial().is_empty());
            assert_eq!(run.state.wild().len(), 1);
            assert_eq!(run.log.count(EventKind::Mutation), 1);
            assert_eq!(run.log.count(EventKind::RecToWild), 0);
        }
    }

    #[test]
    fn hard_sweep_without_recombination_always_coalesces() {
        let p = wf(1000.0, 0.0, 0.0, 2);
        let mut distinct = 0;
        for i in 0..300 {
            let mut rng = replicate_rng(22, 0, i);
            let path = simulate_wf_path(&p, &mut rng).unwrap();
            let run = run_backward(&path, &p, &checked(), &mut rng).unwrap();
            assert!(run.state.beneficial().is_empty());
            distinct += run.pair_distinct() as usize;
        }
        assert_eq!(distinct, 0);
    }

    #[test]
    fn event_betas_are_ordered_and_bounded() {
        let p = wf(1000.0, 0.5, 30.0, 4);
        let mut rng = replicate_rng(23, 0, 0);
        let path = simulate_wf_path(&p, &mut rng).unwrap();
        let run = run_backward(&path, &p, &checked(), &mut rng).unwrap();
        let betas: Vec<f64> = run.log.events().iter().map(|e| e.beta).collect();
        assert!(betas.windows(2).all(|w| w[0] <= w[1]));
        assert!(betas.iter().all(|&b| (0.0..=run.beta0 + 1e-12).contains(&b)));
        assert_eq!(run.state.beta(), run.beta0);
    }

    #[test]
    fn gillespie_only_runs_keep_partitions_valid() {
        // discrete_below = 0: everything through the continuous engine
        let p = wf(1000.0, 0.3, 20.0, 5);
        let opts = BackwardOptions { discrete_below: 0, validate_events: true, ..Default::default() };
        for i in 0..50 {
            let mut rng = replicate_rng(24, 0, i);
            let path = simulate_wf_path(&p, &mut rng).unwrap();
            let run = run_backward(&path, &p, &opts, &mut rng).unwrap();
            assert!(run.state.beneficial().is_empty());
        }
    }

    #[test]
    fn simplified_mode_never_recombines_back_or_merges_in_wild() {
        let p = wf(1000.0, 0.5, 50.0, 4);
        let opts = BackwardOptions { validate_events: true, ..BackwardOptions::simplified() };
        for i in 0..50 {
            let mut rng = replicate_rng(25, 0, i);
            let path = simulate_wf_path(&p, &mut rng).unwrap();
            let run = run_backward(&path, &p, &opts, &mut rng).unwrap();
            assert_eq!(run.log.count(EventKind::RecToBeneficial), 0);
            assert_eq!(run.log.count(EventKind::CoalWild), 0);
            assert!(run.state.beneficial().is_empty());
        }
    }

    #[test]
    fn diffusion_paths_are_supported() {
        let p = wf(1000.0, 0.5, 10.0, 3);
        for i in 0..20 {
            let mut rng = replicate_rng(26, 0, i);
            let path = crate::path::simulate_diffusion_path(&p, 1e-5, &mut rng).unwrap();
            let run = run_backward(&path, &p, &checked(), &mut rng).unwrap();
            assert!(run.state.beneficial().is_empty());
        }
    }

    #[test]
    fn hand_built_path_forces_escape_at_last_zero() {
        // a path that jumps 0 -> 0.5 -> 1 with no population size
        let path = FrequencyPath::new(
            vec![0.0, 0.01, 0.02],
            vec![0.0, 0.5, 1.0],
            0,
            ModelTag::EulerMaruyama,
            ZeroBoundary::Accessible,
            None,
        )
        .unwrap();
        let p = wf(1000.0, 0.0, 0.0, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let run = run_backward(&path, &p, &checked(), &mut rng).unwrap();
        assert!(run.state.beneficial().is_empty());
        assert!((run.beta0 - 0.02).abs() < 1e-15);
    }

    #[test]
    fn kingman_tail_checks_its_precondition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = CoalescentState::initial(3);
        assert!(matches!(kingman_tail(&s, &mut rng), Err(Error::BeneficialNotEmpty(3))));
    }

    #[test]
    fn kingman_tail_coarsens_to_one_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = CoalescentState { beneficial: vec![], wild: vec![vec![0, 2], vec![1], vec![3]], beta: 0.1, n: 4 };
        let steps = kingman_tail(&s, &mut rng).unwrap();
        assert_eq!(steps.len(), 2);
        assert!(s.wild_partition().refines(&steps[0].state));
        assert_eq!(steps[1].state.len(), 1);

        let single = CoalescentState { beneficial: vec![], wild: vec![vec![0, 1]], beta: 0.1, n: 2 };
        assert!(kingman_tail(&single, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn estimate_without_recombination_or_mutation_is_zero() {
        let p = wf(500.0, 0.0, 0.0, 2).with_seed(5);
        let e = estimate_het_ratio(&p, 50).unwrap();
        assert_eq!(e.mean, 0.0);
        assert!(estimate_het_ratio(&p, 0).is_err());
    }

    #[test]
    fn event_log_csv() {
        let mut log = EventLog::default();
        log.push(0.5, EventKind::CoalB, vec![0, 2]);
        log.push(0.75, EventKind::Mutation, vec![1]);
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "beta,kind,participants\n0.5,coal-B,0;2\n0.75,mut-B→b,1\n");
        assert_eq!(log.counts(), [1, 0, 1, 0, 0]);
    }
}
