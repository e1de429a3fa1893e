//! Experiment configuration, replicate orchestration and result tables.
//!
//! Every replicate draws from its own stream keyed by `(seed, cell, index)`,
//! so results do not depend on the number of worker threads.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{
    expected_t, expected_tstar, gamma_from_rho, het_ratio_star, het_ratio_yule_with, pair_partition_prob_exact_with,
    GreenFnContext, LevelSum, LevelWeights, RhoScaling, DEFAULT_SERIES_TERMS,
};
use crate::coalescent::{run_backward, BackwardOptions, EventCounts};
use crate::error::{Error, Result};
use crate::params::{SweepParams, DEFAULT_POP_SIZE};
use crate::path::{decompose_path, simulate_diffusion_path, simulate_wf_path};
use crate::rng::replicate_rng;
use crate::stats::{sample_variance, Estimate};
use crate::yule::YuleSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    HetCompare,
    FixationTimes,
    YuleVsCoalescent,
    GreenCheck,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::HetCompare => "het-compare",
            Mode::FixationTimes => "fixation-times",
            Mode::YuleVsCoalescent => "yule-vs-coalescent",
            Mode::GreenCheck => "green-check",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathModel {
    #[default]
    Wf,
    Diffusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub alpha: f64,
    pub theta: f64,
    pub rho: Option<f64>,
    pub gamma: Option<f64>,
    pub pop_size: u64,
    pub sample_size: usize,
    pub replicates: usize,
    pub seed: u64,
    pub theta_grid: Option<Vec<f64>>,
    pub rho_grid: Option<Vec<f64>>,
    pub model: PathModel,
    /// Harmonic sum convention for the Yule formulas.
    pub level_sum: LevelSum,
    /// `gamma` used in the star-like column.
    pub star_scaling: RhoScaling,
    /// Skip simulation and emit only the formula columns.
    pub curve: bool,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Left out of the emitted header: results do not depend on it.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::HetCompare,
            alpha: 1000.0,
            theta: 0.0,
            rho: None,
            gamma: None,
            pop_size: DEFAULT_POP_SIZE,
            sample_size: 2,
            replicates: 1000,
            seed: 0,
            theta_grid: None,
            rho_grid: None,
            model: PathModel::Wf,
            level_sum: LevelSum::Inclusive,
            star_scaling: RhoScaling::SweepDuration,
            curve: false,
            output: None,
            format: OutputFormat::Csv,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        ExperimentConfig { mode, ..Default::default() }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.replicates == 0 && !(self.curve || self.mode == Mode::GreenCheck) {
            return bad("replicates must be >= 1");
        }
        if self.rho.is_some() && self.gamma.is_some() {
            return bad("give rho or gamma, not both");
        }
        if self.theta_grid.as_ref().is_some_and(Vec::is_empty) {
            return bad("theta grid is empty");
        }
        if self.rho_grid.as_ref().is_some_and(Vec::is_empty) {
            return bad("rho grid is empty");
        }
        if self.workers == Some(0) {
            return bad("workers must be >= 1");
        }
        for &theta in self.thetas().iter() {
            for &rho in self.rhos().iter() {
                self.params_for(theta, rho).map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.theta_grid.clone().unwrap_or_else(|| vec![self.theta])
    }

    /// The `rho` grid, or the single `rho` (derived from `gamma` if needed).
    pub fn rhos(&self) -> Vec<f64> {
        if let Some(g) = &self.rho_grid {
            return g.clone();
        }
        match (self.rho, self.gamma) {
            (Some(r), _) => vec![r],
            (None, Some(g)) if g > 0.0 => vec![g * self.alpha / self.alpha.ln()],
            _ => vec![0.0],
        }
    }

    pub fn params_for(&self, theta: f64, rho: f64) -> Result<SweepParams> {
        SweepParams::new(self.alpha, theta)?
            .with_rho(rho)?
            .with_pop_size(self.pop_size)?
            .with_sample_size(self.sample_size)
            .map(|p| p.with_seed(self.seed))
    }
}

/// Per-replicate record of a forward path and, optionally, its genealogy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub replicate_index: usize,
    pub pair_distinct: Option<bool>,
    pub t: f64,
    pub t0: f64,
    pub tstar: f64,
    pub event_counts: Option<EventCounts>,
    /// Distinct ancestors of the sample at the last zero.
    pub ancestors: Option<usize>,
}

/// Simulates one path on stream `(seed, cell, index)` and, if asked, traces
/// the sample back along it.
pub fn run_replicate(
    params: &SweepParams,
    model: PathModel,
    cell: u32,
    index: usize,
    genealogy: Option<&BackwardOptions>,
) -> Result<ReplicateSummary> {
    let mut rng = replicate_rng(params.seed(), cell, index as u32);
    let path = match model {
        PathModel::Wf => simulate_wf_path(params, &mut rng)?,
        PathModel::Diffusion => simulate_diffusion_path(params, 0.01 / params.alpha(), &mut rng)?,
    };
    let times = decompose_path(&path)?;
    let mut summary = ReplicateSummary {
        replicate_index: index,
        pair_distinct: None,
        t: times.t,
        t0: times.t0,
        tstar: times.tstar,
        event_counts: None,
        ancestors: None,
    };
    if let Some(options) = genealogy {
        let run = run_backward(&path, params, options, &mut rng)?;
        summary.ancestors = Some(run.state.partition().len());
        if params.sample_size() == 2 {
            summary.pair_distinct = Some(run.pair_distinct());
        }
        summary.event_counts = Some(run.log.counts());
    }
    Ok(summary)
}

/// Successful replicates of one cell plus the failure count.
#[derive(Debug, Clone)]
pub struct CellRun {
    pub summaries: Vec<ReplicateSummary>,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CellRun {
    /// Errors when more than 1% of replicates failed.
    pub fn check(&self) -> Result<()> {
        let total = self.summaries.len() + self.failures;
        if self.failures * 100 > total {
            return Err(Error::ReplicateFailures {
                failed: self.failures,
                total,
                first: self.first_failure.clone().unwrap_or_default(),
            });
        }
        Ok(())
    }
}

/// Runs `replicates` independent replicates of a cell in parallel.
pub fn run_cell(
    params: &SweepParams,
    model: PathModel,
    cell: u32,
    replicates: usize,
    genealogy: Option<&BackwardOptions>,
) -> CellRun {
    let results: Vec<Result<ReplicateSummary>> =
        (0..replicates).into_par_iter().map(|i| run_replicate(params, model, cell, i, genealogy)).collect();
    let mut summaries = Vec::with_capacity(replicates);
    let mut failures = 0;
    let mut first_failure = None;
    for r in results {
        match r {
            Ok(s) => summaries.push(s),
            Err(e) => {
                failures += 1;
                first_failure.get_or_insert_with(|| e.to_string());
            }
        }
    }
    CellRun { summaries, failures, first_failure }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub mode: Mode,
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    /// `None` marks a value that does not exist, such as a divergent mean.
    pub rows: Vec<Vec<Option<f64>>>,
    pub replicate_failures: usize,
}

impl ResultTable {
    fn new(config: &ExperimentConfig, columns: &[&str]) -> Self {
        ResultTable {
            mode: config.mode,
            config: config.clone(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            replicate_failures: 0,
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Value in `row` under column `name`.
    pub fn get(&self, row: usize, name: &str) -> Option<f64> {
        self.rows.get(row)?.get(self.column(name)?).copied().flatten()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "# mode: {}", self.mode.name()).expect("string write");
        writeln!(out, "# config: {}", serde_json::to_string(&self.config)?).expect("string write");
        writeln!(out, "# seed: {}", self.config.seed).expect("string write");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.map_or_else(String::new, |x| x.to_string())))?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        out.push_str(&String::from_utf8(body).expect("csv is utf-8"));
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Writes `table` to `path`.
pub fn emit(table: &ResultTable, format: OutputFormat, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::InvalidArgument("refusing to emit an empty table".into()));
    }
    fs::write(path, table.render(format)?)?;
    Ok(())
}

/// Validates `config`, runs it on `config.workers` threads (all cores if
/// unset) and returns the aggregated table.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| match config.mode {
        Mode::HetCompare => het_compare(config),
        Mode::FixationTimes => fixation_times(config),
        Mode::YuleVsCoalescent => yule_vs_coalescent(config),
        Mode::GreenCheck => green_check(config),
    })
}

fn grid(config: &ExperimentConfig) -> Vec<(u32, f64, f64)> {
    let mut cells = Vec::new();
    for theta in config.thetas() {
        for rho in config.rhos() {
            cells.push((cells.len() as u32, theta, rho));
        }
    }
    cells
}

fn weights_for(config: &ExperimentConfig, theta: f64, rho: f64) -> Result<LevelWeights> {
    let gamma = gamma_from_rho(config.alpha, rho, RhoScaling::LogAlpha);
    LevelWeights::for_sweep(config.alpha, theta, gamma, config.level_sum)
}

fn het_compare(config: &ExperimentConfig) -> Result<ResultTable> {
    let columns: &[&str] = if config.curve {
        &["theta", "rho", "eq12", "eq14"]
    } else {
        &["theta", "rho", "wf_mean", "wf_se", "eq12", "eq14", "n_replicates"]
    };
    let mut table = ResultTable::new(config, columns);
    let options = BackwardOptions::default();
    for (cell, theta, rho) in grid(config) {
        let eq12 = het_ratio_yule_with(&weights_for(config, theta, rho)?)?.value;
        let eq14 = het_ratio_star(theta, gamma_from_rho(config.alpha, rho, config.star_scaling))?;
        if config.curve {
            table.rows.push(vec![Some(theta), Some(rho), Some(eq12), Some(eq14)]);
            continue;
        }
        let params = config.params_for(theta, rho)?.with_sample_size(2)?;
        let run = run_cell(&params, config.model, cell, config.replicates, Some(&options));
        run.check()?;
        table.replicate_failures += run.failures;
        let distinct = run.summaries.iter().filter(|s| s.pair_distinct == Some(true)).count();
        let est = Estimate::proportion(distinct, run.summaries.len());
        table.rows.push(vec![
            Some(theta),
            Some(rho),
            Some(est.mean),
            Some(est.std_error),
            Some(eq12),
            Some(eq14),
            Some(est.n as f64),
        ]);
    }
    Ok(table)
}

fn fixation_times(config: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(
        config,
        &[
            "alpha",
            "theta",
            "t_mean",
            "t_se",
            "t0_mean",
            "tstar_mean",
            "tstar_se",
            "tstar_var_alpha2",
            "eq8",
            "eq9",
            "n_replicates",
        ],
    );
    let rho = config.rhos()[0];
    for (cell, theta) in config.thetas().into_iter().enumerate() {
        let params = config.params_for(theta, rho)?;
        let run = run_cell(&params, config.model, cell as u32, config.replicates, None);
        run.check()?;
        table.replicate_failures += run.failures;
        let t: Vec<f64> = run.summaries.iter().map(|s| s.t).collect();
        let t0: Vec<f64> = run.summaries.iter().map(|s| s.t0).collect();
        let ts: Vec<f64> = run.summaries.iter().map(|s| s.tstar).collect();
        let (et, ets) = (Estimate::mean_of(&t), Estimate::mean_of(&ts));
        let eq8 = match expected_t(config.alpha, theta, DEFAULT_SERIES_TERMS) {
            Ok(v) => Some(v),
            Err(Error::DivergentExpectation) => None,
            Err(e) => return Err(e),
        };
        // with theta = 0 the path starts at its last zero, so T is T*
        table.rows.push(vec![
            Some(config.alpha),
            Some(theta),
            Some(et.mean),
            Some(et.std_error),
            Some(Estimate::mean_of(&t0).mean),
            Some(ets.mean),
            Some(ets.std_error),
            Some(sample_variance(&ts) * config.alpha * config.alpha),
            eq8,
            Some(expected_tstar(config.alpha)?),
            Some(et.n as f64),
        ]);
    }
    Ok(table)
}

fn yule_vs_coalescent(config: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(
        config,
        &[
            "theta",
            "rho",
            "coalescent_mean",
            "coalescent_se",
            "yule_mc_mean",
            "yule_mc_se",
            "exact",
            "eq12",
            "n_replicates",
        ],
    );
    let options = BackwardOptions::default();
    for (cell, theta, rho) in grid(config) {
        let w = weights_for(config, theta, rho)?;
        let params = config.params_for(theta, rho)?.with_sample_size(2)?;
        let run = run_cell(&params, config.model, cell, config.replicates, Some(&options));
        run.check()?;
        table.replicate_failures += run.failures;
        let distinct = run.summaries.iter().filter(|s| s.pair_distinct == Some(true)).count();
        let coal = Estimate::proportion(distinct, run.summaries.len());
        let gamma = gamma_from_rho(config.alpha, rho, RhoScaling::LogAlpha);
        let sampler = YuleSampler::new(config.alpha, theta, gamma, config.level_sum)?;
        // offset the Yule streams so they never coincide with the path streams
        let same = sampler.pair_identity(config.replicates, config.seed, cell + (1 << 16))?;
        table.rows.push(vec![
            Some(theta),
            Some(rho),
            Some(coal.mean),
            Some(coal.std_error),
            Some(1.0 - same.mean),
            Some(same.std_error),
            match w.convention() {
                LevelSum::Exclusive => Some(1.0 - pair_partition_prob_exact_with(&w)?),
                LevelSum::Inclusive => None,
            },
            Some(het_ratio_yule_with(&w)?.value),
            Some(coal.n as f64),
        ]);
    }
    Ok(table)
}

fn green_check(config: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = ResultTable::new(
        config,
        &["alpha", "theta", "quad_t", "eq8", "rel_err_t", "quad_tstar", "eq9", "rel_err_tstar", "fixprob_max_err"],
    );
    let thetas = config.thetas();
    let rows: Vec<Result<Vec<Option<f64>>>> = thetas
        .par_iter()
        .map(|&theta| {
            let ctx = GreenFnContext::new(config.alpha, theta)?;
            let (qt, e8) = if theta > 0.0 {
                (Some(ctx.integrated_t()?), Some(expected_t(config.alpha, theta, DEFAULT_SERIES_TERMS)?))
            } else {
                (None, None)
            };
            let qts = ctx.integrated_tstar()?;
            let e9 = expected_tstar(config.alpha)?;
            let fix_err = if theta == 0.0 { Some(fixation_closed_form_error(&ctx)?) } else { None };
            let rel = |a: Option<f64>, b: Option<f64>| Some((a? - b?).abs() / b?);
            Ok(vec![
                Some(config.alpha),
                Some(theta),
                qt,
                e8,
                rel(qt, e8),
                Some(qts),
                Some(e9),
                rel(Some(qts), Some(e9)),
                fix_err,
            ])
        })
        .collect();
    for r in rows {
        table.rows.push(r?);
    }
    Ok(table)
}

/// Largest gap between quadrature and `(1 - e^{-2 alpha p})/(1 - e^{-2 alpha})`
/// over 100 interior points; meaningful for `theta = 0`.
pub fn fixation_closed_form_error(ctx: &GreenFnContext) -> Result<f64> {
    let a = ctx.alpha();
    let mut worst: f64 = 0.0;
    for k in 1..=100 {
        let p = k as f64 / 101.0;
        let exact = (-2.0 * a * p).exp_m1() / (-2.0 * a).exp_m1();
        worst = worst.max((ctx.fixation_prob(p)? - exact).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(mode: Mode) -> ExperimentConfig {
        ExperimentConfig {
            mode,
            alpha: 100.0,
            theta: 0.5,
            rho: Some(5.0),
            pop_size: 2000,
            replicates: 40,
            seed: 9,
            ..Default::default()
        }
    }

    #[test]
    fn empty_grid_is_a_config_error() {
        let mut c = small(Mode::HetCompare);
        c.rho_grid = Some(vec![]);
        assert!(matches!(run_experiment(&c), Err(Error::Config(_))));
        let mut c = small(Mode::HetCompare);
        c.replicates = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn het_compare_columns_and_row_count() {
        let mut c = small(Mode::HetCompare);
        c.theta_grid = Some(vec![0.0, 1.0]);
        c.rho_grid = Some(vec![2.0, 10.0]);
        let t = run_experiment(&c).unwrap();
        assert_eq!(t.columns, ["theta", "rho", "wf_mean", "wf_se", "eq12", "eq14", "n_replicates"]);
        assert_eq!(t.rows.len(), 4);
        assert_eq!(t.get(3, "n_replicates"), Some(40.0));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let mut c = small(Mode::HetCompare);
        c.workers = Some(1);
        let one = run_experiment(&c).unwrap().to_csv().unwrap();
        c.workers = Some(4);
        let four = run_experiment(&c).unwrap();
        // the config echo differs only in the worker count
        let mut four_cfg = four.clone();
        four_cfg.config.workers = Some(1);
        assert_eq!(one, four_cfg.to_csv().unwrap());
    }

    #[test]
    fn json_round_trip() {
        let mut c = small(Mode::FixationTimes);
        c.theta_grid = Some(vec![0.0, 0.5]);
        let t = run_experiment(&c).unwrap();
        assert_eq!(t.get(0, "eq8"), None);
        let back = ResultTable::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn csv_header_embeds_config() {
        let mut c = small(Mode::HetCompare);
        c.curve = true;
        let csv = run_experiment(&c).unwrap().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# mode: het-compare"));
        assert!(lines.next().unwrap().starts_with("# config: {"));
        assert_eq!(lines.next(), Some("# seed: 9"));
        assert_eq!(lines.next(), Some("theta,rho,eq12,eq14"));
    }

    #[test]
    fn toml_config_parses() {
        let c = ExperimentConfig::from_toml_str(
            "mode = \"fixation-times\"\nalpha = 200.0\ntheta_grid = [0.0, 1.0]\nreplicates = 10\n",
        )
        .unwrap();
        assert_eq!(c.mode, Mode::FixationTimes);
        assert_eq!(c.thetas(), vec![0.0, 1.0]);
        assert_eq!(c.pop_size, DEFAULT_POP_SIZE);
        assert!(ExperimentConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn failure_accounting_threshold() {
        let ok = CellRun { summaries: vec![], failures: 0, first_failure: None };
        assert!(ok.check().is_ok());
        let s = ReplicateSummary {
            replicate_index: 0,
            pair_distinct: None,
            t: 1.0,
            t0: 0.5,
            tstar: 0.5,
            event_counts: None,
            ancestors: None,
        };
        let run = CellRun { summaries: vec![s; 99], failures: 1, first_failure: Some("x".into()) };
        assert!(run.check().is_ok());
        let run = CellRun { summaries: run.summaries[..98].to_vec(), failures: 2, first_failure: Some("x".into()) };
        assert!(matches!(run.check(), Err(Error::ReplicateFailures { failed: 2, total: 100, .. })));
    }

    #[test]
    fn replicate_times_add_up() {
        let p = SweepParams::new(200.0, 0.3).unwrap().with_pop_size(5000).unwrap();
        for i in 0..20 {
            let s = run_replicate(&p, PathModel::Wf, 0, i, Some(&BackwardOptions::default())).unwrap();
            assert!((s.t - s.t0 - s.tstar).abs() < 1e-12);
            assert!(s.pair_distinct.is_some());
        }
    }
}
