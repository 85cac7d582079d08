use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use super::stats::{mean, population_std};
use crate::bipartite::{greedy_select, learn_graph};
use crate::curve::selection_curve;
use crate::dataset::{split_dataset, Dataset};
use crate::dp::solve_dp_with_cap;
use crate::error::{Error, Result};
use crate::semivalues::{exact_semivalue, evaluations_per_sample, loo, mc_semivalue, samples_for_budget, SemiValueScheme};
use crate::surrogate::{fit_wls, FitMode, MAX_EXHAUSTIVE_N};
use crate::utilities::ModelUtility;
use crate::utility::{memoize, Budgeted, Utility};
use crate::values::{rank_by_value, values_from_order};

/// Everything one run needs: the utility used to compute values, the one used
/// to score selection curves, and (for `bipartite`) the feature splits.
pub struct RunInputs {
    pub valuation: Arc<dyn Utility>,
    pub evaluation: Arc<dyn Utility>,
    /// Train and validation features, in the space the valuation utility sees.
    pub features: Option<(Dataset, Dataset)>,
}

/// Source of per-run utilities.
pub trait Scenario: Sync {
    fn prepare(&self, run: usize, seed: u64) -> Result<RunInputs>;
}

/// Splits a data pool per run; values come from validation accuracy and
/// curves from test accuracy of the same logistic-regression learner.
pub struct DataScenario {
    pool: Dataset,
    cfg: ExperimentConfig,
}

impl DataScenario {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(Self::from_pool(cfg.dataset.load()?, cfg))
    }

    pub fn from_pool(pool: Dataset, cfg: &ExperimentConfig) -> Self {
        DataScenario { pool, cfg: cfg.clone() }
    }

    pub fn pool(&self) -> &Dataset {
        &self.pool
    }

    /// Valuation and evaluation utilities for one split seed.
    pub fn utilities(&self, seed: u64) -> Result<(ModelUtility, ModelUtility)> {
        let s = self.cfg.splits;
        let sp = split_dataset(&self.pool, s.train, s.valid, s.test, seed)?;
        Ok((
            ModelUtility::new(&sp.train, &sp.valid, self.cfg.trainer)?,
            ModelUtility::new(&sp.train, &sp.test, self.cfg.trainer)?,
        ))
    }
}

impl Scenario for DataScenario {
    fn prepare(&self, _run: usize, seed: u64) -> Result<RunInputs> {
        let (valuation, evaluation) = self.utilities(seed)?;
        let features = Some((valuation.train().clone(), valuation.held_out().clone()));
        Ok(RunInputs { valuation: Arc::new(valuation), evaluation: Arc::new(evaluation), features })
    }
}

/// Fixed utilities for every run (synthetic studies).
pub struct FixedScenario {
    pub valuation: Arc<dyn Utility>,
    pub evaluation: Arc<dyn Utility>,
}

impl Scenario for FixedScenario {
    fn prepare(&self, _run: usize, _seed: u64) -> Result<RunInputs> {
        Ok(RunInputs { valuation: self.valuation.clone(), evaluation: self.evaluation.clone(), features: None })
    }
}

/// One method in one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub run: usize,
    pub seed: u64,
    pub values: Vec<f64>,
    pub ranking: Vec<usize>,
    /// Evaluation utility of the prefixes of `ranking`, `k = 1..n`.
    pub curve: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub mean_curve: Vec<f64>,
    /// Population standard deviation across runs, per prefix size.
    pub std_curve: Vec<f64>,
    pub mean_objective: f64,
    pub std_objective: f64,
    /// Per-run objectives in run order.
    pub objectives: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub methods: Vec<MethodSummary>,
    /// `runs[r][m]` follows the configured method order.
    pub runs: Vec<Vec<RunRecord>>,
    /// Not written to disk.
    pub wall_time: Duration,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    n_runs: usize,
    seeds: &'a [u64],
    methods: &'a [MethodSummary],
}

impl ExperimentResult {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == method)
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SummaryFile {
            n_runs: self.runs.len(),
            seeds: &self.seeds,
            methods: &self.methods,
        })?)
    }

    /// `config.json`, `summary.json`, `curves/<method>.csv`, `runs/<r>/<method>.json`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir.join("curves"))?;
        let mut cfg = self.config.clone();
        cfg.output_dir = None;
        std::fs::write(dir.join("config.json"), cfg.to_json_pretty()? + "\n")?;
        std::fs::write(dir.join("summary.json"), self.summary_json()? + "\n")?;
        for m in &self.methods {
            let mut w = csv::Writer::from_path(dir.join("curves").join(format!("{}.csv", m.method.file_stem())))?;
            w.write_record(["k", "utility", "std"])?;
            for (k, (mu, sd)) in m.mean_curve.iter().zip(&m.std_curve).enumerate() {
                w.write_record([(k + 1).to_string(), format!("{mu:?}"), format!("{sd:?}")])?;
            }
            w.flush()?;
        }
        for (r, records) in self.runs.iter().enumerate() {
            let run_dir = dir.join("runs").join(r.to_string());
            std::fs::create_dir_all(&run_dir)?;
            for rec in records {
                let path = run_dir.join(format!("{}.json", rec.method.file_stem()));
                std::fs::write(path, serde_json::to_string_pretty(rec)? + "\n")?;
            }
        }
        Ok(())
    }
}

/// Values (higher is better) and the induced ranking.
pub fn compute_values(method: Method, inputs: &RunInputs, cfg: &ExperimentConfig, seed: u64) -> Result<(Vec<f64>, Vec<usize>)> {
    let u = inputs.valuation.as_ref();
    let n = u.n();
    let exact_affordable = n <= MAX_EXHAUSTIVE_N && (1usize << n) <= cfg.budget;
    let from_values = |values: Vec<f64>| -> Result<(Vec<f64>, Vec<usize>)> {
        let perm = rank_by_value(&values)?;
        Ok((values, perm))
    };
    match method {
        Method::Dp => {
            let sol = solve_dp_with_cap(&memoize(u), cfg.dp_cap)?;
            Ok((sol.optimal_values.values, sol.optimal_perm))
        }
        Method::Random => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            Ok((values_from_order(&perm), perm))
        }
        Method::Semi(SemiValueScheme::Loo) => {
            if n + 1 > cfg.budget {
                return Err(Error::BudgetExhausted { budget: cfg.budget });
            }
            from_values(loo(u)?.values)
        }
        Method::Semi(scheme) => {
            let budgeted = memoize(Budgeted::new(u, cfg.budget));
            if exact_affordable {
                return from_values(exact_semivalue(&budgeted, scheme)?.values);
            }
            if evaluations_per_sample(scheme, n) > cfg.budget {
                return Err(Error::BudgetExhausted { budget: cfg.budget });
            }
            let samples = samples_for_budget(scheme, n, cfg.budget);
            from_values(mc_semivalue(&budgeted, scheme, samples, seed)?.values.values)
        }
        Method::Wls(kernel) => {
            let budgeted = memoize(Budgeted::new(u, cfg.budget));
            let mode = if exact_affordable {
                FitMode::Exhaustive
            } else if cfg.budget > 2 {
                FitMode::Sampled { m: cfg.budget - 2, seed }
            } else {
                return Err(Error::BudgetExhausted { budget: cfg.budget });
            };
            from_values(fit_wls(&budgeted, kernel, mode)?.theta)
        }
        Method::Bipartite => {
            let (train, valid) = inputs
                .features
                .as_ref()
                .ok_or_else(|| Error::invalid("bipartite selection needs feature data"))?;
            let budgeted = memoize(Budgeted::new(u, cfg.budget));
            let (graph, _) = learn_graph(train, valid, &cfg.graph, &budgeted, seed)?;
            let sel = greedy_select(&graph);
            Ok((sel.values.values, sel.perm))
        }
    }
}

fn run_one(cfg: &ExperimentConfig, scenario: &dyn Scenario, run: usize) -> Result<Vec<RunRecord>> {
    let seed = cfg.run_seed(run);
    let wrap = |method: String, e: Error| Error::InRun { run, method, source: Box::new(e) };
    let inputs = scenario.prepare(run, seed).map_err(|e| wrap("setup".into(), e))?;
    if inputs.valuation.n() != inputs.evaluation.n() {
        return Err(wrap("setup".into(), Error::invalid("valuation and evaluation utilities differ in size")));
    }
    cfg.methods
        .iter()
        .map(|&method| {
            let (values, ranking) = compute_values(method, &inputs, cfg, seed).map_err(|e| wrap(method.to_string(), e))?;
            let curve = selection_curve(&ranking, inputs.evaluation.as_ref()).map_err(|e| wrap(method.to_string(), e))?;
            Ok(RunRecord { method, run, seed, values, ranking, objective: curve.objective, curve: curve.utilities() })
        })
        .collect()
}

/// Mean and population standard deviation of the per-run records, in run order.
pub fn aggregate(methods: &[Method], runs: &[Vec<RunRecord>]) -> Vec<MethodSummary> {
    methods
        .iter()
        .enumerate()
        .map(|(m, &method)| {
            let curves: Vec<&[f64]> = runs.iter().map(|r| r[m].curve.as_slice()).collect();
            let len = curves.first().map_or(0, |c| c.len());
            let column = |k: usize| curves.iter().map(|c| c[k]).collect::<Vec<f64>>();
            let objectives: Vec<f64> = runs.iter().map(|r| r[m].objective).collect();
            MethodSummary {
                method,
                mean_curve: (0..len).map(|k| mean(&column(k))).collect(),
                std_curve: (0..len).map(|k| population_std(&column(k))).collect(),
                mean_objective: mean(&objectives),
                std_objective: population_std(&objectives),
                objectives,
            }
        })
        .collect()
}

/// Runs the configured experiment on its data source.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    run_experiment_with(cfg, &DataScenario::new(cfg)?)
}

/// Runs the configured methods against a custom scenario. Runs execute in
/// parallel; the first failing run (by index) is reported.
pub fn run_experiment_with(cfg: &ExperimentConfig, scenario: &dyn Scenario) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let outcomes: Vec<Result<Vec<RunRecord>>> =
        (0..cfg.n_runs).into_par_iter().map(|r| run_one(cfg, scenario, r)).collect();
    let runs = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        config: cfg.clone(),
        seeds: (0..cfg.n_runs).map(|r| cfg.run_seed(r)).collect(),
        methods: aggregate(&cfg.methods, &runs),
        runs,
        wall_time: start.elapsed(),
    })
}
