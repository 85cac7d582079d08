//! Curvature sweep: pull points toward their class means and watch how
//! curvature and value-based selection respond.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DataSource, ExperimentConfig, Method};
use super::experiment::{run_experiment_with, DataScenario, ExperimentResult, RunInputs, Scenario};
use super::stats::{mean, spearman};
use crate::bipartite::learn_graph;
use crate::dataset::{split_dataset, Dataset};
use crate::error::{Error, Result};
use crate::utilities::{curvature, curvature_of_active, message_passing, CoverageUtility, ModelUtility};

/// Which rows are moved toward their class mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageScope {
    /// The whole pool, before splitting.
    #[default]
    All,
    /// Only the training split of each run.
    Train,
}

fn default_lambdas() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub experiment: ExperimentConfig,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub scope: MessageScope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodObjective {
    pub method: Method,
    pub mean_objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub lambda: f64,
    /// Mean over runs of the curvature of coverage on the learned graph
    /// (points with a positive singleton gain).
    pub curvature: f64,
    pub curvature_per_run: Vec<f64>,
    /// Curvature of the validation-accuracy utility itself, when every
    /// singleton gain is positive in every run.
    pub model_curvature: Option<f64>,
    pub objectives: Vec<MethodObjective>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scope: MessageScope,
    pub entries: Vec<SweepEntry>,
    /// Spearman correlation of curvature with λ; `None` if curvature is constant.
    pub curvature_spearman: Option<f64>,
}

impl SweepReport {
    pub fn objective(&self, lambda_index: usize, method: Method) -> Option<f64> {
        self.entries[lambda_index].objectives.iter().find(|o| o.method == method).map(|o| o.mean_objective)
    }

    /// `sweep.json` and `sweep.csv` (`lambda,curvature,<method>...`).
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("sweep.json"), serde_json::to_string_pretty(self)? + "\n")?;
        let mut w = csv::Writer::from_path(dir.join("sweep.csv"))?;
        let mut header = vec!["lambda".to_string(), "curvature".to_string()];
        if let Some(e) = self.entries.first() {
            header.extend(e.objectives.iter().map(|o| o.method.to_string()));
        }
        w.write_record(&header)?;
        for e in &self.entries {
            let mut row = vec![format!("{:?}", e.lambda), format!("{:?}", e.curvature)];
            row.extend(e.objectives.iter().map(|o| format!("{:?}", o.mean_objective)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

struct TrainOnly<'a> {
    pool: &'a Dataset,
    cfg: &'a ExperimentConfig,
    lambda: f64,
}

impl Scenario for TrainOnly<'_> {
    fn prepare(&self, _run: usize, seed: u64) -> Result<RunInputs> {
        let s = self.cfg.splits;
        let sp = split_dataset(self.pool, s.train, s.valid, s.test, seed)?;
        let train = message_passing(&sp.train, self.lambda)?;
        let valuation = ModelUtility::new(&train, &sp.valid, self.cfg.trainer)?;
        let evaluation = ModelUtility::new(&train, &sp.test, self.cfg.trainer)?;
        let features = Some((valuation.train().clone(), valuation.held_out().clone()));
        Ok(RunInputs { valuation: Arc::new(valuation), evaluation: Arc::new(evaluation), features })
    }
}

fn model_utilities(scenario: &dyn Scenario, cfg: &ExperimentConfig, run: usize) -> Result<RunInputs> {
    scenario.prepare(run, cfg.run_seed(run))
}

/// For each λ: message passing, curvature measurement, and the selection experiment.
pub fn curvature_sweep(sweep: &SweepConfig) -> Result<(SweepReport, Vec<ExperimentResult>)> {
    let cfg = &sweep.experiment;
    cfg.validate()?;
    if !matches!(cfg.dataset, DataSource::Gmm(_)) {
        return Err(Error::invalid("curvature sweep needs a gmm dataset source"));
    }
    if sweep.lambdas.is_empty() {
        return Err(Error::invalid("curvature sweep needs at least one lambda"));
    }
    if let Some(l) = sweep.lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::invalid(format!("lambda {l} outside [0, 1]")));
    }
    let base = cfg.dataset.load()?;
    let mut entries = Vec::new();
    let mut results = Vec::new();
    for &lambda in &sweep.lambdas {
        let all_scope;
        let train_scope;
        let scenario: &dyn Scenario = match sweep.scope {
            MessageScope::All => {
                all_scope = DataScenario::from_pool(message_passing(&base, lambda)?, cfg);
                &all_scope
            }
            MessageScope::Train => {
                train_scope = TrainOnly { pool: &base, cfg, lambda };
                &train_scope
            }
        };
        let measured = (0..cfg.n_runs)
            .into_par_iter()
            .map(|r| {
                let inputs = model_utilities(scenario, cfg, r)?;
                let (train, valid) = inputs.features.as_ref().expect("data scenarios carry features");
                let (graph, _) = learn_graph(train, valid, &cfg.graph, inputs.valuation.as_ref(), cfg.run_seed(r))?;
                let c = curvature_of_active(&CoverageUtility::new(graph))?.c;
                let model_c = curvature(inputs.valuation.as_ref()).ok().map(|rep| rep.c);
                Ok((c, model_c))
            })
            .collect::<Vec<Result<(f64, Option<f64>)>>>()
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let curvature_per_run: Vec<f64> = measured.iter().map(|m| m.0).collect();
        let model_curvature = measured
            .iter()
            .map(|m| m.1)
            .collect::<Option<Vec<f64>>>()
            .map(|cs| mean(&cs));
        let result = run_experiment_with(cfg, scenario)?;
        entries.push(SweepEntry {
            lambda,
            curvature: mean(&curvature_per_run),
            curvature_per_run,
            model_curvature,
            objectives: result
                .methods
                .iter()
                .map(|m| MethodObjective { method: m.method, mean_objective: m.mean_objective })
                .collect(),
        });
        results.push(result);
    }
    let curvature_spearman =
        spearman(&sweep.lambdas, &entries.iter().map(|e| e.curvature).collect::<Vec<_>>());
    Ok((SweepReport { scope: sweep.scope, entries, curvature_spearman }, results))
}
