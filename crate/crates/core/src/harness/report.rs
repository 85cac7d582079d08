use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::Method;
use super::experiment::ExperimentResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub method: Method,
    /// Mean objective of `dp` minus that of `method`.
    pub objective_gap: f64,
    /// `curve_dp(k) − curve_method(k)` on the mean curves.
    pub gap_curve: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub entries: Vec<GapEntry>,
}

/// Distance of every method from the optimal sequence.
pub fn gap_report(result: &ExperimentResult) -> Result<GapReport> {
    let dp = result
        .summary(Method::Dp)
        .ok_or_else(|| Error::invalid("gap report needs a dp entry in the experiment"))?;
    let entries = result
        .methods
        .iter()
        .map(|m| GapEntry {
            method: m.method,
            objective_gap: dp.mean_objective - m.mean_objective,
            gap_curve: dp.mean_curve.iter().zip(&m.mean_curve).map(|(a, b)| a - b).collect(),
        })
        .collect();
    Ok(GapReport { entries })
}

impl GapReport {
    pub fn entry(&self, method: Method) -> Option<&GapEntry> {
        self.entries.iter().find(|e| e.method == method)
    }

    /// `gap_report.json` plus `gaps.csv` with one column per method.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("gap_report.json"), serde_json::to_string_pretty(self)? + "\n")?;
        let mut w = csv::Writer::from_path(dir.join("gaps.csv"))?;
        let mut header = vec!["k".to_string()];
        header.extend(self.entries.iter().map(|e| e.method.to_string()));
        w.write_record(&header)?;
        let len = self.entries.first().map_or(0, |e| e.gap_curve.len());
        for k in 0..len {
            let mut row = vec![(k + 1).to_string()];
            row.extend(self.entries.iter().map(|e| format!("{:?}", e.gap_curve[k])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{DataSource, ExperimentConfig, GmmSource, SplitSizes};
    use crate::harness::experiment::{run_experiment_with, FixedScenario};
    use crate::utilities::{BipartiteGraph, CoverageUtility, LinearUtility};
    use crate::utility::Utility;
    use std::sync::Arc;

    fn run(u: Arc<dyn Utility>, methods: &str, runs: usize) -> ExperimentResult {
        let n = u.n();
        let mut cfg = ExperimentConfig::new(
            DataSource::Gmm(GmmSource { n_per_class: 1, classes: 2, dim: 1, separation: 1.0, seed: 0 }),
            SplitSizes { train: n, valid: 1, test: 1 },
            methods.split(' ').map(|m| m.parse().unwrap()).collect(),
        );
        cfg.n_runs = runs;
        run_experiment_with(&cfg, &FixedScenario { valuation: u.clone(), evaluation: u }).unwrap()
    }

    #[test]
    fn dp_row_is_zero_and_linear_gaps_vanish() {
        let u: Arc<dyn Utility> = Arc::new(LinearUtility::new(vec![1.0, 4.0, 2.0, 3.5, 0.5]).unwrap());
        let rep = gap_report(&run(u, "dp shapley banzhaf loo beta:16,1", 1)).unwrap();
        for e in &rep.entries {
            assert_eq!(e.objective_gap, 0.0, "{}", e.method);
            assert!(e.gap_curve.iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn random_gap_nonnegative_on_coverage() {
        let g = BipartiteGraph::from_coverage_sets(6, &[vec![0, 1, 2], vec![2, 3], vec![3, 4, 5], vec![0], vec![5], vec![1, 4]])
            .unwrap();
        let rep = gap_report(&run(Arc::new(CoverageUtility::new(g)), "dp random", 5)).unwrap();
        assert!(rep.entry(Method::Random).unwrap().objective_gap >= 0.0);
        let dir = tempfile::tempdir().unwrap();
        rep.write(dir.path()).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("gaps.csv")).unwrap();
        assert!(csv.starts_with("k,dp,random\n1,0.0,"));
    }

    #[test]
    fn missing_dp_rejected() {
        let u: Arc<dyn Utility> = Arc::new(LinearUtility::new(vec![1.0, 2.0]).unwrap());
        assert!(gap_report(&run(u, "random", 1)).is_err());
    }
}
