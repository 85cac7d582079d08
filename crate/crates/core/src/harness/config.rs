use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bipartite::GraphLearnConfig;
use crate::dataset::Dataset;
use crate::dp::MAX_DP_CAP;
use crate::error::{Error, Result};
use crate::semivalues::SemiValueScheme;
use crate::surrogate::WlsKernel;
use crate::utilities::{generate_gmm, GmmSpec, TrainerConfig};

/// A valuation or selection method, written as `dp`, `shapley`, `beta:α,β`,
/// `banzhaf`, `loo`, `wls:<kernel>`, `bipartite` or `random`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Dp,
    Semi(SemiValueScheme),
    Wls(WlsKernel),
    Bipartite,
    Random,
}

impl Method {
    /// Name usable as a file stem: `beta:2,1` becomes `beta_2_1`.
    pub fn file_stem(&self) -> String {
        self.to_string().replace([':', ','], "_")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Dp => write!(f, "dp"),
            Method::Semi(s) => write!(f, "{s}"),
            Method::Wls(k) => write!(f, "wls:{k}"),
            Method::Bipartite => write!(f, "bipartite"),
            Method::Random => write!(f, "random"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dp" => Ok(Method::Dp),
            "bipartite" => Ok(Method::Bipartite),
            "random" => Ok(Method::Random),
            other => match other.strip_prefix("wls:") {
                Some(kernel) => Ok(Method::Wls(kernel.parse()?)),
                None if other == "wls" => Ok(Method::Wls(WlsKernel::Shapley)),
                None => Ok(Method::Semi(other.parse()?)),
            },
        }
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Gaussian-mixture pool drawn with its own seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmmSource {
    pub n_per_class: usize,
    pub classes: usize,
    pub dim: usize,
    pub separation: f64,
    #[serde(default)]
    pub seed: u64,
}

impl GmmSource {
    pub fn spec(&self) -> GmmSpec {
        GmmSpec { n_per_class: self.n_per_class, classes: self.classes, dim: self.dim, separation: self.separation }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Gmm(GmmSource),
    Csv(PathBuf),
}

impl DataSource {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DataSource::Gmm(g) => {
                g.spec().validate()?;
                Ok(generate_gmm(&g.spec(), g.seed))
            }
            DataSource::Csv(path) => Dataset::load(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

fn default_runs() -> usize {
    1
}

fn default_budget() -> usize {
    1000
}

fn default_dp_cap() -> usize {
    crate::dp::DEFAULT_DP_CAP
}

/// One experiment: a data pool, its split sizes, and the methods to compare.
///
/// Run `r` uses seed `base_seed + 10 r` for its split and for every method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DataSource,
    pub splits: SplitSizes,
    pub methods: Vec<Method>,
    #[serde(default = "default_runs")]
    pub n_runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Utility calls allowed per sampling method and run.
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_dp_cap")]
    pub dp_cap: usize,
    #[serde(default)]
    pub trainer: TrainerConfig,
    #[serde(default)]
    pub graph: GraphLearnConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(dataset: DataSource, splits: SplitSizes, methods: Vec<Method>) -> Self {
        ExperimentConfig {
            dataset,
            splits,
            methods,
            n_runs: default_runs(),
            base_seed: 0,
            budget: default_budget(),
            dp_cap: default_dp_cap(),
            trainer: TrainerConfig::default(),
            graph: GraphLearnConfig::default(),
            output_dir: None,
        }
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        self.base_seed.wrapping_add(10 * run as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::invalid("n_runs must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("no methods requested"));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::invalid(format!("method {m} listed twice")));
            }
        }
        let SplitSizes { train, valid, test } = self.splits;
        if train == 0 || valid == 0 || test == 0 {
            return Err(Error::invalid("every split needs at least one row"));
        }
        if self.budget == 0 {
            return Err(Error::invalid("budget must be at least 1"));
        }
        if self.dp_cap > MAX_DP_CAP {
            return Err(Error::invalid(format!("dp_cap {} above hard maximum {MAX_DP_CAP}", self.dp_cap)));
        }
        if self.methods.contains(&Method::Dp) && train > self.dp_cap {
            return Err(Error::CapExceeded { what: "dp training split", n: train, cap: self.dp_cap });
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_strings() {
        for s in ["dp", "shapley", "beta:16,1", "banzhaf", "loo", "wls:shapley", "wls:banzhaf", "bipartite", "random"] {
            assert_eq!(s.parse::<Method>().unwrap().to_string(), s);
        }
        assert_eq!("wls".parse::<Method>().unwrap(), Method::Wls(WlsKernel::Shapley));
        assert!("knn".parse::<Method>().is_err());
        assert_eq!("beta:2,1".parse::<Method>().unwrap().file_stem(), "beta_2_1");
        assert_eq!("wls:beta:16,1".parse::<Method>().unwrap().file_stem(), "wls_beta_16_1");
    }

    #[test]
    fn config_json() {
        let text = r#"{
            "dataset": {"gmm": {"n_per_class": 10, "classes": 3, "dim": 2, "separation": 2.0}},
            "splits": {"train": 8, "valid": 8, "test": 8},
            "methods": ["dp", "shapley", "random"]
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.n_runs, 1);
        assert_eq!(cfg.budget, 1000);
        assert_eq!(cfg.methods[1], Method::Semi(SemiValueScheme::Shapley));
        cfg.validate().unwrap();
        let back: ExperimentConfig = serde_json::from_str(&cfg.to_json_pretty().unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.run_seed(3), 30);
    }

    #[test]
    fn validation() {
        let base = ExperimentConfig::new(
            DataSource::Gmm(GmmSource { n_per_class: 10, classes: 3, dim: 2, separation: 2.0, seed: 0 }),
            SplitSizes { train: 25, valid: 2, test: 2 },
            vec![Method::Dp],
        );
        assert!(matches!(base.validate(), Err(Error::CapExceeded { .. })));
        let mut c = base.clone();
        c.methods = vec![Method::Random, Method::Random];
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.n_runs = 0;
        c.methods = vec![Method::Random];
        assert!(c.validate().is_err());
    }
}
